//! Zero-padded spectral convolution of the indicator with the kernel.

use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::{RieszKernel, SPECTRAL_CELL_CAP};
use crate::error::{Error, Result};
use crate::grid::{GridSet, ScalarField};
use crate::scalar::{compensated_sum, Real};

/// `V(p) = h^n sum_q k(p - q) 1_E(q)` at every cell of the grid.
pub fn riesz_potential<T: Real>(grid: &GridSet<T>, kernel: &RieszKernel<T>) -> Result<ScalarField<T>> {
    riesz_potential_capped(grid, kernel, SPECTRAL_CELL_CAP)
}

pub fn riesz_potential_capped<T: Real>(
    grid: &GridSet<T>,
    kernel: &RieszKernel<T>,
    cap: usize,
) -> Result<ScalarField<T>> {
    kernel.check_grid(grid)?;
    let n = grid.dim();
    let dims = grid.dims().to_vec();
    // Doubling each axis keeps every offset in (-d, d) free of wrap-around.
    let padded: Vec<usize> = dims.iter().map(|&d| 2 * d).collect();
    let total = padded.iter().try_fold(1usize, |a, &d| a.checked_mul(d)).unwrap_or(usize::MAX);
    if total > cap {
        return Err(Error::ResourceLimit(format!(
            "spectral grid of {total} cells exceeds the cap of {cap}; coarsen h"
        )));
    }
    if grid.is_empty() {
        let zeros = vec![T::zero(); grid.len()];
        return ScalarField::new(grid.spacing(), grid.origin().to_vec(), dims, zeros);
    }

    let unravel = |mut flat: usize, shape: &[usize]| {
        let mut out = [0usize; 3];
        for (k, &d) in shape.iter().enumerate() {
            out[k] = flat % d;
            flat /= d;
        }
        out
    };

    let mut kern: Vec<Complex<T>> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let j = unravel(flat, &padded);
            let mut off = [0isize; 3];
            for k in 0..n {
                let m = padded[k] as isize;
                let v = j[k] as isize;
                off[k] = if v < m / 2 { v } else { v - m };
            }
            Complex::new(kernel.at_offset(&off[..n]), T::zero())
        })
        .collect();
    let mut ind = vec![Complex::new(T::zero(), T::zero()); total];
    for idx in grid.occupied_indices() {
        let u = grid.unravel(idx);
        let mut flat = 0;
        let mut stride = 1;
        for k in 0..n {
            flat += u[k] * stride;
            stride *= padded[k];
        }
        ind[flat] = Complex::new(T::one(), T::zero());
    }

    let mut planner = FftPlanner::<T>::new();
    let forward: Vec<Arc<dyn Fft<T>>> = padded.iter().map(|&m| planner.plan_fft_forward(m)).collect();
    let inverse: Vec<Arc<dyn Fft<T>>> = padded.iter().map(|&m| planner.plan_fft_inverse(m)).collect();
    fft_nd(&mut kern, &padded, &forward);
    fft_nd(&mut ind, &padded, &forward);
    kern.par_iter_mut().zip(ind.par_iter()).for_each(|(a, b)| *a = *a * *b);
    fft_nd(&mut kern, &padded, &inverse);

    let norm = grid.cell_volume() / T::from_usize_lossy(total);
    let values: Vec<T> = (0..grid.len())
        .map(|idx| {
            let u = grid.unravel(idx);
            let mut flat = 0;
            let mut stride = 1;
            for k in 0..n {
                flat += u[k] * stride;
                stride *= padded[k];
            }
            kern[flat].re * norm
        })
        .collect();
    ScalarField::new(grid.spacing(), grid.origin().to_vec(), dims, values)
}

/// Separable n-dimensional FFT, one axis at a time.
fn fft_nd<T: Real>(data: &mut [Complex<T>], shape: &[usize], plans: &[Arc<dyn Fft<T>>]) {
    let mut stride = 1usize;
    for (axis, &len) in shape.iter().enumerate() {
        let plan = &plans[axis];
        if stride == 1 {
            data.par_chunks_mut(len).for_each(|line| plan.process(line));
        } else {
            let block = stride * len;
            data.par_chunks_mut(block).for_each(|blk| {
                let mut line = vec![Complex::new(T::zero(), T::zero()); len];
                for s in 0..stride {
                    for q in 0..len {
                        line[q] = blk[s + q * stride];
                    }
                    plan.process(&mut line);
                    for q in 0..len {
                        blk[s + q * stride] = line[q];
                    }
                }
            });
        }
        stride *= len;
    }
}

/// `h^n sum_{p in E} V(p)`, from [`riesz_potential`].
pub fn riesz_energy_fast<T: Real>(grid: &GridSet<T>, kernel: &RieszKernel<T>) -> Result<T> {
    riesz_energy_fast_capped(grid, kernel, SPECTRAL_CELL_CAP)
}

pub fn riesz_energy_fast_capped<T: Real>(grid: &GridSet<T>, kernel: &RieszKernel<T>, cap: usize) -> Result<T> {
    let v = riesz_potential_capped(grid, kernel, cap)?;
    Ok(energy_from_potential(grid, &v))
}

pub(crate) fn energy_from_potential<T: Real>(grid: &GridSet<T>, v: &ScalarField<T>) -> T {
    compensated_sum(grid.occupied_indices().into_iter().map(|i| v.values()[i])) * grid.cell_volume()
}
