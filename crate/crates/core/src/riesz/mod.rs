//! Riesz interaction energy `int_E int_E |x - y|^-alpha` and potential.
//!
//! Grids are evaluated either by a direct double sum (the slow oracle) or by
//! zero-padded spectral convolution. Convex polygons have an exact
//! chord-power representation, see [`polygon_energy`].

mod analytic;
mod chord;
mod spectral;

pub use analytic::{ball_energy, lipschitz_gap_constant};
pub use chord::{polygon_energy, polygon_energy_with_tolerance};
pub use spectral::{riesz_energy_fast, riesz_energy_fast_capped, riesz_potential, riesz_potential_capped};

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::grid::GridSet;
use crate::quadrature::integrate;
use crate::scalar::{compensated_sum, CompensatedSum, Real};

/// Default cap on the occupied cells accepted by [`riesz_energy_direct`].
pub const DIRECT_CELL_CAP: usize = 20_000;

/// Default cap on the padded cell count of the spectral path.
pub const SPECTRAL_CELL_CAP: usize = 1 << 24;

/// Discretized kernel `|z|^-alpha` on a grid with spacing `h`.
///
/// The singular value at `z = 0` is replaced by the mean of `|z|^-alpha` over
/// one cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RieszKernel<T> {
    alpha: T,
    spacing: T,
    dim: usize,
    origin_weight: T,
}

impl<T: Real> RieszKernel<T> {
    pub fn new(alpha: T, spacing: T, dim: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return invalid(format!("kernel dimension must be 1, 2 or 3 (got {dim})"));
        }
        if !(alpha > T::zero()) || !(alpha < T::from_usize_lossy(dim)) {
            return invalid(format!("alpha must lie in (0, {dim}) (got {alpha})"));
        }
        if !(spacing > T::zero()) || !spacing.is_finite() {
            return invalid("spacing must be positive");
        }
        let w = cell_mean_singular(alpha.to_f64_lossy(), spacing.to_f64_lossy(), dim);
        Ok(Self { alpha, spacing, dim, origin_weight: T::lit(w) })
    }

    /// Kernel matched to a grid.
    pub fn for_grid(alpha: T, grid: &GridSet<T>) -> Result<Self> {
        Self::new(alpha, grid.spacing(), grid.dim())
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn origin_weight(&self) -> T {
        self.origin_weight
    }

    /// Kernel value at an integer cell offset.
    #[inline]
    pub fn at_offset(&self, offset: &[isize]) -> T {
        let d2: isize = offset.iter().map(|&o| o * o).sum();
        if d2 == 0 {
            self.origin_weight
        } else {
            (T::from_usize_lossy(d2 as usize).sqrt() * self.spacing).powf(-self.alpha)
        }
    }

    fn check_grid(&self, grid: &GridSet<T>) -> Result<()> {
        if grid.dim() != self.dim || grid.spacing() != self.spacing {
            return Err(Error::InvalidArgument(format!(
                "kernel (n = {}, h = {}) does not match grid (n = {}, h = {})",
                self.dim,
                self.spacing,
                grid.dim(),
                grid.spacing()
            )));
        }
        Ok(())
    }
}

/// Mean of `|z|^-alpha` over the cube `[-h/2, h/2]^n`.
///
/// The cube splits into `2n` pyramids with apex at the origin. Scaling along
/// rays gives `int_pyramid |z|^-alpha = a / (n - alpha) * int_face |w|^-alpha`
/// with `a = h/2`, leaving a smooth integral over one face.
fn cell_mean_singular(alpha: f64, h: f64, n: usize) -> f64 {
    let a = 0.5 * h;
    let tol = 1e-13;
    let face = match n {
        1 => a.powf(-alpha),
        2 => 2.0 * integrate(|y| (a * a + y * y).powf(-0.5 * alpha), 0.0, a, tol).value,
        _ => {
            4.0 * integrate(
                |y| integrate(|z| (a * a + y * y + z * z).powf(-0.5 * alpha), 0.0, a, tol).value,
                0.0,
                a,
                tol,
            )
            .value
        }
    };
    let total = 2.0 * n as f64 * a / (n as f64 - alpha) * face;
    total / h.powi(n as i32)
}

/// `h^{2n} sum_{p, q in E} k(p - q)` by direct summation over occupied cells.
pub fn riesz_energy_direct<T: Real>(grid: &GridSet<T>, kernel: &RieszKernel<T>) -> Result<T> {
    riesz_energy_direct_capped(grid, kernel, DIRECT_CELL_CAP)
}

pub fn riesz_energy_direct_capped<T: Real>(grid: &GridSet<T>, kernel: &RieszKernel<T>, cap: usize) -> Result<T> {
    kernel.check_grid(grid)?;
    let cells = grid.occupied_indices();
    if cells.len() > cap {
        return Err(Error::ResourceLimit(format!(
            "{} occupied cells exceed the direct-summation cap of {cap}; use the spectral path",
            cells.len()
        )));
    }
    if cells.is_empty() {
        return Ok(T::zero());
    }
    let n = grid.dim();
    let coords: Vec<[isize; 3]> = cells
        .iter()
        .map(|&i| {
            let u = grid.unravel(i);
            [u[0] as isize, u[1] as isize, u[2] as isize]
        })
        .collect();
    // Kernel values for every offset in the bounding box of the grid.
    let dims: Vec<usize> = (0..3).map(|k| if k < n { grid.dims()[k] } else { 1 }).collect();
    let span: Vec<usize> = dims.iter().map(|&d| 2 * d - 1).collect();
    let table: Vec<T> = (0..span.iter().product::<usize>())
        .into_par_iter()
        .map(|flat| {
            let o0 = (flat % span[0]) as isize - (dims[0] as isize - 1);
            let o1 = ((flat / span[0]) % span[1]) as isize - (dims[1] as isize - 1);
            let o2 = (flat / (span[0] * span[1])) as isize - (dims[2] as isize - 1);
            kernel.at_offset(&[o0, o1, o2])
        })
        .collect();
    let lookup = |p: &[isize; 3], q: &[isize; 3]| {
        let i0 = (p[0] - q[0] + dims[0] as isize - 1) as usize;
        let i1 = (p[1] - q[1] + dims[1] as isize - 1) as usize;
        let i2 = (p[2] - q[2] + dims[2] as isize - 1) as usize;
        table[i0 + span[0] * (i1 + span[1] * i2)]
    };
    let rows: Vec<T> = coords
        .par_iter()
        .map(|p| {
            let mut acc = CompensatedSum::new();
            for q in &coords {
                acc.add(lookup(p, q));
            }
            acc.value()
        })
        .collect();
    let cell = grid.cell_volume();
    Ok(compensated_sum(rows) * cell * cell)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_weight_matches_polar_quadrature() {
        // Independent evaluation: polar coordinates over one quadrant of the
        // cell, radial integral in closed form.
        let (alpha, h) = (0.7f64, 0.3f64);
        let a = h / 2.0;
        let k = RieszKernel::new(alpha, h, 2).unwrap();
        let polar = 8.0
            * integrate(
                |t: f64| (a / t.cos()).powf(2.0 - alpha) / (2.0 - alpha),
                0.0,
                std::f64::consts::FRAC_PI_4,
                1e-14,
            )
            .value
            / (h * h);
        assert!((k.origin_weight() - polar).abs() / polar < 1e-10);
    }

    #[test]
    fn origin_weight_scales_and_dimensions() {
        let w1 = RieszKernel::new(1.0f64, 0.1, 2).unwrap().origin_weight();
        let w2 = RieszKernel::new(1.0f64, 0.2, 2).unwrap().origin_weight();
        assert!((w1 / w2 - 2.0).abs() < 1e-12);
        // n = 1 closed form: mean of |z|^-a over [-h/2, h/2].
        let (a, h) = (0.5f64, 0.4f64);
        let w = RieszKernel::new(a, h, 1).unwrap().origin_weight();
        assert!((w - (h / 2.0).powf(-a) / (1.0 - a)).abs() < 1e-12);
        // n = 3, alpha -> 0 limit is 1.
        let w = RieszKernel::new(1e-9f64, 0.1, 3).unwrap().origin_weight();
        assert!((w - 1.0).abs() < 1e-6);
    }

    #[test]
    fn invalid_kernels() {
        assert!(RieszKernel::new(0.0f64, 0.1, 2).is_err());
        assert!(RieszKernel::new(2.0f64, 0.1, 2).is_err());
        assert!(RieszKernel::new(1.0f64, -0.1, 2).is_err());
        assert!(RieszKernel::new(1.0f64, 0.1, 4).is_err());
    }

    #[test]
    fn two_cells_four_terms() {
        let h = 0.1f64;
        let mut g = GridSet::<f64>::empty(h, vec![0.0, 0.0], vec![8, 3]).unwrap();
        g.set(g.ravel([1, 1, 0]), true);
        g.set(g.ravel([5, 1, 0]), true);
        let k = RieszKernel::new(0.5, h, 2).unwrap();
        let d: f64 = 0.4;
        let expected = h.powi(4) * (2.0 * d.powf(-0.5) + 2.0 * k.origin_weight());
        let e = riesz_energy_direct(&g, &k).unwrap();
        assert!((e - expected).abs() / expected < 1e-14);
        let f = riesz_energy_fast(&g, &k).unwrap();
        assert!((f - expected).abs() / expected < 1e-9);
    }

    #[test]
    fn direct_cap_and_empty() {
        let g = GridSet::<f64>::rasterize_ball(&[0.0, 0.0], 1.0, 0.05).unwrap();
        let k = RieszKernel::for_grid(1.0, &g).unwrap();
        assert!(matches!(riesz_energy_direct_capped(&g, &k, 100), Err(Error::ResourceLimit(_))));
        let e = GridSet::<f64>::empty(0.05, vec![0.0, 0.0], vec![4, 4]).unwrap();
        assert_eq!(riesz_energy_direct(&e, &k).unwrap(), 0.0);
        let bad = RieszKernel::new(1.0, 0.04, 2).unwrap();
        assert!(riesz_energy_direct(&g, &bad).is_err());
    }
}
