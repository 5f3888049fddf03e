//! Binary occupancy grids standing in for measurable sets, and the
//! morphological machinery behind the r-perimeter.
//!
//! A [`GridSet`] samples a set at cell centers `origin + i * spacing`. Its
//! volume is the occupied cell count times `spacing^n`. All lengths in the
//! public API are physical lengths, never cell counts.

mod asymmetry;
mod edt;
mod morphology;
pub mod pgm;

pub use asymmetry::{
    fraenkel_asymmetry, fraenkel_asymmetry_with, symmetric_difference_volume, Asymmetry,
    TranslationSearch,
};
pub use edt::{distance_transform, DistanceField};
pub use morphology::{boundary_band, dilate, erode, minkowski_perimeter};

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::scalar::{compensated_sum, Real};

/// Default cap on the number of cells any single grid may hold.
pub const DEFAULT_MAX_CELLS: usize = 1 << 25;

/// Binary occupancy grid with physical spacing.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSet<T> {
    spacing: T,
    origin: Vec<T>,
    dims: Vec<usize>,
    occupancy: Vec<bool>,
}

/// Placement of the cell-center lattice used by rasterization.
#[derive(Clone, Copy, Debug)]
pub enum Lattice<'a, T> {
    /// Cell centers at `anchor + k * h`.
    Anchored(&'a [T]),
    /// Cells tile space from the coordinate origin: centers at `(k + 1/2) h`.
    Tiled,
}

impl<T: Real> GridSet<T> {
    /// An empty grid.
    pub fn empty(spacing: T, origin: Vec<T>, dims: Vec<usize>) -> Result<Self> {
        let cells = validate_geometry(spacing, &origin, &dims)?;
        Ok(Self { spacing, origin, dims, occupancy: vec![false; cells] })
    }

    pub fn from_parts(spacing: T, origin: Vec<T>, dims: Vec<usize>, occupancy: Vec<bool>) -> Result<Self> {
        let cells = validate_geometry(spacing, &origin, &dims)?;
        if occupancy.len() != cells {
            return invalid(format!("occupancy has {} cells, dims imply {cells}", occupancy.len()));
        }
        Ok(Self { spacing, origin, dims, occupancy })
    }

    /// Samples `inside` at every cell center of a grid covering the box
    /// `[lo, hi]` plus `margin` empty cells on each side.
    pub fn from_indicator<F>(
        lo: &[T],
        hi: &[T],
        spacing: T,
        lattice: Lattice<'_, T>,
        margin: usize,
        max_cells: usize,
        inside: F,
    ) -> Result<Self>
    where
        F: Fn(&[T]) -> bool + Sync,
    {
        let n = lo.len();
        if hi.len() != n || !(1..=3).contains(&n) {
            return invalid("bounding box must have matching dimension 1..=3");
        }
        if !(spacing > T::zero()) || !spacing.is_finite() {
            return invalid("spacing must be positive");
        }
        let mut origin = Vec::with_capacity(n);
        let mut dims = Vec::with_capacity(n);
        let mut total: usize = 1;
        for k in 0..n {
            let anchor = match lattice {
                Lattice::Anchored(a) => a[k],
                Lattice::Tiled => spacing * T::lit(0.5),
            };
            let first = ((lo[k] - anchor) / spacing).floor() - T::from_usize_lossy(margin);
            let last = ((hi[k] - anchor) / spacing).ceil() + T::from_usize_lossy(margin);
            let count = (last - first).to_f64_lossy() + 1.0;
            if !count.is_finite() || count > max_cells as f64 {
                return Err(Error::ResourceLimit(format!("grid would exceed {max_cells} cells")));
            }
            let count = count as usize;
            total = total.saturating_mul(count);
            if total > max_cells {
                return Err(Error::ResourceLimit(format!(
                    "grid would need more than {max_cells} cells (spacing {spacing})"
                )));
            }
            origin.push(anchor + first * spacing);
            dims.push(count);
        }
        let mut grid = Self::empty(spacing, origin, dims)?;
        let d0 = grid.dims[0];
        let g = &grid;
        let occ: Vec<bool> = (0..total)
            .into_par_iter()
            .with_min_len(d0.max(1024))
            .map(|idx| {
                let c = g.center(idx);
                inside(&c[..n])
            })
            .collect();
        grid.occupancy = occ;
        Ok(grid)
    }

    /// Rasterizes the open ball `B_radius(center)`: a cell is occupied iff its
    /// center lies strictly inside. The lattice is anchored at `center`.
    pub fn rasterize_ball(center: &[T], radius: T, spacing: T) -> Result<Self> {
        Self::rasterize_ball_capped(center, radius, spacing, DEFAULT_MAX_CELLS)
    }

    pub fn rasterize_ball_capped(center: &[T], radius: T, spacing: T, max_cells: usize) -> Result<Self> {
        if !(radius > T::zero()) {
            return invalid("ball radius must be positive");
        }
        if !(spacing > T::zero()) {
            return invalid("spacing must be positive");
        }
        if spacing > radius / T::lit(4.0) {
            return invalid(format!("spacing {spacing} too coarse for radius {radius}: need h <= R/4"));
        }
        let lo: Vec<T> = center.iter().map(|&c| c - radius).collect();
        let hi: Vec<T> = center.iter().map(|&c| c + radius).collect();
        let r2 = radius * radius;
        Self::from_indicator(&lo, &hi, spacing, Lattice::Anchored(center), 1, max_cells, |p| {
            let d2: T = p.iter().zip(center).map(|(&x, &c)| (x - c) * (x - c)).sum();
            d2 < r2
        })
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    pub fn origin(&self) -> &[T] {
        &self.origin
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn occupancy(&self) -> &[bool] {
        &self.occupancy
    }

    pub fn len(&self) -> usize {
        self.occupancy.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occupied_count() == 0
    }

    pub fn is_occupied(&self, idx: usize) -> bool {
        self.occupancy[idx]
    }

    pub fn set(&mut self, idx: usize, value: bool) {
        self.occupancy[idx] = value;
    }

    pub fn occupied_count(&self) -> usize {
        self.occupancy.iter().filter(|&&b| b).count()
    }

    /// Volume of a single cell, `h^n`.
    pub fn cell_volume(&self) -> T {
        self.spacing.powi(self.dim() as i32)
    }

    /// Lebesgue measure of the sampled set.
    pub fn volume(&self) -> T {
        T::from_usize_lossy(self.occupied_count()) * self.cell_volume()
    }

    /// Multi-index of a linear cell index (unused trailing axes are zero).
    #[inline]
    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let mut out = [0usize; 3];
        let mut rest = idx;
        for (k, &d) in self.dims.iter().enumerate() {
            out[k] = rest % d;
            rest /= d;
        }
        out
    }

    #[inline]
    pub fn ravel(&self, ijk: [usize; 3]) -> usize {
        let mut idx = 0;
        let mut stride = 1;
        for (k, &d) in self.dims.iter().enumerate() {
            idx += ijk[k] * stride;
            stride *= d;
        }
        idx
    }

    /// Physical coordinates of a cell center (unused trailing axes are zero).
    #[inline]
    pub fn center(&self, idx: usize) -> [T; 3] {
        let ijk = self.unravel(idx);
        let mut c = [T::zero(); 3];
        for k in 0..self.dim() {
            c[k] = self.origin[k] + T::from_usize_lossy(ijk[k]) * self.spacing;
        }
        c
    }

    /// Indices of occupied cells in increasing order.
    pub fn occupied_indices(&self) -> Vec<usize> {
        self.occupancy.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
    }

    /// Mean of the occupied cell centers, or `None` for an empty set.
    pub fn centroid(&self) -> Option<Vec<T>> {
        let idx = self.occupied_indices();
        if idx.is_empty() {
            return None;
        }
        let count = T::from_usize_lossy(idx.len());
        Some(
            (0..self.dim())
                .map(|k| compensated_sum(idx.iter().map(|&i| self.center(i)[k])) / count)
                .collect(),
        )
    }

    /// Smallest number of cells between an occupied cell and the array edge
    /// (`usize::MAX` when empty).
    pub fn margin(&self) -> usize {
        let mut m = usize::MAX;
        for (idx, &occ) in self.occupancy.iter().enumerate() {
            if occ {
                let ijk = self.unravel(idx);
                for (k, &d) in self.dims.iter().enumerate() {
                    m = m.min(ijk[k]).min(d - 1 - ijk[k]);
                }
            }
        }
        m
    }

    /// Copy padded with `pad` empty cells on every side of every axis. The
    /// sampled set is unchanged.
    pub fn padded(&self, pad: usize) -> Self {
        if pad == 0 {
            return self.clone();
        }
        let n = self.dim();
        let dims: Vec<usize> = self.dims.iter().map(|&d| d + 2 * pad).collect();
        let origin: Vec<T> =
            self.origin.iter().map(|&o| o - T::from_usize_lossy(pad) * self.spacing).collect();
        let mut out = Self { spacing: self.spacing, origin, dims, occupancy: Vec::new() };
        out.occupancy = vec![false; out.dims.iter().product()];
        for (idx, &occ) in self.occupancy.iter().enumerate() {
            if occ {
                let mut ijk = self.unravel(idx);
                for v in ijk.iter_mut().take(n) {
                    *v += pad;
                }
                let j = out.ravel(ijk);
                out.occupancy[j] = true;
            }
        }
        out
    }

    /// Ensures at least `cells` empty cells around the occupied region,
    /// padding uniformly when needed.
    pub fn with_margin(&self, cells: usize) -> Self {
        let m = self.margin();
        if m >= cells {
            self.clone()
        } else {
            self.padded(cells - m)
        }
    }

    /// Moves the occupied cells by whole cells inside the same array.
    pub fn shifted(&self, shift: &[isize]) -> Result<Self> {
        if shift.len() != self.dim() {
            return invalid("shift dimension mismatch");
        }
        let mut occ = vec![false; self.len()];
        for (idx, &o) in self.occupancy.iter().enumerate() {
            if !o {
                continue;
            }
            let mut ijk = self.unravel(idx);
            for k in 0..self.dim() {
                let v = ijk[k] as isize + shift[k];
                if v < 1 || v as usize + 1 >= self.dims[k] {
                    return invalid("shift moves occupied cells into the padding margin");
                }
                ijk[k] = v as usize;
            }
            occ[self.ravel(ijk)] = true;
        }
        Ok(Self { occupancy: occ, ..self.clone() })
    }

    /// Exact similarity image under `x -> factor * x`: spacing and origin are
    /// scaled, occupancy is untouched.
    pub fn scaled(&self, factor: T) -> Result<Self> {
        if !(factor > T::zero()) {
            return invalid("scale factor must be positive");
        }
        Ok(Self {
            spacing: self.spacing * factor,
            origin: self.origin.iter().map(|&o| o * factor).collect(),
            ..self.clone()
        })
    }

    /// Cell-wise inclusion test on grids with identical geometry.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.dims == other.dims
            && self.occupancy.iter().zip(&other.occupancy).all(|(&a, &b)| !a || b)
    }

    /// Largest distance between two occupied cell centers (0 when fewer than
    /// two cells are occupied).
    ///
    /// Every vertex of the hull of the centers is the first or last occupied
    /// cell of some row along the first axis, so only those are compared.
    pub fn occupied_diameter(&self) -> T {
        let d0 = self.dims[0];
        let mut ends: Vec<[T; 3]> = Vec::new();
        for (r, row) in self.occupancy.chunks(d0).enumerate() {
            let base = r * d0;
            let first = row.iter().position(|&b| b);
            let last = row.iter().rposition(|&b| b);
            if let (Some(a), Some(b)) = (first, last) {
                ends.push(self.center(base + a));
                if b != a {
                    ends.push(self.center(base + b));
                }
            }
        }
        let n = self.dim();
        let best = ends
            .par_iter()
            .enumerate()
            .map(|(i, p)| {
                ends[i + 1..]
                    .iter()
                    .map(|q| (0..n).map(|k| (p[k] - q[k]) * (p[k] - q[k])).sum::<T>())
                    .fold(T::zero(), T::max)
            })
            .reduce(T::zero, T::max);
        best.sqrt()
    }

    /// Length of the grid diagonal between the extreme cell centers.
    pub fn diagonal(&self) -> T {
        self.dims
            .iter()
            .map(|&d| {
                let e = T::from_usize_lossy(d.saturating_sub(1)) * self.spacing;
                e * e
            })
            .sum::<T>()
            .sqrt()
    }
}

/// Real values sampled at the cell centers of a grid, such as a potential.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField<T> {
    spacing: T,
    origin: Vec<T>,
    dims: Vec<usize>,
    values: Vec<T>,
}

impl<T: Real> ScalarField<T> {
    pub fn new(spacing: T, origin: Vec<T>, dims: Vec<usize>, values: Vec<T>) -> Result<Self> {
        let cells = validate_geometry(spacing, &origin, &dims)?;
        if values.len() != cells {
            return invalid(format!("field has {} values, dims imply {cells}", values.len()));
        }
        Ok(Self { spacing, origin, dims, values })
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    pub fn origin(&self) -> &[T] {
        &self.origin
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }
}

fn validate_geometry<T: Real>(spacing: T, origin: &[T], dims: &[usize]) -> Result<usize> {
    if !(spacing > T::zero()) || !spacing.is_finite() {
        return invalid(format!("spacing must be positive and finite (got {spacing})"));
    }
    if !(1..=3).contains(&dims.len()) || origin.len() != dims.len() {
        return invalid("grids are 1-, 2- or 3-dimensional with matching origin");
    }
    if dims.iter().any(|&d| d == 0) {
        return invalid("every grid dimension must be at least one cell");
    }
    dims.iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::ResourceLimit("grid cell count overflows".into()))
}
