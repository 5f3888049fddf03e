//! Dilation, erosion and the Minkowski r-perimeter on grids.
//!
//! The sampled set is the union of its cells, so the interface between an
//! occupied and an empty cell center sits half a cell from each. Thresholds
//! are therefore applied at `r + h/2` on center-to-center distances: a cell
//! joins the dilation iff its center is within `r` of the interface, and
//! survives erosion iff it is at least `r` inside it.

use super::edt::{distance_transform, DistanceField};
use super::GridSet;
use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

fn threshold<T: Real>(h: T, r: T) -> T {
    r + h * T::lit(0.5)
}

/// Cells needed around the occupied region so a dilation by `r` stays inside
/// the array.
fn dilation_pad<T: Real>(h: T, r: T) -> usize {
    (threshold(h, r) / h).ceil().to_usize().unwrap_or(usize::MAX / 4) + 1
}

fn masked<T: Real>(set: &GridSet<T>, occupancy: Vec<bool>) -> GridSet<T> {
    GridSet::from_parts(set.spacing(), set.origin().to_vec(), set.dims().to_vec(), occupancy)
        .expect("geometry copied from a valid grid")
}

fn dilation_mask<T: Real>(df: &DistanceField<T>, r: T) -> Vec<bool> {
    let t = threshold(df.spacing(), r);
    df.values().iter().map(|&d| d < t).collect()
}

fn erosion_mask<T: Real>(df: &DistanceField<T>, r: T) -> Vec<bool> {
    let t = threshold(df.spacing(), r);
    df.values().iter().map(|&d| d <= -t).collect()
}

/// `E ⊕ B_r`. The result lives on a grid padded by a fixed number of cells
/// (depending only on `r` and `h`) so that dilations of sets sampled on the
/// same grid remain comparable cell by cell.
pub fn dilate<T: Real>(set: &GridSet<T>, r: T) -> Result<GridSet<T>> {
    if !(r > T::zero()) {
        return invalid("dilation radius must be positive");
    }
    let padded = set.padded(dilation_pad(set.spacing(), r));
    if padded.is_empty() {
        return Ok(padded);
    }
    let df = distance_transform(&padded);
    Ok(masked(&padded, dilation_mask(&df, r)))
}

/// `E ⊖ B_r`, on the input grid (re-padded by one cell only if the input
/// violates the margin invariant). The result is a subset of `E`.
pub fn erode<T: Real>(set: &GridSet<T>, r: T) -> Result<GridSet<T>> {
    if !(r > T::zero()) {
        return invalid("erosion radius must be positive");
    }
    let base = set.with_margin(1);
    if base.is_empty() {
        return Ok(base);
    }
    let df = distance_transform(&base);
    Ok(masked(&base, erosion_mask(&df, r)))
}

/// `(∂E) ⊕ B_r`: cells whose center lies within `r` of the interface.
pub fn boundary_band<T: Real>(set: &GridSet<T>, r: T) -> Result<GridSet<T>> {
    if !(r > T::zero()) {
        return invalid("band radius must be positive");
    }
    let padded = set.padded(dilation_pad(set.spacing(), r));
    if padded.is_empty() {
        return Ok(padded);
    }
    let df = distance_transform(&padded);
    let t = threshold(padded.spacing(), r);
    let band = df.values().iter().map(|&d| d.abs() < t).collect();
    Ok(masked(&padded, band))
}

/// Minkowski r-perimeter `(|E ⊕ B_r| - |E ⊖ B_r|) / (2r)`.
///
/// Requires `r >= 2h`; below that the band is under-resolved.
pub fn minkowski_perimeter<T: Real>(set: &GridSet<T>, r: T) -> Result<T> {
    let h = set.spacing();
    if !(r > T::zero()) {
        return invalid("perimeter radius must be positive");
    }
    if r < T::lit(2.0) * h * (T::one() - T::lit(1e-12)) {
        return Err(Error::Resolution {
            r: r.to_f64_lossy(),
            spacing: h.to_f64_lossy(),
            max_spacing: r.to_f64_lossy() / 2.0,
        });
    }
    if set.is_empty() {
        return Ok(T::zero());
    }
    let padded = set.padded(dilation_pad(h, r));
    let df = distance_transform(&padded);
    let t = threshold(h, r);
    let band = df.values().iter().filter(|&&d| d.abs() < t).count();
    Ok(T::from_usize_lossy(band) * padded.cell_volume() / (T::lit(2.0) * r))
}
