//! Reference values shared by the oracle and acceptance targets.
//!
//! Closed forms are written out; numerical references were produced by
//! direct pairwise summation (no FFT) and are frozen here.
#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::PathBuf;

/// `Φ_1(B_1) = 16π/3` in the plane.
pub const UNIT_DISK_PHI1: f64 = 16.0 * PI / 3.0;

/// `Φ_1` of the unit square: `4 ln(1 + √2) - (4/3)(√2 - 1)`.
pub fn unit_square_phi1() -> f64 {
    let s = std::f64::consts::SQRT_2;
    4.0 * (1.0 + s).ln() - 4.0 / 3.0 * (s - 1.0)
}

/// `Per_{0.1}` of the unit square: `4 + (π - 4) / 20`.
pub fn unit_square_per_01() -> f64 {
    4.0 + (PI - 4.0) / 20.0
}

/// Direct-summation `Φ_1` of the rasterized unit disk (cell centers strictly
/// inside, lattice anchored at the center): `(h, occupied cells, Φ_1)`.
pub const DISK_DIRECT_PHI1: [(f64, usize, f64); 3] = [
    (0.04, 1941, 1.64250088625375135e1),
    (0.02, 7825, 1.66399188330633017e1),
    (0.01, 31397, 1.67284548230250216e1),
];

/// Volume-normalized Richardson extrapolation (first order in `h`) of two
/// consecutive rows of [`DISK_DIRECT_PHI1`].
pub fn disk_extrapolation(coarse: (f64, usize, f64), fine: (f64, usize, f64)) -> f64 {
    let norm = |(h, cells, phi): (f64, usize, f64)| phi * (PI / (cells as f64 * h * h)).powf(1.5);
    2.0 * norm(fine) - norm(coarse)
}

/// Smallest implied isoperimetric constant over the seeded random hull
/// family (seed 42, 200 trials, r = 0.1).
pub const ISO_MIN_CONSTANT: f64 = 0.340776277752112;

pub fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Repository preset directory.
pub fn preset(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../presets").join(name)
}
