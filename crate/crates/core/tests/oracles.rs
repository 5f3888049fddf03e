//! Closed forms and frozen direct-summation references.

mod common;

use std::f64::consts::{PI, TAU};

use common::*;
use minkperi::grid::{minkowski_perimeter, GridSet};
use minkperi::riesz::{
    ball_energy, polygon_energy, riesz_energy_direct_capped, riesz_energy_fast, RieszKernel,
};
use minkperi::Polygon;

#[test]
fn disk_energy_closed_form() {
    assert!(relative(ball_energy(1.0, 1.0, 2).unwrap(), UNIT_DISK_PHI1) < 1e-13);
}

#[test]
fn disk_direct_sums_are_frozen() {
    for (h, cells, phi) in DISK_DIRECT_PHI1 {
        let g = GridSet::rasterize_ball(&[0.0, 0.0], 1.0, h).unwrap();
        assert_eq!(g.occupied_count(), cells);
        let k = RieszKernel::for_grid(1.0, &g).unwrap();
        let direct = riesz_energy_direct_capped(&g, &k, 40_000).unwrap();
        assert!(relative(direct, phi) < 1e-12, "h = {h}: {direct} vs {phi}");
        let fast = riesz_energy_fast(&g, &k).unwrap();
        assert!(relative(fast, direct) < 1e-9, "h = {h}: {fast} vs {direct}");
    }
}

#[test]
fn disk_direct_sums_extrapolate_to_closed_form() {
    let [a, b, c] = DISK_DIRECT_PHI1;
    let coarse = relative(disk_extrapolation(a, b), UNIT_DISK_PHI1);
    let fine = relative(disk_extrapolation(b, c), UNIT_DISK_PHI1);
    assert!(fine < 5e-5, "{fine}");
    assert!(fine < coarse);
}

#[test]
fn unit_square_closed_forms() {
    let sq = Polygon::rectangle([0.0, 0.0], 1.0, 1.0).unwrap();
    assert!(relative(polygon_energy(&sq, 1.0).unwrap(), unit_square_phi1()) < 1e-9);
    assert!(relative(sq.minkowski_perimeter(0.1).unwrap(), unit_square_per_01()) < 1e-14);
}

#[test]
fn disk_perimeter_is_exactly_two_pi() {
    // |B_{1+r}| - |B_{1-r}| = 4πr for every r < 1.
    for r in [0.5, 0.1] {
        let p = minkperi::convex::ball_perimeter_analytic(1.0, r, 2).unwrap();
        assert!(relative(p, TAU) < 1e-14);
    }
    let g = GridSet::rasterize_ball(&[0.0, 0.0], 1.0, 0.01).unwrap();
    assert!(relative(minkowski_perimeter(&g, 0.5).unwrap(), 2.0 * PI) < 0.02);
}
