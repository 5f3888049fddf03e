//! Executable forms of the quantitative isoperimetric, Brunn-Minkowski and
//! convex-body inequalities.
//!
//! Convex polygons are measured exactly. Grids and polyhedra use the grid
//! path at a spacing chosen by [`default_spacing`] unless one is given.

mod family;
mod suite;

pub use family::Family;
pub use suite::{run_suite, Suite, SuiteConfig, SuiteReport, SuiteSummary, Violation};

use serde::Serialize;

use crate::convex::{ball_perimeter_analytic, radius_for_volume, ConvexPolytope};
use crate::error::{invalid, Error, Result};
use crate::grid::{dilate, fraenkel_asymmetry, minkowski_perimeter, GridSet, Lattice, DEFAULT_MAX_CELLS};
use crate::riesz::{ball_energy, lipschitz_gap_constant, polygon_energy, riesz_energy_fast, RieszKernel};
use crate::scalar::unit_ball_volume;

/// Asymmetries below this are treated as zero when forming implied constants.
pub const ASYMMETRY_FLOOR: f64 = 1e-6;

/// A shape under test.
#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    Polytope(ConvexPolytope<f64>),
    Grid(GridSet<f64>),
}

impl Shape {
    pub fn dim(&self) -> usize {
        match self {
            Shape::Polytope(p) => p.dim(),
            Shape::Grid(g) => g.dim(),
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            Shape::Polytope(p) => p.volume(),
            Shape::Grid(g) => g.volume(),
        }
    }

    /// Grid representation; polytopes are rasterized at `h`.
    pub fn to_grid(&self, h: f64) -> Result<GridSet<f64>> {
        match self {
            Shape::Polytope(p) => p.rasterize(h),
            Shape::Grid(g) => Ok(g.clone()),
        }
    }

    /// Homothety to volume `m`. Grids scale their spacing and origin.
    pub fn rescale_to_volume(&self, m: f64) -> Result<Shape> {
        match self {
            Shape::Polytope(p) => p.rescale_to_volume(m).map(Shape::Polytope),
            Shape::Grid(g) => {
                let v = g.volume();
                if !(v > 0.0) {
                    return Err(Error::Degenerate("cannot rescale an empty grid".into()));
                }
                g.scaled((m / v).powf(1.0 / g.dim() as f64)).map(Shape::Grid)
            }
        }
    }

    fn spacing_hint(&self) -> Option<f64> {
        match self {
            Shape::Grid(g) => Some(g.spacing()),
            Shape::Polytope(_) => None,
        }
    }
}

/// Grid spacing used when none is supplied: `min(r / 4, R / 8)`.
pub fn default_spacing(r: f64, radius: f64) -> f64 {
    (r / 4.0).min(radius / 8.0)
}

/// Perimeter deficit against the ball of equal volume.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeficitRecord {
    pub id: String,
    pub method: &'static str,
    pub r: f64,
    /// Radius of the ball with the same volume.
    pub radius: f64,
    pub per_r_shape: f64,
    pub per_r_ball: f64,
    /// `(per_r_shape - per_r_ball) / per_r_ball`.
    pub deficit: f64,
    /// Fraenkel asymmetry in `[0, 2]`.
    pub asymmetry: f64,
    /// `min(R / r, 1)`.
    pub min_factor: f64,
    /// `deficit / (min_factor * asymmetry^2)`.
    pub implied_constant: Option<f64>,
    /// `deficit / (asymmetry^2 / 2)` when `R >= r`, otherwise equal to
    /// `implied_constant`.
    pub proof_constant: Option<f64>,
}

/// Which inequality a [`BoundRecord`] measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Diam,
    Riesz1,
    Riesz2,
    Perc,
    Bm1,
    Contopot,
    Perc1,
    Phic,
}

impl BoundKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::Diam => "diam",
            BoundKind::Riesz1 => "riesz1",
            BoundKind::Riesz2 => "riesz2",
            BoundKind::Perc => "perc",
            BoundKind::Bm1 => "bm1",
            BoundKind::Contopot => "contopot",
            BoundKind::Perc1 => "perc1",
            BoundKind::Phic => "phic",
        }
    }
}

/// `lhs` against a constant-free right-hand side.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundRecord {
    pub id: String,
    pub kind: BoundKind,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs` when `rhs > 0`.
    pub observed_constant: Option<f64>,
    /// Asymmetry entering the bound, where one does.
    pub asymmetry: Option<f64>,
}

impl BoundRecord {
    fn new(id: &str, kind: BoundKind, lhs: f64, rhs: f64, asymmetry: Option<f64>) -> Self {
        let observed_constant = (rhs > 0.0).then(|| lhs / rhs);
        Self { id: id.to_string(), kind, lhs, rhs, observed_constant, asymmetry }
    }
}

/// Per_r of the shape and of the equal-volume ball, and the Fraenkel
/// asymmetry. `h` applies to the grid path only.
pub fn isoperimetric_deficit(id: &str, shape: &Shape, r: f64, h: Option<f64>) -> Result<DeficitRecord> {
    if !(r > 0.0) {
        return invalid("r must be positive");
    }
    let n = shape.dim();
    let volume = shape.volume();
    if !(volume > 0.0) {
        return Err(Error::Degenerate("deficit of a set with zero volume".into()));
    }
    let (method, radius, per_r_shape, per_r_ball, asymmetry) = match shape {
        Shape::Polytope(ConvexPolytope::Polygon(p)) => {
            let radius = radius_for_volume(volume, n);
            let (a, _) = p.fraenkel_asymmetry();
            ("exact", radius, p.minkowski_perimeter(r)?, ball_perimeter_analytic(radius, r, n)?, a)
        }
        _ => {
            let guess = radius_for_volume(volume, n);
            let h = h.or(shape.spacing_hint()).unwrap_or_else(|| default_spacing(r, guess));
            let grid = shape.to_grid(h)?;
            let radius = radius_for_volume(grid.volume(), n);
            let per = minkowski_perimeter(&grid, r)?;
            // The reference ball shares the discretization.
            let ball = GridSet::rasterize_ball(&vec![0.0; n], radius, grid.spacing())?;
            let per_ball = minkowski_perimeter(&ball, r)?;
            let a = fraenkel_asymmetry(&grid, radius)?;
            ("grid", radius, per, per_ball, a)
        }
    };
    let deficit = (per_r_shape - per_r_ball) / per_r_ball;
    let min_factor = (radius / r).min(1.0);
    let implied_constant = (asymmetry > ASYMMETRY_FLOOR).then(|| deficit / (min_factor * asymmetry * asymmetry));
    let proof_constant = (asymmetry > ASYMMETRY_FLOOR).then(|| {
        if radius >= r {
            deficit / (0.5 * asymmetry * asymmetry)
        } else {
            deficit / (min_factor * asymmetry * asymmetry)
        }
    });
    Ok(DeficitRecord {
        id: id.to_string(),
        method,
        r,
        radius,
        per_r_shape,
        per_r_ball,
        deficit,
        asymmetry,
        min_factor,
        implied_constant,
        proof_constant,
    })
}

/// `|F ⊕ B_r|^{1/n} - |F|^{1/n} - |B_r|^{1/n}` against
/// `min(|F|^{1/n}, |B_r|^{1/n}) * alpha(F, B_r)^2`.
pub fn check_bm_quantitative(id: &str, shape: &Shape, r: f64, h: Option<f64>) -> Result<BoundRecord> {
    if !(r > 0.0) {
        return invalid("r must be positive");
    }
    let n = shape.dim();
    let inv = 1.0 / n as f64;
    let k = unit_ball_volume::<f64>(n) * r.powi(n as i32);
    let (f, dilated, asym) = match shape {
        Shape::Polytope(ConvexPolytope::Polygon(p)) => (p.area(), p.outer_parallel_area(r), p.fraenkel_asymmetry().0),
        _ => {
            let guess = radius_for_volume(shape.volume(), n);
            let h = h.or(shape.spacing_hint()).unwrap_or_else(|| default_spacing(r, guess));
            let grid = shape.to_grid(h)?;
            let f = grid.volume();
            let radius = radius_for_volume(f, n);
            (f, dilate(&grid, r)?.volume(), fraenkel_asymmetry(&grid, radius)?)
        }
    };
    let lhs = dilated.powf(inv) - f.powf(inv) - k.powf(inv);
    let rhs = f.powf(inv).min(k.powf(inv)) * asym * asym;
    Ok(BoundRecord::new(id, BoundKind::Bm1, lhs, rhs, Some(asym)))
}

/// Per_r and Φ_α of a convex body: exact for polygons, grid path otherwise.
fn convex_measures(p: &ConvexPolytope<f64>, r: f64, alpha: f64, h: Option<f64>) -> Result<(f64, f64)> {
    match p {
        ConvexPolytope::Polygon(poly) => Ok((poly.minkowski_perimeter(r)?, polygon_energy(poly, alpha)?)),
        ConvexPolytope::Polyhedron(_) => {
            let radius = radius_for_volume(p.volume(), 3);
            let h = h.unwrap_or_else(|| default_spacing(r, radius));
            let grid = p.rasterize(h)?;
            let per = minkowski_perimeter(&grid, r)?;
            let k = RieszKernel::for_grid(alpha, &grid)?;
            Ok((per, riesz_energy_fast(&grid, &k)?))
        }
    }
}

/// Records for the diameter bound, the pointwise Riesz lower bound (constant
/// 1), the box-side bound and the box perimeter sandwich.
pub fn check_convex_bounds(
    id: &str,
    p: &ConvexPolytope<f64>,
    r: f64,
    alpha: f64,
    h: Option<f64>,
) -> Result<Vec<BoundRecord>> {
    let n = p.dim();
    if !(r > 0.0) || !(alpha > 0.0 && alpha < n as f64) {
        return invalid("need r > 0 and 0 < alpha < n");
    }
    let nf = n as f64;
    let vol = p.volume();
    let diam = p.diameter();
    let (per, phi) = convex_measures(p, r, alpha, h)?;
    let lambdas = p.john_box().lambdas;
    let diam_rhs = per.powf(nf - 1.0) * vol.powf(2.0 - nf);
    let riesz1_rhs = vol.powf(2.0 / alpha) * phi.powf(-1.0 / alpha);
    let riesz2_rhs = per.powf(nf - 2.0) * vol.powf(3.0 - nf - 2.0 / alpha) * phi.powf(1.0 / alpha);
    let perc_rhs: f64 = lambdas[1..].iter().map(|&l| l.max(r)).product();
    Ok(vec![
        BoundRecord::new(id, BoundKind::Diam, diam, diam_rhs, None),
        BoundRecord::new(id, BoundKind::Riesz1, diam, riesz1_rhs, None),
        BoundRecord::new(id, BoundKind::Riesz2, lambdas[n - 2], riesz2_rhs, None),
        BoundRecord::new(id, BoundKind::Perc, per, perc_rhs, None),
    ])
}

/// `Φ_α(E) diam(E)^α >= |E|^2`; returns `(lhs, rhs)`.
pub fn riesz_diameter_bound(phi: f64, diam: f64, volume: f64, alpha: f64) -> (f64, f64) {
    (phi * diam.powf(alpha), volume * volume)
}

/// Per_r and Φ_α of the unit-volume cylinder `B_R × [0, L]` against
/// `L^{1/(n-1)}` and `L^{-α}`.
pub fn cylinder_energy_bounds(
    l: f64,
    r: f64,
    alpha: f64,
    n: usize,
    h: Option<f64>,
) -> Result<(BoundRecord, BoundRecord)> {
    if !(2..=3).contains(&n) {
        return invalid("cylinders need n = 2 or 3");
    }
    let nf = n as f64;
    if !(r > 0.0) || !(alpha > 0.0 && alpha < nf - 1.0) {
        return invalid(format!("need r > 0 and 0 < alpha < n - 1 = {}", n - 1));
    }
    let radius = (1.0 / (unit_ball_volume::<f64>(n - 1) * l)).powf(1.0 / (nf - 1.0));
    if !(l >= radius.max(r).max(1.0)) {
        return invalid(format!("L = {l} must be at least max(R, r, 1) = {}", radius.max(r).max(1.0)));
    }
    let id = format!("cylinder-L{l}");
    let (per, phi) = if n == 2 {
        let rect = crate::convex::ConvexPolygon::rectangle([0.0, 0.0], l, 2.0 * radius)?;
        (rect.minkowski_perimeter(r)?, polygon_energy(&rect, alpha)?)
    } else {
        let h = h.unwrap_or_else(|| (r / 4.0).min(radius / 6.0));
        let lo = [0.0, -radius, -radius];
        let hi = [l, radius, radius];
        let anchor = [0.5 * h, 0.0, 0.0];
        let grid = GridSet::from_indicator(&lo, &hi, h, Lattice::Anchored(&anchor), 1, DEFAULT_MAX_CELLS, |x| {
            x[0] > 0.0 && x[0] < l && x[1] * x[1] + x[2] * x[2] < radius * radius
        })?;
        let per = minkowski_perimeter(&grid, r)?;
        let k = RieszKernel::for_grid(alpha, &grid)?;
        (per, riesz_energy_fast(&grid, &k)?)
    };
    Ok((
        BoundRecord::new(&id, BoundKind::Perc1, per, l.powf(1.0 / (nf - 1.0)), None),
        BoundRecord::new(&id, BoundKind::Phic, phi, l.powf(-alpha), None),
    ))
}

/// `|Φ_α(B) - Φ_α(E)|` against `inf_x |E Δ B(x)|` for `E` rescaled to unit
/// volume. The observed constant is to be compared with
/// [`lipschitz_gap_constant`].
pub fn potential_gap(id: &str, shape: &Shape, alpha: f64, h: Option<f64>) -> Result<BoundRecord> {
    let n = shape.dim();
    lipschitz_gap_constant(n, alpha)?;
    let unit = shape.rescale_to_volume(1.0)?;
    let (phi_ball, phi, sym_diff) = match &unit {
        Shape::Polytope(ConvexPolytope::Polygon(p)) => {
            let radius = radius_for_volume(1.0, 2);
            (ball_energy(radius, alpha, 2)?, polygon_energy(p, alpha)?, p.fraenkel_asymmetry().0)
        }
        _ => {
            let h = h.or(unit.spacing_hint()).unwrap_or_else(|| default_spacing(0.1, radius_for_volume(1.0, n)));
            let grid = unit.to_grid(h)?;
            let radius = radius_for_volume(grid.volume(), n);
            let ball = GridSet::rasterize_ball(&vec![0.0; n], radius, grid.spacing())?;
            let k = RieszKernel::for_grid(alpha, &grid)?;
            let a = fraenkel_asymmetry(&grid, radius)?;
            (riesz_energy_fast(&ball, &k)?, riesz_energy_fast(&grid, &k)?, a * grid.volume())
        }
    };
    Ok(BoundRecord::new(id, BoundKind::Contopot, (phi_ball - phi).abs(), sym_diff, Some(sym_diff)))
}
