//! Exact convex-body geometry: hulls, diameters, box profiles, analytic ball
//! quantities and the exact r-perimeter of polygons.

mod polygon;
mod polyhedron;

pub use polygon::{ConvexPolygon, Point2};
pub use polyhedron::{ConvexPolyhedron, Face, Point3, MAX_HULL_POINTS};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::grid::GridSet;
use crate::scalar::{unit_ball_volume, Real};

/// A convex body in the plane or in space.
#[derive(Clone, Debug, PartialEq)]
pub enum ConvexPolytope<T> {
    Polygon(ConvexPolygon<T>),
    Polyhedron(ConvexPolyhedron<T>),
}

/// On-disk form `{"n": 2, "vertices": [[x, y], ...]}`.
#[derive(Serialize, Deserialize)]
struct PolytopeJson {
    n: usize,
    vertices: Vec<Vec<f64>>,
}

impl<T: Real> ConvexPolytope<T> {
    /// Convex hull of `points`, all of the same dimension 2 or 3.
    pub fn hull(points: &[Vec<T>]) -> Result<Self> {
        let n = points.first().map(Vec::len).unwrap_or(0);
        if points.iter().any(|p| p.len() != n) {
            return invalid("points of mixed dimension");
        }
        match n {
            2 => Ok(Self::Polygon(ConvexPolygon::hull(&points.iter().map(|p| [p[0], p[1]]).collect::<Vec<_>>())?)),
            3 => Ok(Self::Polyhedron(ConvexPolyhedron::hull(
                &points.iter().map(|p| [p[0], p[1], p[2]]).collect::<Vec<_>>(),
            )?)),
            _ => Err(Error::Unsupported(format!("convex bodies of dimension {n}"))),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Polygon(_) => 2,
            Self::Polyhedron(_) => 3,
        }
    }

    pub fn vertices(&self) -> Vec<Vec<T>> {
        match self {
            Self::Polygon(p) => p.vertices().iter().map(|v| v.to_vec()).collect(),
            Self::Polyhedron(p) => p.vertices().iter().map(|v| v.to_vec()).collect(),
        }
    }

    pub fn as_polygon(&self) -> Option<&ConvexPolygon<T>> {
        match self {
            Self::Polygon(p) => Some(p),
            Self::Polyhedron(_) => None,
        }
    }

    pub fn volume(&self) -> T {
        match self {
            Self::Polygon(p) => p.area(),
            Self::Polyhedron(p) => p.volume(),
        }
    }

    pub fn diameter(&self) -> T {
        match self {
            Self::Polygon(p) => p.diameter(),
            Self::Polyhedron(p) => p.diameter(),
        }
    }

    pub fn centroid(&self) -> Vec<T> {
        match self {
            Self::Polygon(p) => p.centroid().to_vec(),
            Self::Polyhedron(p) => p.centroid().to_vec(),
        }
    }

    /// Exact Minkowski r-perimeter; planar only.
    pub fn minkowski_perimeter(&self, r: T) -> Result<T> {
        match self {
            Self::Polygon(p) => p.minkowski_perimeter(r),
            Self::Polyhedron(_) => Err(Error::Unsupported(
                "exact r-perimeter of polyhedra; rasterize and use the grid path".into(),
            )),
        }
    }

    pub fn rescale_to_volume(&self, m: T) -> Result<Self> {
        match self {
            Self::Polygon(p) => p.rescale_to_volume(m).map(Self::Polygon),
            Self::Polyhedron(p) => p.rescale_to_volume(m).map(Self::Polyhedron),
        }
    }

    pub fn hausdorff_distance(&self, other: &Self) -> Result<T> {
        match (self, other) {
            (Self::Polygon(a), Self::Polygon(b)) => Ok(a.hausdorff_distance(b)),
            (Self::Polyhedron(a), Self::Polyhedron(b)) => Ok(a.hausdorff_distance(b)),
            _ => invalid("Hausdorff distance between bodies of different dimension"),
        }
    }

    pub fn rasterize(&self, h: T) -> Result<GridSet<T>> {
        match self {
            Self::Polygon(p) => p.rasterize(h),
            Self::Polyhedron(p) => p.rasterize(h),
        }
    }

    pub fn john_box(&self) -> BoxProfile<T> {
        match self {
            Self::Polygon(p) => john_box_polygon(p),
            Self::Polyhedron(p) => john_box_polyhedron(p),
        }
    }

    /// Parses the JSON interchange form. Vertices must already be in convex
    /// position (counter-clockwise in the plane); their order is kept.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: PolytopeJson = serde_json::from_str(text)?;
        if raw.vertices.iter().any(|v| v.len() != raw.n) {
            return Err(Error::Parse(format!("every vertex must have {} coordinates", raw.n)));
        }
        let conv = |x: f64| T::from_f64(x).ok_or_else(|| Error::Parse(format!("coordinate {x} out of range")));
        match raw.n {
            2 => {
                let v = raw
                    .vertices
                    .iter()
                    .map(|p| Ok([conv(p[0])?, conv(p[1])?]))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Self::Polygon(ConvexPolygon::from_vertices(v)?))
            }
            3 => {
                let v = raw
                    .vertices
                    .iter()
                    .map(|p| Ok([conv(p[0])?, conv(p[1])?, conv(p[2])?]))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Self::Polyhedron(ConvexPolyhedron::from_vertices(v)?))
            }
            n => Err(Error::Parse(format!("unsupported dimension n = {n}"))),
        }
    }

    pub fn to_json(&self) -> String {
        let raw = PolytopeJson {
            n: self.dim(),
            vertices: self.vertices().iter().map(|v| v.iter().map(|x| x.to_f64_lossy()).collect()).collect(),
        };
        serde_json::to_string(&raw).expect("finite coordinates serialize")
    }
}

impl<T: Real> From<ConvexPolygon<T>> for ConvexPolytope<T> {
    fn from(p: ConvexPolygon<T>) -> Self {
        Self::Polygon(p)
    }
}

impl<T: Real> From<ConvexPolyhedron<T>> for ConvexPolytope<T> {
    fn from(p: ConvexPolyhedron<T>) -> Self {
        Self::Polyhedron(p)
    }
}

/// A box sandwiching a convex body.
///
/// `lambdas[i]` is the extent of the body along `frame[i]` (ascending), so the
/// frame-aligned bounding box is `anchor + sum_i [0, lambdas[i]] frame[i]`.
/// The inner box is the homothetic copy scaled by `inner_scale` and centered
/// at `center`; it lies inside the body, and a translate of the inner box
/// scaled by `outer_constant = 1 / inner_scale` (the bounding box) contains
/// the body. Planar inner boxes are placed to maximize `inner_scale`; in
/// space they are centered at the centroid.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxProfile<T> {
    pub lambdas: Vec<T>,
    pub frame: Vec<Vec<T>>,
    pub anchor: Vec<T>,
    pub center: Vec<T>,
    pub inner_scale: T,
    pub outer_constant: T,
}

fn john_box_polygon<T: Real>(p: &ConvexPolygon<T>) -> BoxProfile<T> {
    let (_, mut e1) = p.min_width();
    // Deterministic orientation of the frame.
    if e1[0] < T::zero() || (e1[0] == T::zero() && e1[1] < T::zero()) {
        e1 = [-e1[0], -e1[1]];
    }
    let e2 = [-e1[1], e1[0]];
    let frame = [e1, e2];
    let lo: Vec<T> = frame.iter().map(|u| -p.support([-u[0], -u[1]])).collect();
    let lambdas: Vec<T> = frame.iter().map(|&u| p.extent(u)).collect();
    let anchor = [lo[0] * e1[0] + lo[1] * e2[0], lo[0] * e1[1] + lo[1] * e2[1]];
    let (scale, g) = p.largest_inscribed_box(frame, [lambdas[0] * T::lit(0.5), lambdas[1] * T::lit(0.5)]);
    BoxProfile {
        lambdas,
        frame: frame.iter().map(|u| u.to_vec()).collect(),
        anchor: anchor.to_vec(),
        center: g.to_vec(),
        inner_scale: scale,
        outer_constant: T::one() / scale,
    }
}

fn john_box_polyhedron<T: Real>(p: &ConvexPolyhedron<T>) -> BoxProfile<T> {
    let (a, b) = p.diameter_pair();
    let d = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let dl = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    let e3 = [d[0] / dl, d[1] / dl, d[2] / dl];
    // Orthonormal complement, then the minimum-width frame of the projection.
    let seed = if e3[0].abs() < T::lit(0.9) { [T::one(), T::zero(), T::zero()] } else { [T::zero(), T::one(), T::zero()] };
    let dot3 = |u: [T; 3], v: [T; 3]| u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    let cross3 = |u: [T; 3], v: [T; 3]| [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
    let c = cross3(e3, seed);
    let cl = dot3(c, c).sqrt();
    let f1 = [c[0] / cl, c[1] / cl, c[2] / cl];
    let f2 = cross3(e3, f1);
    let proj: Vec<[T; 2]> = p.vertices().iter().map(|&v| [dot3(v, f1), dot3(v, f2)]).collect();
    let u = ConvexPolygon::hull(&proj).map(|poly| poly.min_width().1).unwrap_or([T::one(), T::zero()]);
    let e1 = [u[0] * f1[0] + u[1] * f2[0], u[0] * f1[1] + u[1] * f2[1], u[0] * f1[2] + u[1] * f2[2]];
    let e2 = cross3(e3, e1);
    let mut frame = vec![e1, e2, e3];
    let extent = |u: [T; 3]| p.support(u) + p.support([-u[0], -u[1], -u[2]]);
    frame.sort_by(|x, y| extent(*x).partial_cmp(&extent(*y)).expect("finite"));
    let lambdas: Vec<T> = frame.iter().map(|&u| extent(u)).collect();
    let lo: Vec<T> = frame.iter().map(|&u| -p.support([-u[0], -u[1], -u[2]])).collect();
    let mut anchor = [T::zero(); 3];
    for i in 0..3 {
        for k in 0..3 {
            anchor[k] += lo[i] * frame[i][k];
        }
    }
    let g = p.centroid();
    let half: Vec<T> = lambdas.iter().map(|&l| l * T::lit(0.5)).collect();
    let mut scale = T::infinity();
    for f in p.faces() {
        let slack = f.offset - dot3(f.normal, g);
        let reach: T = (0..3).map(|i| half[i] * dot3(f.normal, frame[i]).abs()).sum();
        if reach > T::zero() {
            scale = scale.min(slack / reach);
        }
    }
    BoxProfile {
        lambdas,
        frame: frame.iter().map(|u| u.to_vec()).collect(),
        anchor: anchor.to_vec(),
        center: g.to_vec(),
        inner_scale: scale,
        outer_constant: T::one() / scale,
    }
}

/// A Euclidean ball.
#[derive(Clone, Debug, PartialEq)]
pub struct BallSpec<T> {
    pub center: Vec<T>,
    pub radius: T,
}

impl<T: Real> BallSpec<T> {
    pub fn new(center: Vec<T>, radius: T) -> Result<Self> {
        if !(radius > T::zero()) {
            return invalid("ball radius must be positive");
        }
        if !(1..=3).contains(&center.len()) {
            return invalid("ball dimension must be 1, 2 or 3");
        }
        Ok(Self { center, radius })
    }

    /// The origin-centered ball of unit volume.
    pub fn unit_volume(n: usize) -> Result<Self> {
        Self::new(vec![T::zero(); n], radius_for_volume(T::one(), n))
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn volume(&self) -> T {
        ball_volume(self.radius, self.dim())
    }

    pub fn rasterize(&self, h: T) -> Result<GridSet<T>> {
        GridSet::rasterize_ball(&self.center, self.radius, h)
    }
}

/// `omega_n rho^n`.
pub fn ball_volume<T: Real>(rho: T, n: usize) -> T {
    unit_ball_volume::<T>(n) * rho.powi(n as i32)
}

/// Radius of the ball of volume `m`.
pub fn radius_for_volume<T: Real>(m: T, n: usize) -> T {
    (m / unit_ball_volume::<T>(n)).powf(T::one() / T::from_usize_lossy(n))
}

/// `(|B_{R+r}| - |B_{max(R-r, 0)}|) / (2r)`.
pub fn ball_perimeter_analytic<T: Real>(radius: T, r: T, n: usize) -> Result<T> {
    if !(radius > T::zero()) || !(r > T::zero()) {
        return invalid("radii must be positive");
    }
    let inner = (radius - r).max(T::zero());
    Ok((ball_volume(radius + r, n) - ball_volume(inner, n)) / (T::lit(2.0) * r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn analytic_ball_perimeter() {
        assert!((ball_perimeter_analytic(1.0, 0.5, 2).unwrap() - 2.0 * PI).abs() < 1e-14);
        assert!((ball_perimeter_analytic(0.5, 1.0, 2).unwrap() - PI * 2.25 / 2.0).abs() < 1e-14);
        let p = ball_perimeter_analytic(1.0, 1e-7, 2).unwrap();
        assert!((p - 2.0 * PI).abs() < 1e-6);
        assert!((ball_perimeter_analytic(1.0, 0.5, 3).unwrap() - 4.0 * PI * (1.0 + 0.25 / 3.0)).abs() < 1e-13);
    }

    #[test]
    fn json_roundtrip_is_exact() {
        let p = ConvexPolygon::<f64>::regular(7, [0.1, 1.0 / 3.0], 2.0f64.sqrt()).unwrap().rotated(0.123);
        let body = ConvexPolytope::from(p);
        let text = body.to_json();
        let back = ConvexPolytope::<f64>::from_json(&text).unwrap();
        assert_eq!(back, body);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn json_rejects_bad_input() {
        assert!(ConvexPolytope::<f64>::from_json(r#"{"n":2,"vertices":[[0,0],[1,0]]}"#).is_err());
        assert!(ConvexPolytope::<f64>::from_json(r#"{"n":2,"vertices":[[0,0],[1,0,3],[0,1]]}"#).is_err());
        assert!(ConvexPolytope::<f64>::from_json(r#"{"n":4,"vertices":[]}"#).is_err());
        assert!(ConvexPolytope::<f64>::from_json("not json").is_err());
    }

    #[test]
    fn rectangle_box_profile() {
        let r = ConvexPolygon::<f64>::rectangle([0.0, 0.0], 2.0, 1.0).unwrap();
        let b = ConvexPolytope::from(r.clone()).john_box();
        assert_eq!(b.lambdas, vec![1.0, 2.0]);
        assert!((b.frame[0][1].abs() - 1.0).abs() < 1e-15 && (b.frame[1][0].abs() - 1.0).abs() < 1e-15);
        assert!((b.inner_scale - 1.0).abs() < 1e-12 && (b.outer_constant - 1.0).abs() < 1e-12);

        let t = 30f64.to_radians();
        let b = ConvexPolytope::from(r.rotated(t)).john_box();
        assert!((b.lambdas[0] - 1.0).abs() < 1e-6 && (b.lambdas[1] - 2.0).abs() < 1e-6);
        let ang = b.frame[1][1].atan2(b.frame[1][0]);
        assert!((ang - t).abs() < 1e-6 || (ang - t - PI).abs() < 1e-6 || (ang - t + PI).abs() < 1e-6);
    }

    #[test]
    fn disk_and_thin_box_profiles() {
        let disk = ConvexPolytope::from(ConvexPolygon::<f64>::regular(256, [0.0, 0.0], 1.0).unwrap());
        let b = disk.john_box();
        let ratio = b.lambdas[0] / b.lambdas[1];
        assert!((0.7..=1.43).contains(&ratio));
        let thin = ConvexPolytope::from(ConvexPolygon::<f64>::rectangle([0.0, 0.0], 10.0, 0.1).unwrap());
        assert_eq!(thin.john_box().lambdas[0], 0.1);
    }

    #[test]
    fn triangle_box_constant() {
        let t = ConvexPolytope::from(ConvexPolygon::<f64>::from_vertices(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap());
        let b = t.john_box();
        let d = t.diameter();
        assert!(b.lambdas[1] >= d / 2f64.sqrt() - 1e-15 && b.lambdas[1] <= d + 1e-15);
        assert!((b.outer_constant - 2.0).abs() < 1e-9, "{}", b.outer_constant);
        let poly = t.as_polygon().unwrap();
        for sx in [-1.0, 1.0] {
            for sy in [-1.0, 1.0] {
                let corner: Vec<f64> = (0..2)
                    .map(|k| {
                        b.center[k]
                            + b.inner_scale * 0.5 * (sx * b.lambdas[0] * b.frame[0][k] + sy * b.lambdas[1] * b.frame[1][k])
                    })
                    .collect();
                assert!(poly.distance_to([corner[0], corner[1]]) < 1e-12);
            }
        }
    }

    #[test]
    fn cube_box_profile() {
        let mut v = Vec::new();
        for z in [0.0, 3.0] {
            for y in [0.0, 2.0] {
                for x in [0.0, 1.0] {
                    v.push(vec![x, y, z]);
                }
            }
        }
        let c = ConvexPolytope::hull(&v).unwrap();
        let b = c.john_box();
        let d = c.diameter();
        assert!(b.lambdas[2] >= d / 3f64.cbrt() - 1e-12 && b.lambdas[2] <= d + 1e-12);
        assert!(b.outer_constant <= 3f64.powf(1.5));
    }
}
