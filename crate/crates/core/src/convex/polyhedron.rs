//! Convex polyhedra: a vertex cloud with triangulated facets.

use crate::error::{Error, Result};
use crate::grid::{GridSet, Lattice, DEFAULT_MAX_CELLS};
use crate::scalar::{compensated_sum, Real};

pub type Point3<T> = [T; 3];

#[inline]
fn sub<T: Real>(a: Point3<T>, b: Point3<T>) -> Point3<T> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
fn dot<T: Real>(a: Point3<T>, b: Point3<T>) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
fn cross<T: Real>(a: Point3<T>, b: Point3<T>) -> Point3<T> {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

#[inline]
fn norm<T: Real>(a: Point3<T>) -> T {
    dot(a, a).sqrt()
}

/// Supporting plane `<normal, x> = offset` of one face, with its vertices
/// (indices into the vertex list) in counter-clockwise order seen from
/// outside.
#[derive(Clone, Debug, PartialEq)]
pub struct Face<T> {
    pub normal: Point3<T>,
    pub offset: T,
    pub vertices: Vec<usize>,
}

/// Convex polyhedron with its face lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolyhedron<T> {
    vertices: Vec<Point3<T>>,
    faces: Vec<Face<T>>,
}

/// Upper bound on the input size of the brute-force face enumeration.
pub const MAX_HULL_POINTS: usize = 400;

impl<T: Real> ConvexPolyhedron<T> {
    /// Convex hull of a point cloud. Faces are found by testing every point
    /// triple for a supporting plane, so inputs are limited to
    /// [`MAX_HULL_POINTS`]. Vertices keep their first-appearance order.
    pub fn hull(points: &[Point3<T>]) -> Result<Self> {
        let (vertices, faces) = hull_faces(points)?;
        Ok(Self { vertices, faces })
    }

    /// Like [`Self::hull`] but fails unless every input point is a vertex,
    /// in which case the input order is kept exactly.
    pub fn from_vertices(points: Vec<Point3<T>>) -> Result<Self> {
        let (vertices, faces) = hull_faces(&points)?;
        if vertices.len() != points.len() {
            return Err(Error::InvalidArgument(format!(
                "{} of {} points are not extreme",
                points.len() - vertices.len(),
                points.len()
            )));
        }
        Ok(Self { vertices, faces })
    }

    pub fn vertices(&self) -> &[Point3<T>] {
        &self.vertices
    }

    pub fn faces(&self) -> &[Face<T>] {
        &self.faces
    }

    fn triangles(&self) -> impl Iterator<Item = [Point3<T>; 3]> + '_ {
        self.faces.iter().flat_map(move |f| {
            (1..f.vertices.len() - 1).map(move |i| {
                [self.vertices[f.vertices[0]], self.vertices[f.vertices[i]], self.vertices[f.vertices[i + 1]]]
            })
        })
    }

    /// Volume by the divergence theorem over fan-triangulated faces.
    pub fn volume(&self) -> T {
        let o = self.vertices[0];
        compensated_sum(self.triangles().map(|[a, b, c]| dot(sub(a, o), cross(sub(b, o), sub(c, o))))) / T::lit(6.0)
    }

    pub fn surface_area(&self) -> T {
        compensated_sum(self.triangles().map(|[a, b, c]| norm(cross(sub(b, a), sub(c, a))))) * T::lit(0.5)
    }

    pub fn centroid(&self) -> Point3<T> {
        let o = self.vertices[0];
        let mut v = T::zero();
        let mut c = [T::zero(); 3];
        for [a, b, d] in self.triangles() {
            let (a, b, d) = (sub(a, o), sub(b, o), sub(d, o));
            let w = dot(a, cross(b, d));
            v += w;
            for k in 0..3 {
                c[k] += w * (a[k] + b[k] + d[k]);
            }
        }
        let s = T::lit(4.0) * v;
        [o[0] + c[0] / s, o[1] + c[1] / s, o[2] + c[2] / s]
    }

    /// Largest pairwise vertex distance.
    pub fn diameter(&self) -> T {
        let v = &self.vertices;
        let mut best = T::zero();
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                best = best.max(norm(sub(v[i], v[j])));
            }
        }
        best
    }

    pub fn diameter_pair(&self) -> (Point3<T>, Point3<T>) {
        let v = &self.vertices;
        let mut best = (T::neg_infinity(), v[0], v[0]);
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                let d = norm(sub(v[i], v[j]));
                if d > best.0 {
                    best = (d, v[i], v[j]);
                }
            }
        }
        (best.1, best.2)
    }

    pub fn support(&self, u: Point3<T>) -> T {
        self.vertices.iter().map(|&v| dot(v, u)).fold(T::neg_infinity(), T::max)
    }

    pub fn contains(&self, p: Point3<T>) -> bool {
        self.faces.iter().all(|f| dot(f.normal, p) <= f.offset)
    }

    /// Distance from `p` to the solid (zero inside).
    pub fn distance_to(&self, p: Point3<T>) -> T {
        if self.contains(p) {
            return T::zero();
        }
        self.triangles().map(|t| triangle_distance(p, t)).fold(T::infinity(), T::min)
    }

    pub fn hausdorff_distance(&self, other: &Self) -> T {
        let a = self.vertices.iter().map(|&v| other.distance_to(v)).fold(T::zero(), T::max);
        let b = other.vertices.iter().map(|&v| self.distance_to(v)).fold(T::zero(), T::max);
        a.max(b)
    }

    pub fn map(&self, f: impl Fn(Point3<T>) -> Point3<T>) -> Result<Self> {
        Self::from_vertices(self.vertices.iter().map(|&v| f(v)).collect())
    }

    /// Homothety about the centroid onto volume `m`.
    pub fn rescale_to_volume(&self, m: T) -> Result<Self> {
        if !(m > T::zero()) || !m.is_finite() {
            return Err(Error::InvalidArgument(format!("target volume must be positive (got {m})")));
        }
        let v = self.volume();
        if v == m {
            return Ok(self.clone());
        }
        let k = (m / v).cbrt();
        let c = self.centroid();
        // Homotheties preserve the face lattice; only planes move.
        let vertices = self
            .vertices
            .iter()
            .map(|&p| [c[0] + k * (p[0] - c[0]), c[1] + k * (p[1] - c[1]), c[2] + k * (p[2] - c[2])])
            .collect();
        let faces = self
            .faces
            .iter()
            .map(|f| Face { normal: f.normal, offset: dot(f.normal, c) + k * (f.offset - dot(f.normal, c)), vertices: f.vertices.clone() })
            .collect();
        Ok(Self { vertices, faces })
    }

    pub fn bounding_box(&self) -> (Point3<T>, Point3<T>) {
        let mut lo = [T::infinity(); 3];
        let mut hi = [T::neg_infinity(); 3];
        for v in &self.vertices {
            for k in 0..3 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    pub fn rasterize(&self, h: T) -> Result<GridSet<T>> {
        self.rasterize_capped(h, DEFAULT_MAX_CELLS)
    }

    pub fn rasterize_capped(&self, h: T, max_cells: usize) -> Result<GridSet<T>> {
        let (lo, hi) = self.bounding_box();
        let anchor = self.centroid();
        GridSet::from_indicator(&lo, &hi, h, Lattice::Anchored(&anchor), 1, max_cells, |p| {
            self.faces.iter().all(|f| f.normal[0] * p[0] + f.normal[1] * p[1] + f.normal[2] * p[2] < f.offset)
        })
    }
}

fn hull_faces<T: Real>(points: &[Point3<T>]) -> Result<(Vec<Point3<T>>, Vec<Face<T>>)> {
    if points.len() > MAX_HULL_POINTS {
        return Err(Error::ResourceLimit(format!("3D hull limited to {MAX_HULL_POINTS} points")));
    }
    if points.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("non-finite point".into()));
    }
    let mut pts: Vec<Point3<T>> = Vec::with_capacity(points.len());
    for p in points {
        if !pts.contains(p) {
            pts.push(*p);
        }
    }
    let n = pts.len();
    let mut diam = T::zero();
    for i in 0..n {
        for j in i + 1..n {
            diam = diam.max(norm(sub(pts[i], pts[j])));
        }
    }
    if n < 4 || !(diam > T::zero()) {
        return Err(Error::Degenerate("need at least four distinct points".into()));
    }
    let tol = T::lit(1e-12) * diam;

    // Supporting planes through point triples, deduplicated.
    let mut planes: Vec<(Point3<T>, T)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let c = cross(sub(pts[j], pts[i]), sub(pts[k], pts[i]));
                let len = norm(c);
                if len <= tol * diam {
                    continue;
                }
                let mut nrm = [c[0] / len, c[1] / len, c[2] / len];
                let mut off = dot(nrm, pts[i]);
                let (mut above, mut below) = (false, false);
                for p in &pts {
                    let s = dot(nrm, *p) - off;
                    above |= s > tol;
                    below |= s < -tol;
                }
                if above && below {
                    continue;
                }
                if above {
                    nrm = [-nrm[0], -nrm[1], -nrm[2]];
                    off = -off;
                }
                let dup = planes
                    .iter()
                    .any(|(m, o)| norm(sub(*m, nrm)) < T::lit(1e-9) && (*o - off).abs() <= T::lit(1e-9) * diam);
                if !dup {
                    planes.push((nrm, off));
                }
            }
        }
    }
    if planes.len() < 4 {
        return Err(Error::Degenerate("points are coplanar".into()));
    }

    // Each face is the 2D hull of the points on its plane.
    let mut is_vertex = vec![false; n];
    let mut raw_faces = Vec::with_capacity(planes.len());
    for (nrm, off) in &planes {
        let on: Vec<usize> = (0..n).filter(|&p| (dot(*nrm, pts[p]) - *off).abs() <= tol).collect();
        let cyc = face_cycle(&pts, &on, *nrm, tol);
        if cyc.len() < 3 {
            continue;
        }
        for &v in &cyc {
            is_vertex[v] = true;
        }
        raw_faces.push((*nrm, *off, cyc));
    }
    let mut remap = vec![usize::MAX; n];
    let mut vertices = Vec::new();
    for p in 0..n {
        if is_vertex[p] {
            remap[p] = vertices.len();
            vertices.push(pts[p]);
        }
    }
    let faces = raw_faces
        .into_iter()
        .map(|(normal, offset, cyc)| Face { normal, offset, vertices: cyc.into_iter().map(|v| remap[v]).collect() })
        .collect();
    Ok((vertices, faces))
}

/// Counter-clockwise (about `nrm`) extreme points of a planar point set.
fn face_cycle<T: Real>(pts: &[Point3<T>], on: &[usize], nrm: Point3<T>, tol: T) -> Vec<usize> {
    // In-plane basis.
    let a = if nrm[0].abs() < T::lit(0.9) { [T::one(), T::zero(), T::zero()] } else { [T::zero(), T::one(), T::zero()] };
    let e1 = {
        let c = cross(nrm, a);
        let l = norm(c);
        [c[0] / l, c[1] / l, c[2] / l]
    };
    let e2 = cross(nrm, e1);
    let mut proj: Vec<(usize, [T; 2])> = on.iter().map(|&i| (i, [dot(pts[i], e1), dot(pts[i], e2)])).collect();
    proj.sort_by(|x, y| x.1[0].partial_cmp(&y.1[0]).expect("finite").then(x.1[1].partial_cmp(&y.1[1]).expect("finite")));
    let turn = |o: [T; 2], p: [T; 2], q: [T; 2]| (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0]);
    let mut hull: Vec<(usize, [T; 2])> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let seq: Vec<(usize, [T; 2])> = if pass == 0 { proj.clone() } else { proj.iter().rev().cloned().collect() };
        for p in seq {
            while hull.len() >= start + 2 {
                let o = hull[hull.len() - 2].1;
                let q = hull[hull.len() - 1].1;
                let len = ((p.1[0] - o[0]).powi(2) + (p.1[1] - o[1]).powi(2)).sqrt();
                if turn(o, q, p.1) <= tol * len {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull.into_iter().map(|(i, _)| i).collect()
}

fn triangle_distance<T: Real>(p: Point3<T>, [a, b, c]: [Point3<T>; 3]) -> T {
    let ab = sub(b, a);
    let ac = sub(c, a);
    let nrm = cross(ab, ac);
    let l2 = dot(nrm, nrm);
    if l2 > T::zero() {
        // Barycentric test for the orthogonal projection.
        let ap = sub(p, a);
        let t = dot(ap, nrm) / l2;
        let q = [p[0] - t * nrm[0], p[1] - t * nrm[1], p[2] - t * nrm[2]];
        let inside = [(a, b), (b, c), (c, a)]
            .iter()
            .all(|&(u, v)| dot(cross(sub(v, u), sub(q, u)), nrm) >= T::zero());
        if inside {
            return t.abs() * l2.sqrt();
        }
    }
    [(a, b), (b, c), (c, a)]
        .iter()
        .map(|&(u, v)| {
            let e = sub(v, u);
            let ee = dot(e, e);
            let s = if ee > T::zero() { (dot(sub(p, u), e) / ee).max(T::zero()).min(T::one()) } else { T::zero() };
            norm(sub(p, [u[0] + s * e[0], u[1] + s * e[1], u[2] + s * e[2]]))
        })
        .fold(T::infinity(), T::min)
}
