//! Convex polygons with exact area, perimeter, parallel bodies and
//! calipers-based extents.

use crate::error::{Error, Result};
use crate::grid::{GridSet, Lattice, DEFAULT_MAX_CELLS};
use crate::scalar::{compensated_sum, Real};

pub type Point2<T> = [T; 2];

#[inline]
fn sub<T: Real>(a: Point2<T>, b: Point2<T>) -> Point2<T> {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
fn dot<T: Real>(a: Point2<T>, b: Point2<T>) -> T {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
fn cross<T: Real>(a: Point2<T>, b: Point2<T>) -> T {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
fn norm<T: Real>(a: Point2<T>) -> T {
    a[0].hypot(a[1])
}

/// Convex polygon with vertices in counter-clockwise order.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolygon<T> {
    vertices: Vec<Point2<T>>,
}

impl<T: Real> ConvexPolygon<T> {
    /// Convex hull of a point cloud (Andrew's monotone chain). Vertices start
    /// at the lexicographically smallest point and run counter-clockwise;
    /// vertices within `1e-12 * diameter` of the line through their
    /// neighbours are dropped.
    pub fn hull(points: &[Point2<T>]) -> Result<Self> {
        if points.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(Error::InvalidArgument("non-finite point".into()));
        }
        let mut pts = points.to_vec();
        pts.sort_by(|a, b| a[0].partial_cmp(&b[0]).expect("finite").then(a[1].partial_cmp(&b[1]).expect("finite")));
        pts.dedup();
        if pts.len() < 3 {
            return Err(Error::Degenerate(format!("{} distinct points cannot span a polygon", pts.len())));
        }
        let mut hull: Vec<Point2<T>> = Vec::with_capacity(2 * pts.len());
        for pass in 0..2 {
            let start = hull.len();
            let iter: Box<dyn Iterator<Item = &Point2<T>>> =
                if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
            for &p in iter {
                while hull.len() >= start + 2 {
                    let a = hull[hull.len() - 2];
                    let b = hull[hull.len() - 1];
                    if cross(sub(b, a), sub(p, a)) <= T::zero() {
                        hull.pop();
                    } else {
                        break;
                    }
                }
                hull.push(p);
            }
            hull.pop();
        }
        let diam = pts
            .iter()
            .map(|p| norm(sub(*p, pts[0])))
            .fold(T::zero(), T::max);
        let hull = drop_collinear(hull, T::lit(1e-12) * diam);
        if hull.len() < 3 {
            return Err(Error::Degenerate("points are collinear".into()));
        }
        Ok(Self { vertices: hull })
    }

    /// Accepts vertices that already form a strictly convex counter-clockwise
    /// polygon, keeping their order untouched.
    pub fn from_vertices(vertices: Vec<Point2<T>>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::Degenerate(format!("{n} vertices cannot span a polygon")));
        }
        if vertices.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(Error::InvalidArgument("non-finite vertex".into()));
        }
        let diam = diameter_brute(&vertices);
        if !(diam > T::zero()) {
            return Err(Error::Degenerate("all vertices coincide".into()));
        }
        let tol = T::lit(1e-12) * diam;
        let mut turning = T::zero();
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            let e = sub(b, a);
            let len = norm(e);
            if !(len > T::zero()) {
                return Err(Error::InvalidArgument("repeated vertex".into()));
            }
            if cross(e, sub(c, b)) / len <= tol {
                return Err(Error::InvalidArgument(
                    "vertices are not strictly convex in counter-clockwise order".into(),
                ));
            }
            let f = sub(c, b);
            turning += cross(e, f).atan2(dot(e, f));
        }
        // A simple convex polygon turns exactly once.
        if (turning - T::TAU()).abs() > T::lit(1e-6) {
            return Err(Error::InvalidArgument("vertex chain winds more than once".into()));
        }
        Ok(Self { vertices })
    }

    /// Regular `k`-gon with the given circumradius, first vertex on the
    /// positive x axis.
    pub fn regular(k: usize, center: Point2<T>, circumradius: T) -> Result<Self> {
        if k < 3 || !(circumradius > T::zero()) {
            return Err(Error::InvalidArgument("regular polygon needs k >= 3 and positive radius".into()));
        }
        let v = (0..k)
            .map(|i| {
                let t = T::TAU() * T::from_usize_lossy(i) / T::from_usize_lossy(k);
                [center[0] + circumradius * t.cos(), center[1] + circumradius * t.sin()]
            })
            .collect();
        Self::from_vertices(v)
    }

    /// Axis-aligned rectangle `[x0, x0 + w] x [y0, y0 + h]`.
    pub fn rectangle(lo: Point2<T>, width: T, height: T) -> Result<Self> {
        let [x, y] = lo;
        Self::from_vertices(vec![[x, y], [x + width, y], [x + width, y + height], [x, y + height]])
    }

    pub fn vertices(&self) -> &[Point2<T>] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    fn edges(&self) -> impl Iterator<Item = (Point2<T>, Point2<T>)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Shoelace area.
    pub fn area(&self) -> T {
        shoelace(&self.vertices)
    }

    /// Classical perimeter.
    pub fn perimeter(&self) -> T {
        compensated_sum(self.edges().map(|(a, b)| norm(sub(b, a))))
    }

    /// Area centroid.
    pub fn centroid(&self) -> Point2<T> {
        let o = self.vertices[0];
        let mut a = T::zero();
        let mut cx = T::zero();
        let mut cy = T::zero();
        for (p, q) in self.edges() {
            let (p, q) = (sub(p, o), sub(q, o));
            let w = cross(p, q);
            a += w;
            cx += (p[0] + q[0]) * w;
            cy += (p[1] + q[1]) * w;
        }
        let s = T::lit(3.0) * a;
        [o[0] + cx / s, o[1] + cy / s]
    }

    /// Largest vertex distance, by rotating calipers over antipodal pairs.
    pub fn diameter(&self) -> T {
        let v = &self.vertices;
        let n = v.len();
        let mut j = 1usize;
        let mut best = T::zero();
        for i in 0..n {
            let a = v[i];
            let b = v[(i + 1) % n];
            let e = sub(b, a);
            // Advance j while the next vertex is farther from edge (a, b).
            while cross(e, sub(v[(j + 1) % n], a)) > cross(e, sub(v[j], a)) {
                j = (j + 1) % n;
            }
            best = best.max(norm(sub(v[j], a))).max(norm(sub(v[j], b)));
        }
        best
    }

    /// Minimum width and its unit direction (an inward edge normal), by
    /// rotating calipers.
    pub fn min_width(&self) -> (T, Point2<T>) {
        let v = &self.vertices;
        let n = v.len();
        let mut j = 1usize;
        let mut best = (T::infinity(), [T::zero(), T::one()]);
        for i in 0..n {
            let a = v[i];
            let e = sub(v[(i + 1) % n], a);
            while cross(e, sub(v[(j + 1) % n], a)) > cross(e, sub(v[j], a)) {
                j = (j + 1) % n;
            }
            let len = norm(e);
            let w = cross(e, sub(v[j], a)) / len;
            if w < best.0 {
                best = (w, [-e[1] / len, e[0] / len]);
            }
        }
        best
    }

    /// Support function `max_{x in P} <x, u>`.
    pub fn support(&self, u: Point2<T>) -> T {
        self.vertices.iter().map(|&v| dot(v, u)).fold(T::neg_infinity(), T::max)
    }

    /// Extent `max <x,u> - min <x,u>` along a unit direction.
    pub fn extent(&self, u: Point2<T>) -> T {
        self.support(u) + self.support([-u[0], -u[1]])
    }

    /// Outward unit edge normals paired with support offsets: the polygon is
    /// `{x : <n_i, x> <= b_i}`.
    pub fn half_planes(&self) -> Vec<(Point2<T>, T)> {
        self.edges()
            .map(|(a, b)| {
                let e = sub(b, a);
                let len = norm(e);
                let nrm = [e[1] / len, -e[0] / len];
                (nrm, dot(nrm, a))
            })
            .collect()
    }

    /// Whether `p` lies in the closed polygon.
    pub fn contains(&self, p: Point2<T>) -> bool {
        self.edges().all(|(a, b)| cross(sub(b, a), sub(p, a)) >= T::zero())
    }

    /// Euclidean distance from `p` to the polygon (zero inside).
    pub fn distance_to(&self, p: Point2<T>) -> T {
        if self.contains(p) {
            return T::zero();
        }
        self.edges().map(|(a, b)| segment_distance(p, a, b)).fold(T::infinity(), T::min)
    }

    /// Area of the outer parallel body `P + B_r` (Steiner formula).
    pub fn outer_parallel_area(&self, r: T) -> T {
        self.area() + r * self.perimeter() + T::PI() * r * r
    }

    /// Inner parallel body `{x : dist(x, complement) >= r}` as the
    /// intersection of inward-shifted edge half-planes, or `None` when empty
    /// or degenerate.
    pub fn inner_parallel(&self, r: T) -> Option<Vec<Point2<T>>> {
        let mut poly = self.vertices.clone();
        for (nrm, b) in self.half_planes() {
            poly = clip(&poly, nrm, b - r);
            if poly.len() < 3 {
                return None;
            }
        }
        Some(poly)
    }

    pub fn inner_parallel_area(&self, r: T) -> T {
        self.inner_parallel(r).map(|p| shoelace(&p).max(T::zero())).unwrap_or(T::zero())
    }

    /// Exact Minkowski r-perimeter `(|P + B_r| - |P - B_r|) / (2r)`.
    pub fn minkowski_perimeter(&self, r: T) -> Result<T> {
        if !(r > T::zero()) {
            return Err(Error::InvalidArgument("perimeter radius must be positive".into()));
        }
        Ok((self.outer_parallel_area(r) - self.inner_parallel_area(r)) / (T::lit(2.0) * r))
    }

    pub fn map(&self, f: impl Fn(Point2<T>) -> Point2<T>) -> Self {
        Self { vertices: self.vertices.iter().map(|&v| f(v)).collect() }
    }

    pub fn translated(&self, t: Point2<T>) -> Self {
        self.map(|v| [v[0] + t[0], v[1] + t[1]])
    }

    /// Rotation by `angle` about the origin.
    pub fn rotated(&self, angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        self.map(|v| [c * v[0] - s * v[1], s * v[0] + c * v[1]])
    }

    /// Homothety `x -> center + k (x - center)`.
    pub fn scaled_about(&self, center: Point2<T>, k: T) -> Self {
        self.map(|v| [center[0] + k * (v[0] - center[0]), center[1] + k * (v[1] - center[1])])
    }

    /// Homothety about the centroid onto area `m`.
    pub fn rescale_to_volume(&self, m: T) -> Result<Self> {
        if !(m > T::zero()) || !m.is_finite() {
            return Err(Error::InvalidArgument(format!("target volume must be positive (got {m})")));
        }
        let a = self.area();
        if a == m {
            return Ok(self.clone());
        }
        Ok(self.scaled_about(self.centroid(), (m / a).sqrt()))
    }

    /// One-sided Hausdorff distance `sup_{x in self} dist(x, other)`,
    /// attained at a vertex of `self`.
    pub fn directed_hausdorff(&self, other: &Self) -> T {
        self.vertices.iter().map(|&v| other.distance_to(v)).fold(T::zero(), T::max)
    }

    pub fn hausdorff_distance(&self, other: &Self) -> T {
        self.directed_hausdorff(other).max(other.directed_hausdorff(self))
    }

    /// Hausdorff distance to the disk `B_radius(center)`.
    ///
    /// With `g(u) = h_P(u) - <c, u>` this is `max_u |g(u) - R|`. The maximum
    /// of `g` is the farthest vertex distance; its minimum is attained at an
    /// edge normal or at a direction `-(v - c)` inside a vertex cone, so both
    /// candidate sets are evaluated.
    pub fn hausdorff_to_ball(&self, center: Point2<T>, radius: T) -> T {
        let far = self.vertices.iter().map(|&v| norm(sub(v, center))).fold(T::zero(), T::max);
        let mut near = T::infinity();
        for (nrm, b) in self.half_planes() {
            near = near.min(b - dot(nrm, center));
        }
        for &v in &self.vertices {
            let d = sub(v, center);
            let l = norm(d);
            if l > T::zero() {
                let u = [-d[0] / l, -d[1] / l];
                near = near.min(self.support(u) - dot(u, center));
            }
        }
        (far - radius).max(radius - near)
    }

    /// `min_c d_H(P, B_radius(c))` by compass search from the centroid (the
    /// objective is convex in `c`).
    pub fn hausdorff_to_best_ball(&self, radius: T) -> (T, Point2<T>) {
        let mut c = self.centroid();
        let mut best = self.hausdorff_to_ball(c, radius);
        let mut step = self.diameter() * T::lit(0.125);
        let floor = self.diameter() * T::lit(1e-12);
        while step > floor {
            let mut moved = false;
            for d in [[T::one(), T::zero()], [-T::one(), T::zero()], [T::zero(), T::one()], [T::zero(), -T::one()]] {
                let trial = [c[0] + step * d[0], c[1] + step * d[1]];
                let v = self.hausdorff_to_ball(trial, radius);
                if v < best {
                    best = v;
                    c = trial;
                    moved = true;
                }
            }
            if !moved {
                step = step * T::lit(0.5);
            }
        }
        (best, c)
    }

    /// `|P ∩ B_radius(center)|`, summing signed triangle-disk overlaps of the
    /// fan from the center.
    pub fn disk_intersection_area(&self, center: Point2<T>, radius: T) -> T {
        let n = self.vertices.len();
        let parts = (0..n).map(|i| {
            let a = sub(self.vertices[i], center);
            let b = sub(self.vertices[(i + 1) % n], center);
            triangle_disk_area(a, b, radius)
        });
        compensated_sum(parts).max(T::zero())
    }

    /// Fraenkel asymmetry `inf_x |P Δ B_R(x)| / |P|` with `|B_R| = |P|`, and
    /// the optimal center.
    ///
    /// `x -> |P ∩ B_R(x)|^{1/2}` is concave on its support (Brunn-Minkowski),
    /// so compass search from the centroid reaches the global optimum.
    pub fn fraenkel_asymmetry(&self) -> (T, Point2<T>) {
        let area = self.area();
        let radius = (area / T::PI()).sqrt();
        let mut c = self.centroid();
        let mut best = self.disk_intersection_area(c, radius);
        let mut step = radius * T::lit(0.25);
        let floor = radius * T::lit(1e-11);
        while step > floor {
            let mut moved = false;
            for d in [[T::one(), T::zero()], [-T::one(), T::zero()], [T::zero(), T::one()], [T::zero(), -T::one()]] {
                let trial = [c[0] + step * d[0], c[1] + step * d[1]];
                let v = self.disk_intersection_area(trial, radius);
                if v > best {
                    best = v;
                    c = trial;
                    moved = true;
                }
            }
            if !moved {
                step = step * T::lit(0.5);
            }
        }
        let value = (T::lit(2.0) * (area - best) / area).max(T::zero()).min(T::lit(2.0));
        (value, c)
    }

    /// Largest `s` and a center `c` with `c + s * sum_i [-half_i, half_i] frame_i`
    /// inside the polygon, by bisection on `s` over the feasible-center region.
    pub fn largest_inscribed_box(&self, frame: [Point2<T>; 2], half: [T; 2]) -> (T, Point2<T>) {
        let planes = self.half_planes();
        let reach: Vec<T> = planes
            .iter()
            .map(|(nrm, _)| (0..2).map(|i| half[i] * dot(*nrm, frame[i]).abs()).fold(T::zero(), |a, b| a + b))
            .collect();
        let feasible = |s: T| {
            let mut poly = self.vertices.clone();
            for ((nrm, b), &k) in planes.iter().zip(&reach) {
                poly = clip(&poly, *nrm, *b - s * k);
                if poly.is_empty() {
                    return None;
                }
            }
            Some(poly)
        };
        let mut lo = T::zero();
        let mut hi = T::one();
        let mut region = self.vertices.clone();
        for _ in 0..60 {
            let mid = T::lit(0.5) * (lo + hi);
            match feasible(mid) {
                Some(p) => {
                    lo = mid;
                    region = p;
                }
                None => hi = mid,
            }
        }
        let k = T::from_usize_lossy(region.len());
        let c = region.iter().fold([T::zero(); 2], |a, v| [a[0] + v[0] / k, a[1] + v[1] / k]);
        (lo, c)
    }

    /// Samples the polygon on a grid with spacing `h`, cell centers anchored
    /// at the centroid.
    pub fn rasterize(&self, h: T) -> Result<GridSet<T>> {
        self.rasterize_capped(h, DEFAULT_MAX_CELLS)
    }

    pub fn rasterize_capped(&self, h: T, max_cells: usize) -> Result<GridSet<T>> {
        let (lo, hi) = self.bounding_box();
        let planes = self.half_planes();
        let anchor = self.centroid();
        GridSet::from_indicator(&lo, &hi, h, Lattice::Anchored(&anchor), 1, max_cells, |p| {
            planes.iter().all(|&(nrm, b)| nrm[0] * p[0] + nrm[1] * p[1] < b)
        })
    }

    pub fn bounding_box(&self) -> (Point2<T>, Point2<T>) {
        let mut lo = [T::infinity(); 2];
        let mut hi = [T::neg_infinity(); 2];
        for v in &self.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    /// Second moments about the centroid: `(Ixx, Ixy, Iyy)`, each divided by
    /// the area.
    pub fn covariance(&self) -> (T, T, T) {
        let c = self.centroid();
        let mut sxx = T::zero();
        let mut sxy = T::zero();
        let mut syy = T::zero();
        let mut a = T::zero();
        for (p, q) in self.edges() {
            let (p, q) = (sub(p, c), sub(q, c));
            let w = cross(p, q);
            a += w;
            sxx += w * (p[0] * p[0] + p[0] * q[0] + q[0] * q[0]);
            syy += w * (p[1] * p[1] + p[1] * q[1] + q[1] * q[1]);
            sxy += w * (T::lit(2.0) * p[0] * p[1] + p[0] * q[1] + q[0] * p[1] + T::lit(2.0) * q[0] * q[1]);
        }
        let area = a * T::lit(0.5);
        (sxx / T::lit(12.0) / area, sxy / T::lit(24.0) / area, syy / T::lit(12.0) / area)
    }

    /// Unit eigenvector of the covariance with the largest eigenvalue.
    pub fn principal_axis(&self) -> Point2<T> {
        let (a, b, d) = self.covariance();
        let theta = T::lit(0.5) * (T::lit(2.0) * b).atan2(a - d);
        [theta.cos(), theta.sin()]
    }
}

fn shoelace<T: Real>(v: &[Point2<T>]) -> T {
    let n = v.len();
    if n < 3 {
        return T::zero();
    }
    let o = v[0];
    compensated_sum((1..n - 1).map(|i| cross(sub(v[i], o), sub(v[i + 1], o)))) * T::lit(0.5)
}

fn diameter_brute<T: Real>(v: &[Point2<T>]) -> T {
    let mut d = T::zero();
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            d = d.max(norm(sub(v[i], v[j])));
        }
    }
    d
}

fn drop_collinear<T: Real>(mut v: Vec<Point2<T>>, tol: T) -> Vec<Point2<T>> {
    let mut changed = true;
    while changed && v.len() >= 3 {
        changed = false;
        let n = v.len();
        for i in 0..n {
            let a = v[(i + n - 1) % n];
            let b = v[i];
            let c = v[(i + 1) % n];
            let len = norm(sub(c, a));
            if len == T::zero() || cross(sub(c, a), sub(b, a)).abs() / len <= tol {
                v.remove(i);
                changed = true;
                break;
            }
        }
    }
    v
}

fn segment_distance<T: Real>(p: Point2<T>, a: Point2<T>, b: Point2<T>) -> T {
    let e = sub(b, a);
    let l2 = dot(e, e);
    let t = if l2 > T::zero() { (dot(sub(p, a), e) / l2).max(T::zero()).min(T::one()) } else { T::zero() };
    norm(sub(p, [a[0] + t * e[0], a[1] + t * e[1]]))
}

/// Sutherland–Hodgman clip of a convex polygon to `<n, x> <= b`.
fn clip<T: Real>(poly: &[Point2<T>], nrm: Point2<T>, b: T) -> Vec<Point2<T>> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    let k = poly.len();
    for i in 0..k {
        let p = poly[i];
        let q = poly[(i + 1) % k];
        let fp = dot(nrm, p) - b;
        let fq = dot(nrm, q) - b;
        if fp <= T::zero() {
            out.push(p);
        }
        if (fp < T::zero() && fq > T::zero()) || (fp > T::zero() && fq < T::zero()) {
            let t = fp / (fp - fq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

/// Signed area of `triangle(0, a, b) ∩ B_radius(0)`, positive for
/// counter-clockwise `(a, b)`.
fn triangle_disk_area<T: Real>(a: Point2<T>, b: Point2<T>, radius: T) -> T {
    let d = sub(b, a);
    let r2 = radius * radius;
    let qa = dot(d, d);
    if qa == T::zero() {
        return T::zero();
    }
    // Closest point of the line to the center, then the chord half-width in
    // the segment parameter; this avoids the cancellation of the quadratic
    // formula for long edges passing near the center.
    let t0 = -dot(a, d) / qa;
    let foot = [a[0] + t0 * d[0], a[1] + t0 * d[1]];
    let gap = r2 - dot(foot, foot);
    let (t1, t2) = if gap > T::zero() {
        let w = (gap / qa).sqrt();
        let clamp = |t: T| t.max(T::zero()).min(T::one());
        (clamp(t0 - w), clamp(t0 + w))
    } else {
        (T::one(), T::one())
    };
    let at = |t: T| [a[0] + t * d[0], a[1] + t * d[1]];
    let sector = |p: Point2<T>, q: Point2<T>| T::lit(0.5) * r2 * cross(p, q).atan2(dot(p, q));
    let (p1, p2) = (at(t1), at(t2));
    sector(a, p1) + T::lit(0.5) * cross(p1, p2) + sector(p2, b)
}
