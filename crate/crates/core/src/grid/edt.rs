//! Exact Euclidean distance transform by separable lower envelopes of
//! parabolas (Felzenszwalb–Huttenlocher), one pass per axis.

use rayon::prelude::*;

use super::GridSet;
use crate::scalar::Real;

/// Signed distance from each cell center to the nearest cell center of the
/// complementary phase: negative on occupied cells, positive elsewhere.
#[derive(Clone, Debug)]
pub struct DistanceField<T> {
    spacing: T,
    origin: Vec<T>,
    dims: Vec<usize>,
    values: Vec<T>,
}

impl<T: Real> DistanceField<T> {
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

    pub fn value(&self, idx: usize) -> T {
        self.values[idx]
    }
}

/// Squared distances (in cell units) from every cell to the nearest site.
/// Cells with no site anywhere get `f64::INFINITY`.
pub(crate) fn squared_edt(sites: &[bool], dims: &[usize]) -> Vec<f64> {
    let mut buf: Vec<f64> = sites.iter().map(|&s| if s { 0.0 } else { f64::INFINITY }).collect();
    let mut stride = 1usize;
    for &len in dims {
        transform_axis(&mut buf, stride, len);
        stride *= len;
    }
    buf
}

fn transform_axis(buf: &mut [f64], stride: usize, len: usize) {
    if len <= 1 {
        return;
    }
    let total = buf.len();
    let block = stride * len;
    let line_starts: Vec<usize> =
        (0..total / block).flat_map(|b| (0..stride).map(move |s| b * block + s)).collect();
    let src: &[f64] = buf;
    let lines: Vec<Vec<f64>> = line_starts
        .par_iter()
        .with_min_len(64)
        .map_init(
            || Scratch::new(len),
            |scratch, &start| {
                for q in 0..len {
                    scratch.f[q] = src[start + q * stride];
                }
                let mut out = vec![0.0; len];
                lower_envelope(scratch, &mut out);
                out
            },
        )
        .collect();
    for (start, line) in line_starts.iter().zip(lines) {
        for (q, v) in line.into_iter().enumerate() {
            buf[start + q * stride] = v;
        }
    }
}

struct Scratch {
    f: Vec<f64>,
    v: Vec<usize>,
    z: Vec<f64>,
}

impl Scratch {
    fn new(len: usize) -> Self {
        Self { f: vec![0.0; len], v: vec![0; len], z: vec![0.0; len + 1] }
    }
}

/// One-dimensional squared distance transform of the sampled function `f`.
fn lower_envelope(s: &mut Scratch, out: &mut [f64]) {
    let n = s.f.len();
    let Some(first) = (0..n).find(|&q| s.f[q].is_finite()) else {
        out.iter_mut().for_each(|x| *x = f64::INFINITY);
        return;
    };
    let f = &s.f;
    let mut k = 0usize;
    s.v[0] = first;
    s.z[0] = f64::NEG_INFINITY;
    s.z[1] = f64::INFINITY;
    for q in first + 1..n {
        if !f[q].is_finite() {
            continue;
        }
        let fq = f[q] + (q * q) as f64;
        let mut sep;
        loop {
            let p = s.v[k];
            sep = (fq - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
            if sep <= s.z[k] && k > 0 {
                k -= 1;
            } else {
                break;
            }
        }
        k += 1;
        s.v[k] = q;
        s.z[k] = sep;
        s.z[k + 1] = f64::INFINITY;
    }
    let mut k = 0usize;
    for (q, o) in out.iter_mut().enumerate() {
        while s.z[k + 1] < q as f64 {
            k += 1;
        }
        let p = s.v[k];
        let d = q as f64 - p as f64;
        *o = d * d + f[p];
    }
}

/// Signed exact Euclidean distance transform of a grid set.
///
/// When the complementary phase is absent the distance saturates at the
/// grid diagonal.
pub fn distance_transform<T: Real>(set: &GridSet<T>) -> DistanceField<T> {
    let occ = set.occupancy();
    let empty: Vec<bool> = occ.iter().map(|&b| !b).collect();
    let to_empty = squared_edt(&empty, set.dims());
    let to_occupied = squared_edt(occ, set.dims());
    let h = set.spacing();
    let cap = set.diagonal().to_f64_lossy();
    let values = occ
        .par_iter()
        .zip(to_empty.par_iter().zip(to_occupied.par_iter()))
        .map(|(&o, (&de, &dout))| {
            let (sq, sign) = if o { (de, -1.0) } else { (dout, 1.0) };
            let d = (sq.sqrt() * h.to_f64_lossy()).min(cap);
            T::lit(sign * d)
        })
        .collect();
    DistanceField {
        spacing: h,
        origin: set.origin().to_vec(),
        dims: set.dims().to_vec(),
        values,
    }
}
