//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Used for the cell-averaged singular kernel weight and for the angular
//! integral of the chord-power representation of the Riesz energy. All
//! arithmetic is `f64`; the subdivision order is deterministic.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let hl = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = hl * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * hl, ((k - g) * hl).abs())
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    seq: usize,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // Largest error first; ties go to the older panel.
        self.error.total_cmp(&other.error).then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Integrates `f` over `[a, b]` with initial panel boundaries at `breaks`
/// (which must lie inside the interval; they need not be sorted).
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_panels: usize,
) -> Quadrature {
    let mut pts: Vec<f64> = Vec::with_capacity(breaks.len() + 2);
    pts.push(a);
    pts.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * (b - a).abs());

    let mut heap = BinaryHeap::with_capacity(pts.len() * 2);
    let mut seq = 0usize;
    for w in pts.windows(2) {
        let (v, e) = kronrod15(&mut f, w[0], w[1]);
        heap.push(Panel { a: w[0], b: w[1], value: v, error: e, seq });
        seq += 1;
    }

    loop {
        // Totals are recomputed in panel order so the result does not depend on
        // floating point drift of running sums.
        let (total, err) = totals(&heap);
        if err <= abs_tol.max(rel_tol * total.abs()) || heap.len() >= max_panels {
            return Quadrature { value: total, error: err, intervals: heap.len() };
        }
        let worst = heap.pop().expect("non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval cannot be split further in floating point.
            heap.push(Panel { error: 0.0, ..worst });
            continue;
        }
        let (v1, e1) = kronrod15(&mut f, worst.a, mid);
        let (v2, e2) = kronrod15(&mut f, mid, worst.b);
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1, seq });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2, seq: seq + 1 });
        seq += 2;
    }
}

fn totals(heap: &BinaryHeap<Panel>) -> (f64, f64) {
    let mut panels: Vec<&Panel> = heap.iter().collect();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut v = crate::scalar::CompensatedSum::<f64>::new();
    let mut e = 0.0;
    for p in panels {
        v.add(p.value);
        e += p.error;
    }
    (v.value(), e)
}

/// Integrates `f` over `[a, b]` to the requested relative tolerance.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Quadrature {
    integrate_with_breaks(f, a, b, &[], rel_tol, 0.0, 4000)
}
