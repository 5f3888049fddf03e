//! Symmetric differences and Fraenkel asymmetry against balls.

use rayon::prelude::*;

use super::GridSet;
use crate::error::{invalid, Result};
use crate::scalar::{compensated_sum, unit_ball_volume, Real};

/// Volume of `A Δ B`. Grids must share the spacing; origins are aligned to the
/// nearest whole-cell offset.
pub fn symmetric_difference_volume<T: Real>(a: &GridSet<T>, b: &GridSet<T>) -> Result<T> {
    let h = a.spacing();
    if a.dim() != b.dim() {
        return invalid("symmetric difference of grids with different dimensions");
    }
    if (a.spacing() - b.spacing()).abs() > T::lit(1e-12) * h {
        return invalid(format!("mismatched spacing {} vs {}", a.spacing(), b.spacing()));
    }
    let n = a.dim();
    let mut offset = [0isize; 3];
    for k in 0..n {
        offset[k] = ((a.origin()[k] - b.origin()[k]) / h).round().to_isize().unwrap_or(isize::MAX / 2);
    }
    // Cell i of A sits at cell i + offset of B.
    let mut common = 0usize;
    for idx in a.occupied_indices() {
        let ijk = a.unravel(idx);
        let mut inside = true;
        let mut bijk = [0usize; 3];
        for k in 0..n {
            let v = ijk[k] as isize + offset[k];
            if v < 0 || v as usize >= b.dims()[k] {
                inside = false;
                break;
            }
            bijk[k] = v as usize;
        }
        if inside && b.is_occupied(b.ravel(bijk)) {
            common += 1;
        }
    }
    let total = a.occupied_count() + b.occupied_count() - 2 * common;
    Ok(T::from_usize_lossy(total) * a.cell_volume())
}

/// Strategy for the infimum over translations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TranslationSearch<T> {
    /// Centroid-seeded lattice coordinate descent with golden-section refinement.
    Local,
    /// Full lattice sweep of the bounding box at `step` (default `max(h, R/16)`),
    /// followed by local refinement of the best lattice point.
    Exhaustive { step: Option<T> },
}

/// Outcome of an asymmetry evaluation.
#[derive(Clone, Debug)]
pub struct Asymmetry<T> {
    /// `inf_x |E Δ B_R(x)| / |B_R|`, in `[0, 2]`.
    pub value: T,
    /// Ball center realizing the value.
    pub center: Vec<T>,
    pub evaluations: usize,
}

/// Fraenkel asymmetry with the default local search.
pub fn fraenkel_asymmetry<T: Real>(set: &GridSet<T>, radius: T) -> Result<T> {
    fraenkel_asymmetry_with(set, radius, TranslationSearch::Local).map(|a| a.value)
}

/// `inf_x |E Δ B_R(x)| / |B_R|`. Requires `|E|` within 1% of `|B_R|`.
///
/// `|E ∩ B_R(x)|` weights each occupied cell by the fraction of a cell-width
/// ramp across the sphere, which makes the objective continuous in `x`.
pub fn fraenkel_asymmetry_with<T: Real>(
    set: &GridSet<T>,
    radius: T,
    search: TranslationSearch<T>,
) -> Result<Asymmetry<T>> {
    if !(radius > T::zero()) {
        return invalid("ball radius must be positive");
    }
    let n = set.dim();
    let ball_volume = unit_ball_volume::<T>(n) * radius.powi(n as i32);
    let vol = set.volume();
    if (vol - ball_volume).abs() > T::lit(0.01) * ball_volume {
        return invalid(format!(
            "set volume {vol} differs from ball volume {ball_volume} by more than 1%; rescale first"
        ));
    }
    let overlap = Overlap::new(set, radius, ball_volume);
    let centroid = set.centroid().expect("non-empty: volume matched a ball");
    let h = set.spacing();
    let mut evals = 0usize;
    let (center, value) = match search {
        TranslationSearch::Local => {
            let start_step = coarse_step(h, radius / T::lit(8.0));
            local_descent(&overlap, centroid, start_step, &mut evals)
        }
        TranslationSearch::Exhaustive { step } => {
            let step = step.unwrap_or_else(|| h.max(radius / T::lit(16.0)));
            let (lo, hi) = overlap.bounds();
            let counts: Vec<usize> = (0..n)
                .map(|k| ((hi[k] - lo[k]) / step).ceil().to_usize().unwrap_or(0) + 1)
                .collect();
            let total: usize = counts.iter().product();
            let scores: Vec<(usize, T)> = (0..total)
                .into_par_iter()
                .map(|flat| {
                    let mut rest = flat;
                    let mut x = vec![T::zero(); n];
                    for k in 0..n {
                        x[k] = lo[k] + T::from_usize_lossy(rest % counts[k]) * step;
                        rest /= counts[k];
                    }
                    (flat, overlap.objective(&x))
                })
                .collect();
            evals += total;
            // First minimum in lattice order.
            let (best_flat, _) = scores
                .iter()
                .copied()
                .fold((0usize, T::infinity()), |acc, s| if s.1 < acc.1 { s } else { acc });
            let mut rest = best_flat;
            let mut x = vec![T::zero(); n];
            for k in 0..n {
                x[k] = lo[k] + T::from_usize_lossy(rest % counts[k]) * step;
                rest /= counts[k];
            }
            local_descent(&overlap, x, coarse_step(h, step), &mut evals)
        }
    };
    let value = (value / ball_volume).max(T::zero()).min(T::lit(2.0));
    Ok(Asymmetry { value, center, evaluations: evals })
}

/// Largest `h * 2^k` not exceeding `target` (at least `h`).
fn coarse_step<T: Real>(h: T, target: T) -> T {
    let mut s = h;
    while s * T::lit(2.0) <= target {
        s = s * T::lit(2.0);
    }
    s
}

fn local_descent<T: Real>(ov: &Overlap<T>, mut x: Vec<T>, start_step: T, evals: &mut usize) -> (Vec<T>, T) {
    let n = x.len();
    let h = ov.h;
    let mut best = ov.objective(&x);
    *evals += 1;
    let mut step = start_step;
    while step >= h * T::lit(0.999) {
        let mut improved = true;
        while improved {
            improved = false;
            for k in 0..n {
                for dir in [T::one(), -T::one()] {
                    loop {
                        let mut y = x.clone();
                        y[k] += dir * step;
                        let v = ov.objective(&y);
                        *evals += 1;
                        if v < best {
                            best = v;
                            x = y;
                            improved = true;
                        } else {
                            break;
                        }
                    }
                }
            }
        }
        step = step * T::lit(0.5);
    }
    // Sub-cell refinement.
    for _ in 0..2 {
        for k in 0..n {
            let (xk, v) = golden_section(|t| {
                let mut y = x.clone();
                y[k] = t;
                ov.objective(&y)
            }, x[k] - h, x[k] + h, h * T::lit(1e-3), evals);
            if v < best {
                best = v;
                x[k] = xk;
            }
        }
    }
    (x, best)
}

fn golden_section<T: Real, F: Fn(T) -> T>(f: F, mut a: T, mut b: T, tol: T, evals: &mut usize) -> (T, T) {
    let g = T::lit(0.618_033_988_749_894_9);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    *evals += 2;
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        *evals += 1;
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Occupied cell centers sorted along the first axis, for fast overlap sums.
struct Overlap<T> {
    centers: Vec<[T; 3]>,
    n: usize,
    h: T,
    radius: T,
    set_volume: T,
    ball_volume: T,
    cell_volume: T,
}

impl<T: Real> Overlap<T> {
    fn new(set: &GridSet<T>, radius: T, ball_volume: T) -> Self {
        let mut centers: Vec<[T; 3]> = set.occupied_indices().into_iter().map(|i| set.center(i)).collect();
        centers.sort_by(|a, b| a[0].partial_cmp(&b[0]).expect("finite").then(a[1].partial_cmp(&b[1]).expect("finite")));
        Self {
            centers,
            n: set.dim(),
            h: set.spacing(),
            radius,
            set_volume: set.volume(),
            ball_volume,
            cell_volume: set.cell_volume(),
        }
    }

    fn bounds(&self) -> (Vec<T>, Vec<T>) {
        let mut lo = vec![T::infinity(); self.n];
        let mut hi = vec![T::neg_infinity(); self.n];
        for c in &self.centers {
            for k in 0..self.n {
                lo[k] = lo[k].min(c[k]);
                hi[k] = hi[k].max(c[k]);
            }
        }
        (lo, hi)
    }

    /// `|E Δ B_R(x)|`.
    fn objective(&self, x: &[T]) -> T {
        let reach = self.radius + self.h;
        let start = self.centers.partition_point(|c| c[0] < x[0] - reach);
        let end = self.centers.partition_point(|c| c[0] <= x[0] + reach);
        let half = T::lit(0.5);
        let weights = self.centers[start..end].par_chunks(4096).map(|chunk| {
            compensated_sum(chunk.iter().map(|c| {
                let mut d2 = T::zero();
                for k in 0..self.n {
                    let t = c[k] - x[k];
                    d2 += t * t;
                }
                if d2 >= reach * reach {
                    return T::zero();
                }
                ((self.radius - d2.sqrt()) / self.h + half).max(T::zero()).min(T::one())
            }))
        });
        let partial: Vec<T> = weights.collect();
        let inter = compensated_sum(partial) * self.cell_volume;
        self.set_volume + self.ball_volume - T::lit(2.0) * inter
    }
}
