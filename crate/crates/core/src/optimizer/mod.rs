//! Volume-constrained minimization of `Per_r(E) + m^{(n+1-α)/n} Φ_α(E)` over
//! unit-volume convex polygons by simulated annealing, and the small- and
//! large-volume sweeps.
//!
//! Both terms are evaluated exactly: Per_r through the parallel bodies of the
//! polygon and Φ_α through its chord-power integral. The grid path is kept as
//! a cross-check ([`grid_energy`]).

mod sweep;

pub use sweep::{
    large_volume_sweep, run_sweep, small_volume_sweep, Check, Fit, SweepConfig, SweepMode, SweepReport, SweepRow, BALL_THRESHOLD,
    HAUSDORFF_BALL, RELAXED_BALL_THRESHOLD,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::convex::{ConvexPolygon, Point2};
use crate::error::{invalid, Error, Result};
use crate::grid::minkowski_perimeter;
use crate::riesz::{polygon_energy_with_tolerance, riesz_energy_fast, RieszKernel};

/// Geometric annealing schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Schedule {
    /// Temperature relative to the current energy at step 0.
    pub initial_temperature: f64,
    /// Per-step multiplicative decay.
    pub decay: f64,
    pub steps: usize,
}

impl Default for Schedule {
    fn default() -> Self {
        Self { initial_temperature: 1e-3, decay: 0.996, steps: 3000 }
    }
}

/// Grid resolution for the cross-check path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpacingPolicy {
    /// Cells across the smallest box side `λ_1`.
    pub cells_across: usize,
    pub max_cells: usize,
}

impl Default for SpacingPolicy {
    fn default() -> Self {
        Self { cells_across: 20, max_cells: 2048 * 2048 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub m: f64,
    pub alpha: f64,
    pub r: f64,
    pub n: usize,
    pub seed: u64,
    pub schedule: Schedule,
    /// Gaussian step as a fraction of the extent along each principal axis.
    pub proposal_scale: f64,
    pub restarts: usize,
    pub spacing: SpacingPolicy,
    /// A restart stops once its best energy has not improved by more than
    /// `tolerance * |best|` for `patience` steps (0 disables).
    pub tolerance: f64,
    pub patience: usize,
    /// Overrides `m^{(n+1-α)/n}`; 0 gives the pure perimeter problem.
    pub coupling: Option<f64>,
    pub min_vertices: usize,
    pub max_vertices: usize,
    /// Relative accuracy of the angular quadrature in Φ_α.
    pub energy_tolerance: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            m: 1.0,
            alpha: 0.5,
            r: 0.1,
            n: 2,
            seed: 7,
            schedule: Schedule::default(),
            proposal_scale: 0.05,
            restarts: 4,
            spacing: SpacingPolicy::default(),
            tolerance: 0.0,
            patience: 0,
            coupling: None,
            min_vertices: 8,
            max_vertices: 128,
            energy_tolerance: 1e-8,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 3 {
            return Err(Error::Unsupported("the optimizer works on polygons (n = 2) only".into()));
        }
        if self.n != 2 {
            return invalid(format!("dimension {} is not supported", self.n));
        }
        if !(self.m > 0.0 && self.m.is_finite()) {
            return invalid("m must be positive");
        }
        if !(self.r > 0.0 && self.r < 1.0) {
            return invalid(format!("r must lie in (0, 1) (got {})", self.r));
        }
        if !(self.alpha > 0.0 && self.alpha < self.n as f64) {
            return invalid(format!("alpha must lie in (0, {}) (got {})", self.n, self.alpha));
        }
        let s = &self.schedule;
        if s.steps == 0 || !(s.initial_temperature >= 0.0) || !(s.decay > 0.0 && s.decay <= 1.0) {
            return invalid("schedule needs steps >= 1, temperature >= 0 and decay in (0, 1]");
        }
        if self.restarts == 0 {
            return invalid("restarts must be at least 1");
        }
        if !(self.proposal_scale > 0.0) {
            return invalid("proposal_scale must be positive");
        }
        if self.min_vertices < 3 || self.max_vertices < self.min_vertices {
            return invalid("need 3 <= min_vertices <= max_vertices");
        }
        if matches!(self.coupling, Some(c) if !(c >= 0.0)) {
            return invalid("coupling must be non-negative");
        }
        if !(self.energy_tolerance > 0.0) {
            return invalid("energy_tolerance must be positive");
        }
        Ok(())
    }

    /// `m^{(n+1-α)/n}` unless overridden.
    pub fn coupling(&self) -> f64 {
        self.coupling.unwrap_or_else(|| {
            let n = self.n as f64;
            self.m.powf((n + 1.0 - self.alpha) / n)
        })
    }

    /// Hex SHA-256 of the JSON serialization.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

/// `((n-1)/n) ((n+1-α)/(α(n-1)+1))`, the growth exponent of the diameter of
/// large-volume minimizers.
pub fn elongation_exponent(n: usize, alpha: f64) -> f64 {
    let n = n as f64;
    (n - 1.0) / n * (n + 1.0 - alpha) / (alpha * (n - 1.0) + 1.0)
}

/// A unit-volume candidate with cached energy terms.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateShape {
    pub polygon: ConvexPolygon<f64>,
    pub per_r: f64,
    pub phi: f64,
    pub total: f64,
}

/// `Per_r(S) + coupling * Φ_α(S)`.
pub fn total_energy(polygon: &ConvexPolygon<f64>, cfg: &OptimizerConfig) -> Result<CandidateShape> {
    let per_r = polygon.minkowski_perimeter(cfg.r)?;
    let c = cfg.coupling();
    let phi = polygon_energy_with_tolerance(polygon, cfg.alpha, cfg.energy_tolerance)?;
    Ok(CandidateShape { polygon: polygon.clone(), per_r, phi, total: per_r + c * phi })
}

/// Energy with both terms on a grid at the configured spacing policy.
pub fn grid_energy(polygon: &ConvexPolygon<f64>, cfg: &OptimizerConfig) -> Result<f64> {
    let lambda1 = polygon.min_width().0;
    let h = (lambda1 / cfg.spacing.cells_across as f64).min(cfg.r / 2.0);
    let (lo, hi) = polygon.bounding_box();
    let cells = ((hi[0] - lo[0]) / h + 3.0) * ((hi[1] - lo[1]) / h + 3.0);
    if cells > cfg.spacing.max_cells as f64 {
        return Err(Error::ResourceLimit(format!("{cells:.0} cells exceed the cap of {}", cfg.spacing.max_cells)));
    }
    let grid = polygon.rasterize(h)?;
    let per = minkowski_perimeter(&grid, cfg.r)?;
    let k = RieszKernel::for_grid(cfg.alpha, &grid)?;
    Ok(per + cfg.coupling() * riesz_energy_fast(&grid, &k)?)
}

/// Unit-area regular polygon, the ball competitor.
pub fn ball_candidate(vertices: usize, cfg: &OptimizerConfig) -> Result<CandidateShape> {
    let p = ConvexPolygon::regular(vertices, [0.0, 0.0], 1.0)?.rescale_to_volume(1.0)?;
    total_energy(&p, cfg)
}

/// `Per_r + coupling Φ_α` of the exact unit-area disk.
pub fn exact_ball_energy(cfg: &OptimizerConfig) -> Result<f64> {
    let radius = crate::convex::radius_for_volume(1.0, 2);
    let per = crate::convex::ball_perimeter_analytic(radius, cfg.r, 2)?;
    Ok(per + cfg.coupling() * crate::riesz::ball_energy(radius, cfg.alpha, 2)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProposalKind {
    Start,
    Move,
    Insert,
    Delete,
    Stretch,
}

/// One annealing step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub restart: usize,
    pub step: usize,
    pub kind: ProposalKind,
    pub accepted: bool,
    /// Energy of the proposal (`null` when it was infeasible).
    pub energy: Option<f64>,
    /// Best energy of this restart so far.
    pub best: f64,
}

#[derive(Clone, Debug)]
pub struct OptimizationTrace {
    pub records: Vec<TraceRecord>,
    pub best_energy: f64,
    pub best_restart: usize,
    pub seed: u64,
    pub config_hash: String,
}

impl OptimizationTrace {
    /// Newline-delimited JSON, one record per line.
    pub fn write_ndjson<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut w, r)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Start {
    Ball,
    Box4,
    RandomHull,
    Elongated,
}

fn starts(cfg: &OptimizerConfig) -> Vec<Start> {
    let mut s = vec![Start::Ball, Start::Box4, Start::RandomHull];
    if cfg.m > 1.0 {
        s.push(Start::Elongated);
    }
    s
}

fn initial_shape(start: Start, cfg: &OptimizerConfig, rng: &mut ChaCha8Rng) -> Result<ConvexPolygon<f64>> {
    let p = match start {
        // The finest admissible polygon keeps the ball start within 1e-3 of the disk.
        Start::Ball => ConvexPolygon::regular(cfg.max_vertices, [0.0, 0.0], 1.0)?,
        Start::Box4 => ConvexPolygon::rectangle([-1.0, -0.25], 2.0, 0.5)?,
        Start::RandomHull => {
            let pts: Vec<Point2<f64>> = (0..20)
                .map(|_| {
                    let rho = rng.random_range(0.0f64..1.0).sqrt();
                    let t = rng.random_range(0.0..std::f64::consts::TAU);
                    [rho * t.cos(), rho * t.sin()]
                })
                .collect();
            ConvexPolygon::hull(&pts)?
        }
        Start::Elongated => {
            // Comparison cylinder of length L(m) = m^{exponent}.
            let l = cfg.m.powf(elongation_exponent(cfg.n, cfg.alpha)).max(1.0);
            ConvexPolygon::rectangle([-0.5 * l, -0.5 / l], l, 1.0 / l)?
        }
    };
    normalize(&p)
}

/// Unit area, centroid at the origin.
fn normalize(p: &ConvexPolygon<f64>) -> Result<ConvexPolygon<f64>> {
    let q = p.rescale_to_volume(1.0)?;
    let c = q.centroid();
    Ok(q.translated([-c[0], -c[1]]))
}

/// Draws a proposal from `p`; `None` if it degenerates.
fn propose(
    p: &ConvexPolygon<f64>,
    scale: f64,
    cfg: &OptimizerConfig,
    rng: &mut ChaCha8Rng,
) -> (ProposalKind, Option<ConvexPolygon<f64>>) {
    let u = p.principal_axis();
    let v = [-u[1], u[0]];
    let (eu, ev) = (p.extent(u), p.extent(v));
    let verts = p.vertices();
    let k = verts.len();
    let roll: f64 = rng.random_range(0.0..1.0);
    let mut gauss = || -> f64 { rng.sample(StandardNormal) };
    let (kind, pts): (ProposalKind, Vec<Point2<f64>>) = if roll < 0.1 && k < cfg.max_vertices {
        let i = (gauss().abs() * 1e9) as usize % k;
        let (a, b) = (verts[i], verts[(i + 1) % k]);
        let e = [b[0] - a[0], b[1] - a[1]];
        let len = e[0].hypot(e[1]);
        let nrm = [e[1] / len, -e[0] / len];
        let reach = (nrm[0] * u[0] + nrm[1] * u[1]).abs() * eu + (nrm[0] * v[0] + nrm[1] * v[1]).abs() * ev;
        let push = gauss().abs() * scale * reach;
        let mid = [0.5 * (a[0] + b[0]) + push * nrm[0], 0.5 * (a[1] + b[1]) + push * nrm[1]];
        let mut pts = verts.to_vec();
        pts.insert(i + 1, mid);
        (ProposalKind::Insert, pts)
    } else if roll < 0.2 && k > cfg.min_vertices {
        let i = (gauss().abs() * 1e9) as usize % k;
        let mut pts = verts.to_vec();
        pts.remove(i);
        (ProposalKind::Delete, pts)
    } else if roll < 0.3 {
        let f = (scale * gauss()).exp();
        let pts = verts
            .iter()
            .map(|&x| {
                let t = (f - 1.0) * (x[0] * u[0] + x[1] * u[1]);
                [x[0] + t * u[0], x[1] + t * u[1]]
            })
            .collect();
        (ProposalKind::Stretch, pts)
    } else {
        let i = (gauss().abs() * 1e9) as usize % k;
        let (du, dv) = (gauss() * scale * eu, gauss() * scale * ev);
        let mut pts = verts.to_vec();
        pts[i] = [pts[i][0] + du * u[0] + dv * v[0], pts[i][1] + du * u[1] + dv * v[1]];
        (ProposalKind::Move, pts)
    };
    let shape = ConvexPolygon::hull(&pts).ok().and_then(|h| normalize(&h).ok());
    (kind, shape)
}

struct RestartResult {
    best: CandidateShape,
    records: Vec<TraceRecord>,
}

fn anneal(restart: usize, cfg: &OptimizerConfig) -> Result<RestartResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(restart as u64);
    let list = starts(cfg);
    let start = list[restart % list.len()];
    let mut current = total_energy(&initial_shape(start, cfg, &mut rng)?, cfg)?;
    let mut best = current.clone();
    let mut records = Vec::with_capacity(cfg.schedule.steps + 1);
    records.push(TraceRecord {
        restart,
        step: 0,
        kind: ProposalKind::Start,
        accepted: true,
        energy: Some(current.total),
        best: best.total,
    });
    let mut temperature = cfg.schedule.initial_temperature;
    let mut last_gain = 0usize;
    for step in 1..=cfg.schedule.steps {
        // Step size shrinks with the fourth root of the temperature ratio.
        let ratio = if cfg.schedule.initial_temperature > 0.0 {
            (temperature / cfg.schedule.initial_temperature).powf(0.25)
        } else {
            1.0
        };
        let scale = cfg.proposal_scale * ratio.max(0.02);
        let (kind, proposal) = propose(&current.polygon, scale, cfg, &mut rng);
        let candidate = match proposal {
            Some(p) => total_energy(&p, cfg).ok(),
            None => None,
        };
        let threshold: f64 = rng.random_range(0.0..1.0);
        let mut accepted = false;
        let energy = candidate.as_ref().map(|c| c.total);
        if let Some(c) = candidate {
            let delta = c.total - current.total;
            let t = temperature * current.total.abs();
            // Equal energies keep the incumbent.
            accepted = delta < 0.0 || (delta > 0.0 && t > 0.0 && threshold < (-delta / t).exp());
            if accepted {
                if c.total < best.total {
                    if best.total - c.total > cfg.tolerance * best.total.abs() {
                        last_gain = step;
                    }
                    best = c.clone();
                }
                current = c;
            }
        }
        records.push(TraceRecord { restart, step, kind, accepted, energy, best: best.total });
        temperature *= cfg.schedule.decay;
        if cfg.patience > 0 && step - last_gain >= cfg.patience {
            break;
        }
    }
    Ok(RestartResult { best, records })
}

/// Anneals from every restart in parallel and returns the best shape; ties
/// go to the lower restart index.
pub fn minimize(cfg: &OptimizerConfig) -> Result<(CandidateShape, OptimizationTrace)> {
    cfg.validate()?;
    let results: Vec<Result<RestartResult>> = (0..cfg.restarts).into_par_iter().map(|k| anneal(k, cfg)).collect();
    let mut best: Option<(usize, CandidateShape)> = None;
    let mut records = Vec::new();
    let mut first_error = None;
    for (k, res) in results.into_iter().enumerate() {
        match res {
            Ok(r) => {
                if best.as_ref().is_none_or(|(_, b)| r.best.total < b.total) {
                    best = Some((k, r.best));
                }
                records.extend(r.records);
            }
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    let (best_restart, shape) = best.ok_or_else(|| {
        Error::OptimizerFailure(format!(
            "no restart produced a valid shape: {}",
            first_error.map(|e| e.to_string()).unwrap_or_default()
        ))
    })?;
    let trace = OptimizationTrace {
        records,
        best_energy: shape.total,
        best_restart,
        seed: cfg.seed,
        config_hash: cfg.hash(),
    };
    Ok((shape, trace))
}
