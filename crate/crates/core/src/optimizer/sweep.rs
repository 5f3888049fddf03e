//! Small-volume (ball) and large-volume (elongation) sweeps over `m`.

use serde::{Deserialize, Serialize};

use super::{elongation_exponent, exact_ball_energy, minimize, OptimizerConfig};
use crate::convex::radius_for_volume;
use crate::error::{invalid, Result};

/// Ball-detection threshold on the Fraenkel asymmetry.
pub const BALL_THRESHOLD: f64 = 0.03;
/// Threshold used when `α >= 0.9 (n - 1)`.
pub const RELAXED_BALL_THRESHOLD: f64 = 0.08;
/// Relative noise band of the monotonicity check.
pub const NOISE_BAND: f64 = 0.2;
/// Absolute floor of the noise band, below which asymmetries are noise.
pub const NOISE_FLOOR: f64 = 1e-3;
/// Slack of the energy comparison against the exact ball.
pub const ENERGY_SLACK: f64 = 1e-3;
/// Relative windows of the diameter and `λ_1` exponents.
pub const DIAMETER_WINDOW: f64 = 0.15;
pub const LAMBDA_WINDOW: f64 = 0.25;
/// Largest Hausdorff distance to the best ball accepted at the smallest `m`.
pub const HAUSDORFF_BALL: f64 = 0.05;

/// Which end of the volume range a sweep explores.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    Small,
    Large,
}

impl SweepMode {
    pub fn name(self) -> &'static str {
        match self {
            SweepMode::Small => "small",
            SweepMode::Large => "large",
        }
    }

    /// Volumes used when a configuration lists none.
    pub fn default_m_list(self) -> Vec<f64> {
        match self {
            SweepMode::Small => vec![1.0, 1e-1, 1e-2, 1e-3, 1e-4],
            SweepMode::Large => vec![1e2, 1e3, 1e4, 1e5],
        }
    }
}

/// On-disk sweep configuration: the volumes and the optimizer template.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Empty means the mode's default list.
    pub m_list: Vec<f64>,
    pub optimizer: OptimizerConfig,
}

/// Runs the sweep of the given mode.
pub fn run_sweep(mode: SweepMode, cfg: &SweepConfig) -> Result<SweepReport> {
    let m_list = if cfg.m_list.is_empty() { mode.default_m_list() } else { cfg.m_list.clone() };
    match mode {
        SweepMode::Small => small_volume_sweep(&m_list, &cfg.optimizer),
        SweepMode::Large => large_volume_sweep(&m_list, &cfg.optimizer),
    }
}

/// Least-squares line through `(log x, log y)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope (0 for two points).
    pub stderr: f64,
    pub points: usize,
}

impl Fit {
    pub fn log_log(points: &[(f64, f64)]) -> Option<Fit> {
        let pts: Vec<(f64, f64)> =
            points.iter().filter(|p| p.0 > 0.0 && p.1 > 0.0).map(|p| (p.0.ln(), p.1.ln())).collect();
        let k = pts.len();
        if k < 2 {
            return None;
        }
        let kf = k as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / kf;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / kf;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        if sxx == 0.0 {
            return None;
        }
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let stderr = if k > 2 {
            let sse: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
            (sse / (kf - 2.0) / sxx).sqrt()
        } else {
            0.0
        };
        Some(Fit { slope, intercept, stderr, points: k })
    }
}

/// One optimized volume.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub m: f64,
    pub asymmetry: f64,
    /// Hausdorff distance to the best-placed unit-area disk.
    pub hausdorff: f64,
    pub diam: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub per_r: f64,
    pub phi: f64,
    pub total: f64,
    pub ball_total: f64,
    /// `diam * m^{-exponent}` and `λ_1 * m^{-exponent}`: the rescaled segment.
    pub diam_hat: f64,
    pub lambda1_hat: f64,
    pub vertices: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub mode: &'static str,
    pub n: usize,
    pub alpha: f64,
    pub r: f64,
    pub rows: Vec<SweepRow>,
    /// `(n+1-α)/n` for the small sweep, the elongation exponent for the
    /// large one.
    pub target_exponent: f64,
    pub asymmetry_fit: Option<Fit>,
    pub diam_fit: Option<Fit>,
    pub lambda_fit: Option<Fit>,
    pub ball_threshold: f64,
    pub threshold_relaxed: bool,
    /// Largest `m` whose output is a ball within the threshold.
    pub largest_ball_m: Option<f64>,
    pub checks: Vec<Check>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for row in &self.rows {
            out.serialize(row)?;
        }
        out.flush()?;
        Ok(())
    }
}

fn check(name: &str, passed: bool, detail: String) -> Check {
    Check { name: name.to_string(), passed, detail }
}

fn sweep_guard(template: &OptimizerConfig) -> Result<()> {
    template.validate()?;
    let top = template.n as f64 - 1.0;
    if !(template.alpha < top) {
        return invalid(format!(
            "sweeps need alpha < n - 1 = {top} (got {}): large-volume elongation is proved only in that range",
            template.alpha
        ));
    }
    Ok(())
}

fn run(m_list: &[f64], template: &OptimizerConfig, exponent: f64) -> Result<Vec<SweepRow>> {
    let radius = radius_for_volume(1.0, template.n);
    m_list
        .iter()
        .map(|&m| {
            let cfg = OptimizerConfig { m, ..template.clone() };
            let (shape, _) = minimize(&cfg)?;
            let p = &shape.polygon;
            let profile = crate::convex::ConvexPolytope::Polygon(p.clone()).john_box();
            let diam = p.diameter();
            let scale = m.powf(-exponent);
            Ok(SweepRow {
                m,
                asymmetry: p.fraenkel_asymmetry().0,
                hausdorff: p.hausdorff_to_best_ball(radius).0,
                diam,
                lambda1: profile.lambdas[0],
                lambda2: profile.lambdas[1],
                per_r: shape.per_r,
                phi: shape.phi,
                total: shape.total,
                ball_total: exact_ball_energy(&cfg)?,
                diam_hat: diam * scale,
                lambda1_hat: profile.lambdas[0] * scale,
                vertices: p.len(),
            })
        })
        .collect()
}

fn energy_check(rows: &[SweepRow]) -> Check {
    let worst = rows.iter().map(|r| r.total - r.ball_total).fold(f64::NEG_INFINITY, f64::max);
    check("energy at most the ball's", worst <= ENERGY_SLACK, format!("max excess over the ball {worst:.3e}"))
}

/// Optimizes at each `m` (strictly decreasing) and checks that outputs
/// approach the ball.
pub fn small_volume_sweep(m_list: &[f64], template: &OptimizerConfig) -> Result<SweepReport> {
    sweep_guard(template)?;
    if m_list.is_empty() || m_list.windows(2).any(|w| !(w[1] < w[0])) {
        return invalid("small-volume sweep needs a non-empty, strictly decreasing m list");
    }
    let n = template.n as f64;
    let target = (n + 1.0 - template.alpha) / n;
    let relaxed = template.alpha >= 0.9 * (n - 1.0);
    let threshold = if relaxed { RELAXED_BALL_THRESHOLD } else { BALL_THRESHOLD };
    let rows = run(m_list, template, 0.0)?;

    let decaying: Vec<(f64, f64)> = rows.iter().filter(|r| r.asymmetry > threshold).map(|r| (r.m, r.asymmetry)).collect();
    let asymmetry_fit = Fit::log_log(&decaying);
    let mut checks = Vec::new();
    let last = rows.last().expect("non-empty");
    checks.push(check(
        "ball at smallest m",
        last.asymmetry <= threshold,
        format!("asymmetry {:.4e} at m = {} (threshold {threshold})", last.asymmetry, last.m),
    ));
    checks.push(check(
        "hausdorff to ball at smallest m",
        last.hausdorff <= HAUSDORFF_BALL,
        format!("d_H {:.4e} at m = {} (limit {HAUSDORFF_BALL})", last.hausdorff, last.m),
    ));
    let bumps: Vec<String> = rows
        .windows(2)
        .filter(|w| w[1].asymmetry > (1.0 + NOISE_BAND) * w[0].asymmetry + NOISE_FLOOR)
        .map(|w| format!("{} -> {}", w[0].m, w[1].m))
        .collect();
    checks.push(check("asymmetry nonincreasing as m decreases", bumps.is_empty(), format!("increases at {bumps:?}")));
    checks.push(match &asymmetry_fit {
        Some(f) => check("decay slope >= 0", f.slope >= 0.0, format!("slope {:.4} over {} points", f.slope, f.points)),
        None => check("decay slope >= 0", true, format!("fewer than 2 points above {threshold}; nothing to fit")),
    });
    checks.push(energy_check(&rows));
    let largest_ball_m = rows.iter().filter(|r| r.asymmetry <= threshold).map(|r| r.m).reduce(f64::max);
    Ok(SweepReport {
        mode: "small",
        n: template.n,
        alpha: template.alpha,
        r: template.r,
        rows,
        target_exponent: target,
        asymmetry_fit,
        diam_fit: None,
        lambda_fit: None,
        ball_threshold: threshold,
        threshold_relaxed: relaxed,
        largest_ball_m,
        checks,
    })
}

/// Optimizes at each `m` (strictly increasing) and fits the growth of the
/// diameter and the decay of `λ_1`.
pub fn large_volume_sweep(m_list: &[f64], template: &OptimizerConfig) -> Result<SweepReport> {
    sweep_guard(template)?;
    if m_list.len() < 2 || m_list.windows(2).any(|w| !(w[1] > w[0])) {
        return invalid("large-volume sweep needs at least two strictly increasing m values");
    }
    let target = elongation_exponent(template.n, template.alpha);
    let rows = run(m_list, template, target)?;
    let diam_fit = Fit::log_log(&rows.iter().map(|r| (r.m, r.diam)).collect::<Vec<_>>());
    let lambda_fit = Fit::log_log(&rows.iter().map(|r| (r.m, r.lambda1)).collect::<Vec<_>>());
    let mut checks = Vec::new();
    let (dlo, dhi) = ((1.0 - DIAMETER_WINDOW) * target, (1.0 + DIAMETER_WINDOW) * target);
    checks.push(match &diam_fit {
        Some(f) => check(
            "diameter exponent",
            f.slope >= dlo && f.slope <= dhi,
            format!("slope {:.4} ± {:.4}, window [{dlo:.4}, {dhi:.4}]", f.slope, 1.96 * f.stderr),
        ),
        None => check("diameter exponent", false, "no fit".into()),
    });
    let (llo, lhi) = (-(1.0 + LAMBDA_WINDOW) * target, -(1.0 - LAMBDA_WINDOW) * target);
    checks.push(match &lambda_fit {
        Some(f) => check(
            "lambda_1 exponent",
            f.slope >= llo && f.slope <= lhi,
            format!("slope {:.4} ± {:.4}, window [{llo:.4}, {lhi:.4}]", f.slope, 1.96 * f.stderr),
        ),
        None => check("lambda_1 exponent", false, "no fit".into()),
    });
    checks.push(energy_check(&rows));
    Ok(SweepReport {
        mode: "large",
        n: template.n,
        alpha: template.alpha,
        r: template.r,
        rows,
        target_exponent: target,
        asymmetry_fit: None,
        diam_fit,
        lambda_fit,
        ball_threshold: BALL_THRESHOLD,
        threshold_relaxed: false,
        largest_ball_m: None,
        checks,
    })
}
