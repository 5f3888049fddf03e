//! Family-wide runs of the verification checks, with CSV and JSON reports.
//!
//! Deficit CSV columns: `id, method, r, radius, per_r_shape, per_r_ball,
//! deficit, asymmetry, min_factor, implied_constant, proof_constant`.
//! Bound CSV columns: `id, kind, lhs, rhs, observed_constant, asymmetry`.
//! Scatter CSV columns: `id, x, y` with `x = asymmetry^2` and `y = deficit`.
//! Empty cells mean "undefined".

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    check_bm_quantitative, check_convex_bounds, cylinder_energy_bounds, isoperimetric_deficit, potential_gap,
    BoundKind, BoundRecord, DeficitRecord, Family, Shape,
};
use crate::error::{invalid, Error, Result};
use crate::riesz::lipschitz_gap_constant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Iso,
    Bm,
    Bounds,
    Cylinder,
    PotentialGap,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Iso, Suite::Bm, Suite::Bounds, Suite::Cylinder, Suite::PotentialGap];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Iso => "iso",
            Suite::Bm => "bm",
            Suite::Bounds => "bounds",
            Suite::Cylinder => "cylinder",
            Suite::PotentialGap => "potential-gap",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite {s:?}")))
    }
}

/// Parameters of a suite run. Every field has a default, so a config file
/// only needs the fields it changes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub family: Family,
    pub seed: u64,
    pub trials: usize,
    pub r: f64,
    pub alpha: f64,
    /// Grid spacing for grid-path shapes; `None` picks one from `r` and `R`.
    pub h: Option<f64>,
    /// Allowed negative slack of the inequalities. A negative value demands
    /// strict positivity and is useful to exercise the failure path.
    pub tolerance: f64,
    /// Dimension of the cylinder suite.
    pub n: usize,
    /// Cylinder lengths; `trials` lengths `4 * 2^t` when empty.
    pub lengths: Vec<f64>,
    /// Allowed spread `(max - min) / (max + min)` of the cylinder constants.
    pub stability: f64,
    /// `|lhs|` below this counts as Brunn-Minkowski equality.
    pub equality_threshold: f64,
    /// Asymmetry below which equality is admissible.
    pub equality_asymmetry: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            family: Family::RandomHulls,
            seed: 42,
            trials: 200,
            r: 0.1,
            alpha: 0.5,
            h: None,
            tolerance: 1e-3,
            n: 2,
            lengths: Vec::new(),
            stability: 0.2,
            equality_threshold: 1e-2,
            equality_asymmetry: 0.1,
        }
    }
}

/// A failed check, with the shape for replay when there is one.
#[derive(Clone, Debug)]
pub struct Violation {
    pub trial: Option<usize>,
    pub id: String,
    pub message: String,
    pub shape: Option<Shape>,
}

/// JSON summary of a run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub family: String,
    pub seed: u64,
    pub trials: usize,
    pub min_constant: Option<f64>,
    pub violations: usize,
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: Suite,
    pub config: SuiteConfig,
    pub deficits: Vec<DeficitRecord>,
    pub bounds: Vec<BoundRecord>,
    /// Suite-specific headline constant: the smallest implied constant (iso),
    /// observed constant (bm), pointwise Riesz ratio (bounds), `Φ L^α`
    /// (cylinder), or slack `C * rhs / lhs` (potential-gap).
    pub min_constant: Option<f64>,
    pub violations: Vec<Violation>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn summary(&self) -> SuiteSummary {
        let family = match self.suite {
            Suite::Cylinder => "cylinders".to_string(),
            _ => self.config.family.name().to_string(),
        };
        SuiteSummary {
            family,
            seed: self.config.seed,
            trials: self.config.trials,
            min_constant: self.min_constant,
            violations: self.violations.len(),
        }
    }

    pub fn write_deficits_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        if self.deficits.is_empty() {
            out.write_record([
                "id",
                "method",
                "r",
                "radius",
                "per_r_shape",
                "per_r_ball",
                "deficit",
                "asymmetry",
                "min_factor",
                "implied_constant",
                "proof_constant",
            ])?;
        }
        for d in &self.deficits {
            out.serialize(d)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_bounds_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        if self.bounds.is_empty() {
            out.write_record(["id", "kind", "lhs", "rhs", "observed_constant", "asymmetry"])?;
        }
        for b in &self.bounds {
            out.serialize(b)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Deficit against squared asymmetry, one point per record.
    pub fn write_scatter_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["id", "x", "y"])?;
        for d in &self.deficits {
            out.write_record([d.id.clone(), (d.asymmetry * d.asymmetry).to_string(), d.deficit.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

fn min_of(values: impl Iterator<Item = f64>) -> Option<f64> {
    values.filter(|v| v.is_finite()).reduce(f64::min)
}

/// Runs `suite` over the configured family.
pub fn run_suite(suite: Suite, config: &SuiteConfig) -> Result<SuiteReport> {
    if config.trials == 0 {
        return invalid("trials must be at least 1");
    }
    if !(config.r > 0.0) {
        return invalid("r must be positive");
    }
    let mut report = SuiteReport {
        suite,
        config: config.clone(),
        deficits: Vec::new(),
        bounds: Vec::new(),
        min_constant: None,
        violations: Vec::new(),
    };
    match suite {
        Suite::Cylinder => run_cylinder(config, &mut report)?,
        _ => run_family(suite, config, &mut report)?,
    }
    Ok(report)
}

fn run_family(suite: Suite, cfg: &SuiteConfig, report: &mut SuiteReport) -> Result<()> {
    let tol = cfg.tolerance;
    let gap_constant = match suite {
        Suite::PotentialGap => Some(lipschitz_gap_constant(2, cfg.alpha)?),
        _ => None,
    };
    let results: Vec<(Vec<DeficitRecord>, Vec<BoundRecord>, Vec<Violation>)> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| -> Result<_> {
            let (id, shape) = cfg.family.generate(cfg.seed, t, cfg.trials, cfg.r)?;
            let fail = |message: String| Violation { trial: Some(t), id: id.clone(), message, shape: Some(shape.clone()) };
            let mut violations = Vec::new();
            let mut deficits = Vec::new();
            let mut bounds = Vec::new();
            match suite {
                Suite::Iso => {
                    let d = isoperimetric_deficit(&id, &shape, cfg.r, cfg.h)?;
                    if d.deficit < -tol {
                        violations.push(fail(format!("negative deficit {}", d.deficit)));
                    }
                    deficits.push(d);
                }
                Suite::Bm => {
                    let b = check_bm_quantitative(&id, &shape, cfg.r, cfg.h)?;
                    let asym = b.asymmetry.unwrap_or(0.0);
                    if b.lhs < -tol {
                        violations.push(fail(format!("Brunn-Minkowski defect {} below zero", b.lhs)));
                    }
                    if b.lhs.abs() < cfg.equality_threshold && asym >= cfg.equality_asymmetry {
                        violations.push(fail(format!("near equality |lhs| = {} at asymmetry {asym}", b.lhs.abs())));
                    }
                    bounds.push(b);
                }
                Suite::Bounds => {
                    let Shape::Polytope(p) = &shape else {
                        return invalid(format!("the bounds suite needs convex shapes, family {} is not", cfg.family));
                    };
                    let recs = check_convex_bounds(&id, p, cfg.r, cfg.alpha, cfg.h)?;
                    for b in &recs {
                        match b.observed_constant {
                            Some(c) if c.is_finite() && c > 0.0 => {
                                if b.kind == BoundKind::Riesz1 && c < 1.0 {
                                    violations.push(fail(format!("pointwise Riesz bound ratio {c} < 1")));
                                }
                            }
                            other => violations.push(fail(format!("{} constant {other:?} not finite and positive", b.kind.as_str()))),
                        }
                    }
                    bounds.extend(recs);
                }
                Suite::PotentialGap => {
                    let b = potential_gap(&id, &shape, cfg.alpha, cfg.h)?;
                    let c = gap_constant.expect("set for this suite");
                    if b.lhs > c * b.rhs {
                        violations.push(fail(format!("gap {} exceeds {c} * {}", b.lhs, b.rhs)));
                    }
                    bounds.push(b);
                }
                Suite::Cylinder => unreachable!("handled separately"),
            }
            Ok((deficits, bounds, violations))
        })
        .collect::<Result<Vec<_>>>()?;
    for (d, b, v) in results {
        report.deficits.extend(d);
        report.bounds.extend(b);
        report.violations.extend(v);
    }
    report.min_constant = match suite {
        Suite::Iso => min_of(report.deficits.iter().filter_map(|d| d.implied_constant)),
        Suite::Bm => min_of(report.bounds.iter().filter_map(|b| b.observed_constant)),
        Suite::Bounds => {
            min_of(report.bounds.iter().filter(|b| b.kind == BoundKind::Riesz1).filter_map(|b| b.observed_constant))
        }
        Suite::PotentialGap => {
            let c = gap_constant.expect("set for this suite");
            min_of(report.bounds.iter().filter(|b| b.lhs > 0.0).map(|b| c * b.rhs / b.lhs))
        }
        Suite::Cylinder => None,
    };
    Ok(())
}

/// Spread `(max - min) / (max + min)` of positive values.
pub(crate) fn spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    (max - min) / (max + min)
}

fn run_cylinder(cfg: &SuiteConfig, report: &mut SuiteReport) -> Result<()> {
    let lengths: Vec<f64> = if cfg.lengths.is_empty() {
        (0..cfg.trials).map(|t| 4.0 * 2f64.powi(t as i32)).collect()
    } else {
        cfg.lengths.clone()
    };
    let pairs = lengths
        .par_iter()
        .map(|&l| cylinder_energy_bounds(l, cfg.r, cfg.alpha, cfg.n, cfg.h))
        .collect::<Result<Vec<_>>>()?;
    let mut per = Vec::new();
    let mut phi = Vec::new();
    for (a, b) in pairs {
        per.push(a.observed_constant.unwrap_or(f64::NAN));
        phi.push(b.observed_constant.unwrap_or(f64::NAN));
        report.bounds.push(a);
        report.bounds.push(b);
    }
    for (name, values) in [("Per_r / L^(1/(n-1))", &per), ("Phi * L^alpha", &phi)] {
        let s = spread(values);
        if !(s <= cfg.stability) {
            report.violations.push(Violation {
                trial: None,
                id: "cylinders".into(),
                message: format!("{name} spread {s:.4} exceeds {}: {values:?}", cfg.stability),
                shape: None,
            });
        }
    }
    report.min_constant = min_of(phi.iter().copied());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(family: Family, trials: usize) -> SuiteConfig {
        SuiteConfig { family, trials, ..SuiteConfig::default() }
    }

    #[test]
    fn iso_on_hulls_is_clean_and_ordered() {
        let rep = run_suite(Suite::Iso, &cfg(Family::RandomHulls, 12)).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.deficits.len(), 12);
        for (t, d) in rep.deficits.iter().enumerate() {
            assert_eq!(d.id, format!("random-hulls-{t}"));
        }
        assert!(rep.min_constant.unwrap() > 0.0);
        let again = run_suite(Suite::Iso, &cfg(Family::RandomHulls, 12)).unwrap();
        assert_eq!(rep.deficits, again.deficits);
    }

    #[test]
    fn negative_tolerance_forces_failure() {
        let c = SuiteConfig { tolerance: -1.0, ..cfg(Family::Boxes, 3) };
        let rep = run_suite(Suite::Iso, &c).unwrap();
        assert_eq!(rep.violations.len(), 3);
        assert!(rep.violations[0].shape.is_some());
    }

    #[test]
    fn reports_serialize() {
        let rep = run_suite(Suite::Bounds, &cfg(Family::ThinRectangles, 3)).unwrap();
        assert!(rep.passed());
        let mut buf = Vec::new();
        rep.write_bounds_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("id,kind,lhs,rhs,observed_constant,asymmetry\n"));
        assert_eq!(text.lines().count(), 1 + 12);
        let json = serde_json::to_value(rep.summary()).unwrap();
        assert_eq!(json["family"], "thin-rectangles");
        assert_eq!(json["violations"], 0);
        let mut buf = Vec::new();
        run_suite(Suite::Iso, &cfg(Family::Balls, 2)).unwrap().write_scatter_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("id,x,y\n"));
    }

    #[test]
    fn config_json_defaults() {
        let c: SuiteConfig = serde_json::from_str(r#"{"family": "ellipses", "trials": 5}"#).unwrap();
        assert_eq!(c.family, Family::Ellipses);
        assert_eq!(c.seed, 42);
        assert!(serde_json::from_str::<SuiteConfig>(r#"{"famly": "balls"}"#).is_err());
    }

    #[test]
    fn spread_definition() {
        assert!((spread(&[1.0, 1.5]) - 0.2).abs() < 1e-15);
    }
}
