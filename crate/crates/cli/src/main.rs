//! `minkperi`: measurements, verification suites, optimizer runs and sweeps.
//!
//! Exit codes: 0 success, 1 a mathematical check failed, 2 invalid input or
//! configuration, 3 resource or resolution limit.

use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use minkperi::convex::ConvexPolytope;
use minkperi::grid::{minkowski_perimeter, pgm};
use minkperi::optimizer::{minimize, run_sweep, OptimizerConfig, SweepConfig, SweepMode, BALL_THRESHOLD};
use minkperi::riesz::{polygon_energy, riesz_energy_fast, RieszKernel};
use minkperi::verification::{run_suite, Shape, Suite, SuiteConfig};
use minkperi::{Error, Result};

const EXIT_CHECK: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Parser)]
#[command(name = "minkperi", version, about = "Nonlocal perimeter and Riesz energy experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Volume, Per_r, Riesz energy, diameter and box profile of one shape.
    Measure(MeasureArgs),
    /// Run a verification suite over a seeded shape family.
    Verify(VerifyArgs),
    /// Minimize Per_r + m^{(n+1-α)/n} Φ_α over unit-area convex polygons.
    Optimize(OptimizeArgs),
    /// Optimize over a list of volumes and fit the scaling exponents.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct Common {
    /// JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Args)]
struct MeasureArgs {
    /// Polytope JSON or PGM grid.
    shape: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    r: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Grid spacing for polyhedra (default r / 4).
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    suite: SuiteArg,
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    h: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Iso,
    Bm,
    Bounds,
    Cylinder,
    PotentialGap,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Iso => Suite::Iso,
            SuiteArg::Bm => Suite::Bm,
            SuiteArg::Bounds => Suite::Bounds,
            SuiteArg::Cylinder => Suite::Cylinder,
            SuiteArg::PotentialGap => Suite::PotentialGap,
        }
    }
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    m: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Small,
    Large,
}

impl From<Mode> for SweepMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Small => SweepMode::Small,
            Mode::Large => SweepMode::Large,
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    config: Option<String>,
    seed: Option<u64>,
    output_dir: Option<String>,
    tool_version: &'static str,
    input_hashes: Vec<(String, String)>,
    timestamp: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_INPUT);
    }
    let outcome = match cli.command {
        Command::Measure(a) => cmd_measure(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Optimize(a) => cmd_optimize(a),
        Command::Sweep(a) => cmd_sweep(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECK),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InequalityViolation(_) | Error::OptimizerFailure(_) => EXIT_CHECK,
        Error::ResourceLimit(_) | Error::Resolution { .. } => EXIT_RESOURCE,
        _ => EXIT_INPUT,
    }
}

/// `MINKPERI_THREADS` caps the worker pool.
fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("MINKPERI_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::InvalidArgument(format!("MINKPERI_THREADS must be a positive integer (got {v:?})")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))
}

fn sha256_file(path: &Path) -> Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

/// Writes `manifest.json` into `out` (created first), before any result.
fn write_manifest(out: &Path, command: &str, config: Option<&Path>, seed: Option<u64>, inputs: &[&Path]) -> Result<()> {
    fs::create_dir_all(out)?;
    let input_hashes = inputs
        .iter()
        .map(|p| Ok((p.display().to_string(), sha256_file(p)?)))
        .collect::<Result<Vec<_>>>()?;
    let manifest = Manifest {
        command,
        config: config.map(|p| p.display().to_string()),
        seed,
        output_dir: Some(out.display().to_string()),
        tool_version: env!("CARGO_PKG_VERSION"),
        input_hashes,
        timestamp: chrono::Utc::now().to_rfc3339(),
    };
    write_json(&out.join("manifest.json"), &manifest)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    Ok(())
}

fn read_config<T: for<'de> Deserialize<'de> + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        Some(p) => Ok(serde_json::from_str(&fs::read_to_string(p)?)?),
        None => Ok(T::default()),
    }
}

fn output_dir(out: Option<PathBuf>, default: &str) -> PathBuf {
    out.unwrap_or_else(|| PathBuf::from(default))
}

fn load_shape(path: &Path) -> Result<Shape> {
    let bytes = fs::read(path)?;
    if bytes.starts_with(b"P5") {
        Ok(Shape::Grid(pgm::read_grid(BufReader::new(&bytes[..]))?))
    } else {
        let text = String::from_utf8(bytes).map_err(|_| Error::Parse("shape file is neither PGM nor UTF-8 JSON".into()))?;
        Ok(Shape::Polytope(ConvexPolytope::from_json(&text)?))
    }
}

fn cmd_measure(a: MeasureArgs) -> Result<bool> {
    let inputs = [a.shape.as_path()];
    if let Some(out) = &a.out {
        write_manifest(out, "measure", None, None, &inputs)?;
    }
    let shape = load_shape(&a.shape)?;
    let n = shape.dim();
    let volume = shape.volume();
    if !(volume > 0.0) {
        let report = json!({ "shape": a.shape.display().to_string(), "n": n, "volume": 0.0, "phi": 0.0 });
        println!("{}", serde_json::to_string_pretty(&report)?);
        return Err(Error::Degenerate("Per_r of an empty set is undefined".into()));
    }
    let (per_r, per_method, phi, phi_method, diameter, lambdas) = match &shape {
        Shape::Polytope(ConvexPolytope::Polygon(p)) => {
            let phi = if a.alpha < 2.0 { polygon_energy(p, a.alpha)? } else { f64::NAN };
            (p.minkowski_perimeter(a.r)?, "exact", phi, "exact", p.diameter(), p_lambdas(&shape))
        }
        Shape::Polytope(p) => {
            let h = a.h.unwrap_or(a.r / 4.0);
            let g = p.rasterize(h)?;
            let k = RieszKernel::for_grid(a.alpha, &g)?;
            (minkowski_perimeter(&g, a.r)?, "grid", riesz_energy_fast(&g, &k)?, "grid", p.diameter(), p_lambdas(&shape))
        }
        Shape::Grid(g) => {
            let k = RieszKernel::for_grid(a.alpha, g)?;
            (minkowski_perimeter(g, a.r)?, "grid", riesz_energy_fast(g, &k)?, "grid", g.occupied_diameter(), None)
        }
    };
    let lhs = phi * diameter.powf(a.alpha);
    let rhs = volume * volume;
    let passed = lhs >= rhs;
    let report = json!({
        "shape": a.shape.display().to_string(),
        "n": n,
        "r": a.r,
        "alpha": a.alpha,
        "volume": volume,
        "per_r": per_r,
        "per_r_method": per_method,
        "phi": phi,
        "phi_method": phi_method,
        "diameter": diameter,
        "lambdas": lambdas,
        "riesz_diameter_check": { "lhs": lhs, "rhs": rhs, "passed": passed },
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    if let Some(out) = &a.out {
        let mut w = csv::Writer::from_path(out.join("measure.csv"))?;
        w.write_record(["shape", "n", "r", "alpha", "volume", "per_r", "per_r_method", "phi", "phi_method", "diameter", "check_passed"])?;
        w.write_record([
            a.shape.display().to_string(),
            n.to_string(),
            a.r.to_string(),
            a.alpha.to_string(),
            volume.to_string(),
            per_r.to_string(),
            per_method.to_string(),
            phi.to_string(),
            phi_method.to_string(),
            diameter.to_string(),
            passed.to_string(),
        ])?;
        w.flush()?;
        write_json(&out.join("measure.json"), &report)?;
    }
    Ok(passed)
}

fn p_lambdas(shape: &Shape) -> Option<Vec<f64>> {
    match shape {
        Shape::Polytope(p) => Some(p.john_box().lambdas),
        Shape::Grid(_) => None,
    }
}

fn cmd_verify(a: VerifyArgs) -> Result<bool> {
    let suite: Suite = a.suite.into();
    let out = output_dir(a.common.out.clone(), &format!("minkperi-verify-{suite}"));
    let inputs: Vec<&Path> = a.common.config.iter().map(|p| p.as_path()).collect();
    let mut cfg: SuiteConfig = read_config(a.common.config.as_deref())?;
    if let Some(s) = a.common.seed {
        cfg.seed = s;
    }
    if let Some(t) = a.trials {
        cfg.trials = t;
    }
    if let Some(r) = a.common.r {
        cfg.r = r;
    }
    if let Some(al) = a.common.alpha {
        cfg.alpha = al;
    }
    if a.h.is_some() {
        cfg.h = a.h;
    }
    write_manifest(&out, &format!("verify {suite}"), a.common.config.as_deref(), Some(cfg.seed), &inputs)?;
    let report = run_suite(suite, &cfg)?;
    let records = fs::File::create(out.join("records.csv"))?;
    match suite {
        Suite::Iso => {
            report.write_deficits_csv(records)?;
            report.write_scatter_csv(fs::File::create(out.join("scatter.csv"))?)?;
        }
        _ => report.write_bounds_csv(records)?,
    }
    write_json(&out.join("summary.json"), &report.summary())?;
    if !report.violations.is_empty() {
        let dir = out.join("violations");
        fs::create_dir_all(&dir)?;
        for v in &report.violations {
            eprintln!("violation {}: {}", v.id, v.message);
            match &v.shape {
                Some(Shape::Polytope(p)) => fs::write(dir.join(format!("{}.json", v.id)), p.to_json())?,
                Some(Shape::Grid(g)) => pgm::write_grid(g, fs::File::create(dir.join(format!("{}.pgm", v.id)))?)?,
                None => {}
            }
        }
    }
    println!("{}", serde_json::to_string(&report.summary())?);
    Ok(report.passed())
}

fn cmd_optimize(a: OptimizeArgs) -> Result<bool> {
    let out = output_dir(a.common.out.clone(), "minkperi-optimize");
    let inputs: Vec<&Path> = a.common.config.iter().map(|p| p.as_path()).collect();
    let mut cfg: OptimizerConfig = read_config(a.common.config.as_deref())?;
    apply_overrides(&mut cfg, &a.common, a.m);
    cfg.validate()?;
    write_manifest(&out, "optimize", a.common.config.as_deref(), Some(cfg.seed), &inputs)?;
    let (shape, trace) = minimize(&cfg)?;
    let poly = ConvexPolytope::Polygon(shape.polygon.clone());
    fs::write(out.join("shape.json"), poly.to_json())?;
    trace.write_ndjson(fs::File::create(out.join("trace.ndjson"))?)?;
    let radius = minkperi::convex::radius_for_volume(1.0, 2);
    let asymmetry = shape.polygon.fraenkel_asymmetry().0;
    let result = json!({
        "m": cfg.m,
        "alpha": cfg.alpha,
        "r": cfg.r,
        "seed": cfg.seed,
        "config_hash": trace.config_hash,
        "best_restart": trace.best_restart,
        "per_r": shape.per_r,
        "phi": shape.phi,
        "total": shape.total,
        "ball_total": minkperi::optimizer::exact_ball_energy(&cfg)?,
        "asymmetry": asymmetry,
        "hausdorff": shape.polygon.hausdorff_to_best_ball(radius).0,
        "diameter": shape.polygon.diameter(),
        "lambdas": poly.john_box().lambdas,
        "vertices": shape.polygon.len(),
        "ball": asymmetry <= BALL_THRESHOLD,
    });
    write_json(&out.join("result.json"), &result)?;
    println!("{}", serde_json::to_string(&result)?);
    Ok(true)
}

fn apply_overrides(cfg: &mut OptimizerConfig, c: &Common, m: Option<f64>) {
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(r) = c.r {
        cfg.r = r;
    }
    if let Some(al) = c.alpha {
        cfg.alpha = al;
    }
    if let Some(m) = m {
        cfg.m = m;
    }
}

fn cmd_sweep(a: SweepArgs) -> Result<bool> {
    let mode: SweepMode = a.mode.into();
    let out = output_dir(a.common.out.clone(), &format!("minkperi-sweep-{}", mode.name()));
    let inputs: Vec<&Path> = a.common.config.iter().map(|p| p.as_path()).collect();
    let mut cfg: SweepConfig = read_config(a.common.config.as_deref())?;
    apply_overrides(&mut cfg.optimizer, &a.common, None);
    write_manifest(&out, &format!("sweep {}", mode.name()), a.common.config.as_deref(), Some(cfg.optimizer.seed), &inputs)?;
    let report = run_sweep(mode, &cfg)?;
    report.write_csv(fs::File::create(out.join("sweep.csv"))?)?;
    write_json(&out.join("sweep.json"), &report)?;
    for c in &report.checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    Ok(report.passed())
}
