//! The `tile` command line.
//!
//! Every subcommand builds a tiling, runs the verification harness on it and
//! prints a one-line summary. `--out` writes a JSON record holding the
//! parsed command verbatim next to the report, so `tile verify --report`
//! can replay the run and compare the result byte for byte (wall clock
//! excluded). Exit codes: 0 when every check passes, 1 when a check fails
//! or a file cannot be read or written, 2 for invalid flags or parameters.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::body::{build_body_tiling, ConvexBody, LayeredTiling, PeelConfig};
use crate::mazur::{transport_tiling, verify_moduli};
use crate::schauder::{NormalityConstants, SchauderConfig, SchauderTiling};
use crate::space::{NormKind, NormedSpace};
use crate::sphere::SphereTiling;
use crate::strip::{parse_rational, StripParams, Q};
use crate::svg::raster_tiling;
use crate::verify::{negative_controls, verify_tiling, CheckOutcome, VerificationReport, VerifyConfig};
use crate::voronoi::box_net_tiling;

/// Version of the JSON record written by `--out`.
pub const RECORD_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("construction failed: {0}")]
    Build(String),
    #[error("{path}: {message}")]
    File { path: PathBuf, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn build_err(e: impl std::fmt::Display) -> CliError {
    CliError::Build(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "tile", version, about = "Build and certify normal tilings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// A parsed command; serialised verbatim into every record.
#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Exact checks of the planar strip system and its constants.
    StripCheck(StripArgs),
    /// Voronoi tiling of a box from a greedy separated net.
    Voronoi(VoronoiArgs),
    /// Layered starshaped tiling of a ball in a space with a basis.
    Schauder(SchauderArgs),
    /// Slice tiling of the unit sphere.
    Sphere(SphereArgs),
    /// Slice peeling of the unit ball.
    Body(BodyArgs),
    /// Transport of a recorded ball or sphere tiling to ℓ₁ by the Mazur map.
    MazurTransport(MazurArgs),
    /// Replay a recorded run, or run the harness's negative controls.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    Lp,
    Sup,
    /// ℓ_p with the norm `max(‖x‖_p, 2 sup_k |x_k|)` used by the layered tiling.
    Renormed,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SpaceArgs {
    #[arg(long, value_enum, default_value_t = SpaceKind::Lp)]
    pub space: SpaceKind,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// Dimension; each command has its own default.
    #[arg(long)]
    pub dim: Option<usize>,
}

impl SpaceArgs {
    fn build(&self, default_dim: usize) -> Result<NormedSpace, CliError> {
        let dim = self.dim.unwrap_or(default_dim);
        let kind = match self.space {
            SpaceKind::Lp => NormKind::Lp { p: self.p },
            SpaceKind::Sup => NormKind::Sup,
            SpaceKind::Renormed => NormKind::RenormedLp { p: self.p },
        };
        NormedSpace::new(dim, kind).map_err(|e| usage(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct RunArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Verification samples of the tiled region.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Inner-radius probe directions per tile.
    #[arg(long, default_value_t = 100)]
    pub directions: usize,
    /// Membership tolerance of the probes; each command has its own default.
    #[arg(long)]
    pub tol: Option<f64>,
    /// JSON record path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// SVG picture path (planar tilings, and the 3-d sphere projection).
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

impl RunArgs {
    fn verify_config(&self, default_tol: f64, segment_points: usize) -> Result<VerifyConfig, CliError> {
        let tol = self.tol.unwrap_or(default_tol);
        if !(tol >= 0.0) {
            return Err(usage(format!("--tol must be non-negative, got {tol}")));
        }
        Ok(VerifyConfig { samples: self.samples, seed: self.seed, directions: self.directions, tol, segment_points })
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct StripArgs {
    /// Preset: fig1 or fig2.
    #[arg(long, default_value = "fig1")]
    pub params: String,
    /// Override of `a`, as "p/q".
    #[arg(long)]
    pub a: Option<String>,
    #[arg(long)]
    pub b: Option<String>,
    #[arg(long)]
    pub r: Option<String>,
    #[arg(long)]
    pub delta: Option<String>,
    /// Constants for an unconditional basis.
    #[arg(long)]
    pub unconditional: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct VoronoiArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[arg(long, default_value_t = 2.0)]
    pub separation: f64,
    /// The tiled region is the box `[-h, h]^n`.
    #[arg(long, default_value_t = 6.0)]
    pub half_width: f64,
    /// Segment points per sample for the starshapedness probe (0 skips it).
    #[arg(long, default_value_t = 0)]
    pub segment_points: usize,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SchauderArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[arg(long, default_value_t = 2)]
    pub depth: usize,
    #[arg(long, default_value = "fig1")]
    pub params: String,
    #[arg(long)]
    pub unconditional: bool,
    /// Radius of the verified ball.
    #[arg(long, default_value_t = 10.0)]
    pub radius: f64,
    /// Largest biorthogonal family per level.
    #[arg(long, default_value_t = 64)]
    pub family_cap: usize,
    /// Candidate directions per level for the family.
    #[arg(long, default_value_t = 4000)]
    pub candidates: usize,
    #[arg(long, default_value_t = 20)]
    pub segment_points: usize,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SphereArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[arg(long, default_value_t = 0.8)]
    pub eps: f64,
    /// Quasirandom sphere points offered to the greedy norming family.
    #[arg(long, default_value_t = 20_000)]
    pub candidates: usize,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct BodyArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[arg(long, default_value_t = 0.75)]
    pub eps: f64,
    /// Radius of a ball about the origin inside the body.
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    /// Quasirandom pool points per layer.
    #[arg(long, default_value_t = 100_000)]
    pub pool: usize,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct MazurArgs {
    /// Expected dimension of the source tiling.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Target exponent: 1 (Mazur map to ℓ₁) or 2 (identity).
    #[arg(long, default_value_t = 1.0)]
    pub q: f64,
    /// Record of a `body` or `sphere` run in ℓ₂.
    #[arg(long)]
    pub source_report: PathBuf,
    /// Random pairs for the modulus check.
    #[arg(long, default_value_t = 100_000)]
    pub pairs: usize,
    #[arg(long, default_value_t = 8)]
    pub moduli_dim: usize,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct VerifyArgs {
    /// Record to replay.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Run the harness on deliberately broken tilings.
    #[arg(long)]
    pub controls: bool,
    #[arg(long, default_value_t = 2_000)]
    pub control_samples: usize,
}

/// Result of one command, before anything is written.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub passed: bool,
    pub summary: String,
    pub report: Value,
    pub svg: Option<String>,
}

/// What `--out` writes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub version: u32,
    pub config: Command,
    pub passed: bool,
    pub summary: String,
    pub report: Value,
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli.command).and_then(|o| write_outputs(&cli.command, &o).map(|()| o)) {
        Ok(o) => {
            println!("{}", o.summary);
            if o.passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn outputs(cmd: &Command) -> (Option<&Path>, Option<&Path>) {
    match cmd {
        Command::StripCheck(a) => (a.out.as_deref(), a.svg.as_deref()),
        Command::Voronoi(a) => (a.run.out.as_deref(), a.run.svg.as_deref()),
        Command::Schauder(a) => (a.run.out.as_deref(), a.run.svg.as_deref()),
        Command::Sphere(a) => (a.run.out.as_deref(), a.run.svg.as_deref()),
        Command::Body(a) => (a.run.out.as_deref(), a.run.svg.as_deref()),
        Command::MazurTransport(a) => (a.run.out.as_deref(), a.run.svg.as_deref()),
        Command::Verify(_) => (None, None),
    }
}

fn without_outputs(cmd: &Command) -> Command {
    let mut c = cmd.clone();
    match &mut c {
        Command::StripCheck(a) => (a.out, a.svg) = (None, None),
        Command::Voronoi(a) => (a.run.out, a.run.svg) = (None, None),
        Command::Schauder(a) => (a.run.out, a.run.svg) = (None, None),
        Command::Sphere(a) => (a.run.out, a.run.svg) = (None, None),
        Command::Body(a) => (a.run.out, a.run.svg) = (None, None),
        Command::MazurTransport(a) => (a.run.out, a.run.svg) = (None, None),
        Command::Verify(_) => {}
    }
    c
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::File { path: path.to_path_buf(), message: e.to_string() })
}

fn write_outputs(cmd: &Command, o: &Outcome) -> Result<(), CliError> {
    let (out, svg) = outputs(cmd);
    if let Some(path) = out {
        let record = RunRecord {
            version: RECORD_VERSION,
            config: cmd.clone(),
            passed: o.passed,
            summary: o.summary.clone(),
            report: o.report.clone(),
        };
        let text = serde_json::to_string_pretty(&record).expect("record serialises");
        write_file(path, &text)?;
    }
    if let Some(path) = svg {
        match &o.svg {
            Some(text) => write_file(path, text)?,
            None => eprintln!("note: no picture for this tiling, {} not written", path.display()),
        }
    }
    Ok(())
}

pub fn read_record(path: &Path) -> Result<RunRecord, CliError> {
    let file = |message: String| CliError::File { path: path.to_path_buf(), message };
    let text = fs::read_to_string(path).map_err(|e| file(e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| file(e.to_string()))
}

/// Runs a command without writing anything.
pub fn execute(cmd: &Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::StripCheck(a) => strip_check(a),
        Command::Voronoi(a) => voronoi(a),
        Command::Schauder(a) => schauder(a),
        Command::Sphere(a) => sphere(a),
        Command::Body(a) => body(a),
        Command::MazurTransport(a) => mazur_transport(a),
        Command::Verify(a) => verify(a),
    }
}

fn finish(mut report: VerificationReport, checks: Vec<CheckOutcome>, extra: Value, svg: Option<String>) -> Outcome {
    for c in checks {
        report.push_check(c);
    }
    let mut summary = report.summary();
    if let Some(c) = report.checks.iter().find(|c| !c.passed) {
        summary.push_str(&format!("; first failing check: {}", c.line()));
    }
    let mut value = serde_json::to_value(&report).expect("report serialises");
    value["construction"] = extra;
    Outcome { passed: report.passed, summary, report: value, svg }
}

fn strip_check(a: &StripArgs) -> Result<Outcome, CliError> {
    let mut p = StripParams::preset(&a.params).map_err(|e| usage(e.to_string()))?;
    let mut tag = a.params.clone();
    for (flag, value, slot) in [
        ("a", &a.a, &mut p.a),
        ("b", &a.b, &mut p.b),
        ("r", &a.r, &mut p.r),
        ("delta", &a.delta, &mut p.delta),
    ] {
        if let Some(text) = value {
            *slot = parse_rational(text).map_err(|e| usage(format!("--{flag}: {e}")))?;
            tag.push_str(&format!(" {flag}={text}"));
        }
    }
    if p.r <= Q::zero() || p.delta <= Q::zero() {
        return Err(usage("r and delta must be positive"));
    }
    let conditions = p.check_fact_conditions();
    let constants = NormalityConstants::from_params(&p, &tag, a.unconditional);
    let y_extent = 2.0 * p.to_f64().outer_y + 1.0;
    Ok(Outcome {
        passed: conditions.all(),
        summary: format!("{}; {}", conditions.summary(), constants.summary()),
        report: json!({ "params": p, "conditions": conditions, "constants": constants }),
        svg: Some(p.to_f64().render_svg(y_extent)),
    })
}

fn voronoi(a: &VoronoiArgs) -> Result<Outcome, CliError> {
    let space = a.space.build(2)?;
    if !(a.separation > 0.0 && a.half_width > 0.0) {
        return Err(usage("--separation and --half-width must be positive"));
    }
    let t = box_net_tiling(space, a.half_width, a.separation, a.run.seed).map_err(build_err)?;
    let report = verify_tiling(&t, &a.run.verify_config(crate::verify::DEFAULT_TOL, a.segment_points)?);
    let sep = t.net.min_pairwise_distance(&space);
    let checks = vec![CheckOutcome::at_least("net separation", a.separation * (1.0 - 1e-12), [(sep, vec![])])];
    let h = a.half_width;
    let svg = raster_tiling(&t, (-h, -h), (h, h), 300);
    Ok(finish(report, checks, json!({ "centres": t.len(), "separation": sep }), svg))
}

fn schauder(a: &SchauderArgs) -> Result<Outcome, CliError> {
    let space = a.space.build(6)?;
    if !matches!(a.params.as_str(), "fig1" | "fig2") {
        return Err(usage(format!("unknown --params {}", a.params)));
    }
    if a.depth + 2 > space.dim() {
        return Err(usage(format!("--depth {} needs --dim at least {}", a.depth, a.depth + 2)));
    }
    if !(a.radius > 0.0) {
        return Err(usage("--radius must be positive"));
    }
    let mut config = SchauderConfig::new(space, a.depth, &a.params);
    config.unconditional = a.unconditional;
    config.seed = a.run.seed;
    config.region_radius = a.radius;
    config.family_cap = a.family_cap;
    config.candidates = a.candidates;
    let t = SchauderTiling::build(config).map_err(build_err)?;
    let report = verify_tiling(&t, &a.run.verify_config(1e-6, a.segment_points)?);
    let checks: Vec<CheckOutcome> = t
        .levels
        .iter()
        .flat_map(|level| level.w_level_bounds(&t.constants, 5 * a.run.directions, a.run.seed))
        .collect();
    let extra = json!({ "constants": t.constants, "summary": t.constants.summary() });
    let mut o = finish(report, checks, extra, None);
    o.summary.push_str(&format!("; constants {}", t.constants.summary()));
    Ok(o)
}

fn build_sphere(a: &SphereArgs) -> Result<SphereTiling, CliError> {
    let space = a.space.build(4)?;
    if !(a.eps > 0.0 && a.eps < 1.0) {
        return Err(usage(format!("--eps must lie in (0, 1), got {}", a.eps)));
    }
    SphereTiling::build(space, a.eps, a.candidates, a.run.seed).map_err(build_err)
}

fn sphere(a: &SphereArgs) -> Result<Outcome, CliError> {
    let t = build_sphere(a)?;
    let report = verify_tiling(&t, &a.run.verify_config(crate::verify::DEFAULT_TOL, 0)?);
    let extra = json!({
        "params": t.params,
        "family": t.family.len(),
        "tiles": t.len(),
        "certified_tiles": t.certified_tiles(),
        "degenerate_tiles": t.degenerate_tiles(),
    });
    let svg = t.render_svg(20_000, a.run.seed);
    Ok(finish(report, t.construction_checks(), extra, svg))
}

fn build_body(a: &BodyArgs) -> Result<LayeredTiling, CliError> {
    let space = a.space.build(3)?;
    if !(a.eps > 0.0 && a.eps < 1.0) {
        return Err(usage(format!("--eps must lie in (0, 1), got {}", a.eps)));
    }
    if !(a.eta > 0.0 && a.eta <= 1.0) {
        return Err(usage(format!("--eta must lie in (0, 1], got {}", a.eta)));
    }
    let mut c = ConvexBody::unit_ball(space);
    c.eta = a.eta;
    let cfg = PeelConfig { pool: a.pool, seed: a.run.seed, ..PeelConfig::default() };
    build_body_tiling(&c, a.eps, &cfg).map_err(build_err)
}

fn body(a: &BodyArgs) -> Result<Outcome, CliError> {
    let t = build_body(a)?;
    let report = verify_tiling(&t, &a.run.verify_config(crate::verify::DEFAULT_TOL, 0)?);
    let checks = t.construction_checks(a.run.directions, a.run.seed);
    let extra = json!({
        "slices": t.slices.len(),
        "layers": t.layers,
        "delta": t.delta,
        "gamma": t.gamma,
        "rho": t.rho,
        "eps": t.eps,
    });
    let svg = t.render_svg(300);
    Ok(finish(report, checks, extra, svg))
}

fn mazur_transport(a: &MazurArgs) -> Result<Outcome, CliError> {
    if a.q != 1.0 && a.q != 2.0 {
        return Err(usage(format!("--q must be 1 or 2, got {}", a.q)));
    }
    let record = read_record(&a.source_report)?;
    let check_dim = |dim: usize| match a.dim {
        Some(d) if d != dim => Err(usage(format!("--dim {d} but the source tiling has dimension {dim}"))),
        _ => Ok(()),
    };
    let cfg = a.run.verify_config(crate::verify::DEFAULT_TOL, 0)?;
    let (report, extra) = match &record.config {
        Command::Body(b) => {
            let source = build_body(b)?;
            check_dim(source.body.space.dim())?;
            let (rho, eps) = (source.rho, source.eps);
            let t = transport_tiling(source, a.q, rho, eps).map_err(build_err)?;
            (verify_tiling(&t, &cfg), json!({ "source": "body", "rho_in": t.rho_in, "eps_in": t.eps_in, "rho": t.rho, "outer": t.outer }))
        }
        Command::Sphere(s) => {
            let source = build_sphere(s)?;
            check_dim(source.space.dim())?;
            let (rho, eps) = (source.params.rho, source.params.eps);
            let t = transport_tiling(source, a.q, rho, eps).map_err(build_err)?;
            (verify_tiling(&t, &cfg), json!({ "source": "sphere", "rho_in": t.rho_in, "eps_in": t.eps_in, "rho": t.rho, "outer": t.outer }))
        }
        other => {
            let name = serde_json::to_value(other).ok().and_then(|v| v["command"].as_str().map(String::from));
            return Err(usage(format!("source record is a {} run; need body or sphere", name.unwrap_or_default())));
        }
    };
    let moduli = verify_moduli(a.moduli_dim, a.pairs, a.run.seed).map_err(build_err)?;
    let checks = vec![CheckOutcome::flag("mazur moduli and round trip", moduli.passed(), moduli.witness.clone().map(|(f, g)| [f, g].concat()))];
    let mut extra = extra;
    extra["moduli"] = serde_json::to_value(&moduli).expect("moduli serialise");
    Ok(finish(report, checks, extra, None))
}

/// The record with its wall-clock field removed, as compact JSON.
fn canonical(v: &Value) -> String {
    let mut v = v.clone();
    if let Some(obj) = v.as_object_mut() {
        obj.remove("wall_clock_ms");
    }
    v.to_string()
}

fn verify(a: &VerifyArgs) -> Result<Outcome, CliError> {
    if a.report.is_none() && !a.controls {
        return Err(usage("verify needs --report PATH or --controls"));
    }
    let mut checks = Vec::new();
    let mut lines = Vec::new();
    let mut report = json!({});
    if let Some(path) = &a.report {
        let record = read_record(path)?;
        if matches!(record.config, Command::Verify(_)) {
            return Err(usage("cannot replay a verify record"));
        }
        let replay = execute(&without_outputs(&record.config))?;
        let identical = canonical(&replay.report) == canonical(&record.report);
        checks.push(CheckOutcome::flag("replay reproduces the record", identical, None));
        checks.push(CheckOutcome::flag("replayed run passes", replay.passed, None));
        lines.push(format!(
            "replay {}: {}",
            if identical { "identical" } else { "differs" },
            replay.summary
        ));
        report["replay"] = replay.report;
    }
    if a.controls {
        let controls = negative_controls(a.control_samples, 0);
        lines.push(format!(
            "negative controls {}",
            if controls.iter().all(|c| c.passed) { "flagged" } else { "NOT flagged" }
        ));
        checks.extend(controls);
    }
    let passed = checks.iter().all(|c| c.passed);
    report["checks"] = serde_json::to_value(&checks).expect("checks serialise");
    Ok(Outcome { passed, summary: lines.join("; "), report, svg: None })
}
