//! Command implementations behind the `lensgeo` binary.
//!
//! Each command renders its whole output into a `String`, so the binary and
//! the tests share one code path. Numbers are written with the shortest
//! representation that round-trips.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lensgeo::cutlocus::{
    containment_audit, refine_tie, sample_kloc, sample_ksym, stratum_overlap, CutGrid, CutSample,
    DEFAULT_TIE_TOL,
};
use lensgeo::distance::BETA_EPS;
use lensgeo::oracle::{brute_force_distance, OracleGrid};
use lensgeo::sphere::{plan_with, PlanOptions, SpherePose};
use lensgeo::su2::{from_abc, to_abc};
use lensgeo::{
    distance_from_id, sample_geodesic, solve_geodesic, AbcCoords, Covector, Error, GroupElement,
};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

/// Prefix of environment variables that override tolerances.
pub const ENV_PREFIX: &str = "LENSGEO_";

pub mod exit {
    pub const OK: i32 = 0;
    /// Oracle disagreement above tolerance.
    pub const CHECK_FAILED: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const SOLVER: i32 = 3;
    pub const ORACLE: i32 = 4;
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Solver(String),
    Oracle(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Solver(_) => exit::SOLVER,
            CliError::Oracle(_) => exit::ORACLE,
            CliError::Io(_) => exit::CHECK_FAILED,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Solver(m) => write!(f, "solver error: {m}"),
            CliError::Oracle(m) => write!(f, "oracle error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(m) => CliError::Usage(m),
            Error::NotReached { .. } => CliError::Oracle(e.to_string()),
            other => CliError::Solver(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Parses a real number or a multiple of pi: `1.5`, `pi`, `-pi/2`, `3pi/4`,
/// `2*pi`.
pub fn parse_real(s: &str) -> std::result::Result<f64, String> {
    let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let lower = text.to_ascii_lowercase();
    let (num, den) = match lower.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (lower.as_str(), None),
    };
    let numerator = if let Some(head) = num.strip_suffix("pi") {
        let head = head.strip_suffix('*').unwrap_or(head);
        let factor = match head {
            "" | "+" => 1.0,
            "-" => -1.0,
            h => h.parse::<f64>().map_err(|_| format!("bad number `{s}`"))?,
        };
        factor * std::f64::consts::PI
    } else {
        num.parse::<f64>().map_err(|_| format!("bad number `{s}`"))?
    };
    let value = match den {
        Some(d) => {
            let d: f64 = d.parse().map_err(|_| format!("bad denominator in `{s}`"))?;
            if d == 0.0 {
                return Err(format!("zero denominator in `{s}`"));
            }
            numerator / d
        }
        None => numerator,
    };
    if !value.is_finite() {
        return Err(format!("`{s}` is not finite"));
    }
    Ok(value)
}

#[derive(Debug, Parser)]
#[command(name = "lensgeo", version, about = "Sub-Riemannian geometry of SU(2) and L(4,1), and the sphere planner")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Write the output here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Loc,
    Sym,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Distance from the identity and all minimizing geodesics.
    Dist(DistArgs),
    /// Samples of the geodesic with initial covector (theta, c).
    Geodesic(GeodesicArgs),
    /// Optimal curve between two sphere poses (a, b, xi).
    Plan(PlanArgs),
    /// Samples of the cut locus of [Id] in L(4,1).
    Cutlocus(CutlocusArgs),
    /// Compares the analytic distance with the brute-force oracle.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
pub struct DistArgs {
    #[arg(long, num_args = 2, value_names = ["RE", "IM"], value_parser = parse_real, allow_hyphen_values = true, requires = "beta")]
    pub alpha: Option<Vec<f64>>,
    #[arg(long, num_args = 2, value_names = ["RE", "IM"], value_parser = parse_real, allow_hyphen_values = true, requires = "alpha")]
    pub beta: Option<Vec<f64>>,
    #[arg(long, num_args = 3, value_names = ["A", "B", "C"], value_parser = parse_real, allow_hyphen_values = true, conflicts_with_all = ["alpha", "beta"])]
    pub abc: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct GeodesicArgs {
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    pub theta: f64,
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    pub c: f64,
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    pub t_max: f64,
    #[arg(long, default_value_t = 101)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[arg(long, num_args = 3, value_names = ["A", "B", "XI"], value_parser = parse_real, allow_hyphen_values = true)]
    pub from: Vec<f64>,
    #[arg(long, num_args = 3, value_names = ["A", "B", "XI"], value_parser = parse_real, allow_hyphen_values = true)]
    pub to: Vec<f64>,
    /// Minimum number of trajectory samples.
    #[arg(long, default_value_t = 1001)]
    pub n: usize,
    /// Also write the trajectory CSV here (with the JSON summary on the main output).
    #[arg(long)]
    pub trajectory: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CutlocusArgs {
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// Grid counts: one value for a cube, or three for (a, b, c).
    #[arg(long, num_args = 1..=3, default_values_t = [64])]
    pub grid: Vec<usize>,
    #[arg(long, value_parser = parse_real)]
    pub tie_tol: Option<f64>,
    /// Refine every sample again and report the audits on stderr.
    #[arg(long)]
    pub audit: bool,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Grid counts (theta, c, t).
    #[arg(long, num_args = 3, value_names = ["N_THETA", "N_C", "N_T"])]
    pub grid: Option<Vec<usize>>,
}

/// Tolerances with defaults, overridable from `LENSGEO_<NAME>`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances(BTreeMap<&'static str, f64>);

impl Tolerances {
    const DEFAULTS: [(&'static str, f64); 5] = [
        ("TIE_TOL", DEFAULT_TIE_TOL),
        ("CUSP_TOL", 1e-6),
        ("MAX_STEP", 1e-3),
        ("ORACLE_TOL", 2e-3),
        ("EPS_HIT", 5e-3),
    ];

    pub fn from_env() -> CliResult<Self> {
        Self::from_lookup(|k| std::env::var(k).ok())
    }

    pub fn from_lookup(lookup: impl Fn(&str) -> Option<String>) -> CliResult<Self> {
        let mut map = BTreeMap::new();
        for (name, default) in Self::DEFAULTS {
            let key = format!("{ENV_PREFIX}{name}");
            let value = match lookup(&key) {
                Some(raw) => parse_real(&raw).map_err(|e| CliError::Usage(format!("{key}: {e}")))?,
                None => default,
            };
            if !(value > 0.0) {
                return Err(CliError::Usage(format!("{key} must be positive")));
            }
            map.insert(name, value);
        }
        Ok(Self(map))
    }

    pub fn get(&self, name: &str) -> f64 {
        self.0[name]
    }
}

/// Formats a float with the shortest round-tripping decimal.
pub fn num(x: f64) -> String {
    // Debug output is shortest round-trip and switches to exponents for
    // very large or small magnitudes
    let mut buf = format!("{x:?}");
    if buf.ends_with(".0") {
        buf.truncate(buf.len() - 2);
    }
    buf
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn to_json(value: &impl Serialize) -> CliResult<String> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CliError::Io(e.to_string()))
}

fn unit_target(alpha: Complex64, beta: Complex64) -> CliResult<GroupElement> {
    let g = GroupElement::new(alpha, beta);
    if g.drift() > 1e-6 {
        return Err(CliError::Usage(format!(
            "|alpha|^2 + |beta|^2 = {} is not 1",
            g.norm_sqr()
        )));
    }
    Ok(g.normalized())
}

pub fn cmd_dist(args: &DistArgs) -> CliResult<String> {
    let g = match (&args.alpha, &args.beta, &args.abc) {
        (Some(a), Some(b), None) => unit_target(Complex64::new(a[0], a[1]), Complex64::new(b[0], b[1]))?,
        (None, None, Some(x)) => from_abc(&AbcCoords::new(x[0], x[1], x[2])),
        _ => return Err(CliError::Usage("give either --alpha and --beta, or --abc".into())),
    };
    let solutions = match solve_geodesic(&g) {
        Ok(s) => s,
        Err(Error::IdentityTarget) => Vec::new(),
        Err(e) => return Err(e.into()),
    };
    let distance = if solutions.is_empty() { 0.0 } else { distance_from_id(&g)? };
    let report = json!({
        "distance": distance,
        "solutions": solutions.iter().map(|s| json!({
            "theta": s.cov.theta,
            "c": s.cov.c,
            "t": s.t,
            "multiplicity": s.multiplicity,
        })).collect::<Vec<_>>(),
        "is_cut_point": !solutions.is_empty() && g.beta.norm() < BETA_EPS,
    });
    to_json(&report)
}

pub fn cmd_geodesic(args: &GeodesicArgs) -> CliResult<String> {
    if args.n < 2 {
        return Err(CliError::Usage("--n must be at least 2".into()));
    }
    if args.t_max < 0.0 {
        return Err(CliError::Usage("--t-max must be non-negative".into()));
    }
    let cov = Covector::new(args.theta, args.c);
    let rows = sample_geodesic(&cov, args.t_max, args.n).into_iter().map(|s| {
        let x = to_abc(&s.g);
        vec![
            num(s.t),
            num(s.g.alpha.re),
            num(s.g.alpha.im),
            num(s.g.beta.re),
            num(s.g.beta.im),
            num(x.a),
            num(x.b),
            num(x.c),
            num(s.u1),
            num(s.u2),
        ]
    });
    Ok(csv_text(
        &["t", "alpha_re", "alpha_im", "beta_re", "beta_im", "a", "b", "c", "u1", "u2"],
        rows,
    ))
}

fn pose(v: &[f64]) -> CliResult<SpherePose> {
    Ok(SpherePose::new(v[0], v[1], v[2])?)
}

/// JSON summary and trajectory CSV of a plan.
pub fn cmd_plan(args: &PlanArgs, tol: &Tolerances) -> CliResult<(String, String)> {
    let opts = PlanOptions {
        samples: args.n.max(2),
        max_step: tol.get("MAX_STEP"),
        cusp_tol: tol.get("CUSP_TOL"),
    };
    let r = plan_with(&pose(&args.from)?, &pose(&args.to)?, &opts)?;
    let summary = to_json(&json!({
        "length": r.length,
        "solutions_found": r.solutions_found,
        "chosen_rep": r.chosen_rep,
        "cusps": r.cusps,
        "covector": { "theta": r.cov.theta, "c": r.cov.c },
        "samples": r.samples.len(),
    }))?;
    let rows = r.samples.iter().map(|s| {
        vec![
            num(s.s),
            num(s.pose.a),
            num(s.pose.b),
            num(s.pose.xi),
            num(s.u1),
            num(s.u2),
            (s.cusp as u8).to_string(),
        ]
    });
    Ok((summary, csv_text(&["s", "a", "b", "xi", "u1", "u2", "cusp"], rows)))
}

pub const CUT_HEADER: [&str; 7] = ["a", "b", "c", "stratum", "gap", "witness1", "witness2"];

fn cut_grid(counts: &[usize]) -> CliResult<CutGrid> {
    let grid = match counts {
        [n] => CutGrid::cube(*n),
        [a, b, c] => CutGrid { n_a: *a, n_b: *b, n_c: *c },
        _ => return Err(CliError::Usage("--grid takes one or three counts".into())),
    };
    grid.validate()?;
    Ok(grid)
}

#[derive(Debug, Clone, Serialize)]
pub struct CutAuditReport {
    pub samples: usize,
    pub max_refined_gap: f64,
    pub max_moved: f64,
    pub lost_witness: usize,
    pub containment: lensgeo::cutlocus::ContainmentAudit,
    pub stratum_overlap: f64,
}

pub fn cut_audit(samples: &[CutSample]) -> CliResult<CutAuditReport> {
    let mut max_gap: f64 = 0.0;
    let mut max_moved: f64 = 0.0;
    let mut lost = 0;
    for s in samples.iter().filter(|s| s.stratum == lensgeo::Stratum::Ksym) {
        let a = refine_tie(s)?;
        max_gap = max_gap.max(a.refined_gap);
        max_moved = max_moved.max(a.moved);
        lost += usize::from(!a.still_closest);
    }
    Ok(CutAuditReport {
        samples: samples.len(),
        max_refined_gap: max_gap,
        max_moved,
        lost_witness: lost,
        containment: containment_audit(samples),
        stratum_overlap: stratum_overlap(samples, 1e-6),
    })
}

pub fn cut_samples(args: &CutlocusArgs, tol: &Tolerances) -> CliResult<Vec<CutSample>> {
    let grid = cut_grid(&args.grid)?;
    let tie_tol = args.tie_tol.unwrap_or(tol.get("TIE_TOL"));
    if !(tie_tol > 0.0) {
        return Err(CliError::Usage("--tie-tol must be positive".into()));
    }
    Ok(match args.mode {
        Mode::Loc => sample_kloc(2 * grid.n_c)?,
        Mode::Sym => sample_ksym(&grid, tie_tol)?,
    })
}

pub fn render_cut_samples(samples: &[CutSample], format: Format) -> CliResult<String> {
    let row = |s: &CutSample| {
        vec![
            num(s.point.abc.a),
            num(s.point.abc.b),
            num(s.point.abc.c),
            s.stratum.as_str().to_string(),
            num(s.gap),
            s.witness_pair[0].to_string(),
            s.witness_pair[1].to_string(),
        ]
    };
    match format {
        Format::Csv => Ok(csv_text(&CUT_HEADER, samples.iter().map(row))),
        Format::Json => to_json(
            &samples
                .iter()
                .map(|s| {
                    json!({
                        "a": s.point.abc.a,
                        "b": s.point.abc.b,
                        "c": s.point.abc.c,
                        "stratum": s.stratum,
                        "gap": s.gap,
                        "witness1": s.witness_pair[0],
                        "witness2": s.witness_pair[1],
                    })
                })
                .collect::<Vec<_>>(),
        ),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub trials: usize,
    pub seed: u64,
    pub max_abs_err: f64,
    pub mean_abs_err: f64,
    /// Trials whose error exceeds the tolerance.
    pub failures: usize,
    pub tolerance: f64,
}

pub fn oracle_report(args: &OracleArgs, tol: &Tolerances) -> CliResult<OracleReport> {
    if args.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let mut grid = match &args.grid {
        Some(n) => OracleGrid::with_counts(n[0], n[1], n[2]),
        None => OracleGrid::default(),
    };
    grid.eps_hit = tol.get("EPS_HIT");
    let limit = tol.get("ORACLE_TOL");
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut errors = Vec::with_capacity(args.trials);
    for _ in 0..args.trials {
        let g = GroupElement::random(&mut rng);
        let exact = distance_from_id(&g)?;
        let brute = brute_force_distance(&g, &grid)?;
        errors.push((exact - brute).abs());
    }
    Ok(OracleReport {
        trials: args.trials,
        seed: args.seed,
        max_abs_err: errors.iter().cloned().fold(0.0, f64::max),
        mean_abs_err: errors.iter().sum::<f64>() / errors.len() as f64,
        failures: errors.iter().filter(|&&e| e > limit).count(),
        tolerance: limit,
    })
}

/// Output of one invocation: main text, optional diagnostics for stderr, and
/// the exit code.
pub struct Outcome {
    pub text: String,
    pub diagnostics: Option<String>,
    pub code: i32,
}

pub fn run(cli: &Cli, tol: &Tolerances) -> CliResult<Outcome> {
    let ok = |text: String| Outcome {
        text,
        diagnostics: None,
        code: exit::OK,
    };
    let format = cli.common.format;
    let reject_csv = |what: &str| -> CliResult<()> {
        if format == Some(Format::Csv) {
            return Err(CliError::Usage(format!("{what} has no csv output")));
        }
        Ok(())
    };
    match &cli.command {
        Command::Dist(a) => {
            reject_csv("dist")?;
            Ok(ok(cmd_dist(a)?))
        }
        Command::Geodesic(a) => {
            if format == Some(Format::Json) {
                return Err(CliError::Usage("geodesic has no json output".into()));
            }
            Ok(ok(cmd_geodesic(a)?))
        }
        Command::Plan(a) => {
            let (summary, csv) = cmd_plan(a, tol)?;
            if let Some(path) = &a.trajectory {
                std::fs::write(path, &csv).map_err(|e| CliError::Io(e.to_string()))?;
            }
            Ok(ok(if format == Some(Format::Csv) { csv } else { summary }))
        }
        Command::Cutlocus(a) => {
            let samples = cut_samples(a, tol)?;
            let diagnostics = if a.audit {
                Some(to_json(&cut_audit(&samples)?)?)
            } else {
                None
            };
            Ok(Outcome {
                text: render_cut_samples(&samples, format.unwrap_or(Format::Csv))?,
                diagnostics,
                code: exit::OK,
            })
        }
        Command::Oracle(a) => {
            reject_csv("oracle")?;
            let report = oracle_report(a, tol)?;
            let code = if report.max_abs_err > report.tolerance {
                exit::CHECK_FAILED
            } else {
                exit::OK
            };
            Ok(Outcome {
                text: to_json(&report)?,
                diagnostics: None,
                code,
            })
        }
    }
}
