//! Command-line front end: `table1`, `sample`, `kernel-check` and `privacy`.
//!
//! Every flag may also come from a JSON config file (`--config`) whose keys
//! are the flag names with underscores; flags win over the file. Points are
//! comma-separated reals without spaces (`--theta 0.5,0`).
//!
//! Relative `--output` paths are resolved against `$HARMONIC_OUTPUT_DIR` when
//! it is set. Each output file gets a `<file>.meta.json` sidecar recording the
//! tool version, seed and resolved configuration.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ball_exact::{kernel_normalization, second_moment_quadrature, theoretical_trace, QuadratureRule};
use crate::brownian::Overshoot;
use crate::error::Error;
use crate::geometry::{Ball, BoxDomain, Domain, Point};
use crate::privacy::{curve_table, privacy_curve, CloakScenario};
use crate::report::{fmt_exact, fmt_opt, Table};
use crate::sampler::{sample_batch, Method, SamplerSettings};
use crate::stats::{compare, comparison_table, reproduce_table1, summarize, RowLabel, Table1Config, Verdict};

pub const OUTPUT_DIR_ENV: &str = "HARMONIC_OUTPUT_DIR";

/// Normalisation tolerance for deterministic quadrature rules.
pub const QUADRATURE_TOL: f64 = 1e-6;
/// Normalisation tolerance for the Monte Carlo rule.
pub const MONTE_CARLO_TOL: f64 = 5e-3;

#[derive(Debug, Error)]
pub enum CliError {
    /// Rejected by the argument parser; also carries `--help`/`--version` output.
    #[error("{0}")]
    Parse(#[from] clap::Error),
    #[error("{0}")]
    Usage(String),
    #[error("--{flag}: {source}")]
    Invalid {
        flag: &'static str,
        #[source]
        source: Error,
    },
    #[error("config file {}: {message}", path.display())]
    Config { path: PathBuf, message: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Run(#[from] Error),
}

#[derive(Debug, Parser)]
#[command(name = "harmonic", version, about = "Monte Carlo sampling of harmonic measure")]
struct Cli {
    #[command(subcommand)]
    command: CommandArgs,
}

#[derive(Debug, Subcommand)]
enum CommandArgs {
    /// Reproduce the nine reference mean/trace settings on the unit ball
    Table1(Options),
    /// Sample exits from one ball or box and compare with theory
    Sample(Options),
    /// Check the Poisson kernel integrates to one
    KernelCheck(Options),
    /// Evaluate the sample-mean attack on a cloaked start location
    Privacy(Options),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Text,
}

/// Raw, unvalidated options shared by flags and config files.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
struct Options {
    /// JSON file with defaults for any of the flags
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (stdout when absent)
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads (does not change results)
    #[arg(long)]
    threads: Option<usize>,
    /// brownian, wos or exact
    #[arg(long)]
    method: Option<Method>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    /// intersect or project-first-outside
    #[arg(long)]
    overshoot: Option<Overshoot>,
    /// Walk-on-spheres shell width relative to the domain diameter
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    step_fraction: Option<f64>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    center: Option<Point>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    lower: Option<Point>,
    #[arg(long, allow_hyphen_values = true)]
    upper: Option<Point>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<Point>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    house: Option<Point>,
    /// Comma-separated list of trip counts
    #[arg(long, value_delimiter = ',')]
    trips: Option<Vec<usize>>,
    #[arg(long)]
    replications: Option<usize>,
}

macro_rules! overlay {
    ($flags:expr, $file:expr, $($field:ident),* $(,)?) => {
        Options {
            config: $flags.config,
            $($field: $flags.$field.or($file.$field),)*
        }
    };
}

macro_rules! present {
    ($opts:expr, $($field:ident),* $(,)?) => {
        vec![$(($opts.$field.is_some(), stringify!($field)),)*]
    };
}

impl Options {
    fn overlay(self, file: Options) -> Options {
        overlay!(
            self, file, seed, output, format, threads, method, n, dt, overshoot, epsilon,
            step_fraction, dim, center, radius, lower, upper, theta, rho, resolution, house,
            trips, replications,
        )
    }

    fn present(&self) -> Vec<(bool, &'static str)> {
        present!(
            self, seed, output, format, threads, method, n, dt, overshoot, epsilon,
            step_fraction, dim, center, radius, lower, upper, theta, rho, resolution, house,
            trips, replications,
        )
    }

    fn reject_unused(&self, command: &str, allowed: &[&str]) -> Result<(), CliError> {
        const COMMON: [&str; 4] = ["seed", "output", "format", "threads"];
        for (set, name) in self.present() {
            if set && !COMMON.contains(&name) && !allowed.contains(&name) {
                return Err(CliError::Usage(format!(
                    "--{} is not accepted by `{command}`",
                    name.replace('_', "-")
                )));
            }
        }
        Ok(())
    }

    fn sampler_settings(&self) -> Result<SamplerSettings, CliError> {
        let mut s = SamplerSettings::with_method(self.method.unwrap_or(Method::Brownian));
        if let Some(dt) = self.dt {
            s.brownian.dt = dt;
        }
        if let Some(o) = self.overshoot {
            s.brownian.overshoot = o;
        }
        if let Some(eps) = self.epsilon {
            s.wos.epsilon = eps;
        }
        if let Some(f) = self.step_fraction {
            s.wos.step_fraction = f;
        }
        s.brownian.validate().map_err(|e| invalid(if self.dt.is_some() { "dt" } else { "overshoot" }, e))?;
        s.wos
            .validate()
            .map_err(|e| invalid(if self.epsilon.is_some() { "epsilon" } else { "step-fraction" }, e))?;
        Ok(s)
    }
}

const SAMPLER_FLAGS: [&str; 5] = ["method", "dt", "overshoot", "epsilon", "step_fraction"];

fn invalid(flag: &'static str, source: Error) -> CliError {
    CliError::Invalid { flag, source }
}

fn positive(flag: &'static str, v: usize) -> Result<usize, CliError> {
    if v == 0 {
        return Err(invalid(flag, Error::invalid(flag, "must be at least 1")));
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Table1,
    Sample,
    KernelCheck,
    Privacy,
}

/// What a validated run will do.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Job {
    Table1 {
        table: Table1Config,
    },
    Sample {
        domain: Domain,
        theta: Point,
        settings: SamplerSettings,
        n: usize,
    },
    KernelCheck {
        dim: usize,
        radius: f64,
        rho: f64,
        resolution: usize,
    },
    Privacy {
        scenario: CloakScenario,
        trips: Vec<usize>,
        replications: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub format: Format,
    #[serde(skip)]
    pub threads: Option<usize>,
    pub job: Job,
}

/// Parses and validates a full argument vector (including the program name).
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let (kind, flags) = match cli.command {
        CommandArgs::Table1(o) => (CommandKind::Table1, o),
        CommandArgs::Sample(o) => (CommandKind::Sample, o),
        CommandArgs::KernelCheck(o) => (CommandKind::KernelCheck, o),
        CommandArgs::Privacy(o) => (CommandKind::Privacy, o),
    };
    let opts = match &flags.config {
        Some(path) => flags.clone().overlay(read_config(path)?),
        None => flags,
    };
    if opts.threads == Some(0) {
        return Err(invalid("threads", Error::invalid("threads", "must be at least 1")));
    }
    let job = match kind {
        CommandKind::Table1 => table1_job(&opts)?,
        CommandKind::Sample => sample_job(&opts)?,
        CommandKind::KernelCheck => kernel_job(&opts)?,
        CommandKind::Privacy => privacy_job(&opts)?,
    };
    Ok(RunConfig {
        command: kind,
        seed: opts.seed.unwrap_or(0),
        output: opts.output,
        format: opts.format.unwrap_or_default(),
        threads: opts.threads,
        job,
    })
}

fn read_config(path: &Path) -> Result<Options, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Config {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn table1_job(opts: &Options) -> Result<Job, CliError> {
    let mut allowed = SAMPLER_FLAGS.to_vec();
    allowed.push("n");
    opts.reject_unused("table1", &allowed)?;
    Ok(Job::Table1 {
        table: Table1Config {
            settings: opts.sampler_settings()?,
            n: positive("n", opts.n.unwrap_or(500))?,
        },
    })
}

/// Dimension from `--dim` or the first point flag given, checked against all
/// other point flags.
fn resolve_dim(opts: &Options, points: &[(&'static str, &Option<Point>)]) -> Result<usize, CliError> {
    let dim = opts
        .dim
        .or_else(|| points.iter().find_map(|(_, p)| p.as_ref().map(Point::dim)))
        .unwrap_or(2);
    if dim == 0 {
        return Err(invalid("dim", Error::ZeroDimension));
    }
    for (flag, p) in points {
        if let Some(p) = p {
            p.check_dim(dim).map_err(|e| invalid(flag, e))?;
        }
    }
    Ok(dim)
}

/// A ball from `--center/--radius`, or a box when `--lower/--upper` are given.
fn resolve_domain(opts: &Options, dim: usize) -> Result<Domain, CliError> {
    match (&opts.lower, &opts.upper) {
        (None, None) => {
            let center = opts.center.clone().unwrap_or_else(|| Point::origin(dim));
            let radius = opts.radius.unwrap_or(1.0);
            Ok(Ball::new(center, radius).map_err(|e| invalid("radius", e))?.into())
        }
        (Some(lower), Some(upper)) => {
            if opts.center.is_some() || opts.radius.is_some() {
                return Err(CliError::Usage(
                    "--center/--radius cannot be combined with --lower/--upper".into(),
                ));
            }
            Ok(BoxDomain::new(lower.clone(), upper.clone())
                .map_err(|e| invalid("upper", e))?
                .into())
        }
        _ => Err(CliError::Usage("--lower and --upper must be given together".into())),
    }
}

fn default_start(domain: &Domain) -> Point {
    match domain {
        Domain::Ball(b) => b.center().clone(),
        Domain::Box(b) => Point::from_vec_unchecked(
            b.lower()
                .coords()
                .iter()
                .zip(b.upper().coords())
                .map(|(l, u)| 0.5 * (l + u))
                .collect(),
        ),
    }
}

fn interior_start(domain: &Domain, p: Option<&Point>, flag: &'static str) -> Result<Point, CliError> {
    let p = p.cloned().unwrap_or_else(|| default_start(domain));
    if !domain.contains(&p).map_err(|e| invalid(flag, e))? {
        return Err(CliError::Usage(format!("--{flag} {p}: {flag} outside domain")));
    }
    Ok(p)
}

fn check_exact_domain(settings: &SamplerSettings, domain: &Domain) -> Result<(), CliError> {
    if settings.method == Method::Exact && domain.as_ball().is_none() {
        return Err(invalid("method", Error::RequiresBall("exact sampling")));
    }
    Ok(())
}

fn sample_job(opts: &Options) -> Result<Job, CliError> {
    let mut allowed = SAMPLER_FLAGS.to_vec();
    allowed.extend(["n", "dim", "center", "radius", "lower", "upper", "theta"]);
    opts.reject_unused("sample", &allowed)?;
    let dim = resolve_dim(
        opts,
        &[
            ("theta", &opts.theta),
            ("center", &opts.center),
            ("lower", &opts.lower),
            ("upper", &opts.upper),
        ],
    )?;
    let domain = resolve_domain(opts, dim)?;
    let theta = interior_start(&domain, opts.theta.as_ref(), "theta")?;
    let settings = opts.sampler_settings()?;
    check_exact_domain(&settings, &domain)?;
    Ok(Job::Sample {
        domain,
        theta,
        settings,
        n: positive("n", opts.n.unwrap_or(500))?,
    })
}

fn kernel_job(opts: &Options) -> Result<Job, CliError> {
    opts.reject_unused("kernel-check", &["dim", "radius", "rho", "resolution"])?;
    let dim = positive("dim", opts.dim.unwrap_or(2))?;
    let radius = opts.radius.unwrap_or(1.0);
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(invalid("radius", Error::InvalidRadius(radius)));
    }
    let rho = opts.rho.unwrap_or(0.0);
    if !(0.0..radius).contains(&rho) {
        return Err(invalid("rho", Error::invalid("rho", format!("must lie in [0, radius), got {rho}"))));
    }
    let default_resolution = if dim >= 3 { 1_000_000 } else { 10_000 };
    Ok(Job::KernelCheck {
        dim,
        radius,
        rho,
        resolution: positive("resolution", opts.resolution.unwrap_or(default_resolution))?,
    })
}

fn privacy_job(opts: &Options) -> Result<Job, CliError> {
    let mut allowed = SAMPLER_FLAGS.to_vec();
    allowed.extend(["dim", "center", "radius", "lower", "upper", "house", "trips", "replications"]);
    opts.reject_unused("privacy", &allowed)?;
    let dim = resolve_dim(
        opts,
        &[
            ("house", &opts.house),
            ("center", &opts.center),
            ("lower", &opts.lower),
            ("upper", &opts.upper),
        ],
    )?;
    let region = resolve_domain(opts, dim)?;
    let house = interior_start(&region, opts.house.as_ref(), "house")?;
    let settings = opts.sampler_settings()?;
    check_exact_domain(&settings, &region)?;
    let trips = opts.trips.clone().unwrap_or_else(|| vec![100]);
    if trips.is_empty() {
        return Err(CliError::Usage("--trips needs at least one value".into()));
    }
    for &t in &trips {
        positive("trips", t)?;
    }
    let scenario = CloakScenario::new(house, region, trips[0], settings)?;
    Ok(Job::Privacy {
        scenario,
        trips,
        replications: positive("replications", opts.replications.unwrap_or(100))?,
    })
}

/// Result of executing a job: the table to emit and whether it passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub table: Table,
    pub passed: bool,
}

/// Runs the job on the current rayon pool.
pub fn execute(config: &RunConfig) -> Result<Outcome, Error> {
    let seed = config.seed;
    match &config.job {
        Job::Table1 { table } => {
            let rows = reproduce_table1(table, seed)?;
            Ok(Outcome {
                passed: rows.iter().all(|r| r.verdict != Verdict::Fail),
                table: comparison_table(&rows),
            })
        }
        Job::Sample {
            domain,
            theta,
            settings,
            n,
        } => {
            let samples = sample_batch(domain, theta, settings, seed, *n)?;
            let row = compare(&summarize(&samples)?, domain, theta, RowLabel::from_settings(settings))?;
            Ok(Outcome {
                passed: row.verdict != Verdict::Fail,
                table: comparison_table(std::slice::from_ref(&row)),
            })
        }
        Job::KernelCheck {
            dim,
            radius,
            rho,
            resolution,
        } => kernel_check(*dim, *radius, *rho, *resolution, seed),
        Job::Privacy {
            scenario,
            trips,
            replications,
        } => {
            let rows = privacy_curve(scenario, trips, *replications, seed)?;
            Ok(Outcome {
                passed: true,
                table: curve_table(&rows),
            })
        }
    }
}

fn kernel_check(dim: usize, radius: f64, rho: f64, resolution: usize, seed: u64) -> Result<Outcome, Error> {
    let ball = Ball::new(Point::origin(dim), radius)?;
    let x = Point::on_axis(dim, rho);
    let est = kernel_normalization(&ball, &x, resolution, seed)?;
    let tolerance = match est.rule {
        QuadratureRule::MonteCarlo => MONTE_CARLO_TOL,
        QuadratureRule::TwoPoint | QuadratureRule::Trapezoid => QUADRATURE_TOL,
    };
    let abs_error = (est.value - 1.0).abs();
    let second_moment = if dim == 2 {
        Some(second_moment_quadrature(&ball, &x, resolution)?)
    } else {
        None
    };
    let passed = abs_error <= tolerance;
    let header = [
        "d",
        "rho",
        "radius",
        "resolution",
        "rule",
        "normalization",
        "std_error",
        "abs_error",
        "tolerance",
        "second_moment",
        "trace_theory",
        "pass",
    ]
    .map(String::from)
    .to_vec();
    let row = vec![
        dim.to_string(),
        rho.to_string(),
        radius.to_string(),
        resolution.to_string(),
        est.rule.as_str().to_string(),
        format!("{:.6}", est.value),
        est.std_error.to_string(),
        abs_error.to_string(),
        tolerance.to_string(),
        fmt_opt(second_moment),
        fmt_exact(Some(theoretical_trace(&ball, &x)?)),
        if passed { "PASS" } else { "FAIL" }.to_string(),
    ];
    Ok(Outcome {
        table: Table::new(header, vec![row]),
        passed,
    })
}

#[derive(Serialize)]
struct Metadata<'a> {
    tool: &'static str,
    version: &'static str,
    seed: u64,
    passed: bool,
    config: &'a RunConfig,
}

fn resolve_output(path: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn write_table<W: Write>(table: &Table, format: Format, out: W) -> io::Result<()> {
    match format {
        Format::Csv => table.write_csv(out).map_err(io::Error::other),
        Format::Text => table.write_text(out),
    }
}

/// Executes a validated config and writes its output. Returns the process
/// exit status: 0 on success, 1 when a statistical check failed.
pub fn run(config: &RunConfig) -> Result<i32, CliError> {
    let outcome = match config.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::Usage(format!("--threads: {e}")))?
            .install(|| execute(config))?,
        None => execute(config)?,
    };
    let meta = Metadata {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        seed: config.seed,
        passed: outcome.passed,
        config,
    };
    let meta_json = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    match &config.output {
        Some(path) => {
            let path = resolve_output(path);
            let io_err = |path: &Path| {
                let path = path.to_path_buf();
                move |source| CliError::Io { path, source }
            };
            let file = File::create(&path).map_err(io_err(&path))?;
            let mut w = BufWriter::new(file);
            write_table(&outcome.table, config.format, &mut w).map_err(io_err(&path))?;
            w.flush().map_err(io_err(&path))?;
            let mut meta_path = path.clone().into_os_string();
            meta_path.push(".meta.json");
            let meta_path = PathBuf::from(meta_path);
            std::fs::write(&meta_path, meta_json + "\n").map_err(io_err(&meta_path))?;
        }
        None => {
            let stdout = io::stdout();
            write_table(&outcome.table, config.format, stdout.lock()).map_err(io_err_stdout)?;
            eprintln!("{}", serde_json::to_string(&meta).expect("metadata serializes"));
        }
    }
    Ok(if outcome.passed { 0 } else { 1 })
}

fn io_err_stdout(source: io::Error) -> CliError {
    CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    }
}

/// Binary entry point.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match parse_args(argv).and_then(|cfg| run(&cfg)) {
        Ok(code) => code,
        Err(CliError::Parse(e)) => {
            let _ = e.print();
            e.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
