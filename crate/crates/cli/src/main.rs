mod output;

use std::io;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lattice_green::checks::{self, Check};
use lattice_green::mc::{estimate_green, WalkConfig};
use lattice_green::reflection::{green_domain, green_strip_periodized};
use lattice_green::{
    DomainSpec, EstimateKind, GreenError, GreenEstimate, GreenEvaluator, LatticePoint,
    QuadratureConfig,
};

use output::{ErrorDescriptor, Format, Record};

/// Series tolerance for the strip when none is given.
const DEFAULT_STRIP_TOL: f64 = 1e-4;
/// Bessel order cap for strip evaluations, whose images reach far out.
const STRIP_ORDER_CAP: u32 = 4096;
const MAX_TABLE_POINTS: u64 = 10_000;

#[derive(Parser)]
#[command(
    name = "latgreen",
    version,
    about = "Green's functions of the simple random walk on Z^d and its folded subgraphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate G(x, y) on one domain.
    Eval(EvalArgs),
    /// Tabulate G along a line of points.
    Table(TableArgs),
    /// Run a group of cross-checks; exit code 5 if any fails.
    Check(CheckArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DomainName {
    Full,
    Half,
    Orthant,
    Subspace,
    Strip,
}

#[derive(Args)]
struct DomainArgs {
    #[arg(long, value_enum)]
    domain: DomainName,
    #[arg(long)]
    d: usize,
    /// Number of constrained coordinates (subspace only).
    #[arg(long)]
    m: Option<usize>,
    /// Strip width (strip only).
    #[arg(long = "L")]
    width: Option<usize>,
}

#[derive(Args)]
struct NumericArgs {
    /// Absolute tolerance: quadrature tolerance, or the series tolerance for
    /// the strip (default 1e-11, strip 1e-4).
    #[arg(long, env = "LATGREEN_TOL")]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = Method::Formula)]
    method: Method,
    /// Walks for --method mc.
    #[arg(long, default_value_t = 100_000)]
    walks: u64,
    /// Steps per walk for --method mc.
    #[arg(long, default_value_t = 10_000)]
    horizon: u64,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    domain: DomainArgs,
    /// Comma-separated integers, e.g. 0,1,-2.
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    #[arg(long, allow_hyphen_values = true)]
    y: String,
    #[command(flatten)]
    numeric: NumericArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// G(p, p)
    Diagonal,
    /// G(base, p)
    Row,
}

#[derive(Args)]
struct TableArgs {
    #[command(flatten)]
    domain: DomainArgs,
    /// Points are base + k e_axis for k in from..=to.
    #[arg(long, allow_hyphen_values = true)]
    from: i64,
    #[arg(long, allow_hyphen_values = true)]
    to: i64,
    /// 1-based coordinate along which the points move.
    #[arg(long, default_value_t = 1)]
    axis: usize,
    /// Base point; the origin by default.
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    #[arg(long, value_enum, default_value_t = Mode::Diagonal)]
    mode: Mode,
    #[command(flatten)]
    numeric: NumericArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Mc,
    Network,
    Identities,
    ScanD,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(value_enum)]
    suite: Suite,
    /// Series tolerance for the strip comparison in `mc`.
    #[arg(long, env = "LATGREEN_TOL")]
    tol: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    walks: u64,
    #[arg(long, default_value_t = 10_000)]
    horizon: u64,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    /// One `[PASS]`/`[FAIL]` line per check unless a format is given.
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Closed form: image sum, or truncated image series for the strip.
    Formula,
    /// Strip only: images summed inside the integral.
    Periodized,
    /// Monte Carlo; the error bound is 3 stderr + horizon bias.
    Mc,
}

impl Method {
    fn tag(self) -> &'static str {
        match self {
            Method::Formula => "formula",
            Method::Periodized => "periodized",
            Method::Mc => "mc",
        }
    }
}

enum Failure {
    Usage(String),
    Green(GreenError),
    Io(io::Error),
    ChecksFailed,
}

impl From<GreenError> for Failure {
    fn from(e: GreenError) -> Self {
        Failure::Green(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Green(e) => match e {
                GreenError::Config(_) | GreenError::Format { .. } => 2,
                GreenError::Transience { .. } | GreenError::Domain(_) => 3,
                GreenError::Convergence { .. } | GreenError::OrderCap { .. } => 4,
                GreenError::Consistency(_) => 5,
                GreenError::Singular(_) | GreenError::Io(_) => 1,
            },
            Failure::Io(_) => 1,
            Failure::ChecksFailed => 5,
        }
    }

    fn message(&self) -> Option<String> {
        match self {
            Failure::Usage(m) => Some(format!("usage error: {m}")),
            Failure::Green(e) => Some(e.to_string()),
            Failure::Io(e) => Some(format!("i/o error: {e}")),
            Failure::ChecksFailed => None,
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn parse_point(text: &str, d: usize, flag: &str) -> CliResult<LatticePoint> {
    let coords = text
        .split(',')
        .map(|c| c.trim().parse::<i64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| {
            Failure::Usage(format!(
                "--{flag} must be comma-separated integers, got {text:?}"
            ))
        })?;
    if coords.len() != d {
        return Err(Failure::Usage(format!(
            "--{flag} has {} coordinates but --d is {d}",
            coords.len()
        )));
    }
    Ok(LatticePoint::new(coords))
}

fn domain_of(a: &DomainArgs) -> CliResult<DomainSpec> {
    let misplaced = |flag: &str| {
        Failure::Usage(format!(
            "--{flag} does not apply to --domain {:?}",
            a.domain
        ))
    };
    if a.m.is_some() && a.domain != DomainName::Subspace {
        return Err(misplaced("m"));
    }
    if a.width.is_some() && a.domain != DomainName::Strip {
        return Err(misplaced("L"));
    }
    Ok(match a.domain {
        DomainName::Full => DomainSpec::full(a.d)?,
        DomainName::Half => DomainSpec::half_space(a.d)?,
        DomainName::Orthant => DomainSpec::orthant(a.d)?,
        DomainName::Subspace => {
            let m =
                a.m.ok_or_else(|| Failure::Usage("--domain subspace needs --m".into()))?;
            DomainSpec::subspace(a.d, m)?
        }
        DomainName::Strip => match a.width {
            Some(l) => DomainSpec::strip(a.d, l)?,
            None if a.d < 4 => {
                return Err(GreenError::Transience {
                    d: a.d,
                    required: 4,
                }
                .into())
            }
            None => return Err(Failure::Usage("--domain strip needs --L".into())),
        },
    })
}

/// Evaluates one value per pair with a shared evaluator.
struct Evaluator<'a> {
    domain: DomainSpec,
    numeric: &'a NumericArgs,
    ev: GreenEvaluator,
    strip_tol: f64,
}

impl<'a> Evaluator<'a> {
    fn new(domain: DomainSpec, numeric: &'a NumericArgs) -> CliResult<Self> {
        if let Some(t) = numeric.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Failure::Usage(format!("--tol must be positive, got {t}")));
            }
        }
        let is_strip = matches!(domain, DomainSpec::Strip { .. });
        if numeric.method == Method::Periodized && !is_strip {
            return Err(Failure::Usage(
                "--method periodized applies to the strip only".into(),
            ));
        }
        let mut cfg = QuadratureConfig::default();
        if is_strip {
            cfg.order_cap = STRIP_ORDER_CAP;
        } else if let Some(t) = numeric.tol {
            cfg.abs_tol = t;
        }
        Ok(Evaluator {
            domain,
            numeric,
            ev: GreenEvaluator::with_memo(cfg),
            strip_tol: numeric.tol.unwrap_or(DEFAULT_STRIP_TOL),
        })
    }

    fn estimate(&self, x: &LatticePoint, y: &LatticePoint) -> CliResult<GreenEstimate> {
        Ok(match (self.numeric.method, self.domain) {
            (Method::Formula, _) => green_domain(&self.ev, &self.domain, x, y, self.strip_tol)?,
            (Method::Periodized, DomainSpec::Strip { d, width }) => {
                green_strip_periodized(&self.ev, d, width, x, y)?
            }
            (Method::Periodized, _) => unreachable!("checked in Evaluator::new"),
            (Method::Mc, _) => {
                let cfg =
                    WalkConfig::new(self.numeric.walks, self.numeric.horizon, self.numeric.seed);
                let est = estimate_green(&self.domain, x, y, &cfg)?;
                GreenEstimate::new(est.mean, est.tolerance(), EstimateKind::MonteCarlo)
            }
        })
    }

    fn record(&self, x: &LatticePoint, y: &LatticePoint) -> CliResult<Record> {
        let start = Instant::now();
        let est = self.estimate(x, y)?;
        Ok(Record {
            domain: self.domain.to_string(),
            x: x.coords().to_vec(),
            y: y.coords().to_vec(),
            value: est.value,
            error: ErrorDescriptor {
                kind: est.kind,
                bound: est.error_bound,
            },
            method: self.numeric.method.tag(),
            wall_time_s: start.elapsed().as_secs_f64(),
        })
    }
}

fn cmd_eval(args: &EvalArgs) -> CliResult<()> {
    let domain = domain_of(&args.domain)?;
    let x = parse_point(&args.x, args.domain.d, "x")?;
    let y = parse_point(&args.y, args.domain.d, "y")?;
    let record = Evaluator::new(domain, &args.numeric)?.record(&x, &y)?;
    let w = output::open(args.output.out.as_deref())?;
    output::write_records(w, &[record], args.output.format, true)?;
    Ok(())
}

fn cmd_table(args: &TableArgs) -> CliResult<()> {
    let d = args.domain.d;
    let domain = domain_of(&args.domain)?;
    if args.axis == 0 || args.axis > d {
        return Err(Failure::Usage(format!(
            "--axis must be in 1..={d}, got {}",
            args.axis
        )));
    }
    let count = if args.to < args.from {
        0
    } else {
        (args.to as i128 - args.from as i128 + 1) as u128
    };
    if count > u128::from(MAX_TABLE_POINTS) {
        return Err(Failure::Usage(format!(
            "range has {count} points, at most {MAX_TABLE_POINTS} allowed"
        )));
    }
    let base = match &args.x {
        Some(text) => parse_point(text, d, "x")?,
        None => LatticePoint::origin(d),
    };
    let evaluator = Evaluator::new(domain, &args.numeric)?;
    let mut records = Vec::new();
    if count > 0 {
        for k in args.from..=args.to {
            let mut p = base.clone();
            p.coords_mut()[args.axis - 1] += k;
            let x = match args.mode {
                Mode::Diagonal => p.clone(),
                Mode::Row => base.clone(),
            };
            records.push(evaluator.record(&x, &p)?);
        }
    }
    let w = output::open(args.output.out.as_deref())?;
    output::write_records(w, &records, args.output.format, false)?;
    Ok(())
}

fn cmd_check(args: &CheckArgs) -> CliResult<()> {
    let ev = GreenEvaluator::with_memo(QuadratureConfig::default());
    let results: Vec<Check> = match args.suite {
        Suite::Identities => checks::identities(&ev)?,
        Suite::Network => checks::network(3)?,
        Suite::ScanD => checks::scan_d(&ev, 3..=10)?,
        Suite::Mc => {
            let strip_ev = GreenEvaluator::with_memo(QuadratureConfig {
                order_cap: STRIP_ORDER_CAP,
                ..Default::default()
            });
            let cfg = WalkConfig::new(args.walks, args.horizon, args.seed);
            checks::monte_carlo(&strip_ev, &cfg, args.tol.unwrap_or(DEFAULT_STRIP_TOL))?
        }
    };
    let w = output::open(args.out.as_deref())?;
    output::write_checks(w, &results, args.format)?;
    if checks::all_passed(&results) {
        Ok(())
    } else {
        Err(Failure::ChecksFailed)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Table(a) => cmd_table(a),
        Command::Check(a) => cmd_check(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if let Some(m) = f.message() {
                eprintln!("latgreen: {m}");
            }
            ExitCode::from(f.exit_code())
        }
    }
}
