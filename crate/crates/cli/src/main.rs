//! `bsd2`: command-line frontend.
//!
//! Every command writes a JSON-lines report to stdout. Exit codes: 0 verified,
//! 1 mismatch, 2 usage or input error, 3 undecided.

use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use bsd2_core::config::Config;
use bsd2_core::curve::{parse_catalog, Catalog, CurveModel};
use bsd2_core::family::{
    curve_info, verify_family, verify_twist, FamilyContext, FamilyError, Status, VerifyOptions,
};
use bsd2_core::modsym::{identity_suite, ms1_at_primes, IdentityReport};
use bsd2_core::report::ReportWriter;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "bsd2", version, about = "2-part BSD verification for quadratic twist families")]
struct Cli {
    /// TOML configuration file (overrides $BSD2_CONFIG).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Extra curve catalog, lines of `label a1 a2 a3 a4 a6`.
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,
    /// Add wall-clock timing to the summary line.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CurveArg {
    /// Catalog label (e.g. 14A1) or coefficients "[a1,a2,a3,a4,a6]".
    curve: String,
    /// Restrict the prime set to q with a_q ≠ 0.
    #[arg(long)]
    require_aq_nonzero: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Minimal model, invariants, torsion, 2-division fields, L^alg and local data.
    CurveInfo {
        curve: String,
    },
    /// The prime set up to a bound.
    Sieve {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long)]
        bound: Option<u64>,
    },
    /// Verify a single twist.
    Verify {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long = "M", short = 'M')]
        m: i64,
        #[arg(long)]
        with_selmer: bool,
        #[arg(long)]
        with_modsym: bool,
    },
    /// Exact modular symbol identities for each m.
    Identities {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long, value_delimiter = ',', required = true)]
        m_list: Vec<i64>,
        /// Bound for the good primes at which (σ(q) − a_q)-identities are checked.
        #[arg(long, default_value_t = 50)]
        prime_bound: u64,
    },
    /// Verify every r-fold product of primes of the prime set.
    Family {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long)]
        r: usize,
        #[arg(long, conflicts_with = "product_bound", required_unless_present = "product_bound")]
        count: Option<usize>,
        #[arg(long)]
        product_bound: Option<u64>,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        with_selmer: bool,
        #[arg(long)]
        with_modsym: bool,
    },
}

/// Error carrying its exit code.
struct Failure(u8, String);

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure(2, e.to_string())
    }
}

fn input_error(e: impl ToString) -> Failure {
    Failure(2, e.to_string())
}

fn family_error(e: FamilyError) -> Failure {
    match e {
        FamilyError::CriteriaDisagree(_) | FamilyError::LedgerMismatch(_) => Failure(1, e.to_string()),
        _ => Failure(2, e.to_string()),
    }
}

fn load_catalog(path: Option<&PathBuf>) -> Result<Catalog, Failure> {
    let mut cat = Catalog::default_catalog();
    if let Some(p) = path {
        let text = std::fs::read_to_string(p).map_err(|e| input_error(format!("{}: {e}", p.display())))?;
        let mut extra = parse_catalog(&text).map_err(input_error)?;
        extra.entries.extend(cat.entries);
        cat = extra;
    }
    Ok(cat)
}

#[derive(Serialize)]
struct SieveItem<'a> {
    curve: &'a CurveModel,
    label: Option<&'a str>,
    bound: u64,
    require_aq_nonzero: bool,
    cross_check: &'static str,
    primes: Vec<u64>,
}

#[derive(Serialize)]
struct Ms1Item<'a> {
    #[serde(flatten)]
    report: &'a IdentityReport,
}

fn status_of(passed: bool) -> Status {
    if passed {
        Status::Verified
    } else {
        Status::Mismatch
    }
}

fn run(cli: Cli) -> Result<i32, Failure> {
    let (config, config_path) = Config::load(cli.config.as_deref()).map_err(input_error)?;
    let catalog = load_catalog(cli.catalog.as_ref())?;
    let command: Vec<String> = std::env::args().skip(1).collect();
    let path_str = config_path.as_ref().map(|p| p.display().to_string());
    let stdout = io::stdout();
    let out = BufWriter::new(stdout.lock());
    let resolve = |spec: &str| catalog.resolve(spec).map_err(input_error);

    // Validate inputs before any report line is written.
    let writer = |out| -> Result<ReportWriter<BufWriter<io::StdoutLock<'static>>>, Failure> {
        let w = ReportWriter::new(out, &command, &config, path_str.as_deref())?;
        Ok(if cli.timing { w.with_timing() } else { w })
    };

    match cli.command {
        Command::CurveInfo { curve } => {
            let (label, e) = resolve(&curve)?;
            let info = curve_info(label, &e, &config).map_err(family_error)?;
            let mut w = writer(out)?;
            w.item("curve_info", None, &info)?;
            Ok(w.finish()?.exit_code())
        }
        Command::Sieve { curve, bound } => {
            let (label, e) = resolve(&curve.curve)?;
            let bound = bound.unwrap_or(config.point_count_bound);
            if bound < 5 {
                return Err(input_error("--bound must be at least 5"));
            }
            let ctx = FamilyContext::new(label.clone(), &e, config.clone(), curve.require_aq_nonzero)
                .map_err(family_error)?;
            let primes = ctx.primes(bound).map_err(family_error)?;
            let mut w = writer(out)?;
            w.item(
                "sieve",
                Some(Status::Verified),
                &SieveItem {
                    curve: &ctx.curve,
                    label: label.as_deref(),
                    bound,
                    require_aq_nonzero: curve.require_aq_nonzero,
                    cross_check: "agree",
                    primes,
                },
            )?;
            Ok(w.finish()?.exit_code())
        }
        Command::Verify { curve, m, with_selmer, with_modsym } => {
            let (label, e) = resolve(&curve.curve)?;
            let ctx = FamilyContext::new(label, &e, config.clone(), curve.require_aq_nonzero).map_err(family_error)?;
            let report = verify_twist(&ctx, m, VerifyOptions { with_selmer, with_modsym }).map_err(family_error)?;
            let mut w = writer(out)?;
            w.item_for_r("twist", report.r, report.status, &report)?;
            Ok(w.finish()?.exit_code())
        }
        Command::Identities { curve, m_list, prime_bound } => {
            let (label, e) = resolve(&curve.curve)?;
            let ctx = FamilyContext::new(label, &e, config.clone(), curve.require_aq_nonzero).map_err(family_error)?;
            for &m in &m_list {
                ctx.admissible(m).map_err(family_error)?;
            }
            let psi = ctx.eigenfunctional().map_err(input_error)?;
            let mut w = writer(out)?;
            for r in ms1_at_primes(psi, prime_bound) {
                w.item("identity", Some(status_of(r.passed)), &Ms1Item { report: &r })?;
            }
            for &m in &m_list {
                let rows = identity_suite(psi, m as u64).map_err(|e| Failure(3, e.to_string()))?;
                for r in rows {
                    w.item("identity", Some(status_of(r.passed)), &r)?;
                }
            }
            Ok(w.finish()?.exit_code())
        }
        Command::Family { curve, r, count, product_bound, jobs, with_selmer, with_modsym } => {
            if r == 0 {
                return Err(input_error("--r must be at least 1"));
            }
            let (label, e) = resolve(&curve.curve)?;
            let ctx = FamilyContext::new(label, &e, config.clone(), curve.require_aq_nonzero).map_err(family_error)?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs.unwrap_or(0))
                .build()
                .map_err(input_error)?;
            let opts = VerifyOptions { with_selmer, with_modsym };
            let results = pool.install(|| -> Result<_, FamilyError> {
                let ms = match (count, product_bound) {
                    (Some(c), _) => ctx.first_products(r, c)?,
                    (None, Some(b)) => ctx.products(r, b)?,
                    (None, None) => unreachable!("clap enforces one of --count / --product-bound"),
                };
                Ok(verify_family(&ctx, &ms, opts))
            });
            let results = results.map_err(family_error)?;
            let mut w = writer(out)?;
            for res in results {
                let report = res.map_err(family_error)?;
                w.item_for_r("twist", report.r, report.status, &report)?;
            }
            Ok(w.finish()?.exit_code())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(Failure(code, msg)) => {
            let _ = writeln!(io::stderr(), "bsd2: {msg}");
            ExitCode::from(code)
        }
    }
}
