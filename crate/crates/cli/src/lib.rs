//! CLI surface: argument parsing, configuration precedence, subcommand
//! dispatch and report output. The binary is a thin wrapper over `run`.

pub mod commands;
pub mod config;
pub mod formspec;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use eigencoprime_core::coeffs::format::TableKind;
use eigencoprime_core::error::{Error, Result};

use commands::{AlphaMode, Table1Args};
use config::{GlobalFlags, Resolved};
use formspec::FormSpec;
use report::Report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NETWORK: i32 = 3;

#[derive(Parser)]
#[command(
    name = "eigencoprime",
    about = "Coprimality statistics of Fourier coefficients of eigenform pairs",
    version
)]
struct Cli {
    /// URL template with {label} and {bound} placeholders
    #[arg(long, global = true)]
    api_base: Option<String>,

    /// Coefficient cache directory (default ./cache)
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    /// Never touch the network; serve from cache only
    #[arg(long, global = true)]
    offline: bool,

    /// Output format: csv, json or markdown
    #[arg(long, global = true)]
    format: Option<String>,

    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for the counting loops
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// key=value config file (flags and env take precedence)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FormPairArgs {
    /// First form: label:<string>, path:<file> or gen:<weight>
    #[arg(long)]
    form1: String,
    /// Second form spec
    #[arg(long)]
    form2: String,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a level-1 eigenform and write its coefficient file
    Level1 {
        #[arg(long)]
        weight: u32,
        #[arg(long)]
        prec: usize,
        /// Destination coefficient file
        #[arg(long = "out", value_name = "PATH")]
        file: PathBuf,
        /// File kind: an (all n) or ap (prime indices)
        #[arg(long, default_value = "an")]
        kind: String,
    },
    /// Fetch coefficients from the remote database into the cache
    Fetch {
        #[arg(long)]
        label: String,
        #[arg(long)]
        bound: u64,
        /// Level override when the label does not carry it
        #[arg(long)]
        level: Option<u64>,
        /// Weight override when the label does not carry it
        #[arg(long)]
        weight: Option<u32>,
    },
    /// Validate a coefficient table and print the issue report
    Validate {
        #[arg(long)]
        form: String,
    },
    /// Exact Galois-image model counts for one modulus (JSON)
    Oracle {
        /// Prime modulus: closed-form counts
        #[arg(long)]
        ell: Option<u64>,
        /// Any modulus >= 2: exhaustive enumeration (cap 100)
        #[arg(long = "mod")]
        modulus: Option<u64>,
        #[arg(long)]
        k1: u32,
        #[arg(long)]
        k2: u32,
    },
    /// R(x) and alpha_{L,y} per form pair
    Table1 {
        #[command(flatten)]
        pair: FormPairArgs,
        /// Optional third form: all pairwise rows are emitted
        #[arg(long)]
        form3: Option<String>,
        #[arg(short = 'x', long = "x")]
        x: u64,
        #[arg(short = 'y', long = "y")]
        y: u64,
        #[arg(short = 'L', long = "cutoff")]
        cutoff: u64,
    },
    /// Empirical vs model densities over a prime range
    Delta {
        #[command(flatten)]
        pair: FormPairArgs,
        /// Prime range LO..HI (inclusive)
        #[arg(long)]
        primes: String,
        #[arg(short = 'y', long = "y")]
        y: u64,
    },
    /// The alpha estimators: empirical, exact product, or Moebius sum
    Alpha {
        #[arg(long)]
        mode: String,
        /// Prime cutoff L (empirical and exact modes)
        #[arg(short = 'L', long = "cutoff", default_value_t = 100)]
        cutoff: u64,
        /// Truncation bound B (prime mode)
        #[arg(short = 'B', long = "bound", default_value_t = 10_000)]
        bound: u64,
        #[arg(short = 'y', long = "y")]
        y: Option<u64>,
        /// Per-prime density overrides file
        #[arg(long)]
        overrides: Option<PathBuf>,
        #[arg(long)]
        form1: Option<String>,
        #[arg(long)]
        form2: Option<String>,
    },
    /// gcd(n, .) counts over integers
    Counts {
        #[command(flatten)]
        pair: FormPairArgs,
        #[arg(short = 'x', long = "x")]
        x: u64,
        /// Fixed modulus for the (d, gcd) count
        #[arg(short = 'd', long = "d", default_value_t = 2)]
        d: u64,
        /// Comma-separated list of additional x values
        #[arg(long = "x-grid")]
        x_grid: Option<String>,
    },
    /// Moments of omega(gcd(a1(p), a2(p)))
    Omega {
        #[command(flatten)]
        pair: FormPairArgs,
        #[arg(short = 'x', long = "x")]
        x: u64,
        #[arg(short = 'u', long = "u")]
        u: Option<u64>,
        /// Prime cutoff for the model constants
        #[arg(short = 'L', long = "cutoff", default_value_t = 100)]
        cutoff: u64,
        #[arg(long)]
        overrides: Option<PathBuf>,
    },
    /// The gcd(n, phi(n)) = 1 baseline count
    Erdos {
        #[arg(short = 'x', long = "x")]
        x: u64,
    },
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Usage(_) => EXIT_USAGE,
        Error::Network(_) => EXIT_NETWORK,
        _ => EXIT_DATA,
    }
}

fn load_overrides(
    path: &Option<PathBuf>,
) -> Result<std::collections::BTreeMap<u64, num_rational::BigRational>> {
    match path {
        None => Ok(Default::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            config::parse_overrides(&text)
        }
    }
}

fn parse_prime_range(s: &str) -> Result<(u64, u64)> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| Error::usage(format!("prime range {s:?} must be LO..HI")))?;
    let lo: u64 = lo
        .parse()
        .map_err(|_| Error::usage(format!("invalid range start {lo:?}")))?;
    let hi: u64 = hi
        .parse()
        .map_err(|_| Error::usage(format!("invalid range end {hi:?}")))?;
    if lo > hi {
        return Err(Error::usage("range start exceeds range end"));
    }
    Ok((lo, hi))
}

fn emit(text: &str, resolved: &Resolved) -> Result<()> {
    match &resolved.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn dispatch(cli: Cli, resolved: &Resolved) -> Result<i32> {
    let render = |report: Report| report.render(resolved.format);
    match cli.command {
        Command::Level1 {
            weight,
            prec,
            file,
            kind,
        } => {
            let kind = TableKind::parse(&kind)?;
            let report = commands::level1(weight, prec, kind, &file)?;
            emit(&render(report), resolved)?;
            Ok(EXIT_OK)
        }
        Command::Fetch {
            label,
            bound,
            level,
            weight,
        } => {
            let report = commands::fetch(&label, level, weight, bound, &resolved.remote)?;
            emit(&render(report), resolved)?;
            Ok(EXIT_OK)
        }
        Command::Validate { form } => {
            let spec = FormSpec::parse(&form)?;
            let (report, passed) = commands::validate_form(&spec, &resolved.remote)?;
            emit(&render(report), resolved)?;
            Ok(if passed { EXIT_OK } else { EXIT_DATA })
        }
        Command::Oracle {
            ell,
            modulus,
            k1,
            k2,
        } => {
            let json = commands::oracle(ell, modulus, k1, k2)?;
            emit(&json, resolved)?;
            Ok(EXIT_OK)
        }
        Command::Table1 {
            pair,
            form3,
            x,
            y,
            cutoff,
        } => {
            let mut specs = vec![FormSpec::parse(&pair.form1)?, FormSpec::parse(&pair.form2)?];
            if let Some(third) = form3 {
                specs.push(FormSpec::parse(&third)?);
            }
            let report = commands::table1(&specs, &Table1Args { x, y, cutoff }, resolved)?;
            emit(&render(report), resolved)?;
            Ok(EXIT_OK)
        }
        Command::Delta { pair, primes, y } => {
            let (lo, hi) = parse_prime_range(&primes)?;
            let spec1 = FormSpec::parse(&pair.form1)?;
            let spec2 = FormSpec::parse(&pair.form2)?;
            let report = commands::delta_scan(&spec1, &spec2, lo, hi, y, resolved)?;
            emit(&render(report), resolved)?;
            Ok(EXIT_OK)
        }
        Command::Alpha {
            mode,
            cutoff,
            bound,
            y,
            overrides,
            form1,
            form2,
        } => {
            let overrides = load_overrides(&overrides)?;
            let specs = match (&form1, &form2) {
                (Some(a), Some(b)) => Some((FormSpec::parse(a)?, FormSpec::parse(b)?)),
                _ => None,
            };
            let mode = match mode.as_str() {
                "empirical" => AlphaMode::Empirical {
                    y: y.ok_or_else(|| Error::usage("alpha --mode empirical requires -y"))?,
                },
                "exact" => AlphaMode::Exact,
                "prime" => AlphaMode::Prime { bound },
                other => return Err(Error::usage(format!("unknown alpha mode {other:?}"))),
            };
            let report = commands::alpha(
                mode,
                cutoff,
                &overrides,
                specs.as_ref().map(|(a, b)| (a, b)),
                resolved,
            )?;
            emit(&render(report), resolved)?;
            Ok(EXIT_OK)
        }
        Command::Counts {
            pair,
            x,
            d,
            x_grid,
        } => {
            let spec1 = FormSpec::parse(&pair.form1)?;
            let spec2 = FormSpec::parse(&pair.form2)?;
            let mut grid = vec![x];
            if let Some(extra) = x_grid {
                for part in extra.split(',') {
                    grid.push(part.trim().parse::<u64>().map_err(|_| {
                        Error::usage(format!("invalid x-grid entry {part:?}"))
                    })?);
                }
            }
            grid.sort_unstable();
            grid.dedup();
            let report = commands::counts(&spec1, &spec2, &grid, d, resolved)?;
            emit(&render(report), resolved)?;
            Ok(EXIT_OK)
        }
        Command::Omega {
            pair,
            x,
            u,
            cutoff,
            overrides,
        } => {
            let spec1 = FormSpec::parse(&pair.form1)?;
            let spec2 = FormSpec::parse(&pair.form2)?;
            let overrides = load_overrides(&overrides)?;
            let report = commands::omega(&spec1, &spec2, x, u, cutoff, &overrides, resolved)?;
            emit(&render(report), resolved)?;
            Ok(EXIT_OK)
        }
        Command::Erdos { x } => {
            let report = commands::erdos(x)?;
            emit(&render(report), resolved)?;
            Ok(EXIT_OK)
        }
    }
}

/// Parse argv, resolve configuration, run the subcommand, emit the report
/// and return the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version exit 0; real usage errors exit 1
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let flags = GlobalFlags {
        api_base: cli.api_base.clone(),
        cache_dir: cli.cache_dir.clone(),
        offline: cli.offline,
        format: cli.format.clone(),
        out: cli.out.clone(),
        workers: cli.workers,
        config: cli.config.clone(),
    };
    let resolved = match config::resolve(&flags) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code_for(&e);
        }
    };
    // worker count: the global pool can only be set once per process;
    // all counting loops are deterministic for any worker count
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(resolved.workers)
        .build_global();
    match dispatch(cli, &resolved) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}
