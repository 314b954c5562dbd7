//! Command-line entry point: exact Newton polygons of L-functions of
//! exponential sums, with JSON/CSV output.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lnewton::cli::{self, Method, RunConfig};
use lnewton::error::Error;

#[derive(Parser)]
#[command(name = "lnewton", version, about = "Newton polygons of L-functions of exponential sums over finite fields", long_about = None)]
struct CliArgs {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct CommonOpts {
    /// characteristic p (prime)
    #[arg(long)]
    p: u64,
    /// ground field extension degree a (q = p^a)
    #[arg(long, default_value_t = 1)]
    a: u32,
    /// pi-adic precision in pi-units (default 4(p-1))
    #[arg(long)]
    precision: Option<u64>,
    /// enumeration budget in points
    #[arg(long)]
    budget: Option<u64>,
    /// weight cap for the table search
    #[arg(long)]
    weight_cap: Option<u64>,
    /// worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// output format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// output path (stdout when omitted)
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact polygon by direct enumeration
    Oracle {
        /// polynomial, e.g. "x^3+2x" or "x^3+x*y+y^2"
        f: String,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Closed-form small-slope path (one variable, 3 <= d <= 6)
    Slopes {
        f: String,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Minimal-weight digit-table path
    Tables {
        f: String,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Closed-form path with oracle fallback and agreement check
    Auto {
        f: String,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Gross-Koblitz, interpolation, and Hasse-Davenport checks
    GaussCheck {
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Exponent-congruence solution sets and orbit structure at one level
    Congruence {
        f: String,
        /// level d
        #[arg(long, default_value_t = 1)]
        d: u32,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Run a pinned reproduction suite (see --list)
    Reproduce {
        /// suite id, e.g. thm7.1 or ex8.2
        suite: Option<String>,
        /// list available suite ids
        #[arg(long)]
        list: bool,
        #[command(flatten)]
        opts: CommonOpts,
    },
}

fn config_from(opts: &CommonOpts) -> RunConfig {
    let mut cfg = RunConfig::from_env();
    if let Some(b) = opts.budget {
        cfg.budget = b;
    }
    if opts.precision.is_some() {
        cfg.precision = opts.precision;
    }
    if opts.weight_cap.is_some() {
        cfg.weight_cap = opts.weight_cap;
    }
    let threads = opts
        .threads
        .or_else(|| std::env::var("LNEWTON_THREADS").ok().and_then(|v| v.parse().ok()));
    if let Some(t) = threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    cfg
}

fn emit(opts: &CommonOpts, text: &str) -> std::io::Result<()> {
    match &opts.out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn polygon_command(method: Method, f: &str, opts: &CommonOpts) -> Result<u8, Error> {
    let cfg = config_from(opts);
    let doc = cli::run_polygon(method, f, opts.p, opts.a, &cfg)?;
    let rendered = match opts.format {
        Format::Json => doc.to_json(),
        Format::Csv => doc.to_csv(),
    };
    emit(opts, &rendered).map_err(|e| Error::InternalError(e.to_string()))?;
    if opts.out.is_none() {
        println!();
    }
    Ok(if doc.status == "proved" { 0 } else { 2 })
}

fn main() -> ExitCode {
    let args = CliArgs::parse();
    let result: Result<u8, Error> = match &args.command {
        Command::Oracle { f, opts } => polygon_command(Method::Oracle, f, opts),
        Command::Slopes { f, opts } => polygon_command(Method::Slopes, f, opts),
        Command::Tables { f, opts } => polygon_command(Method::Tables, f, opts),
        Command::Auto { f, opts } => polygon_command(Method::Auto, f, opts),
        Command::GaussCheck { opts } => (|| {
            let cfg = config_from(opts);
            let lines = cli::run_gauss_check(opts.p, opts.a, &cfg)?;
            emit(opts, &(lines.join("\n") + "\n"))
                .map_err(|e| Error::InternalError(e.to_string()))?;
            Ok(0)
        })(),
        Command::Congruence { f, d, opts } => (|| {
            let cfg = config_from(opts);
            let lines = cli::run_congruence(f, opts.p, opts.a, *d, &cfg)?;
            emit(opts, &(lines.join("\n") + "\n"))
                .map_err(|e| Error::InternalError(e.to_string()))?;
            Ok(0)
        })(),
        Command::Reproduce { suite, list, opts } => (|| {
            if *list || suite.is_none() {
                let ids = cli::reproduce::SUITE_IDS.join("\n");
                emit(opts, &(ids + "\n")).map_err(|e| Error::InternalError(e.to_string()))?;
                return Ok(0);
            }
            let cfg = config_from(opts);
            let report = cli::reproduce::reproduce(suite.as_deref().unwrap(), &cfg)?;
            emit(opts, &report.render()).map_err(|e| Error::InternalError(e.to_string()))?;
            Ok(if report.all_pass() { 0 } else { 2 })
        })(),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error [{}]: {e}", e.code());
            ExitCode::from(1)
        }
    }
}
