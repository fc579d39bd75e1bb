//! `meanratio`: certify, verify and explore best constants for
//! `(A_n - G_n) / (P_alpha - G_n)`.
//!
//! Exit status: 0 on success, 1 when a verification fails, 2 on usage or
//! instance errors.

mod commands;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use meanratio::constants::Tolerances;
use meanratio::oracle::{OracleConfig, DEFAULT_GRID, DEFAULT_SAMPLES};
use meanratio::solver::EXTREMUM_TOL;
use meanratio::ExponentPair64;
use num_rational::Rational64;

use crate::commands::Column;
use crate::output::Format;

#[derive(Parser)]
#[command(name = "meanratio", version, about = "Best constants for (A - G) / (P_alpha - G) on the simplex")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, env = "MEANRATIO_FORMAT", default_value = "json")]
    format: Format,

    /// Report wall-clock time in the JSON metadata.
    #[arg(long, global = true)]
    timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Instance {
    #[arg(long)]
    n: usize,
    /// Power-mean exponent, as a decimal or a rational `p/q`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_alpha)]
    alpha: ExponentPair64,
}

#[derive(Subcommand)]
enum Command {
    /// Certify the best constants for one instance.
    Constants {
        #[command(flatten)]
        instance: Instance,
        /// Bracket width at which the extremum search stops.
        #[arg(long, default_value_t = EXTREMUM_TOL)]
        tol: f64,
    },
    /// Certify, then check against Monte-Carlo samples and a grid scan.
    Verify {
        #[command(flatten)]
        instance: Instance,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        /// Worker threads (default: all cores). Output does not depend on it.
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, default_value_t = EXTREMUM_TOL)]
        tol: f64,
    },
    /// Certificates for a range of n.
    Sweep {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_alpha)]
        alpha: ExponentPair64,
        #[arg(long)]
        n_min: usize,
        #[arg(long)]
        n_max: usize,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, default_value_t = EXTREMUM_TOL)]
        tol: f64,
    },
    /// Tabulate the two-value profile functions for plotting.
    Profile {
        #[command(flatten)]
        instance: Instance,
        #[arg(long, default_value_t = 1000)]
        points: usize,
        /// Comma-separated subset of g,p,f,U,V,W,fprime.
        #[arg(long, default_value = "f")]
        which: String,
    },
    /// Power sum along the three-number curve with fixed sum and product.
    Reduce3 {
        #[arg(long)]
        sum: f64,
        #[arg(long)]
        prod: f64,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_real, default_value = "2")]
        r: f64,
        #[arg(long, default_value_t = 1000)]
        grid: usize,
    },
}

fn parse_rational(s: &str) -> Option<Result<Rational64, String>> {
    let (p, q) = s.split_once('/')?;
    let parse = |v: &str| v.trim().parse::<i64>().map_err(|e| format!("invalid rational `{s}`: {e}"));
    Some(parse(p).and_then(|p| {
        let q = parse(q)?;
        if q == 0 {
            return Err(format!("invalid rational `{s}`: zero denominator"));
        }
        Ok(Rational64::new(p, q))
    }))
}

fn parse_alpha(s: &str) -> Result<ExponentPair64, String> {
    match parse_rational(s) {
        Some(q) => ExponentPair64::from_rational(q?).map_err(|e| e.to_string()),
        None => {
            let v: f64 = s.trim().parse().map_err(|e| format!("invalid number `{s}`: {e}"))?;
            ExponentPair64::from_alpha(v).map_err(|e| e.to_string())
        }
    }
}

fn parse_real(s: &str) -> Result<f64, String> {
    match parse_rational(s) {
        Some(q) => {
            let q = q?;
            Ok(*q.numer() as f64 / *q.denom() as f64)
        }
        None => s.trim().parse().map_err(|e| format!("invalid number `{s}`: {e}")),
    }
}

fn in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> anyhow::Result<T> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(anyhow!("--threads must be positive")),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(k).build().context("building the thread pool")?;
            Ok(pool.install(f))
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<output::Output> {
    match &cli.command {
        Command::Constants { instance, tol } => commands::constants(instance.n, instance.alpha, Tolerances::with_extremum(*tol)),
        Command::Verify { instance, samples, seed, grid, threads, tol } => {
            let config = OracleConfig { samples: *samples, seed: *seed, grid: *grid };
            in_pool(*threads, || commands::verify(instance.n, instance.alpha, Tolerances::with_extremum(*tol), config))?
        }
        Command::Sweep { alpha, n_min, n_max, threads, tol } => {
            in_pool(*threads, || commands::sweep(*alpha, *n_min, *n_max, Tolerances::with_extremum(*tol)))?
        }
        Command::Profile { instance, points, which } => {
            let which = Column::parse_list(which)?;
            commands::profile(instance.n, instance.alpha, *points, &which)
        }
        Command::Reduce3 { sum, prod, r, grid } => commands::reduce3(*sum, *prod, *r, *grid),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let out = match run(&cli) {
        Ok(out) => out,
        Err(err) => {
            eprintln!("error: {err:#}");
            return ExitCode::from(2);
        }
    };
    let timing = cli.timing.then(|| start.elapsed());
    match output::render(&out, cli.format, timing) {
        Ok(text) => print!("{text}"),
        Err(err) => {
            eprintln!("error: {err:#}");
            return ExitCode::from(2);
        }
    }
    if out.failed {
        eprintln!("verification failed");
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
