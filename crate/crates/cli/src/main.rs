//! `pslab <experiment> --config <path> [--out <dir>] [--seed <int>]`
//!
//! Exit status: 0 on success, 1 when a computation fails, 2 for usage and
//! configuration errors. `PSLAB_THREADS` caps the worker pool.

mod config;
mod experiments;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use crate::config::Config;
use crate::experiments::{Failure, EXPERIMENTS};
use crate::output::{write_tables, Provenance};

#[derive(Debug, Parser)]
#[command(name = "pslab", version, about = "Phase-space experiments on finite grids")]
struct Args {
    /// One of: balian-low, trace-check, plunge-count, density, improve,
    /// dual-decay, uncertainty-sum, fock-sweep.
    experiment: String,
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides `seed` from the config file.
    #[arg(long)]
    seed: Option<u64>,
}

const USAGE: u8 = 2;
const NUMERIC: u8 = 1;

fn threads_from_env() -> Result<(), String> {
    let Ok(raw) = std::env::var("PSLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| format!("PSLAB_THREADS must be a positive integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn run(args: Args) -> Result<(), (u8, String)> {
    let usage = |m: String| (USAGE, m);
    let Some(exp) = EXPERIMENTS.iter().find(|e| e.name == args.experiment) else {
        let names: Vec<&str> = EXPERIMENTS.iter().map(|e| e.name).collect();
        return Err(usage(format!(
            "unknown experiment `{}`; expected one of {}",
            args.experiment,
            names.join(", ")
        )));
    };
    threads_from_env().map_err(usage)?;
    let cfg = Config::load(&args.config).map_err(|e| usage(e.0))?;

    let top = cfg.section("");
    if let Some(named) = top.string("experiment") {
        if named != exp.name {
            return Err(usage(format!("config is for `{named}`, not `{}`", exp.name)));
        }
    }
    let seed = match (args.seed, top.u64_opt("seed").map_err(|e| usage(e.0))?) {
        (Some(s), _) => s,
        (None, Some(s)) => s,
        (None, None) => 0,
    };

    let tables = (exp.run)(&cfg, seed).map_err(|f| match f {
        Failure::Usage(m) => (USAGE, m),
        Failure::Numeric(m) => (NUMERIC, m),
    })?;
    let prov = Provenance::new(exp.name, cfg.file_name(), cfg.bytes(), seed);
    let written = write_tables(&args.out, &tables, &prov).map_err(|m| (NUMERIC, m))?;
    for (path, t) in written.iter().zip(&tables) {
        println!("{} ({} rows)", path.display(), t.rows.len());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("pslab: {msg}");
            ExitCode::from(code)
        }
    }
}
