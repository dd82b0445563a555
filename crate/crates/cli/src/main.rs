//! Experiment runner: `smallprop <experiment> [--config FILE] [--key value ...]`.
//!
//! Experiments: solve, doubling, decay, census, critical, remez,
//! recursion, eigen, content. Output is CSV on stdout or at `--out`; the
//! first lines echo the resolved configuration as `# key=value`.
//! Exit codes: 0 success, 2 parse error, 3 unknown experiment, 4 solver
//! non-convergence, 5 io error, 6 measurement error. Failures print one
//! machine-readable line `error: <category>: <detail>` on stderr.

mod config;
mod experiments;

use config::{CliError, Config};

fn run() -> Result<(), CliError> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args
        .first()
        .ok_or_else(|| CliError::parse("missing experiment"))?;
    let cfg = Config::from_args(&args[1..])?;
    let out_path = cfg.get_path("out");
    let _ = cfg.get_u64("seed", 1)?; // common flag, echoed everywhere
    let csv = experiments::dispatch(name, &cfg)?;
    cfg.reject_unknown()?;
    if out_path.is_empty() {
        print!("{csv}");
    } else {
        std::fs::write(&out_path, csv).map_err(|e| CliError::io(format!("{out_path}: {e}")))?;
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("{}", e.line);
        std::process::exit(e.code);
    }
}
