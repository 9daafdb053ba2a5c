//! `heisenlab`: batch experiment runner for the heisenlab toolkit.
//!
//! Exit codes: 0 on success, 1 on usage or validation errors, 2 when a
//! numeric solver fails to converge.

mod commands;
mod config;
mod trace;

use clap::error::ErrorKind;
use clap::Parser;
use std::process::ExitCode;

use commands::Cli;

fn threads_from_env() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("HEISENLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| anyhow::anyhow!("HEISENLAB_THREADS must be a positive integer, got {raw:?}"))?;
    if n == 0 {
        anyhow::bail!("HEISENLAB_THREADS must be a positive integer, got 0");
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let numeric = err
        .chain()
        .filter_map(|e| e.downcast_ref::<heisenlab::Error>())
        .any(heisenlab::Error::is_numeric);
    if numeric {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match threads_from_env().and_then(|()| commands::run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solver_failures_map_to_two() {
        let numeric = anyhow::Error::from(heisenlab::Error::NonConvergence {
            iterations: 200,
            residual: 1.0,
            width: 1.0,
        });
        assert_eq!(exit_code(&numeric), 2);
        assert_eq!(exit_code(&numeric.context("geodesic")), 2);
        let invalid = anyhow::Error::from(heisenlab::Error::HypothesisViolation { k: 1, n: 1 });
        assert_eq!(exit_code(&invalid), 1);
        assert_eq!(exit_code(&anyhow::anyhow!("bad flag")), 1);
    }
}
