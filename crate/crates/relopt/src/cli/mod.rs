//! Batch command-line front end.
//!
//! One subcommand per invocation; all inputs come from a sectioned
//! key = value config file, all outputs land in the run directory next to
//! a manifest with content hashes. Exit codes: 0 success, 1 domain
//! failure (hypothesis or feasibility), 2 usage or config error.

pub mod commands;
pub mod config;

use std::path::PathBuf;

use crate::error::Error;
use crate::export::ArtifactWriter;
use crate::numerics::parallel::set_thread_count;
use config::RunConfig;

const USAGE: &str = "\
usage: relopt <command> --config <path> [--out <dir>] [--tol <float>] [--threads <n>]

commands:
  check        verify the structural assumptions on the configured model
  periodic     displacement map graph and periodic envelope
  optimize     minimal-cost curve and optimal release time
  convergence  finite-release-rate thresholds against the impulse limit
  pulse        bounded-rate rectangular pulse search
  two-release  split the minimal budget across two release times
  eta-sweep    periodic solution and minimizer drift in the death-rate gap
  reduction    compartment model against the scalar limit
  simulate     integrate an inline release schedule
";

struct Args {
    command: String,
    config: Option<PathBuf>,
    out: Option<PathBuf>,
    tol: Option<f64>,
    threads: Option<usize>,
}

fn parse_args(args: &[String]) -> Result<Args, String> {
    let mut it = args.iter();
    let command = it.next().ok_or_else(|| "missing command".to_string())?.clone();
    let mut parsed =
        Args { command, config: None, out: None, tol: None, threads: None };
    while let Some(flag) = it.next() {
        let mut take = || {
            it.next().ok_or_else(|| format!("flag {flag} needs a value"))
        };
        match flag.as_str() {
            "--config" | "-c" => parsed.config = Some(PathBuf::from(take()?)),
            "--out" | "-o" => parsed.out = Some(PathBuf::from(take()?)),
            "--tol" => {
                let v = take()?;
                parsed.tol =
                    Some(v.parse().map_err(|_| format!("--tol `{v}` is not a number"))?);
            }
            "--threads" => {
                let v = take()?;
                parsed.threads =
                    Some(v.parse().map_err(|_| format!("--threads `{v}` is not an integer"))?);
            }
            other => return Err(format!("unknown flag `{other}`")),
        }
    }
    Ok(parsed)
}

/// Run the CLI; returns the process exit code.
pub fn run(args: &[String]) -> i32 {
    let parsed = match parse_args(args) {
        Ok(p) => p,
        Err(msg) => {
            eprintln!("error: {msg}\n\n{USAGE}");
            return 2;
        }
    };
    if parsed.command == "help" || parsed.command == "--help" || parsed.command == "-h" {
        println!("{USAGE}");
        return 0;
    }
    let Some(config_path) = parsed.config else {
        eprintln!("error: --config <path> is required\n\n{USAGE}");
        return 2;
    };
    if let Some(n) = parsed.threads {
        set_thread_count(n.max(1));
    }

    let mut cfg = match RunConfig::load(&config_path) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    if let Some(tol) = parsed.tol {
        if !(crate::integrate::TOL_MIN..=crate::integrate::TOL_MAX).contains(&tol) {
            eprintln!("error: --tol must lie in [1e-13, 1e-3], got {tol:e}");
            return 2;
        }
        cfg.tol = tol;
    }
    if let Some(out) = parsed.out {
        cfg.out_dir = out;
    }

    let writer = match ArtifactWriter::new(
        &cfg.out_dir,
        &parsed.command,
        &config_path.display().to_string(),
        &cfg.raw.text,
    ) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match dispatch(&parsed.command, &cfg, writer) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e @ (Error::Config(_) | Error::Io(_))) => {
            eprintln!("error: {e}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(
    command: &str,
    cfg: &RunConfig,
    mut writer: ArtifactWriter,
) -> crate::Result<bool> {
    let outcome = match command {
        "check" => commands::cmd_check(cfg, &mut writer)?,
        "periodic" => commands::cmd_periodic(cfg, &mut writer)?,
        "optimize" => commands::cmd_optimize(cfg, &mut writer)?,
        "convergence" => commands::cmd_convergence(cfg, &mut writer)?,
        "pulse" => commands::cmd_pulse(cfg, &mut writer)?,
        "two-release" => commands::cmd_two_release(cfg, &mut writer)?,
        "eta-sweep" => commands::cmd_eta_sweep(cfg, &mut writer)?,
        "reduction" => commands::cmd_reduction(cfg, &mut writer)?,
        "simulate" => commands::cmd_simulate(cfg, &mut writer)?,
        other => {
            return Err(Error::Config(format!("unknown command `{other}`\n\n{USAGE}")));
        }
    };
    writer.finish()?;
    Ok(outcome.domain_ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flags() {
        let args: Vec<String> = ["check", "--config", "a.conf", "--tol", "1e-8", "--threads", "2"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let p = parse_args(&args).unwrap();
        assert_eq!(p.command, "check");
        assert_eq!(p.config, Some(PathBuf::from("a.conf")));
        assert_eq!(p.tol, Some(1e-8));
        assert_eq!(p.threads, Some(2));
    }

    #[test]
    fn rejects_unknown_flags() {
        let args: Vec<String> = ["check", "--what"].iter().map(|s| s.to_string()).collect();
        assert!(parse_args(&args).is_err());
    }
}
