use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use lowmach_harness::output::{to_json, write_cpe, write_pair, write_pe, write_sweep};
use lowmach_harness::{run_cpe, run_pair, run_pe, run_sweep, verify, ExperimentConfig};

#[derive(Parser)]
#[command(
    name = "lowmach",
    version,
    about = "Low Mach number limit experiments for the primitive equations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Incompressible primitive equations alone.
    RunPe(Common),
    /// Compressible primitive equations alone at one ε.
    RunCpe(Common),
    /// Both systems side by side from well-prepared data.
    RunPair(Common),
    /// Paired runs over `eps_list` with rate fits and plots.
    Sweep(Common),
    /// Self-checks; exits nonzero if any fails.
    Verify(Common),
}

#[derive(Args)]
struct Common {
    /// JSON experiment configuration; the desk-scale defaults otherwise.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, overriding `out_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run a single ε instead of `eps_list`.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    quiet: bool,
}

impl Common {
    /// The configuration with overrides applied, not yet validated.
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                ExperimentConfig::load_unchecked(path).with_context(|| format!("loading {}", path.display()))?
            }
            None => ExperimentConfig::default(),
        };
        if let Some(out) = &self.out {
            cfg.out_dir = out.clone();
        }
        if let Some(eps) = self.eps {
            cfg = cfg.with_eps(eps);
        }
        Ok(cfg)
    }

    fn say(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", msg.as_ref());
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::RunPe(c) => {
            let cfg = c.load()?.validated()?;
            let rows = run_pe(&cfg)?;
            let path = write_pe(&cfg.out_dir, &rows)?;
            c.say(format!("{} rows -> {}", rows.len(), path.display()));
        }
        Command::RunCpe(c) => {
            let cfg = c.load()?.validated()?;
            for &eps in &cfg.eps_list {
                let rows = run_cpe(&cfg, eps)?;
                let path = write_cpe(&cfg.out_dir, eps, &rows)?;
                c.say(format!("eps = {eps}: {} rows -> {}", rows.len(), path.display()));
            }
        }
        Command::RunPair(c) => {
            let cfg = c.load()?.validated()?;
            for &eps in &cfg.eps_list {
                let run = run_pair(&cfg, eps)?;
                let path = write_pair(&cfg.out_dir, &run)?;
                let sup = run.sup_metrics();
                c.say(format!(
                    "eps = {eps}: sup |v - v_p|_H2 = {:.3e}, sup E = {:.3e} -> {}",
                    sup.v_h2,
                    run.sup(|r| r.energy.total()),
                    path.display()
                ));
            }
        }
        Command::Sweep(c) => {
            let cfg = c.load()?.validated()?;
            let report = run_sweep(&cfg)?;
            let paths = write_sweep(&cfg.out_dir, &report)?;
            let s = &report.summary;
            c.say(format!(
                "slope {:.4}, r2 {:.4}, energy ratio {:.3}",
                s.slope, s.r2, s.energy_ratio
            ));
            c.say(format!("pass: {}", to_json(&s.pass)));
            for p in paths {
                c.say(format!("wrote {}", p.display()));
            }
            if !s.pass.all() {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Verify(c) => {
            // an invalid config is reported as a failed check, not an error
            let cfg = c.load()?;
            let checks = verify(&cfg);
            for ch in &checks {
                c.say(format!(
                    "{} {:<16} {}",
                    if ch.passed { "PASS" } else { "FAIL" },
                    ch.name,
                    ch.detail
                ));
            }
            if checks.iter().any(|ch| !ch.passed) {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
