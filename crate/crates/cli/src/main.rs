use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use kgsae_cli::output::Bundle;
use kgsae_cli::{greens_table, preset, preset_names, run_verify, simulate, spectrum_report, ScenarioConfig, SolverKind};

#[derive(Parser)]
#[command(name = "kgsae", version, about = "Klein-Gordon evolution for self-adjoint extensions of the 1D Laplacian")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the data and write snapshots, conserved quantities and the spectrum.
    Simulate(Common),
    /// List eigenvalues, the zero-eigenvalue criterion and the classification.
    Spectrum(Common),
    /// Tabulate the resolvent kernel.
    Greens(Common),
    /// Run the invariant battery and write verify.json.
    Verify(Common),
    /// List the shipped scenarios.
    Presets,
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Shipped scenario by name.
    #[arg(long)]
    preset: Option<String>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum)]
    solver: Option<SolverKind>,
    /// Fixed eigenmode count per component; for `spectrum`, the number listed.
    #[arg(long)]
    modes: Option<usize>,
    /// Accepted for compatibility; every run is deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn load(&self, listing: bool) -> Result<ScenarioConfig> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                ScenarioConfig::from_toml(&text).with_context(|| format!("in {}", path.display()))?
            }
            (None, Some(name)) => preset(name)?,
            (None, None) => bail!("pass --config PATH or --preset NAME"),
        };
        if let Some(s) = self.solver {
            cfg.solver = s;
        }
        if let Some(n) = self.modes {
            if listing {
                cfg.spectrum.count = n;
            } else {
                cfg.truncation.modes = Some(n);
            }
        }
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Simulate(c) => {
            let sc = c.load(false)?.validate()?;
            let summary = simulate(&sc, &c.out)?;
            println!("wrote {} to {} (content {})", summary.files.join(", "), c.out.display(), summary.content_hash);
            if let Some(d) = summary.fd_difference {
                println!("largest relative L2 difference between solvers: {d:.3e}");
            }
        }
        Command::Spectrum(c) => {
            let cfg = c.load(true)?;
            cfg.validate()?;
            let files = spectrum_report(&cfg, &c.out)?;
            println!("wrote {} to {}", files.join(", "), c.out.display());
        }
        Command::Greens(c) => {
            let cfg = c.load(false)?;
            cfg.validate()?;
            let files = greens_table(&cfg, &c.out)?;
            println!("wrote {} to {}", files.join(", "), c.out.display());
        }
        Command::Verify(c) => {
            let sc = c.load(false)?.validate()?;
            let report = run_verify(&sc)?;
            for ch in &report.checks {
                let tag = if ch.pass { "PASS" } else { "FAIL" };
                println!("{tag} {}: {:.3e} (tol {:.0e}) {}", ch.name, ch.value, ch.tolerance, ch.detail);
            }
            Bundle::new(&c.out)?.write_json("verify.json", &report)?;
            if !report.pass {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Presets => {
            for name in preset_names() {
                println!("{name}");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
