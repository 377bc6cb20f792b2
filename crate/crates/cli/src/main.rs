use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pslet_cli::commands::{run, Exit};
use pslet_cli::config::{self, parse_config, Format, Mode, PartialConfig, RunConfig};
use pslet_core::StateSpec;

#[derive(Parser)]
#[command(name = "pslet", version, about = "Shifted-l expansion energies for central potentials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expansion coefficients, partial sum, Pade and reference energy per point.
    Compute(Common),
    /// Reproduce one of the three reference tables and diff against it.
    Table {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=3))]
        which: Option<u8>,
        #[command(flatten)]
        common: Common,
    },
    /// Partial sums k = -2 ... order next to the Pade and reference values.
    Converge(Common),
    /// Reference eigenvalues by direct integration.
    Oracle(Common),
}

#[derive(Args, Default)]
struct Common {
    /// cutoff:A, laser:A, family:B:A, coulomb or harmonic.
    #[arg(long)]
    potential: Option<String>,
    /// Spectroscopic label (3p) or l,nr; repeatable.
    #[arg(long = "state", value_parser = config::parse_state)]
    states: Vec<StateSpec>,
    /// Truncation parameter; repeatable, overrides the one in --potential.
    #[arg(long = "alpha", value_parser = config::parse_alpha)]
    alphas: Vec<f64>,
    /// Highest energy coefficient E^(order).
    #[arg(long)]
    order: Option<usize>,
    /// Pade degrees N,M.
    #[arg(long, value_parser = config::parse_pade)]
    pade: Option<(usize, usize)>,
    /// Working precision in decimal digits.
    #[arg(long)]
    precision: Option<u32>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// key = value file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Common {
    fn flags(&self, mode: Mode, table: Option<u8>) -> PartialConfig {
        PartialConfig {
            mode: Some(mode),
            potential: self.potential.clone(),
            states: (!self.states.is_empty()).then(|| self.states.clone()),
            alphas: (!self.alphas.is_empty()).then(|| self.alphas.clone()),
            order: self.order,
            pade: self.pade,
            precision: self.precision,
            format: self.format,
            jobs: None,
            table,
        }
    }
}

fn resolve(common: &Common, mode: Mode, table: Option<u8>) -> Result<RunConfig, String> {
    let file = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            parse_config(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => PartialConfig::default(),
    };
    RunConfig::resolve(file.overlay(common.flags(mode, table))).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Exit::Usage as u8 } else { 0 });
        }
    };
    let (common, mode, table) = match &cli.command {
        Command::Compute(c) => (c, Mode::Compute, None),
        Command::Table { which, common } => (common, Mode::Table, *which),
        Command::Converge(c) => (c, Mode::Converge, None),
        Command::Oracle(c) => (c, Mode::Oracle, None),
    };
    let cfg = match resolve(common, mode, table) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("pslet: {msg}");
            return ExitCode::from(Exit::Usage as u8);
        }
    };
    let outcome = match run(&cfg, common.jobs) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("pslet: {e}");
            return ExitCode::from(Exit::Usage as u8);
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    if let Err(e) = outcome.report.write(&cfg, &mut out).and_then(|_| out.flush()) {
        eprintln!("pslet: writing output: {e}");
        return ExitCode::from(Exit::Computation as u8);
    }
    if let Some(s) = &outcome.summary {
        eprintln!("{s}");
    }
    ExitCode::from(outcome.exit as u8)
}
