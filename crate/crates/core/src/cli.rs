//! Command-line front end.
//!
//! Every subcommand loads a scenario (the built-in acceptance scenario when
//! `--config` is omitted), applies overrides in the order `--set`, `--seed`,
//! `--noise-free`, `--peak-model`, logs the resolved configuration, runs one
//! harness operation and writes CSV or JSON to `--out` or stdout.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::channel::PeakModel;
use crate::crb::crb;
use crate::harness::{
    export_results, run_convergence, run_mse_sweep, simulate_once, triangulate_once, write_results, EstimatorChoice,
    Format, ResultDocument, ScenarioConfig, Table,
};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "molloc", version, about = "Molecular source localization experiments")]
pub struct Invocation {
    #[command(subcommand)]
    pub command: Command,
    /// Scenario file (TOML). Defaults to the built-in acceptance scenario.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Dotted-path override, e.g. `channel.molecules=1e6`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[arg(long, global = true)]
    pub noise_free: bool,
    #[arg(long, global = true, value_enum)]
    pub peak_model: Option<PeakModelArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Draw one set of peak counts.
    Simulate,
    /// Triangulate from one set of peak counts.
    Triangulate,
    /// Run gradient descent on one set of peak counts.
    GradientDescent,
    /// Fisher information and Cramér-Rao bound at the true source.
    Crb,
    /// MSE-versus-CRB Monte Carlo sweep.
    Sweep,
    /// Gradient-descent convergence trace.
    Convergence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PeakModelArg {
    Derived,
    PaperLiteral,
}

impl From<PeakModelArg> for PeakModel {
    fn from(p: PeakModelArg) -> Self {
        match p {
            PeakModelArg::Derived => PeakModel::Derived,
            PeakModelArg::PaperLiteral => PeakModel::PaperLiteral,
        }
    }
}

impl Invocation {
    /// The scenario configuration after every override.
    pub fn resolve(&self) -> Result<ScenarioConfig> {
        let mut cfg = match &self.config {
            Some(path) => ScenarioConfig::load(path)?,
            None => ScenarioConfig::acceptance(),
        };
        for o in &self.overrides {
            let (k, v) = o.split_once('=').ok_or_else(|| Error::Config(format!("override `{o}` is not KEY=VALUE")))?;
            cfg.set(k.trim(), v.trim())?;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if self.noise_free {
            cfg.channel.noise_free = true;
        }
        if let Some(p) = self.peak_model {
            cfg.channel.peak_model = p.into();
        }
        Ok(cfg)
    }
}

fn emit<T: Table + Serialize>(inv: &Invocation, doc: &ResultDocument<T>, stdout: &mut dyn Write) -> Result<()> {
    match &inv.out {
        Some(path) => export_results(doc, path, inv.format),
        None => write_results(doc, stdout, inv.format),
    }
}

/// Runs the invocation, writing results to `--out` or `stdout`.
pub fn run(inv: &Invocation, stdout: &mut dyn Write) -> Result<()> {
    let cfg = inv.resolve()?;
    log::info!("resolved configuration:\n{}", cfg.to_toml_string());
    let scenario = cfg.validate()?;
    match inv.command {
        Command::Simulate => emit(inv, &ResultDocument::new(&cfg, simulate_once(&scenario)?), stdout),
        Command::Triangulate => emit(inv, &ResultDocument::new(&cfg, triangulate_once(&scenario)?), stdout),
        Command::GradientDescent | Command::Convergence => {
            // both subcommands exist to trace the descent, whatever the sweep
            // estimator selection says
            let mut scenario = scenario;
            if !scenario.config.estimator.gradient_descent() {
                scenario.config.estimator = EstimatorChoice::GradientDescent;
            }
            let result = run_convergence(&scenario)?;
            if !result.trajectory.converged {
                log::warn!(
                    "gradient descent stopped without meeting the gradient tolerance ({:?} after {} iterations)",
                    result.trajectory.stop,
                    result.trajectory.iterations_used
                );
            }
            emit(inv, &ResultDocument::new(&scenario.config, result), stdout)
        }
        Command::Crb => {
            let r = crb(&scenario.source, &scenario.anchors, &scenario.channel)?;
            emit(inv, &ResultDocument::new(&cfg, r), stdout)
        }
        Command::Sweep => emit(inv, &ResultDocument::new(&cfg, run_mse_sweep(&scenario)?), stdout),
    }
}

/// Parses `args`, runs, and maps the outcome to a process exit code:
/// 0 on success, 2 for invalid input, 3 for numerical failure, 4 for I/O.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let inv = match Invocation::try_parse_from(args) {
        Ok(inv) => inv,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let mut stdout = std::io::stdout().lock();
    match run(&inv, &mut stdout) {
        Ok(()) => 0,
        Err(e) => {
            log::error!("{e}");
            eprintln!("error: {e}");
            e.category().exit_code()
        }
    }
}
