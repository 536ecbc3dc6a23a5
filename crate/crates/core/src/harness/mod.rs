//! Monte Carlo experiments and result export.

mod config;
mod experiment;
mod export;

pub use config::{
    ChannelConfig, EstimatorChoice, FailurePolicy, GeometryConfig, GradientDescentConfig, Scenario, ScenarioConfig,
    SweepConfig,
};
pub use experiment::{
    run_convergence, run_mse_sweep, simulate_once, snr, triangulate_once, ConvergenceResult, Estimate, EstimatorKind,
    Snr, SweepResult, SweepRow,
};
pub use export::{export_results, fmt_f64, read_json, write_results, Format, ResultDocument, Table};
