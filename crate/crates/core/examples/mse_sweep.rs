//! Monte Carlo MSE of both estimators against the bound over a molecule sweep.
//!
//! `cargo run --release --example mse_sweep -- 2000` sets the trial count.

use molloc::harness::{run_mse_sweep, EstimatorChoice, ScenarioConfig};

fn main() -> molloc::Result<()> {
    let mut cfg = ScenarioConfig::acceptance();
    cfg.trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1000);
    cfg.estimator = EstimatorChoice::Both;
    let r = run_mse_sweep(&cfg.validate()?)?;

    println!("{:<17} {:>9} {:>7} {:>11} {:>11} {:>7}", "estimator", "Q", "SNR dB", "MSE m²", "CRB m²", "ratio");
    for row in &r.rows {
        println!(
            "{:<17} {:>9.2e} {:>7.2} {:>11.4e} {:>11.4e} {:>7.3}",
            row.estimator.name(),
            row.molecules,
            row.snr_db,
            row.mse_m2,
            row.crb_m2,
            row.mse_m2 / row.crb_m2
        );
    }
    Ok(())
}
