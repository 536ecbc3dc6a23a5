//! CSV and JSON output.
//!
//! CSV carries only the result table, one header row then one row per
//! record, with every float printed to 17 significant digits. JSON wraps the
//! result together with the fully resolved scenario configuration so a run
//! can be reproduced from its output alone.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::channel::MeasurementSet;
use crate::crb::CrbResult;
use crate::Result;

use super::config::ScenarioConfig;
use super::experiment::{ConvergenceResult, Estimate, SweepResult};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Shortest exact-width decimal rendering: 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Tabular view of a result for CSV export.
pub trait Table {
    fn header(&self) -> Vec<String>;
    fn rows(&self) -> Vec<Vec<String>>;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument<T> {
    pub config: ScenarioConfig,
    pub seed: u64,
    pub result: T,
}

impl<T> ResultDocument<T> {
    pub fn new(config: &ScenarioConfig, result: T) -> Self {
        Self { config: config.clone(), seed: config.seed, result }
    }
}

pub fn write_results<T: Table + Serialize, W: Write>(doc: &ResultDocument<T>, out: W, format: Format) -> Result<()> {
    match format {
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, doc)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(doc.result.header())?;
            for row in doc.result.rows() {
                w.write_record(row)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

pub fn export_results<T: Table + Serialize>(doc: &ResultDocument<T>, path: &Path, format: Format) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_results(doc, &mut out, format)?;
    out.flush()?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<ResultDocument<T>> {
    let f = File::open(path)?;
    Ok(serde_json::from_reader(std::io::BufReader::new(f))?)
}

impl Table for SweepResult {
    fn header(&self) -> Vec<String> {
        ["estimator", "molecules", "snr_raw", "snr_db", "mse_m2", "mse_se_m2", "crb_m2", "trials_used", "failures"]
            .map(String::from)
            .to_vec()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.estimator.name().to_string(),
                    fmt_f64(r.molecules),
                    fmt_f64(r.snr_raw),
                    fmt_f64(r.snr_db),
                    fmt_f64(r.mse_m2),
                    fmt_f64(r.mse_se_m2),
                    fmt_f64(r.crb_m2),
                    r.trials_used.to_string(),
                    r.failures.to_string(),
                ]
            })
            .collect()
    }
}

const AXES: [&str; 3] = ["x", "y", "z"];

fn axis_columns(prefix: &str, dim: usize) -> impl Iterator<Item = String> + '_ {
    AXES[..dim].iter().map(move |a| format!("{prefix}{a}_m"))
}

impl Table for ConvergenceResult {
    fn header(&self) -> Vec<String> {
        let dim = self.source_m.dim();
        std::iter::once("iteration".to_string())
            .chain(axis_columns("", dim))
            .chain(["cost".to_string(), "squared_error_m2".to_string()])
            .collect()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let t = &self.trajectory;
        t.iterates
            .iter()
            .zip(&t.costs)
            .zip(&self.squared_error_m2)
            .enumerate()
            .map(|(k, ((p, c), e))| {
                std::iter::once(k.to_string())
                    .chain(p.coords().iter().map(|v| fmt_f64(*v)))
                    .chain([fmt_f64(*c), fmt_f64(*e)])
                    .collect()
            })
            .collect()
    }
}

impl Table for MeasurementSet {
    fn header(&self) -> Vec<String> {
        ["sensor_index", "z", "lambda"].map(String::from).to_vec()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.iter()
            .map(|m| vec![m.sensor_index.to_string(), fmt_f64(m.z), m.lambda.map(fmt_f64).unwrap_or_default()])
            .collect()
    }
}

impl Table for Estimate {
    fn header(&self) -> Vec<String> {
        let dim = self.source_m.dim();
        std::iter::once("estimator".to_string())
            .chain(axis_columns("estimate_", dim))
            .chain(axis_columns("source_", dim))
            .chain(["squared_error_m2".to_string()])
            .collect()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        vec![std::iter::once(self.estimator.name().to_string())
            .chain(self.estimate_m.coords().iter().map(|v| fmt_f64(*v)))
            .chain(self.source_m.coords().iter().map(|v| fmt_f64(*v)))
            .chain([fmt_f64(self.squared_error_m2)])
            .collect()]
    }
}

impl Table for CrbResult {
    fn header(&self) -> Vec<String> {
        let m = &self.fim.matrix;
        std::iter::once("crb_m2".to_string())
            .chain((0..m.nrows()).flat_map(|r| (0..m.ncols()).map(move |c| format!("fim_{r}{c}_per_m2"))))
            .collect()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let m = &self.fim.matrix;
        vec![std::iter::once(fmt_f64(self.crb))
            .chain((0..m.nrows()).flat_map(|r| (0..m.ncols()).map(move |c| fmt_f64(m[(r, c)]))))
            .collect()]
    }
}
