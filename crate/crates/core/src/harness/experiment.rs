use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{alpha, simulate, ChannelParams, MeasurementSet, Noise};
use crate::crb::crb;
use crate::estimators::{gradient_descent, triangulate, Trajectory};
use crate::geometry::{distance, AnchorSet, Point};
use crate::seed::{trial_stream, Stream};
use crate::{Error, Result, LENGTH_SCALE};

use super::config::{FailurePolicy, Scenario};

/// Scenario-level signal measure `(1/n) Σ sqrt(α/d_i³)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snr {
    pub raw: f64,
    /// `10·log₁₀(raw)`.
    pub db: f64,
}

pub fn snr(anchors: &AnchorSet, y_star: &Point, params: &ChannelParams) -> Result<Snr> {
    let a = alpha(params).scaled()?;
    let mut sum = 0.0;
    for (i, x) in anchors.points().iter().enumerate() {
        let d = distance(x, y_star)? / LENGTH_SCALE;
        if d == 0.0 {
            return Err(Error::CoincidentWithAnchor { anchor: i });
        }
        sum += (a / (d * d * d)).sqrt();
    }
    let raw = sum / anchors.len() as f64;
    Ok(Snr { raw, db: 10.0 * raw.log10() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    Triangulation,
    GradientDescent,
}

impl EstimatorKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Triangulation => "triangulation",
            Self::GradientDescent => "gradient-descent",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub estimator: EstimatorKind,
    pub molecules: f64,
    pub snr_raw: f64,
    pub snr_db: f64,
    pub mse_m2: f64,
    /// Standard error of `mse_m2`.
    pub mse_se_m2: f64,
    pub crb_m2: f64,
    pub trials_used: usize,
    pub failures: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn for_estimator(&self, kind: EstimatorKind) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| r.estimator == kind)
    }
}

/// Squared errors (m²) of one trial, `None` where the estimator failed.
struct TrialOutcome {
    triangulation: Option<f64>,
    gradient_descent: Option<f64>,
}

/// Draws the trial's measurements. The flag is false when every attempt
/// still contained a zero count, which rules out triangulation.
fn draw_measurements(scenario: &Scenario, params: &ChannelParams, rng: &mut Stream) -> Result<(MeasurementSet, bool)> {
    let cfg = &scenario.config;
    let attempts = match cfg.failure_policy {
        FailurePolicy::Resample if cfg.estimator.triangulation() => cfg.resample_cap as usize + 1,
        _ => 1,
    };
    let mut m = simulate(&scenario.anchors, &scenario.source, params, rng)?;
    for _ in 1..attempts {
        if m.iter().all(|x| x.z > 0.0) {
            break;
        }
        m = simulate(&scenario.anchors, &scenario.source, params, rng)?;
    }
    let positive = m.iter().all(|x| x.z > 0.0);
    Ok((m, positive))
}

fn run_trial(scenario: &Scenario, params: &ChannelParams, point: u64, trial: u64) -> Result<TrialOutcome> {
    let mut rng = trial_stream(scenario.config.seed, point, trial);
    let cfg = &scenario.config;
    let sq = |p: &Point| distance(p, &scenario.source).map(|d| d * d);
    let (m, positive) = draw_measurements(scenario, params, &mut rng)?;
    let triangulation = if cfg.estimator.triangulation() && positive {
        triangulate(&scenario.anchors, &m, params).ok().map(|p| sq(&p)).transpose()?
    } else {
        None
    };
    let gradient_descent = if cfg.estimator.gradient_descent() {
        gradient_descent(&scenario.anchors, &m, params, &scenario.gd).ok().map(|t| sq(t.last())).transpose()?
    } else {
        None
    };
    Ok(TrialOutcome { triangulation, gradient_descent })
}

fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn summarize(errors: &[Option<f64>], trials: usize) -> Option<(f64, f64, usize, usize)> {
    let used: Vec<f64> = errors.iter().flatten().copied().collect();
    let n = used.len();
    if n == 0 {
        return None;
    }
    // sequential, trial-ordered sums keep the result independent of scheduling
    let mean = used.iter().sum::<f64>() / n as f64;
    let var = if n > 1 { used.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
    Some((mean, (var / n as f64).sqrt(), n, trials - n))
}

/// Runs `trials` simulate→estimate cycles at each swept molecule count and
/// reports MSE against the Cramér-Rao bound.
pub fn run_mse_sweep(scenario: &Scenario) -> Result<SweepResult> {
    let cfg = &scenario.config;
    let mut molecules =
        if cfg.sweep.molecules.is_empty() { vec![scenario.channel.molecules] } else { cfg.sweep.molecules.clone() };
    molecules.sort_by(f64::total_cmp);

    let mut rows = Vec::new();
    for (point, q) in molecules.iter().enumerate() {
        let params = scenario.channel.with_molecules(*q);
        let outcomes: Vec<TrialOutcome> = with_workers(cfg.workers, || {
            (0..cfg.trials as u64)
                .into_par_iter()
                .map(|t| run_trial(scenario, &params, point as u64, t))
                .collect::<Result<Vec<_>>>()
        })??;
        let bound = crb(&scenario.source, &scenario.anchors, &params)?.crb;
        let s = snr(&scenario.anchors, &scenario.source, &params)?;
        let mut kinds = Vec::new();
        if cfg.estimator.triangulation() {
            kinds.push((EstimatorKind::Triangulation, outcomes.iter().map(|o| o.triangulation).collect::<Vec<_>>()));
        }
        if cfg.estimator.gradient_descent() {
            kinds.push((EstimatorKind::GradientDescent, outcomes.iter().map(|o| o.gradient_descent).collect()));
        }
        for (kind, errors) in kinds {
            let (mse, se, used, failures) =
                summarize(&errors, cfg.trials).ok_or(Error::AllTrialsFailed { point, trials: cfg.trials })?;
            rows.push(SweepRow {
                estimator: kind,
                molecules: *q,
                snr_raw: s.raw,
                snr_db: s.db,
                mse_m2: mse,
                mse_se_m2: se,
                crb_m2: bound,
                trials_used: used,
                failures,
            });
        }
    }
    rows.sort_by(|a, b| a.snr_raw.total_cmp(&b.snr_raw).then(a.estimator.cmp(&b.estimator)));
    Ok(SweepResult { rows })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceResult {
    pub source_m: Point,
    pub measurements: MeasurementSet,
    pub trajectory: Trajectory,
    /// `‖y* − y[k]‖²` for every iterate, m².
    pub squared_error_m2: Vec<f64>,
}

impl ConvergenceResult {
    /// First iteration whose squared error is at or below `threshold`.
    pub fn first_below(&self, threshold: f64) -> Option<usize> {
        self.squared_error_m2.iter().position(|e| *e <= threshold)
    }
}

/// Gradient-descent trace for the first trial of the scenario at
/// `channel.molecules`. Not reaching the stopping rule is reported through
/// the trajectory, not as an error.
pub fn run_convergence(scenario: &Scenario) -> Result<ConvergenceResult> {
    if !scenario.config.estimator.gradient_descent() {
        return Err(Error::Config("convergence runs need estimator = gradient-descent or both".into()));
    }
    let mut rng = trial_stream(scenario.config.seed, 0, 0);
    let m = simulate(&scenario.anchors, &scenario.source, &scenario.channel, &mut rng)?;
    let trajectory = gradient_descent(&scenario.anchors, &m, &scenario.channel, &scenario.gd)?;
    let squared_error_m2 =
        trajectory.iterates.iter().map(|p| distance(p, &scenario.source).map(|d| d * d)).collect::<Result<_>>()?;
    Ok(ConvergenceResult { source_m: scenario.source.clone(), measurements: m, trajectory, squared_error_m2 })
}

/// One draw of the scenario's measurements (first trial stream).
pub fn simulate_once(scenario: &Scenario) -> Result<MeasurementSet> {
    let mut rng = trial_stream(scenario.config.seed, 0, 0);
    simulate(&scenario.anchors, &scenario.source, &scenario.channel, &mut rng)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub estimator: EstimatorKind,
    pub estimate_m: Point,
    pub source_m: Point,
    pub squared_error_m2: f64,
    pub measurements: MeasurementSet,
}

/// Triangulation on the first trial's measurements.
pub fn triangulate_once(scenario: &Scenario) -> Result<Estimate> {
    let m = simulate_once(scenario)?;
    let est = triangulate(&scenario.anchors, &m, &scenario.channel)?;
    let d = distance(&est, &scenario.source)?;
    Ok(Estimate {
        estimator: EstimatorKind::Triangulation,
        estimate_m: est,
        source_m: scenario.source.clone(),
        squared_error_m2: d * d,
        measurements: m,
    })
}

impl Scenario {
    /// The same scenario with measurement noise switched off.
    pub fn noise_free(&self) -> Scenario {
        let mut s = self.clone();
        s.channel.noise = Noise::None;
        s.config.channel.noise_free = true;
        s
    }
}
