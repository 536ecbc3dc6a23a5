//! Diffusion channel forward model.
//!
//! A point release of `Q` molecules into an unbounded 3-D medium produces the
//! concentration profile
//!
//! ```text
//! c(d, t) = Q / (4πDt)^{3/2} · exp(−d² / (4Dt))
//! ```
//!
//! which peaks at `t* = d²/(6D)` with value `(3/(2πe))^{3/2} Q / d³`. A sensor
//! with sampling volume `V_s` therefore sees a Poisson peak count with mean
//! `λ = α / d³`, where `α` absorbs `Q`, `V_s` and the peak constant.

use std::f64::consts::{E, PI};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::{distance, AnchorSet, Point};
use crate::poisson::{Poisson, MAX_RATE};
use crate::{Error, Result, LENGTH_SCALE};

/// Which coefficient multiplies `Q / d³` in the peak-count law.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PeakModel {
    /// `(3/(2πe))^{3/2}`: the exact maximum of the impulse response over time.
    #[default]
    Derived,
    /// `(3/(2πD·e^{1/D}))^{3/2}`, evaluated in log space. At physical
    /// diffusion coefficients this underflows to zero in linear space.
    PaperLiteral,
}

/// Measurement noise applied by the samplers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Noise {
    #[default]
    Poisson,
    /// Return the expected count itself, real-valued.
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    /// Molecules released per pulse.
    pub molecules: f64,
    /// Diffusion coefficient, m²/s.
    pub diffusion: f64,
    /// Sampling period of the sensor time series, s.
    pub sampling_period: f64,
    /// Sensor sampling volume, m³.
    pub sampling_volume: f64,
    pub peak_model: PeakModel,
    pub noise: Noise,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            molecules: 5e5,
            diffusion: 1e-9,
            sampling_period: 1e-5,
            sampling_volume: 1e-18,
            peak_model: PeakModel::Derived,
            noise: Noise::Poisson,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        for (what, value) in [
            ("molecule count", self.molecules),
            ("diffusion coefficient", self.diffusion),
            ("sampling period", self.sampling_period),
            ("sampling volume", self.sampling_volume),
        ] {
            positive(what, value)?;
        }
        Ok(())
    }

    pub fn with_molecules(&self, molecules: f64) -> Self {
        Self { molecules, ..self.clone() }
    }
}

fn positive(what: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::NonPositive { what, value })
    }
}

/// The peak-count coefficient `α`, held as its natural logarithm (SI units,
/// molecules·m³) so that the literal model can be represented at all.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Alpha {
    ln: f64,
}

impl Alpha {
    /// `ln α` in SI units.
    pub fn ln(&self) -> f64 {
        self.ln
    }

    /// `α` in SI units, or `None` if it underflows or overflows.
    pub fn linear(&self) -> Option<f64> {
        representable(self.ln.exp())
    }

    /// `α / L₀³`: the coefficient in internal length units, where the expected
    /// count at scaled distance `s` is `α_s / s³`.
    pub fn scaled(&self) -> Result<f64> {
        representable((self.ln - 3.0 * LENGTH_SCALE.ln()).exp())
            .ok_or(Error::AlphaUnrepresentable { ln_alpha: self.ln })
    }

    /// Multiplies `α` by a positive factor.
    pub fn times(&self, factor: f64) -> Alpha {
        Alpha { ln: self.ln + factor.ln() }
    }

    pub fn from_linear(alpha: f64) -> Result<Alpha> {
        Ok(Alpha { ln: positive("alpha", alpha)?.ln() })
    }
}

fn representable(x: f64) -> Option<f64> {
    (x.is_finite() && x.is_normal()).then_some(x)
}

/// Expected concentration (molecules/m³) at distance `d` (m) and time `t` (s)
/// after the release.
pub fn cir(d: f64, t: f64, params: &ChannelParams) -> Result<f64> {
    positive("distance", d)?;
    positive("time", t)?;
    let dt4 = 4.0 * params.diffusion * t;
    Ok(params.molecules / (PI * dt4).powf(1.5) * (-(d * d) / dt4).exp())
}

/// Time at which [`cir`] peaks: `d² / (6D)`.
pub fn peak_time(d: f64, params: &ChannelParams) -> Result<f64> {
    positive("distance", d)?;
    Ok(d * d / (6.0 * params.diffusion))
}

pub fn alpha(params: &ChannelParams) -> Alpha {
    let ln_q_v = params.molecules.ln() + params.sampling_volume.ln();
    let ln = match params.peak_model {
        PeakModel::Derived => 1.5 * (3.0 / (2.0 * PI * E)).ln() + ln_q_v,
        PeakModel::PaperLiteral => {
            let d = params.diffusion;
            1.5 * ((3.0 / (2.0 * PI)).ln() - d.ln() - 1.0 / d) + ln_q_v
        }
    };
    Alpha { ln }
}

/// Mean peak count `α / d³` at distance `d` (m).
pub fn expected_peak_count(d: f64, params: &ChannelParams) -> Result<f64> {
    positive("distance", d)?;
    let s = d / LENGTH_SCALE;
    Ok(alpha(params).scaled()? / (s * s * s))
}

/// One sensor's report to the fusion centre.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub sensor_index: usize,
    /// Peak count. Integer-valued under Poisson noise, real-valued when noise
    /// is disabled.
    pub z: f64,
    /// Expected count the sample was drawn from, when known.
    pub lambda: Option<f64>,
}

/// One measurement per anchor, in anchor order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Measurement>", into = "Vec<Measurement>")]
pub struct MeasurementSet {
    measurements: Vec<Measurement>,
}

impl MeasurementSet {
    pub fn new(measurements: Vec<Measurement>) -> Result<Self> {
        for (i, m) in measurements.iter().enumerate() {
            if m.sensor_index != i {
                return Err(Error::InvalidMeasurement { sensor: m.sensor_index, reason: "out of order" });
            }
            if !m.z.is_finite() || m.z < 0.0 {
                return Err(Error::InvalidMeasurement { sensor: i, reason: "count must be finite and non-negative" });
            }
        }
        Ok(Self { measurements })
    }

    /// Builds a set from bare counts in anchor order.
    pub fn from_counts(counts: &[f64]) -> Result<Self> {
        Self::new(
            counts.iter().enumerate().map(|(sensor_index, &z)| Measurement { sensor_index, z, lambda: None }).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.measurements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measurements.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Measurement> {
        self.measurements.iter()
    }

    pub fn counts(&self) -> Vec<f64> {
        self.measurements.iter().map(|m| m.z).collect()
    }

    pub(crate) fn check_len(&self, anchors: &AnchorSet) -> Result<()> {
        if self.len() != anchors.len() {
            return Err(Error::MeasurementCount { expected: anchors.len(), found: self.len() });
        }
        Ok(())
    }
}

impl TryFrom<Vec<Measurement>> for MeasurementSet {
    type Error = Error;

    fn try_from(m: Vec<Measurement>) -> Result<Self> {
        Self::new(m)
    }
}

impl From<MeasurementSet> for Vec<Measurement> {
    fn from(m: MeasurementSet) -> Self {
        m.measurements
    }
}

fn draw<R: Rng + ?Sized>(mean: f64, noise: Noise, rng: &mut R) -> Result<f64> {
    match noise {
        Noise::None => Ok(mean),
        Noise::Poisson => Ok(Poisson::new(mean)?.sample(rng) as f64),
    }
}

/// Draws the peak count reported by a sensor at distance `d`.
pub fn sample_peak_measurement<R: Rng + ?Sized>(
    sensor_index: usize,
    d: f64,
    params: &ChannelParams,
    rng: &mut R,
) -> Result<Measurement> {
    let lambda = expected_peak_count(d, params)?;
    let z = draw(lambda, params.noise, rng)?;
    Ok(Measurement { sensor_index, z, lambda: Some(lambda) })
}

/// Draws one peak count per anchor for a source at `source`. Sensors are
/// sampled in anchor order from the same stream.
pub fn simulate<R: Rng + ?Sized>(
    anchors: &AnchorSet,
    source: &Point,
    params: &ChannelParams,
    rng: &mut R,
) -> Result<MeasurementSet> {
    let mut out = Vec::with_capacity(anchors.len());
    for (i, a) in anchors.points().iter().enumerate() {
        let d = distance(a, source)?;
        if d == 0.0 {
            return Err(Error::CoincidentWithAnchor { anchor: i });
        }
        out.push(sample_peak_measurement(i, d, params, rng)?);
    }
    MeasurementSet::new(out)
}

/// Exact expected counts `α / d_i³`.
pub fn noise_free_measurements(anchors: &AnchorSet, source: &Point, params: &ChannelParams) -> Result<MeasurementSet> {
    let params = ChannelParams { noise: Noise::None, ..params.clone() };
    // The stream is never touched without noise.
    simulate(anchors, source, &params, &mut crate::seed::stream(0))
}

/// One sample of a sensor's concentration time series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSample {
    /// 1-based sample index `k`; the sample is taken at `k·T_s`.
    pub k: usize,
    pub t: f64,
    pub z: f64,
    /// `V_s · c(d, k·T_s)`.
    pub mean: f64,
}

/// `M` samples at times `T_s, 2T_s, …, M·T_s`, each independently Poisson
/// with mean `V_s · c(d, k·T_s)`.
pub fn sample_time_series<R: Rng + ?Sized>(
    d: f64,
    samples: usize,
    params: &ChannelParams,
    rng: &mut R,
) -> Result<Vec<TimeSample>> {
    positive("distance", d)?;
    if samples == 0 {
        return Err(Error::EmptySeries);
    }
    (1..=samples)
        .map(|k| {
            let t = k as f64 * params.sampling_period;
            let mean = params.sampling_volume * cir(d, t, params)?;
            if mean > MAX_RATE {
                return Err(Error::PoissonRate(mean));
            }
            Ok(TimeSample { k, t, z: draw(mean, params.noise, rng)?, mean })
        })
        .collect()
}

/// The sample with the largest count; ties go to the earliest sample.
pub fn peak_pick(series: &[TimeSample]) -> Result<&TimeSample> {
    let mut best = series.first().ok_or(Error::EmptySeries)?;
    for s in &series[1..] {
        if s.z > best.z {
            best = s;
        }
    }
    Ok(best)
}
