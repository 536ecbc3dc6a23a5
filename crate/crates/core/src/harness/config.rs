//! Scenario configuration file.
//!
//! A scenario is a TOML document. Physical quantities are SI with the unit in
//! the key name. Unknown keys anywhere in the document are rejected.
//!
//! ```toml
//! seed = 1
//! trials = 10000
//! estimator = "triangulation"     # triangulation | gradient-descent | both
//! failure_policy = "resample"      # resample | count-as-failure
//!
//! [geometry]
//! anchors_m = [[0.0, 1e-5], [-8.66e-6, -5e-6], [8.66e-6, -5e-6]]
//! source_m = [1e-6, 2e-6]
//!
//! [channel]
//! molecules = 5e5
//! diffusion_m2_per_s = 1e-9
//!
//! [sweep]
//! molecules = [5e5, 5e6, 5e7]
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelParams, Noise, PeakModel};
use crate::estimators::{GdOptions, Init, StepRule};
use crate::geometry::{in_open_convex_hull, AnchorSet, Point};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorChoice {
    #[default]
    Triangulation,
    GradientDescent,
    Both,
}

impl EstimatorChoice {
    pub fn triangulation(self) -> bool {
        matches!(self, Self::Triangulation | Self::Both)
    }

    pub fn gradient_descent(self) -> bool {
        matches!(self, Self::GradientDescent | Self::Both)
    }
}

/// What to do when a trial draws a zero count, which triangulation cannot use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailurePolicy {
    /// Redraw the trial's measurements, up to `resample_cap` times.
    #[default]
    Resample,
    CountAsFailure,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub anchors_m: Vec<Vec<f64>>,
    pub source_m: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelConfig {
    pub molecules: f64,
    pub diffusion_m2_per_s: f64,
    pub sampling_period_s: f64,
    pub sampling_volume_m3: f64,
    pub peak_model: PeakModel,
    pub noise_free: bool,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        let p = ChannelParams::default();
        Self {
            molecules: p.molecules,
            diffusion_m2_per_s: p.diffusion,
            sampling_period_s: p.sampling_period,
            sampling_volume_m3: p.sampling_volume,
            peak_model: p.peak_model,
            noise_free: false,
        }
    }
}

impl ChannelConfig {
    pub fn params(&self) -> ChannelParams {
        ChannelParams {
            molecules: self.molecules,
            diffusion: self.diffusion_m2_per_s,
            sampling_period: self.sampling_period_s,
            sampling_volume: self.sampling_volume_m3,
            peak_model: self.peak_model,
            noise: if self.noise_free { Noise::None } else { Noise::Poisson },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GradientDescentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step_size_m2_per_count2: Option<f64>,
    pub step_rule: StepRule,
    pub max_iters: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grad_tol_count2_per_m: Option<f64>,
    pub max_halvings: u32,
    /// Start point; the anchor centroid when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub init_m: Option<Vec<f64>>,
}

impl Default for GradientDescentConfig {
    fn default() -> Self {
        let o = GdOptions::default();
        Self {
            step_size_m2_per_count2: o.step_size,
            step_rule: o.step_rule,
            max_iters: o.max_iters,
            grad_tol_count2_per_m: o.grad_tol,
            max_halvings: o.max_halvings,
            init_m: None,
        }
    }
}

impl GradientDescentConfig {
    pub fn options(&self) -> Result<GdOptions> {
        let init = match &self.init_m {
            None => Init::Centroid,
            Some(c) => Init::Point(Point::new(c.clone())?),
        };
        let opts = GdOptions {
            step_size: self.step_size_m2_per_count2,
            step_rule: self.step_rule,
            max_iters: self.max_iters,
            grad_tol: self.grad_tol_count2_per_m,
            max_halvings: self.max_halvings,
            init,
        };
        opts.validate()?;
        Ok(opts)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    /// Molecule counts to sweep. Empty means a single point at
    /// `channel.molecules`.
    pub molecules: Vec<f64>,
}

fn default_trials() -> usize {
    1
}

fn default_resample_cap() -> u32 {
    100
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub estimator: EstimatorChoice,
    #[serde(default)]
    pub failure_policy: FailurePolicy,
    #[serde(default = "default_resample_cap")]
    pub resample_cap: u32,
    /// Worker threads for Monte Carlo trials; 0 uses every core. Results do
    /// not depend on this.
    #[serde(default)]
    pub workers: usize,
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub channel: ChannelConfig,
    #[serde(default)]
    pub gradient_descent: GradientDescentConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
}

/// A configuration that passed validation.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub anchors: AnchorSet,
    pub source: Point,
    pub channel: ChannelParams,
    pub gd: GdOptions,
}

impl ScenarioConfig {
    /// Equilateral triangle of circumradius 10 μm centred at the origin with
    /// the source at (1 μm, 2 μm); Q = 5e5, D = 1e-9 m²/s, V_s = 1 μm³. The
    /// sweep covers Q over two decades in five log-spaced points.
    pub fn acceptance() -> Self {
        let r = 10e-6;
        let anchors_m = (0..3)
            .map(|k| {
                let t = std::f64::consts::FRAC_PI_2 + k as f64 * 2.0 * std::f64::consts::PI / 3.0;
                vec![r * t.cos(), r * t.sin()]
            })
            .collect();
        Self {
            seed: 20_240_601,
            trials: 10_000,
            estimator: EstimatorChoice::Triangulation,
            failure_policy: FailurePolicy::Resample,
            resample_cap: default_resample_cap(),
            workers: 0,
            geometry: GeometryConfig { anchors_m, source_m: vec![1e-6, 2e-6] },
            channel: ChannelConfig::default(),
            gradient_descent: GradientDescentConfig::default(),
            sweep: SweepConfig { molecules: (0..5).map(|k| 5e5 * 10f64.powf(0.5 * k as f64)).collect() },
        }
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario config serializes to TOML")
    }

    /// Applies a dotted-path override such as `channel.molecules=1e6`. The
    /// value is parsed as a TOML value, falling back to a bare string.
    pub fn set(&mut self, key: &str, raw: &str) -> Result<()> {
        let mut doc: toml::Table = toml::from_str(&self.to_toml_string()).map_err(|e| Error::Config(e.to_string()))?;
        let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| toml::Value::String(raw.to_string()));
        let parts: Vec<&str> = key.split('.').collect();
        let (leaf, path) = parts.split_last().ok_or_else(|| Error::Config("empty override key".into()))?;
        let mut table = &mut doc;
        for part in path {
            table = match table.get_mut(*part) {
                Some(toml::Value::Table(t)) => t,
                _ => return Err(Error::Config(format!("unknown config key `{key}`"))),
            };
        }
        table.insert(leaf.to_string(), value);
        let updated: Self = toml::Value::Table(doc)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(format!("override `{key}`: {e}")))?;
        *self = updated;
        Ok(())
    }

    pub fn validate(&self) -> Result<Scenario> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        let anchors =
            AnchorSet::new(self.geometry.anchors_m.iter().map(|c| Point::new(c.clone())).collect::<Result<_>>()?)?;
        let source = Point::new(self.geometry.source_m.clone())?;
        if source.dim() != anchors.dim() {
            return Err(Error::DimensionMismatch { expected: anchors.dim(), found: source.dim() });
        }
        if !in_open_convex_hull(&source, &anchors)? {
            return Err(Error::OutsideHull);
        }
        let channel = self.channel.params();
        channel.validate()?;
        for q in &self.sweep.molecules {
            channel.with_molecules(*q).validate()?;
        }
        let gd = self.gradient_descent.options()?;
        if let Init::Point(p) = &gd.init {
            if p.dim() != anchors.dim() {
                return Err(Error::DimensionMismatch { expected: anchors.dim(), found: p.dim() });
            }
        }
        Ok(Scenario { config: self.clone(), anchors, source, channel, gd })
    }
}
