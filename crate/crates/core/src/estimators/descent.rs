use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelParams, MeasurementSet};
use crate::geometry::{AnchorSet, Point};
use crate::model::{counts, Scene};
use crate::{Error, Result, LENGTH_SCALE};

/// Iterates closer than this (internal units) to an anchor are rejected.
const ANCHOR_GUARD: f64 = 1e-9;

/// How the step size is chosen at each iteration. Both rules halve the step
/// until the cost does not increase.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepRule {
    /// Barzilai-Borwein step `sᵀt / tᵀt` from the last displacement `s` and
    /// gradient change `t`; the base step is used on the first iteration and
    /// whenever `sᵀt ≤ 0`.
    #[default]
    BarzilaiBorwein,
    /// The base step on every iteration.
    Fixed,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Init {
    #[default]
    Centroid,
    Point(Point),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GdOptions {
    /// Base step size `μ` in m² per squared count. When unset, the inverse
    /// of the largest Gauss-Newton curvature of the cost at the current
    /// iterate is used.
    pub step_size: Option<f64>,
    pub step_rule: StepRule,
    pub max_iters: usize,
    /// Stop once `‖∇J‖` (squared counts per meter) falls to this. Defaults to
    /// `1e-12 · α / L₀⁴` with `L₀` = 1 μm.
    pub grad_tol: Option<f64>,
    pub max_halvings: u32,
    pub init: Init,
}

impl Default for GdOptions {
    fn default() -> Self {
        Self {
            step_size: None,
            step_rule: StepRule::BarzilaiBorwein,
            max_iters: 500,
            grad_tol: None,
            max_halvings: 30,
            init: Init::Centroid,
        }
    }
}

impl GdOptions {
    pub fn validate(&self) -> Result<()> {
        if let Some(mu) = self.step_size {
            if !(mu.is_finite() && mu > 0.0) {
                return Err(Error::NonPositive { what: "step size", value: mu });
            }
        }
        if let Some(tol) = self.grad_tol {
            if !(tol.is_finite() && tol >= 0.0) {
                return Err(Error::NonPositive { what: "gradient tolerance", value: tol });
            }
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    GradientTolerance,
    MaxIterations,
    /// No step within the halving budget decreased the cost.
    Stalled,
}

/// Every iterate `y[0], y[1], …` with its cost.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub iterates: Vec<Point>,
    pub costs: Vec<f64>,
    pub converged: bool,
    pub iterations_used: usize,
    pub stop: StopReason,
}

impl Trajectory {
    pub fn last(&self) -> &Point {
        self.iterates.last().expect("trajectory holds the initial point")
    }
}

struct Cost<'a> {
    scene: &'a Scene,
    z: &'a [f64],
}

impl Cost<'_> {
    fn value(&self, y: &DVector<f64>) -> Result<f64> {
        let offs = self.scene.offsets(y)?;
        Ok(offs
            .iter()
            .zip(self.z)
            .map(|(o, z)| {
                let e = z - self.scene.alpha / o.d.powi(3);
                e * e
            })
            .sum())
    }

    /// `2 Σ (z_i − g(d_i)) ġ(d_i) (x_i − y) / d_i` with `g = α/d³`,
    /// `ġ = −3α/d⁴`.
    fn gradient(&self, y: &DVector<f64>) -> Result<DVector<f64>> {
        let a = self.scene.alpha;
        let mut g = DVector::zeros(y.len());
        for (o, z) in self.scene.offsets(y)?.iter().zip(self.z) {
            let resid = z - a / o.d.powi(3);
            let slope = -3.0 * a / o.d.powi(4);
            g.axpy(2.0 * resid * slope / o.d, &o.r, 1.0);
        }
        Ok(g)
    }

    /// Inverse of the largest eigenvalue of `2 Σ ġ_i² u_i u_iᵀ`.
    fn curvature_step(&self, y: &DVector<f64>) -> Result<f64> {
        let a = self.scene.alpha;
        let n = y.len();
        let mut h = DMatrix::zeros(n, n);
        for o in self.scene.offsets(y)? {
            let slope = 3.0 * a / o.d.powi(4);
            let u = &o.r / o.d;
            h.ger(2.0 * slope * slope, &u, &u, 1.0);
        }
        let lmax = h.symmetric_eigenvalues().max();
        Ok(1.0 / lmax)
    }

    fn near_anchor(&self, y: &DVector<f64>) -> bool {
        self.scene.anchors.iter().any(|x| (x - y).norm() < ANCHOR_GUARD)
    }
}

/// `J(y) = Σ (z_i − α/d_i³)²`.
pub fn gd_cost(y: &Point, anchors: &AnchorSet, measurements: &MeasurementSet, params: &ChannelParams) -> Result<f64> {
    let scene = Scene::new(anchors, params)?;
    let z = counts(measurements, anchors)?;
    Cost { scene: &scene, z: &z }.value(&scene.point(y)?)
}

/// `∂J/∂y` in squared counts per meter.
pub fn gd_gradient(
    y: &Point,
    anchors: &AnchorSet,
    measurements: &MeasurementSet,
    params: &ChannelParams,
) -> Result<Vec<f64>> {
    let scene = Scene::new(anchors, params)?;
    let z = counts(measurements, anchors)?;
    let g = Cost { scene: &scene, z: &z }.gradient(&scene.point(y)?)?;
    Ok(g.iter().map(|v| v / LENGTH_SCALE).collect())
}

/// Runs `y[k+1] = y[k] − μ_k ∇J(y[k])` from the configured start point.
///
/// `μ_k` comes from [`StepRule`] and is halved (up to `max_halvings` times)
/// whenever the step would not lower the cost or land within 1e-9 μm of an
/// anchor, so the recorded costs strictly decrease.
pub fn gradient_descent(
    anchors: &AnchorSet,
    measurements: &MeasurementSet,
    params: &ChannelParams,
    opts: &GdOptions,
) -> Result<Trajectory> {
    opts.validate()?;
    let scene = Scene::new(anchors, params)?;
    let z = counts(measurements, anchors)?;
    let cost = Cost { scene: &scene, z: &z };

    let mut y = match &opts.init {
        Init::Centroid => anchors.centroid().to_scaled(),
        Init::Point(p) => scene.point(p)?,
    };
    // scaled units: μ_SI / L₀², tol_SI · L₀
    let base_step = opts.step_size.map(|mu| mu / (LENGTH_SCALE * LENGTH_SCALE));
    let tol = opts.grad_tol.map_or(1e-12 * scene.alpha, |t| t * LENGTH_SCALE);

    let mut c = cost.value(&y)?;
    if !c.is_finite() {
        return Err(Error::NonFiniteCost { iteration: 0 });
    }
    let mut g = cost.gradient(&y)?;
    let mut iterates = vec![Point::from_scaled(&y)?];
    let mut costs = vec![c];
    let mut prev: Option<(DVector<f64>, DVector<f64>)> = None;
    let mut stop = StopReason::MaxIterations;

    for _ in 0..opts.max_iters {
        if g.norm() <= tol {
            stop = StopReason::GradientTolerance;
            break;
        }
        let fallback = match base_step {
            Some(mu) => mu,
            None => cost.curvature_step(&y)?,
        };
        let mut mu = match (opts.step_rule, &prev) {
            (StepRule::BarzilaiBorwein, Some((s, t))) => {
                let st = s.dot(t);
                if st > 0.0 {
                    st / t.norm_squared()
                } else {
                    fallback
                }
            }
            _ => fallback,
        };

        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let cand = &y - &g * mu;
            if !cost.near_anchor(&cand) {
                if let Ok(cc) = cost.value(&cand) {
                    if cc.is_finite() && cc < c {
                        accepted = Some((cand, cc));
                        break;
                    }
                }
            }
            mu *= 0.5;
        }
        let Some((next, next_cost)) = accepted else {
            stop = StopReason::Stalled;
            break;
        };
        let next_grad = cost.gradient(&next)?;
        prev = Some((&next - &y, &next_grad - &g));
        y = next;
        c = next_cost;
        g = next_grad;
        iterates.push(Point::from_scaled(&y)?);
        costs.push(c);
    }
    if stop == StopReason::MaxIterations && g.norm() <= tol {
        stop = StopReason::GradientTolerance;
    }

    Ok(Trajectory {
        iterations_used: iterates.len() - 1,
        converged: stop == StopReason::GradientTolerance,
        iterates,
        costs,
        stop,
    })
}
