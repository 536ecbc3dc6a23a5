//! Poisson likelihood of the peak counts and the Cramér-Rao bound.
//!
//! With `z_i ~ Poisson(α/d_i³)` independently, the log-likelihood of a
//! candidate location `y` is
//!
//! ```text
//! L(y) = Σ z_i log(α/d_i³) − α/d_i³ − log z_i!
//! ```
//!
//! and the Fisher information at the true location is
//! `9α Σ (x_i − y*)(x_i − y*)ᵀ / d_i⁷`. The bound on the mean squared
//! error of any unbiased estimator is the trace of its inverse.
//!
//! Everything is evaluated with lengths in μm and rescaled on output, since
//! `d⁷` in meters is around 1e-40.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::channel::{ChannelParams, MeasurementSet};
use crate::geometry::{AnchorSet, Point};
use crate::model::{counts, Scene};
use crate::{Error, Result, LENGTH_SCALE};

/// Largest accepted condition number of the Fisher matrix.
pub const MAX_CONDITION: f64 = 1e12;

/// Fisher information matrix, in m⁻².
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FisherInfo {
    pub matrix: DMatrix<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrbResult {
    /// `Tr(FIM⁻¹)`, m².
    pub crb: f64,
    pub fim: FisherInfo,
}

fn prepare(y: &Point, anchors: &AnchorSet, params: &ChannelParams) -> Result<(Scene, DVector<f64>)> {
    let scene = Scene::new(anchors, params)?;
    let ys = scene.point(y)?;
    Ok((scene, ys))
}

/// Log-likelihood of `y` given the counts. The `−Σ log z_i!` term does not
/// depend on `y` and is only added when `include_constant` is set.
pub fn log_likelihood(
    y: &Point,
    measurements: &MeasurementSet,
    anchors: &AnchorSet,
    params: &ChannelParams,
    include_constant: bool,
) -> Result<f64> {
    let (scene, ys) = prepare(y, anchors, params)?;
    let z = counts(measurements, anchors)?;
    let mut total = 0.0;
    for (o, zi) in scene.offsets(&ys)?.iter().zip(&z) {
        let lambda = scene.alpha / o.d.powi(3);
        // 0·log λ is 0 even when λ underflows
        if *zi > 0.0 {
            total += zi * lambda.ln();
        }
        total -= lambda;
        if include_constant {
            total -= ln_gamma(zi + 1.0);
        }
    }
    Ok(total)
}

/// Gradient of [`log_likelihood`] with respect to `y`, in m⁻¹:
/// `3 Σ (z_i/d_i − α/d_i⁴) (x_i − y) / d_i`.
pub fn score(
    y: &Point,
    measurements: &MeasurementSet,
    anchors: &AnchorSet,
    params: &ChannelParams,
) -> Result<Vec<f64>> {
    let (scene, ys) = prepare(y, anchors, params)?;
    let z = counts(measurements, anchors)?;
    let mut s = DVector::zeros(ys.len());
    for (o, zi) in scene.offsets(&ys)?.iter().zip(&z) {
        let coef = 3.0 * (zi / o.d - scene.alpha / o.d.powi(4)) / o.d;
        s.axpy(coef, &o.r, 1.0);
    }
    Ok(s.iter().map(|v| v / LENGTH_SCALE).collect())
}

/// Hessian of [`log_likelihood`], in m⁻²:
///
/// ```text
/// −3 Σ [ (5α/d_i⁷ − 2z_i/d_i⁴)(x_i − y)(x_i − y)ᵀ + (z_i − α/d_i³)/d_i² · I_N ]
/// ```
pub fn hessian(
    y: &Point,
    measurements: &MeasurementSet,
    anchors: &AnchorSet,
    params: &ChannelParams,
) -> Result<DMatrix<f64>> {
    let (scene, ys) = prepare(y, anchors, params)?;
    let z = counts(measurements, anchors)?;
    Ok(scaled_hessian(&scene, &ys, &z)? / (LENGTH_SCALE * LENGTH_SCALE))
}

pub(crate) fn scaled_hessian(scene: &Scene, y: &DVector<f64>, z: &[f64]) -> Result<DMatrix<f64>> {
    let n = y.len();
    let a = scene.alpha;
    let mut h = DMatrix::zeros(n, n);
    for (o, zi) in scene.offsets(y)?.iter().zip(z) {
        let outer = 5.0 * a / o.d.powi(7) - 2.0 * zi / o.d.powi(4);
        h.ger(-3.0 * outer, &o.r, &o.r, 1.0);
        let iso = -3.0 * (zi - a / o.d.powi(3)) / (o.d * o.d);
        for k in 0..n {
            h[(k, k)] += iso;
        }
    }
    Ok(h)
}

fn scaled_fisher(scene: &Scene, y: &DVector<f64>) -> Result<DMatrix<f64>> {
    let n = y.len();
    let mut f = DMatrix::zeros(n, n);
    for o in scene.offsets(y)? {
        f.ger(9.0 * scene.alpha / o.d.powi(7), &o.r, &o.r, 1.0);
    }
    Ok(f)
}

/// `9α Σ (x_i − y*)(x_i − y*)ᵀ / d_i⁷`.
pub fn fisher_information(y_star: &Point, anchors: &AnchorSet, params: &ChannelParams) -> Result<FisherInfo> {
    let (scene, ys) = prepare(y_star, anchors, params)?;
    Ok(FisherInfo { matrix: scaled_fisher(&scene, &ys)? / (LENGTH_SCALE * LENGTH_SCALE) })
}

/// Inverts a symmetric positive-definite matrix after checking its
/// condition number.
fn spd_inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = m.clone().symmetric_eigenvalues();
    let (lo, hi) = (eig.min(), eig.max());
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if condition.is_nan() || condition > MAX_CONDITION {
        return Err(Error::SingularFisher { condition });
    }
    let chol = m.clone().cholesky().ok_or(Error::SingularFisher { condition })?;
    Ok(chol.inverse())
}

/// Cramér-Rao bound on the location MSE, m².
pub fn crb(y_star: &Point, anchors: &AnchorSet, params: &ChannelParams) -> Result<CrbResult> {
    let (scene, ys) = prepare(y_star, anchors, params)?;
    let f = scaled_fisher(&scene, &ys)?;
    let inv = spd_inverse(&f)?;
    Ok(CrbResult {
        crb: inv.trace() * LENGTH_SCALE * LENGTH_SCALE,
        fim: FisherInfo { matrix: f / (LENGTH_SCALE * LENGTH_SCALE) },
    })
}
