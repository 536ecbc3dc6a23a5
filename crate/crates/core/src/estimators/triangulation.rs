use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelParams, MeasurementSet};
use crate::geometry::{AnchorSet, Point};
use crate::model::{counts, Scene};
use crate::{Error, Result, LENGTH_SCALE};

/// Diagonal entries of `R` below this fraction of the largest are treated as
/// zero.
const RANK_TOL: f64 = 1e-12;

/// The pairwise-difference system `A y = B`.
///
/// For each anchor pair `(i, j)`, `i < j`, subtracting the squared-distance
/// equations `‖x_i − y‖² = (α/z_i)^{2/3}` eliminates `‖y‖²` and leaves
///
/// ```text
/// −2(x_i − x_j)ᵀ y = (α/z_i)^{2/3} − (α/z_j)^{2/3} − x_iᵀx_i + x_jᵀx_j
/// ```
///
/// Rows of `a` are in meters and entries of `b` in square meters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangulationSystem {
    pub pairs: Vec<(usize, usize)>,
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
}

impl TriangulationSystem {
    /// Least-squares solution via Householder QR of `A`.
    pub fn solve(&self) -> Result<Point> {
        // Work in internal units so R's diagonal is O(1).
        let a = &self.a / LENGTH_SCALE;
        let b = &self.b / (LENGTH_SCALE * LENGTH_SCALE);
        Point::from_scaled(&least_squares(a, &b)?)
    }
}

fn least_squares(a: DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    if a.nrows() < a.ncols() {
        return Err(Error::RankDeficient);
    }
    let qr = a.qr();
    let r = qr.r();
    let diag_max = r.diagonal().amax();
    if diag_max.is_nan() || diag_max <= 0.0 || r.diagonal().iter().any(|v| v.abs() <= RANK_TOL * diag_max) {
        return Err(Error::RankDeficient);
    }
    let qtb = qr.q().transpose() * b;
    r.solve_upper_triangular(&qtb).ok_or(Error::RankDeficient)
}

/// Builds the system from every unordered anchor pair.
pub fn build_system(
    anchors: &AnchorSet,
    measurements: &MeasurementSet,
    params: &ChannelParams,
) -> Result<TriangulationSystem> {
    let scene = Scene::new(anchors, params)?;
    let z = counts(measurements, anchors)?;
    let (a, b, pairs) = scaled_system(&scene, &z)?;
    Ok(TriangulationSystem { pairs, a: a * LENGTH_SCALE, b: b * (LENGTH_SCALE * LENGTH_SCALE) })
}

type Scaled = (DMatrix<f64>, DVector<f64>, Vec<(usize, usize)>);

fn scaled_system(scene: &Scene, z: &[f64]) -> Result<Scaled> {
    let r2: Vec<f64> =
        z.iter()
            .enumerate()
            .map(|(i, &zi)| {
                if zi > 0.0 {
                    Ok((scene.alpha / zi).powf(2.0 / 3.0))
                } else {
                    Err(Error::ZeroMeasurement { sensor: i })
                }
            })
            .collect::<Result<_>>()?;
    let x = &scene.anchors;
    let n = x.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let dim = scene.dim();
    let a = DMatrix::from_fn(pairs.len(), dim, |p, c| {
        let (i, j) = pairs[p];
        -2.0 * (x[i][c] - x[j][c])
    });
    let b = DVector::from_iterator(
        pairs.len(),
        pairs.iter().map(|&(i, j)| r2[i] - r2[j] - x[i].norm_squared() + x[j].norm_squared()),
    );
    Ok((a, b, pairs))
}

/// Closed-form triangulation estimate of the source location.
pub fn triangulate(anchors: &AnchorSet, measurements: &MeasurementSet, params: &ChannelParams) -> Result<Point> {
    let scene = Scene::new(anchors, params)?;
    let z = counts(measurements, anchors)?;
    let (a, b, _) = scaled_system(&scene, &z)?;
    Point::from_scaled(&least_squares(a, &b)?)
}
