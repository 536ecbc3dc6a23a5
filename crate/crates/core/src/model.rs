//! Scaled working representation shared by the estimators and the bound.

use nalgebra::DVector;

use crate::channel::{alpha, ChannelParams, MeasurementSet};
use crate::geometry::{AnchorSet, Point};
use crate::{Error, Result};

/// Anchors and `α` in internal length units.
pub(crate) struct Scene {
    pub anchors: Vec<DVector<f64>>,
    pub alpha: f64,
}

/// Offset `x_i − y` and distance `d_i` for one anchor.
pub(crate) struct Offset {
    pub r: DVector<f64>,
    pub d: f64,
}

impl Scene {
    pub fn new(anchors: &AnchorSet, params: &ChannelParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { anchors: anchors.scaled(), alpha: alpha(params).scaled()? })
    }

    pub fn dim(&self) -> usize {
        self.anchors[0].len()
    }

    pub fn point(&self, y: &Point) -> Result<DVector<f64>> {
        if y.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: y.dim() });
        }
        Ok(y.to_scaled())
    }

    pub fn offsets(&self, y: &DVector<f64>) -> Result<Vec<Offset>> {
        self.anchors
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let r = x - y;
                let d = r.norm();
                if d == 0.0 {
                    return Err(Error::CoincidentWithAnchor { anchor: i });
                }
                Ok(Offset { r, d })
            })
            .collect()
    }
}

pub(crate) fn counts(measurements: &MeasurementSet, anchors: &AnchorSet) -> Result<Vec<f64>> {
    measurements.check_len(anchors)?;
    Ok(measurements.counts())
}
