use serde::{Deserialize, Serialize};

use super::DetectionConfig;
use crate::error::{Error, Result};
use crate::geometry::BirdviewMapping;
use crate::segmentation::Region;

/// Verdict on a yellow region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum YellowClass {
    /// Large enough to confirm after two consecutive sightings.
    Strong,
    /// Needs the full confirmation window.
    Weak,
    Rejected,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrangeClass {
    Cone,
    RejectedStopLine,
}

/// Minimum region area at the bird view's scale.
///
/// Areas grow with the square of the raster scale, so the reference count is
/// rescaled quadratically.
pub fn min_pixel_threshold(cfg: &DetectionConfig, m: &BirdviewMapping) -> u64 {
    let k = m.scale / cfg.reference_scale;
    ((cfg.min_pixels_base as f64 * k * k).ceil() as u64).max(1)
}

pub fn classify_yellow(region: &Region, cfg: &DetectionConfig) -> YellowClass {
    if region.lambda1 <= cfg.ev_accept {
        YellowClass::Rejected
    } else if region.lambda1 > cfg.ev_fast_track {
        YellowClass::Strong
    } else {
        YellowClass::Weak
    }
}

/// Guarded eigenvalue ratio `(lambda1 + eps) / (lambda2 + eps)`.
pub fn eigen_ratio(region: &Region, eps: f64) -> f64 {
    (region.lambda1 + eps) / (region.lambda2 + eps)
}

pub fn classify_orange(region: &Region, cfg: &DetectionConfig) -> OrangeClass {
    if eigen_ratio(region, cfg.ratio_eps) > cfg.cone_ratio_threshold {
        OrangeClass::Cone
    } else {
        OrangeClass::RejectedStopLine
    }
}

/// Geometric mean of the closest cone and stop-line ratios.
///
/// Fails unless every cone ratio exceeds every stop-line ratio.
pub fn calibrate_cone_ratio(cone_ratios: &[f64], stop_ratios: &[f64]) -> Result<f64> {
    let lo = cone_ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = stop_ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if cone_ratios.is_empty() || stop_ratios.is_empty() {
        return Err(Error::InvalidConfig("calibration needs cone and stop-line samples".into()));
    }
    if !(lo > hi && hi > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "cone ratios (min {lo}) do not separate from stop lines (max {hi})"
        )));
    }
    Ok((lo * hi).sqrt())
}
