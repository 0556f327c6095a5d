use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::scene::{ObstacleKind, SceneSpec};
use super::SynthCamera;
use crate::detection::DetectionConfig;

/// Lateral positions of the inner edges of the two white boundary lines.
/// Anything strictly between them is inside the lane boundaries.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaneGeometry {
    pub right_inner_y: f64,
    pub left_inner_y: f64,
}

impl LaneGeometry {
    pub fn contains(&self, y: f64) -> bool {
        y > self.right_inner_y && y < self.left_inner_y
    }
}

/// Expected detection for one obstacle of a synthetic scene.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruthObstacle {
    pub kind: ObstacleKind,
    pub x_m: f64,
    pub y_m: f64,
    pub radius_m: f64,
    pub in_lane: bool,
}

/// Obstacles a detector is expected to report: base center no farther than
/// the crop distance and the whole base line imaged inside the kept part of
/// the frame.
pub fn scene_ground_truth(
    spec: &SceneSpec,
    cam: &SynthCamera,
    cfg: &DetectionConfig,
    lane: &LaneGeometry,
) -> Vec<TruthObstacle> {
    let crop_row = cam
        .model()
        .ok()
        .and_then(|m| m.crop_row_for_distance(cfg.crop_distance).ok());
    let Some(crop_row) = crop_row else {
        return Vec::new();
    };
    let (w, h) = (cam.pinhole.width as f64, cam.pinhole.height as f64);
    let visible = |x: f64, y: f64| {
        cam.project(Vector3::new(x, y, 0.0)).is_some_and(|p| {
            p.u >= 0.0 && p.u <= w - 1.0 && p.v >= crop_row as f64 && p.v <= h - 1.0
        })
    };
    let mut out: Vec<TruthObstacle> = spec
        .obstacles
        .iter()
        .filter(|o| o.position.x > 0.0 && o.position.x <= cfg.crop_distance)
        .filter(|o| {
            let (x, y) = (o.position.x, o.position.y);
            let n = x.hypot(y);
            let (tx, ty) = (-y / n * 0.5 * o.footprint_m, x / n * 0.5 * o.footprint_m);
            visible(x + tx, y + ty) && visible(x - tx, y - ty)
        })
        .map(|o| TruthObstacle {
            kind: o.kind,
            x_m: o.position.x,
            y_m: o.position.y,
            radius_m: 0.5 * o.footprint_m,
            in_lane: lane.contains(o.position.y),
        })
        .collect();
    out.sort_by(|a, b| a.x_m.total_cmp(&b.x_m));
    out
}
