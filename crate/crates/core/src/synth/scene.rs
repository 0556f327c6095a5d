use serde::{Deserialize, Serialize};

use crate::colorspace::ColorGain;
use crate::geometry::GroundPoint;

/// A painted rectangle on the ground (lane line, dash, stop line).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundElement {
    pub center: GroundPoint,
    /// Heading of the long side, radians from the `x` axis.
    #[serde(default)]
    pub yaw: f64,
    pub length: f64,
    pub width: f64,
    pub color: [u8; 3],
}

impl GroundElement {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let (s, c) = self.yaw.sin_cos();
        let (dx, dy) = (x - self.center.x, y - self.center.y);
        let along = c * dx + s * dy;
        let across = -s * dx + c * dy;
        along.abs() <= 0.5 * self.length && across.abs() <= 0.5 * self.width
    }

    /// Axis-aligned bounds `(x_min, x_max, y_min, y_max)`.
    pub(crate) fn bounds(&self) -> (f64, f64, f64, f64) {
        let (s, c) = self.yaw.sin_cos();
        let ex = 0.5 * (self.length * c.abs() + self.width * s.abs());
        let ey = 0.5 * (self.length * s.abs() + self.width * c.abs());
        (self.center.x - ex, self.center.x + ex, self.center.y - ey, self.center.y + ey)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObstacleKind {
    Duck,
    Cone,
}

/// Flat vertical billboard standing on the ground, always facing the camera.
///
/// A duck is a full rectangle; a cone tapers linearly to a fifth of its
/// base width at the top.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObstacleSpec {
    pub kind: ObstacleKind,
    /// Base center on the ground.
    pub position: GroundPoint,
    pub footprint_m: f64,
    pub height_m: f64,
    pub color: [u8; 3],
}

impl ObstacleSpec {
    pub fn duck(position: GroundPoint, footprint_m: f64, height_m: f64) -> Self {
        Self {
            kind: ObstacleKind::Duck,
            position,
            footprint_m,
            height_m,
            color: SceneSpec::DUCK_YELLOW,
        }
    }

    pub fn cone(position: GroundPoint, footprint_m: f64, height_m: f64) -> Self {
        Self {
            kind: ObstacleKind::Cone,
            position,
            footprint_m,
            height_m,
            color: SceneSpec::CONE_ORANGE,
        }
    }

    /// Half width of the billboard at height `z`.
    pub fn half_width_at(&self, z: f64) -> f64 {
        let base = 0.5 * self.footprint_m;
        match self.kind {
            ObstacleKind::Duck => base,
            ObstacleKind::Cone => base * (1.0 - 0.8 * z / self.height_m),
        }
    }
}

/// Declarative description of one synthetic frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SceneSpec {
    pub ground_color: [u8; 3],
    /// Color seen above the horizon.
    pub background_color: [u8; 3],
    pub ground_elements: Vec<GroundElement>,
    pub obstacles: Vec<ObstacleSpec>,
    /// Per-channel gain applied after rendering, to stress color robustness.
    pub ambient: Option<ColorGain>,
    /// Standard deviation of additive Gaussian pixel noise, intensity units.
    pub noise_sigma: f64,
    /// Horizontal box-blur length in pixels, 0 or 1 disables.
    pub motion_blur_px: u32,
    pub seed: u64,
    /// Supersampling grid per pixel axis.
    pub samples_per_axis: u32,
}

impl Default for SceneSpec {
    fn default() -> Self {
        Self {
            ground_color: [45, 45, 48],
            background_color: [95, 95, 110],
            ground_elements: Vec::new(),
            obstacles: Vec::new(),
            ambient: None,
            noise_sigma: 0.0,
            motion_blur_px: 0,
            seed: 0,
            samples_per_axis: 2,
        }
    }
}

impl SceneSpec {
    pub const WHITE: [u8; 3] = [235, 235, 235];
    pub const LANE_YELLOW: [u8; 3] = [230, 190, 40];
    pub const STOP_RED: [u8; 3] = [215, 75, 40];
    pub const DUCK_YELLOW: [u8; 3] = [245, 205, 25];
    pub const CONE_ORANGE: [u8; 3] = [240, 110, 30];

    /// Shifts every element as if the robot drove `dist` meters forward.
    pub fn advanced(&self, dist: f64) -> Self {
        let mut out = self.clone();
        for e in &mut out.ground_elements {
            e.center.x -= dist;
        }
        for o in &mut out.obstacles {
            o.position.x -= dist;
        }
        out
    }
}
