use serde::{Deserialize, Serialize};

use super::{Obstacle, ObstacleClass};
use crate::avoidance::AvoidanceCommand;
use crate::geometry::PixelCoord;

/// Wire form of one obstacle. `z_m` carries the radius, negated when a lane
/// boundary separates the obstacle from the robot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObstacleRecord {
    pub x_m: f64,
    pub y_m: f64,
    pub z_m: f64,
    pub quad_px: [[f64; 2]; 4],
    pub frame_index: u64,
    pub timestamp: f64,
    pub class: ObstacleClass,
}

impl ObstacleRecord {
    pub fn from_obstacle(o: &Obstacle, frame_index: u64, timestamp: f64) -> Self {
        Self {
            x_m: o.x,
            y_m: o.y,
            z_m: if o.in_lane { o.radius } else { -o.radius },
            quad_px: o.quad.map(|p| [p.u, p.v]),
            frame_index,
            timestamp,
            class: o.class,
        }
    }

    pub fn in_lane(&self) -> bool {
        self.z_m > 0.0
    }

    pub fn to_obstacle(&self) -> Obstacle {
        Obstacle {
            x: self.x_m,
            y: self.y_m,
            radius: self.z_m.abs(),
            in_lane: self.in_lane(),
            quad: self.quad_px.map(|[u, v]| PixelCoord::new(u, v)),
            class: self.class,
        }
    }
}

/// Everything emitted for one processed frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub frame_index: u64,
    pub timestamp: f64,
    pub obstacles: Vec<ObstacleRecord>,
    pub command: AvoidanceCommand,
}
