//! Reactive planner: gate obstacles by a box ahead of the robot, express
//! them in the lane frame and either shift the lateral reference into the
//! free corridor or stop.

use serde::{Deserialize, Serialize};

use crate::detection::Obstacle;
use crate::error::{Error, Result};
use crate::geometry::GroundPoint;

/// Robot pose relative to the lane: lateral offset `d` from the lane middle
/// and heading `theta` relative to the lane direction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LanePose {
    pub d: f64,
    pub theta: f64,
}

/// Point in the lane frame: `s` along the lane, `e` signed offset from the middle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LanePoint {
    pub s: f64,
    pub e: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GatingBox {
    pub length: f64,
    pub half_width: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AvoidanceConfig {
    #[serde(rename = "lane_width_m")]
    pub lane_width: f64,
    #[serde(rename = "robot_width_m")]
    pub robot_width: f64,
    #[serde(rename = "safety_margin_m")]
    pub safety_margin: f64,
    #[serde(rename = "box_length_m")]
    pub box_length: f64,
    #[serde(rename = "box_half_width_m")]
    pub box_half_width: f64,
    #[serde(rename = "cruise_speed_mps")]
    pub cruise_speed: f64,
    /// Stop on every gated obstacle instead of attempting to pass.
    pub strict_stop: bool,
}

impl Default for AvoidanceConfig {
    // lane and robot widths are estimates for a desk-scale track
    fn default() -> Self {
        Self {
            lane_width: 0.46,
            robot_width: 0.13,
            safety_margin: 0.05,
            box_length: 0.5,
            box_half_width: 0.15,
            cruise_speed: 0.2,
            strict_stop: true,
        }
    }
}

impl AvoidanceConfig {
    pub fn gating_box(&self) -> GatingBox {
        GatingBox {
            length: self.box_length,
            half_width: self.box_half_width,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.robot_width > 0.0 && self.lane_width > self.robot_width) {
            return Err(Error::InvalidConfig("need lane_width > robot_width > 0".into()));
        }
        if !(self.safety_margin >= 0.0) {
            return Err(Error::InvalidConfig("safety_margin must be non-negative".into()));
        }
        if !(self.box_length > 0.0 && self.box_half_width > 0.0) {
            return Err(Error::InvalidConfig("gating box dimensions must be positive".into()));
        }
        if !(self.cruise_speed >= 0.0) {
            return Err(Error::InvalidConfig("cruise_speed must be non-negative".into()));
        }
        Ok(())
    }
}

/// Planner output: lateral reference, speed reference and whether the
/// avoidance behavior overrides normal lane following.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AvoidanceCommand {
    #[serde(rename = "d_ref_m")]
    pub d_ref: f64,
    #[serde(rename = "v_ref_mps")]
    pub v_ref: f64,
    pub active: bool,
}

impl AvoidanceCommand {
    fn pass_through(cfg: &AvoidanceConfig) -> Self {
        Self {
            d_ref: 0.0,
            v_ref: cfg.cruise_speed,
            active: false,
        }
    }

    fn stop() -> Self {
        Self {
            d_ref: 0.0,
            v_ref: 0.0,
            active: true,
        }
    }
}

/// Keeps in-lane obstacles inside the box `0 < x <= length`, `|y| <= half_width`.
pub fn gate_obstacles(obs: &[Obstacle], gate: &GatingBox) -> Vec<Obstacle> {
    obs.iter()
        .filter(|o| o.in_lane && o.x > 0.0 && o.x <= gate.length && o.y.abs() <= gate.half_width)
        .cloned()
        .collect()
}

/// Robot-frame ground point to lane frame: rotate by `-theta`, shift by `d`.
pub fn to_lane_frame(p: GroundPoint, pose: LanePose) -> Result<LanePoint> {
    if !(pose.theta.abs() < std::f64::consts::FRAC_PI_2) {
        return Err(Error::InvalidPose { theta: pose.theta });
    }
    let (sin, cos) = pose.theta.sin_cos();
    Ok(LanePoint {
        s: cos * p.x + sin * p.y,
        e: -sin * p.x + cos * p.y + pose.d,
    })
}

/// Widest free lateral corridor `(low, high)` left in the lane by an
/// obstacle occupying `[e - r, e + r]`, taken on the side away from its center.
fn free_corridor(e: f64, r: f64, half_lane: f64) -> (f64, f64) {
    if e >= 0.0 {
        (-half_lane, (e - r).min(half_lane))
    } else {
        ((e + r).max(-half_lane), half_lane)
    }
}

pub fn plan(obs: &[Obstacle], pose: LanePose, cfg: &AvoidanceConfig) -> AvoidanceCommand {
    let gated = gate_obstacles(obs, &cfg.gating_box());
    match gated.as_slice() {
        [] => AvoidanceCommand::pass_through(cfg),
        [one] if !cfg.strict_stop => {
            let Ok(lp) = to_lane_frame(GroundPoint::new(one.x, one.y), pose) else {
                return AvoidanceCommand::stop();
            };
            let half_lane = cfg.lane_width / 2.0;
            let (lo, hi) = free_corridor(lp.e, one.radius, half_lane);
            let gap = hi - lo;
            if gap >= cfg.robot_width + cfg.safety_margin {
                let bound = half_lane - cfg.robot_width / 2.0;
                AvoidanceCommand {
                    d_ref: (0.5 * (lo + hi)).clamp(-bound, bound),
                    v_ref: cfg.cruise_speed,
                    active: true,
                }
            } else {
                AvoidanceCommand::stop()
            }
        }
        _ => AvoidanceCommand::stop(),
    }
}
