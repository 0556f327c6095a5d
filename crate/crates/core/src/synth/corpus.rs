//! Randomized road scenes for evaluation and calibration.
//!
//! The road is straight along `x`: a solid white line on the right, dashed
//! yellow center markings and a solid white line bounding the left lane.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::scene::{GroundElement, ObstacleKind, ObstacleSpec, SceneSpec};
use super::truth::{scene_ground_truth, LaneGeometry};
use super::SynthCamera;
use crate::detection::DetectionConfig;
use crate::geometry::GroundPoint;

pub const RIGHT_LINE: (f64, f64) = (-0.16, -0.11);
pub const CENTER_DASH: (f64, f64) = (0.11, 0.135);
pub const LEFT_LINE: (f64, f64) = (0.355, 0.405);
pub const DASH_LENGTH: f64 = 0.1;
pub const DASH_GAP: f64 = 0.1;

pub const ROAD_LANE: LaneGeometry = LaneGeometry {
    right_inner_y: RIGHT_LINE.1,
    left_inner_y: LEFT_LINE.0,
};

fn stripe(x0: f64, x1: f64, (y0, y1): (f64, f64), color: [u8; 3]) -> GroundElement {
    GroundElement {
        center: GroundPoint::new(0.5 * (x0 + x1), 0.5 * (y0 + y1)),
        yaw: 0.0,
        length: x1 - x0,
        width: y1 - y0,
        color,
    }
}

/// Lane markings between `x_from` and `x_to`; `dash_phase` shifts the dashes.
pub fn straight_road(x_from: f64, x_to: f64, dash_phase: f64) -> Vec<GroundElement> {
    let mut out = vec![
        stripe(x_from, x_to, RIGHT_LINE, SceneSpec::WHITE),
        stripe(x_from, x_to, LEFT_LINE, SceneSpec::WHITE),
    ];
    let period = DASH_LENGTH + DASH_GAP;
    let mut x = x_from + dash_phase.rem_euclid(period);
    while x + DASH_LENGTH <= x_to {
        out.push(stripe(x, x + DASH_LENGTH, CENTER_DASH, SceneSpec::LANE_YELLOW));
        x += period;
    }
    out
}

/// Stop line across the robot's lane.
pub fn stop_line(x: f64, depth: f64, (y0, y1): (f64, f64)) -> GroundElement {
    stripe(x - 0.5 * depth, x + 0.5 * depth, (y0, y1), SceneSpec::STOP_RED)
}

/// Consecutive frames of one drive. The first `warmup` frames let the
/// tracker confirm what is in view and are not scored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sequence {
    pub frames: Vec<SceneSpec>,
    pub warmup: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorpusParams {
    pub sequences: usize,
    pub scored_per_sequence: usize,
    pub warmup: usize,
    /// Distance driven between frames, meters.
    pub step_m: f64,
    /// Fraction of cone-free sequences that get a stop line.
    pub stop_line_prob: f64,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for CorpusParams {
    fn default() -> Self {
        Self {
            sequences: 50,
            scored_per_sequence: 6,
            warmup: 2,
            step_m: 0.02,
            stop_line_prob: 0.4,
            noise_sigma: 0.0,
            seed: 1,
        }
    }
}

fn random_obstacle(rng: &mut ChaCha8Rng, kind: ObstacleKind, x: f64, y: f64) -> ObstacleSpec {
    let p = GroundPoint::new(x, y);
    match kind {
        ObstacleKind::Duck => ObstacleSpec::duck(p, rng.random_range(0.04..0.06), rng.random_range(0.04..0.055)),
        ObstacleKind::Cone => ObstacleSpec::cone(p, rng.random_range(0.04..0.05), rng.random_range(0.06..0.075)),
    }
}

fn random_kind(rng: &mut ChaCha8Rng) -> ObstacleKind {
    if rng.random_bool(0.55) {
        ObstacleKind::Duck
    } else {
        ObstacleKind::Cone
    }
}

/// Bearing interval of an obstacle base seen from the robot origin.
fn bearing_interval(o: &ObstacleSpec) -> (f64, f64) {
    let (x, y) = (o.position.x, o.position.y);
    let half = (0.5 * o.footprint_m / x.hypot(y)).asin();
    let phi = y.atan2(x);
    (phi - half, phi + half)
}

/// Obstacles do not hide or touch each other from the robot's viewpoint.
fn well_separated(obs: &[ObstacleSpec], gap: f64) -> bool {
    obs.iter().enumerate().all(|(i, a)| {
        obs[i + 1..].iter().all(|b| {
            let (a0, a1) = bearing_interval(a);
            let (b0, b1) = bearing_interval(b);
            a1 + gap < b0 || b1 + gap < a0
        })
    })
}

fn sample_layout(rng: &mut ChaCha8Rng, x_min: f64) -> Vec<ObstacleSpec> {
    let mut obs = Vec::new();
    // slot ahead of the robot
    if rng.random_bool(0.8) {
        let kind = random_kind(rng);
        let (x, y) = match kind {
            ObstacleKind::Duck => (rng.random_range(x_min..1.3), rng.random_range(-0.02..0.02)),
            ObstacleKind::Cone => (rng.random_range(x_min..1.2), rng.random_range(-0.05..0.05)),
        };
        obs.push(random_obstacle(rng, kind, x, y));
    }
    // beyond the right boundary
    if rng.random_bool(0.5) {
        let kind = random_kind(rng);
        let x_hi = if kind == ObstacleKind::Cone { 1.2 } else { 1.3 };
        let x = rng.random_range((x_min + 0.1).max(0.45)..x_hi);
        let y = rng.random_range(-0.27..-0.21);
        obs.push(random_obstacle(rng, kind, x, y));
    }
    // in the left lane
    if rng.random_bool(0.5) {
        let kind = random_kind(rng);
        let x_hi = if kind == ObstacleKind::Cone { 1.2 } else { 1.3 };
        let x = rng.random_range((x_min + 0.1).max(0.45)..x_hi);
        let y = rng.random_range(0.2..0.28);
        obs.push(random_obstacle(rng, kind, x, y));
    }
    obs
}

/// Sequences of a robot driving straight past randomized obstacles.
///
/// Layouts are redrawn until every obstacle stays fully visible and inside
/// the detection range for the whole sequence and no two obstacles overlap
/// in bearing.
pub fn detection_corpus(params: &CorpusParams, cam: &SynthCamera, cfg: &DetectionConfig) -> Vec<Sequence> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n_frames = params.warmup + params.scored_per_sequence;
    let travel = params.step_m * (n_frames.saturating_sub(1)) as f64;
    let x_min = 0.3 + travel;
    let mut out = Vec::with_capacity(params.sequences);
    while out.len() < params.sequences {
        let obstacles = sample_layout(&mut rng, x_min);
        if obstacles.is_empty() || !well_separated(&obstacles, 0.03) {
            continue;
        }
        let has_cone = obstacles.iter().any(|o| o.kind == ObstacleKind::Cone);
        let mut ground = straight_road(-0.5, 4.0, rng.random_range(0.0..DASH_LENGTH + DASH_GAP));
        if !has_cone && rng.random_bool(params.stop_line_prob) {
            let depth = 0.048;
            ground.push(stop_line(rng.random_range(x_min..1.3), depth, (RIGHT_LINE.1, CENTER_DASH.0)));
        }
        let base = SceneSpec {
            ground_elements: ground,
            obstacles,
            noise_sigma: params.noise_sigma,
            ..SceneSpec::default()
        };
        let frames: Vec<SceneSpec> = (0..n_frames)
            .map(|k| {
                let mut s = base.advanced(params.step_m * k as f64);
                s.seed = rng.random();
                s
            })
            .collect();
        let visible = frames
            .iter()
            .all(|f| scene_ground_truth(f, cam, cfg, &ROAD_LANE).len() == f.obstacles.len());
        if visible {
            out.push(Sequence {
                frames,
                warmup: params.warmup,
            });
        }
    }
    out
}

/// Straight approaches toward a single obstacle in the robot's lane.
pub fn stop_approach_sequences(n: usize, step_m: f64, seed: u64) -> Vec<Sequence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let kind = if i % 2 == 0 { ObstacleKind::Duck } else { ObstacleKind::Cone };
            let x0 = rng.random_range(1.1..1.4);
            let y = rng.random_range(-0.02..0.02);
            let obstacle = random_obstacle(&mut rng, kind, x0, y);
            let base = SceneSpec {
                ground_elements: straight_road(-0.5, 4.0, rng.random_range(0.0..DASH_LENGTH + DASH_GAP)),
                obstacles: vec![obstacle],
                ..SceneSpec::default()
            };
            // drive until the obstacle base would be 5 cm away
            let n_frames = ((x0 - 0.05) / step_m).floor() as usize + 1;
            Sequence {
                frames: (0..n_frames).map(|k| base.advanced(step_m * k as f64)).collect(),
                warmup: 0,
            }
        })
        .collect()
}

/// Single-object scenes for fixing the cone/stop-line ratio cut: cones
/// across the detection range and stop lines of varying width.
pub fn cone_calibration_scenes(seed: u64) -> (Vec<SceneSpec>, Vec<SceneSpec>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cones = Vec::new();
    let mut lines = Vec::new();
    for i in 0..24 {
        let x = 0.3 + 0.9 * i as f64 / 23.0;
        let y = rng.random_range(-0.25..0.25) * x.min(1.0);
        let obstacle = random_obstacle(&mut rng, ObstacleKind::Cone, x, y);
        cones.push(SceneSpec {
            ground_elements: straight_road(-0.5, 4.0, 0.0),
            obstacles: vec![obstacle],
            ..SceneSpec::default()
        });
        let width = rng.random_range(0.2..0.3);
        let y0 = rng.random_range(-0.15..0.0);
        let x = 0.3 + 1.1 * i as f64 / 23.0;
        let mut ground = straight_road(-0.5, 4.0, 0.0);
        ground.push(stop_line(x, rng.random_range(0.04..0.05), (y0, y0 + width)));
        lines.push(SceneSpec {
            ground_elements: ground,
            ..SceneSpec::default()
        });
    }
    (cones, lines)
}
