//! From a camera frame to confirmed, lane-labeled obstacles.
//!
//! Yellow regions (ducks) pass an eigenvalue floor and a short tracking
//! window. Orange regions (cones) are told apart from stop lines by their
//! eigenvalue ratio and need no tracking.

mod classify;
pub mod draw;
mod pose;
mod record;
mod track;

pub use classify::{
    calibrate_cone_ratio, classify_orange, classify_yellow, eigen_ratio, min_pixel_threshold, OrangeClass,
    YellowClass,
};
pub use pose::{lane_boundary_check, obstacle_pose, pose_from_bottom_edge, robot_anchor};
pub use record::{FrameRecord, ObstacleRecord};
pub use track::{Candidate, Confirmation, Track, TrackerState};

use image::RgbImage;
use serde::{Deserialize, Serialize};

use crate::colorspace::{apply_band_filter, apply_color_gain, BinaryMask, ColorBand, ColorGain, HsvImage};
use crate::error::{Error, Result};
use crate::geometry::{warp_to_birdview, BirdviewMapping, CameraModel, Interpolation, PixelCoord};
use crate::segmentation::{all_region_properties, label_components, ColorClass, LabelImage, Region};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BandSet {
    pub yellow: ColorBand,
    pub orange: ColorBand,
    pub white: ColorBand,
}

impl Default for BandSet {
    fn default() -> Self {
        Self {
            yellow: ColorBand::default_yellow(),
            orange: ColorBand::default_orange(),
            white: ColorBand::default_white(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectionConfig {
    /// Minimum region area in pixels at `reference_scale`.
    pub min_pixels_base: u32,
    /// Bird-view pixels per meter at which `min_pixels_base` applies.
    pub reference_scale: f64,
    /// Yellow regions need `lambda1` above this, pixels^2.
    pub ev_accept: f64,
    /// Yellow regions above this confirm after two frames.
    pub ev_fast_track: f64,
    /// Relative `lambda1` change that forces the full confirmation window.
    pub size_change_max: f64,
    pub confirm_frames: u32,
    pub cone_ratio_threshold: f64,
    pub ratio_eps: f64,
    /// Association gate between consecutive frames, meters.
    pub track_gate: f64,
    #[serde(rename = "crop_distance_m")]
    pub crop_distance: f64,
    pub birdview_width: u32,
    pub interpolation: Interpolation,
    pub white_run_min: u32,
    pub bands: BandSet,
    /// Per-channel correction applied before anything else.
    pub color_gain: Option<ColorGain>,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        Self {
            min_pixels_base: 340,
            reference_scale: 200.0,
            ev_accept: 20.0,
            ev_fast_track: 100.0,
            size_change_max: 0.5,
            confirm_frames: 3,
            cone_ratio_threshold: 64.0,
            ratio_eps: 1e-6,
            track_gate: 0.1,
            crop_distance: 1.7,
            birdview_width: 640,
            interpolation: Interpolation::Bilinear,
            white_run_min: 3,
            bands: BandSet::default(),
            color_gain: None,
        }
    }
}

impl DetectionConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("reference_scale", self.reference_scale),
            ("ev_accept", self.ev_accept),
            ("ev_fast_track", self.ev_fast_track),
            ("cone_ratio_threshold", self.cone_ratio_threshold),
            ("ratio_eps", self.ratio_eps),
            ("track_gate", self.track_gate),
            ("crop_distance_m", self.crop_distance),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.size_change_max > 0.0 && self.size_change_max <= 1.0) {
            return Err(Error::InvalidConfig("size_change_max must lie in (0, 1]".into()));
        }
        if self.min_pixels_base == 0 || self.confirm_frames == 0 || self.white_run_min == 0 {
            return Err(Error::InvalidConfig(
                "min_pixels_base, confirm_frames and white_run_min must be at least 1".into(),
            ));
        }
        if self.birdview_width < 2 {
            return Err(Error::InvalidConfig("birdview_width must be at least 2".into()));
        }
        self.bands.yellow.validate()?;
        self.bands.orange.validate()?;
        self.bands.white.validate()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObstacleClass {
    Duck,
    Cone,
}

/// A confirmed obstacle in the robot frame (x forward, y left, meters).
#[derive(Clone, Debug, PartialEq)]
pub struct Obstacle {
    pub x: f64,
    pub y: f64,
    pub radius: f64,
    pub in_lane: bool,
    /// Bird-view bounding box, top-left, top-right, bottom-right, bottom-left.
    pub quad: [PixelCoord; 4],
    pub class: ObstacleClass,
}

/// Intermediate products of one frame, for inspection and debug output.
#[derive(Clone, Debug)]
pub struct FrameAnalysis {
    pub mapping: BirdviewMapping,
    pub birdview: RgbImage,
    pub yellow: BinaryMask,
    pub orange: BinaryMask,
    pub white: BinaryMask,
    pub yellow_labels: LabelImage,
    pub orange_labels: LabelImage,
    /// Candidates from this frame before tracking.
    pub candidates: Vec<Candidate>,
    pub cones: Vec<Region>,
    pub obstacles: Vec<Obstacle>,
}

/// Crop row and bird-view mapping for a camera and config.
pub fn birdview_mapping(cam: &CameraModel, cfg: &DetectionConfig) -> Result<BirdviewMapping> {
    let crop_row = cam.crop_row_for_distance(cfg.crop_distance)?;
    cam.compute_birdview_transform(crop_row, cfg.birdview_width)
}

/// Runs the full pipeline on one frame, advancing the tracker.
pub fn detect_obstacles(
    frame: &RgbImage,
    cam: &CameraModel,
    cfg: &DetectionConfig,
    tracker: &mut TrackerState,
    frame_index: u64,
) -> Result<Vec<Obstacle>> {
    let m = birdview_mapping(cam, cfg)?;
    Ok(analyze_frame(frame, &m, cfg, tracker, frame_index)?.obstacles)
}

/// The pipeline with a precomputed mapping, keeping every intermediate product.
pub fn analyze_frame(
    frame: &RgbImage,
    m: &BirdviewMapping,
    cfg: &DetectionConfig,
    tracker: &mut TrackerState,
    frame_index: u64,
) -> Result<FrameAnalysis> {
    let (w, h) = frame.dimensions();
    let (want_w, want_h) = (m.src_width, m.src_height + m.crop_row);
    if (w, h) != (want_w, want_h) {
        return Err(Error::FrameSize {
            got_w: w,
            got_h: h,
            want_w,
            want_h,
        });
    }
    if let Some(previous) = tracker.last_frame() {
        if frame_index <= previous {
            return Err(Error::NonMonotonicFrame {
                frame: frame_index,
                previous,
            });
        }
    }
    let corrected;
    let frame = match &cfg.color_gain {
        Some(g) if !g.is_identity() => {
            corrected = apply_color_gain(frame, g);
            &corrected
        }
        _ => frame,
    };
    let cropped = image::imageops::crop_imm(frame, 0, m.crop_row, w, h - m.crop_row).to_image();
    let birdview = warp_to_birdview(&cropped, m, cfg.interpolation);
    let hsv = HsvImage::from_rgb(&birdview);
    let yellow = apply_band_filter(&hsv, &cfg.bands.yellow);
    let orange = apply_band_filter(&hsv, &cfg.bands.orange);
    let white = apply_band_filter(&hsv, &cfg.bands.white);
    let yellow_labels = label_components(&yellow);
    let orange_labels = label_components(&orange);
    let min_area = min_pixel_threshold(cfg, m);

    let mut candidates = Vec::new();
    for region in all_region_properties(&yellow_labels, ColorClass::Yellow)? {
        if region.area < min_area {
            continue;
        }
        let strength = classify_yellow(&region, cfg);
        if strength == YellowClass::Rejected {
            continue;
        }
        let (ground_pos, radius) = obstacle_pose(&region, m);
        if radius > 0.0 {
            candidates.push(Candidate {
                region,
                ground_pos,
                radius,
                frame: frame_index,
                strength,
            });
        }
    }
    let cones: Vec<Region> = all_region_properties(&orange_labels, ColorClass::Orange)?
        .into_iter()
        .filter(|r| r.area >= min_area && classify_orange(r, cfg) == OrangeClass::Cone)
        .collect();

    let confirmed = tracker.track_update(candidates.clone(), frame_index, cfg)?;
    let anchor = robot_anchor(m);
    let horizon = cfg.crop_distance + m.pixel_size();
    let mut obstacles = Vec::new();
    let mut push = |region: &Region, pos: crate::geometry::GroundPoint, radius: f64, class| {
        if pos.x > horizon || !(radius > 0.0) {
            return;
        }
        let px = m.ground_to_bird(pos);
        let in_lane = lane_boundary_check(&white, anchor, px, radius * m.scale, cfg.white_run_min);
        obstacles.push(Obstacle {
            x: pos.x,
            y: pos.y,
            radius,
            in_lane,
            quad: region.quad,
            class,
        });
    };
    for c in &confirmed {
        let cand = &c.candidate;
        push(&cand.region, cand.ground_pos, cand.radius, ObstacleClass::Duck);
    }
    for r in &cones {
        let (pos, radius) = obstacle_pose(r, m);
        push(r, pos, radius, ObstacleClass::Cone);
    }
    obstacles.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));

    Ok(FrameAnalysis {
        mapping: m.clone(),
        birdview,
        yellow,
        orange,
        white,
        yellow_labels,
        orange_labels,
        candidates,
        cones,
        obstacles,
    })
}

/// A camera stream: fixed calibration and config plus tracker state.
#[derive(Clone, Debug)]
pub struct Detector {
    cfg: DetectionConfig,
    mapping: BirdviewMapping,
    tracker: TrackerState,
}

impl Detector {
    pub fn new(cam: &CameraModel, cfg: DetectionConfig) -> Result<Self> {
        cfg.validate()?;
        let mapping = birdview_mapping(cam, &cfg)?;
        Ok(Self {
            cfg,
            mapping,
            tracker: TrackerState::new(),
        })
    }

    pub fn config(&self) -> &DetectionConfig {
        &self.cfg
    }

    pub fn mapping(&self) -> &BirdviewMapping {
        &self.mapping
    }

    pub fn tracker(&self) -> &TrackerState {
        &self.tracker
    }

    pub fn process(&mut self, frame: &RgbImage, frame_index: u64) -> Result<Vec<Obstacle>> {
        Ok(self.analyze(frame, frame_index)?.obstacles)
    }

    pub fn analyze(&mut self, frame: &RgbImage, frame_index: u64) -> Result<FrameAnalysis> {
        analyze_frame(frame, &self.mapping, &self.cfg, &mut self.tracker, frame_index)
    }
}
