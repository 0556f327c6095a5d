//! TOML run configuration and synthetic scene files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::avoidance::{AvoidanceConfig, LanePose};
use crate::detection::DetectionConfig;
use crate::error::{Error, Result};
use crate::geometry::CameraModel;
use crate::synth::corpus::CorpusParams;
use crate::synth::{CameraPose, LaneGeometry, PinholeParams, SceneSpec, SynthCamera};

/// Pixel-to-ground homography, row-major, for frames of the given size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub homography: [f64; 9],
    pub width: u32,
    pub height: u32,
}

impl Calibration {
    pub fn camera(&self) -> Result<CameraModel> {
        CameraModel::from_row_major(self.homography, self.width, self.height)
    }

    pub fn from_camera(cam: &CameraModel) -> Self {
        let h = cam.homography();
        let mut homography = [0.0; 9];
        for r in 0..3 {
            for c in 0..3 {
                homography[3 * r + c] = h[(r, c)];
            }
        }
        Self {
            homography,
            width: cam.width(),
            height: cam.height(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputConfig {
    /// Explicit frame files, processed in the given order.
    pub files: Vec<PathBuf>,
    /// Directory of frames, processed in file-name order.
    pub dir: Option<PathBuf>,
    /// Synthetic scene file rendered on the fly.
    pub scene: Option<PathBuf>,
    /// Frame rate used for timestamps.
    pub fps: f64,
    /// Lane pose handed to the planner for every frame.
    pub lane_pose: LanePose,
}

impl Default for InputConfig {
    fn default() -> Self {
        Self {
            files: Vec::new(),
            dir: None,
            scene: None,
            fps: 3.0,
            lane_pose: LanePose::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct EmitFlags {
    pub annotated: bool,
    pub masks: bool,
    pub birdview: bool,
    pub json: bool,
    pub metrics: bool,
}

impl EmitFlags {
    pub fn all() -> Self {
        Self {
            annotated: true,
            masks: true,
            birdview: true,
            json: true,
            metrics: true,
        }
    }

    /// Parses a comma-separated list such as `annotated,json`.
    pub fn parse_list(s: &str) -> Result<Self> {
        let mut out = Self::default();
        for item in s.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item {
                "annotated" => out.annotated = true,
                "masks" => out.masks = true,
                "birdview" => out.birdview = true,
                "json" => out.json = true,
                "metrics" => out.metrics = true,
                "all" => out = Self::all(),
                other => return Err(Error::InvalidConfig(format!("unknown emit flag {other:?}"))),
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub emit: EmitFlags,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            emit: EmitFlags {
                json: true,
                metrics: true,
                ..EmitFlags::default()
            },
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Required unless the input is a scene file, which brings its own camera.
    pub calibration: Option<Calibration>,
    pub detection: DetectionConfig,
    pub avoidance: AvoidanceConfig,
    pub input: InputConfig,
    pub output: OutputConfig,
    /// Matching distance for scoring scene input against its ground truth.
    pub match_dist_m: Option<f64>,
}

impl RunConfig {
    /// Reads a config file; relative input paths resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg: Self = toml::from_str(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        cfg.input.files.iter_mut().for_each(fix);
        cfg.input.dir.as_mut().map(fix);
        cfg.input.scene.as_mut().map(fix);
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.detection.validate()?;
        self.avoidance.validate()?;
        let sources = [!self.input.files.is_empty(), self.input.dir.is_some(), self.input.scene.is_some()];
        if sources.iter().filter(|s| **s).count() != 1 {
            return Err(Error::InvalidConfig(
                "exactly one of input.files, input.dir, input.scene must be set".into(),
            ));
        }
        for p in self.input.files.iter().chain(&self.input.dir).chain(&self.input.scene) {
            if !p.exists() {
                return Err(Error::InvalidConfig(format!("input {} does not exist", p.display())));
            }
        }
        if self.input.scene.is_none() && self.calibration.is_none() {
            return Err(Error::InvalidConfig("calibration is required for image input".into()));
        }
        if let Some(c) = &self.calibration {
            c.camera()?;
        }
        if !(self.input.fps > 0.0) {
            return Err(Error::InvalidConfig("input.fps must be positive".into()));
        }
        if let Some(d) = self.match_dist_m {
            if !(d > 0.0) {
                return Err(Error::InvalidConfig("match_dist_m must be positive".into()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CameraSetup {
    pub pinhole: PinholeParams,
    pub pose: CameraPose,
}

impl CameraSetup {
    pub fn camera(&self) -> Result<SynthCamera> {
        SynthCamera::new(self.pinhole, self.pose)
    }
}

/// A synthetic drive: one scene advanced by `step_m` per frame, or a
/// randomized corpus of such drives.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SceneFile {
    pub camera: CameraSetup,
    pub scene: Option<SceneSpec>,
    pub corpus: Option<CorpusParams>,
    pub frames: usize,
    pub step_m: f64,
    /// Leading frames of a `[scene]` drive left out of scoring while the
    /// tracker confirms.
    pub warmup: usize,
    pub lane: LaneGeometry,
}

impl Default for SceneFile {
    fn default() -> Self {
        Self {
            camera: CameraSetup::default(),
            scene: None,
            corpus: None,
            frames: 1,
            step_m: 0.0,
            warmup: 0,
            lane: crate::synth::corpus::ROAD_LANE,
        }
    }
}

impl SceneFile {
    pub fn load(path: &Path) -> Result<Self> {
        let s: Self = toml::from_str(&std::fs::read_to_string(path)?)?;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.camera.camera()?;
        if self.scene.is_some() == self.corpus.is_some() {
            return Err(Error::InvalidConfig("scene file needs exactly one of [scene] or [corpus]".into()));
        }
        if let Some(s) = &self.scene {
            if s.obstacles.iter().any(|o| !(o.footprint_m > 0.0 && o.height_m > 0.0)) {
                return Err(Error::InvalidConfig("obstacles need positive footprint and height".into()));
            }
            if self.frames == 0 {
                return Err(Error::InvalidConfig("frames must be at least 1".into()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn emit_list() {
        let e = EmitFlags::parse_list("annotated, json").unwrap();
        assert!(e.annotated && e.json && !e.masks);
        assert_eq!(EmitFlags::parse_list("all").unwrap(), EmitFlags::all());
        assert!(EmitFlags::parse_list("pictures").is_err());
    }

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg: RunConfig = toml::from_str(
            r#"
            [calibration]
            homography = [0.0, -0.001, 0.6, -0.001, 0.0, 0.32, 0.0, 0.0, 1.0]
            width = 640
            height = 480
            [detection]
            crop_distance_m = 1.5
            [avoidance]
            strict_stop = false
            [input]
            files = ["a.png"]
            "#,
        )
        .unwrap();
        assert_eq!(cfg.detection.crop_distance, 1.5);
        assert_eq!(cfg.detection.ev_accept, 20.0);
        assert!(!cfg.avoidance.strict_stop);
        assert_eq!(cfg.avoidance.lane_width, 0.46);
        // the file does not exist
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn config_round_trips_through_toml() {
        let cfg = RunConfig {
            calibration: Some(Calibration {
                homography: [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
                width: 10,
                height: 10,
            }),
            ..RunConfig::default()
        };
        let text = toml::to_string(&cfg).unwrap();
        let back: RunConfig = toml::from_str(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn scene_file() {
        let s: SceneFile = toml::from_str(
            r#"
            frames = 4
            step_m = 0.05
            [camera.pose]
            height_m = 0.12
            pitch_rad = 0.3
            yaw_rad = 0.0
            [[scene.obstacles]]
            kind = "duck"
            position = { x = 0.6, y = 0.0 }
            footprint_m = 0.05
            height_m = 0.05
            color = [245, 205, 25]
            "#,
        )
        .unwrap();
        s.validate().unwrap();
        assert_eq!(s.camera.pinhole, PinholeParams::default());
        assert_eq!(s.scene.unwrap().obstacles.len(), 1);
        let both = SceneFile {
            scene: Some(SceneSpec::default()),
            corpus: Some(CorpusParams::default()),
            ..SceneFile::default()
        };
        assert!(both.validate().is_err());
    }
}
