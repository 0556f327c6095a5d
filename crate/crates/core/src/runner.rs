//! Batch processing of a frame stream with on-disk artifacts.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use image::{GrayImage, Rgb, RgbImage};
use log::{info, warn};
use serde::{Deserialize, Serialize};

use crate::avoidance::plan;
use crate::config::{Calibration, RunConfig, SceneFile};
use crate::detection::draw::{annotate_birdview, annotate_frame};
use crate::detection::{DetectionConfig, Detector, FrameRecord, ObstacleRecord};
use crate::error::{Error, Result};
use crate::eval::{evaluate, EvalReport, LatencyStats, TruthFrame};
use crate::segmentation::LabelImage;
use crate::synth::corpus::detection_corpus;
use crate::synth::{render_scene, scene_ground_truth, SceneSpec, SynthCamera};

/// Frames and ground truth of a scene file, in stream order.
pub struct SceneStream {
    pub camera: SynthCamera,
    pub scenes: Vec<SceneSpec>,
    pub truth: Vec<TruthFrame>,
}

impl SceneStream {
    pub fn new(sf: &SceneFile, det: &DetectionConfig) -> Result<Self> {
        sf.validate()?;
        let camera = sf.camera.camera()?;
        let mut scenes = Vec::new();
        let mut scored = Vec::new();
        if let Some(base) = &sf.scene {
            for k in 0..sf.frames {
                let mut s = base.advanced(sf.step_m * k as f64);
                s.seed = base.seed.wrapping_add(k as u64);
                scenes.push(s);
                scored.push(k >= sf.warmup);
            }
        } else if let Some(params) = &sf.corpus {
            for seq in detection_corpus(params, &camera, det) {
                for (k, s) in seq.frames.into_iter().enumerate() {
                    scenes.push(s);
                    scored.push(k >= seq.warmup);
                }
            }
        }
        let truth = scenes
            .iter()
            .zip(scored)
            .enumerate()
            .map(|(i, (s, scored))| TruthFrame {
                frame_index: i as u64,
                scored,
                obstacles: scene_ground_truth(s, &camera, det, &sf.lane),
            })
            .collect();
        Ok(Self { camera, scenes, truth })
    }

    pub fn render(&self, i: usize) -> RgbImage {
        render_scene(&self.scenes[i], &self.camera)
    }
}

/// Renders a scene file to numbered PNG frames plus `truth.json` and a
/// matching `calibration.toml`. Returns the number of frames written.
pub fn write_synth(sf: &SceneFile, det: &DetectionConfig, out: &Path, max_frames: Option<usize>) -> Result<usize> {
    let stream = SceneStream::new(sf, det)?;
    let n = max_frames.map_or(stream.scenes.len(), |m| m.min(stream.scenes.len()));
    let frames_dir = out.join("frames");
    fs::create_dir_all(&frames_dir)?;
    for i in 0..n {
        stream.render(i).save(frames_dir.join(frame_name(i as u64, "png")))?;
    }
    fs::write(out.join("truth.json"), serde_json::to_string_pretty(&stream.truth[..n])?)?;
    let calib = Calibration::from_camera(&stream.camera.model()?);
    let text = toml::to_string(&CalibrationFile { calibration: calib })
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    fs::write(out.join("calibration.toml"), text)?;
    Ok(n)
}

#[derive(Serialize, Deserialize)]
struct CalibrationFile {
    calibration: Calibration,
}

pub fn frame_name(i: u64, ext: &str) -> String {
    format!("frame_{i:06}.{ext}")
}

fn list_dir(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("png")))
        .collect();
    files.sort();
    Ok(files)
}

/// Outcome of a run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunSummary {
    pub frames_total: usize,
    pub processed: usize,
    pub skipped: usize,
    pub latency: Option<LatencyStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eval: Option<EvalReport>,
}

enum Source {
    Files(Vec<PathBuf>),
    Scene(SceneStream),
}

fn label_colors(li: &LabelImage) -> RgbImage {
    RgbImage::from_fn(li.width, li.height, |u, v| {
        let l = li.get(u, v);
        if l == 0 {
            Rgb([0, 0, 0])
        } else {
            let h = l.wrapping_mul(2_654_435_761);
            Rgb([(h >> 24) as u8 | 64, (h >> 16) as u8 | 64, (h >> 8) as u8 | 64])
        }
    })
}

fn save_gray(img: &GrayImage, path: PathBuf) -> Result<()> {
    img.save(path)?;
    Ok(())
}

/// Runs detection and planning over every input frame in order.
///
/// Frames whose processing fails with a per-frame input error are logged and
/// skipped. Unreadable inputs and violated internal invariants abort the run.
pub fn run_pipeline(cfg: &RunConfig, max_frames: Option<usize>) -> Result<RunSummary> {
    cfg.validate()?;
    let (source, cam) = if let Some(scene) = &cfg.input.scene {
        let stream = SceneStream::new(&SceneFile::load(scene)?, &cfg.detection)?;
        let cam = match &cfg.calibration {
            Some(c) => c.camera()?,
            None => stream.camera.model()?,
        };
        (Source::Scene(stream), cam)
    } else {
        let files = match &cfg.input.dir {
            Some(d) => list_dir(d)?,
            None => cfg.input.files.clone(),
        };
        let cam = cfg.calibration.as_ref().expect("validated").camera()?;
        (Source::Files(files), cam)
    };
    let total = match &source {
        Source::Files(f) => f.len(),
        Source::Scene(s) => s.scenes.len(),
    };
    let n = max_frames.map_or(total, |m| m.min(total));

    let out = &cfg.output.dir;
    let emit = cfg.output.emit;
    let mkdir = |name: &str, on: bool| -> Result<()> {
        if on {
            fs::create_dir_all(out.join(name))?;
        }
        Ok(())
    };
    fs::create_dir_all(out)?;
    mkdir("json", emit.json)?;
    mkdir("annotated", emit.annotated)?;
    mkdir("birdview", emit.birdview)?;
    mkdir("masks", emit.masks)?;

    let mut detector = Detector::new(&cam, cfg.detection.clone())?;
    let mut records = Vec::with_capacity(n);
    let mut latencies = Vec::with_capacity(n);
    let mut skipped = 0;
    for i in 0..n {
        let frame_index = i as u64;
        let frame = match &source {
            Source::Files(f) => image::open(&f[i])?.to_rgb8(),
            Source::Scene(s) => s.render(i),
        };
        let t0 = Instant::now();
        let analysis = match detector.analyze(&frame, frame_index) {
            Ok(a) => a,
            Err(e) if e.is_input_error() => {
                warn!("frame {frame_index}: {e}; skipped");
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let command = plan(&analysis.obstacles, cfg.input.lane_pose, &cfg.avoidance);
        latencies.push(t0.elapsed().as_secs_f64() * 1e3);

        let timestamp = frame_index as f64 / cfg.input.fps;
        let record = FrameRecord {
            frame_index,
            timestamp,
            obstacles: analysis
                .obstacles
                .iter()
                .map(|o| ObstacleRecord::from_obstacle(o, frame_index, timestamp))
                .collect(),
            command,
        };
        if emit.json {
            fs::write(out.join("json").join(frame_name(frame_index, "json")), serde_json::to_string_pretty(&record)?)?;
        }
        if emit.annotated {
            annotate_frame(&frame, detector.mapping(), &analysis.obstacles)
                .save(out.join("annotated").join(frame_name(frame_index, "png")))?;
        }
        if emit.birdview {
            annotate_birdview(&analysis.birdview, &analysis.obstacles)
                .save(out.join("birdview").join(frame_name(frame_index, "png")))?;
        }
        if emit.masks {
            let dir = out.join("masks");
            for (name, mask) in [("yellow", &analysis.yellow), ("orange", &analysis.orange), ("white", &analysis.white)] {
                save_gray(&mask.to_image(), dir.join(format!("{name}_{frame_index:06}.png")))?;
            }
            for (name, li) in [("yellow", &analysis.yellow_labels), ("orange", &analysis.orange_labels)] {
                label_colors(li).save(dir.join(format!("labels_{name}_{frame_index:06}.png")))?;
            }
        }
        records.push(record);
    }
    if emit.json {
        fs::write(out.join("predictions.json"), serde_json::to_string_pretty(&records)?)?;
    }

    let eval = match &source {
        Source::Scene(s) => {
            let truth: Vec<TruthFrame> = records
                .iter()
                .map(|r| s.truth[r.frame_index as usize].clone())
                .collect();
            Some(evaluate(&records, &truth, cfg.match_dist_m.unwrap_or(0.05))?)
        }
        Source::Files(_) => None,
    };
    let summary = RunSummary {
        frames_total: total,
        processed: records.len(),
        skipped,
        latency: LatencyStats::from_samples(&latencies),
        eval,
    };
    if emit.metrics {
        fs::write(out.join("metrics.json"), serde_json::to_string_pretty(&summary)?)?;
    }
    info!("processed {} of {} frames, {} skipped", summary.processed, n, skipped);
    Ok(summary)
}

/// Loads per-frame predictions from `predictions.json` or a directory of
/// per-frame JSON files.
pub fn load_predictions(path: &Path) -> Result<Vec<FrameRecord>> {
    if path.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(path)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e == "json"))
            .collect();
        files.sort();
        files
            .iter()
            .map(|p| Ok(serde_json::from_str(&fs::read_to_string(p)?)?))
            .collect()
    } else {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

pub fn load_truth(path: &Path) -> Result<Vec<TruthFrame>> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Pairs each prediction frame with the truth frame of the same index.
pub fn align_truth(predictions: &[FrameRecord], truth: &[TruthFrame]) -> Result<Vec<TruthFrame>> {
    predictions
        .iter()
        .map(|p| {
            truth
                .iter()
                .find(|t| t.frame_index == p.frame_index)
                .cloned()
                .ok_or_else(|| Error::FrameMismatch(format!("no truth for frame {}", p.frame_index)))
        })
        .collect()
}
