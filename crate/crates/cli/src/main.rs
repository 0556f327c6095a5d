//! `ipmobs`: obstacle detection from the command line.

use std::io::{ErrorKind, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use ipm_obstacles::config::{EmitFlags, RunConfig, SceneFile};
use ipm_obstacles::detection::{birdview_mapping, DetectionConfig};
use ipm_obstacles::eval::evaluate;
use ipm_obstacles::geometry::PixelCoord;
use ipm_obstacles::runner::{align_truth, load_predictions, load_truth, run_pipeline, write_synth};

#[derive(Parser)]
#[command(name = "ipmobs", version, about = "Ground-plane obstacle detection via inverse perspective mapping")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run detection and planning over the configured input.
    Detect {
        #[arg(long)]
        config: PathBuf,
        /// Output directory, overrides output.dir.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated artifacts: annotated,masks,birdview,json,metrics.
        #[arg(long)]
        emit: Option<String>,
        /// Process at most this many frames.
        #[arg(long)]
        frames: Option<usize>,
    },
    /// Score predictions against ground truth.
    Eval {
        /// predictions.json or a directory of per-frame JSON files.
        #[arg(long)]
        predictions: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        match_dist: f64,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a scene file to frames, ground truth and calibration.
    Synth {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Run config whose detection section sets the truth range.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        frames: Option<usize>,
    },
    /// Round-trip and horizon diagnostics for a calibration.
    CalibCheck {
        #[arg(long)]
        config: PathBuf,
    },
}

/// Writes a line to stdout; a closed reader (e.g. `| head`) is not an error.
fn emit_line(text: &str) -> Result<()> {
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn detect(config: PathBuf, out: Option<PathBuf>, emit: Option<String>, frames: Option<usize>) -> Result<()> {
    let mut cfg = RunConfig::load(&config)?;
    if let Some(out) = out {
        cfg.output.dir = out;
    }
    if let Some(emit) = emit {
        cfg.output.emit = EmitFlags::parse_list(&emit)?;
    }
    let summary = run_pipeline(&cfg, frames)?;
    emit_line(&serde_json::to_string_pretty(&summary)?)?;
    Ok(())
}

fn eval(predictions: PathBuf, truth: PathBuf, match_dist: f64, out: Option<PathBuf>) -> Result<()> {
    let preds = load_predictions(&predictions)?;
    let truth = align_truth(&preds, &load_truth(&truth)?)?;
    let report = evaluate(&preds, &truth, match_dist)?;
    let text = serde_json::to_string_pretty(&report)?;
    match out {
        Some(p) => std::fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
        None => emit_line(&text)?,
    }
    Ok(())
}

fn synth(scene: PathBuf, out: PathBuf, config: Option<PathBuf>, frames: Option<usize>) -> Result<()> {
    let det = match config {
        Some(p) => RunConfig::load(&p)?.detection,
        None => DetectionConfig::default(),
    };
    let sf = SceneFile::load(&scene)?;
    let n = write_synth(&sf, &det, &out, frames)?;
    emit_line(&format!("wrote {n} frames to {}", out.display()))?;
    Ok(())
}

fn calib_check(config: PathBuf) -> Result<()> {
    let cfg = RunConfig::load(&config)?;
    let calib = cfg
        .calibration
        .ok_or_else(|| ipm_obstacles::Error::InvalidConfig("no [calibration] section".into()))?;
    let cam = calib.camera()?;
    let m = birdview_mapping(&cam, &cfg.detection)?;
    let mut worst: f64 = 0.0;
    let mut samples = 0;
    for v in (m.crop_row..cam.height()).step_by(8) {
        for u in (0..cam.width()).step_by(8) {
            let p = PixelCoord::new(u as f64, v as f64);
            let g = cam.pixel_to_ground(p)?;
            let back = cam.ground_to_pixel(g)?;
            worst = worst.max((back.u - p.u).hypot(back.v - p.v));
            samples += 1;
        }
    }
    let report = serde_json::json!({
        "crop_row": m.crop_row,
        "crop_distance_m": cfg.detection.crop_distance,
        "birdview_width": m.out_width,
        "birdview_height": m.out_height,
        "pixels_per_meter": m.scale,
        "ground_origin": m.origin,
        "round_trip_samples": samples,
        "max_round_trip_error_px": worst,
    });
    emit_line(&serde_json::to_string_pretty(&report)?)?;
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<ipm_obstacles::Error>() {
        Some(e) if !e.is_input_error() => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Detect { config, out, emit, frames } => detect(config, out, emit, frames),
        Command::Eval {
            predictions,
            truth,
            match_dist,
            out,
        } => eval(predictions, truth, match_dist, out),
        Command::Synth {
            scene,
            out,
            config,
            frames,
        } => synth(scene, out, config, frames),
        Command::CalibCheck { config } => calib_check(config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
