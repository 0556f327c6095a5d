//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Every tolerance is pinned here.

use std::collections::{HashSet, VecDeque};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use image::RgbImage;
use ipm_obstacles::avoidance::{plan, AvoidanceCommand, AvoidanceConfig, LanePose};
use ipm_obstacles::colorspace::{rgb_to_hsv, BinaryMask};
use ipm_obstacles::detection::{
    birdview_mapping, DetectionConfig, Detector, FrameRecord, Obstacle, ObstacleClass, ObstacleRecord,
};
use ipm_obstacles::eval::{evaluate, TruthFrame};
use ipm_obstacles::geometry::{warp_to_birdview, GroundPoint, Interpolation, PixelCoord};
use ipm_obstacles::segmentation::{label_components, region_properties, ColorClass, LabelImage};
use ipm_obstacles::synth::corpus::{detection_corpus, stop_approach_sequences, straight_road, CorpusParams, ROAD_LANE};
use ipm_obstacles::synth::{
    render_scene, scene_ground_truth, CameraPose, GroundElement, PinholeParams, SceneSpec, SynthCamera,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const IPM_CAMERAS: usize = 50;
const IPM_ROUND_TRIP_M: f64 = 1e-6;
const IPM_PARALLEL_DEG: f64 = 0.5;
const IPM_AREA_SPREAD: f64 = 0.05;
const IPM_BUDGET: Duration = Duration::from_secs(30);

const MOMENT_LINE_TOL: f64 = 1e-9;
const MOMENT_ANGLE_TOL: f64 = 0.05;
const MOMENT_MIN_AREA: u64 = 200;

const LABEL_MASKS: usize = 200;

const HSV_GRID: usize = 18;

const CORPUS_FRAMES: u64 = 300;
const DUCK_DETECTION_MIN: f64 = 0.95;
const CONE_DETECTION_MIN: f64 = 0.95;
const FALSE_POSITIVE_MAX: f64 = 0.03;
const FALSE_POSITION_MAX: f64 = 0.072;
const MATCH_DIST_M: f64 = 0.05;
const CORPUS_BUDGET: Duration = Duration::from_secs(300);

const STOP_SEQUENCES: usize = 10;
const STOP_MIN_DISTANCE_M: f64 = 0.15;
/// 0.2 m/s at 3 frames per second.
const STOP_STEP_M: f64 = 0.2 / 3.0;

const PLANNER_CASES: usize = 10_000;

const MIN_FPS: f64 = 10.0;

const ENCODING_CASES: usize = 10_000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn default_camera() -> SynthCamera {
    SynthCamera::new(PinholeParams::default(), CameraPose::default()).unwrap()
}

fn luminance(p: [u8; 3]) -> f64 {
    (p[0] as f64 + p[1] as f64 + p[2] as f64) / 3.0
}

fn luminance_mask(img: &RgbImage, threshold: f64) -> BinaryMask {
    BinaryMask::from_fn(img.width(), img.height(), |u, v| {
        luminance(img.get_pixel(u, v).0) > threshold
    })
}

/// Least-squares slope `du/dv` of the centroid track of set pixels in
/// columns `[u0, u1)`, over rows where the run is not clipped by the bounds.
fn centroid_slope(mask: &BinaryMask, u0: u32, u1: u32, rows: std::ops::Range<u32>) -> Option<f64> {
    let mut pts = Vec::new();
    for v in rows {
        let (mut n, mut s) = (0u32, 0f64);
        for u in u0..u1 {
            if mask.get(u, v) {
                n += 1;
                s += u as f64;
            }
        }
        if n > 0 && !mask.get(u0, v) && !mask.get(u1 - 1, v) {
            pts.push((v as f64, s / n as f64));
        }
    }
    if pts.len() < 10 {
        return None;
    }
    let n = pts.len() as f64;
    let mv = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mu = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let cov = pts.iter().map(|p| (p.0 - mv) * (p.1 - mu)).sum::<f64>();
    let var = pts.iter().map(|p| (p.0 - mv).powi(2)).sum::<f64>();
    Some(cov / var)
}

fn ipm_fidelity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let cfg = DetectionConfig::default();
    let (mut worst_rt, mut worst_angle, mut worst_area, mut worst_abs) = (0f64, 0f64, 0f64, 0f64);
    let mut failures = Vec::new();
    for i in 0..IPM_CAMERAS {
        let pinhole = PinholeParams {
            f: rng.random_range(280.0..420.0),
            ..PinholeParams::default()
        };
        let pose = CameraPose {
            height_m: rng.random_range(0.08..0.15),
            pitch_rad: rng.random_range(10f64..30.0).to_radians(),
            yaw_rad: rng.random_range(-0.05..0.05),
        };
        let cam = SynthCamera::new(pinhole, pose).unwrap();
        let model = cam.model().unwrap();
        let m = match birdview_mapping(&model, &cfg) {
            Ok(m) => m,
            Err(e) => {
                failures.push(format!("camera {i}: {e}"));
                continue;
            }
        };

        for _ in 0..200 {
            let p = PixelCoord::new(rng.random_range(0.0..639.0), rng.random_range(m.crop_row as f64..479.0));
            let g = model.pixel_to_ground(p).unwrap();
            let oracle = cam.ray_ground(p.u, p.v).unwrap();
            let back = model.pixel_to_ground(model.ground_to_pixel(g).unwrap()).unwrap();
            worst_rt = worst_rt.max(g.distance(&oracle)).max(g.distance(&back));
        }

        // two painted stripes along the driving direction
        let stripe = |y: f64| GroundElement {
            center: GroundPoint::new(1.5, y),
            yaw: 0.0,
            length: 3.0,
            width: 0.02,
            color: SceneSpec::WHITE,
        };
        let spec = SceneSpec {
            ground_elements: vec![stripe(-0.06), stripe(0.06)],
            samples_per_axis: 3,
            ..SceneSpec::default()
        };
        let frame = render_scene(&spec, &cam);
        let cropped = image::imageops::crop_imm(&frame, 0, m.crop_row, 640, 480 - m.crop_row).to_image();
        let bird = warp_to_birdview(&cropped, &m, Interpolation::Bilinear);
        let mask = luminance_mask(&bird, 140.0);
        let mid = m.ground_to_bird(GroundPoint::new(1.0, 0.0)).u.round() as u32;
        let half = (0.1 * m.scale) as u32;
        let rows = 0..m.out_height;
        match (
            centroid_slope(&mask, mid.saturating_sub(half), mid, rows.clone()),
            centroid_slope(&mask, mid, (mid + half).min(m.out_width), rows),
        ) {
            (Some(a), Some(b)) => worst_angle = worst_angle.max((a.atan() - b.atan()).abs().to_degrees()),
            _ => failures.push(format!("camera {i}: stripes not found in bird view")),
        }

        // equal squares near and far
        let x_near = model.pixel_to_ground(PixelCoord::new(319.5, 479.0)).unwrap().x;
        let side = 0.12;
        let depths = [0.25, 0.5].map(|t| x_near + side + t * (cfg.crop_distance - x_near - 2.0 * side));
        let areas: Vec<f64> = depths
            .iter()
            .map(|&x| {
                let spec = SceneSpec {
                    ground_elements: vec![GroundElement {
                        center: GroundPoint::new(x, 0.0),
                        yaw: 0.0,
                        length: side,
                        width: side,
                        color: SceneSpec::WHITE,
                    }],
                    samples_per_axis: 4,
                    ..SceneSpec::default()
                };
                let frame = render_scene(&spec, &cam);
                let cropped = image::imageops::crop_imm(&frame, 0, m.crop_row, 640, 480 - m.crop_row).to_image();
                let bird = warp_to_birdview(&cropped, &m, Interpolation::Bilinear);
                // paint coverage integrated over a window around the square
                let road = luminance(spec.ground_color);
                let paint = luminance(SceneSpec::WHITE);
                let mut covered = 0.0;
                for (u, v, p) in bird.enumerate_pixels() {
                    let g = m.bird_to_ground(PixelCoord::new(u as f64, v as f64));
                    if (g.x - x).abs() <= side && g.y.abs() <= side {
                        covered += ((luminance(p.0) - road) / (paint - road)).clamp(0.0, 1.0);
                    }
                }
                covered / (m.scale * m.scale)
            })
            .collect();
        worst_area = worst_area.max((areas[0] - areas[1]).abs() / areas[0].max(areas[1]));
        for a in &areas {
            worst_abs = worst_abs.max((a - side * side).abs() / (side * side));
        }
    }
    let elapsed = start.elapsed();
    let pass = failures.is_empty()
        && worst_rt < IPM_ROUND_TRIP_M
        && worst_angle < IPM_PARALLEL_DEG
        && worst_area < IPM_AREA_SPREAD
        && worst_abs < IPM_AREA_SPREAD
        && elapsed < IPM_BUDGET;
    outcome(
        pass,
        format!(
            "IPM fidelity over {IPM_CAMERAS} cameras: round trip {worst_rt:.1e} m (< {IPM_ROUND_TRIP_M:e}), \
             parallel deviation {worst_angle:.3} deg (< {IPM_PARALLEL_DEG}), square area spread {:.2}% and error vs (side*scale)^2 {:.2}% (each < {}%), \
             {:.1} s (< {} s){}",
            worst_area * 100.0,
            worst_abs * 100.0,
            IPM_AREA_SPREAD * 100.0,
            elapsed.as_secs_f64(),
            IPM_BUDGET.as_secs(),
            if failures.is_empty() { String::new() } else { format!("; {}", failures.join("; ")) }
        ),
    )
}

fn single_label(w: u32, h: u32, pixels: &[(u32, u32)]) -> LabelImage {
    let mut labels = vec![0; (w * h) as usize];
    for &(u, v) in pixels {
        labels[(v * w + u) as usize] = 1;
    }
    LabelImage {
        width: w,
        height: h,
        labels,
        count: 1,
    }
}

const BLOB_WINDOW: i64 = 60;

fn square_window(r: i64) -> impl Iterator<Item = (i64, i64)> {
    (-r..=r).flat_map(move |v| (-r..=r).map(move |u| (u, v)))
}

/// Raster rotation about the origin: each output pixel takes the blob
/// pixel nearest to its pre-image.
fn rotate_nearest(blob: &[(i64, i64)], theta: f64) -> Vec<(i64, i64)> {
    let set: HashSet<_> = blob.iter().copied().collect();
    let (s, c) = theta.sin_cos();
    square_window(BLOB_WINDOW)
        .filter(|&(u, v)| {
            let (x, y) = (u as f64, v as f64);
            set.contains(&((c * x + s * y).round() as i64, (-s * x + c * y).round() as i64))
        })
        .collect()
}

fn centered_label(blob: &[(i64, i64)]) -> LabelImage {
    let size = (2 * BLOB_WINDOW + 1) as u32;
    let px: Vec<_> = blob
        .iter()
        .map(|&(u, v)| ((u + BLOB_WINDOW) as u32, (v + BLOB_WINDOW) as u32))
        .collect();
    single_label(size, size, &px)
}

fn eigen(li: &LabelImage) -> (f64, f64, u64) {
    let r = region_properties(li, 1, ColorClass::Yellow).unwrap();
    (r.lambda1, r.lambda2, r.area)
}

fn moment_oracle() -> Outcome {
    let mut worst_line = 0f64;
    for n in (3..=101u32).step_by(2) {
        let px: Vec<_> = (0..n).map(|u| (u, 0)).collect();
        let (l1, l2, _) = eigen(&single_label(n, 1, &px));
        worst_line = worst_line.max((l1 - (n * n - 1) as f64 / 12.0).abs()).max(l2.abs());
        let px: Vec<_> = (0..n).map(|v| (0, v)).collect();
        let (l1, l2, _) = eigen(&single_label(1, n, &px));
        worst_line = worst_line.max((l1 - (n * n - 1) as f64 / 12.0).abs()).max(l2.abs());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut exact_90 = true;
    for _ in 0..200 {
        let (w, h) = (rng.random_range(5..40u32), rng.random_range(5..40u32));
        let density = rng.random_range(0.1..0.9);
        let px: Vec<_> = (0..h)
            .flat_map(|v| (0..w).map(move |u| (u, v)))
            .filter(|_| rng.random_bool(density))
            .collect();
        if px.is_empty() {
            continue;
        }
        let rot: Vec<_> = px.iter().map(|&(u, v)| (h - 1 - v, u)).collect();
        let a = eigen(&single_label(w, h, &px));
        let b = eigen(&single_label(h, w, &rot));
        exact_90 &= a.0 == b.0 && a.1 == b.1;
    }

    let (mut worst_l1, mut worst_l2) = (0f64, 0f64);
    let mut blobs = 0;
    while blobs < 200 {
        let a = rng.random_range(8.0..30.0);
        let b = rng.random_range(5.0..a);
        let ellipse = rng.random_bool(0.5);
        let (s, c) = rng.random_range(0.0..std::f64::consts::PI).sin_cos();
        let blob: Vec<(i64, i64)> = square_window(40)
            .filter(|&(u, v)| {
                let (du, dv) = (u as f64 - 0.37, v as f64 - 0.21);
                let (p, q) = ((c * du + s * dv) / a, (-s * du + c * dv) / b);
                if ellipse {
                    p * p + q * q <= 1.0
                } else {
                    p.abs() <= 1.0 && q.abs() <= 1.0
                }
            })
            .collect();
        let turned = rotate_nearest(&blob, rng.random_range(0.0..std::f64::consts::PI));
        if blob.len() < MOMENT_MIN_AREA as usize || turned.len() < MOMENT_MIN_AREA as usize {
            continue;
        }
        blobs += 1;
        let (base, turned) = (eigen(&centered_label(&blob)), eigen(&centered_label(&turned)));
        worst_l1 = worst_l1.max((base.0 - turned.0).abs() / base.0);
        worst_l2 = worst_l2.max((base.1 - turned.1).abs() / base.1);
    }
    let pass = worst_line <= MOMENT_LINE_TOL && exact_90 && worst_l1.max(worst_l2) <= MOMENT_ANGLE_TOL;
    outcome(
        pass,
        format!(
            "moment oracle: 1xN lines max error {worst_line:.1e} (<= {MOMENT_LINE_TOL:e}), 90 deg rotation exact: {exact_90}, \
             arbitrary angle max relative change lambda1 {:.2}% lambda2 {:.2}% (<= {}%) \
             over {blobs} ellipse and rectangle blobs >= {MOMENT_MIN_AREA} px under nearest-neighbor raster rotation",
            worst_l1 * 100.0,
            worst_l2 * 100.0,
            MOMENT_ANGLE_TOL * 100.0
        ),
    )
}

/// Breadth-first flood fill, 8-connected, labels in raster order of the
/// first pixel of each component.
fn flood_fill(mask: &BinaryMask) -> (Vec<u32>, u32) {
    let (w, h) = (mask.width as i64, mask.height as i64);
    let mut labels = vec![0u32; (w * h) as usize];
    let mut count = 0;
    for start in 0..(w * h) {
        if !mask.bits[start as usize] || labels[start as usize] != 0 {
            continue;
        }
        count += 1;
        labels[start as usize] = count;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let (u, v) = (i % w, i / w);
            for dv in -1..=1 {
                for du in -1..=1 {
                    let (nu, nv) = (u + du, v + dv);
                    if nu < 0 || nv < 0 || nu >= w || nv >= h {
                        continue;
                    }
                    let j = (nv * w + nu) as usize;
                    if mask.bits[j] && labels[j] == 0 {
                        labels[j] = count;
                        queue.push_back(j as i64);
                    }
                }
            }
        }
    }
    (labels, count)
}

fn labeling_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut mismatches = 0;
    let mut components = 0u64;
    for _ in 0..LABEL_MASKS {
        let density = rng.random_range(0.05..0.75);
        let mask = BinaryMask::from_fn(64, 64, |_, _| rng.random_bool(density));
        let li = label_components(&mask);
        let (oracle, count) = flood_fill(&mask);
        components += count as u64;
        if li.labels != oracle || li.count != count {
            mismatches += 1;
        }
    }
    outcome(
        mismatches == 0,
        format!("labeling equivalence: {mismatches} of {LABEL_MASKS} random 64x64 masks differ from flood fill ({components} components)"),
    )
}

fn hsv_conformance() -> Outcome {
    let levels: Vec<u8> = (0..HSV_GRID).map(|i| (i * 255 / (HSV_GRID - 1)) as u8).collect();
    let (mut v_bad, mut hue_bad, mut chromatic) = (0, 0, 0);
    for &r in &levels {
        for &g in &levels {
            for &b in &levels {
                let p = rgb_to_hsv(image::Rgb([r, g, b]));
                if p.v != r.max(g).max(b) {
                    v_bad += 1;
                }
                // hue is undefined for grays
                if r.max(g).max(b) == r.min(g).min(b) {
                    continue;
                }
                chromatic += 1;
                let q = rgb_to_hsv(image::Rgb([b, r, g]));
                if q.h != (p.h + 120.0) % 360.0 {
                    hue_bad += 1;
                }
            }
        }
    }
    let n = HSV_GRID.pow(3);
    outcome(
        v_bad == 0 && hue_bad == 0,
        format!(
            "HSV conformance on {n} grid colors: V = max violations {v_bad}, \
             hue 120 deg rotation violations {hue_bad} of {chromatic} chromatic colors"
        ),
    )
}

fn detection_rates() -> Outcome {
    let start = Instant::now();
    let cam = default_camera();
    let model = cam.model().unwrap();
    let cfg = DetectionConfig::default();
    let params = CorpusParams::default();
    let mut preds = Vec::new();
    let mut truth = Vec::new();
    let mut index = 0u64;
    for seq in detection_corpus(&params, &cam, &cfg) {
        let mut det = Detector::new(&model, cfg.clone()).unwrap();
        for (k, scene) in seq.frames.iter().enumerate() {
            let obstacles = det.process(&render_scene(scene, &cam), k as u64).unwrap();
            preds.push(FrameRecord {
                frame_index: index,
                timestamp: 0.0,
                obstacles: obstacles.iter().map(|o| ObstacleRecord::from_obstacle(o, index, 0.0)).collect(),
                command: plan(&obstacles, LanePose::default(), &AvoidanceConfig::default()),
            });
            truth.push(TruthFrame {
                frame_index: index,
                scored: k >= seq.warmup,
                obstacles: scene_ground_truth(scene, &cam, &cfg, &ROAD_LANE),
            });
            index += 1;
        }
    }
    let r = evaluate(&preds, &truth, MATCH_DIST_M).unwrap();
    let elapsed = start.elapsed();
    let pass = r.frames == CORPUS_FRAMES
        && r.duck.detection_rate >= DUCK_DETECTION_MIN
        && r.cone.detection_rate >= CONE_DETECTION_MIN
        && r.overall.false_positive_rate <= FALSE_POSITIVE_MAX
        && r.overall.false_position_rate <= FALSE_POSITION_MAX
        && elapsed < CORPUS_BUDGET;
    outcome(
        pass,
        format!(
            "detection rates on {} scored frames: ducks {:.1}% of {} (>= {}%), cones {:.1}% of {} (>= {}%), \
             false positives {:.2}% (<= {}%), false positions {:.2}% (<= {:.1}%), {:.1} s (< {} s)",
            r.frames,
            r.duck.detection_rate * 100.0,
            r.duck.correctly_detected + r.duck.missed,
            DUCK_DETECTION_MIN * 100.0,
            r.cone.detection_rate * 100.0,
            r.cone.correctly_detected + r.cone.missed,
            CONE_DETECTION_MIN * 100.0,
            r.overall.false_positive_rate * 100.0,
            FALSE_POSITIVE_MAX * 100.0,
            r.overall.false_position_rate * 100.0,
            FALSE_POSITION_MAX * 100.0,
            elapsed.as_secs_f64(),
            CORPUS_BUDGET.as_secs()
        ),
    )
}

fn stop_behavior() -> Outcome {
    let cam = default_camera();
    let model = cam.model().unwrap();
    let avoid = AvoidanceConfig::default();
    let mut stopped = 0;
    let mut closest = f64::INFINITY;
    let mut notes = Vec::new();
    for (i, seq) in stop_approach_sequences(STOP_SEQUENCES, STOP_STEP_M, 17).iter().enumerate() {
        let mut det = Detector::new(&model, DetectionConfig::default()).unwrap();
        let mut stop_at = None;
        for (k, scene) in seq.frames.iter().enumerate() {
            let obstacles = det.process(&render_scene(scene, &cam), k as u64).unwrap();
            let cmd = plan(&obstacles, LanePose::default(), &avoid);
            if cmd.v_ref == 0.0 {
                stop_at = Some(scene.obstacles[0].position.x);
                break;
            }
        }
        match stop_at {
            Some(x) if x > STOP_MIN_DISTANCE_M => {
                stopped += 1;
                closest = closest.min(x);
            }
            Some(x) => notes.push(format!("sequence {i} stopped at {x:.3} m")),
            None => notes.push(format!("sequence {i} never stopped")),
        }
    }
    outcome(
        stopped == STOP_SEQUENCES,
        format!(
            "stop behavior: {stopped}/{STOP_SEQUENCES} approaches stopped with the obstacle beyond {STOP_MIN_DISTANCE_M} m \
             (closest stop {closest:.3} m){}",
            if notes.is_empty() { String::new() } else { format!("; {}", notes.join("; ")) }
        ),
    )
}

fn random_obstacle(rng: &mut ChaCha8Rng) -> Obstacle {
    Obstacle {
        x: rng.random_range(-0.2..1.2),
        y: rng.random_range(-0.4..0.4),
        radius: rng.random_range(0.005..0.1),
        in_lane: rng.random_bool(0.7),
        quad: [PixelCoord::new(0.0, 0.0); 4],
        class: ObstacleClass::Duck,
    }
}

/// Widest free interval left in `[-half, half]` beside `[e - r, e + r]`.
fn widest_gap(e: f64, r: f64, half: f64) -> f64 {
    let right = (e - r).min(half) - (-half);
    let left = half - (e + r).max(-half);
    right.max(left).max(0.0)
}

fn planner_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(314);
    let (mut safety, mut monotone, mut bound) = (0, 0, 0);
    for _ in 0..PLANNER_CASES {
        let lane_width = rng.random_range(0.3..0.6);
        let cfg = AvoidanceConfig {
            lane_width,
            robot_width: rng.random_range(0.08..lane_width - 0.01),
            safety_margin: rng.random_range(0.0..0.1),
            box_length: rng.random_range(0.2..1.0),
            box_half_width: rng.random_range(0.05..0.3),
            cruise_speed: 0.2,
            strict_stop: rng.random_bool(0.3),
        };
        let n = rng.random_range(0..4);
        let obs: Vec<Obstacle> = (0..n).map(|_| random_obstacle(&mut rng)).collect();
        let pose = LanePose {
            d: rng.random_range(-0.15..0.15),
            theta: rng.random_range(-1.8..1.8),
        };
        let cmd: AvoidanceCommand = plan(&obs, pose, &cfg);

        let gated: Vec<&Obstacle> = obs
            .iter()
            .filter(|o| o.in_lane && o.x > 0.0 && o.x <= cfg.box_length && o.y.abs() <= cfg.box_half_width)
            .collect();
        let safe = match gated.as_slice() {
            [o] if !cfg.strict_stop && pose.theta.abs() < std::f64::consts::FRAC_PI_2 => {
                // independent rotation-matrix form of the lane transform
                let (s, c) = pose.theta.sin_cos();
                let e = -s * o.x + c * o.y + pose.d;
                widest_gap(e, o.radius, cfg.lane_width / 2.0) >= cfg.robot_width + cfg.safety_margin
            }
            _ => false,
        };
        if !gated.is_empty() && !safe && cmd.v_ref != 0.0 {
            safety += 1;
        }
        let stricter = AvoidanceConfig {
            safety_margin: cfg.safety_margin + rng.random_range(0.0..0.1),
            ..cfg
        };
        if cmd.v_ref == 0.0 && cmd.active && plan(&obs, pose, &stricter).v_ref != 0.0 {
            monotone += 1;
        }
        if cmd.d_ref.abs() > cfg.lane_width / 2.0 - cfg.robot_width / 2.0 + 1e-12 {
            bound += 1;
        }
    }
    outcome(
        safety + monotone + bound == 0,
        format!(
            "planner properties over {PLANNER_CASES} random inputs: safety dominance violations {safety}, \
             margin monotonicity violations {monotone}, d_ref bound violations {bound}"
        ),
    )
}

fn throughput() -> Outcome {
    let cam = default_camera();
    let model = cam.model().unwrap();
    let mut spec = SceneSpec {
        ground_elements: straight_road(-0.5, 4.0, 0.03),
        ..SceneSpec::default()
    };
    spec.obstacles.push(ipm_obstacles::synth::ObstacleSpec::duck(GroundPoint::new(0.6, 0.0), 0.05, 0.05));
    spec.obstacles.push(ipm_obstacles::synth::ObstacleSpec::cone(GroundPoint::new(0.9, -0.24), 0.045, 0.07));
    let frame = render_scene(&spec, &cam);
    let mut det = Detector::new(&model, DetectionConfig::default()).unwrap();
    det.process(&frame, 0).unwrap();
    let n = 30;
    let start = Instant::now();
    for k in 1..=n {
        let obs = det.process(&frame, k).unwrap();
        std::hint::black_box(plan(&obs, LanePose::default(), &AvoidanceConfig::default()));
    }
    let fps = n as f64 / start.elapsed().as_secs_f64();
    outcome(
        fps >= MIN_FPS,
        format!("throughput: {fps:.1} frames/s on 640x480 input, single stream (>= {MIN_FPS})"),
    )
}

fn encoding_law() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut bad = 0;
    for i in 0..ENCODING_CASES {
        let o = Obstacle {
            x: rng.random_range(0.0..2.0),
            y: rng.random_range(-1.0..1.0),
            radius: rng.random_range(1e-4..0.2),
            in_lane: rng.random_bool(0.5),
            quad: std::array::from_fn(|_| PixelCoord::new(rng.random_range(0.0..640.0), rng.random_range(0.0..400.0))),
            class: if rng.random_bool(0.5) { ObstacleClass::Duck } else { ObstacleClass::Cone },
        };
        let rec = ObstacleRecord::from_obstacle(&o, i as u64, i as f64 / 3.0);
        let back: ObstacleRecord = serde_json::from_str(&serde_json::to_string(&rec).unwrap()).unwrap();
        let sign_ok = (back.z_m < 0.0) == !o.in_lane && back.z_m.abs() == o.radius;
        if back != rec || back.to_obstacle() != o || !sign_ok {
            bad += 1;
        }
    }
    outcome(
        bad == 0,
        format!("pose-array encoding: {bad} of {ENCODING_CASES} random obstacles fail the JSON round trip or z-sign law"),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        ("1", ipm_fidelity),
        ("2", moment_oracle),
        ("3", labeling_equivalence),
        ("4", hsv_conformance),
        ("5", detection_rates),
        ("6", stop_behavior),
        ("7", planner_properties),
        ("8", throughput),
        ("9", encoding_law),
    ];
    let mut failed = 0;
    for (id, run) in criteria {
        let o = run();
        println!("{} [{id}] {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
