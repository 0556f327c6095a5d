//! Scoring predictions against synthetic ground truth.
//!
//! Per frame, predictions and truth of the same class are paired greedily by
//! increasing ground distance up to `match_dist`. Unpaired truth is missed,
//! unpaired predictions are false positives, and pairs whose lane flags
//! disagree count as false positions.

use serde::{Deserialize, Serialize};

use crate::detection::{FrameRecord, ObstacleClass};
use crate::error::{Error, Result};
use crate::synth::{ObstacleKind, TruthObstacle};

/// Expected obstacles of one frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruthFrame {
    pub frame_index: u64,
    /// Warm-up frames are kept for alignment but not scored.
    #[serde(default = "yes")]
    pub scored: bool,
    pub obstacles: Vec<TruthObstacle>,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub correctly_detected: u64,
    pub missed: u64,
    pub false_positive: u64,
    pub false_position: u64,
    /// Predictions of this class, matched or not.
    pub predictions: u64,
    pub detection_rate: f64,
    pub missed_rate: f64,
    pub false_positive_rate: f64,
    pub false_position_rate: f64,
}

impl ClassReport {
    fn finish(&mut self) {
        let truth = self.correctly_detected + self.missed;
        let ratio = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        self.detection_rate = if truth == 0 { 1.0 } else { ratio(self.correctly_detected, truth) };
        self.missed_rate = ratio(self.missed, truth);
        self.false_positive_rate = ratio(self.false_positive, self.predictions);
        self.false_position_rate = ratio(self.false_position, self.predictions);
    }

    fn add(&mut self, o: &ClassReport) {
        self.correctly_detected += o.correctly_detected;
        self.missed += o.missed;
        self.false_positive += o.false_positive;
        self.false_position += o.false_position;
        self.predictions += o.predictions;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatencyStats {
    pub count: usize,
    pub mean_ms: f64,
    pub p50_ms: f64,
    pub p95_ms: f64,
    pub max_ms: f64,
}

impl LatencyStats {
    pub fn from_samples(ms: &[f64]) -> Option<Self> {
        if ms.is_empty() {
            return None;
        }
        let mut s = ms.to_vec();
        s.sort_by(f64::total_cmp);
        let pick = |q: f64| s[((s.len() - 1) as f64 * q).round() as usize];
        Some(Self {
            count: s.len(),
            mean_ms: s.iter().sum::<f64>() / s.len() as f64,
            p50_ms: pick(0.5),
            p95_ms: pick(0.95),
            max_ms: s[s.len() - 1],
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub frames: u64,
    pub match_dist_m: f64,
    pub duck: ClassReport,
    pub cone: ClassReport,
    pub overall: ClassReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub latency: Option<LatencyStats>,
}

fn truth_class(k: ObstacleKind) -> ObstacleClass {
    match k {
        ObstacleKind::Duck => ObstacleClass::Duck,
        ObstacleKind::Cone => ObstacleClass::Cone,
    }
}

/// Scores aligned prediction and truth frames. Frames must pair up by index
/// in the given order; unscored truth frames are skipped.
pub fn evaluate(predictions: &[FrameRecord], truth: &[TruthFrame], match_dist: f64) -> Result<EvalReport> {
    if predictions.len() != truth.len() {
        return Err(Error::FrameMismatch(format!(
            "{} prediction frames vs {} truth frames",
            predictions.len(),
            truth.len()
        )));
    }
    let mut duck = ClassReport::default();
    let mut cone = ClassReport::default();
    let mut frames = 0;
    for (p, t) in predictions.iter().zip(truth) {
        if p.frame_index != t.frame_index {
            return Err(Error::FrameMismatch(format!(
                "prediction frame {} paired with truth frame {}",
                p.frame_index, t.frame_index
            )));
        }
        if !t.scored {
            continue;
        }
        frames += 1;
        for (class, rep) in [(ObstacleClass::Duck, &mut duck), (ObstacleClass::Cone, &mut cone)] {
            let preds: Vec<_> = p.obstacles.iter().filter(|o| o.class == class).collect();
            let gts: Vec<_> = t.obstacles.iter().filter(|o| truth_class(o.kind) == class).collect();
            let mut pairs = Vec::new();
            for (i, a) in preds.iter().enumerate() {
                for (j, b) in gts.iter().enumerate() {
                    let d = (a.x_m - b.x_m).hypot(a.y_m - b.y_m);
                    if d <= match_dist {
                        pairs.push((d, i, j));
                    }
                }
            }
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
            let mut pred_used = vec![false; preds.len()];
            let mut gt_used = vec![false; gts.len()];
            for (_, i, j) in pairs {
                if pred_used[i] || gt_used[j] {
                    continue;
                }
                pred_used[i] = true;
                gt_used[j] = true;
                rep.correctly_detected += 1;
                if preds[i].in_lane() != gts[j].in_lane {
                    rep.false_position += 1;
                }
            }
            rep.predictions += preds.len() as u64;
            rep.false_positive += pred_used.iter().filter(|u| !**u).count() as u64;
            rep.missed += gt_used.iter().filter(|u| !**u).count() as u64;
        }
    }
    let mut overall = ClassReport::default();
    overall.add(&duck);
    overall.add(&cone);
    for r in [&mut duck, &mut cone, &mut overall] {
        r.finish();
    }
    Ok(EvalReport {
        frames,
        match_dist_m: match_dist,
        duck,
        cone,
        overall,
        latency: None,
    })
}
