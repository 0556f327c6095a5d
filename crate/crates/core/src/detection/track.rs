use serde::{Deserialize, Serialize};

use super::classify::YellowClass;
use super::DetectionConfig;
use crate::error::{Error, Result};
use crate::geometry::GroundPoint;
use crate::segmentation::Region;

/// A classified region with its ground pose, ready for tracking.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub region: Region,
    pub ground_pos: GroundPoint,
    pub radius: f64,
    pub frame: u64,
    pub strength: YellowClass,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Track {
    pub id: u64,
    pub last_pos: GroundPoint,
    pub last_lambda1: f64,
    /// Consecutive frames with a matched candidate.
    pub hits: u32,
    pub last_frame: u64,
}

/// A candidate that passed the confirmation rule this frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Confirmation {
    pub track_id: u64,
    pub candidate: Candidate,
}

/// Frame-to-frame association state for one camera stream.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrackerState {
    pub tracks: Vec<Track>,
    next_id: u64,
    last_frame: Option<u64>,
}

impl TrackerState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn last_frame(&self) -> Option<u64> {
        self.last_frame
    }

    /// Associates this frame's candidates with the previous frame's tracks
    /// and returns the confirmed ones.
    ///
    /// Pairs are taken greedily in order of increasing ground distance within
    /// the gate. Tracks without a match are dropped; unmatched candidates
    /// start new tracks.
    pub fn track_update(
        &mut self,
        cands: Vec<Candidate>,
        frame: u64,
        cfg: &DetectionConfig,
    ) -> Result<Vec<Confirmation>> {
        if let Some(previous) = self.last_frame {
            if frame <= previous {
                return Err(Error::NonMonotonicFrame { frame, previous });
            }
        }
        self.last_frame = Some(frame);
        let live: Vec<Track> = std::mem::take(&mut self.tracks)
            .into_iter()
            .filter(|t| t.last_frame + 1 == frame)
            .collect();

        let mut pairs = Vec::new();
        for (ci, c) in cands.iter().enumerate() {
            for (ti, t) in live.iter().enumerate() {
                let d = c.ground_pos.distance(&t.last_pos);
                if d <= cfg.track_gate {
                    pairs.push((d, ci, ti));
                }
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut cand_track = vec![None; cands.len()];
        let mut track_used = vec![false; live.len()];
        for (_, ci, ti) in pairs {
            if cand_track[ci].is_none() && !track_used[ti] {
                cand_track[ci] = Some(ti);
                track_used[ti] = true;
            }
        }

        let fast = cfg.confirm_frames.min(2);
        let mut confirmed = Vec::new();
        for (c, matched) in cands.into_iter().zip(cand_track) {
            let weak = c.strength != YellowClass::Strong;
            let track = match matched {
                Some(ti) => {
                    let prev = &live[ti];
                    let changed = (c.region.lambda1 - prev.last_lambda1).abs()
                        > cfg.size_change_max * prev.last_lambda1;
                    let hits = prev.hits + 1;
                    let needed = if weak || changed { cfg.confirm_frames } else { fast };
                    (Track {
                        id: prev.id,
                        last_pos: c.ground_pos,
                        last_lambda1: c.region.lambda1,
                        hits,
                        last_frame: frame,
                    }, hits >= needed)
                }
                None => {
                    let id = self.next_id;
                    self.next_id += 1;
                    let needed = if weak { cfg.confirm_frames } else { fast };
                    (Track {
                        id,
                        last_pos: c.ground_pos,
                        last_lambda1: c.region.lambda1,
                        hits: 1,
                        last_frame: frame,
                    }, 1 >= needed)
                }
            };
            let (track, ok) = track;
            if ok {
                confirmed.push(Confirmation {
                    track_id: track.id,
                    candidate: c,
                });
            }
            self.tracks.push(track);
        }
        Ok(confirmed)
    }
}
