//! Monocular ground-plane obstacle detection and reactive avoidance.
//!
//! A calibrated camera image is cropped to a distance horizon, warped to a
//! metric bird's-eye view, color filtered in HSV, segmented and classified
//! with rotation-invariant inertia eigenvalues. Confirmed obstacles feed a
//! planner that emits a lateral offset or an emergency stop.

pub mod avoidance;
pub mod colorspace;
pub mod config;
pub mod detection;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod runner;
pub mod segmentation;
pub mod synth;

pub use error::{Error, Result};
