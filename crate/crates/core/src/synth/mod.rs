//! Synthetic scenes with exact ground truth.
//!
//! A pinhole camera at height `h` above the ground, pitched down by a fixed
//! angle, looks at flat painted ground elements and flat vertical billboard
//! obstacles. The same pose yields the pixel-to-ground homography used by
//! the detector, so every rendered frame comes with exact geometry.

pub mod corpus;
mod render;
mod scene;
mod truth;

pub use render::render_scene;
pub use scene::{GroundElement, ObstacleKind, ObstacleSpec, SceneSpec};
pub use truth::{scene_ground_truth, LaneGeometry, TruthObstacle};

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CameraModel, GroundPoint, PixelCoord};

/// Intrinsics: focal length and principal point in pixels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PinholeParams {
    pub f: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
}

impl Default for PinholeParams {
    fn default() -> Self {
        Self {
            f: 310.0,
            cx: 319.5,
            cy: 239.5,
            width: 640,
            height: 480,
        }
    }
}

/// Extrinsics relative to the ground point below the camera.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CameraPose {
    pub height_m: f64,
    /// Downward tilt of the optical axis, radians, in `(0, pi/2)`.
    pub pitch_rad: f64,
    pub yaw_rad: f64,
}

impl Default for CameraPose {
    fn default() -> Self {
        Self {
            height_m: 0.1,
            pitch_rad: 15f64.to_radians(),
            yaw_rad: 0.0,
        }
    }
}

/// Pinhole camera with a known pose; the renderer's view of the world.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthCamera {
    pub pinhole: PinholeParams,
    pub pose: CameraPose,
    /// Columns are the camera right, down and forward axes in world coordinates.
    rot: Matrix3<f64>,
}

impl SynthCamera {
    pub fn new(pinhole: PinholeParams, pose: CameraPose) -> Result<Self> {
        if !(pinhole.f > 0.0) || pinhole.width == 0 || pinhole.height == 0 {
            return Err(Error::InvalidConfig("pinhole needs f > 0 and a non-empty image".into()));
        }
        let inside = |c: f64, n: u32| c >= -0.5 && c <= n as f64 - 0.5;
        if !(inside(pinhole.cx, pinhole.width) && inside(pinhole.cy, pinhole.height)) {
            return Err(Error::InvalidConfig("principal point outside the image".into()));
        }
        if !(pose.height_m > 0.0) {
            return Err(Error::InvalidConfig("camera height must be positive".into()));
        }
        if !(pose.pitch_rad > 0.0 && pose.pitch_rad < std::f64::consts::FRAC_PI_2) {
            return Err(Error::InvalidConfig("camera pitch must lie in (0, pi/2)".into()));
        }
        let (sp, cp) = pose.pitch_rad.sin_cos();
        let (sy, cy) = pose.yaw_rad.sin_cos();
        let forward = Vector3::new(cp * cy, cp * sy, -sp);
        let right = Vector3::new(sy, -cy, 0.0);
        let down = forward.cross(&right);
        Ok(Self {
            pinhole,
            pose,
            rot: Matrix3::from_columns(&[right, down, forward]),
        })
    }

    pub fn center(&self) -> Vector3<f64> {
        Vector3::new(0.0, 0.0, self.pose.height_m)
    }

    /// World-frame direction of the ray through image point `(u, v)`.
    pub fn ray(&self, u: f64, v: f64) -> Vector3<f64> {
        let p = &self.pinhole;
        self.rot * Vector3::new((u - p.cx) / p.f, (v - p.cy) / p.f, 1.0)
    }

    /// Direct ray/ground-plane intersection, `None` at or above the horizon.
    pub fn ray_ground(&self, u: f64, v: f64) -> Option<GroundPoint> {
        let d = self.ray(u, v);
        if d.z >= 0.0 {
            return None;
        }
        let t = self.pose.height_m / -d.z;
        Some(GroundPoint::new(t * d.x, t * d.y))
    }

    /// Forward pinhole projection of a world point; `None` behind the camera.
    pub fn project(&self, world: Vector3<f64>) -> Option<PixelCoord> {
        let c = self.rot.transpose() * (world - self.center());
        if c.z <= 1e-12 {
            return None;
        }
        let p = &self.pinhole;
        Some(PixelCoord::new(p.f * c.x / c.z + p.cx, p.f * c.y / c.z + p.cy))
    }

    /// Pixel-to-ground homography `diag(h, h, -1) R K^-1`.
    pub fn homography(&self) -> Matrix3<f64> {
        let p = &self.pinhole;
        let k_inv = Matrix3::new(
            1.0 / p.f,
            0.0,
            -p.cx / p.f,
            0.0,
            1.0 / p.f,
            -p.cy / p.f,
            0.0,
            0.0,
            1.0,
        );
        let h = self.pose.height_m;
        Matrix3::from_diagonal(&Vector3::new(h, h, -1.0)) * self.rot * k_inv
    }

    pub fn model(&self) -> Result<CameraModel> {
        CameraModel::new(self.homography(), self.pinhole.width, self.pinhole.height)
    }
}

/// Calibrated camera model induced by a pinhole and its ground pose.
pub fn make_camera(pinhole: PinholeParams, pose: CameraPose) -> Result<CameraModel> {
    SynthCamera::new(pinhole, pose)?.model()
}
