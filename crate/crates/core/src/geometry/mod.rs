//! Ground-plane camera geometry.
//!
//! The camera is described by a single homography `H` that maps homogeneous
//! pixel coordinates `(u, v, 1)` to homogeneous ground-plane coordinates
//! `(x, y, 1)` in meters, with `x` pointing forward along the robot axis and
//! `y` to the left. Cropping and forward projection use `H^-1`.
//!
//! Pixel coordinates refer to pixel centers: pixel `(0, 0)` covers
//! `[-0.5, 0.5] x [-0.5, 0.5]`.

mod birdview;

pub use birdview::{perspective_transform, warp_to_birdview, BirdviewMapping, Interpolation};

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance on the homogeneous scale below which a projection is
/// treated as hitting (or passing) the horizon.
pub const HORIZON_EPS: f64 = 1e-9;

/// A point on the ground plane, meters. `x` forward, `y` left.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundPoint {
    pub x: f64,
    pub y: f64,
}

impl GroundPoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &GroundPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Sub-pixel image coordinate: `u` is the column, `v` the row.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PixelCoord {
    pub u: f64,
    pub v: f64,
}

impl PixelCoord {
    pub fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }
}

/// Applies a homography and dehomogenizes, rejecting results whose scale is
/// not strictly positive relative to the vector magnitude.
pub(crate) fn apply_homography(m: &Matrix3<f64>, a: f64, b: f64) -> Result<(f64, f64)> {
    let p = m * Vector3::new(a, b, 1.0);
    let mag = p.x.abs().max(p.y.abs()).max(p.z.abs());
    if !(p.z > HORIZON_EPS * mag) {
        return Err(Error::DegenerateProjection { w: p.z });
    }
    Ok((p.x / p.z, p.y / p.z))
}

/// Calibrated monocular camera looking at the ground plane.
#[derive(Clone, Debug, PartialEq)]
pub struct CameraModel {
    h: Matrix3<f64>,
    h_inv: Matrix3<f64>,
    width: u32,
    height: u32,
}

impl CameraModel {
    /// Builds a camera from a pixel-to-ground homography.
    ///
    /// `H` is only defined up to scale; it is normalized to unit Frobenius
    /// norm and its sign chosen so that the bottom-center pixel has a
    /// positive homogeneous scale (lies below the horizon).
    pub fn new(h: Matrix3<f64>, width: u32, height: u32) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidCalibration(format!(
                "image size {width}x{height} must be positive"
            )));
        }
        if h.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidCalibration("homography has non-finite entries".into()));
        }
        let det = h.determinant();
        if det.abs() <= 1e-12 {
            return Err(Error::InvalidCalibration(format!(
                "homography is singular (det = {det:e})"
            )));
        }
        let mut h = h / h.norm();
        let bottom = h * Vector3::new((width as f64 - 1.0) / 2.0, height as f64 - 1.0, 1.0);
        if bottom.z < 0.0 {
            h = -h;
        }
        let h_inv = h
            .try_inverse()
            .ok_or_else(|| Error::InvalidCalibration("homography is not invertible".into()))?;
        Ok(Self {
            h,
            h_inv,
            width,
            height,
        })
    }

    /// Builds a camera from 9 row-major homography entries.
    pub fn from_row_major(h: [f64; 9], width: u32, height: u32) -> Result<Self> {
        Self::new(Matrix3::from_row_slice(&h), width, height)
    }

    /// Normalized pixel-to-ground homography.
    pub fn homography(&self) -> &Matrix3<f64> {
        &self.h
    }

    pub fn homography_inverse(&self) -> &Matrix3<f64> {
        &self.h_inv
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Inverse perspective mapping of one pixel onto the ground plane.
    pub fn pixel_to_ground(&self, p: PixelCoord) -> Result<GroundPoint> {
        let (x, y) = apply_homography(&self.h, p.u, p.v)?;
        Ok(GroundPoint { x, y })
    }

    pub fn ground_to_pixel(&self, g: GroundPoint) -> Result<PixelCoord> {
        let (u, v) = apply_homography(&self.h_inv, g.x, g.y)?;
        Ok(PixelCoord { u, v })
    }

    /// Smallest row such that every row from it down to the bottom of the
    /// image maps, on the vertical centerline, to a ground point no farther
    /// than `max_dist` meters ahead.
    pub fn crop_row_for_distance(&self, max_dist: f64) -> Result<u32> {
        if !(max_dist > 0.0) {
            return Err(Error::InvalidCalibration(format!(
                "crop distance {max_dist} must be positive"
            )));
        }
        let u = (self.width as f64 - 1.0) / 2.0;
        let mut best = None;
        for v in (0..self.height).rev() {
            match self.pixel_to_ground(PixelCoord::new(u, v as f64)) {
                Ok(g) if g.x <= max_dist => best = Some(v),
                _ => break,
            }
        }
        best.ok_or(Error::HorizonNotInFrame { max_dist })
    }

    /// Bird's-eye mapping of the image cropped at `crop_row`, scaled so the
    /// ground footprint is `out_width` pixels wide.
    pub fn compute_birdview_transform(&self, crop_row: u32, out_width: u32) -> Result<BirdviewMapping> {
        BirdviewMapping::new(self, crop_row, out_width)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_maps_origin() {
        let cam = CameraModel::new(Matrix3::identity(), 10, 10).unwrap();
        let g = cam.pixel_to_ground(PixelCoord::new(0.0, 0.0)).unwrap();
        assert_eq!((g.x, g.y), (0.0, 0.0));
        let p = cam.ground_to_pixel(GroundPoint::new(0.0, 0.0)).unwrap();
        assert_eq!((p.u, p.v), (0.0, 0.0));
    }

    #[test]
    fn diagonal_scaling() {
        let cam = CameraModel::new(Matrix3::from_diagonal(&Vector3::new(2.0, 2.0, 1.0)), 64, 64).unwrap();
        let g = cam.pixel_to_ground(PixelCoord::new(10.0, 20.0)).unwrap();
        assert!((g.x - 20.0).abs() < 1e-12 && (g.y - 40.0).abs() < 1e-12);
    }

    #[test]
    fn scale_and_sign_of_h_do_not_matter() {
        let h = Matrix3::new(0.0, -0.002, 1.3, -0.003, 0.0, 0.9, 0.0, 0.004, -0.3);
        let a = CameraModel::new(h, 640, 480).unwrap();
        let b = CameraModel::new(h * -17.0, 640, 480).unwrap();
        let p = PixelCoord::new(100.0, 400.0);
        let ga = a.pixel_to_ground(p).unwrap();
        let gb = b.pixel_to_ground(p).unwrap();
        assert!(ga.distance(&gb) < 1e-12);
    }

    #[test]
    fn singular_h_rejected() {
        let h = Matrix3::new(1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 0.0, 0.0, 1.0);
        assert!(matches!(CameraModel::new(h, 4, 4), Err(Error::InvalidCalibration(_))));
        assert!(CameraModel::new(Matrix3::identity(), 0, 4).is_err());
    }

    #[test]
    fn horizon_pixel_is_degenerate() {
        // w = 1 - v / 10: row 10 is the horizon, rows above it are behind the camera.
        let h = Matrix3::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, -0.1, 1.0);
        let cam = CameraModel::new(h, 20, 20).unwrap();
        // bottom-center has w < 0 here, so the sign flips: rows below 10 are "ground".
        assert!(cam.pixel_to_ground(PixelCoord::new(3.0, 15.0)).is_ok());
        assert!(matches!(
            cam.pixel_to_ground(PixelCoord::new(3.0, 10.0)),
            Err(Error::DegenerateProjection { .. })
        ));
        assert!(cam.pixel_to_ground(PixelCoord::new(3.0, 5.0)).is_err());
    }

    #[test]
    fn whole_frame_in_range_means_no_crop() {
        // Straight-down camera: 1 mm per pixel, frame spans 0.48 m.
        let h = Matrix3::new(0.0, -0.001, 0.5, -0.001, 0.0, 0.32, 0.0, 0.0, 1.0);
        let cam = CameraModel::new(h, 640, 480).unwrap();
        assert_eq!(cam.crop_row_for_distance(1.7).unwrap(), 0);
    }

    #[test]
    fn crop_fails_when_bottom_row_is_too_far() {
        let h = Matrix3::new(0.0, -0.001, 5.0, -0.001, 0.0, 0.32, 0.0, 0.0, 1.0);
        let cam = CameraModel::new(h, 640, 480).unwrap();
        assert!(matches!(cam.crop_row_for_distance(1.7), Err(Error::HorizonNotInFrame { .. })));
        assert!(cam.crop_row_for_distance(-1.0).is_err());
    }
}
