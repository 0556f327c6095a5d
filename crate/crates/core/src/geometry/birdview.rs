use image::{Rgb, RgbImage};
use nalgebra::{Matrix3, SMatrix, SVector};
use serde::{Deserialize, Serialize};

use super::{apply_homography, CameraModel, GroundPoint, PixelCoord};
use crate::error::{Error, Result};

/// Resampling used by [`warp_to_birdview`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    #[default]
    Bilinear,
    Nearest,
}

/// Perspective transform taking four source points onto four destination
/// points (the usual 8x8 direct linear solve with `m33 = 1`).
pub fn perspective_transform(src: &[PixelCoord; 4], dst: &[PixelCoord; 4]) -> Result<Matrix3<f64>> {
    let mut a = SMatrix::<f64, 8, 8>::zeros();
    let mut b = SVector::<f64, 8>::zeros();
    for i in 0..4 {
        let (x, y) = (src[i].u, src[i].v);
        let (u, v) = (dst[i].u, dst[i].v);
        let r = 2 * i;
        a[(r, 0)] = x;
        a[(r, 1)] = y;
        a[(r, 2)] = 1.0;
        a[(r, 6)] = -x * u;
        a[(r, 7)] = -y * u;
        b[r] = u;
        a[(r + 1, 3)] = x;
        a[(r + 1, 4)] = y;
        a[(r + 1, 5)] = 1.0;
        a[(r + 1, 6)] = -x * v;
        a[(r + 1, 7)] = -y * v;
        b[r + 1] = v;
    }
    let sol = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::InvalidCalibration("corner correspondences are degenerate".into()))?;
    Ok(Matrix3::new(sol[0], sol[1], sol[2], sol[3], sol[4], sol[5], sol[6], sol[7], 1.0))
}

/// Perspective map from the cropped camera image to a metric bird's-eye raster.
///
/// Bird-view columns grow to the right (ground `-y`), rows grow downward
/// (ground `-x`). The raster has the same scale in both directions.
#[derive(Clone, Debug, PartialEq)]
pub struct BirdviewMapping {
    m: Matrix3<f64>,
    m_inv: Matrix3<f64>,
    pub out_width: u32,
    pub out_height: u32,
    /// Pixels per meter.
    pub scale: f64,
    /// Ground point at bird-view pixel `(0, out_height - 1)`.
    pub origin: GroundPoint,
    /// First camera row kept by the crop.
    pub crop_row: u32,
    /// Size of the cropped source image.
    pub src_width: u32,
    pub src_height: u32,
}

impl BirdviewMapping {
    pub(crate) fn new(cam: &CameraModel, crop_row: u32, out_width: u32) -> Result<Self> {
        let height = cam.height();
        if height < 2 || crop_row > height - 2 {
            return Err(Error::InvalidCrop { row: crop_row, height });
        }
        if out_width < 2 {
            return Err(Error::InvalidCalibration(format!(
                "bird-view width {out_width} is too small"
            )));
        }
        let src_width = cam.width();
        let src_height = height - crop_row;
        let (w1, h1) = (src_width as f64 - 1.0, src_height as f64 - 1.0);
        let corners = [
            PixelCoord::new(0.0, 0.0),
            PixelCoord::new(w1, 0.0),
            PixelCoord::new(w1, h1),
            PixelCoord::new(0.0, h1),
        ];
        let mut ground = [GroundPoint::new(0.0, 0.0); 4];
        for (g, c) in ground.iter_mut().zip(&corners) {
            *g = cam.pixel_to_ground(PixelCoord::new(c.u, c.v + crop_row as f64))?;
        }
        let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
        for g in &ground {
            x_min = x_min.min(g.x);
            x_max = x_max.max(g.x);
            y_min = y_min.min(g.y);
            y_max = y_max.max(g.y);
        }
        let y_span = y_max - y_min;
        if !(y_span > 0.0) {
            return Err(Error::InvalidCalibration("ground footprint has zero width".into()));
        }
        let scale = (out_width as f64 - 1.0) / y_span;
        let out_height = ((x_max - x_min) * scale).ceil() as u32 + 1;
        let mut mapping = Self {
            m: Matrix3::identity(),
            m_inv: Matrix3::identity(),
            out_width,
            out_height: out_height.max(2),
            scale,
            origin: GroundPoint::new(x_min, y_max),
            crop_row,
            src_width,
            src_height,
        };
        let bird = ground.map(|g| mapping.ground_to_bird(g));
        let mut m = perspective_transform(&corners, &bird)?;
        // keep the homogeneous scale positive over the source image
        if (m * nalgebra::Vector3::new(w1 / 2.0, h1 / 2.0, 1.0)).z < 0.0 {
            m = -m;
        }
        mapping.m_inv = m
            .try_inverse()
            .ok_or_else(|| Error::InvalidCalibration("bird-view transform is singular".into()))?;
        mapping.m = m;
        Ok(mapping)
    }

    /// Cropped-image pixel to bird-view pixel transform.
    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.m
    }

    pub fn matrix_inverse(&self) -> &Matrix3<f64> {
        &self.m_inv
    }

    pub fn bird_to_ground(&self, p: PixelCoord) -> GroundPoint {
        GroundPoint {
            x: self.origin.x + (self.out_height as f64 - 1.0 - p.v) / self.scale,
            y: self.origin.y - p.u / self.scale,
        }
    }

    pub fn ground_to_bird(&self, g: GroundPoint) -> PixelCoord {
        PixelCoord {
            u: (self.origin.y - g.y) * self.scale,
            v: self.out_height as f64 - 1.0 - (g.x - self.origin.x) * self.scale,
        }
    }

    /// Cropped-image pixel to bird-view pixel.
    pub fn cropped_to_bird(&self, p: PixelCoord) -> Result<PixelCoord> {
        let (u, v) = apply_homography(&self.m, p.u, p.v)?;
        Ok(PixelCoord { u, v })
    }

    pub fn bird_to_cropped(&self, p: PixelCoord) -> Result<PixelCoord> {
        let (u, v) = apply_homography(&self.m_inv, p.u, p.v)?;
        Ok(PixelCoord { u, v })
    }

    /// Ground span of one bird-view pixel, meters.
    pub fn pixel_size(&self) -> f64 {
        1.0 / self.scale
    }
}

fn sample_nearest(src: &RgbImage, x: f64, y: f64) -> Rgb<u8> {
    let u = (x.round() as u32).min(src.width() - 1);
    let v = (y.round() as u32).min(src.height() - 1);
    *src.get_pixel(u, v)
}

fn sample_bilinear(src: &RgbImage, x: f64, y: f64) -> Rgb<u8> {
    let x0 = x.floor() as u32;
    let y0 = y.floor() as u32;
    let x1 = (x0 + 1).min(src.width() - 1);
    let y1 = (y0 + 1).min(src.height() - 1);
    let fx = x - x0 as f64;
    let fy = y - y0 as f64;
    let p00 = src.get_pixel(x0, y0).0;
    let p10 = src.get_pixel(x1, y0).0;
    let p01 = src.get_pixel(x0, y1).0;
    let p11 = src.get_pixel(x1, y1).0;
    let mut out = [0u8; 3];
    for c in 0..3 {
        let a = p00[c] as f64 + fx * (p10[c] as f64 - p00[c] as f64);
        let b = p01[c] as f64 + fx * (p11[c] as f64 - p01[c] as f64);
        out[c] = (a + fy * (b - a)).round().clamp(0.0, 255.0) as u8;
    }
    Rgb(out)
}

/// Resamples the cropped camera image into the bird's-eye raster.
///
/// Every output pixel is pulled from `M^-1 (u, v)`; samples falling outside
/// the source image are black.
pub fn warp_to_birdview(img: &RgbImage, mapping: &BirdviewMapping, interp: Interpolation) -> RgbImage {
    let mut out = RgbImage::new(mapping.out_width, mapping.out_height);
    let (w, h) = (img.width(), img.height());
    if w == 0 || h == 0 {
        return out;
    }
    let (max_x, max_y) = (w as f64 - 1.0, h as f64 - 1.0);
    let mi = mapping.matrix_inverse();
    for (bu, bv, px) in out.enumerate_pixels_mut() {
        let (bu, bv) = (bu as f64, bv as f64);
        let z = mi[(2, 0)] * bu + mi[(2, 1)] * bv + mi[(2, 2)];
        if z <= 0.0 {
            continue;
        }
        let x = (mi[(0, 0)] * bu + mi[(0, 1)] * bv + mi[(0, 2)]) / z;
        let y = (mi[(1, 0)] * bu + mi[(1, 1)] * bv + mi[(1, 2)]) / z;
        // a hair of slack so corner pixels that map exactly onto the border survive rounding
        if !(x >= -1e-6 && y >= -1e-6 && x <= max_x + 1e-6 && y <= max_y + 1e-6) {
            continue;
        }
        let (x, y) = (x.clamp(0.0, max_x), y.clamp(0.0, max_y));
        *px = match interp {
            Interpolation::Bilinear => sample_bilinear(img, x, y),
            Interpolation::Nearest => sample_nearest(img, x, y),
        };
    }
    out
}
