//! Hexcone RGB to HSV conversion and band filtering.
//!
//! Hue is kept in degrees `[0, 360)`, saturation as a fraction and value on
//! the 0..=255 intensity scale.

use image::{Rgb, RgbImage};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HsvPixel {
    pub h: f64,
    pub s: f64,
    pub v: u8,
}

const HUE_FRAC_BITS: u32 = 32;

/// Converts one RGB pixel.
///
/// `V = max(R, G, B)`, `S = (V - min) / V` and the hue is taken from the
/// sector of the dominant channel. Gray pixels get hue 0.
pub fn rgb_to_hsv(c: Rgb<u8>) -> HsvPixel {
    let [r, g, b] = c.0.map(i32::from);
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    if delta == 0 {
        return HsvPixel {
            h: 0.0,
            s: 0.0,
            v: max as u8,
        };
    }
    // hue = 60 * (sector + (a - b) / delta), built as one exact integer
    // numerator, then rounded once to a multiple of 2^-32 degree in integer
    // arithmetic. The result converts to f64 exactly, so rotating the
    // channels shifts h by exactly 120 with no second rounding.
    let (sector, diff) = if max == r {
        (0, g - b)
    } else if max == g {
        (2, b - r)
    } else {
        (4, r - g)
    };
    let mut num = 60 * (sector * delta + diff);
    if num < 0 {
        num += 360 * delta;
    }
    let (num, delta64) = (i64::from(num) << HUE_FRAC_BITS, i64::from(delta));
    let fixed = (2 * num + delta64) / (2 * delta64);
    HsvPixel {
        h: fixed as f64 / (1u64 << HUE_FRAC_BITS) as f64,
        s: delta as f64 / max as f64,
        v: max as u8,
    }
}

/// Per-pixel HSV image in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct HsvImage {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<HsvPixel>,
}

impl HsvImage {
    pub fn from_rgb(img: &RgbImage) -> Self {
        Self {
            width: img.width(),
            height: img.height(),
            pixels: img.pixels().map(|p| rgb_to_hsv(*p)).collect(),
        }
    }

    pub fn get(&self, u: u32, v: u32) -> HsvPixel {
        self.pixels[(v * self.width + u) as usize]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandName {
    Yellow,
    Orange,
    White,
}

/// Inclusive HSV box. A hue interval with `h_lo > h_hi` wraps through 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColorBand {
    pub name: BandName,
    pub h_lo: f64,
    pub h_hi: f64,
    pub s_lo: f64,
    pub s_hi: f64,
    pub v_lo: u8,
    pub v_hi: u8,
}

impl ColorBand {
    /// Calibration default; tune per image corpus.
    pub fn default_yellow() -> Self {
        Self {
            name: BandName::Yellow,
            h_lo: 40.0,
            h_hi: 70.0,
            s_lo: 0.4,
            s_hi: 1.0,
            v_lo: 100,
            v_hi: 255,
        }
    }

    /// Calibration default; tune per image corpus.
    pub fn default_orange() -> Self {
        Self {
            name: BandName::Orange,
            h_lo: 10.0,
            h_hi: 35.0,
            s_lo: 0.4,
            s_hi: 1.0,
            v_lo: 100,
            v_hi: 255,
        }
    }

    /// Low saturation, high value; any hue.
    pub fn default_white() -> Self {
        Self {
            name: BandName::White,
            h_lo: 0.0,
            h_hi: 360.0,
            s_lo: 0.0,
            s_hi: 0.25,
            v_lo: 150,
            v_hi: 255,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let hue_ok = |h: f64| (0.0..=360.0).contains(&h);
        let sat_ok = |s: f64| (0.0..=1.0).contains(&s);
        if !(hue_ok(self.h_lo) && hue_ok(self.h_hi)) {
            return Err(Error::InvalidConfig(format!("{:?} band hue bounds outside [0, 360]", self.name)));
        }
        if !(sat_ok(self.s_lo) && sat_ok(self.s_hi)) || self.s_lo > self.s_hi {
            return Err(Error::InvalidConfig(format!("{:?} band saturation bounds invalid", self.name)));
        }
        if self.v_lo > self.v_hi {
            return Err(Error::InvalidConfig(format!("{:?} band value bounds invalid", self.name)));
        }
        Ok(())
    }

    pub fn contains(&self, p: HsvPixel) -> bool {
        let hue_in = if self.h_lo <= self.h_hi {
            p.h >= self.h_lo && p.h <= self.h_hi
        } else {
            p.h >= self.h_lo || p.h <= self.h_hi
        };
        hue_in && p.s >= self.s_lo && p.s <= self.s_hi && p.v >= self.v_lo && p.v <= self.v_hi
    }
}

/// One boolean per pixel, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMask {
    pub width: u32,
    pub height: u32,
    pub bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            bits: vec![false; (width * height) as usize],
        }
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> bool) -> Self {
        let mut bits = Vec::with_capacity((width * height) as usize);
        for v in 0..height {
            for u in 0..width {
                bits.push(f(u, v));
            }
        }
        Self { width, height, bits }
    }

    #[inline]
    pub fn get(&self, u: u32, v: u32) -> bool {
        self.bits[(v * self.width + u) as usize]
    }

    #[inline]
    pub fn set(&mut self, u: u32, v: u32, on: bool) {
        self.bits[(v * self.width + u) as usize] = on;
    }

    pub fn count_set(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// White-on-black rendering for debug dumps.
    pub fn to_image(&self) -> image::GrayImage {
        image::GrayImage::from_fn(self.width, self.height, |u, v| {
            image::Luma([if self.get(u, v) { 255 } else { 0 }])
        })
    }
}

pub fn apply_band_filter(img: &HsvImage, band: &ColorBand) -> BinaryMask {
    BinaryMask {
        width: img.width,
        height: img.height,
        bits: img.pixels.iter().map(|&p| band.contains(p)).collect(),
    }
}

/// Per-channel affine gain `c' = clamp(a c + b, 0, 255)`.
///
/// Stand-in for an upstream color-correction stage.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColorGain {
    pub a: [f64; 3],
    pub b: [f64; 3],
}

impl Default for ColorGain {
    fn default() -> Self {
        Self {
            a: [1.0; 3],
            b: [0.0; 3],
        }
    }
}

impl ColorGain {
    pub fn is_identity(&self) -> bool {
        self.a == [1.0; 3] && self.b == [0.0; 3]
    }

    pub fn apply_pixel(&self, p: Rgb<u8>) -> Rgb<u8> {
        Rgb(std::array::from_fn(|c| {
            (self.a[c] * p.0[c] as f64 + self.b[c]).round().clamp(0.0, 255.0) as u8
        }))
    }
}

pub fn apply_color_gain(img: &RgbImage, gain: &ColorGain) -> RgbImage {
    let mut out = img.clone();
    for p in out.pixels_mut() {
        *p = gain.apply_pixel(*p);
    }
    out
}
