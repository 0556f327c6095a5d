use image::{Rgb, RgbImage};

use super::Obstacle;
use crate::geometry::{BirdviewMapping, PixelCoord};

pub const IN_LANE_COLOR: Rgb<u8> = Rgb([40, 220, 60]);
pub const OUT_OF_LANE_COLOR: Rgb<u8> = Rgb([230, 30, 30]);

fn put(img: &mut RgbImage, u: f64, v: f64, color: Rgb<u8>) {
    let (u, v) = (u.round(), v.round());
    if u >= 0.0 && v >= 0.0 && u < img.width() as f64 && v < img.height() as f64 {
        img.put_pixel(u as u32, v as u32, color);
    }
}

/// Straight segment sampled at one-pixel steps, clipped to the image.
pub fn draw_line(img: &mut RgbImage, a: PixelCoord, b: PixelCoord, color: Rgb<u8>) {
    let (du, dv) = (b.u - a.u, b.v - a.v);
    let steps = du.abs().max(dv.abs()).ceil().clamp(1.0, 1e5) as u32;
    for k in 0..=steps {
        let t = k as f64 / steps as f64;
        put(img, a.u + t * du, a.v + t * dv, color);
    }
}

pub fn draw_polygon(img: &mut RgbImage, pts: &[PixelCoord], color: Rgb<u8>) {
    for (i, a) in pts.iter().enumerate() {
        draw_line(img, *a, pts[(i + 1) % pts.len()], color);
    }
}

fn lane_color(o: &Obstacle) -> Rgb<u8> {
    if o.in_lane {
        IN_LANE_COLOR
    } else {
        OUT_OF_LANE_COLOR
    }
}

/// Boxes drawn onto the bird view, green in lane and red outside.
pub fn annotate_birdview(bird: &RgbImage, obstacles: &[Obstacle]) -> RgbImage {
    let mut out = bird.clone();
    for o in obstacles {
        draw_polygon(&mut out, &o.quad, lane_color(o));
    }
    out
}

/// Bird-view boxes mapped back onto the camera frame, with the crop row marked.
pub fn annotate_frame(frame: &RgbImage, m: &BirdviewMapping, obstacles: &[Obstacle]) -> RgbImage {
    let mut out = frame.clone();
    let w = out.width() as f64;
    let row = m.crop_row as f64;
    draw_line(&mut out, PixelCoord::new(0.0, row), PixelCoord::new(w - 1.0, row), Rgb([255, 255, 255]));
    for o in obstacles {
        let pts: Option<Vec<PixelCoord>> = o
            .quad
            .iter()
            .map(|p| m.bird_to_cropped(*p).ok().map(|c| PixelCoord::new(c.u, c.v + row)))
            .collect();
        if let Some(pts) = pts {
            draw_polygon(&mut out, &pts, lane_color(o));
        }
    }
    out
}
