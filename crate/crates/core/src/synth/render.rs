use image::{Rgb, RgbImage};
use nalgebra::Vector3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::scene::{GroundElement, ObstacleSpec, SceneSpec};
use super::SynthCamera;
use crate::colorspace::apply_color_gain;

struct Billboard<'a> {
    spec: &'a ObstacleSpec,
    base: Vector3<f64>,
    normal: Vector3<f64>,
    tangent: Vector3<f64>,
}

impl<'a> Billboard<'a> {
    fn new(spec: &'a ObstacleSpec) -> Option<Self> {
        let base = Vector3::new(spec.position.x, spec.position.y, 0.0);
        let horizontal = Vector3::new(base.x, base.y, 0.0);
        let n = horizontal.norm();
        if n < 1e-9 {
            return None;
        }
        let normal = horizontal / n;
        Some(Self {
            spec,
            base,
            normal,
            tangent: Vector3::new(-normal.y, normal.x, 0.0),
        })
    }

    /// Ray parameter of the hit, if the ray crosses the billboard.
    fn hit(&self, origin: &Vector3<f64>, dir: &Vector3<f64>) -> Option<f64> {
        let denom = dir.dot(&self.normal);
        if denom.abs() < 1e-12 {
            return None;
        }
        let t = (self.base - origin).dot(&self.normal) / denom;
        if t <= 0.0 {
            return None;
        }
        let p = origin + dir * t;
        let z = p.z;
        if z < 0.0 || z > self.spec.height_m {
            return None;
        }
        let lateral = (p - self.base).dot(&self.tangent);
        (lateral.abs() <= self.spec.half_width_at(z)).then_some(t)
    }
}

type Bounds = (f64, f64, f64, f64);

struct GroundIndex<'a> {
    elements: Vec<(&'a GroundElement, Bounds)>,
}

impl<'a> GroundIndex<'a> {
    fn new(elements: &'a [GroundElement]) -> Self {
        Self {
            elements: elements.iter().map(|e| (e, e.bounds())).collect(),
        }
    }

    /// Topmost (last listed) element color at a ground point.
    fn color_at(&self, x: f64, y: f64) -> Option<[u8; 3]> {
        self.elements
            .iter()
            .rev()
            .find(|(e, (x0, x1, y0, y1))| x >= *x0 && x <= *x1 && y >= *y0 && y <= *y1 && e.contains(x, y))
            .map(|(e, _)| e.color)
    }
}

/// Rasterizes a scene through the camera.
///
/// Ground elements are shaded via ray/ground intersection, obstacles as
/// camera-facing vertical billboards with nearest-hit occlusion. Each pixel
/// averages a regular `n x n` grid of sub-pixel rays.
pub fn render_scene(spec: &SceneSpec, cam: &SynthCamera) -> RgbImage {
    let pp = cam.pinhole;
    let n = spec.samples_per_axis.max(1);
    let ground = GroundIndex::new(&spec.ground_elements);
    let billboards: Vec<Billboard> = spec.obstacles.iter().filter_map(Billboard::new).collect();
    let origin = cam.center();
    let h = cam.pose.height_m;

    let mut img = RgbImage::new(pp.width, pp.height);
    let inv = 1.0 / (n * n) as f64;
    for (u, v, px) in img.enumerate_pixels_mut() {
        let mut acc = [0.0f64; 3];
        for i in 0..n {
            for j in 0..n {
                let su = u as f64 - 0.5 + (j as f64 + 0.5) / n as f64;
                let sv = v as f64 - 0.5 + (i as f64 + 0.5) / n as f64;
                let dir = cam.ray(su, sv);
                let (mut best_t, mut color) = if dir.z < 0.0 {
                    let t = h / -dir.z;
                    let c = ground
                        .color_at(t * dir.x, t * dir.y)
                        .unwrap_or(spec.ground_color);
                    (t, c)
                } else {
                    (f64::INFINITY, spec.background_color)
                };
                for b in &billboards {
                    if let Some(t) = b.hit(&origin, &dir) {
                        if t < best_t {
                            best_t = t;
                            color = b.spec.color;
                        }
                    }
                }
                for c in 0..3 {
                    acc[c] += color[c] as f64;
                }
            }
        }
        *px = Rgb(acc.map(|a| (a * inv).round() as u8));
    }

    if spec.motion_blur_px > 1 {
        img = box_blur_horizontal(&img, spec.motion_blur_px);
    }
    if spec.noise_sigma > 0.0 {
        add_noise(&mut img, spec.noise_sigma, spec.seed);
    }
    if let Some(gain) = &spec.ambient {
        img = apply_color_gain(&img, gain);
    }
    img
}

fn box_blur_horizontal(img: &RgbImage, len: u32) -> RgbImage {
    let (w, h) = img.dimensions();
    let half = (len / 2) as i64;
    RgbImage::from_fn(w, h, |u, v| {
        let mut acc = [0u32; 3];
        let mut count = 0u32;
        for k in 0..len as i64 {
            let x = u as i64 - half + k;
            if x >= 0 && x < w as i64 {
                let p = img.get_pixel(x as u32, v).0;
                for c in 0..3 {
                    acc[c] += p[c] as u32;
                }
                count += 1;
            }
        }
        Rgb(acc.map(|a| ((a as f64) / count as f64).round() as u8))
    })
}

fn add_noise(img: &mut RgbImage, sigma: f64, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).expect("sigma is positive");
    for p in img.pixels_mut() {
        for c in p.0.iter_mut() {
            *c = (*c as f64 + normal.sample(&mut rng)).round().clamp(0.0, 255.0) as u8;
        }
    }
}
