//! Connected-component labeling and per-region shape features.
//!
//! Labeling is the classic two-pass scheme with a union-find equivalence
//! table, 8-connected. Region moments are accumulated in integers so that
//! translated or 90-degree rotated copies of a region produce bit-identical
//! central moments.

use serde::{Deserialize, Serialize};

use crate::colorspace::BinaryMask;
use crate::error::{Error, Result};
use crate::geometry::PixelCoord;

/// Per-pixel region labels, `0` is background and regions are `1..=count`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelImage {
    pub width: u32,
    pub height: u32,
    pub labels: Vec<u32>,
    pub count: u32,
}

impl LabelImage {
    #[inline]
    pub fn get(&self, u: u32, v: u32) -> u32 {
        self.labels[(v * self.width + u) as usize]
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new() -> Self {
        // slot 0 is the background
        Self { parent: vec![0] }
    }

    fn make_set(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        while self.parent[x as usize] != root {
            let next = self.parent[x as usize];
            self.parent[x as usize] = root;
            x = next;
        }
        root
    }

    fn union(&mut self, a: u32, b: u32) -> u32 {
        let ra = self.find(a);
        let rb = self.find(b);
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi as usize] = lo;
        lo
    }
}

/// Labels the 8-connected components of `mask`.
///
/// Labels are renumbered contiguously in order of first appearance in a
/// raster scan.
pub fn label_components(mask: &BinaryMask) -> LabelImage {
    let (w, h) = (mask.width as usize, mask.height as usize);
    let mut provisional = vec![0u32; w * h];
    let mut uf = UnionFind::new();

    for v in 0..h {
        for u in 0..w {
            if !mask.bits[v * w + u] {
                continue;
            }
            // already-visited neighbours: W, NW, N, NE
            let mut label = 0u32;
            let mut merge = |n: u32, uf: &mut UnionFind| {
                if n != 0 {
                    label = if label == 0 { n } else { uf.union(label, n) };
                }
            };
            if u > 0 {
                merge(provisional[v * w + u - 1], &mut uf);
            }
            if v > 0 {
                let up = (v - 1) * w;
                if u > 0 {
                    merge(provisional[up + u - 1], &mut uf);
                }
                merge(provisional[up + u], &mut uf);
                if u + 1 < w {
                    merge(provisional[up + u + 1], &mut uf);
                }
            }
            provisional[v * w + u] = if label == 0 { uf.make_set() } else { label };
        }
    }

    let mut remap = vec![0u32; uf.parent.len()];
    let mut count = 0u32;
    for p in provisional.iter_mut() {
        if *p == 0 {
            continue;
        }
        let root = uf.find(*p) as usize;
        if remap[root] == 0 {
            count += 1;
            remap[root] = count;
        }
        *p = remap[root];
    }

    LabelImage {
        width: mask.width,
        height: mask.height,
        labels: provisional,
        count,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColorClass {
    Yellow,
    Orange,
}

/// Geometric features of one labeled region.
#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    pub label: u32,
    pub area: u64,
    pub centroid: PixelCoord,
    /// Second central moments divided by area, pixels^2.
    pub mu20: f64,
    pub mu02: f64,
    pub mu11: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    /// Axis-aligned bounding box through the outer pixel edges, ordered
    /// top-left, top-right, bottom-right, bottom-left.
    pub quad: [PixelCoord; 4],
    /// Leftmost and rightmost column of the region in each row, from the
    /// top row of the box down.
    pub row_spans: Vec<(u32, u32)>,
    pub color_class: ColorClass,
}

impl Region {
    pub fn top_row(&self) -> u32 {
        (self.quad[0].v + 0.5) as u32
    }

    pub fn bottom_row(&self) -> u32 {
        (self.quad[2].v - 0.5) as u32
    }
}

/// Ordered eigenvalues `(lambda1, lambda2)` of `[[mu20, mu11], [mu11, mu02]]`.
pub fn inertia_eigenvalues(mu20: f64, mu02: f64, mu11: f64) -> Result<(f64, f64)> {
    let half_trace = 0.5 * (mu20 + mu02);
    let half_diff = 0.5 * (mu20 - mu02);
    let root = half_diff.hypot(mu11);
    let l1 = half_trace + root;
    let l2 = half_trace - root;
    if l2 < -1e-9 {
        return Err(Error::NotPsd(l2));
    }
    Ok((l1, l2.max(0.0)))
}

#[derive(Clone, Debug)]
struct Accum {
    n: u64,
    su: i128,
    sv: i128,
    suu: i128,
    svv: i128,
    suv: i128,
    u_min: u32,
    u_max: u32,
    v_min: u32,
    v_max: u32,
}

impl Accum {
    fn new() -> Self {
        Self {
            n: 0,
            su: 0,
            sv: 0,
            suu: 0,
            svv: 0,
            suv: 0,
            u_min: u32::MAX,
            u_max: 0,
            v_min: u32::MAX,
            v_max: 0,
        }
    }

    fn add(&mut self, u: u32, v: u32) {
        let (a, b) = (u as i128, v as i128);
        self.n += 1;
        self.su += a;
        self.sv += b;
        self.suu += a * a;
        self.svv += b * b;
        self.suv += a * b;
        self.u_min = self.u_min.min(u);
        self.u_max = self.u_max.max(u);
        self.v_min = self.v_min.min(v);
        self.v_max = self.v_max.max(v);
    }

    fn finish(&self, li: &LabelImage, label: u32, color_class: ColorClass) -> Result<Region> {
        let n = self.n as i128;
        let n2 = (n * n) as f64;
        // n * sum(x^2) - sum(x)^2 is translation invariant and exact
        let mu20 = (n * self.suu - self.su * self.su) as f64 / n2;
        let mu02 = (n * self.svv - self.sv * self.sv) as f64 / n2;
        let mu11 = (n * self.suv - self.su * self.sv) as f64 / n2;
        let (lambda1, lambda2) = inertia_eigenvalues(mu20, mu02, mu11)?;
        let (l, r) = (self.u_min as f64 - 0.5, self.u_max as f64 + 0.5);
        let (t, b) = (self.v_min as f64 - 0.5, self.v_max as f64 + 0.5);
        let mut row_spans = Vec::with_capacity((self.v_max - self.v_min + 1) as usize);
        for v in self.v_min..=self.v_max {
            let mut span = (u32::MAX, 0);
            for u in self.u_min..=self.u_max {
                if li.get(u, v) == label {
                    span.0 = span.0.min(u);
                    span.1 = span.1.max(u);
                }
            }
            row_spans.push(span);
        }
        Ok(Region {
            label,
            area: self.n,
            centroid: PixelCoord::new(self.su as f64 / n as f64, self.sv as f64 / n as f64),
            mu20,
            mu02,
            mu11,
            lambda1,
            lambda2,
            quad: [
                PixelCoord::new(l, t),
                PixelCoord::new(r, t),
                PixelCoord::new(r, b),
                PixelCoord::new(l, b),
            ],
            row_spans,
            color_class,
        })
    }
}

/// Features of a single region.
pub fn region_properties(li: &LabelImage, label: u32, color_class: ColorClass) -> Result<Region> {
    if label == 0 || label > li.count {
        return Err(Error::UnknownLabel { label, count: li.count });
    }
    let mut acc = Accum::new();
    for v in 0..li.height {
        for u in 0..li.width {
            if li.get(u, v) == label {
                acc.add(u, v);
            }
        }
    }
    acc.finish(li, label, color_class)
}

/// Features of every region in one pass over the label image, indexed by `label - 1`.
pub fn all_region_properties(li: &LabelImage, color_class: ColorClass) -> Result<Vec<Region>> {
    let mut accs = vec![Accum::new(); li.count as usize];
    for v in 0..li.height {
        for u in 0..li.width {
            let l = li.get(u, v);
            if l != 0 {
                accs[(l - 1) as usize].add(u, v);
            }
        }
    }
    accs.iter()
        .enumerate()
        .map(|(i, a)| a.finish(li, i as u32 + 1, color_class))
        .collect()
}
