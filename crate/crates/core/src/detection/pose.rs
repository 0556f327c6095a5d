use crate::colorspace::BinaryMask;
use crate::geometry::{BirdviewMapping, GroundPoint, PixelCoord};
use crate::segmentation::Region;

/// Ground position and radius from a bird-view bottom edge: the position is
/// the edge midpoint, the radius its ground distance to the right end.
pub fn pose_from_bottom_edge(left: PixelCoord, right: PixelCoord, m: &BirdviewMapping) -> (GroundPoint, f64) {
    let mid = PixelCoord::new(0.5 * (left.u + right.u), 0.5 * (left.v + right.v));
    let g = m.bird_to_ground(mid);
    (g, g.distance(&m.bird_to_ground(right)))
}

/// Ground position and radius of a region's near edge.
///
/// Everything standing on the ground smears radially away from the robot in
/// the bird view while its foot stays in place. The foot is therefore the
/// region's closest approach to the robot origin, and its width is the
/// region's angular extent seen from there. For an object straight ahead
/// this is the midpoint of the bottom edge of the bounding box.
pub fn obstacle_pose(region: &Region, m: &BirdviewMapping) -> (GroundPoint, f64) {
    let top = region.top_row();
    let mut range = f64::INFINITY;
    let (mut phi_lo, mut phi_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (i, &(a, b)) in region.row_spans.iter().enumerate() {
        if a > b {
            continue;
        }
        let v = (top + i as u32) as f64;
        // outer pixel edges of the run
        let left = m.bird_to_ground(PixelCoord::new(a as f64 - 0.5, v));
        let right = m.bird_to_ground(PixelCoord::new(b as f64 + 0.5, v));
        let near_x = m.bird_to_ground(PixelCoord::new(0.0, v + 0.5)).x;
        for g in [left, right] {
            for x in [near_x, near_x + m.pixel_size()] {
                let phi = g.y.atan2(x);
                phi_lo = phi_lo.min(phi);
                phi_hi = phi_hi.max(phi);
            }
        }
        let y = 0f64.clamp(right.y, left.y);
        range = range.min(near_x.hypot(y));
    }
    let phi = 0.5 * (phi_lo + phi_hi);
    let radius = range * (0.5 * (phi_hi - phi_lo)).tan();
    (GroundPoint::new(range * phi.cos(), range * phi.sin()), radius)
}

/// Bird-view pixel of the robot origin, clamped into the raster.
pub fn robot_anchor(m: &BirdviewMapping) -> PixelCoord {
    let p = m.ground_to_bird(GroundPoint::new(0.0, 0.0));
    PixelCoord::new(
        p.u.clamp(0.0, m.out_width as f64 - 1.0),
        p.v.clamp(0.0, m.out_height as f64 - 1.0),
    )
}

fn crosses_white(mask: &BinaryMask, from: PixelCoord, to: PixelCoord, run_min: u32) -> bool {
    let (du, dv) = (to.u - from.u, to.v - from.v);
    let steps = du.abs().max(dv.abs()).ceil().max(1.0) as u32;
    let mut run = 0;
    let mut last = None;
    for k in 0..=steps {
        let t = k as f64 / steps as f64;
        let u = (from.u + t * du).round();
        let v = (from.v + t * dv).round();
        if u < 0.0 || v < 0.0 || u >= mask.width as f64 || v >= mask.height as f64 {
            run = 0;
            continue;
        }
        let px = (u as u32, v as u32);
        if last == Some(px) {
            continue;
        }
        last = Some(px);
        if mask.get(px.0, px.1) {
            run += 1;
            if run >= run_min {
                return true;
            }
        } else {
            run = 0;
        }
    }
    false
}

/// True unless white paint lies between the robot and the obstacle.
///
/// Three search lines run from the anchor to the obstacle and to points one
/// radius left and right of it; a run of `run_min` white pixels on any of
/// them marks the obstacle as beyond a lane boundary.
pub fn lane_boundary_check(
    white: &BinaryMask,
    anchor: PixelCoord,
    obstacle: PixelCoord,
    radius_px: f64,
    run_min: u32,
) -> bool {
    [-radius_px, 0.0, radius_px]
        .iter()
        .all(|off| !crosses_white(white, anchor, PixelCoord::new(obstacle.u + off, obstacle.v), run_min))
}
