//! Wall-view sampling and the view score
//! `sum Grad(n_p) + 0.3 sum ln(d_p + 1)`.

use geo::{Area, Centroid, Contains, Coord, LineString, Point, Polygon};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrator::{trace, TraceHit};
use crate::io::PfmImage;
use crate::math::{Vec3, UP};
use crate::scene::{Camera, Scene};

pub const DEPTH_WEIGHT: f64 = 0.3;
pub const DEFAULT_INSET: f64 = 0.3;
pub const DEFAULT_CAMERA_HEIGHT: f64 = 1.5;
pub const DEFAULT_SPACING: f64 = 0.5;
pub const DEFAULT_FOV_DEG: f64 = 60.0;
/// Scoring render size (width, height).
pub const SCORE_RESOLUTION: (usize, usize) = (160, 120);

#[derive(Debug, Clone)]
pub struct ViewCandidate {
    pub camera: Camera,
    /// Optical-axis depth in meters; 0 where nothing is hit.
    pub depth: PfmImage,
    /// Raw camera-space normals; 0 where nothing is hit.
    pub normals: PfmImage,
    pub score: f64,
}

/// `sum_p sum_c |dx n_c| + |dy n_c|` with forward differences; the last
/// row and column difference against themselves.
pub fn normal_gradient_sum(normals: &PfmImage) -> f64 {
    let (w, h, ch) = (normals.width, normals.height, normals.channels);
    let mut sum = 0.0;
    for y in 0..h {
        for x in 0..w {
            let (xn, yn) = ((x + 1).min(w - 1), (y + 1).min(h - 1));
            for c in 0..ch {
                let v = normals.get(x, y, c) as f64;
                sum += (normals.get(xn, y, c) as f64 - v).abs() + (normals.get(x, yn, c) as f64 - v).abs();
            }
        }
    }
    sum
}

/// Natural-log depth term `sum_p ln(d_p + 1)`.
pub fn depth_log_sum(depth: &PfmImage) -> f64 {
    depth.data.iter().map(|&d| (d as f64).ln_1p()).sum()
}

pub fn score_maps(depth: &PfmImage, normals: &PfmImage) -> f64 {
    normal_gradient_sum(normals) + DEPTH_WEIGHT * depth_log_sum(depth)
}

pub fn score_view(candidate: &ViewCandidate) -> f64 {
    score_maps(&candidate.depth, &candidate.normals)
}

/// First-hit depth and camera-space normal maps.
pub fn render_view_maps(scene: &Scene, camera: &Camera) -> (PfmImage, PfmImage) {
    let (w, h) = (camera.width, camera.height);
    let rows: Vec<Vec<(f64, Vec3)>> = (0..h)
        .into_par_iter()
        .map(|y| {
            (0..w)
                .map(|x| {
                    let ray = camera.ray(x, y);
                    match trace(scene, &ray, 0.0) {
                        TraceHit::Surface(hit) => (camera.depth(&ray, hit.t), camera.to_camera(&hit.shading_normal)),
                        TraceHit::Lamp { t, normal, .. } => (camera.depth(&ray, t), camera.to_camera(&normal)),
                        TraceHit::Escape => (0.0, Vec3::zeros()),
                    }
                })
                .collect()
        })
        .collect();
    let mut depth = PfmImage::new(w, h, 1);
    let mut normals = PfmImage::new(w, h, 3);
    for (y, row) in rows.iter().enumerate() {
        for (x, (d, n)) in row.iter().enumerate() {
            depth.set(x, y, 0, *d as f32);
            for c in 0..3 {
                normals.set(x, y, c, n[c] as f32);
            }
        }
    }
    (depth, normals)
}

/// Renders the scoring maps at [`SCORE_RESOLUTION`] and scores each pose.
pub fn score_candidates(scene: &Scene, cameras: &[Camera]) -> Vec<ViewCandidate> {
    let (w, h) = SCORE_RESOLUTION;
    cameras
        .iter()
        .map(|cam| {
            let camera = cam.with_resolution(w, h);
            let (depth, normals) = render_view_maps(scene, &camera);
            let score = score_maps(&depth, &normals);
            ViewCandidate {
                camera,
                depth,
                normals,
                score,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallViewParams {
    pub spacing: f64,
    pub height: f64,
    pub inset: f64,
    pub fov_deg: f64,
    pub floor_z: f64,
}

impl Default for WallViewParams {
    fn default() -> Self {
        WallViewParams {
            spacing: DEFAULT_SPACING,
            height: DEFAULT_CAMERA_HEIGHT,
            inset: DEFAULT_INSET,
            fov_deg: DEFAULT_FOV_DEG,
            floor_z: 0.0,
        }
    }
}

/// Poses along each wall, `floor(len / spacing)` per wall (at least one) at
/// `(j + 0.5) len / count`, moved `inset` toward the interior and aimed at
/// the polygon centroid. Positions outside the polygon are dropped.
pub fn sample_wall_views(polygon: &[[f64; 2]], params: &WallViewParams) -> Result<Vec<Camera>> {
    if polygon.len() < 3 {
        return Err(Error::Geometry("polygon needs at least 3 vertices".into()));
    }
    if !(params.spacing > 0.0) {
        return Err(Error::field("spacing", "must be positive"));
    }
    let ring: Vec<Coord> = polygon.iter().map(|p| Coord { x: p[0], y: p[1] }).collect();
    let poly = Polygon::new(LineString::new(ring), vec![]);
    let signed = poly.signed_area();
    if !(signed.abs() > 1e-12) {
        return Err(Error::Geometry("polygon has zero area".into()));
    }
    let centroid = poly.centroid().ok_or_else(|| Error::Geometry("polygon has no centroid".into()))?;
    // left normal points inward for counter-clockwise rings
    let orient = signed.signum();
    let z = params.floor_z + params.height;
    let target = Vec3::new(centroid.x(), centroid.y(), z);
    let (w, h) = SCORE_RESOLUTION;

    let mut out = Vec::new();
    let n = polygon.len();
    for i in 0..n {
        let a = polygon[i];
        let b = polygon[(i + 1) % n];
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let len = dx.hypot(dy);
        if len <= 1e-12 {
            continue;
        }
        let count = ((len / params.spacing + 1e-9).floor() as usize).max(1);
        let inward = [-dy / len * orient, dx / len * orient];
        for j in 0..count {
            let s = (j as f64 + 0.5) / count as f64;
            let p = [
                a[0] + dx * s + inward[0] * params.inset,
                a[1] + dy * s + inward[1] * params.inset,
            ];
            if !poly.contains(&Point::new(p[0], p[1])) {
                continue;
            }
            let position = Vec3::new(p[0], p[1], z);
            if (target - position).norm() <= 1e-9 {
                continue;
            }
            out.push(Camera::looking_at(position, target, UP, params.fov_deg, w, h)?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct RankedView {
    pub index: usize,
    pub score: f64,
    pub position: [f64; 3],
    pub direction: [f64; 3],
    pub up: [f64; 3],
    pub fov_deg: f64,
}

/// Top `k` candidates by descending score; equal scores keep input order.
pub fn rank_views(candidates: &[ViewCandidate], k: usize) -> Result<Vec<RankedView>> {
    if candidates.is_empty() {
        return Err(Error::InvalidArgument("no view candidates".into()));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| candidates[b].score.total_cmp(&candidates[a].score));
    Ok(order
        .into_iter()
        .take(k)
        .map(|i| {
            let c = &candidates[i].camera;
            RankedView {
                index: i,
                score: candidates[i].score,
                position: c.position.into(),
                direction: c.forward.into(),
                up: c.up.into(),
                fov_deg: c.fov_deg,
            }
        })
        .collect())
}
