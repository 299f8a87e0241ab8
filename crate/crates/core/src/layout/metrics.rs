use geo::{Contains, Coord, LineString, Point, Polygon};
use serde::Serialize;

use crate::error::{Error, Result};

/// A predicted corner counts when it lies within this many pixels of its
/// matched ground-truth corner.
pub const CORNER_THRESHOLD_PX: f64 = 10.0;
const TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LayoutMetrics {
    pub corner_precision: f64,
    pub corner_recall: f64,
    pub edge_precision: f64,
    pub edge_recall: f64,
    pub iou: f64,
}

impl LayoutMetrics {
    const ZERO: LayoutMetrics = LayoutMetrics {
        corner_precision: 0.0,
        corner_recall: 0.0,
        edge_precision: 0.0,
        edge_recall: 0.0,
        iou: 0.0,
    };
}

/// Greedy one-to-one matching by ascending distance; returns, per
/// prediction, the matched ground-truth index.
fn match_corners(pred: &[[f64; 2]], gt: &[[f64; 2]], scale: f64) -> Vec<Option<usize>> {
    let mut pairs = Vec::new();
    for (i, p) in pred.iter().enumerate() {
        for (j, g) in gt.iter().enumerate() {
            let d = (p[0] - g[0]).hypot(p[1] - g[1]) * scale;
            if d <= CORNER_THRESHOLD_PX + TOL {
                pairs.push((d, i, j));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut assigned = vec![None; pred.len()];
    let mut taken = vec![false; gt.len()];
    for (_, i, j) in pairs {
        if assigned[i].is_none() && !taken[j] {
            assigned[i] = Some(j);
            taken[j] = true;
        }
    }
    assigned
}

fn polygon(v: &[[f64; 2]]) -> Polygon<f64> {
    Polygon::new(LineString::new(v.iter().map(|p| Coord { x: p[0], y: p[1] }).collect()), vec![])
}

/// IoU of the two room masks sampled at pixel centers.
fn raster_iou(a: &[[f64; 2]], b: &[[f64; 2]], scale: f64) -> f64 {
    let (pa, pb) = (polygon(a), polygon(b));
    let all = a.iter().chain(b);
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in all {
        x0 = x0.min(p[0] * scale);
        x1 = x1.max(p[0] * scale);
        y0 = y0.min(p[1] * scale);
        y1 = y1.max(p[1] * scale);
    }
    let (ix0, iy0) = (x0.floor() as i64, y0.floor() as i64);
    let (ix1, iy1) = (x1.ceil() as i64, y1.ceil() as i64);
    let (mut inter, mut union) = (0u64, 0u64);
    for y in iy0..iy1 {
        for x in ix0..ix1 {
            let pt = Point::new((x as f64 + 0.5) / scale, (y as f64 + 0.5) / scale);
            let (ina, inb) = (pa.contains(&pt), pb.contains(&pt));
            inter += (ina && inb) as u64;
            union += (ina || inb) as u64;
        }
    }
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Corner, edge and area agreement between a predicted and a ground-truth
/// floor polygon. `pixels_per_meter` sets the raster the 10 px rule and the
/// masks are measured on.
pub fn eval_layout(pred: &[[f64; 2]], gt: &[[f64; 2]], pixels_per_meter: f64) -> Result<LayoutMetrics> {
    if !(pixels_per_meter > 0.0) || !pixels_per_meter.is_finite() {
        return Err(Error::field("pixels_per_meter", "must be positive and finite"));
    }
    if pred.iter().chain(gt).flatten().any(|c| !c.is_finite()) {
        return Err(Error::Geometry("non-finite layout coordinate".into()));
    }
    if pred.is_empty() || gt.is_empty() {
        return Ok(LayoutMetrics::ZERO);
    }
    let m = match_corners(pred, gt, pixels_per_meter);
    let matched = m.iter().flatten().count() as f64;

    let (np, ng) = (pred.len(), gt.len());
    let gt_adjacent = |a: usize, b: usize| a != b && ((a + 1) % ng == b || (b + 1) % ng == a);
    let valid_edges = if np < 2 || ng < 2 {
        0
    } else {
        (0..np)
            .filter(|&i| match (m[i], m[(i + 1) % np]) {
                (Some(a), Some(b)) => gt_adjacent(a, b),
                _ => false,
            })
            .count()
    } as f64;

    let iou = if np >= 3 && ng >= 3 { raster_iou(pred, gt, pixels_per_meter) } else { 0.0 };
    Ok(LayoutMetrics {
        corner_precision: matched / np as f64,
        corner_recall: matched / ng as f64,
        edge_precision: valid_edges / np as f64,
        edge_recall: valid_edges / ng as f64,
        iou,
    })
}
