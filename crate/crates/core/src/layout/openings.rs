use serde::Serialize;

use super::{LayoutPolygon, PointCloud};

/// NYU40 class ids used for opening points.
pub const LABEL_DOOR: i32 = 8;
pub const LABEL_WINDOW: i32 = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OpeningKind {
    Door,
    Window,
}

impl OpeningKind {
    pub fn from_label(label: i32) -> Option<Self> {
        match label {
            LABEL_DOOR => Some(OpeningKind::Door),
            LABEL_WINDOW => Some(OpeningKind::Window),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WallSegment {
    pub wall: usize,
    /// Interval along the wall from its start vertex, meters.
    pub start: f64,
    pub end: f64,
    pub kind: OpeningKind,
    /// Placeholder CAD id, e.g. `window_0`.
    pub placeholder: String,
}

impl WallSegment {
    pub fn width(&self) -> f64 {
        self.end - self.start
    }
}

/// Closest wall of a point (lower index on ties) and the clamped position
/// along it.
fn nearest_wall(layout: &LayoutPolygon, p: [f64; 2]) -> (usize, f64) {
    let mut best = (f64::INFINITY, 0, 0.0);
    for i in 0..layout.wall_count() {
        let (a, b) = layout.wall(i);
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let len2 = dx * dx + dy * dy;
        let t = (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0);
        let (qx, qy) = (a[0] + dx * t, a[1] + dy * t);
        let d = (p[0] - qx).hypot(p[1] - qy);
        if d < best.0 {
            best = (d, i, t * len2.sqrt());
        }
    }
    (best.1, best.2)
}

/// Projects door and window points to their nearest wall, bins each wall
/// into `segment_width` pieces, keeps bins with at least `min_points` and
/// merges runs of kept bins.
pub fn assign_openings(cloud: &PointCloud, layout: &LayoutPolygon, segment_width: f64, min_points: usize) -> Vec<WallSegment> {
    let Some(labels) = &cloud.labels else {
        return Vec::new();
    };
    if !(segment_width > 0.0) {
        return Vec::new();
    }
    let walls = layout.wall_count();
    let wall_len: Vec<f64> = (0..walls)
        .map(|i| {
            let (a, b) = layout.wall(i);
            (b[0] - a[0]).hypot(b[1] - a[1])
        })
        .collect();
    let bins: Vec<usize> = wall_len.iter().map(|l| ((l / segment_width).ceil() as usize).max(1)).collect();
    // counts[kind][wall][bin]
    let mut counts = [
        bins.iter().map(|&n| vec![0usize; n]).collect::<Vec<_>>(),
        bins.iter().map(|&n| vec![0usize; n]).collect::<Vec<_>>(),
    ];
    for (p, &label) in cloud.points.iter().zip(labels) {
        let Some(kind) = OpeningKind::from_label(label) else { continue };
        let (w, t) = nearest_wall(layout, [p.x, p.y]);
        let b = ((t / segment_width).floor() as usize).min(bins[w] - 1);
        counts[kind as usize][w][b] += 1;
    }

    let mut out = Vec::new();
    let mut serial = [0usize; 2];
    for w in 0..walls {
        for kind in [OpeningKind::Door, OpeningKind::Window] {
            let c = &counts[kind as usize][w];
            let mut b = 0;
            while b < c.len() {
                if c[b] < min_points.max(1) {
                    b += 1;
                    continue;
                }
                let first = b;
                while b < c.len() && c[b] >= min_points.max(1) {
                    b += 1;
                }
                let name = match kind {
                    OpeningKind::Door => "door",
                    OpeningKind::Window => "window",
                };
                out.push(WallSegment {
                    wall: w,
                    start: first as f64 * segment_width,
                    end: (b as f64 * segment_width).min(wall_len[w]),
                    kind,
                    placeholder: format!("{name}_{}", serial[kind as usize]),
                });
                serial[kind as usize] += 1;
            }
        }
    }
    out
}
