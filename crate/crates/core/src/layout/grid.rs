use std::collections::{HashMap, VecDeque};

use geo::{Coord, LineString, Polygon, Simplify};

use super::{Plane, PointCloud};
use crate::error::{Error, Result};

/// Binary top-down occupancy over the cloud's bounding rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    /// World `(x, y)` of the lower-left corner of cell `(0, 0)`.
    pub origin: [f64; 2],
    pub cell: f64,
    pub width: usize,
    pub height: usize,
    /// Row-major, row 0 at the smallest `y`.
    pub occupied: Vec<bool>,
}

impl OccupancyGrid {
    pub fn get(&self, ix: usize, iy: usize) -> bool {
        self.occupied[iy * self.width + ix]
    }

    pub fn count(&self) -> usize {
        self.occupied.iter().filter(|&&o| o).count()
    }

    /// Cell holding world point `(x, y)`, if inside the grid.
    pub fn cell_of(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        let fx = ((x - self.origin[0]) / self.cell).floor();
        let fy = ((y - self.origin[1]) / self.cell).floor();
        (fx >= 0.0 && fy >= 0.0 && (fx as usize) < self.width && (fy as usize) < self.height)
            .then_some((fx as usize, fy as usize))
    }
}

/// Projects points along the plane normal onto the plane and bins their
/// world `(x, y)`. Each axis gets `floor(extent / cell) + 1` cells so the
/// extreme points fall inside the grid.
pub fn project_topdown(cloud: &PointCloud, plane: &Plane, cell: f64) -> Result<OccupancyGrid> {
    if !(cell > 0.0) {
        return Err(Error::field("cell", "must be positive"));
    }
    if cloud.points.is_empty() {
        return Err(Error::Fit("empty point cloud".into()));
    }
    let flat: Vec<[f64; 2]> = cloud
        .points
        .iter()
        .map(|p| {
            let q = p - plane.normal * plane.signed_distance(p);
            [q.x, q.y]
        })
        .collect();
    let mut min = [f64::INFINITY; 2];
    let mut max = [f64::NEG_INFINITY; 2];
    for p in &flat {
        for k in 0..2 {
            min[k] = min[k].min(p[k]);
            max[k] = max[k].max(p[k]);
        }
    }
    let width = ((max[0] - min[0]) / cell).floor() as usize + 1;
    let height = ((max[1] - min[1]) / cell).floor() as usize + 1;
    let mut grid = OccupancyGrid {
        origin: min,
        cell,
        width,
        height,
        occupied: vec![false; width * height],
    };
    for p in &flat {
        let ix = (((p[0] - min[0]) / cell).floor() as usize).min(width - 1);
        let iy = (((p[1] - min[1]) / cell).floor() as usize).min(height - 1);
        grid.occupied[iy * width + ix] = true;
    }
    Ok(grid)
}

/// Largest 4-connected component, marked in a mask.
fn largest_component(grid: &OccupancyGrid) -> Vec<bool> {
    let (w, h) = (grid.width, grid.height);
    let mut label = vec![usize::MAX; w * h];
    let mut best = (0, usize::MAX);
    let mut next = 0;
    for start in 0..w * h {
        if !grid.occupied[start] || label[start] != usize::MAX {
            continue;
        }
        let mut size = 0;
        let mut queue = VecDeque::from([start]);
        label[start] = next;
        while let Some(c) = queue.pop_front() {
            size += 1;
            let (x, y) = (c % w, c / w);
            let mut push = |n: usize| {
                if grid.occupied[n] && label[n] == usize::MAX {
                    label[n] = next;
                    queue.push_back(n);
                }
            };
            if x > 0 {
                push(c - 1);
            }
            if x + 1 < w {
                push(c + 1);
            }
            if y > 0 {
                push(c - w);
            }
            if y + 1 < h {
                push(c + w);
            }
        }
        if size > best.0 {
            best = (size, next);
        }
        next += 1;
    }
    label.iter().map(|&l| l == best.1).collect()
}

/// Boundary loops of a cell mask on the lattice, interior to the left.
fn boundary_loops(mask: &[bool], w: usize, h: usize) -> Vec<Vec<(i64, i64)>> {
    let inside = |x: i64, y: i64| x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h && mask[y as usize * w + x as usize];
    let mut edges: Vec<((i64, i64), (i64, i64))> = Vec::new();
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            if !inside(x, y) {
                continue;
            }
            if !inside(x, y - 1) {
                edges.push(((x, y), (x + 1, y)));
            }
            if !inside(x + 1, y) {
                edges.push(((x + 1, y), (x + 1, y + 1)));
            }
            if !inside(x, y + 1) {
                edges.push(((x + 1, y + 1), (x, y + 1)));
            }
            if !inside(x - 1, y) {
                edges.push(((x, y + 1), (x, y)));
            }
        }
    }
    let mut out_of: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, e) in edges.iter().enumerate() {
        out_of.entry(e.0).or_default().push(i);
    }
    let mut used = vec![false; edges.len()];
    let mut loops = Vec::new();
    for start in 0..edges.len() {
        if used[start] {
            continue;
        }
        let mut lp = Vec::new();
        let mut e = start;
        loop {
            used[e] = true;
            let (a, b) = edges[e];
            lp.push(a);
            let dir = (b.0 - a.0, b.1 - a.1);
            // at pinch points prefer the right turn so diagonal neighbors stay apart
            let candidates = out_of.get(&b).map(Vec::as_slice).unwrap_or(&[]);
            let pick = candidates
                .iter()
                .copied()
                .filter(|&c| !used[c])
                .min_by_key(|&c| {
                    let (p, q) = edges[c];
                    let d = (q.0 - p.0, q.1 - p.1);
                    let cross = dir.0 * d.1 - dir.1 * d.0;
                    match cross {
                        c if c < 0 => 0,
                        0 => 1,
                        _ => 2,
                    }
                });
            match pick {
                Some(c) => e = c,
                None => break,
            }
        }
        loops.push(lp);
    }
    loops
}

fn ring_area(pts: &[[f64; 2]]) -> f64 {
    let n = pts.len();
    (0..n)
        .map(|i| {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            a[0] * b[1] - b[0] * a[1]
        })
        .sum::<f64>()
        * 0.5
}

/// Drops repeated and collinear vertices of a closed ring.
fn clean_ring(mut pts: Vec<[f64; 2]>, tol: f64) -> Vec<[f64; 2]> {
    let mut changed = true;
    while changed && pts.len() >= 3 {
        changed = false;
        let n = pts.len();
        for i in 0..n {
            let (a, b, c) = (pts[(i + n - 1) % n], pts[i], pts[(i + 1) % n]);
            let ab = [b[0] - a[0], b[1] - a[1]];
            let bc = [c[0] - b[0], c[1] - b[1]];
            let cross = ab[0] * bc[1] - ab[1] * bc[0];
            let len = ab[0].hypot(ab[1]) * bc[0].hypot(bc[1]);
            if ab[0].hypot(ab[1]) <= tol || cross.abs() <= 1e-9 * len.max(1e-300) {
                pts.remove(i);
                changed = true;
                break;
            }
        }
    }
    pts
}

/// Outer contour of the largest component, simplified by Douglas-Peucker
/// at `2 * cell`, with edges within 5 degrees of an axis snapped to it.
/// Returns counter-clockwise vertices in world `(x, y)`.
pub fn polygonize(grid: &OccupancyGrid) -> Result<Vec<[f64; 2]>> {
    if grid.count() == 0 {
        return Err(Error::Fit("occupancy grid is empty".into()));
    }
    let mask = largest_component(grid);
    let loops = boundary_loops(&mask, grid.width, grid.height);
    let to_world = |p: &(i64, i64)| {
        [
            grid.origin[0] + p.0 as f64 * grid.cell,
            grid.origin[1] + p.1 as f64 * grid.cell,
        ]
    };
    let outer = loops
        .iter()
        .map(|l| l.iter().map(to_world).collect::<Vec<_>>())
        .max_by(|a, b| ring_area(a).total_cmp(&ring_area(b)))
        .ok_or_else(|| Error::Fit("no contour".into()))?;
    let outer = clean_ring(outer, 1e-12);

    let ring: Vec<Coord> = outer.iter().map(|p| Coord { x: p[0], y: p[1] }).collect();
    let simplified = Polygon::new(LineString::new(ring), vec![]).simplify(2.0 * grid.cell);
    let mut pts: Vec<[f64; 2]> = simplified.exterior().points().map(|p| [p.x(), p.y()]).collect();
    pts.pop(); // closing duplicate
    let mut pts = clean_ring(pts, 1e-12);

    let snap = 5f64.to_radians().tan();
    let n = pts.len();
    for i in 0..n {
        let j = (i + 1) % n;
        let (dx, dy) = (pts[j][0] - pts[i][0], pts[j][1] - pts[i][1]);
        if dx.abs() > 0.0 && (dy / dx).abs() < snap {
            let y = 0.5 * (pts[i][1] + pts[j][1]);
            pts[i][1] = y;
            pts[j][1] = y;
        } else if dy.abs() > 0.0 && (dx / dy).abs() < snap {
            let x = 0.5 * (pts[i][0] + pts[j][0]);
            pts[i][0] = x;
            pts[j][0] = x;
        }
    }
    let mut pts = clean_ring(pts, 1e-9);
    if pts.len() < 3 {
        return Err(Error::Fit("contour collapsed during simplification".into()));
    }
    if ring_area(&pts) < 0.0 {
        pts.reverse();
    }
    Ok(pts)
}
