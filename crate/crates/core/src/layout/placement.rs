use geo::{Contains, Coord, Point};
use serde::{Deserialize, Serialize};

use super::LayoutPolygon;
use crate::error::{Error, Result};
use crate::math::Vec3;

const EPS: f64 = 1e-9;
const MAX_PASSES: usize = 10;

/// Oriented box: yaw rotates about +z.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacedObject {
    pub id: String,
    pub center: [f64; 3],
    pub half_extents: [f64; 3],
    #[serde(default)]
    pub yaw: f64,
}

impl PlacedObject {
    pub fn new(id: impl Into<String>, center: Vec3, half_extents: Vec3, yaw: f64) -> Self {
        PlacedObject {
            id: id.into(),
            center: center.into(),
            half_extents: half_extents.into(),
            yaw,
        }
    }

    /// Footprint corners, counter-clockwise.
    pub fn footprint(&self) -> [[f64; 2]; 4] {
        let (s, c) = self.yaw.sin_cos();
        let [hx, hy, _] = self.half_extents;
        let [cx, cy, _] = self.center;
        [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)].map(|(a, b)| {
            let (x, y) = (a * hx, b * hy);
            [cx + c * x - s * y, cy + s * x + c * y]
        })
    }

    pub fn z_range(&self) -> (f64, f64) {
        (self.center[2] - self.half_extents[2], self.center[2] + self.half_extents[2])
    }

    fn validate(&self) -> Result<()> {
        if self.half_extents.iter().any(|h| !(*h > 0.0) || !h.is_finite())
            || self.center.iter().any(|c| !c.is_finite())
            || !self.yaw.is_finite()
        {
            return Err(Error::Placement {
                id: self.id.clone(),
                reason: "half extents must be positive and all values finite".into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlacementReport {
    pub objects: Vec<PlacedObject>,
    /// Pairs of ids whose boxes intersect after placement; left unresolved.
    pub overlaps: Vec<(String, String)>,
}

/// Depth a box footprint reaches past wall `i`, counting only corners that
/// project onto the wall span and lie within the footprint radius.
pub(crate) fn wall_penetration(obj: &PlacedObject, layout: &LayoutPolygon, i: usize) -> f64 {
    let (a, b) = layout.wall(i);
    let n = layout.wall_inward_normal(i);
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len = dx.hypot(dy);
    let u = [dx / len, dy / len];
    let [cx, cy, _] = obj.center;
    let center_d = (cx - a[0]) * n[0] + (cy - a[1]) * n[1];
    let radius = obj.half_extents[0].hypot(obj.half_extents[1]);
    if center_d < -radius {
        return 0.0;
    }
    let mut pen: f64 = 0.0;
    for p in obj.footprint() {
        let (rx, ry) = (p[0] - a[0], p[1] - a[1]);
        let t = rx * u[0] + ry * u[1];
        if !(-EPS..=len + EPS).contains(&t) {
            continue;
        }
        let d = rx * n[0] + ry * n[1];
        if d < 0.0 && -d <= 2.0 * radius {
            pen = pen.max(-d);
        }
    }
    pen
}

fn floor_fix(obj: &mut PlacedObject, floor: f64) {
    let diff = floor - obj.z_range().0;
    if diff.abs() > EPS {
        obj.center[2] += diff;
    }
}

fn overlaps(a: &PlacedObject, b: &PlacedObject) -> bool {
    let (a0, a1) = a.z_range();
    let (b0, b1) = b.z_range();
    if a1 <= b0 + EPS || b1 <= a0 + EPS {
        return false;
    }
    let (pa, pb) = (a.footprint(), b.footprint());
    // separating axis test on the four edge normals
    for poly in [&pa, &pb] {
        for k in 0..2 {
            let e = [poly[k + 1][0] - poly[k][0], poly[k + 1][1] - poly[k][1]];
            let axis = [-e[1], e[0]];
            let proj = |q: &[[f64; 2]; 4]| {
                q.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                    let v = p[0] * axis[0] + p[1] * axis[1];
                    (lo.min(v), hi.max(v))
                })
            };
            let ((alo, ahi), (blo, bhi)) = (proj(&pa), proj(&pb));
            let scale = axis[0].hypot(axis[1]);
            if ahi <= blo + EPS * scale || bhi <= alo + EPS * scale {
                return false;
            }
        }
    }
    true
}

/// Drops floating boxes onto the floor, lifts sunken ones, and pushes boxes
/// out of walls along the inward wall normal. Object pairs that still
/// intersect are reported.
pub fn resolve_placement(objects: &[PlacedObject], layout: &LayoutPolygon) -> Result<PlacementReport> {
    let poly = layout.to_geo();
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for v in &layout.vertices {
        xmin = xmin.min(v[0]);
        xmax = xmax.max(v[0]);
        ymin = ymin.min(v[1]);
        ymax = ymax.max(v[1]);
    }

    let mut out = Vec::with_capacity(objects.len());
    for obj in objects {
        obj.validate()?;
        let too_big = |reason: &str| Error::Placement {
            id: obj.id.clone(),
            reason: reason.into(),
        };
        if 2.0 * obj.half_extents[2] > layout.height + EPS {
            return Err(too_big("taller than the room"));
        }
        let mut o = obj.clone();
        let fp = o.footprint();
        let span = |k: usize| {
            let (lo, hi) = fp.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[k]), hi.max(p[k])));
            hi - lo
        };
        if span(0) > xmax - xmin + EPS || span(1) > ymax - ymin + EPS {
            return Err(too_big("footprint larger than the room"));
        }

        floor_fix(&mut o, layout.floor_z);
        for _ in 0..MAX_PASSES {
            let mut moved = false;
            for i in 0..layout.wall_count() {
                let pen = wall_penetration(&o, layout, i);
                if pen > EPS {
                    let n = layout.wall_inward_normal(i);
                    o.center[0] += n[0] * pen;
                    o.center[1] += n[1] * pen;
                    moved = true;
                }
            }
            if !moved {
                break;
            }
        }
        let center = Point::from(Coord { x: o.center[0], y: o.center[1] });
        if !poly.contains(&center) || (0..layout.wall_count()).any(|i| wall_penetration(&o, layout, i) > EPS) {
            return Err(too_big("cannot be pushed clear of the walls"));
        }
        out.push(o);
    }

    let mut pairs = Vec::new();
    for i in 0..out.len() {
        for j in i + 1..out.len() {
            if overlaps(&out[i], &out[j]) {
                pairs.push((out[i].id.clone(), out[j].id.clone()));
            }
        }
    }
    Ok(PlacementReport {
        objects: out,
        overlaps: pairs,
    })
}
