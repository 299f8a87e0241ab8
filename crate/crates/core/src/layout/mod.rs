//! Room layout from point clouds, openings, furniture placement and
//! layout metrics.

mod grid;
mod metrics;
mod openings;
mod placement;
mod ransac;

use std::fs;
use std::path::Path;

use geo::{Coord, LineString, Polygon, Validation};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::Vec3;

pub use grid::{polygonize, project_topdown, OccupancyGrid};
pub use metrics::{eval_layout, LayoutMetrics, CORNER_THRESHOLD_PX};
pub use openings::{assign_openings, OpeningKind, WallSegment, LABEL_DOOR, LABEL_WINDOW};
pub use placement::{resolve_placement, PlacedObject, PlacementReport};
pub use ransac::{fit_floor_plane, plane_inliers, Plane};

pub const DEFAULT_ROOM_HEIGHT: f64 = 3.0;
pub const DEFAULT_RANSAC_THRESHOLD: f64 = 0.02;
pub const DEFAULT_RANSAC_ITERATIONS: usize = 1000;
pub const DEFAULT_SEGMENT_WIDTH: f64 = 0.5;
pub const DEFAULT_MIN_POINTS: usize = 20;

/// Points in meters with optional integer semantic labels.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointCloud {
    pub points: Vec<Vec3>,
    /// One label per point when present; unlabeled lines read as -1.
    pub labels: Option<Vec<i32>>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec3>) -> Self {
        PointCloud { points, labels: None }
    }

    pub fn label(&self, i: usize) -> Option<i32> {
        self.labels.as_ref().map(|l| l[i])
    }
}

/// Parses `x y z [label]` lines; `#` starts a comment.
pub fn parse_point_cloud(text: &str, file: &str) -> Result<PointCloud> {
    let mut points = Vec::new();
    let mut labels = Vec::new();
    let mut any_label = false;
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |m: String| Error::Parse {
            file: file.to_string(),
            line: ln + 1,
            message: m,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 && fields.len() != 4 {
            return Err(err(format!("expected 3 or 4 fields, found {}", fields.len())));
        }
        let mut xyz = [0.0f64; 3];
        for (k, f) in fields[..3].iter().enumerate() {
            xyz[k] = f.parse().map_err(|_| err(format!("bad coordinate `{f}`")))?;
            if !xyz[k].is_finite() {
                return Err(err("non-finite coordinate".into()));
            }
        }
        points.push(Vec3::new(xyz[0], xyz[1], xyz[2]));
        if let Some(l) = fields.get(3) {
            labels.push(l.parse().map_err(|_| err(format!("bad label `{l}`")))?);
            any_label = true;
        } else {
            labels.push(-1);
        }
    }
    Ok(PointCloud {
        points,
        labels: any_label.then_some(labels),
    })
}

pub fn read_point_cloud(path: impl AsRef<Path>) -> Result<PointCloud> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_point_cloud(&text, &path.display().to_string())
}

/// Floor polygon (counter-clockwise, meters) extruded to `height`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutPolygon {
    pub vertices: Vec<[f64; 2]>,
    pub floor_z: f64,
    #[serde(default = "default_height")]
    pub height: f64,
}

fn default_height() -> f64 {
    DEFAULT_ROOM_HEIGHT
}

impl LayoutPolygon {
    /// Validates and reorients to counter-clockwise.
    pub fn new(vertices: Vec<[f64; 2]>, floor_z: f64, height: f64) -> Result<Self> {
        let mut l = LayoutPolygon {
            vertices,
            floor_z,
            height,
        };
        l.normalize()?;
        Ok(l)
    }

    fn normalize(&mut self) -> Result<()> {
        if self.vertices.len() < 3 {
            return Err(Error::Geometry("layout needs at least 3 vertices".into()));
        }
        if self.vertices.iter().flatten().any(|c| !c.is_finite()) || !self.floor_z.is_finite() {
            return Err(Error::Geometry("non-finite layout coordinate".into()));
        }
        if !(self.height > 0.0) {
            return Err(Error::field("height", "must be positive"));
        }
        let area = self.signed_area();
        if !(area.abs() > 1e-12) {
            return Err(Error::Geometry("layout polygon has zero area".into()));
        }
        if !self.to_geo().is_valid() {
            return Err(Error::Geometry("layout polygon self-intersects".into()));
        }
        if area < 0.0 {
            self.vertices.reverse();
        }
        Ok(())
    }

    pub fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
                a[0] * b[1] - b[0] * a[1]
            })
            .sum::<f64>()
            * 0.5
    }

    pub fn to_geo(&self) -> Polygon<f64> {
        let ring: Vec<Coord> = self.vertices.iter().map(|p| Coord { x: p[0], y: p[1] }).collect();
        Polygon::new(LineString::new(ring), vec![])
    }

    pub fn wall_count(&self) -> usize {
        self.vertices.len()
    }

    /// Wall `i` runs from vertex `i` to vertex `i + 1`.
    pub fn wall(&self, i: usize) -> ([f64; 2], [f64; 2]) {
        (self.vertices[i], self.vertices[(i + 1) % self.vertices.len()])
    }

    /// Unit normal of wall `i` pointing into the room.
    pub fn wall_inward_normal(&self, i: usize) -> [f64; 2] {
        let (a, b) = self.wall(i);
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let len = dx.hypot(dy);
        [-dy / len, dx / len]
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut l: LayoutPolygon = serde_json::from_str(&text).map_err(|e| Error::Parse {
            file: path.display().to_string(),
            line: e.line(),
            message: e.to_string(),
        })?;
        l.normalize()?;
        Ok(l)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
