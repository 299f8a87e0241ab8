use crate::error::{Error, Result};
use crate::math::{Aabb, Vec3};

#[derive(Debug, Clone)]
pub struct TriangleMesh {
    pub name: String,
    pub positions: Vec<Vec3>,
    /// Per-vertex unit normals; empty for flat shading.
    pub normals: Vec<Vec3>,
    /// Per-vertex texture coordinates; empty when absent.
    pub uvs: Vec<[f64; 2]>,
    pub indices: Vec<[u32; 3]>,
    pub instance_id: u32,
    /// Light this mesh belongs to (lamp housings, window frames).
    pub light: Option<usize>,
    pub material: usize,
}

impl TriangleMesh {
    pub fn new(name: impl Into<String>, positions: Vec<Vec3>, indices: Vec<[u32; 3]>, material: usize) -> Self {
        TriangleMesh {
            name: name.into(),
            positions,
            normals: Vec::new(),
            uvs: Vec::new(),
            indices,
            instance_id: 0,
            light: None,
            material,
        }
    }

    /// Axis-aligned quad `a b c d` (counter-clockwise seen from the front) with
    /// unit uv coordinates.
    pub fn quad(name: impl Into<String>, a: Vec3, b: Vec3, c: Vec3, d: Vec3, material: usize) -> Self {
        let mut m = Self::new(name, vec![a, b, c, d], vec![[0, 1, 2], [0, 2, 3]], material);
        m.uvs = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        m
    }

    /// Closed axis-aligned box with outward-facing triangles.
    pub fn cuboid(name: impl Into<String>, min: Vec3, max: Vec3, material: usize) -> Self {
        let p = |x: bool, y: bool, z: bool| {
            Vec3::new(
                if x { max.x } else { min.x },
                if y { max.y } else { min.y },
                if z { max.z } else { min.z },
            )
        };
        let positions = vec![
            p(false, false, false),
            p(true, false, false),
            p(true, true, false),
            p(false, true, false),
            p(false, false, true),
            p(true, false, true),
            p(true, true, true),
            p(false, true, true),
        ];
        let indices = vec![
            [0, 2, 1],
            [0, 3, 2],
            [4, 5, 6],
            [4, 6, 7],
            [0, 1, 5],
            [0, 5, 4],
            [1, 2, 6],
            [1, 6, 5],
            [2, 3, 7],
            [2, 7, 6],
            [3, 0, 4],
            [3, 4, 7],
        ];
        Self::new(name, positions, indices, material)
    }

    pub fn validate(&self) -> Result<()> {
        let name = &self.name;
        if self.indices.is_empty() {
            return Err(Error::field(format!("meshes[{name}].indices"), "mesh has no triangles"));
        }
        if let Some(i) = self.positions.iter().position(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(Error::field(format!("meshes[{name}].vertices[{i}]"), "non-finite vertex"));
        }
        let n = self.positions.len() as u32;
        for (t, tri) in self.indices.iter().enumerate() {
            if tri.iter().any(|&i| i >= n) {
                return Err(Error::field(
                    format!("meshes[{name}].indices[{t}]"),
                    format!("index out of range for {n} vertices"),
                ));
            }
        }
        if !self.normals.is_empty() {
            if self.normals.len() != self.positions.len() {
                return Err(Error::field(format!("meshes[{name}].normals"), "count differs from vertex count"));
            }
            if let Some(i) = self.normals.iter().position(|v| !((v.norm() - 1.0).abs() <= 1e-4)) {
                return Err(Error::field(format!("meshes[{name}].normals[{i}]"), "normal is not unit length"));
            }
        }
        if !self.uvs.is_empty() && self.uvs.len() != self.positions.len() {
            return Err(Error::field(format!("meshes[{name}].uvs"), "count differs from vertex count"));
        }
        Ok(())
    }

    pub fn bounds(&self) -> Aabb {
        let mut b = Aabb::empty();
        for p in &self.positions {
            b.grow(*p);
        }
        b
    }

    pub fn triangle(&self, t: usize) -> [Vec3; 3] {
        let [a, b, c] = self.indices[t];
        [self.positions[a as usize], self.positions[b as usize], self.positions[c as usize]]
    }
}
