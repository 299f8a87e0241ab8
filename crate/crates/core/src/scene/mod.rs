//! Scene representation, ray queries and material lookup.

pub mod bvh;
pub mod camera;
pub mod loader;
pub mod material;
pub mod mesh;

use crate::brdf::MicrofacetParams;
use crate::error::{Error, Result};
use crate::lights::Light;
use crate::math::{Aabb, Frame, Ray, Vec3};

pub use bvh::{Bvh, Triangle};
pub use camera::Camera;
pub use loader::{load_scene, parse_scene};
pub use material::{sample_material, ColorSource, ScalarSource, SvBrdfMaterial};
pub use mesh::TriangleMesh;

/// Relative offset applied at both ends of shadow rays.
pub const SHADOW_EPSILON_SCALE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceHit {
    pub t: f64,
    pub position: Vec3,
    /// Unit geometric normal, facing the incoming ray.
    pub geometric_normal: Vec3,
    /// Unit shading normal on the same side as `geometric_normal`.
    pub shading_normal: Vec3,
    pub uv: [f64; 2],
    pub instance_id: u32,
    pub mesh: usize,
    pub material: usize,
    pub light: Option<usize>,
}

/// Immutable scene with a prebuilt BVH.
#[derive(Debug, Clone)]
pub struct Scene {
    pub meshes: Vec<TriangleMesh>,
    pub materials: Vec<SvBrdfMaterial>,
    pub lights: Vec<Light>,
    pub cameras: Vec<Camera>,
    bvh: Bvh,
    bounds: Aabb,
    shadow_epsilon: f64,
}

impl Scene {
    pub fn new(
        meshes: Vec<TriangleMesh>,
        materials: Vec<SvBrdfMaterial>,
        lights: Vec<Light>,
        cameras: Vec<Camera>,
    ) -> Result<Self> {
        for mesh in &meshes {
            mesh.validate()?;
            if mesh.material >= materials.len() {
                return Err(Error::Reference {
                    kind: "material",
                    id: format!("#{}", mesh.material),
                });
            }
            if let Some(l) = mesh.light {
                if l >= lights.len() {
                    return Err(Error::Reference {
                        kind: "light",
                        id: format!("#{l}"),
                    });
                }
            }
        }
        let mut triangles = Vec::new();
        let mut bounds = Aabb::empty();
        for (mi, mesh) in meshes.iter().enumerate() {
            bounds = bounds.union(&mesh.bounds());
            for t in 0..mesh.indices.len() {
                let [a, b, c] = mesh.triangle(t);
                triangles.push(Triangle::new(a, b, c, mi as u32, t as u32));
            }
        }
        for light in &lights {
            bounds = bounds.union(&light.bounds());
        }
        let diag = bounds.diagonal();
        let shadow_epsilon = SHADOW_EPSILON_SCALE * if diag > 0.0 { diag } else { 1.0 };
        Ok(Scene {
            meshes,
            materials,
            lights,
            cameras,
            bvh: Bvh::build(triangles),
            bounds,
            shadow_epsilon,
        })
    }

    pub fn bounds(&self) -> Aabb {
        self.bounds
    }

    pub fn shadow_epsilon(&self) -> f64 {
        self.shadow_epsilon
    }

    pub fn bvh(&self) -> &Bvh {
        &self.bvh
    }

    pub fn light_index(&self, id: &str) -> Option<usize> {
        self.lights.iter().position(|l| l.id() == id)
    }

    /// Nearest surface hit with `t_min < t < t_max`.
    pub fn intersect(&self, ray: &Ray, t_min: f64, t_max: f64) -> Option<SurfaceHit> {
        let hit = self.bvh.intersect(ray, t_min, t_max)?;
        let tri = &self.bvh.triangles()[hit.prim];
        Some(self.surface_hit(ray, tri, hit.t, hit.b1, hit.b2))
    }

    /// True when geometry lies strictly between `a` and `b`; both endpoints
    /// are excluded by the shadow epsilon.
    pub fn occluded(&self, a: &Vec3, b: &Vec3) -> bool {
        let d = b - a;
        let dist = d.norm();
        let eps = self.shadow_epsilon;
        if dist <= 2.0 * eps {
            return false;
        }
        self.bvh.any_hit(&Ray::new(*a, d / dist), eps, dist - eps)
    }

    pub fn material_params(&self, hit: &SurfaceHit) -> MicrofacetParams {
        sample_material(&self.materials[hit.material], hit.uv)
    }

    /// Builds full hit information from barycentrics. Exposed so brute-force
    /// intersectors produce identical records.
    pub fn surface_hit(&self, ray: &Ray, tri: &Triangle, t: f64, b1: f64, b2: f64) -> SurfaceHit {
        let mesh = &self.meshes[tri.mesh as usize];
        let ti = tri.index as usize;
        let [i0, i1, i2] = mesh.indices[ti].map(|i| i as usize);
        let b0 = 1.0 - b1 - b2;

        let mut ng = tri.normal();
        let flipped = ng.dot(&ray.dir) > 0.0;
        if flipped {
            ng = -ng;
        }

        let mut ns = if mesh.normals.is_empty() {
            ng
        } else {
            let n = mesh.normals[i0] * b0 + mesh.normals[i1] * b1 + mesh.normals[i2] * b2;
            let n = n.normalize();
            if flipped {
                -n
            } else {
                n
            }
        };

        let uv = if mesh.uvs.is_empty() {
            [b1, b2]
        } else {
            let (a, b, c) = (mesh.uvs[i0], mesh.uvs[i1], mesh.uvs[i2]);
            [
                a[0] * b0 + b[0] * b1 + c[0] * b2,
                a[1] * b0 + b[1] * b1 + c[1] * b2,
            ]
        };

        let material = &self.materials[mesh.material];
        if let Some(tn) = material.tangent_normal(uv) {
            let tangent = triangle_tangent(mesh, ti, &ns);
            let bitangent = ns.cross(&tangent);
            ns = (tangent * tn.x + bitangent * tn.y + ns * tn.z).normalize();
        }
        ns = clamp_to_geometric(ns, &ng);

        SurfaceHit {
            t,
            position: ray.at(t),
            geometric_normal: ng,
            shading_normal: ns,
            uv,
            instance_id: mesh.instance_id,
            mesh: tri.mesh as usize,
            material: mesh.material,
            light: mesh.light,
        }
    }
}

/// Unit tangent along increasing u, orthogonal to `n`.
fn triangle_tangent(mesh: &TriangleMesh, t: usize, n: &Vec3) -> Vec3 {
    let fallback = || Frame::from_normal(*n).s;
    if mesh.uvs.is_empty() {
        return fallback();
    }
    let [i0, i1, i2] = mesh.indices[t].map(|i| i as usize);
    let (p0, p1, p2) = (mesh.positions[i0], mesh.positions[i1], mesh.positions[i2]);
    let (w0, w1, w2) = (mesh.uvs[i0], mesh.uvs[i1], mesh.uvs[i2]);
    let (e1, e2) = (p1 - p0, p2 - p0);
    let (du1, dv1) = (w1[0] - w0[0], w1[1] - w0[1]);
    let (du2, dv2) = (w2[0] - w0[0], w2[1] - w0[1]);
    let det = du1 * dv2 - du2 * dv1;
    if det.abs() < 1e-14 {
        return fallback();
    }
    let dpdu = (e1 * dv2 - e2 * dv1) / det;
    let t = dpdu - n * n.dot(&dpdu);
    let len = t.norm();
    if len < 1e-12 {
        fallback()
    } else {
        t / len
    }
}

/// Keeps the shading normal in the geometric hemisphere by pulling flipped
/// normals back to grazing.
fn clamp_to_geometric(ns: Vec3, ng: &Vec3) -> Vec3 {
    const MIN_COS: f64 = 1e-3;
    let c = ns.dot(ng);
    if c >= MIN_COS {
        return ns;
    }
    let tangential = ns - ng * c;
    let len = tangential.norm();
    if len < 1e-12 {
        return *ng;
    }
    (tangential / len * (1.0 - MIN_COS * MIN_COS).sqrt() + ng * MIN_COS).normalize()
}
