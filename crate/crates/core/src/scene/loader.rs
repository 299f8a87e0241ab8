//! JSON scene files and the OBJ subset they can reference.
//!
//! ```json
//! {
//!   "meshes": [{"name": "floor", "vertices": [[0,0,0], ...], "indices": [[0,1,2], ...],
//!               "material": "white"},
//!              {"obj": "chair.obj", "material": "wood", "instance_id": 4}],
//!   "materials": [{"id": "white", "albedo": [0.8,0.8,0.8], "roughness": 0.6},
//!                 {"id": "wood", "albedo_texture": "wood.pfm", "roughness_texture": "r.pfm"}],
//!   "lights": [{"type": "lamp", "id": "lamp", "center": [...], "half_extents": [...],
//!               "temperature": 5500, "intensity": 10},
//!              {"type": "window", "id": "win", "corner": [...], "edge_u": [...], "edge_v": [...],
//!               "envmap": "sky.pfm", "intensity": 1}],
//!   "cameras": [{"position": [...], "target": [...], "fov_deg": 60, "width": 320, "height": 240}]
//! }
//! ```
//!
//! Relative paths resolve against the scene file's directory.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use nalgebra::Matrix3;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::io::pfm::{read_pfm, PfmImage};
use crate::io::ppm::read_ppm;
use crate::lights::{EnvMap, LampLight, Light, WindowLight};
use crate::math::{Rgb, Vec3};
use crate::scene::camera::Camera;
use crate::scene::material::{ColorSource, ScalarSource, SvBrdfMaterial};
use crate::scene::mesh::TriangleMesh;
use crate::scene::Scene;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneFile {
    meshes: Vec<MeshDesc>,
    materials: Vec<MaterialDesc>,
    #[serde(default)]
    lights: Vec<LightDesc>,
    #[serde(default)]
    cameras: Vec<CameraDesc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeshDesc {
    name: Option<String>,
    vertices: Option<Vec<[f64; 3]>>,
    normals: Option<Vec<[f64; 3]>>,
    uvs: Option<Vec<[f64; 2]>>,
    indices: Option<Vec<[u32; 3]>>,
    obj: Option<String>,
    material: String,
    instance_id: Option<u32>,
    light: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaterialDesc {
    id: String,
    albedo: Option<[f64; 3]>,
    albedo_texture: Option<String>,
    roughness: Option<f64>,
    roughness_texture: Option<String>,
    normal_texture: Option<String>,
    uv_scale: Option<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum LightDesc {
    Window {
        id: String,
        corner: [f64; 3],
        edge_u: [f64; 3],
        edge_v: [f64; 3],
        envmap: Option<String>,
        radiance: Option<[f64; 3]>,
        #[serde(default = "one")]
        intensity: f64,
    },
    Lamp {
        id: String,
        center: [f64; 3],
        half_extents: [f64; 3],
        /// Box axes as rows; identity when absent.
        axes: Option<[[f64; 3]; 3]>,
        temperature: f64,
        intensity: f64,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CameraDesc {
    position: [f64; 3],
    direction: Option<[f64; 3]>,
    target: Option<[f64; 3]>,
    #[serde(default = "default_up")]
    up: [f64; 3],
    fov_deg: f64,
    width: usize,
    height: usize,
}

fn default_up() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

fn v3(a: [f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

/// Loads a scene file and builds its BVH.
pub fn load_scene(path: impl AsRef<Path>) -> Result<Scene> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_scene_with_name(&text, &base, &path.display().to_string())
}

/// Parses scene JSON; relative paths resolve against `base_dir`.
pub fn parse_scene(text: &str, base_dir: impl AsRef<Path>) -> Result<Scene> {
    parse_scene_with_name(text, base_dir.as_ref(), "<scene>")
}

fn parse_scene_with_name(text: &str, base: &Path, file: &str) -> Result<Scene> {
    let desc: SceneFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        file: file.to_string(),
        line: e.line(),
        message: e.to_string(),
    })?;
    let resolve = |p: &str| -> PathBuf {
        let p = Path::new(p);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            base.join(p)
        }
    };

    let mut materials = Vec::with_capacity(desc.materials.len());
    let mut material_index = HashMap::new();
    for m in &desc.materials {
        if material_index.insert(m.id.clone(), materials.len()).is_some() {
            return Err(Error::field(format!("materials[{}].id", m.id), "duplicate material id"));
        }
        materials.push(build_material(m, &resolve)?);
    }

    let mut lights = Vec::with_capacity(desc.lights.len());
    for l in &desc.lights {
        let light = build_light(l, &resolve)?;
        if lights.iter().any(|o: &Light| o.id() == light.id()) {
            return Err(Error::field(format!("lights[{}].id", light.id()), "duplicate light id"));
        }
        lights.push(light);
    }

    let mut meshes = Vec::with_capacity(desc.meshes.len());
    for (i, m) in desc.meshes.iter().enumerate() {
        let name = m.name.clone().unwrap_or_else(|| format!("mesh{i}"));
        let material = *material_index.get(&m.material).ok_or_else(|| Error::Reference {
            kind: "material",
            id: m.material.clone(),
        })?;
        let mut mesh = match (&m.obj, &m.vertices) {
            (Some(obj), None) => {
                let path = resolve(obj);
                let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
                parse_obj(&text, &path.display().to_string())?
            }
            (None, Some(verts)) => {
                let indices = m
                    .indices
                    .clone()
                    .ok_or_else(|| Error::field(format!("meshes[{name}].indices"), "missing"))?;
                let mut mesh = TriangleMesh::new("", verts.iter().copied().map(v3).collect(), indices, 0);
                if let Some(n) = &m.normals {
                    mesh.normals = n.iter().copied().map(v3).collect();
                }
                if let Some(uv) = &m.uvs {
                    mesh.uvs = uv.clone();
                }
                mesh
            }
            _ => {
                return Err(Error::field(
                    format!("meshes[{name}]"),
                    "exactly one of `obj` or `vertices` is required",
                ))
            }
        };
        mesh.name = name;
        mesh.material = material;
        mesh.instance_id = m.instance_id.unwrap_or(i as u32 + 1);
        mesh.light = match &m.light {
            Some(id) => Some(lights.iter().position(|l| l.id() == id).ok_or_else(|| Error::Reference {
                kind: "light",
                id: id.clone(),
            })?),
            None => None,
        };
        meshes.push(mesh);
    }

    let mut cameras = Vec::with_capacity(desc.cameras.len());
    for c in &desc.cameras {
        let dir = match (c.direction, c.target) {
            (Some(d), None) => v3(d),
            (None, Some(t)) => v3(t) - v3(c.position),
            _ => return Err(Error::field("cameras[].direction", "exactly one of `direction` or `target`")),
        };
        cameras.push(Camera::new(v3(c.position), dir, v3(c.up), c.fov_deg, c.width, c.height)?);
    }

    Scene::new(meshes, materials, lights, cameras)
}

fn read_texture(path: &Path) -> Result<Arc<PfmImage>> {
    let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
    let img = match ext.as_deref() {
        Some("pfm") => read_pfm(path)?,
        Some("ppm") => read_ppm(path)?,
        _ => return Err(Error::Image(format!("unsupported texture format: {}", path.display()))),
    };
    Ok(Arc::new(img))
}

fn build_material(m: &MaterialDesc, resolve: &dyn Fn(&str) -> PathBuf) -> Result<SvBrdfMaterial> {
    let albedo = match (&m.albedo, &m.albedo_texture) {
        (Some(c), None) => {
            if c.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::field(format!("materials[{}].albedo", m.id), "channels must be in [0, 1]"));
            }
            ColorSource::Constant(Rgb::from_array(*c))
        }
        (None, Some(p)) => ColorSource::Texture(read_texture(&resolve(p))?),
        (None, None) => ColorSource::Constant(Rgb::gray(0.8)),
        (Some(_), Some(_)) => {
            return Err(Error::field(format!("materials[{}]", m.id), "both albedo and albedo_texture given"))
        }
    };
    let roughness = match (m.roughness, &m.roughness_texture) {
        (Some(r), None) => {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::field(format!("materials[{}].roughness", m.id), "must be in [0, 1]"));
            }
            ScalarSource::Constant(r)
        }
        (None, Some(p)) => ScalarSource::Texture(read_texture(&resolve(p))?),
        (None, None) => ScalarSource::Constant(1.0),
        (Some(_), Some(_)) => {
            return Err(Error::field(
                format!("materials[{}]", m.id),
                "both roughness and roughness_texture given",
            ))
        }
    };
    let normal_map = m.normal_texture.as_deref().map(|p| read_texture(&resolve(p))).transpose()?;
    Ok(SvBrdfMaterial {
        id: m.id.clone(),
        albedo,
        roughness,
        normal_map,
        uv_scale: m.uv_scale.unwrap_or([1.0, 1.0]),
    })
}

fn build_light(l: &LightDesc, resolve: &dyn Fn(&str) -> PathBuf) -> Result<Light> {
    match l {
        LightDesc::Window {
            id,
            corner,
            edge_u,
            edge_v,
            envmap,
            radiance,
            intensity,
        } => {
            let env = match (envmap, radiance) {
                (Some(p), None) => {
                    let img = read_pfm(resolve(p))?;
                    if img.data.iter().any(|v| *v < 0.0) {
                        return Err(Error::field(format!("lights[{id}].envmap"), "negative radiance"));
                    }
                    EnvMap::Image(Arc::new(img))
                }
                (None, Some(c)) => {
                    if c.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
                        return Err(Error::field(format!("lights[{id}].radiance"), "must be finite and >= 0"));
                    }
                    EnvMap::Constant(Rgb::from_array(*c))
                }
                _ => {
                    return Err(Error::field(
                        format!("lights[{id}]"),
                        "window needs exactly one of `envmap` or `radiance`",
                    ))
                }
            };
            Ok(Light::Window(WindowLight::new(
                id.clone(),
                v3(*corner),
                v3(*edge_u),
                v3(*edge_v),
                env,
                *intensity,
            )?))
        }
        LightDesc::Lamp {
            id,
            center,
            half_extents,
            axes,
            temperature,
            intensity,
        } => {
            let axes = match axes {
                Some(rows) => Matrix3::from_columns(&[v3(rows[0]), v3(rows[1]), v3(rows[2])]),
                None => Matrix3::identity(),
            };
            Ok(Light::Lamp(LampLight::new(
                id.clone(),
                v3(*center),
                v3(*half_extents),
                axes,
                *temperature,
                *intensity,
            )?))
        }
    }
}

/// Parses the `v`/`vn`/`vt`/`f` subset of Wavefront OBJ. Faces with more than
/// three vertices are fan-triangulated. Vertices are de-duplicated per
/// `(v, vt, vn)` triple.
pub fn parse_obj(text: &str, file: &str) -> Result<TriangleMesh> {
    let err = |line: usize, message: String| Error::Parse {
        file: file.to_string(),
        line,
        message,
    };
    let mut pos = Vec::new();
    let mut tex = Vec::new();
    let mut nrm = Vec::new();
    let mut corners: HashMap<(usize, Option<usize>, Option<usize>), u32> = HashMap::new();
    let mut out_pos = Vec::new();
    let mut out_uv = Vec::new();
    let mut out_n = Vec::new();
    let mut indices = Vec::new();
    let mut any_uv = false;
    let mut any_n = false;

    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut parts = line.split_whitespace();
        let Some(tag) = parts.next() else { continue };
        let floats = |parts: std::str::SplitWhitespace, n: usize| -> Result<Vec<f64>> {
            let vals: Vec<f64> = parts
                .take(n)
                .map(|s| s.parse::<f64>().map_err(|_| err(line_no, format!("bad number `{s}`"))))
                .collect::<Result<_>>()?;
            if vals.len() < n {
                return Err(err(line_no, format!("expected {n} values")));
            }
            if vals.iter().any(|v| !v.is_finite()) {
                return Err(err(line_no, "non-finite value".to_string()));
            }
            Ok(vals)
        };
        match tag {
            "v" => {
                let v = floats(parts, 3)?;
                pos.push(Vec3::new(v[0], v[1], v[2]));
            }
            "vt" => {
                let v = floats(parts, 2)?;
                tex.push([v[0], v[1]]);
            }
            "vn" => {
                let v = floats(parts, 3)?;
                let n = Vec3::new(v[0], v[1], v[2]);
                let len = n.norm();
                if len == 0.0 {
                    return Err(err(line_no, "zero-length normal".to_string()));
                }
                nrm.push(n / len);
            }
            "f" => {
                let mut face = Vec::new();
                for corner in parts {
                    let mut it = corner.split('/');
                    let idx = |s: Option<&str>, count: usize| -> Result<Option<usize>> {
                        match s {
                            None | Some("") => Ok(None),
                            Some(s) => {
                                let i: i64 = s.parse().map_err(|_| err(line_no, format!("bad index `{s}`")))?;
                                let r = if i < 0 { count as i64 + i } else { i - 1 };
                                if r < 0 || r as usize >= count {
                                    return Err(err(line_no, format!("index {i} out of range")));
                                }
                                Ok(Some(r as usize))
                            }
                        }
                    };
                    let vi = idx(it.next(), pos.len())?.ok_or_else(|| err(line_no, "missing vertex index".into()))?;
                    let ti = idx(it.next(), tex.len())?;
                    let ni = idx(it.next(), nrm.len())?;
                    let key = (vi, ti, ni);
                    let id = *corners.entry(key).or_insert_with(|| {
                        out_pos.push(pos[vi]);
                        out_uv.push(ti.map(|t| tex[t]));
                        out_n.push(ni.map(|n| nrm[n]));
                        (out_pos.len() - 1) as u32
                    });
                    any_uv |= ti.is_some();
                    any_n |= ni.is_some();
                    face.push(id);
                }
                if face.len() < 3 {
                    return Err(err(line_no, "face with fewer than 3 vertices".into()));
                }
                for k in 1..face.len() - 1 {
                    indices.push([face[0], face[k], face[k + 1]]);
                }
            }
            _ => {}
        }
    }
    let mut mesh = TriangleMesh::new("", out_pos, indices, 0);
    if any_uv {
        if out_uv.iter().any(Option::is_none) {
            return Err(err(0, "some face corners lack texture coordinates".into()));
        }
        mesh.uvs = out_uv.into_iter().flatten().collect();
    }
    if any_n {
        if out_n.iter().any(Option::is_none) {
            return Err(err(0, "some face corners lack normals".into()));
        }
        mesh.normals = out_n.into_iter().flatten().collect();
    }
    if mesh.indices.is_empty() {
        return Err(err(0, "no faces".into()));
    }
    Ok(mesh)
}
