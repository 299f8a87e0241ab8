//! Reflectance disks, a radial disk descriptor, BRDF-to-friction tables and
//! URDF export.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::brdf::{eval_brdf, MicrofacetParams, ShadingFrame};
use crate::error::{Error, Result};
use crate::integrator::{trace, TraceHit};
use crate::io::PfmImage;
use crate::math::{Aabb, Vec3};
use crate::scene::{sample_material, Camera, ColorSource, Scene, ScalarSource, SvBrdfMaterial, TriangleMesh};

pub const DESCRIPTOR_BINS: usize = 64;
pub const DEFAULT_DISK_RESOLUTION: usize = 64;
pub const MIN_DISK_RESOLUTION: usize = 16;
pub const LIGHT_CONE_DEG: f64 = 5.0;
/// Light-cone quadrature: equal-solid-angle rings times azimuth steps.
const CONE_RINGS: usize = 4;
const CONE_STEPS: usize = 16;
pub const DEFAULT_GRID_SIZE: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct ReflectanceDisk {
    /// Single-channel square image; zero outside the inscribed disk.
    pub image: PfmImage,
    pub albedo: f64,
    pub roughness: f64,
}

impl ReflectanceDisk {
    pub fn resolution(&self) -> usize {
        self.image.width
    }
}

fn cone_directions() -> Vec<Vec3> {
    let cos_max = LIGHT_CONE_DEG.to_radians().cos();
    let mut dirs = Vec::with_capacity(CONE_RINGS * CONE_STEPS);
    for k in 0..CONE_RINGS {
        let z = 1.0 - (k as f64 + 0.5) / CONE_RINGS as f64 * (1.0 - cos_max);
        let s = (1.0 - z * z).max(0.0).sqrt();
        for j in 0..CONE_STEPS {
            let phi = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / CONE_STEPS as f64;
            dirs.push(Vec3::new(s * phi.cos(), s * phi.sin(), z));
        }
    }
    dirs
}

/// Disk value at view elevation `theta`, azimuth fixed at 0: mean of
/// `f cos(theta_l)` over the light cone, gray channel.
fn disk_value(params: &MicrofacetParams, theta: f64, lights: &[Vec3]) -> f64 {
    let n = Vec3::new(0.0, 0.0, 1.0);
    let v = Vec3::new(theta.sin(), 0.0, theta.cos());
    let sum: f64 = lights
        .iter()
        .map(|l| eval_brdf(params, &ShadingFrame::new(n, v, *l)).mean() * l.z)
        .sum();
    sum / lights.len() as f64
}

/// Orthographic view of a parabolic mirror over a flat sample: disk radius
/// `r` maps to view elevation `2 atan(r)`, so the rim is grazing. The light
/// comes from a small cone around the normal. Albedo is used as gray.
pub fn render_reflectance_disk(params: &MicrofacetParams, resolution: usize) -> Result<ReflectanceDisk> {
    if resolution < MIN_DISK_RESOLUTION {
        return Err(Error::field("resolution", format!("must be at least {MIN_DISK_RESOLUTION}")));
    }
    let gray = MicrofacetParams::gray(params.albedo_gray(), params.roughness).with_f0(params.f0);
    let lights = cone_directions();
    let mut image = PfmImage::new(resolution, resolution, 1);
    // the value depends only on the radius; key on the exact integer r^2
    let mut cache: HashMap<u64, f32> = HashMap::new();
    let res = resolution as f64;
    for y in 0..resolution {
        for x in 0..resolution {
            let (ix, iy) = (2 * x as i64 + 1 - resolution as i64, 2 * y as i64 + 1 - resolution as i64);
            let key = (ix * ix + iy * iy) as u64;
            let r = (key as f64).sqrt() / res;
            if r > 1.0 {
                continue;
            }
            let v = *cache
                .entry(key)
                .or_insert_with(|| disk_value(&gray, 2.0 * r.atan(), &lights) as f32);
            image.set(x, y, 0, v);
        }
    }
    Ok(ReflectanceDisk {
        image,
        albedo: gray.albedo.r,
        roughness: params.roughness,
    })
}

/// Radial profile of `ln(1 + I)` in 64 bins, averaged over azimuth, then
/// L2-normalized. Bins without pixels copy the nearest filled bin.
pub fn disk_descriptor(disk: &ReflectanceDisk) -> Vec<f64> {
    let n = disk.resolution();
    let res = n as f64;
    let mut sum = vec![0.0; DESCRIPTOR_BINS];
    let mut count = vec![0usize; DESCRIPTOR_BINS];
    for y in 0..n {
        for x in 0..n {
            let px = (2.0 * x as f64 + 1.0) / res - 1.0;
            let py = (2.0 * y as f64 + 1.0) / res - 1.0;
            let r = px.hypot(py);
            if r > 1.0 {
                continue;
            }
            let b = ((r * DESCRIPTOR_BINS as f64) as usize).min(DESCRIPTOR_BINS - 1);
            sum[b] += (disk.image.get(x, y, 0) as f64).max(0.0).ln_1p();
            count[b] += 1;
        }
    }
    let filled: Vec<usize> = (0..DESCRIPTOR_BINS).filter(|&b| count[b] > 0).collect();
    let mut d = vec![0.0; DESCRIPTOR_BINS];
    if filled.is_empty() {
        return d;
    }
    for (b, slot) in d.iter_mut().enumerate() {
        let src = *filled.iter().min_by_key(|&&f| f.abs_diff(b)).unwrap();
        *slot = sum[src] / count[src] as f64;
    }
    let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        d.iter_mut().for_each(|v| *v /= norm);
    }
    d
}

fn distance2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrictionAnchor {
    pub name: String,
    pub albedo: f64,
    pub roughness: f64,
    pub mu: f64,
}

impl FrictionAnchor {
    pub fn new(name: impl Into<String>, albedo: f64, roughness: f64, mu: f64) -> Self {
        FrictionAnchor {
            name: name.into(),
            albedo,
            roughness,
            mu,
        }
    }
}

/// Measured coefficients for three reference materials, placed on nodes of
/// the default 16 x 16 grid.
pub fn reference_anchors() -> Vec<FrictionAnchor> {
    vec![
        FrictionAnchor::new("wood", 6.0 / 15.0, 9.0 / 15.0, 0.76),
        FrictionAnchor::new("wax", 10.0 / 15.0, 2.0 / 15.0, 0.31),
        FrictionAnchor::new("carpet", 5.0 / 15.0, 14.0 / 15.0, 0.76),
    ]
}

/// `n` evenly spaced samples covering [0, 1].
pub fn uniform_axis(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LookupMode {
    Nearest,
    #[default]
    Bilinear,
}

impl std::str::FromStr for LookupMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nearest" => Ok(LookupMode::Nearest),
            "bilinear" => Ok(LookupMode::Bilinear),
            _ => Err(Error::InvalidArgument(format!("unknown lookup mode `{s}`"))),
        }
    }
}

/// Friction coefficient per (gray albedo, roughness) node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrictionTable {
    pub albedo_axis: Vec<f64>,
    pub roughness_axis: Vec<f64>,
    /// Indexed `[ia * roughness_axis.len() + ir]`.
    pub mu: Vec<f64>,
    pub descriptors: Vec<Vec<f64>>,
    pub anchors: Vec<FrictionAnchor>,
    pub disk_resolution: usize,
}

fn check_axis(name: &str, axis: &[f64]) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::field(name, "must not be empty"));
    }
    if axis.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::field(name, "values must lie in [0, 1]"));
    }
    if axis.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::field(name, "must be strictly increasing"));
    }
    Ok(())
}

fn descriptor_for(albedo: f64, roughness: f64, resolution: usize) -> Result<Vec<f64>> {
    Ok(disk_descriptor(&render_reflectance_disk(
        &MicrofacetParams::gray(albedo, roughness),
        resolution,
    )?))
}

/// Renders a disk per node and gives it the coefficient of the anchor with
/// the closest descriptor (first anchor on ties).
pub fn build_friction_table(
    anchors: &[FrictionAnchor],
    albedo_axis: &[f64],
    roughness_axis: &[f64],
    disk_resolution: usize,
) -> Result<FrictionTable> {
    if anchors.is_empty() {
        return Err(Error::InvalidArgument("at least one friction anchor is required".into()));
    }
    for a in anchors {
        if !(0.0..=1.0).contains(&a.mu) {
            return Err(Error::field("mu", format!("anchor `{}` must be in [0, 1]", a.name)));
        }
        if !(0.0..=1.0).contains(&a.albedo) || !(0.0..=1.0).contains(&a.roughness) {
            return Err(Error::field("anchor", format!("`{}` parameters must be in [0, 1]", a.name)));
        }
    }
    check_axis("albedo_axis", albedo_axis)?;
    check_axis("roughness_axis", roughness_axis)?;

    let anchor_desc = anchors
        .iter()
        .map(|a| descriptor_for(a.albedo, a.roughness, disk_resolution))
        .collect::<Result<Vec<_>>>()?;
    let nodes: Vec<(f64, f64)> = albedo_axis
        .iter()
        .flat_map(|&a| roughness_axis.iter().map(move |&r| (a, r)))
        .collect();
    let descriptors = nodes
        .par_iter()
        .map(|&(a, r)| descriptor_for(a, r, disk_resolution))
        .collect::<Result<Vec<_>>>()?;
    let mu = descriptors
        .iter()
        .map(|d| {
            let mut best = (f64::INFINITY, 0);
            for (k, ad) in anchor_desc.iter().enumerate() {
                let dist = distance2(d, ad);
                if dist < best.0 {
                    best = (dist, k);
                }
            }
            anchors[best.1].mu
        })
        .collect();
    Ok(FrictionTable {
        albedo_axis: albedo_axis.to_vec(),
        roughness_axis: roughness_axis.to_vec(),
        mu,
        descriptors,
        anchors: anchors.to_vec(),
        disk_resolution,
    })
}

/// Nearest node index along a sorted axis, lower index on ties.
fn nearest_index(axis: &[f64], v: f64) -> usize {
    let mut best = 0;
    for (i, a) in axis.iter().enumerate() {
        if (a - v).abs() < (axis[best] - v).abs() {
            best = i;
        }
    }
    best
}

/// Cell index and fraction for linear interpolation.
fn cell(axis: &[f64], v: f64) -> (usize, f64) {
    if axis.len() == 1 {
        return (0, 0.0);
    }
    let i = axis.partition_point(|&a| a <= v).clamp(1, axis.len() - 1) - 1;
    let t = (v - axis[i]) / (axis[i + 1] - axis[i]);
    (i, t.clamp(0.0, 1.0))
}

impl FrictionTable {
    pub fn node_mu(&self, ia: usize, ir: usize) -> f64 {
        self.mu[ia * self.roughness_axis.len() + ir]
    }

    /// Coefficient for gray albedo `a` and roughness `r`, clamped to the grid.
    pub fn lookup(&self, a: f64, r: f64, mode: LookupMode) -> f64 {
        let (aa, ra) = (&self.albedo_axis, &self.roughness_axis);
        let a = a.clamp(aa[0], aa[aa.len() - 1]);
        let r = r.clamp(ra[0], ra[ra.len() - 1]);
        match mode {
            LookupMode::Nearest => self.node_mu(nearest_index(aa, a), nearest_index(ra, r)),
            LookupMode::Bilinear => {
                let (i, s) = cell(aa, a);
                let (j, t) = cell(ra, r);
                let i1 = (i + 1).min(aa.len() - 1);
                let j1 = (j + 1).min(ra.len() - 1);
                let lo = self.node_mu(i, j) * (1.0 - t) + self.node_mu(i, j1) * t;
                let hi = self.node_mu(i1, j) * (1.0 - t) + self.node_mu(i1, j1) * t;
                lo * (1.0 - s) + hi * s
            }
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str, file: &str) -> Result<Self> {
        let t: FrictionTable = serde_json::from_str(text).map_err(|e| Error::Parse {
            file: file.to_string(),
            line: e.line(),
            message: e.to_string(),
        })?;
        check_axis("albedo_axis", &t.albedo_axis)?;
        check_axis("roughness_axis", &t.roughness_axis)?;
        if t.mu.len() != t.albedo_axis.len() * t.roughness_axis.len() {
            return Err(Error::field("mu", "length does not match the grid"));
        }
        Ok(t)
    }
}

pub fn lookup_friction(table: &FrictionTable, params: &MicrofacetParams, mode: LookupMode) -> f64 {
    table.lookup(params.albedo_gray(), params.roughness, mode)
}

/// Per-pixel coefficient of the first surface hit; 0 on misses and lamps.
pub fn friction_map(scene: &Scene, camera: &Camera, table: &FrictionTable, mode: LookupMode) -> PfmImage {
    let (w, h) = (camera.width, camera.height);
    let rows: Vec<Vec<f32>> = (0..h)
        .into_par_iter()
        .map(|y| {
            (0..w)
                .map(|x| match trace(scene, &camera.ray(x, y), 0.0) {
                    TraceHit::Surface(hit) => lookup_friction(table, &scene.material_params(&hit), mode) as f32,
                    _ => 0.0,
                })
                .collect()
        })
        .collect();
    PfmImage::from_data(w, h, 1, rows.concat()).expect("sized by construction")
}

/// Mean coefficient over the material's texels; a constant material is a
/// single lookup.
pub fn material_friction(material: &SvBrdfMaterial, table: &FrictionTable, mode: LookupMode) -> f64 {
    let dims = |img: &PfmImage| (img.width, img.height);
    let a = match &material.albedo {
        ColorSource::Texture(img) => Some(dims(img)),
        ColorSource::Constant(_) => None,
    };
    let r = match &material.roughness {
        ScalarSource::Texture(img) => Some(dims(img)),
        ScalarSource::Constant(_) => None,
    };
    let (w, h) = match (a, r) {
        (None, None) => (1, 1),
        (Some(d), None) | (None, Some(d)) => d,
        (Some(d1), Some(d2)) => (d1.0.max(d2.0), d1.1.max(d2.1)),
    };
    let mut sum = 0.0;
    for j in 0..h {
        for i in 0..w {
            // texel centers, undoing the material's uv scale
            let uv = [
                (i as f64 + 0.5) / w as f64 / material.uv_scale[0],
                (j as f64 + 0.5) / h as f64 / material.uv_scale[1],
            ];
            sum += lookup_friction(table, &sample_material(material, uv), mode);
        }
    }
    sum / (w * h) as f64
}

#[derive(Debug, Clone)]
pub struct UrdfObject<'a> {
    pub name: String,
    pub mesh: &'a TriangleMesh,
    pub material: &'a SvBrdfMaterial,
    /// Path written into `<visual>`.
    pub visual_mesh: String,
    /// Collision mesh path; the mesh's bounding box is used when absent.
    pub collision_mesh: Option<String>,
    pub mass: f64,
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

/// Single-link URDF with solid-box inertia and the material's mean friction
/// coefficient.
pub fn export_urdf(object: &UrdfObject, table: &FrictionTable, mode: LookupMode) -> Result<String> {
    if !(object.mass > 0.0) || !object.mass.is_finite() {
        return Err(Error::field("mass", "must be positive and finite"));
    }
    let mut bounds = Aabb::empty();
    for p in &object.mesh.positions {
        bounds.grow(*p);
    }
    let e = bounds.extent();
    if bounds.is_empty() || e.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::Geometry(format!("mesh `{}` has zero extent", object.mesh.name)));
    }
    let c = bounds.center();
    let m = object.mass;
    let (ixx, iyy, izz) = (
        m / 12.0 * (e.y * e.y + e.z * e.z),
        m / 12.0 * (e.x * e.x + e.z * e.z),
        m / 12.0 * (e.x * e.x + e.y * e.y),
    );
    let mu = material_friction(object.material, table, mode);
    let name = escape(&object.name);
    let origin = format!("<origin xyz=\"{:.6} {:.6} {:.6}\" rpy=\"0 0 0\"/>", c.x, c.y, c.z);

    let mut s = String::new();
    let _ = writeln!(s, "<?xml version=\"1.0\"?>");
    let _ = writeln!(s, "<robot name=\"{name}\">");
    let _ = writeln!(s, "  <link name=\"{name}_link\">");
    let _ = writeln!(s, "    <contact>");
    let _ = writeln!(s, "      <lateral_friction value=\"{mu:.6}\"/>");
    let _ = writeln!(s, "    </contact>");
    let _ = writeln!(s, "    <inertial>");
    let _ = writeln!(s, "      {origin}");
    let _ = writeln!(s, "      <mass value=\"{m:.6}\"/>");
    let _ = writeln!(
        s,
        "      <inertia ixx=\"{ixx:.6}\" ixy=\"0\" ixz=\"0\" iyy=\"{iyy:.6}\" iyz=\"0\" izz=\"{izz:.6}\"/>"
    );
    let _ = writeln!(s, "    </inertial>");
    let _ = writeln!(s, "    <visual>");
    let _ = writeln!(s, "      <geometry><mesh filename=\"{}\"/></geometry>", escape(&object.visual_mesh));
    let _ = writeln!(s, "    </visual>");
    let _ = writeln!(s, "    <collision>");
    match &object.collision_mesh {
        Some(path) => {
            let _ = writeln!(s, "      <geometry><mesh filename=\"{}\"/></geometry>", escape(path));
        }
        None => {
            let _ = writeln!(s, "      {origin}");
            let _ = writeln!(s, "      <geometry><box size=\"{:.6} {:.6} {:.6}\"/></geometry>", e.x, e.y, e.z);
        }
    }
    let _ = writeln!(s, "    </collision>");
    let _ = writeln!(s, "  </link>");
    let _ = writeln!(s, "</robot>");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::Rgb;

    fn table_2x2() -> FrictionTable {
        FrictionTable {
            albedo_axis: vec![0.0, 1.0],
            roughness_axis: vec![0.0, 1.0],
            mu: vec![0.2, 0.2, 0.4, 0.4],
            descriptors: vec![],
            anchors: vec![],
            disk_resolution: 16,
        }
    }

    #[test]
    fn outside_disk_is_zero_and_values_nonnegative() {
        let d = render_reflectance_disk(&MicrofacetParams::gray(0.5, 0.5), 32).unwrap();
        assert_eq!(d.image.get(0, 0, 0), 0.0);
        assert!(d.image.data.iter().all(|&v| v >= 0.0));
        assert!(render_reflectance_disk(&MicrofacetParams::gray(0.5, 0.5), 8).is_err());
    }

    #[test]
    fn black_disk_keeps_only_the_fresnel_tail() {
        let d = render_reflectance_disk(&MicrofacetParams::gray(0.0, 1.0).with_f0(0.0), 32).unwrap();
        let max = d.image.data.iter().cloned().fold(0.0f32, f32::max);
        assert!(max > 0.0 && max < 1e-3, "{max}");
    }

    #[test]
    fn zero_descriptor() {
        let d = ReflectanceDisk {
            image: PfmImage::new(16, 16, 1),
            albedo: 0.0,
            roughness: 0.0,
        };
        assert!(disk_descriptor(&d).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn descriptor_is_unit_length() {
        let d = descriptor_for(0.3, 0.4, 32).unwrap();
        assert_eq!(d.len(), DESCRIPTOR_BINS);
        assert!((d.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bilinear_midpoint() {
        let t = table_2x2();
        assert!((t.lookup(0.5, 0.3, LookupMode::Bilinear) - 0.3).abs() < 1e-15);
        assert_eq!(t.lookup(1.0, 0.0, LookupMode::Nearest), 0.4);
        assert_eq!(t.lookup(0.5, 0.0, LookupMode::Nearest), 0.2);
        assert_eq!(t.lookup(7.0, -3.0, LookupMode::Bilinear), 0.4);
    }

    #[test]
    fn single_anchor_fills_table() {
        let t = build_friction_table(&[FrictionAnchor::new("x", 0.1, 0.9, 0.5)], &uniform_axis(3), &uniform_axis(3), 16)
            .unwrap();
        assert!(t.mu.iter().all(|&m| m == 0.5));
        assert!(build_friction_table(&[], &uniform_axis(3), &uniform_axis(3), 16).is_err());
        assert!(build_friction_table(&[FrictionAnchor::new("x", 0.1, 0.9, 0.5)], &[0.5, 0.2], &uniform_axis(3), 16)
            .is_err());
    }

    #[test]
    fn urdf_escapes_names() {
        let mesh = TriangleMesh::quad(
            "q",
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(1.0, 1.0, 1.0),
            Vec3::new(0.0, 1.0, 1.0),
            0,
        );
        let mat = SvBrdfMaterial::constant("m", Rgb::gray(0.5), 0.5);
        let obj = UrdfObject {
            name: "a<b".into(),
            mesh: &mesh,
            material: &mat,
            visual_mesh: "q.obj".into(),
            collision_mesh: None,
            mass: 1.0,
        };
        let xml = export_urdf(&obj, &table_2x2(), LookupMode::Nearest).unwrap();
        assert!(xml.contains("a&lt;b"));
        assert!(xml.contains("lateral_friction value=\"0.200000\""));
    }
}
