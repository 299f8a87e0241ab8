#![allow(dead_code)]

use std::path::PathBuf;

use roomgt::brdf::{eval_brdf, MicrofacetParams, ShadingFrame};
use roomgt::lights::{LampLight, Light};
use roomgt::math::{Rgb, Vec3};
use roomgt::scene::{load_scene, Camera, Scene, SvBrdfMaterial, TriangleMesh};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn cornell() -> Scene {
    load_scene(fixture("cornell.json")).unwrap()
}

pub fn v(x: f64, y: f64, z: f64) -> Vec3 {
    Vec3::new(x, y, z)
}

pub fn floor_mesh(half: f64, material: usize) -> TriangleMesh {
    let mut m = TriangleMesh::quad(
        "floor",
        v(-half, -half, 0.0),
        v(half, -half, 0.0),
        v(half, half, 0.0),
        v(-half, half, 0.0),
        material,
    );
    m.instance_id = 1;
    m
}

/// Five-sided axis-aligned box resting on z = 0.
pub fn box_mesh(name: &str, min: Vec3, max: Vec3, material: usize, instance: u32) -> TriangleMesh {
    let (a, b) = (min, max);
    let c = |x: f64, y: f64, z: f64| v(x, y, z);
    let quads = [
        [c(a.x, a.y, b.z), c(b.x, a.y, b.z), c(b.x, b.y, b.z), c(a.x, b.y, b.z)],
        [c(a.x, a.y, a.z), c(b.x, a.y, a.z), c(b.x, a.y, b.z), c(a.x, a.y, b.z)],
        [c(b.x, a.y, a.z), c(b.x, b.y, a.z), c(b.x, b.y, b.z), c(b.x, a.y, b.z)],
        [c(b.x, b.y, a.z), c(a.x, b.y, a.z), c(a.x, b.y, b.z), c(b.x, b.y, b.z)],
        [c(a.x, b.y, a.z), c(a.x, a.y, a.z), c(a.x, a.y, b.z), c(a.x, b.y, b.z)],
    ];
    let mut positions = Vec::new();
    let mut indices = Vec::new();
    for q in quads {
        let o = positions.len() as u32;
        positions.extend(q);
        indices.push([o, o + 1, o + 2]);
        indices.push([o, o + 2, o + 3]);
    }
    let mut m = TriangleMesh::new(name, positions, indices, material);
    m.instance_id = instance;
    m
}

pub const FLOOR_HALF: f64 = 10.0;
pub const FLOOR_ALBEDO: f64 = 0.6;
pub const FLOOR_ROUGHNESS: f64 = 0.8;

pub fn floor_params() -> MicrofacetParams {
    MicrofacetParams::gray(FLOOR_ALBEDO, FLOOR_ROUGHNESS)
}

fn gray_material() -> SvBrdfMaterial {
    SvBrdfMaterial::constant("floor", Rgb::gray(FLOOR_ALBEDO), FLOOR_ROUGHNESS)
}

pub fn lamp(id: &str, center: Vec3, half: Vec3, kelvin: f64, intensity: f64) -> Light {
    Light::Lamp(LampLight::aligned(id, center, half, kelvin, intensity).unwrap())
}

/// Gray floor under one thin square lamp, seen at an angle.
pub fn lamp_plane() -> (Scene, Camera) {
    let scene = Scene::new(
        vec![floor_mesh(FLOOR_HALF, 0)],
        vec![gray_material()],
        vec![lamp("lamp", v(0.0, 0.0, 1.0), v(0.25, 0.25, 0.02), 6500.0, 5.0)],
        vec![],
    )
    .unwrap();
    let cam = Camera::looking_at(v(0.0, -2.5, 2.0), v(0.0, 0.3, 0.0), v(0.0, 0.0, 1.0), 60.0, 64, 64).unwrap();
    (scene, cam)
}

/// Floor, one box and two lamps of different colour.
pub fn two_lamps() -> (Scene, Camera) {
    let scene = Scene::new(
        vec![
            floor_mesh(10.0, 0),
            box_mesh("block", v(-0.3, -0.3, 0.0), v(0.3, 0.3, 0.6), 0, 2),
        ],
        vec![gray_material()],
        vec![
            lamp("warm", v(-0.8, 0.2, 1.5), v(0.15, 0.15, 0.02), 4000.0, 6.0),
            lamp("cool", v(0.9, -0.1, 1.2), v(0.1, 0.2, 0.02), 7500.0, 4.0),
        ],
        vec![],
    )
    .unwrap();
    let cam = Camera::looking_at(v(0.0, -3.0, 2.5), v(0.0, 0.0, 0.2), v(0.0, 0.0, 1.0), 60.0, 48, 48).unwrap();
    (scene, cam)
}

pub const PLATE_HALF: f64 = 0.5;
pub const PLATE_Z: f64 = 1.0;
pub const OCC_LAMP_CENTER: [f64; 3] = [0.0, 0.0, 2.0];
pub const OCC_LAMP_HALF: [f64; 3] = [0.1, 0.1, 0.02];

/// Square plate hovering between a floor and a small lamp.
pub fn occluder() -> (Scene, Camera) {
    let h = PLATE_HALF;
    let mut plate = TriangleMesh::quad(
        "plate",
        v(-h, -h, PLATE_Z),
        v(h, -h, PLATE_Z),
        v(h, h, PLATE_Z),
        v(-h, h, PLATE_Z),
        0,
    );
    plate.instance_id = 2;
    let [cx, cy, cz] = OCC_LAMP_CENTER;
    let [hx, hy, hz] = OCC_LAMP_HALF;
    let scene = Scene::new(
        vec![floor_mesh(10.0, 0), plate],
        vec![gray_material()],
        vec![lamp("lamp", v(cx, cy, cz), v(hx, hy, hz), 5000.0, 10.0)],
        vec![],
    )
    .unwrap();
    // low camera so the floor under the plate is visible
    let cam = Camera::looking_at(v(0.0, -3.2, 0.6), v(0.0, 0.0, 0.0), v(0.0, 0.0, 1.0), 70.0, 64, 64).unwrap();
    (scene, cam)
}

/// Midpoint quadrature of the light an axis-aligned emissive box sends to
/// `p` and reflects toward `wo`: sum over faces facing `p` of
/// `f Le cos cos' / r^2 dA`. No occlusion.
pub fn box_lamp_direct(
    center: Vec3,
    half: Vec3,
    le: Rgb,
    p: Vec3,
    n: Vec3,
    wo: Vec3,
    params: &MicrofacetParams,
    density: f64,
) -> Rgb {
    let mut total = Rgb::ZERO;
    for axis in 0..3 {
        for sign in [-1.0, 1.0] {
            let mut fn_ = Vec3::zeros();
            fn_[axis] = sign;
            let fc = center + fn_ * half[axis];
            if (p - fc).dot(&fn_) <= 0.0 {
                continue;
            }
            let (a1, a2) = ((axis + 1) % 3, (axis + 2) % 3);
            let (l1, l2) = (2.0 * half[a1], 2.0 * half[a2]);
            let (n1, n2) = (((l1 * density).ceil() as usize).max(4), ((l2 * density).ceil() as usize).max(4));
            let da = l1 * l2 / (n1 * n2) as f64;
            for i in 0..n1 {
                for j in 0..n2 {
                    let mut q = fc;
                    q[a1] += -half[a1] + (i as f64 + 0.5) * l1 / n1 as f64;
                    q[a2] += -half[a2] + (j as f64 + 0.5) * l2 / n2 as f64;
                    let d = q - p;
                    let r2 = d.norm_squared();
                    let wi = d / r2.sqrt();
                    let cos = n.dot(&wi);
                    let cos_l = -fn_.dot(&wi);
                    if cos <= 0.0 || cos_l <= 0.0 {
                        continue;
                    }
                    let f = eval_brdf(params, &ShadingFrame::new(n, wo, wi));
                    total += f * le * (cos * cos_l * da / r2);
                }
            }
        }
    }
    total
}

/// Ray / axis-aligned box slab test; entry distance.
pub fn ray_box(o: Vec3, d: Vec3, min: Vec3, max: Vec3) -> Option<f64> {
    let (mut t0, mut t1) = (0.0f64, f64::INFINITY);
    for a in 0..3 {
        if d[a].abs() < 1e-300 {
            if o[a] < min[a] || o[a] > max[a] {
                return None;
            }
            continue;
        }
        let (mut n, mut f) = ((min[a] - o[a]) / d[a], (max[a] - o[a]) / d[a]);
        if n > f {
            std::mem::swap(&mut n, &mut f);
        }
        t0 = t0.max(n);
        t1 = t1.min(f);
    }
    (t0 <= t1 && t0 > 0.0).then_some(t0)
}

/// Percentile by sorting, `q` in [0, 1].
pub fn percentile(mut xs: Vec<f64>, q: f64) -> f64 {
    xs.sort_by(|a, b| a.total_cmp(b));
    let k = ((xs.len() - 1) as f64 * q).round() as usize;
    xs[k]
}
