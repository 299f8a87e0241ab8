//! Acceptance suite. Every check writes one `acceptance NN PASS|FAIL` line
//! straight to stderr so it survives output capture.

mod common;

use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use roomgt::brdf::{eval_brdf, eval_d, eval_f, eval_g1, MicrofacetParams, ShadingFrame};
use roomgt::friction::{
    build_friction_table, export_urdf, lookup_friction, reference_anchors, uniform_axis, LookupMode, UrdfObject,
    DEFAULT_DISK_RESOLUTION, DEFAULT_GRID_SIZE,
};
use roomgt::integrator::{reconstruct_site, render, ChannelFlags, EnvmapConfig, RenderConfig};
use roomgt::layout::{eval_layout, fit_floor_plane, PointCloud};
use roomgt::lights::{blackbody_rgb, Light};
use roomgt::math::{Rgb, Vec3};
use roomgt::scene::{Camera, Scene, SvBrdfMaterial, TriangleMesh};
use roomgt::viewsel::{rank_views, sample_wall_views, score_candidates, score_maps, WallViewParams};

fn report(id: u32, name: &str, pass: bool, detail: String, started: Instant) {
    let status = if pass { "PASS" } else { "FAIL" };
    let secs = started.elapsed().as_secs_f64();
    let _ = writeln!(std::io::stderr(), "acceptance {id:02} {status} {name}: {detail} ({secs:.1} s)");
    assert!(pass, "{name}: {detail}");
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn a01_brdf_terms() {
    let t = Instant::now();
    // hand-evaluated: D = 1 / (pi R^4), F = (1 - F0) + F0, G1 = 0.5 / (0.5 * 0.5 + 0.5)
    let d = rel(eval_d(1.0, 0.5), 16.0 / PI);
    let f = rel(eval_f(0.0, 0.05), 1.0);
    let g = rel(eval_g1(0.5, 1.0), 2.0 / 3.0);
    let worst = d.max(f).max(g);
    report(1, "brdf terms", worst <= 1e-9, format!("max relative error {worst:.2e} (tol 1e-9)"), t);
}

/// Directional albedo `int f cos dl` for view cosine `mu`. The specular part
/// is integrated in half-vector space with GGX-distributed nodes, the
/// diffuse remainder on a uniform (cos theta, phi) grid.
fn directional_albedo(a: f64, r: f64, mu: f64) -> f64 {
    let n = Vec3::new(0.0, 0.0, 1.0);
    let wo = Vec3::new((1.0 - mu * mu).sqrt(), 0.0, mu);
    let spec_only = MicrofacetParams::gray(0.0, r);
    let full = MicrofacetParams::gray(a, r);
    let alpha2 = r.max(0.02).powi(4);

    let (nt, np) = (512, 512);
    let mut spec = 0.0;
    for i in 0..nt {
        let xi = (i as f64 + 0.5) / nt as f64;
        // GGX: cos^2 theta_h = (1 - xi) / (1 + (alpha^2 - 1) xi)
        let c2 = (1.0 - xi) / (1.0 + (alpha2 - 1.0) * xi);
        let ch = c2.sqrt();
        let sh = (1.0 - c2).max(0.0).sqrt();
        let d = alpha2 / (PI * (c2 * (alpha2 - 1.0) + 1.0).powi(2));
        for j in 0..np {
            let phi = 2.0 * PI * (j as f64 + 0.5) / np as f64;
            let h = Vec3::new(sh * phi.cos(), sh * phi.sin(), ch);
            let vh = wo.dot(&h);
            if vh <= 0.0 {
                continue;
            }
            let l = h * (2.0 * vh) - wo;
            if l.z <= 0.0 {
                continue;
            }
            let pdf_l = d * ch / (4.0 * vh);
            let f = eval_brdf(&spec_only, &ShadingFrame::new(n, wo, l)).g;
            spec += f * l.z / pdf_l;
        }
    }
    spec /= (nt * np) as f64;

    let (mt, mp) = (64, 256);
    let mut diffuse = 0.0;
    let dw = 2.0 * PI / (mt * mp) as f64;
    for i in 0..mt {
        let z = (i as f64 + 0.5) / mt as f64;
        let s = (1.0 - z * z).sqrt();
        for j in 0..mp {
            let phi = 2.0 * PI * (j as f64 + 0.5) / mp as f64;
            let l = Vec3::new(s * phi.cos(), s * phi.sin(), z);
            let fr = ShadingFrame::new(n, wo, l);
            diffuse += (eval_brdf(&full, &fr).g - eval_brdf(&spec_only, &fr).g) * z * dw;
        }
    }
    spec + diffuse
}

#[test]
fn a02_white_furnace() {
    let t = Instant::now();
    let mut worst = (f64::NEG_INFINITY, 0.0, 0.0, 0.0);
    let mut over = 0;
    let mut negative = 0;
    let mut total = 0;
    for a in [0.0, 0.5, 1.0] {
        for ri in 1..=10 {
            for mi in 1..=10 {
                let (r, mu) = (ri as f64 / 10.0, mi as f64 / 10.0);
                let albedo = directional_albedo(a, r, mu);
                total += 1;
                over += (albedo > 1.05) as usize;
                negative += (albedo < 0.0) as usize;
                if albedo > worst.0 {
                    worst = (albedo, a, r, mu);
                }
            }
        }
    }
    let pass = over == 0 && negative == 0;
    report(
        2,
        "white furnace",
        pass,
        format!(
            "{over}/{total} grid points above 1.05, max {:.4} at A={}, R={}, N.v={}",
            worst.0, worst.1, worst.2, worst.3
        ),
        t,
    );
}

#[test]
fn a03_mis_matches_quadrature() {
    let t = Instant::now();
    let (scene, cam) = lamp_plane();
    let config = RenderConfig {
        spp: 4096,
        seed: 3,
        channels: ChannelFlags {
            gbuffer: false,
            per_light: false,
            envmaps: false,
        },
        ..RenderConfig::default()
    };
    let set = render(&scene, &cam, &config).unwrap();
    let Light::Lamp(lamp) = &scene.lights[0] else { unreachable!() };
    let (lmin, lmax) = (lamp.center - lamp.half_extents, lamp.center + lamp.half_extents);
    let params = floor_params();
    let mut errs = Vec::new();
    for y in 0..cam.height {
        for x in 0..cam.width {
            let ray = cam.ray(x, y);
            if ray.dir.z >= 0.0 {
                continue;
            }
            let tf = -ray.origin.z / ray.dir.z;
            if ray_box(ray.origin, ray.dir, lmin, lmax).is_some_and(|tb| tb < tf) {
                continue;
            }
            let p = ray.origin + ray.dir * tf;
            if p.x.abs() > FLOOR_HALF || p.y.abs() > FLOOR_HALF {
                continue;
            }
            let oracle = box_lamp_direct(
                lamp.center,
                lamp.half_extents,
                lamp.emission(),
                p,
                Vec3::z(),
                -ray.dir,
                &params,
                96.0,
            );
            let mc = set.radiance.mean.rgb(x, y);
            let e = (0..3)
                .map(|c| rel(mc[c] as f64, oracle.to_array()[c]))
                .fold(0.0, f64::max);
            errs.push(e);
        }
    }
    let n = errs.len();
    let p95 = percentile(errs, 0.95);
    report(
        3,
        "MIS vs quadrature",
        p95 <= 0.02,
        format!("95th percentile relative error {:.4} over {n} floor pixels (tol 0.02)", p95),
        t,
    );
}

#[test]
fn a04_per_light_additivity() {
    let t = Instant::now();
    let (scene, cam) = two_lamps();
    let config = RenderConfig {
        spp: 1024,
        seed: 11,
        max_bounces: 1,
        channels: ChannelFlags {
            gbuffer: false,
            per_light: true,
            envmaps: false,
        },
        ..RenderConfig::default()
    };
    let set = render(&scene, &cam, &config).unwrap();
    let direct = set.direct.as_ref().unwrap();
    let (mut beyond3, mut beyond5, mut count) = (0usize, 0usize, 0usize);
    for y in 0..cam.height {
        for x in 0..cam.width {
            for c in 0..3 {
                let sum: f64 = set.per_light.iter().map(|l| l.occluded.mean.get(x, y, c) as f64).sum();
                // per-light estimates share samples, so their errors add linearly at worst
                let sigma_sum: f64 = set.per_light.iter().map(|l| l.occluded.stderr.get(x, y, c) as f64).sum();
                let d = direct.mean.get(x, y, c) as f64;
                let sd = direct.stderr.get(x, y, c) as f64;
                let sigma = (sigma_sum * sigma_sum + sd * sd).sqrt();
                let diff = (sum - d).abs();
                count += 1;
                if sigma == 0.0 {
                    if diff > 1e-6 * d.abs().max(1e-6) {
                        beyond5 += 1;
                    }
                    continue;
                }
                beyond3 += (diff > 3.0 * sigma) as usize;
                beyond5 += (diff > 5.0 * sigma) as usize;
            }
        }
    }
    let frac = beyond3 as f64 / count as f64;
    report(
        4,
        "per-light additivity",
        frac <= 0.01 && beyond5 == 0,
        format!("{beyond3}/{count} samples beyond 3 sigma ({:.3}%), {beyond5} beyond 5 sigma", frac * 100.0),
        t,
    );
}

#[derive(PartialEq)]
enum Shadow {
    Full,
    None,
    Partial,
}

fn classify_shadow(p: Vec3) -> Shadow {
    let c = Vec3::from(OCC_LAMP_CENTER);
    let h = Vec3::from(OCC_LAMP_HALF);
    let margin = 1e-3;
    let mut inside = 0;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for i in 0..8 {
        let s = Vec3::new(
            if i & 1 == 0 { -1.0 } else { 1.0 },
            if i & 2 == 0 { -1.0 } else { 1.0 },
            if i & 4 == 0 { -1.0 } else { 1.0 },
        );
        let q = c + h.component_mul(&s);
        let k = (PLATE_Z - p.z) / (q.z - p.z);
        let x = p + (q - p) * k;
        if x.x.abs() < PLATE_HALF - margin && x.y.abs() < PLATE_HALF - margin {
            inside += 1;
        }
        xs.push(x.x);
        ys.push(x.y);
    }
    let lim = PLATE_HALF + margin;
    let clear = xs.iter().all(|&v| v > lim)
        || xs.iter().all(|&v| v < -lim)
        || ys.iter().all(|&v| v > lim)
        || ys.iter().all(|&v| v < -lim);
    match (inside, clear) {
        (8, _) => Shadow::Full,
        (_, true) => Shadow::None,
        _ => Shadow::Partial,
    }
}

#[test]
fn a05_visibility_ratio() {
    let t = Instant::now();
    let (scene, cam) = occluder();
    let config = RenderConfig {
        spp: 64,
        seed: 5,
        channels: ChannelFlags {
            gbuffer: false,
            per_light: true,
            envmaps: false,
        },
        ..RenderConfig::default()
    };
    let set = render(&scene, &cam, &config).unwrap();
    let vis = &set.per_light[0].visibility;
    let in_range = vis.data.iter().all(|v| (0.0..=1.0).contains(v));
    let (mut full, mut none, mut bad_full, mut bad_none) = (0, 0, 0, 0);
    let (mut exact_full, mut exact_none) = (true, true);
    for y in 0..cam.height {
        for x in 0..cam.width {
            let ray = cam.ray(x, y);
            if ray.dir.z >= 0.0 {
                continue;
            }
            // skip pixels that see the plate
            let tp = (PLATE_Z - ray.origin.z) / ray.dir.z;
            if tp > 0.0 {
                let q = ray.origin + ray.dir * tp;
                if q.x.abs() <= PLATE_HALF && q.y.abs() <= PLATE_HALF {
                    continue;
                }
            }
            let p = ray.origin + ray.dir * (-ray.origin.z / ray.dir.z);
            let v = vis.get(x, y, 0) as f64;
            match classify_shadow(p) {
                Shadow::Full => {
                    full += 1;
                    bad_full += (v > 0.02) as usize;
                    exact_full &= v == 0.0;
                }
                Shadow::None => {
                    none += 1;
                    bad_none += (v < 0.98) as usize;
                    exact_none &= v == 1.0;
                }
                Shadow::Partial => {}
            }
        }
    }
    let pass = in_range && full > 20 && none > 20 && bad_full == 0 && bad_none == 0;
    report(
        5,
        "visibility ratio",
        pass,
        format!(
            "range ok: {in_range}; umbra {full} px ({bad_full} off, exact zero: {exact_full}); lit {none} px ({bad_none} off, exact one: {exact_none})"
        ),
        t,
    );
}

#[test]
fn a06_envmap_reconstruction() {
    let t = Instant::now();
    let scene = cornell();
    let cam = scene.cameras[0].clone();
    let config = RenderConfig {
        spp: 1024,
        seed: 17,
        channels: ChannelFlags {
            gbuffer: false,
            per_light: false,
            envmaps: true,
        },
        envmap: EnvmapConfig {
            stride: 8,
            ..EnvmapConfig::default()
        },
        ..RenderConfig::default()
    };
    let set = render(&scene, &cam, &config).unwrap();
    let grid = set.envmaps.as_ref().unwrap();
    let mut errs = Vec::new();
    let (mut sum_rec, mut sum_ref) = (0.0, 0.0);
    for r in 0..grid.rows {
        for c in 0..grid.cols {
            let Some(rec) = reconstruct_site(&scene, &cam, grid, r, c) else { continue };
            let (x, y) = grid.site_pixel(r, c);
            let px = set.radiance.mean.rgb(x, y);
            let reference = (px[0] as f64 + px[1] as f64 + px[2] as f64) / 3.0;
            sum_rec += rec.mean();
            sum_ref += reference;
            errs.push(rel(rec.mean(), reference));
        }
    }
    let n = errs.len();
    let median = percentile(errs.clone(), 0.5);
    let p90 = percentile(errs.clone(), 0.9);
    let max = errs.iter().cloned().fold(0.0, f64::max);
    let aggregate = rel(sum_rec, sum_ref);
    let pass = median <= 0.05 && aggregate <= 0.05;
    report(
        6,
        "envmap reconstruction",
        pass,
        format!(
            "{n} sites: median {:.4}, p90 {:.4}, max {:.4}, image-sum error {:.4} (tol 0.05)",
            median, p90, max, aggregate
        ),
        t,
    );
}

#[test]
fn a07_thread_count_determinism() {
    let t = Instant::now();
    let scene = cornell();
    let cam = scene.cameras[0].with_resolution(32, 24);
    let mut outputs = Vec::new();
    for threads in [1, 4, 8] {
        let config = RenderConfig {
            spp: 4,
            seed: 99,
            threads: Some(threads),
            channels: ChannelFlags {
                gbuffer: true,
                per_light: true,
                envmaps: true,
            },
            envmap: EnvmapConfig {
                stride: 8,
                samples: 2,
                ..EnvmapConfig::default()
            },
            ..RenderConfig::default()
        };
        let dir = tempfile::tempdir().unwrap();
        let set = render(&scene, &cam, &config).unwrap();
        let manifest = set.write(dir.path(), &config).unwrap();
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir.path())
            .unwrap()
            .map(|e| {
                let p = e.unwrap().path();
                (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
            })
            .collect();
        files.sort();
        assert!(manifest.channels.len() > 10);
        outputs.push(files);
    }
    let same = outputs.windows(2).all(|w| w[0] == w[1]);
    let n = outputs[0].len();
    report(7, "determinism across threads", same, format!("{n} files identical for 1, 4, 8 threads: {same}"), t);
}

const ROOM: [f64; 3] = [5.0, 3.0, 3.0];
const FURNITURE: ([f64; 3], [f64; 3]) = ([3.2, 1.7, 0.0], [4.2, 2.5, 0.9]);

fn room_scene() -> Scene {
    let [x, y, z] = ROOM;
    let q = |name: &str, a: Vec3, b: Vec3, c: Vec3, d: Vec3| TriangleMesh::quad(name, a, b, c, d, 0);
    let meshes = vec![
        q("floor", v(0.0, 0.0, 0.0), v(x, 0.0, 0.0), v(x, y, 0.0), v(0.0, y, 0.0)),
        q("ceiling", v(0.0, 0.0, z), v(0.0, y, z), v(x, y, z), v(x, 0.0, z)),
        q("south", v(0.0, 0.0, 0.0), v(0.0, 0.0, z), v(x, 0.0, z), v(x, 0.0, 0.0)),
        q("north", v(0.0, y, 0.0), v(x, y, 0.0), v(x, y, z), v(0.0, y, z)),
        q("west", v(0.0, 0.0, 0.0), v(0.0, y, 0.0), v(0.0, y, z), v(0.0, 0.0, z)),
        q("east", v(x, 0.0, 0.0), v(x, 0.0, z), v(x, y, z), v(x, y, 0.0)),
        box_mesh("cabinet", Vec3::from(FURNITURE.0), Vec3::from(FURNITURE.1), 0, 7),
    ];
    Scene::new(meshes, vec![SvBrdfMaterial::constant("m", Rgb::gray(0.5), 0.5)], vec![], vec![]).unwrap()
}

/// Closed-form first hit in the furniture room: `(depth, camera normal)`.
fn room_hit(cam: &Camera, x: usize, y: usize) -> (f32, [f32; 3]) {
    let ray = cam.ray(x, y);
    let (o, d) = (ray.origin, ray.dir);
    let mut best = (f64::INFINITY, Vec3::zeros());
    for a in 0..3 {
        if d[a] == 0.0 {
            continue;
        }
        let wall = if d[a] > 0.0 { ROOM[a] } else { 0.0 };
        let t = (wall - o[a]) / d[a];
        if t > 0.0 && t < best.0 {
            let mut n = Vec3::zeros();
            n[a] = -d[a].signum();
            best = (t, n);
        }
    }
    let (bmin, bmax) = (Vec3::from(FURNITURE.0), Vec3::from(FURNITURE.1));
    if let Some(t) = ray_box(o, d, bmin, bmax) {
        if t < best.0 {
            let p = o + d * t;
            let mut axis = 0;
            let mut close = f64::INFINITY;
            for a in 0..3 {
                for face in [bmin[a], bmax[a]] {
                    if (p[a] - face).abs() < close {
                        close = (p[a] - face).abs();
                        axis = a;
                    }
                }
            }
            let mut n = Vec3::zeros();
            n[axis] = -d[axis].signum();
            best = (t, n);
        }
    }
    let (t, n) = best;
    let depth = t * d.dot(&cam.forward);
    let cn = [n.dot(&cam.right), n.dot(&cam.up), -n.dot(&cam.forward)];
    (depth as f32, cn.map(|c| c as f32))
}

/// Eq. score computed from scratch: forward differences clamped at the
/// border, plus 0.3 ln(1 + d).
fn hand_score(cam: &Camera) -> f64 {
    let (w, h) = (cam.width, cam.height);
    let mut depth = vec![0f32; w * h];
    let mut normal = vec![[0f32; 3]; w * h];
    for y in 0..h {
        for x in 0..w {
            let (d, n) = room_hit(cam, x, y);
            depth[y * w + x] = d;
            normal[y * w + x] = n;
        }
    }
    let mut grad = 0.0;
    for y in 0..h {
        for x in 0..w {
            let here = normal[y * w + x];
            let right = normal[y * w + (x + 1).min(w - 1)];
            let down = normal[(y + 1).min(h - 1) * w + x];
            for c in 0..3 {
                grad += (right[c] as f64 - here[c] as f64).abs() + (down[c] as f64 - here[c] as f64).abs();
            }
        }
    }
    let logd: f64 = depth.iter().map(|&d| (1.0 + d as f64).ln()).sum();
    grad + 0.3 * logd
}

#[test]
fn a08_view_score() {
    let t = Instant::now();
    // analytic: constant normals, uniform depth
    let (w, h) = (160, 120);
    let d = 2.5f32;
    let depth = roomgt::io::PfmImage::from_data(w, h, 1, vec![d; w * h]).unwrap();
    let normals = roomgt::io::PfmImage::from_data(w, h, 3, [0.0f32, 0.0, 1.0].repeat(w * h)).unwrap();
    let analytic = score_maps(&depth, &normals);
    let expected = 0.3 * (w * h) as f64 * (d as f64 + 1.0).ln();
    let analytic_err = (analytic - expected).abs() / expected;

    let scene = room_scene();
    let poly = [[0.0, 0.0], [ROOM[0], 0.0], [ROOM[0], ROOM[1]], [0.0, ROOM[1]]];
    let params = WallViewParams {
        spacing: 1.0,
        ..WallViewParams::default()
    };
    let cams = sample_wall_views(&poly, &params).unwrap();
    let cands = score_candidates(&scene, &cams);
    let ranked = rank_views(&cands, cands.len()).unwrap();
    let oracle: Vec<f64> = cands.iter().map(|c| hand_score(&c.camera)).collect();
    // scores agree up to edge pixels where a ray grazes a seam
    let score_err = cands
        .iter()
        .zip(&oracle)
        .map(|(c, o)| rel(c.score, *o))
        .fold(0.0, f64::max);
    let mut order_ok = true;
    for pair in ranked.windows(2) {
        let (a, b) = (oracle[pair[0].index], oracle[pair[1].index]);
        if a < b && rel(a, b) > 1e-3 {
            order_ok = false;
        }
    }
    let mut hand_order: Vec<usize> = (0..oracle.len()).collect();
    hand_order.sort_by(|&a, &b| oracle[b].total_cmp(&oracle[a]));
    let top_same = hand_order[0] == ranked[0].index || rel(oracle[hand_order[0]], oracle[ranked[0].index]) <= 1e-3;
    let pass = analytic_err <= 1e-9 && order_ok && top_same && score_err < 5e-3;
    report(
        8,
        "view score",
        pass,
        format!(
            "analytic relative error {analytic_err:.1e}; {} views, max score deviation {score_err:.2e}, ranking consistent: {}",
            cands.len(),
            order_ok && top_same
        ),
        t,
    );
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

#[test]
fn a09_ransac_floor() {
    let t = Instant::now();
    let mut ok = 0;
    let (mut worst_angle, mut worst_offset) = (0.0f64, 0.0f64);
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let mut pts = Vec::new();
        for _ in 0..700 {
            pts.push(Vec3::new(
                rng.random_range(0.0..5.0),
                rng.random_range(0.0..5.0),
                0.1 + 0.005 * gaussian(&mut rng),
            ));
        }
        for _ in 0..300 {
            pts.push(Vec3::new(
                rng.random_range(0.0..5.0),
                rng.random_range(0.0..5.0),
                rng.random_range(0.0..5.0),
            ));
        }
        let plane = fit_floor_plane(&PointCloud::new(pts), 0.02, 1000, seed).unwrap();
        let angle = plane.normal.z.clamp(-1.0, 1.0).acos().to_degrees();
        let offset = (plane.offset - 0.1).abs();
        worst_angle = worst_angle.max(angle);
        worst_offset = worst_offset.max(offset);
        ok += (angle <= 1.0 && offset <= 0.01) as usize;
    }
    report(
        9,
        "ransac floor",
        ok == 100,
        format!("{ok}/100 seeds; worst normal {worst_angle:.3} deg, worst offset {worst_offset:.4} m"),
        t,
    );
}

#[test]
fn a10_layout_metrics() {
    let t = Instant::now();
    let gt = vec![[0.0, 0.0], [4.0, 0.0], [4.0, 3.0], [1.5, 3.0], [1.5, 2.0], [0.0, 2.0]];
    let scale = 10.0;
    let mut checks = Vec::new();

    let m = eval_layout(&gt, &gt, scale).unwrap();
    checks.push(("identity", [m.corner_precision, m.corner_recall, m.edge_precision, m.edge_recall, m.iou] == [1.0; 5]));

    let mut p = gt.clone();
    p[2][1] += 1.0; // exactly 10 px
    let m = eval_layout(&p, &gt, scale).unwrap();
    checks.push(("10.0 px matched", m.corner_precision == 1.0 && m.corner_recall == 1.0));

    p[2][1] = gt[2][1] + 1.01; // 10.1 px
    let m = eval_layout(&p, &gt, scale).unwrap();
    let n = gt.len() as f64;
    checks.push((
        "10.1 px unmatched",
        m.corner_precision == (n - 1.0) / n && m.corner_recall == (n - 1.0) / n,
    ));
    checks.push(("edge needs both corners", m.edge_precision == (n - 2.0) / n));

    let far: Vec<[f64; 2]> = gt.iter().map(|q| [q[0] + 20.0, q[1]]).collect();
    checks.push(("disjoint iou", eval_layout(&far, &gt, scale).unwrap().iou == 0.0));

    let skew = vec![[0.1, 0.0], [4.0, 0.3], [3.7, 3.1], [0.0, 2.9]];
    let (a, b) = (eval_layout(&skew, &gt, scale).unwrap(), eval_layout(&gt, &skew, scale).unwrap());
    checks.push((
        "swap symmetry",
        a.corner_precision == b.corner_recall
            && a.corner_recall == b.corner_precision
            && a.edge_precision == b.edge_recall
            && a.iou == b.iou,
    ));
    let e = eval_layout(&[], &gt, scale).unwrap();
    checks.push(("empty prediction", e.corner_precision == 0.0 && e.corner_recall == 0.0));

    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    report(
        10,
        "layout metrics",
        failed.is_empty(),
        format!("{}/{} cases exact; failing: {:?}", checks.len() - failed.len(), checks.len(), failed),
        t,
    );
}

#[test]
fn a11_friction() {
    let t = Instant::now();
    let axis = uniform_axis(DEFAULT_GRID_SIZE);
    let anchors = reference_anchors();
    let table = build_friction_table(&anchors, &axis, &axis, DEFAULT_DISK_RESOLUTION).unwrap();
    let mut anchor_ok = true;
    let mut got = Vec::new();
    for a in &anchors {
        let params = MicrofacetParams::gray(a.albedo, a.roughness);
        let n = lookup_friction(&table, &params, LookupMode::Nearest);
        let b = table.lookup(a.albedo, a.roughness, LookupMode::Bilinear);
        anchor_ok &= n == a.mu && b == a.mu;
        got.push(format!("{}={}", a.name, n));
    }

    // bilinear midpoint between albedo-adjacent nodes with different mu
    let mut mid_ok = true;
    let mut pairs = 0;
    for ia in 0..axis.len() - 1 {
        for ir in 0..axis.len() {
            let (m0, m1) = (table.node_mu(ia, ir), table.node_mu(ia + 1, ir));
            let mid = table.lookup(0.5 * (axis[ia] + axis[ia + 1]), axis[ir], LookupMode::Bilinear);
            mid_ok &= (mid - 0.5 * (m0 + m1)).abs() <= 1e-12;
            pairs += (m0 != m1) as usize;
        }
    }

    let cube = box_mesh("cube", v(0.0, 0.0, 0.0), v(1.0, 1.0, 1.0), 0, 1);
    let wood = &anchors[0];
    let mat = SvBrdfMaterial::constant("wood", Rgb::gray(wood.albedo), wood.roughness);
    let obj = UrdfObject {
        name: "cube".into(),
        mesh: &cube,
        material: &mat,
        visual_mesh: "cube.obj".into(),
        collision_mesh: None,
        mass: 2.0,
    };
    let xml = export_urdf(&obj, &table, LookupMode::Bilinear).unwrap();
    let again = export_urdf(&obj, &table, LookupMode::Bilinear).unwrap();
    let doc = roxmltree::Document::parse(&xml).unwrap();
    let links = doc.descendants().filter(|n| n.has_tag_name("link")).count();
    let mu: f64 = doc
        .descendants()
        .find(|n| n.has_tag_name("lateral_friction"))
        .and_then(|n| n.attribute("value"))
        .unwrap()
        .parse()
        .unwrap();
    let ixx: f64 = doc
        .descendants()
        .find(|n| n.has_tag_name("inertia"))
        .and_then(|n| n.attribute("ixx"))
        .unwrap()
        .parse()
        .unwrap();
    let urdf_ok = links == 1 && mu == 0.76 && (ixx - 2.0 / 12.0 * 2.0).abs() < 1e-6 && xml == again;
    report(
        11,
        "friction",
        anchor_ok && mid_ok && urdf_ok,
        format!(
            "anchors {} exact: {anchor_ok}; bilinear midpoints ok: {mid_ok} ({pairs} unequal pairs); urdf links={links} mu={mu} ixx={ixx}",
            got.join(" ")
        ),
        t,
    );
}

/// Analytic CIE 1931 colour matching fit (piecewise Gaussians).
fn cie_fit(lambda: f64) -> [f64; 3] {
    let g = |x: f64, mu: f64, s1: f64, s2: f64| {
        let t = (x - mu) / if x < mu { s1 } else { s2 };
        (-0.5 * t * t).exp()
    };
    let x = 1.056 * g(lambda, 599.8, 37.9, 31.0) + 0.362 * g(lambda, 442.0, 16.0, 26.7)
        - 0.065 * g(lambda, 501.1, 20.4, 26.2);
    let y = 0.821 * g(lambda, 568.8, 46.9, 40.5) + 0.286 * g(lambda, 530.9, 16.3, 31.1);
    let z = 1.217 * g(lambda, 437.0, 11.8, 36.0) + 0.681 * g(lambda, 459.0, 26.0, 13.8);
    [x, y, z]
}

fn planck_blue_red(kelvin: f64) -> f64 {
    let mut xyz = [0.0; 3];
    let mut lambda = 360.0f64;
    while lambda <= 830.0 {
        let l: f64 = lambda * 1e-9;
        let b = 1.0 / (l.powi(5) * ((6.626_070_15e-34 * 2.997_924_58e8 / (l * 1.380_649e-23 * kelvin)).exp() - 1.0));
        let c = cie_fit(lambda);
        for k in 0..3 {
            xyz[k] += b * c[k];
        }
        lambda += 1.0;
    }
    let r = 3.2406 * xyz[0] - 1.5372 * xyz[1] - 0.4986 * xyz[2];
    let bl = 0.0557 * xyz[0] - 0.2040 * xyz[1] + 1.0570 * xyz[2];
    bl / r
}

#[test]
fn a12_blackbody_ratio() {
    let t = Instant::now();
    let temps: Vec<f64> = (0..=8).map(|i| 4000.0 + 500.0 * i as f64).collect();
    let ratios: Vec<f64> = temps
        .iter()
        .map(|&k| {
            let c = blackbody_rgb(k).unwrap();
            c.b / c.r
        })
        .collect();
    let oracle: Vec<f64> = temps.iter().map(|&k| planck_blue_red(k)).collect();
    let increasing = ratios.windows(2).all(|w| w[1] > w[0]);
    let oracle_increasing = oracle.windows(2).all(|w| w[1] > w[0]);
    let dev = ratios.iter().zip(&oracle).map(|(a, b)| rel(*a, *b)).fold(0.0, f64::max);
    report(
        12,
        "black-body blue/red",
        increasing && oracle_increasing && dev < 0.05,
        format!(
            "b/r {:.3} .. {:.3}, strictly increasing: {increasing}; max deviation from Gaussian-fit oracle {:.3}",
            ratios[0],
            ratios[ratios.len() - 1],
            dev
        ),
        t,
    );
}
