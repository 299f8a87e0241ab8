//! Per-pixel hemispherical incoming-radiance maps.
//!
//! Texel `(i, j)` covers `cos(theta)` in `[1 - (i+1)/h_theta, 1 - i/h_theta]`
//! and `phi` in `[j, j+1] * 2 pi / h_phi` of the local shading frame
//! (`z` = shading normal, `x`/`y` from [`Frame::from_normal`]). Every texel
//! has the same solid angle. The stored value is the cosine-weighted mean
//! radiance over the texel, so `value * cos(theta_c) * solid_angle` with the
//! texel-center cosine equals the texel's irradiance contribution exactly.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::brdf::{eval_brdf, ShadingFrame};
use crate::io::PfmImage;
use crate::lights::{envmap_through_window, sample_light, LightSample};
use crate::math::{Frame, Ray, Rgb, Vec3};
use crate::scene::{Camera, Scene};

use super::estimator::{
    light_hits, mis_contribution, radiance_from_hit, sample_blocked, trace, LightMode, Strategy, TraceHit, Vertex,
};
use super::rng::PathRng;
use super::{with_pool, RenderConfig, STREAM_ENVMAP};

/// Tiled per-pixel maps: site `(r, c)` occupies rows `r*h_theta..` and
/// columns `c*h_phi..` of each image.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvmapGrid {
    pub rows: usize,
    pub cols: usize,
    pub stride: usize,
    pub h_theta: usize,
    pub h_phi: usize,
    /// Emission reaching the site directly.
    pub direct: PfmImage,
    /// Direct plus indirect radiance.
    pub full: PfmImage,
}

impl EnvmapGrid {
    /// Pixel sampled by site `(r, c)`.
    pub fn site_pixel(&self, r: usize, c: usize) -> (usize, usize) {
        (c * self.stride, r * self.stride)
    }

    pub fn texel_solid_angle(&self) -> f64 {
        texel_solid_angle(self.h_theta, self.h_phi)
    }

    /// Local direction at the texel center (mid-cosine, mid-azimuth).
    pub fn texel_direction(&self, i: usize, j: usize) -> Vec3 {
        let (lo, hi) = cos_bounds(i, self.h_theta);
        let cos = 0.5 * (lo + hi);
        let phi = (j as f64 + 0.5) * 2.0 * PI / self.h_phi as f64;
        let sin = (1.0 - cos * cos).max(0.0).sqrt();
        Vec3::new(sin * phi.cos(), sin * phi.sin(), cos)
    }

    pub fn texel(&self, image: &PfmImage, r: usize, c: usize, i: usize, j: usize) -> Rgb {
        let p = image.rgb(c * self.h_phi + j, r * self.h_theta + i);
        Rgb::new(p[0] as f64, p[1] as f64, p[2] as f64)
    }
}

fn texel_solid_angle(h_theta: usize, h_phi: usize) -> f64 {
    2.0 * PI / (h_theta * h_phi) as f64
}

fn cos_bounds(i: usize, h_theta: usize) -> (f64, f64) {
    let n = h_theta as f64;
    (1.0 - (i as f64 + 1.0) / n, 1.0 - i as f64 / n)
}

/// Texel containing a local direction with `z > 0`.
fn texel_of(local: &Vec3, h_theta: usize, h_phi: usize) -> (usize, usize) {
    let i = (((1.0 - local.z) * h_theta as f64) as usize).min(h_theta - 1);
    let mut phi = local.y.atan2(local.x);
    if phi < 0.0 {
        phi += 2.0 * PI;
    }
    let j = ((phi / (2.0 * PI) * h_phi as f64) as usize).min(h_phi - 1);
    (i, j)
}

/// Uniform direction inside texel `(i, j)`.
fn sample_texel(i: usize, j: usize, h_theta: usize, h_phi: usize, u: [f64; 2]) -> Vec3 {
    let (lo, hi) = cos_bounds(i, h_theta);
    let cos = lo + (hi - lo) * u[0];
    let phi = (j as f64 + u[1]) * 2.0 * PI / h_phi as f64;
    let sin = (1.0 - cos * cos).max(0.0).sqrt();
    Vec3::new(sin * phi.cos(), sin * phi.sin(), cos)
}

/// `integral of cos` over texel row `i`, per texel.
fn texel_cos_integral(i: usize, h_theta: usize, h_phi: usize) -> f64 {
    let (lo, hi) = cos_bounds(i, h_theta);
    (2.0 * PI / h_phi as f64) * 0.5 * (hi * hi - lo * lo)
}

/// Renders the per-pixel envmaps at every `stride`-th pixel.
pub fn render_perpixel_envmaps(scene: &Scene, camera: &Camera, config: &RenderConfig) -> crate::Result<EnvmapGrid> {
    config.validate()?;
    let e = config.envmap;
    let rows = camera.height.div_ceil(e.stride);
    let cols = camera.width.div_ceil(e.stride);
    let texels = e.h_theta * e.h_phi;

    let sites: Vec<(Vec<Rgb>, Vec<Rgb>)> = with_pool(config, || {
        (0..rows * cols)
            .into_par_iter()
            .map(|k| {
                let (r, c) = (k / cols, k % cols);
                let (x, y) = (c * e.stride, r * e.stride);
                site_maps(scene, camera, config, x, y)
            })
            .collect()
    })?;

    let mut direct = PfmImage::new(cols * e.h_phi, rows * e.h_theta, 3);
    let mut full = PfmImage::new(cols * e.h_phi, rows * e.h_theta, 3);
    for (k, (d, f)) in sites.iter().enumerate() {
        let (r, c) = (k / cols, k % cols);
        for t in 0..texels {
            let (i, j) = (t / e.h_phi, t % e.h_phi);
            let (px, py) = (c * e.h_phi + j, r * e.h_theta + i);
            for (ch, (dv, fv)) in d[t].to_array().iter().zip(f[t].to_array()).enumerate() {
                direct.set(px, py, ch, *dv as f32);
                full.set(px, py, ch, fv as f32);
            }
        }
    }
    Ok(EnvmapGrid {
        rows,
        cols,
        stride: e.stride,
        h_theta: e.h_theta,
        h_phi: e.h_phi,
        direct,
        full,
    })
}

fn site_maps(scene: &Scene, camera: &Camera, config: &RenderConfig, x: usize, y: usize) -> (Vec<Rgb>, Vec<Rgb>) {
    let e = config.envmap;
    let (ht, hp) = (e.h_theta, e.h_phi);
    let texels = ht * hp;
    let pixel = (y * camera.width + x) as u64;
    let ray = camera.ray(x, y);
    let mut direct = vec![Rgb::ZERO; texels];
    let mut full = vec![Rgb::ZERO; texels];
    let d_omega = texel_solid_angle(ht, hp);
    let p_u = 1.0 / d_omega;

    match trace(scene, &ray, 0.0) {
        TraceHit::Lamp { .. } => return (direct, full),
        TraceHit::Escape => {
            // frame around the view ray, radiance of the unobstructed environment
            let frame = Frame::from_normal(ray.dir);
            for round in 0..e.samples {
                let rng = PathRng::new(config.seed, STREAM_ENVMAP, pixel, round as u64);
                for t in 0..texels {
                    let (i, j) = (t / hp, t % hp);
                    let local = sample_texel(i, j, ht, hp, rng.fork(t as u64).get_n::<2>(0, 0));
                    let l = envmap_through_window(&scene.lights, &Ray::new(ray.origin, frame.to_world(local)), None);
                    direct[t] += l * (local.z / p_u);
                }
            }
            finish(&mut direct, e.samples, ht, hp);
            full.copy_from_slice(&direct);
            return (direct, full);
        }
        TraceHit::Surface(hit) => {
            let vertex = Vertex::from_hit(scene, &hit, &ray.dir);
            let frame = Frame::from_normal(vertex.shading_normal);
            let lights = &scene.lights;
            let n = lights.len();
            let mode = LightMode::ALL;
            let mut hits = Vec::new();
            let further = config.max_bounces.saturating_sub(1);
            let above = |w: &Vec3| w.dot(&vertex.geometric_normal) > 0.0;

            for round in 0..e.samples {
                let rng = PathRng::new(config.seed, STREAM_ENVMAP, pixel, round as u64);

                if n > 0 {
                    let u = rng.get_n::<4>(0, 0);
                    let index = ((u[0] * n as f64) as usize).min(n - 1);
                    let s = sample_light(lights, index, &vertex.position, [u[1], u[2], u[3]]);
                    let local = frame.to_local(s.dir);
                    if s.is_valid() && local.z > 0.0 && above(&s.dir) && !light_sample_blocked(scene, &vertex, &s) {
                        let (i, j) = texel_of(&local, ht, hp);
                        let c = mis_contribution(s.radiance * local.z, Strategy::Light, s.pdf / n as f64, p_u);
                        direct[i * hp + j] += c;
                        full[i * hp + j] += c;
                    }
                }

                for t in 0..texels {
                    let (i, j) = (t / hp, t % hp);
                    let trng = rng.fork(t as u64 + 1);
                    let local = sample_texel(i, j, ht, hp, trng.get_n::<2>(0, 0));
                    let dir = frame.to_world(local);
                    if !above(&dir) {
                        continue;
                    }
                    let r = Ray::new(vertex.position, dir);
                    let first = trace(scene, &r, scene.shadow_epsilon());
                    if n > 0 {
                        light_hits(scene, &r, Some(&first), mode, &mut hits);
                        for (radiance, p_l) in &hits {
                            let c = mis_contribution(*radiance * local.z, Strategy::Hemisphere, *p_l, p_u);
                            direct[t] += c;
                            full[t] += c;
                        }
                    }
                    if let TraceHit::Surface(h) = first {
                        if further > 0 {
                            let l = radiance_from_hit(scene, &h, &dir, further, &trng, 1, mode);
                            full[t] += l * (local.z / p_u);
                        }
                    }
                }
            }
            finish(&mut direct, e.samples, ht, hp);
            finish(&mut full, e.samples, ht, hp);
        }
    }
    (direct, full)
}

fn light_sample_blocked(scene: &Scene, vertex: &Vertex, s: &LightSample) -> bool {
    sample_blocked(scene, &vertex.position, s.light, &s.dir, &s.point, s.distance)
}

/// Turns per-texel sums of `integral L cos` estimates into cosine-weighted
/// mean radiance.
fn finish(sums: &mut [Rgb], rounds: usize, h_theta: usize, h_phi: usize) {
    for (t, v) in sums.iter_mut().enumerate() {
        let i = t / h_phi;
        *v = *v / (rounds as f64 * texel_cos_integral(i, h_theta, h_phi));
    }
}

/// Rebuilds the reflected radiance at site `(r, c)` from the full map:
/// the sum over texels of `f(v, w_c) L cos(theta_c) solid_angle`.
pub fn reconstruct_site(scene: &Scene, camera: &Camera, grid: &EnvmapGrid, r: usize, c: usize) -> Option<Rgb> {
    let (x, y) = grid.site_pixel(r, c);
    let ray = camera.ray(x, y);
    let TraceHit::Surface(hit) = trace(scene, &ray, 0.0) else {
        return None;
    };
    let vertex = Vertex::from_hit(scene, &hit, &ray.dir);
    let frame = Frame::from_normal(vertex.shading_normal);
    let d_omega = grid.texel_solid_angle();
    let mut sum = Rgb::ZERO;
    for i in 0..grid.h_theta {
        for j in 0..grid.h_phi {
            let local = grid.texel_direction(i, j);
            let wi = frame.to_world(local);
            let f = eval_brdf(&vertex.params, &ShadingFrame::new(vertex.shading_normal, vertex.wo, wi));
            sum += f * grid.texel(&grid.full, r, c, i, j) * (local.z * d_omega);
        }
    }
    Some(sum)
}
