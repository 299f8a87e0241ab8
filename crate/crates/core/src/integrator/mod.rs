//! MIS path tracer and ground-truth channel stack.

mod channels;
pub mod config;
pub mod envmaps;
pub mod estimator;
pub mod rng;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::io::PfmImage;
use crate::lights::{envmap_through_window, Light};
use crate::math::{Ray, Rgb};
use crate::scene::{Camera, Scene};

pub use channels::{ChannelEntry, EnvmapEntry, Manifest, MANIFEST_FILE};
pub use config::{ChannelFlags, EnvmapConfig, RenderConfig, DEFAULT_MAX_BOUNCES};
pub use envmaps::{reconstruct_site, render_perpixel_envmaps, EnvmapGrid};
pub use estimator::{
    estimate_direct, mis_contribution, radiance_along, radiance_from_hit, trace, LightMode, Strategy, TraceHit,
    Vertex,
};
pub use rng::PathRng;

pub(crate) const STREAM_RADIANCE: u64 = 1;
pub(crate) const STREAM_DIRECT: u64 = 2;
pub(crate) const STREAM_PER_LIGHT: u64 = 3;
pub(crate) const STREAM_ENVMAP: u64 = 4;

/// Per-pixel Monte Carlo mean with its standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub mean: PfmImage,
    pub stderr: PfmImage,
}

impl Estimate {
    fn new(width: usize, height: usize) -> Self {
        Estimate {
            mean: PfmImage::new(width, height, 3),
            stderr: PfmImage::new(width, height, 3),
        }
    }

    fn set(&mut self, x: usize, y: usize, acc: &Accum, n: usize) {
        let (m, e) = acc.finish(n);
        for c in 0..3 {
            self.mean.set(x, y, c, m[c] as f32);
            self.stderr.set(x, y, c, e[c] as f32);
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Accum {
    sum: [f64; 3],
    sq: [f64; 3],
}

impl Accum {
    fn add(&mut self, v: Rgb) {
        for (c, x) in v.to_array().into_iter().enumerate() {
            self.sum[c] += x;
            self.sq[c] += x * x;
        }
    }

    fn finish(&self, n: usize) -> ([f64; 3], [f64; 3]) {
        let nf = n as f64;
        let mut mean = [0.0; 3];
        let mut err = [0.0; 3];
        for c in 0..3 {
            mean[c] = self.sum[c] / nf;
            if n > 1 {
                let var = ((self.sq[c] - self.sum[c] * mean[c]) / (nf - 1.0)).max(0.0);
                err[c] = (var / nf).sqrt();
            }
        }
        (mean, err)
    }
}

/// First-hit channels.
#[derive(Debug, Clone, PartialEq)]
pub struct GBuffer {
    pub albedo: PfmImage,
    /// Camera-space shading normal encoded as `0.5 n + 0.5`; 0 on misses.
    pub normal: PfmImage,
    /// Distance along the optical axis in meters; 0 on misses.
    pub depth: PfmImage,
    pub roughness: PfmImage,
    /// Mesh instance id; 0 for misses and lamps.
    pub instance_mask: PfmImage,
    /// `1 + light index` where the pixel sees a lamp, a window opening or
    /// a mesh linked to a light; 0 elsewhere.
    pub light_mask: PfmImage,
}

/// Direct shading of one light with and without shadowing.
#[derive(Debug, Clone, PartialEq)]
pub struct PerLightChannels {
    pub light_index: usize,
    pub light_id: String,
    pub occluded: Estimate,
    pub unoccluded: Estimate,
    /// Ratio of the two shadings (channel sums); 1 where the unoccluded
    /// shading is zero.
    pub visibility: PfmImage,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub width: usize,
    pub height: usize,
    pub radiance: Estimate,
    pub gbuffer: Option<GBuffer>,
    /// Direct shading with all lights and shadowing.
    pub direct: Option<Estimate>,
    pub per_light: Vec<PerLightChannels>,
    pub envmaps: Option<EnvmapGrid>,
}

/// Runs `f` on a pool sized by the config, or the global pool.
pub(crate) fn with_pool<T: Send>(config: &RenderConfig, f: impl FnOnce() -> T + Send) -> Result<T> {
    match config.thread_count() {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

struct PixelOut {
    radiance: Accum,
    albedo: Rgb,
    normal: Rgb,
    depth: f64,
    roughness: f64,
    instance: u32,
    light_mask: usize,
    direct: Accum,
    per_light: Vec<(Accum, Accum)>,
}

pub fn light_filter_index(scene: &Scene, config: &RenderConfig) -> Result<Option<usize>> {
    match &config.light_filter {
        Some(id) => scene.light_index(id).map(Some).ok_or_else(|| Error::Reference {
            kind: "light",
            id: id.clone(),
        }),
        None => Ok(None),
    }
}

/// Renders the full channel stack for one camera.
pub fn render(scene: &Scene, camera: &Camera, config: &RenderConfig) -> Result<ChannelSet> {
    config.validate()?;
    let filter = light_filter_index(scene, config)?;
    let radiance_mode = LightMode {
        filter,
        occlusion: config.occlusion,
    };
    let per_light: Vec<usize> = if config.channels.per_light {
        match filter {
            Some(i) => vec![i],
            None => (0..scene.lights.len()).collect(),
        }
    } else {
        Vec::new()
    };
    let (w, h) = (camera.width, camera.height);

    let rows: Vec<Vec<PixelOut>> = with_pool(config, || {
        (0..h)
            .into_par_iter()
            .map(|y| {
                (0..w)
                    .map(|x| render_pixel(scene, camera, config, x, y, radiance_mode, &per_light))
                    .collect()
            })
            .collect()
    })?;

    let spp = config.spp;
    let mut radiance = Estimate::new(w, h);
    let mut direct = Estimate::new(w, h);
    let mut g = GBuffer {
        albedo: PfmImage::new(w, h, 3),
        normal: PfmImage::new(w, h, 3),
        depth: PfmImage::new(w, h, 1),
        roughness: PfmImage::new(w, h, 1),
        instance_mask: PfmImage::new(w, h, 1),
        light_mask: PfmImage::new(w, h, 1),
    };
    let mut lights: Vec<PerLightChannels> = per_light
        .iter()
        .map(|&i| PerLightChannels {
            light_index: i,
            light_id: scene.lights[i].id().to_string(),
            occluded: Estimate::new(w, h),
            unoccluded: Estimate::new(w, h),
            visibility: PfmImage::new(w, h, 1),
        })
        .collect();

    for (y, row) in rows.iter().enumerate() {
        for (x, p) in row.iter().enumerate() {
            radiance.set(x, y, &p.radiance, spp);
            direct.set(x, y, &p.direct, spp);
            for c in 0..3 {
                g.albedo.set(x, y, c, p.albedo.to_array()[c] as f32);
                g.normal.set(x, y, c, p.normal.to_array()[c] as f32);
            }
            g.depth.set(x, y, 0, p.depth as f32);
            g.roughness.set(x, y, 0, p.roughness as f32);
            g.instance_mask.set(x, y, 0, p.instance as f32);
            g.light_mask.set(x, y, 0, p.light_mask as f32);
            for (ch, (occ, unocc)) in lights.iter_mut().zip(&p.per_light) {
                ch.occluded.set(x, y, occ, spp);
                ch.unoccluded.set(x, y, unocc, spp);
                let with: f64 = occ.sum.iter().sum();
                let without: f64 = unocc.sum.iter().sum();
                let vis = if without > 0.0 { (with / without).clamp(0.0, 1.0) } else { 1.0 };
                ch.visibility.set(x, y, 0, vis as f32);
            }
        }
    }

    let envmaps = if config.channels.envmaps {
        Some(render_perpixel_envmaps(scene, camera, config)?)
    } else {
        None
    };

    Ok(ChannelSet {
        width: w,
        height: h,
        radiance,
        gbuffer: config.channels.gbuffer.then_some(g),
        direct: config.channels.per_light.then_some(direct),
        per_light: lights,
        envmaps,
    })
}

fn render_pixel(
    scene: &Scene,
    camera: &Camera,
    config: &RenderConfig,
    x: usize,
    y: usize,
    mode: LightMode,
    per_light: &[usize],
) -> PixelOut {
    let ray = camera.ray(x, y);
    let pixel = (y * camera.width + x) as u64;
    let first = trace(scene, &ray, 0.0);
    let mut out = PixelOut {
        radiance: Accum::default(),
        albedo: Rgb::ZERO,
        normal: Rgb::ZERO,
        depth: 0.0,
        roughness: 0.0,
        instance: 0,
        light_mask: 0,
        direct: Accum::default(),
        per_light: vec![(Accum::default(), Accum::default()); per_light.len()],
    };
    let encode = |n: &crate::math::Vec3| {
        let c = camera.to_camera(n);
        Rgb::new(0.5 * c.x + 0.5, 0.5 * c.y + 0.5, 0.5 * c.z + 0.5)
    };

    match first {
        TraceHit::Lamp { light, t, normal } => {
            out.depth = camera.depth(&ray, t);
            out.normal = encode(&normal);
            out.light_mask = light + 1;
            let emitted = match &scene.lights[light] {
                Light::Lamp(l) if mode.filter.is_none_or(|f| f == light) => l.emission(),
                _ => Rgb::ZERO,
            };
            for _ in 0..config.spp {
                out.radiance.add(emitted);
            }
        }
        TraceHit::Escape => {
            out.light_mask = window_crossed(scene, &ray).map_or(0, |i| i + 1);
            let env = envmap_through_window(&scene.lights, &ray, mode.filter);
            for _ in 0..config.spp {
                out.radiance.add(env);
            }
        }
        TraceHit::Surface(hit) => {
            let vertex = Vertex::from_hit(scene, &hit, &ray.dir);
            out.albedo = vertex.params.albedo;
            out.roughness = vertex.params.roughness;
            out.normal = encode(&hit.shading_normal);
            out.depth = camera.depth(&ray, hit.t);
            out.instance = hit.instance_id;
            out.light_mask = hit.light.map_or(0, |i| i + 1);
            let bounces = config.radiance_bounces();
            for s in 0..config.spp as u64 {
                let rng = PathRng::new(config.seed, STREAM_RADIANCE, pixel, s);
                out.radiance
                    .add(radiance_from_hit(scene, &hit, &ray.dir, bounces, &rng, 0, mode));
            }
            if config.channels.per_light {
                for s in 0..config.spp as u64 {
                    let rng = PathRng::new(config.seed, STREAM_DIRECT, pixel, s);
                    out.direct.add(estimate_direct(scene, &vertex, &rng, 0, LightMode::ALL));
                }
                for (k, &i) in per_light.iter().enumerate() {
                    for s in 0..config.spp as u64 {
                        // shared stream: both estimates see identical samples
                        let rng = PathRng::new(config.seed, STREAM_PER_LIGHT, pixel, s);
                        let occ = LightMode {
                            filter: Some(i),
                            occlusion: true,
                        };
                        let unocc = LightMode {
                            filter: Some(i),
                            occlusion: false,
                        };
                        out.per_light[k].0.add(estimate_direct(scene, &vertex, &rng, 0, occ));
                        out.per_light[k].1.add(estimate_direct(scene, &vertex, &rng, 0, unocc));
                    }
                }
            }
        }
    }
    out
}

fn window_crossed(scene: &Scene, ray: &Ray) -> Option<usize> {
    scene
        .lights
        .iter()
        .position(|l| matches!(l, Light::Window(w) if w.intersect(ray).is_some()))
}
