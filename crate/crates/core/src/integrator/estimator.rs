use crate::brdf::{eval_brdf, sample_uniform_hemisphere, MicrofacetParams, ShadingFrame, UNIFORM_HEMISPHERE_PDF};
use crate::lights::{envmap_through_window, pdf_light, sample_light, Light};
use crate::math::{Ray, Rgb, Vec3};
use crate::scene::{Scene, SurfaceHit};

use super::rng::PathRng;

/// Which strategy produced a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Light,
    Hemisphere,
}

/// Power-rule MIS combination of one sample:
/// `I P_L^2/(P_L^2+P_U^2) L/P_L + (1-I) P_U^2/(P_L^2+P_U^2) L/P_U`.
pub fn mis_contribution(l: Rgb, strategy: Strategy, p_l: f64, p_u: f64) -> Rgb {
    let (active, other) = match strategy {
        Strategy::Light => (p_l, p_u),
        Strategy::Hemisphere => (p_u, p_l),
    };
    if !(active > 0.0) || !active.is_finite() {
        return Rgb::ZERO;
    }
    let a2 = active * active;
    let weight = a2 / (a2 + other * other);
    l * (weight / active)
}

/// Active light set and shadowing mode for one estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LightMode {
    /// Restrict to one light (index into `scene.lights`).
    pub filter: Option<usize>,
    /// When false, shadow tests are skipped and hemisphere rays only test
    /// the active lights.
    pub occlusion: bool,
}

impl LightMode {
    pub const ALL: LightMode = LightMode {
        filter: None,
        occlusion: true,
    };

    fn active_count(&self, lights: &[Light]) -> usize {
        if self.filter.is_some() {
            1
        } else {
            lights.len()
        }
    }

    fn is_active(&self, index: usize) -> bool {
        self.filter.is_none_or(|f| f == index)
    }
}

/// What a ray hits first: scene geometry, a lamp box, or nothing.
#[derive(Debug, Clone, Copy)]
pub enum TraceHit {
    Surface(SurfaceHit),
    Lamp { light: usize, t: f64, normal: Vec3 },
    Escape,
}

/// Nearest hit among meshes and lamp boxes beyond `t_min`.
pub fn trace(scene: &Scene, ray: &Ray, t_min: f64) -> TraceHit {
    let surface = scene.intersect(ray, t_min, f64::INFINITY);
    let mut best_t = surface.map_or(f64::INFINITY, |h| h.t);
    let mut lamp = None;
    for (i, light) in scene.lights.iter().enumerate() {
        if let Light::Lamp(l) = light {
            if let Some((t, n)) = l.intersect(ray, best_t) {
                if t > t_min {
                    best_t = t;
                    lamp = Some((i, t, n));
                }
            }
        }
    }
    match (lamp, surface) {
        (Some((light, t, normal)), _) => TraceHit::Lamp { light, t, normal },
        (None, Some(h)) => TraceHit::Surface(h),
        (None, None) => TraceHit::Escape,
    }
}

/// A scattering point on a surface.
#[derive(Debug, Clone, Copy)]
pub struct Vertex {
    pub position: Vec3,
    pub shading_normal: Vec3,
    pub geometric_normal: Vec3,
    /// Unit direction toward the previous vertex.
    pub wo: Vec3,
    pub params: MicrofacetParams,
}

impl Vertex {
    pub fn from_hit(scene: &Scene, hit: &SurfaceHit, incoming: &Vec3) -> Self {
        Vertex {
            position: hit.position,
            shading_normal: hit.shading_normal,
            geometric_normal: hit.geometric_normal,
            wo: -incoming,
            params: scene.material_params(hit),
        }
    }

    /// `f * cos` toward `wi`, zero below either hemisphere.
    pub fn reflect(&self, wi: &Vec3) -> Rgb {
        if wi.dot(&self.geometric_normal) <= 0.0 {
            return Rgb::ZERO;
        }
        let cos = wi.dot(&self.shading_normal);
        if cos <= 0.0 {
            return Rgb::ZERO;
        }
        eval_brdf(&self.params, &ShadingFrame::new(self.shading_normal, self.wo, *wi)) * cos
    }

    pub fn hemisphere_pdf(&self, wi: &Vec3) -> f64 {
        if wi.dot(&self.shading_normal) > 0.0 {
            UNIFORM_HEMISPHERE_PDF
        } else {
            0.0
        }
    }
}

/// Emission carried by `ray` from the active lights, each paired with its
/// light-strategy solid-angle pdf (already divided by the active count).
/// With occlusion, `first` is the ray's traced first hit; without it, every
/// active light is tested and geometry is ignored.
pub fn light_hits(scene: &Scene, ray: &Ray, first: Option<&TraceHit>, mode: LightMode, out: &mut Vec<(Rgb, f64)>) {
    out.clear();
    let lights = &scene.lights;
    let n = mode.active_count(lights) as f64;
    let pdf = |i: usize| pdf_light(&lights[i], &ray.origin, &ray.dir) / n;
    match first {
        Some(TraceHit::Lamp { light, .. }) => {
            if let Light::Lamp(l) = &lights[*light] {
                if mode.is_active(*light) {
                    out.push((l.emission(), pdf(*light)));
                }
            }
        }
        Some(TraceHit::Escape) => {
            for (i, light) in lights.iter().enumerate() {
                if let Light::Window(w) = light {
                    if mode.is_active(i) && w.intersect(ray).is_some() {
                        out.push((w.radiance(&ray.dir), pdf(i)));
                    }
                }
            }
        }
        Some(TraceHit::Surface(_)) => {}
        None => {
            for (i, light) in lights.iter().enumerate() {
                if !mode.is_active(i) {
                    continue;
                }
                match light {
                    Light::Lamp(l) => {
                        if l.intersect(ray, f64::INFINITY).is_some() {
                            out.push((l.emission(), pdf(i)));
                        }
                    }
                    Light::Window(w) => {
                        if w.intersect(ray).is_some() {
                            out.push((w.radiance(&ray.dir), pdf(i)));
                        }
                    }
                }
            }
        }
    }
}

/// True when the light-strategy sample toward `target` on light `index`
/// is blocked.
pub(crate) fn sample_blocked(scene: &Scene, from: &Vec3, index: usize, dir: &Vec3, target: &Vec3, distance: f64) -> bool {
    let eps = scene.shadow_epsilon();
    match &scene.lights[index] {
        Light::Lamp(_) => {
            if scene.occluded(from, target) {
                return true;
            }
            let ray = Ray::new(*from, *dir);
            scene.lights.iter().enumerate().any(|(j, l)| match l {
                Light::Lamp(other) if j != index => other.intersect(&ray, distance - eps).is_some_and(|(t, _)| t > eps),
                _ => false,
            })
        }
        // the sample only counts if the ray leaves the scene through the opening
        Light::Window(_) => !matches!(trace(scene, &Ray::new(*from, *dir), eps), TraceHit::Escape),
    }
}

/// Outcome of one MIS step at a vertex.
#[derive(Debug, Clone, Copy)]
pub struct Scatter {
    /// Light-sample plus hemisphere-sample emission contributions.
    pub direct: Rgb,
    /// Surface hit by the hemisphere ray with path weight `f cos / P_U`.
    pub next: Option<(SurfaceHit, Vec3, Rgb)>,
}

/// Uniform values consumed per vertex: light pick, three light-sample
/// coordinates, two hemisphere coordinates.
pub const DIMS_PER_VERTEX: u32 = 6;

/// One light sample and one hemisphere sample, combined with the power rule.
pub fn scatter(scene: &Scene, vertex: &Vertex, u: [f64; 6], mode: LightMode, hits: &mut Vec<(Rgb, f64)>) -> Scatter {
    let lights = &scene.lights;
    let mut direct = Rgb::ZERO;
    let n = mode.active_count(lights);

    if n > 0 {
        let index = match mode.filter {
            Some(f) => f,
            None => ((u[0] * n as f64) as usize).min(n - 1),
        };
        let s = sample_light(lights, index, &vertex.position, [u[1], u[2], u[3]]);
        if s.is_valid() {
            let fcos = vertex.reflect(&s.dir);
            if !fcos.is_black()
                && !(mode.occlusion && sample_blocked(scene, &vertex.position, index, &s.dir, &s.point, s.distance))
            {
                let p_l = s.pdf / n as f64;
                let p_u = vertex.hemisphere_pdf(&s.dir);
                direct += mis_contribution(fcos * s.radiance, Strategy::Light, p_l, p_u);
            }
        }
    }

    let (dir, p_u) = sample_uniform_hemisphere(&vertex.shading_normal, [u[4], u[5]]);
    let fcos = vertex.reflect(&dir);
    if fcos.is_black() {
        return Scatter { direct, next: None };
    }
    let ray = Ray::new(vertex.position, dir);
    let first = mode.occlusion.then(|| trace(scene, &ray, scene.shadow_epsilon()));
    if n > 0 {
        light_hits(scene, &ray, first.as_ref(), mode, hits);
        for (radiance, p_l) in hits.iter() {
            direct += mis_contribution(fcos * *radiance, Strategy::Hemisphere, *p_l, p_u);
        }
    }
    let next = match first {
        Some(TraceHit::Surface(h)) => Some((h, dir, fcos / p_u)),
        _ => None,
    };
    Scatter { direct, next }
}

/// Direct lighting at a shading point: one light-strategy and one
/// hemisphere-strategy sample combined by MIS.
pub fn estimate_direct(scene: &Scene, vertex: &Vertex, rng: &PathRng, bounce: u32, mode: LightMode) -> Rgb {
    let mut hits = Vec::new();
    scatter(scene, vertex, rng.get_n::<6>(bounce, 0), mode, &mut hits).direct
}

/// Radiance arriving along `ray` from the first hit onward with at most
/// `bounces` scattering vertices. Emission seen directly is included;
/// `mode` selects lights and shadowing.
pub fn radiance_along(scene: &Scene, ray: &Ray, bounces: u32, rng: &PathRng, first_bounce: u32, mode: LightMode) -> Rgb {
    match trace(scene, ray, scene.shadow_epsilon()) {
        TraceHit::Surface(h) => radiance_from_hit(scene, &h, &ray.dir, bounces, rng, first_bounce, mode),
        TraceHit::Lamp { light, .. } => match &scene.lights[light] {
            Light::Lamp(l) if mode.is_active(light) => l.emission(),
            _ => Rgb::ZERO,
        },
        TraceHit::Escape => envmap_through_window(&scene.lights, ray, mode.filter),
    }
}

/// Radiance reflected at `hit` back along `-incoming`, using at most
/// `bounces` scattering vertices starting with this one.
pub fn radiance_from_hit(
    scene: &Scene,
    hit: &SurfaceHit,
    incoming: &Vec3,
    bounces: u32,
    rng: &PathRng,
    first_bounce: u32,
    mode: LightMode,
) -> Rgb {
    let mut hits = Vec::new();
    let mut total = Rgb::ZERO;
    let mut throughput = Rgb::ONE;
    let mut vertex = Vertex::from_hit(scene, hit, incoming);
    for b in 0..bounces {
        let u = rng.get_n::<6>(first_bounce + b, 0);
        let s = scatter(scene, &vertex, u, mode, &mut hits);
        total += throughput * s.direct;
        let Some((h, dir, weight)) = s.next else { break };
        throughput = throughput * weight;
        vertex = Vertex::from_hit(scene, &h, &dir);
    }
    total
}
