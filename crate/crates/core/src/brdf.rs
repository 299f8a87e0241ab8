//! Simplified microfacet BRDF: Lambertian diffuse plus a GGX lobe with a
//! spherical-Gaussian Schlick Fresnel and Schlick-Smith geometry term.

use std::f64::consts::{FRAC_1_PI, PI};

use crate::math::{Frame, Rgb, Vec3};

/// Fresnel reflectance at normal incidence used for every material.
pub const F0_DEFAULT: f64 = 0.05;

/// Roughness floor applied inside [`eval_brdf`]; keeps the GGX lobe finite.
pub const ROUGHNESS_MIN: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MicrofacetParams {
    /// Diffuse albedo, linear RGB in [0, 1].
    pub albedo: Rgb,
    /// Perceptual roughness in [0, 1].
    pub roughness: f64,
    pub f0: f64,
}

impl MicrofacetParams {
    pub fn new(albedo: Rgb, roughness: f64) -> Self {
        MicrofacetParams {
            albedo,
            roughness,
            f0: F0_DEFAULT,
        }
    }

    pub fn gray(albedo: f64, roughness: f64) -> Self {
        Self::new(Rgb::gray(albedo), roughness)
    }

    pub fn with_f0(mut self, f0: f64) -> Self {
        self.f0 = f0;
        self
    }

    /// Gray-level albedo used by the friction tables.
    pub fn albedo_gray(&self) -> f64 {
        self.albedo.mean()
    }
}

/// Shading normal plus view and light directions, all unit length and
/// pointing away from the surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShadingFrame {
    pub n: Vec3,
    pub v: Vec3,
    pub l: Vec3,
}

impl ShadingFrame {
    pub fn new(n: Vec3, v: Vec3, l: Vec3) -> Self {
        ShadingFrame { n, v, l }
    }

    /// Half vector, `None` when `v = -l`.
    pub fn half(&self) -> Option<Vec3> {
        let h = self.v + self.l;
        let len = h.norm();
        if len <= 1e-12 {
            None
        } else {
            Some(h / len)
        }
    }

    pub fn swapped(&self) -> Self {
        ShadingFrame {
            n: self.n,
            v: self.l,
            l: self.v,
        }
    }
}

/// True where the distribution term degenerates to a Dirac delta.
pub fn d_is_singular(n_dot_h: f64, roughness: f64) -> bool {
    roughness == 0.0 && n_dot_h >= 1.0
}

/// Normal distribution term `R^4 / (pi ((n.h)^2 (R^4 - 1) + 1)^2)`.
///
/// Returns 0 at the singular point `R = 0, n.h = 1` (see [`d_is_singular`]);
/// callers that need a finite lobe clamp roughness first.
pub fn eval_d(n_dot_h: f64, roughness: f64) -> f64 {
    if d_is_singular(n_dot_h, roughness) {
        return 0.0;
    }
    let a2 = roughness.powi(4);
    let denom = n_dot_h * n_dot_h * (a2 - 1.0) + 1.0;
    a2 / (PI * denom * denom)
}

/// Fresnel term `(1 - F0) 2^((-5.55473 v.h - 6.98316) v.h) + F0`.
pub fn eval_f(v_dot_h: f64, f0: f64) -> f64 {
    let e = (-5.55473 * v_dot_h - 6.98316) * v_dot_h;
    (1.0 - f0) * e.exp2() + f0
}

/// One-sided Schlick-Smith geometry term with `k = (R + 1)^2 / 8`.
pub fn eval_g1(n_dot_w: f64, roughness: f64) -> f64 {
    if n_dot_w <= 0.0 {
        return 0.0;
    }
    let k = (roughness + 1.0) * (roughness + 1.0) / 8.0;
    n_dot_w / (n_dot_w * (1.0 - k) + k)
}

/// Full BRDF value in 1/sr. Zero when either direction is below the
/// shading hemisphere.
pub fn eval_brdf(params: &MicrofacetParams, frame: &ShadingFrame) -> Rgb {
    let n_dot_v = frame.n.dot(&frame.v);
    let n_dot_l = frame.n.dot(&frame.l);
    if n_dot_v <= 0.0 || n_dot_l <= 0.0 {
        return Rgb::ZERO;
    }
    let Some(h) = frame.half() else {
        return Rgb::ZERO;
    };
    let roughness = params.roughness.max(ROUGHNESS_MIN);
    let n_dot_h = frame.n.dot(&h).clamp(0.0, 1.0);
    // v.h and l.h agree analytically; averaging keeps l/v swaps bit-exact
    let v_dot_h = (0.5 * (frame.v.dot(&h) + frame.l.dot(&h))).clamp(0.0, 1.0);
    let d = eval_d(n_dot_h, roughness);
    let f = eval_f(v_dot_h, params.f0);
    let g = eval_g1(n_dot_v, roughness) * eval_g1(n_dot_l, roughness);
    let spec = d * f * g / (4.0 * n_dot_l * n_dot_v);
    params.albedo * FRAC_1_PI + Rgb::gray(spec)
}

pub const UNIFORM_HEMISPHERE_PDF: f64 = 1.0 / (2.0 * PI);

/// Uniform direction on the hemisphere around `n`; returns `(direction, pdf)`.
pub fn sample_uniform_hemisphere(n: &Vec3, u: [f64; 2]) -> (Vec3, f64) {
    let z = u[0];
    let r = (1.0 - z * z).max(0.0).sqrt();
    let phi = 2.0 * PI * u[1];
    let local = Vec3::new(r * phi.cos(), r * phi.sin(), z);
    (Frame::from_normal(*n).to_world(local), UNIFORM_HEMISPHERE_PDF)
}

/// Solid-angle pdf of [`sample_uniform_hemisphere`] for `dir`.
pub fn uniform_hemisphere_pdf(n: &Vec3, dir: &Vec3) -> f64 {
    if n.dot(dir) > 0.0 {
        UNIFORM_HEMISPHERE_PDF
    } else {
        0.0
    }
}
