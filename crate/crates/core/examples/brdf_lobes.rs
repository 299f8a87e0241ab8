//! Evaluate the microfacet BRDF and its directional albedo for a few
//! roughness values.

use std::f64::consts::PI;

use roomgt::brdf::{eval_brdf, MicrofacetParams, ShadingFrame};
use roomgt::math::Vec3;

fn dir(theta_deg: f64, phi: f64) -> Vec3 {
    let t = theta_deg.to_radians();
    Vec3::new(t.sin() * phi.cos(), t.sin() * phi.sin(), t.cos())
}

/// Midpoint quadrature of f cos over the hemisphere.
fn albedo(params: &MicrofacetParams, v: Vec3) -> f64 {
    let (nt, np) = (128, 256);
    let mut sum = 0.0;
    for i in 0..nt {
        let th = (i as f64 + 0.5) / nt as f64 * PI / 2.0;
        for j in 0..np {
            let ph = (j as f64 + 0.5) / np as f64 * 2.0 * PI;
            let l = Vec3::new(th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos());
            let f = eval_brdf(params, &ShadingFrame::new(Vec3::z(), v, l));
            sum += f.r * th.cos() * th.sin();
        }
    }
    sum * (PI / 2.0 / nt as f64) * (2.0 * PI / np as f64)
}

fn main() {
    let v = dir(45.0, 0.0);
    println!("{:>6} {:>12} {:>12} {:>10}", "R", "f(mirror)", "f(side)", "albedo");
    for r in [0.1, 0.3, 0.6, 1.0] {
        let p = MicrofacetParams::gray(0.5, r);
        let mirror = eval_brdf(&p, &ShadingFrame::new(Vec3::z(), v, dir(45.0, PI)));
        let side = eval_brdf(&p, &ShadingFrame::new(Vec3::z(), v, dir(45.0, PI / 2.0)));
        println!("{r:>6.1} {:>12.4} {:>12.4} {:>10.4}", mirror.r, side.r, albedo(&p, v));
    }
}
