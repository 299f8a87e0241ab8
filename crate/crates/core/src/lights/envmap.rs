//! Equirectangular environment maps with +z as the zenith.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::io::pfm::PfmImage;
use crate::math::{Rgb, Vec3};

#[derive(Debug, Clone)]
pub enum EnvMap {
    Constant(Rgb),
    Image(Arc<PfmImage>),
}

impl EnvMap {
    /// Radiance arriving from direction `-dir`, i.e. seen when looking along `dir`.
    pub fn lookup(&self, dir: &Vec3) -> Rgb {
        match self {
            EnvMap::Constant(c) => *c,
            EnvMap::Image(img) => {
                let (u, v) = direction_to_uv(dir);
                bilinear_wrap_u(img, u, v)
            }
        }
    }
}

/// `u` follows azimuth counter-clockwise from +x (0.5 at +x); `v` is 0 at the zenith.
pub fn direction_to_uv(dir: &Vec3) -> (f64, f64) {
    let phi = dir.y.atan2(dir.x);
    let theta = dir.z.clamp(-1.0, 1.0).acos();
    (0.5 + phi / (2.0 * PI), theta / PI)
}

pub fn uv_to_direction(u: f64, v: f64) -> Vec3 {
    let phi = (u - 0.5) * 2.0 * PI;
    let theta = v * PI;
    Vec3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos())
}

fn bilinear_wrap_u(img: &PfmImage, u: f64, v: f64) -> Rgb {
    let w = img.width as isize;
    let h = img.height as isize;
    let x = u * img.width as f64 - 0.5;
    let y = v * img.height as f64 - 0.5;
    let x0 = x.floor();
    let y0 = y.floor();
    let fx = x - x0;
    let fy = y - y0;
    let x0 = x0 as isize;
    let y0 = y0 as isize;
    let px = |xi: isize| xi.rem_euclid(w) as usize;
    let py = |yi: isize| yi.clamp(0, h - 1) as usize;
    let fetch = |xi: isize, yi: isize| {
        let p = img.rgb(px(xi), py(yi));
        Rgb::new(p[0] as f64, p[1] as f64, p[2] as f64)
    };
    let top = fetch(x0, y0) * (1.0 - fx) + fetch(x0 + 1, y0) * fx;
    let bottom = fetch(x0, y0 + 1) * (1.0 - fx) + fetch(x0 + 1, y0 + 1) * fx;
    top * (1.0 - fy) + bottom * fy
}
