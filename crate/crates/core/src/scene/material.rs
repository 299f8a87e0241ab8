use std::sync::Arc;

use crate::brdf::MicrofacetParams;
use crate::io::pfm::PfmImage;
use crate::math::{Rgb, Vec3};

#[derive(Debug, Clone)]
pub enum ColorSource {
    Constant(Rgb),
    Texture(Arc<PfmImage>),
}

#[derive(Debug, Clone)]
pub enum ScalarSource {
    Constant(f64),
    /// First channel of the image is used.
    Texture(Arc<PfmImage>),
}

/// Spatially varying microfacet material.
#[derive(Debug, Clone)]
pub struct SvBrdfMaterial {
    pub id: String,
    pub albedo: ColorSource,
    pub roughness: ScalarSource,
    /// Tangent-space normals encoded as `0.5 * n + 0.5`.
    pub normal_map: Option<Arc<PfmImage>>,
    pub uv_scale: [f64; 2],
}

impl SvBrdfMaterial {
    pub fn constant(id: impl Into<String>, albedo: Rgb, roughness: f64) -> Self {
        SvBrdfMaterial {
            id: id.into(),
            albedo: ColorSource::Constant(albedo),
            roughness: ScalarSource::Constant(roughness),
            normal_map: None,
            uv_scale: [1.0, 1.0],
        }
    }

    fn scaled(&self, uv: [f64; 2]) -> [f64; 2] {
        [uv[0] * self.uv_scale[0], uv[1] * self.uv_scale[1]]
    }

    /// Tangent-space normal from the normal map, if any.
    pub fn tangent_normal(&self, uv: [f64; 2]) -> Option<Vec3> {
        let map = self.normal_map.as_ref()?;
        let c = bilinear_repeat(map, self.scaled(uv));
        let n = Vec3::new(2.0 * c[0] - 1.0, 2.0 * c[1] - 1.0, 2.0 * c[2] - 1.0);
        let len = n.norm();
        (len > 1e-12).then(|| n / len)
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.albedo, ColorSource::Constant(_)) && matches!(self.roughness, ScalarSource::Constant(_))
    }
}

/// Albedo and roughness at `uv`: bilinear filtering with repeat addressing,
/// results clamped to [0, 1].
pub fn sample_material(material: &SvBrdfMaterial, uv: [f64; 2]) -> MicrofacetParams {
    let uv = material.scaled(uv);
    let albedo = match &material.albedo {
        ColorSource::Constant(c) => *c,
        ColorSource::Texture(img) => Rgb::from_array(bilinear_repeat(img, uv)),
    };
    let roughness = match &material.roughness {
        ScalarSource::Constant(r) => *r,
        ScalarSource::Texture(img) => bilinear_repeat(img, uv)[0],
    };
    MicrofacetParams::new(albedo.clamp01(), roughness.clamp(0.0, 1.0))
}

/// Bilinear lookup with texel centers at `(i + 0.5) / w`; `v = 0` is the
/// bottom row of the image.
pub fn bilinear_repeat(img: &PfmImage, uv: [f64; 2]) -> [f64; 3] {
    let w = img.width as i64;
    let h = img.height as i64;
    let x = uv[0] * img.width as f64 - 0.5;
    let y = (1.0 - uv[1]) * img.height as f64 - 0.5;
    let (x0, y0) = (x.floor(), y.floor());
    let (fx, fy) = (x - x0, y - y0);
    let (x0, y0) = (x0 as i64, y0 as i64);
    let fetch = |xi: i64, yi: i64| img.rgb(xi.rem_euclid(w) as usize, yi.rem_euclid(h) as usize);
    let mut out = [0.0; 3];
    let p00 = fetch(x0, y0);
    let p10 = fetch(x0 + 1, y0);
    let p01 = fetch(x0, y0 + 1);
    let p11 = fetch(x0 + 1, y0 + 1);
    for c in 0..3 {
        let top = p00[c] as f64 * (1.0 - fx) + p10[c] as f64 * fx;
        let bottom = p01[c] as f64 * (1.0 - fx) + p11[c] as f64 * fx;
        out[c] = top * (1.0 - fy) + bottom * fy;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn checker(w: usize, h: usize) -> Arc<PfmImage> {
        let mut img = PfmImage::new(w, h, 3);
        for y in 0..h {
            for x in 0..w {
                img.set(x, y, 0, (x as f32 + 1.0) / (w as f32 + 1.0));
                img.set(x, y, 1, (y as f32 + 1.0) / (h as f32 + 1.0));
                img.set(x, y, 2, ((x + y) % 2) as f32);
            }
        }
        Arc::new(img)
    }

    #[test]
    fn constant_passes_through() {
        let m = SvBrdfMaterial::constant("c", Rgb::gray(0.5), 0.4);
        for uv in [[0.0, 0.0], [0.3, 17.2], [-4.0, 0.5]] {
            let p = sample_material(&m, uv);
            assert_eq!(p.albedo, Rgb::gray(0.5));
            assert_eq!(p.roughness, 0.4);
        }
    }

    #[test]
    fn texel_center_returns_texel() {
        let tex = checker(2, 2);
        let mut m = SvBrdfMaterial::constant("t", Rgb::ONE, 0.5);
        m.albedo = ColorSource::Texture(tex.clone());
        // texel (1, 0) is the top-right one: u = 0.75, v = 0.75
        let p = sample_material(&m, [0.75, 0.75]);
        let expected = tex.rgb(1, 0);
        assert!((p.albedo.r - expected[0] as f64).abs() < 1e-12);
        assert!((p.albedo.g - expected[1] as f64).abs() < 1e-12);
        assert!((p.albedo.b - expected[2] as f64).abs() < 1e-12);
    }

    #[test]
    fn repeat_wrap() {
        let mut m = SvBrdfMaterial::constant("t", Rgb::ONE, 0.5);
        m.albedo = ColorSource::Texture(checker(4, 4));
        let a = sample_material(&m, [1.25, -0.25]);
        let b = sample_material(&m, [0.25, 0.75]);
        assert_eq!(a, b);
    }

    #[test]
    fn out_of_range_texels_are_clamped() {
        let mut img = PfmImage::new(1, 1, 3);
        img.data.copy_from_slice(&[2.0, -1.0, 0.5]);
        let mut rough = PfmImage::new(1, 1, 1);
        rough.data[0] = 1.5;
        let mut m = SvBrdfMaterial::constant("t", Rgb::ONE, 0.5);
        m.albedo = ColorSource::Texture(Arc::new(img));
        m.roughness = ScalarSource::Texture(Arc::new(rough));
        let p = sample_material(&m, [0.2, 0.2]);
        assert_eq!(p.albedo, Rgb::new(1.0, 0.0, 0.5));
        assert_eq!(p.roughness, 1.0);
    }

    proptest! {
        #[test]
        fn samples_stay_in_range(u in -10.0f64..10.0, v in -10.0f64..10.0) {
            let mut m = SvBrdfMaterial::constant("t", Rgb::ONE, 0.5);
            m.albedo = ColorSource::Texture(checker(3, 5));
            m.roughness = ScalarSource::Texture(checker(2, 2));
            let p = sample_material(&m, [u, v]);
            for c in p.albedo.to_array() {
                prop_assert!((0.0..=1.0).contains(&c));
            }
            prop_assert!((0.0..=1.0).contains(&p.roughness));
        }
    }
}
