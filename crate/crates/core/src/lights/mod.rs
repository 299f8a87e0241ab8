//! Window and lamp lights, and the sampling routines the integrator combines
//! with hemisphere sampling.
//!
//! Every pdf here is a solid-angle density at the shading point. Area
//! samples are converted with `dist^2 / (area * |cos|)`.

pub mod blackbody;
pub mod envmap;

use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::math::{Aabb, Ray, Rgb, Vec3};

pub use blackbody::blackbody_rgb;
pub use envmap::EnvMap;

/// Lamp temperatures accepted in scene files.
pub const LAMP_TEMPERATURE_RANGE: (f64, f64) = (4000.0, 8000.0);

const DEGENERATE_COS: f64 = 1e-9;

/// A window opening: a parallelogram through which a distant environment
/// map shines into the room.
#[derive(Debug, Clone)]
pub struct WindowLight {
    pub id: String,
    pub corner: Vec3,
    pub edge_u: Vec3,
    pub edge_v: Vec3,
    pub envmap: EnvMap,
    pub intensity: f64,
}

impl WindowLight {
    pub fn new(id: impl Into<String>, corner: Vec3, edge_u: Vec3, edge_v: Vec3, envmap: EnvMap, intensity: f64) -> Result<Self> {
        let id = id.into();
        if edge_u.cross(&edge_v).norm() <= 1e-12 * edge_u.norm().max(1.0) * edge_v.norm().max(1.0) {
            return Err(Error::field(format!("lights[{id}].edges"), "window edges are zero or parallel"));
        }
        if !(intensity >= 0.0) || !intensity.is_finite() {
            return Err(Error::field(format!("lights[{id}].intensity"), "must be finite and >= 0"));
        }
        Ok(WindowLight {
            id,
            corner,
            edge_u,
            edge_v,
            envmap,
            intensity,
        })
    }

    pub fn area(&self) -> f64 {
        self.edge_u.cross(&self.edge_v).norm()
    }

    pub fn normal(&self) -> Vec3 {
        self.edge_u.cross(&self.edge_v).normalize()
    }

    pub fn center(&self) -> Vec3 {
        self.corner + (self.edge_u + self.edge_v) * 0.5
    }

    /// Radiance entering the room along `dir` (direction of travel away from
    /// the viewer). The map is anchored at the window center, so the lookup
    /// depends on direction only.
    pub fn radiance(&self, dir: &Vec3) -> Rgb {
        self.envmap.lookup(dir) * self.intensity
    }

    /// Parameter of the crossing with the window plane, if inside the opening.
    pub fn intersect(&self, ray: &Ray) -> Option<f64> {
        let n = self.normal();
        let denom = ray.dir.dot(&n);
        if denom.abs() <= DEGENERATE_COS {
            return None;
        }
        let t = (self.corner - ray.origin).dot(&n) / denom;
        if t <= 0.0 {
            return None;
        }
        let local = ray.at(t) - self.corner;
        let (a, b) = self.local_coords(&local);
        if (0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b) {
            Some(t)
        } else {
            None
        }
    }

    fn local_coords(&self, p: &Vec3) -> (f64, f64) {
        let uu = self.edge_u.dot(&self.edge_u);
        let vv = self.edge_v.dot(&self.edge_v);
        let uv = self.edge_u.dot(&self.edge_v);
        let pu = p.dot(&self.edge_u);
        let pv = p.dot(&self.edge_v);
        let det = uu * vv - uv * uv;
        ((pu * vv - pv * uv) / det, (pv * uu - pu * uv) / det)
    }

    pub fn bounds(&self) -> Aabb {
        let mut b = Aabb::empty();
        for p in [
            self.corner,
            self.corner + self.edge_u,
            self.corner + self.edge_v,
            self.corner + self.edge_u + self.edge_v,
        ] {
            b.grow(p);
        }
        b
    }

    fn sample(&self, point: &Vec3, u: [f64; 3]) -> LightSample {
        let target = self.corner + self.edge_u * u[0] + self.edge_v * u[1];
        let d = target - point;
        let dist = d.norm();
        if dist <= 0.0 {
            return LightSample::none();
        }
        let dir = d / dist;
        let cos = self.normal().dot(&dir).abs();
        if cos <= DEGENERATE_COS {
            return LightSample::none();
        }
        LightSample {
            dir,
            distance: dist,
            point: target,
            radiance: self.radiance(&dir),
            pdf: dist * dist / (self.area() * cos),
            light: usize::MAX,
        }
    }

    fn pdf(&self, point: &Vec3, dir: &Vec3) -> f64 {
        match self.intersect(&Ray::new(*point, *dir)) {
            Some(t) => {
                let cos = self.normal().dot(dir).abs();
                t * t / (self.area() * cos)
            }
            None => 0.0,
        }
    }
}

/// A lamp modeled as an emissive oriented box radiating on every face.
#[derive(Debug, Clone)]
pub struct LampLight {
    pub id: String,
    pub center: Vec3,
    pub half_extents: Vec3,
    /// Columns are the box axes in world space.
    pub axes: Matrix3<f64>,
    pub temperature: f64,
    pub intensity: f64,
    emission: Rgb,
}

impl LampLight {
    pub fn new(
        id: impl Into<String>,
        center: Vec3,
        half_extents: Vec3,
        axes: Matrix3<f64>,
        temperature: f64,
        intensity: f64,
    ) -> Result<Self> {
        let id = id.into();
        if half_extents.iter().any(|h| !(*h > 0.0) || !h.is_finite()) {
            return Err(Error::field(format!("lights[{id}].half_extents"), "must be positive"));
        }
        let (lo, hi) = LAMP_TEMPERATURE_RANGE;
        if !(lo..=hi).contains(&temperature) {
            return Err(Error::field(
                format!("lights[{id}].temperature"),
                format!("{temperature} K outside [{lo}, {hi}]"),
            ));
        }
        if !(intensity >= 0.0) || !intensity.is_finite() {
            return Err(Error::field(format!("lights[{id}].intensity"), "must be finite and >= 0"));
        }
        let ortho = axes.transpose() * axes - Matrix3::identity();
        if ortho.abs().max() > 1e-6 {
            return Err(Error::field(format!("lights[{id}].axes"), "axes must be orthonormal"));
        }
        let emission = blackbody_rgb(temperature)? * intensity;
        Ok(LampLight {
            id,
            center,
            half_extents,
            axes,
            temperature,
            intensity,
            emission,
        })
    }

    /// Axis-aligned lamp.
    pub fn aligned(id: impl Into<String>, center: Vec3, half_extents: Vec3, temperature: f64, intensity: f64) -> Result<Self> {
        Self::new(id, center, half_extents, Matrix3::identity(), temperature, intensity)
    }

    /// Emitted radiance, identical on every face and in every direction.
    pub fn emission(&self) -> Rgb {
        self.emission
    }

    fn to_local(&self, p: &Vec3) -> Vec3 {
        self.axes.transpose() * (p - self.center)
    }

    fn face_area(&self, axis: usize) -> f64 {
        let h = self.half_extents;
        match axis {
            0 => 4.0 * h.y * h.z,
            1 => 4.0 * h.x * h.z,
            _ => 4.0 * h.x * h.y,
        }
    }

    /// Faces `(axis, sign)` whose outward side faces `point`, with their areas.
    fn visible_faces(&self, point: &Vec3) -> ([(usize, f64, f64); 3], usize) {
        let local = self.to_local(point);
        let mut out = [(0, 0.0, 0.0); 3];
        let mut n = 0;
        for axis in 0..3 {
            if local[axis] > self.half_extents[axis] {
                out[n] = (axis, 1.0, self.face_area(axis));
                n += 1;
            } else if local[axis] < -self.half_extents[axis] {
                out[n] = (axis, -1.0, self.face_area(axis));
                n += 1;
            }
        }
        (out, n)
    }

    pub fn visible_area(&self, point: &Vec3) -> f64 {
        let (faces, n) = self.visible_faces(point);
        faces[..n].iter().map(|f| f.2).sum()
    }

    /// Nearest entry into the box along the ray: `(t, outward normal)`.
    pub fn intersect(&self, ray: &Ray, t_max: f64) -> Option<(f64, Vec3)> {
        let o = self.to_local(&ray.origin);
        let d = self.axes.transpose() * ray.dir;
        let mut t0 = f64::NEG_INFINITY;
        let mut t1 = f64::INFINITY;
        let mut axis0 = 0;
        let mut sign0 = 1.0;
        for a in 0..3 {
            let h = self.half_extents[a];
            if d[a].abs() < 1e-300 {
                if o[a] < -h || o[a] > h {
                    return None;
                }
                continue;
            }
            let inv = 1.0 / d[a];
            let (mut near, mut far) = ((-h - o[a]) * inv, (h - o[a]) * inv);
            // entering through the -h face when moving in +d
            let mut s = -1.0;
            if near > far {
                std::mem::swap(&mut near, &mut far);
                s = 1.0;
            }
            if near > t0 {
                t0 = near;
                axis0 = a;
                sign0 = s;
            }
            t1 = t1.min(far);
        }
        if t0 > t1 || t0 <= 0.0 || t0 >= t_max {
            return None;
        }
        let mut n_local = Vec3::zeros();
        n_local[axis0] = sign0;
        Some((t0, self.axes * n_local))
    }

    pub fn bounds(&self) -> Aabb {
        let mut b = Aabb::empty();
        for i in 0..8 {
            let s = Vec3::new(
                if i & 1 == 0 { -1.0 } else { 1.0 },
                if i & 2 == 0 { -1.0 } else { 1.0 },
                if i & 4 == 0 { -1.0 } else { 1.0 },
            );
            b.grow(self.center + self.axes * self.half_extents.component_mul(&s));
        }
        b
    }

    fn sample(&self, point: &Vec3, u: [f64; 3]) -> LightSample {
        let (faces, n) = self.visible_faces(point);
        if n == 0 {
            return LightSample::none();
        }
        let total: f64 = faces[..n].iter().map(|f| f.2).sum();
        let mut pick = u[0] * total;
        let mut face = faces[n - 1];
        for f in &faces[..n] {
            if pick < f.2 {
                face = *f;
                break;
            }
            pick -= f.2;
        }
        let (axis, sign, _) = face;
        let (b, c) = ((axis + 1) % 3, (axis + 2) % 3);
        let h = self.half_extents;
        let mut local = Vec3::zeros();
        local[axis] = sign * h[axis];
        local[b] = (2.0 * u[1] - 1.0) * h[b];
        local[c] = (2.0 * u[2] - 1.0) * h[c];
        let target = self.center + self.axes * local;
        let mut n_local = Vec3::zeros();
        n_local[axis] = sign;
        let normal = self.axes * n_local;

        let d = target - point;
        let dist = d.norm();
        if dist <= 0.0 {
            return LightSample::none();
        }
        let dir = d / dist;
        let cos = normal.dot(&dir).abs();
        if cos <= DEGENERATE_COS {
            return LightSample::none();
        }
        LightSample {
            dir,
            distance: dist,
            point: target,
            radiance: self.emission,
            pdf: dist * dist / (total * cos),
            light: usize::MAX,
        }
    }

    fn pdf(&self, point: &Vec3, dir: &Vec3) -> f64 {
        let area = self.visible_area(point);
        if area <= 0.0 {
            return 0.0;
        }
        match self.intersect(&Ray::new(*point, *dir), f64::INFINITY) {
            Some((t, n)) => {
                let cos = n.dot(dir).abs();
                if cos <= DEGENERATE_COS {
                    0.0
                } else {
                    t * t / (area * cos)
                }
            }
            None => 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Light {
    Window(WindowLight),
    Lamp(LampLight),
}

impl Light {
    pub fn id(&self) -> &str {
        match self {
            Light::Window(w) => &w.id,
            Light::Lamp(l) => &l.id,
        }
    }

    pub fn is_window(&self) -> bool {
        matches!(self, Light::Window(_))
    }

    pub fn bounds(&self) -> Aabb {
        match self {
            Light::Window(w) => w.bounds(),
            Light::Lamp(l) => l.bounds(),
        }
    }
}

/// One light-strategy sample seen from a shading point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LightSample {
    /// Unit direction from the shading point toward the light.
    pub dir: Vec3,
    pub distance: f64,
    /// Sampled point on the light surface.
    pub point: Vec3,
    pub radiance: Rgb,
    /// Solid-angle density; 0 marks a degenerate sample.
    pub pdf: f64,
    pub light: usize,
}

impl LightSample {
    fn none() -> Self {
        LightSample {
            dir: Vec3::z(),
            distance: 0.0,
            point: Vec3::zeros(),
            radiance: Rgb::ZERO,
            pdf: 0.0,
            light: usize::MAX,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.pdf > 0.0
    }
}

/// Area-uniform sample on `lights[index]`. Lamps use `u[0]` to pick a
/// visible face; windows ignore it.
pub fn sample_light(lights: &[Light], index: usize, point: &Vec3, u: [f64; 3]) -> LightSample {
    let mut s = match &lights[index] {
        Light::Window(w) => w.sample(point, [u[1], u[2], 0.0]),
        Light::Lamp(l) => l.sample(point, u),
    };
    s.light = index;
    s
}

/// Solid-angle density with which [`sample_light`] produces `dir`.
pub fn pdf_light(light: &Light, point: &Vec3, dir: &Vec3) -> f64 {
    match light {
        Light::Window(w) => w.pdf(point, dir),
        Light::Lamp(l) => l.pdf(point, dir),
    }
}

/// Environment radiance carried by an escaping ray: the sum over windows
/// whose opening the ray crosses. With `only` set, other windows are dark.
pub fn envmap_through_window(lights: &[Light], ray: &Ray, only: Option<usize>) -> Rgb {
    let mut sum = Rgb::ZERO;
    for (i, light) in lights.iter().enumerate() {
        if only.is_some_and(|o| o != i) {
            continue;
        }
        if let Light::Window(w) = light {
            if w.intersect(ray).is_some() {
                sum += w.radiance(&ray.dir);
            }
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn unit_window_above() -> WindowLight {
        WindowLight::new(
            "w",
            Vec3::new(-0.5, -0.5, 1.0),
            Vec3::x(),
            Vec3::y(),
            EnvMap::Constant(Rgb::gray(2.0)),
            1.0,
        )
        .unwrap()
    }

    fn lamp() -> LampLight {
        LampLight::aligned("l", Vec3::new(0.3, -0.2, 2.0), Vec3::new(0.2, 0.3, 0.1), 6000.0, 2.0).unwrap()
    }

    #[test]
    fn lamp_radiance_is_scaled_blackbody() {
        let l = lamp();
        assert_eq!(l.emission(), blackbody_rgb(6000.0).unwrap() * 2.0);
        let lights = vec![Light::Lamp(l)];
        let s = sample_light(&lights, 0, &Vec3::zeros(), [0.3, 0.5, 0.5]);
        assert!(s.is_valid());
        assert_eq!(s.radiance, blackbody_rgb(6000.0).unwrap() * 2.0);
        assert_eq!(s.light, 0);
    }

    #[test]
    fn window_center_pdf_is_one() {
        let lights = vec![Light::Window(unit_window_above())];
        let s = sample_light(&lights, 0, &Vec3::zeros(), [0.0, 0.5, 0.5]);
        assert!((s.pdf - 1.0).abs() < 1e-12);
        assert!((s.dir - Vec3::z()).norm() < 1e-12);
        assert!((pdf_light(&lights[0], &Vec3::zeros(), &Vec3::z()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pdf_matches_sample_pdf() {
        let lights = vec![Light::Window(unit_window_above()), Light::Lamp(lamp())];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = Vec3::new(0.1, 0.2, -0.3);
        for _ in 0..500 {
            for i in 0..2 {
                let s = sample_light(&lights, i, &p, [rng.random(), rng.random(), rng.random()]);
                assert!(s.is_valid());
                let pdf = pdf_light(&lights[i], &p, &s.dir);
                assert!((pdf - s.pdf).abs() <= 1e-9 * s.pdf, "{pdf} vs {}", s.pdf);
            }
        }
    }

    #[test]
    fn missing_direction_has_zero_pdf() {
        let l = Light::Lamp(lamp());
        assert_eq!(pdf_light(&l, &Vec3::zeros(), &-Vec3::z()), 0.0);
        let w = Light::Window(unit_window_above());
        assert_eq!(pdf_light(&w, &Vec3::zeros(), &Vec3::x()), 0.0);
    }

    #[test]
    fn point_inside_lamp_gives_zero_pdf_sample() {
        let lights = vec![Light::Lamp(lamp())];
        let s = sample_light(&lights, 0, &Vec3::new(0.3, -0.2, 2.0), [0.5, 0.5, 0.5]);
        assert!(!s.is_valid());
        assert_eq!(s.radiance, Rgb::ZERO);
    }

    #[test]
    fn pdf_integrates_to_one_over_sphere() {
        // uniform sphere directions, E[pdf / (1/4pi)] = 1
        let p = Vec3::new(0.0, 0.0, 0.0);
        for light in [Light::Window(unit_window_above()), Light::Lamp(lamp())] {
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            let n = 1_000_000;
            let mut sum = 0.0;
            for _ in 0..n {
                let z: f64 = 2.0 * rng.random::<f64>() - 1.0;
                let phi = 2.0 * PI * rng.random::<f64>();
                let r = (1.0 - z * z).sqrt();
                let d = Vec3::new(r * phi.cos(), r * phi.sin(), z);
                sum += pdf_light(&light, &p, &d) * 4.0 * PI;
            }
            let est = sum / n as f64;
            assert!((est - 1.0).abs() < 0.02, "{est}");
        }
    }

    #[test]
    fn envmap_through_window_masks() {
        let w1 = unit_window_above();
        let mut w2 = unit_window_above();
        w2.corner = Vec3::new(3.0, -0.5, 1.0);
        w2.envmap = EnvMap::Constant(Rgb::gray(5.0));
        let lights = vec![Light::Window(w1), Light::Window(w2)];
        let through1 = Ray::new(Vec3::zeros(), Vec3::z());
        assert_eq!(envmap_through_window(&lights, &through1, None), Rgb::gray(2.0));
        assert_eq!(envmap_through_window(&lights, &through1, Some(1)), Rgb::ZERO);
        assert_eq!(envmap_through_window(&lights, &through1, Some(0)), Rgb::gray(2.0));
        let miss = Ray::new(Vec3::zeros(), -Vec3::z());
        assert_eq!(envmap_through_window(&lights, &miss, None), Rgb::ZERO);
    }

    #[test]
    fn lamp_validation() {
        assert!(LampLight::aligned("x", Vec3::zeros(), Vec3::new(0.0, 1.0, 1.0), 5000.0, 1.0).is_err());
        assert!(LampLight::aligned("x", Vec3::zeros(), Vec3::repeat(1.0), 3000.0, 1.0).is_err());
        assert!(LampLight::aligned("x", Vec3::zeros(), Vec3::repeat(1.0), 5000.0, -1.0).is_err());
    }

    #[test]
    fn window_validation() {
        let e = EnvMap::Constant(Rgb::ONE);
        assert!(WindowLight::new("w", Vec3::zeros(), Vec3::x(), Vec3::x() * 2.0, e.clone(), 1.0).is_err());
        assert!(WindowLight::new("w", Vec3::zeros(), Vec3::zeros(), Vec3::y(), e, 1.0).is_err());
    }
}
