use crate::error::{Error, Result};
use crate::math::{Ray, Vec3};

/// Pinhole camera. Camera space is x right, y up, z backwards.
#[derive(Debug, Clone, PartialEq)]
pub struct Camera {
    pub position: Vec3,
    pub forward: Vec3,
    pub up: Vec3,
    pub right: Vec3,
    /// Vertical field of view in degrees.
    pub fov_deg: f64,
    pub width: usize,
    pub height: usize,
}

impl Camera {
    pub fn new(position: Vec3, direction: Vec3, up: Vec3, fov_deg: f64, width: usize, height: usize) -> Result<Self> {
        if !(fov_deg > 0.0 && fov_deg < 180.0) {
            return Err(Error::field("camera.fov_deg", format!("{fov_deg} not in (0, 180)")));
        }
        if width == 0 || height == 0 {
            return Err(Error::field("camera.size", "image size must be positive"));
        }
        let len = direction.norm();
        if !(len > 0.0) || !position.iter().all(|c| c.is_finite()) {
            return Err(Error::field("camera.direction", "degenerate pose"));
        }
        let forward = direction / len;
        let right = forward.cross(&up);
        if right.norm() <= 1e-9 * up.norm().max(1e-300) {
            return Err(Error::field("camera.up", "look direction and up are parallel"));
        }
        let right = right.normalize();
        let up = right.cross(&forward);
        Ok(Camera {
            position,
            forward,
            up,
            right,
            fov_deg,
            width,
            height,
        })
    }

    pub fn looking_at(position: Vec3, target: Vec3, up: Vec3, fov_deg: f64, width: usize, height: usize) -> Result<Self> {
        Self::new(position, target - position, up, fov_deg, width, height)
    }

    /// Same pose rendered at a different resolution.
    pub fn with_resolution(&self, width: usize, height: usize) -> Self {
        Camera {
            width,
            height,
            ..self.clone()
        }
    }

    /// Ray through the center of pixel `(x, y)`; row 0 is the top row.
    pub fn ray(&self, x: usize, y: usize) -> Ray {
        self.ray_at(x as f64 + 0.5, y as f64 + 0.5)
    }

    pub fn ray_at(&self, px: f64, py: f64) -> Ray {
        let tan_half = (self.fov_deg.to_radians() * 0.5).tan();
        let aspect = self.width as f64 / self.height as f64;
        let sx = (2.0 * px / self.width as f64 - 1.0) * tan_half * aspect;
        let sy = (1.0 - 2.0 * py / self.height as f64) * tan_half;
        let dir = (self.forward + self.right * sx + self.up * sy).normalize();
        Ray::new(self.position, dir)
    }

    /// World direction to camera space.
    pub fn to_camera(&self, v: &Vec3) -> Vec3 {
        Vec3::new(v.dot(&self.right), v.dot(&self.up), -v.dot(&self.forward))
    }

    /// Depth along the optical axis of a point at distance `t` along `ray`.
    pub fn depth(&self, ray: &Ray, t: f64) -> f64 {
        t * ray.dir.dot(&self.forward)
    }
}
