use nalgebra::{Matrix3, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::PointCloud;
use crate::error::{Error, Result};
use crate::math::{Vec3, UP};

/// Largest tilt of an accepted floor normal from world up.
pub const MAX_TILT_DEG: f64 = 10.0;

/// Plane `normal . p = offset` with unit `normal` and `normal.z >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane {
    pub normal: Vec3,
    pub offset: f64,
}

impl Plane {
    pub fn signed_distance(&self, p: &Vec3) -> f64 {
        self.normal.dot(p) - self.offset
    }

    pub fn tilt_deg(&self) -> f64 {
        self.normal.dot(&UP).clamp(-1.0, 1.0).acos().to_degrees()
    }

    fn from_normal_point(normal: Vec3, point: &Vec3) -> Self {
        let n = if normal.z < 0.0 { -normal } else { normal };
        Plane {
            normal: n,
            offset: n.dot(point),
        }
    }
}

pub fn plane_inliers(cloud: &PointCloud, plane: &Plane, threshold: f64) -> Vec<usize> {
    (0..cloud.points.len())
        .filter(|&i| plane.signed_distance(&cloud.points[i]).abs() <= threshold)
        .collect()
}

/// Total least-squares plane through the selected points.
fn refit(cloud: &PointCloud, idx: &[usize]) -> Option<Plane> {
    if idx.len() < 3 {
        return None;
    }
    let n = idx.len() as f64;
    let centroid = idx.iter().map(|&i| cloud.points[i]).sum::<Vec3>() / n;
    let mut cov = Matrix3::zeros();
    for &i in idx {
        let d = cloud.points[i] - centroid;
        cov += d * d.transpose();
    }
    let eig = SymmetricEigen::new(cov);
    let k = eig.eigenvalues.imin();
    let normal = eig.eigenvectors.column(k).into_owned().normalize();
    normal.iter().all(|c| c.is_finite()).then(|| Plane::from_normal_point(normal, &centroid))
}

/// RANSAC over point triples; hypotheses tilted more than
/// [`MAX_TILT_DEG`] from up are rejected. The best consensus set is refit by
/// least squares twice (inliers are recomputed after the first refit).
pub fn fit_floor_plane(cloud: &PointCloud, threshold: f64, iterations: usize, seed: u64) -> Result<Plane> {
    let pts = &cloud.points;
    if pts.len() < 3 {
        return Err(Error::Fit(format!("need at least 3 points, got {}", pts.len())));
    }
    if !(threshold > 0.0) {
        return Err(Error::field("threshold", "must be positive"));
    }
    let min_cos = MAX_TILT_DEG.to_radians().cos();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(usize, Plane)> = None;

    for _ in 0..iterations {
        let i = rng.random_range(0..pts.len());
        let j = rng.random_range(0..pts.len());
        let k = rng.random_range(0..pts.len());
        if i == j || j == k || i == k {
            continue;
        }
        let n = (pts[j] - pts[i]).cross(&(pts[k] - pts[i]));
        let len = n.norm();
        if len <= 1e-12 {
            continue;
        }
        let plane = Plane::from_normal_point(n / len, &pts[i]);
        if plane.normal.z < min_cos {
            continue;
        }
        let count = pts.iter().filter(|p| plane.signed_distance(p).abs() <= threshold).count();
        if best.is_none_or(|(c, _)| count > c) {
            best = Some((count, plane));
        }
    }
    let (_, mut plane) = best.ok_or_else(|| Error::Fit(format!("no plane within {MAX_TILT_DEG} degrees of up")))?;
    for _ in 0..2 {
        let inliers = plane_inliers(cloud, &plane, threshold);
        match refit(cloud, &inliers) {
            Some(p) if p.normal.z >= min_cos => plane = p,
            _ => break,
        }
    }
    Ok(plane)
}
