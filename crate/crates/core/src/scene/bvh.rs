//! Binned-SAH bounding volume hierarchy over triangles.

use crate::math::{Aabb, Ray, Vec3};

const BIN_COUNT: usize = 16;
pub const MAX_LEAF_SIZE: usize = 4;
const TRAVERSAL_COST: f64 = 1.0;
const INTERSECT_COST: f64 = 1.0;

/// Triangle in precomputed edge form.
#[derive(Debug, Clone, Copy)]
pub struct Triangle {
    pub v0: Vec3,
    pub e1: Vec3,
    pub e2: Vec3,
    pub mesh: u32,
    pub index: u32,
}

impl Triangle {
    pub fn new(a: Vec3, b: Vec3, c: Vec3, mesh: u32, index: u32) -> Self {
        Triangle {
            v0: a,
            e1: b - a,
            e2: c - a,
            mesh,
            index,
        }
    }

    pub fn bounds(&self) -> Aabb {
        let mut b = Aabb::empty();
        b.grow(self.v0);
        b.grow(self.v0 + self.e1);
        b.grow(self.v0 + self.e2);
        b
    }

    pub fn centroid(&self) -> Vec3 {
        self.v0 + (self.e1 + self.e2) / 3.0
    }

    /// Möller-Trumbore. Returns `(t, b1, b2)` for hits with `t_min < t < t_max`.
    #[inline]
    pub fn intersect(&self, ray: &Ray, t_min: f64, t_max: f64) -> Option<(f64, f64, f64)> {
        let p = ray.dir.cross(&self.e2);
        let det = self.e1.dot(&p);
        let scale = self.e1.norm() * self.e2.norm();
        if det.abs() <= 1e-12 * scale {
            return None;
        }
        let inv = 1.0 / det;
        let s = ray.origin - self.v0;
        let b1 = s.dot(&p) * inv;
        if !(0.0..=1.0).contains(&b1) {
            return None;
        }
        let q = s.cross(&self.e1);
        let b2 = ray.dir.dot(&q) * inv;
        if b2 < 0.0 || b1 + b2 > 1.0 {
            return None;
        }
        let t = self.e2.dot(&q) * inv;
        if t > t_min && t < t_max {
            Some((t, b1, b2))
        } else {
            None
        }
    }

    pub fn normal(&self) -> Vec3 {
        self.e1.cross(&self.e2).normalize()
    }
}

#[derive(Debug, Clone, Copy)]
struct Node {
    bounds: Aabb,
    /// First primitive for leaves, right child for interior nodes.
    offset: u32,
    /// Primitive count; 0 marks an interior node whose left child is `self + 1`.
    count: u32,
    axis: u8,
}

/// Closest hit returned by the hierarchy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BvhHit {
    pub t: f64,
    pub b1: f64,
    pub b2: f64,
    /// Index into [`Bvh::triangles`].
    pub prim: usize,
}

#[derive(Debug, Clone)]
pub struct Bvh {
    nodes: Vec<Node>,
    triangles: Vec<Triangle>,
}

struct BuildItem {
    bounds: Aabb,
    centroid: Vec3,
    tri: Triangle,
}

impl Bvh {
    pub fn build(triangles: Vec<Triangle>) -> Self {
        let mut items: Vec<BuildItem> = triangles
            .into_iter()
            .map(|tri| BuildItem {
                bounds: tri.bounds(),
                centroid: tri.centroid(),
                tri,
            })
            .collect();
        let mut nodes = Vec::with_capacity(items.len().max(1) * 2);
        if !items.is_empty() {
            let n = items.len();
            build_recursive(&mut items, 0, n, &mut nodes);
        }
        Bvh {
            nodes,
            triangles: items.into_iter().map(|i| i.tri).collect(),
        }
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn bounds(&self) -> Aabb {
        self.nodes.first().map(|n| n.bounds).unwrap_or_else(Aabb::empty)
    }

    pub fn intersect(&self, ray: &Ray, t_min: f64, t_max: f64) -> Option<BvhHit> {
        let mut best: Option<BvhHit> = None;
        let mut closest = t_max;
        self.walk(ray, t_min, &mut closest, |prim, tri, lo, hi| {
            if let Some((t, b1, b2)) = tri.intersect(ray, lo, hi) {
                best = Some(BvhHit { t, b1, b2, prim });
                return Some(t);
            }
            None
        });
        best
    }

    pub fn any_hit(&self, ray: &Ray, t_min: f64, t_max: f64) -> bool {
        let mut found = false;
        let mut limit = t_max;
        self.walk(ray, t_min, &mut limit, |_, tri, lo, hi| {
            if tri.intersect(ray, lo, hi).is_some() {
                found = true;
                // collapse the interval to stop traversal
                return Some(f64::NEG_INFINITY);
            }
            None
        });
        found
    }

    /// Front-to-back traversal. `visit` returns a new upper bound on a hit.
    fn walk<F>(&self, ray: &Ray, t_min: f64, t_max: &mut f64, mut visit: F)
    where
        F: FnMut(usize, &Triangle, f64, f64) -> Option<f64>,
    {
        if self.nodes.is_empty() {
            return;
        }
        let inv_dir = ray.dir.map(|c| 1.0 / c);
        let neg = [inv_dir.x < 0.0, inv_dir.y < 0.0, inv_dir.z < 0.0];
        let mut stack: Vec<u32> = Vec::with_capacity(64);
        let mut idx = 0usize;
        loop {
            let node = &self.nodes[idx];
            if node.bounds.hit(&ray.origin, &inv_dir, t_min, *t_max).is_some() {
                if node.count > 0 {
                    let start = node.offset as usize;
                    for prim in start..start + node.count as usize {
                        if let Some(t) = visit(prim, &self.triangles[prim], t_min, *t_max) {
                            *t_max = t;
                            if t < t_min {
                                return;
                            }
                        }
                    }
                } else {
                    let (first, second) = if neg[node.axis as usize] {
                        (node.offset as usize, idx + 1)
                    } else {
                        (idx + 1, node.offset as usize)
                    };
                    stack.push(second as u32);
                    idx = first;
                    continue;
                }
            }
            match stack.pop() {
                Some(next) => idx = next as usize,
                None => break,
            }
        }
    }
}

fn build_recursive(items: &mut [BuildItem], start: usize, end: usize, nodes: &mut Vec<Node>) -> usize {
    let node_index = nodes.len();
    let mut bounds = Aabb::empty();
    let mut centroid_bounds = Aabb::empty();
    for it in &items[start..end] {
        bounds = bounds.union(&it.bounds);
        centroid_bounds.grow(it.centroid);
    }
    nodes.push(Node {
        bounds,
        offset: start as u32,
        count: (end - start) as u32,
        axis: 0,
    });
    let count = end - start;
    if count <= MAX_LEAF_SIZE {
        return node_index;
    }

    let extent = centroid_bounds.extent();
    let axis = if extent.x >= extent.y && extent.x >= extent.z {
        0
    } else if extent.y >= extent.z {
        1
    } else {
        2
    };

    let mid = if extent[axis] <= 0.0 {
        // all centroids coincide: split in the middle
        start + count / 2
    } else {
        match sah_split(&items[start..end], &centroid_bounds, axis, bounds.surface_area()) {
            Some(split) => {
                let lo = centroid_bounds.min[axis];
                let scale = BIN_COUNT as f64 / extent[axis];
                let slice = &mut items[start..end];
                let mut left = 0;
                for i in 0..slice.len() {
                    if bin_index(slice[i].centroid[axis], lo, scale) < split {
                        slice.swap(i, left);
                        left += 1;
                    }
                }
                start + left
            }
            None => start + count / 2,
        }
    };
    let mid = if mid == start || mid == end { start + count / 2 } else { mid };

    build_recursive(items, start, mid, nodes);
    let right = build_recursive(items, mid, end, nodes);
    let node = &mut nodes[node_index];
    node.offset = right as u32;
    node.count = 0;
    node.axis = axis as u8;
    node_index
}

#[inline]
fn bin_index(c: f64, lo: f64, scale: f64) -> usize {
    (((c - lo) * scale) as usize).min(BIN_COUNT - 1)
}

/// Best bin boundary along `axis`, or `None` when no split beats a leaf.
fn sah_split(items: &[BuildItem], centroid_bounds: &Aabb, axis: usize, parent_area: f64) -> Option<usize> {
    let lo = centroid_bounds.min[axis];
    let scale = BIN_COUNT as f64 / centroid_bounds.extent()[axis];
    let mut bin_bounds = [Aabb::empty(); BIN_COUNT];
    let mut bin_counts = [0usize; BIN_COUNT];
    for it in items {
        let b = bin_index(it.centroid[axis], lo, scale);
        bin_counts[b] += 1;
        bin_bounds[b] = bin_bounds[b].union(&it.bounds);
    }

    let mut right_area = [0.0; BIN_COUNT];
    let mut right_count = [0usize; BIN_COUNT];
    let mut acc = Aabb::empty();
    let mut n = 0;
    for i in (1..BIN_COUNT).rev() {
        acc = acc.union(&bin_bounds[i]);
        n += bin_counts[i];
        right_area[i] = acc.surface_area();
        right_count[i] = n;
    }

    let mut best = None;
    let mut best_cost = INTERSECT_COST * items.len() as f64;
    let mut acc = Aabb::empty();
    let mut n = 0;
    for split in 1..BIN_COUNT {
        acc = acc.union(&bin_bounds[split - 1]);
        n += bin_counts[split - 1];
        if n == 0 || right_count[split] == 0 {
            continue;
        }
        let cost = TRAVERSAL_COST
            + INTERSECT_COST * (acc.surface_area() * n as f64 + right_area[split] * right_count[split] as f64)
                / parent_area.max(1e-300);
        if cost < best_cost {
            best_cost = cost;
            best = Some(split);
        }
    }
    // leaves are capped, so a split is forced even when SAH prefers a leaf
    best.or_else(|| {
        let mut n = 0;
        for split in 1..BIN_COUNT {
            n += bin_counts[split - 1];
            if n > 0 && n < items.len() {
                return Some(split);
            }
        }
        None
    })
}
