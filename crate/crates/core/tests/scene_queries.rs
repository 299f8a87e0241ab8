mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use roomgt::math::{Ray, Vec3};
use roomgt::scene::{Bvh, Triangle};

fn brute(tris: &[Triangle], ray: &Ray) -> Option<f64> {
    let mut best: Option<f64> = None;
    for t in tris {
        if let Some((d, _, _)) = t.intersect(ray, 1e-9, f64::INFINITY) {
            if best.is_none_or(|b| d < b) {
                best = Some(d);
            }
        }
    }
    best
}

fn unit(rng: &mut impl Rng) -> Vec3 {
    loop {
        let d = v(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let n = d.norm();
        if n > 1e-3 && n <= 1.0 {
            return d / n;
        }
    }
}

#[test]
fn bvh_agrees_with_brute_force_on_cornell() {
    let scene = cornell();
    let tris: Vec<Triangle> = scene
        .meshes
        .iter()
        .enumerate()
        .flat_map(|(m, mesh)| {
            (0..mesh.indices.len()).map(move |i| {
                let [a, b, c] = mesh.triangle(i);
                Triangle::new(a, b, c, m as u32, i as u32)
            })
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut hits = 0;
    for _ in 0..10_000 {
        let o = v(rng.random_range(-0.5..4.5), rng.random_range(-0.5..4.5), rng.random_range(-0.5..3.5));
        let ray = Ray::new(o, unit(&mut rng));
        let fast = scene.bvh().intersect(&ray, 1e-9, f64::INFINITY).map(|h| h.t);
        assert_eq!(fast, brute(&tris, &ray), "ray {ray:?}");
        hits += fast.is_some() as usize;
    }
    assert!(hits > 5000);
}

#[test]
fn loading_twice_gives_the_same_scene() {
    let a = format!("{:?}", cornell());
    let b = format!("{:?}", cornell());
    assert_eq!(a, b);
}

#[test]
fn occlusion_is_symmetric() {
    let scene = cornell();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut blocked = 0;
    for _ in 0..2000 {
        let mut p = || v(rng.random_range(0.05..3.95), rng.random_range(0.05..3.95), rng.random_range(0.05..2.95));
        let (a, b) = (p(), p());
        let ab = scene.occluded(&a, &b);
        assert_eq!(ab, scene.occluded(&b, &a));
        blocked += ab as usize;
    }
    assert!(blocked > 0);
}

fn tri_strategy() -> impl Strategy<Value = [[f64; 3]; 3]> {
    prop::array::uniform3(prop::array::uniform3(-2.0f64..2.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn bvh_matches_brute_force_on_random_soups(
        soup in prop::collection::vec(tri_strategy(), 1..200),
        seed in any::<u64>(),
    ) {
        let tris: Vec<Triangle> = soup
            .iter()
            .enumerate()
            .map(|(i, [a, b, c])| Triangle::new(Vec3::from(*a), Vec3::from(*b), Vec3::from(*c), 0, i as u32))
            .collect();
        let bvh = Bvh::build(tris.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..64 {
            let o = v(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            let ray = Ray::new(o, unit(&mut rng));
            let fast = bvh.intersect(&ray, 1e-9, f64::INFINITY).map(|h| h.t);
            prop_assert_eq!(fast, brute(&tris, &ray));
            prop_assert_eq!(bvh.any_hit(&ray, 1e-9, f64::INFINITY), fast.is_some());
        }
    }
}
