//! Synthetic L-shaped room scan: floor plane, top-down grid, polygon,
//! door segments and metrics against the true outline.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use roomgt::layout::{
    assign_openings, eval_layout, fit_floor_plane, polygonize, project_topdown, LayoutPolygon, PointCloud, LABEL_DOOR,
};
use roomgt::math::Vec3;

fn main() -> roomgt::Result<()> {
    let truth = vec![[0.0, 0.0], [4.0, 0.0], [4.0, 2.0], [2.0, 2.0], [2.0, 4.0], [0.0, 4.0]];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut points, mut labels) = (Vec::new(), Vec::new());
    while points.len() < 20_000 {
        let (x, y): (f64, f64) = (rng.random_range(0.0..4.0), rng.random_range(0.0..4.0));
        if x > 2.0 && y > 2.0 {
            continue;
        }
        points.push(Vec3::new(x, y, 0.02 + rng.random_range(-0.005..0.005)));
        labels.push(0);
    }
    // a door in the bottom wall, and some clutter
    for _ in 0..200 {
        points.push(Vec3::new(rng.random_range(1.0..1.9), 0.01, rng.random_range(0.1..2.0)));
        labels.push(LABEL_DOOR);
    }
    for _ in 0..2000 {
        points.push(Vec3::new(rng.random_range(0.0..2.0), rng.random_range(0.0..4.0), rng.random_range(0.3..2.5)));
        labels.push(0);
    }
    let cloud = PointCloud { points, labels: Some(labels) };

    let plane = fit_floor_plane(&cloud, 0.02, 1000, 0)?;
    println!("floor tilt {:.3} deg, offset {:.4} m", plane.tilt_deg(), plane.offset);

    let grid = project_topdown(&cloud, &plane, 0.05)?;
    let outline = polygonize(&grid)?;
    println!("polygon: {outline:.2?}");

    let layout = LayoutPolygon::new(outline.clone(), plane.offset, 2.8)?;
    for s in assign_openings(&cloud, &layout, 0.5, 20) {
        println!("{} on wall {}: {:.2}..{:.2} m", s.placeholder, s.wall, s.start, s.end);
    }
    let m = eval_layout(&outline, &truth, 20.0)?;
    println!("{}", serde_json::to_string_pretty(&m).unwrap());
    Ok(())
}
