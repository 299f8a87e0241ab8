//! Sample cameras along the walls and keep the highest-scoring ones.

use roomgt::scene::load_scene;
use roomgt::viewsel::{rank_views, sample_wall_views, score_candidates, WallViewParams};

fn main() -> roomgt::Result<()> {
    let scene = load_scene(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/cornell.json"))?;
    let room = [[0.0, 0.0], [4.0, 0.0], [4.0, 4.0], [0.0, 4.0]];
    let cams = sample_wall_views(&room, &WallViewParams::default())?;
    let candidates = score_candidates(&scene, &cams);
    println!("{} candidates", candidates.len());
    for v in rank_views(&candidates, 3)? {
        let [x, y, z] = v.position;
        println!("#{:<3} score {:9.1} at ({x:.2}, {y:.2}, {z:.2})", v.index, v.score);
    }
    Ok(())
}
