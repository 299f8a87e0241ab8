//! Per-light direct shading with and without shadows, and the visibility
//! ratio between them.

use roomgt::integrator::{render, RenderConfig};
use roomgt::scene::load_scene;

fn main() -> roomgt::Result<()> {
    let scene = load_scene(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/cornell.json"))?;
    let camera = scene.cameras[0].with_resolution(32, 24);
    let set = render(&scene, &camera, &RenderConfig { spp: 32, ..RenderConfig::default() })?;

    for pl in &set.per_light {
        let vis = &pl.visibility.data;
        let shadowed = vis.iter().filter(|&&v| v < 0.5).count();
        let mean_vis = vis.iter().map(|&v| v as f64).sum::<f64>() / vis.len() as f64;
        let energy: f64 = pl.unoccluded.mean.data.iter().map(|&v| v as f64).sum();
        println!(
            "{:<8} unshadowed energy {energy:9.3}  mean visibility {mean_vis:.3}  {shadowed} px mostly shadowed",
            pl.light_id
        );
    }
    Ok(())
}
