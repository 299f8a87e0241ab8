//! Render the bundled box room and write its channels plus a preview.
//!
//! `cargo run --release --example render_cornell -- out_dir [spp]`

use std::path::PathBuf;

use roomgt::integrator::{render, RenderConfig};
use roomgt::io::write_preview;
use roomgt::scene::load_scene;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "cornell_out".into()));
    let spp = args.next().map(|s| s.parse()).transpose()?.unwrap_or(16);

    let scene = load_scene(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/cornell.json"))?;
    let camera = &scene.cameras[0];
    let config = RenderConfig { spp, seed: 1, ..RenderConfig::default() };
    let set = render(&scene, camera, &config)?;
    let manifest = set.write(&out, &config)?;
    write_preview(&set.radiance.mean, 1.0, out.join("preview.ppm"))?;

    for c in &manifest.channels {
        println!("{:<28} {}", c.name, c.file);
    }
    Ok(())
}
