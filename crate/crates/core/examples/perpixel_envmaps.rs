//! Per-pixel incoming-radiance maps and the shading they reconstruct.

use roomgt::integrator::{reconstruct_site, render, render_perpixel_envmaps, ChannelFlags, RenderConfig};
use roomgt::scene::load_scene;

fn main() -> roomgt::Result<()> {
    let scene = load_scene(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/cornell.json"))?;
    let camera = scene.cameras[0].with_resolution(32, 24);
    let mut config = RenderConfig {
        spp: 256,
        channels: ChannelFlags { gbuffer: false, per_light: false, envmaps: false },
        ..RenderConfig::default()
    };
    config.envmap.stride = 8;
    config.envmap.samples = 256;

    let grid = render_perpixel_envmaps(&scene, &camera, &config)?;
    let radiance = render(&scene, &camera, &config)?.radiance.mean;
    println!("{}x{} sites, {}x{} texels each", grid.rows, grid.cols, grid.h_theta, grid.h_phi);
    for r in 0..grid.rows {
        for c in 0..grid.cols {
            let (x, y) = grid.site_pixel(r, c);
            if let Some(rec) = reconstruct_site(&scene, &camera, &grid, r, c) {
                let px = radiance.rgb(x, y);
                println!("({x:2},{y:2}) rendered {:.4}  from envmap {:.4}", px[0], rec.r);
            }
        }
    }
    Ok(())
}
