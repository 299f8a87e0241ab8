//! Friction table from reference materials, a friction map of the box
//! room, and a URDF for one of its boxes.

use roomgt::friction::{
    build_friction_table, export_urdf, friction_map, reference_anchors, uniform_axis, LookupMode, UrdfObject,
    DEFAULT_DISK_RESOLUTION, DEFAULT_GRID_SIZE,
};
use roomgt::scene::load_scene;

fn main() -> roomgt::Result<()> {
    let axis = uniform_axis(DEFAULT_GRID_SIZE);
    let table = build_friction_table(&reference_anchors(), &axis, &axis, DEFAULT_DISK_RESOLUTION)?;
    for a in &table.anchors {
        println!("{:<7} A={:.3} R={:.3} mu={}", a.name, a.albedo, a.roughness, table.lookup(a.albedo, a.roughness, LookupMode::Nearest));
    }
    println!("A=0.5 R=0.5: nearest {:.3}, bilinear {:.3}", table.lookup(0.5, 0.5, LookupMode::Nearest), table.lookup(0.5, 0.5, LookupMode::Bilinear));

    let scene = load_scene(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/cornell.json"))?;
    let map = friction_map(&scene, &scene.cameras[0], &table, LookupMode::Bilinear);
    let hit: Vec<f32> = map.data.iter().copied().filter(|&m| m > 0.0).collect();
    println!("friction map: {} of {} px hit, mean mu {:.3}", hit.len(), map.data.len(), hit.iter().sum::<f32>() / hit.len() as f32);

    let mesh = scene.meshes.iter().find(|m| m.name == "tall_box").expect("fixture mesh");
    let urdf = export_urdf(
        &UrdfObject {
            name: mesh.name.clone(),
            mesh,
            material: &scene.materials[mesh.material],
            visual_mesh: "meshes/tall_box.obj".into(),
            collision_mesh: None,
            mass: 12.0,
        },
        &table,
        LookupMode::Bilinear,
    )?;
    print!("{urdf}");
    Ok(())
}
