//! Drop floating furniture to the floor and push it out of the walls.

use roomgt::layout::{resolve_placement, LayoutPolygon, PlacedObject};
use roomgt::math::Vec3;

fn main() -> roomgt::Result<()> {
    let room = LayoutPolygon::new(vec![[0.0, 0.0], [4.0, 0.0], [4.0, 3.0], [0.0, 3.0]], 0.0, 2.6)?;
    let objects = vec![
        PlacedObject::new("table", Vec3::new(2.0, 1.5, 0.45), Vec3::new(0.6, 0.4, 0.38), 0.3),
        PlacedObject::new("shelf", Vec3::new(3.9, 2.0, 0.9), Vec3::new(0.2, 0.5, 0.9), 0.0),
        PlacedObject::new("chair", Vec3::new(2.5, 1.6, 0.4), Vec3::new(0.25, 0.25, 0.45), 0.0),
    ];
    let report = resolve_placement(&objects, &room)?;
    for (a, b) in objects.iter().zip(&report.objects) {
        println!("{:<6} {:.2?} -> {:.2?}", a.id, a.center, b.center);
    }
    println!("overlapping pairs: {:?}", report.overlaps);

    let wardrobe = PlacedObject::new("wardrobe", Vec3::new(2.0, 1.5, 1.0), Vec3::new(2.5, 0.5, 1.0), 0.0);
    println!("{}", resolve_placement(&[wardrobe], &room).unwrap_err());
    Ok(())
}
