//! Lamp colours across the supported temperature range.

use roomgt::lights::{blackbody_rgb, LampLight};
use roomgt::math::Vec3;

fn main() -> roomgt::Result<()> {
    for k in (4000..=8000).step_by(500) {
        let c = blackbody_rgb(k as f64)?;
        println!("{k} K  r={:.3} g={:.3} b={:.3}  b/r={:.3}", c.r, c.g, c.b, c.b / c.r);
    }
    // lamps outside the range are refused
    let half = Vec3::new(0.1, 0.1, 0.1);
    println!("{}", LampLight::aligned("bulb", Vec3::zeros(), half, 2700.0, 1.0).unwrap_err());
    Ok(())
}
