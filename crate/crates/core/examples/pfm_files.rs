//! Write and read back a float image; the round trip is bit exact.

use roomgt::io::{read_pfm, write_pfm, PfmImage};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut img = PfmImage::new(4, 3, 3);
    for y in 0..3 {
        for x in 0..4 {
            img.set(x, y, 0, x as f32 * 0.25);
            img.set(x, y, 1, y as f32 / 3.0);
            img.set(x, y, 2, 1e-7 * (x + y) as f32);
        }
    }
    let path = std::env::temp_dir().join("roomgt_example.pfm");
    write_pfm(&img, &path)?;
    let bytes = std::fs::read(&path)?;
    println!("{} bytes, header {:?}", bytes.len(), String::from_utf8_lossy(&bytes[..12]));
    assert_eq!(read_pfm(&path)?, img);

    img.set(0, 0, 0, f32::NAN);
    println!("{}", write_pfm(&img, &path).unwrap_err());
    Ok(())
}
