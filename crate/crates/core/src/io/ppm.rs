//! Binary PPM (P6) textures and 8-bit tone-mapped previews.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::io::pfm::PfmImage;

/// Reads a P6 file into a 3-channel float image with values in [0, 1].
pub fn read_ppm(path: impl AsRef<Path>) -> Result<PfmImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_ppm(&bytes)
}

pub fn decode_ppm(bytes: &[u8]) -> Result<PfmImage> {
    let mut pos = 0usize;
    let mut header = Vec::with_capacity(4);
    while header.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Image("truncated PPM header".into()));
        }
        header.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    if header[0] != "P6" {
        return Err(Error::Image(format!("unsupported PPM magic `{}`", header[0])));
    }
    let parse = |s: &str, what: &str| -> Result<usize> {
        s.parse()
            .map_err(|_| Error::Image(format!("bad PPM {what} `{s}`")))
    };
    let width = parse(&header[1], "width")?;
    let height = parse(&header[2], "height")?;
    let maxval = parse(&header[3], "maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Image(format!("bad PPM maxval {maxval}")));
    }
    pos += 1;
    let bps = if maxval < 256 { 1 } else { 2 };
    let n = width * height * 3;
    let payload = bytes
        .get(pos..pos + n * bps)
        .ok_or_else(|| Error::Image("truncated PPM payload".into()))?;
    let scale = 1.0 / maxval as f32;
    let data = if bps == 1 {
        payload.iter().map(|&b| b as f32 * scale).collect()
    } else {
        payload
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]) as f32 * scale)
            .collect()
    };
    PfmImage::from_data(width, height, 3, data)
}

/// Gamma 2.2 preview of an HDR image, clamped to [0, 1] after `exposure`.
pub fn encode_preview(image: &PfmImage, exposure: f32) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", image.width, image.height).into_bytes();
    for y in 0..image.height {
        for x in 0..image.width {
            for v in image.rgb(x, y) {
                let mapped = (v * exposure).clamp(0.0, 1.0).powf(1.0 / 2.2);
                out.push((mapped * 255.0).round() as u8);
            }
        }
    }
    out
}

pub fn write_preview(image: &PfmImage, exposure: f32, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_preview(image, exposure)).map_err(|e| Error::io(path, e))
}
