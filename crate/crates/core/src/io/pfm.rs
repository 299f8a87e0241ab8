//! Portable float map reader/writer.
//!
//! Files are written as `PF\n` (RGB) or `Pf\n` (gray), `<w> <h>\n`, `-1.0\n`
//! followed by little-endian float32 rows, bottom row first. In memory rows
//! are stored top row first.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PfmImage {
    pub width: usize,
    pub height: usize,
    /// 1 or 3.
    pub channels: usize,
    /// Row-major, top row first, interleaved channels.
    pub data: Vec<f32>,
}

impl PfmImage {
    pub fn new(width: usize, height: usize, channels: usize) -> Self {
        assert!(channels == 1 || channels == 3, "PFM supports 1 or 3 channels");
        PfmImage {
            width,
            height,
            channels,
            data: vec![0.0; width * height * channels],
        }
    }

    pub fn from_data(width: usize, height: usize, channels: usize, data: Vec<f32>) -> Result<Self> {
        let img = PfmImage {
            width,
            height,
            channels,
            data,
        };
        img.validate()?;
        Ok(img)
    }

    pub fn validate(&self) -> Result<()> {
        if self.channels != 1 && self.channels != 3 {
            return Err(Error::Image(format!("unsupported channel count {}", self.channels)));
        }
        if self.data.len() != self.width * self.height * self.channels {
            return Err(Error::Image(format!(
                "sample count {} does not match {}x{}x{}",
                self.data.len(),
                self.width,
                self.height,
                self.channels
            )));
        }
        if let Some(i) = self.data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Image(format!("non-finite sample at index {i}")));
        }
        Ok(())
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, c: usize) -> f32 {
        self.data[(y * self.width + x) * self.channels + c]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, c: usize, v: f32) {
        let i = (y * self.width + x) * self.channels + c;
        self.data[i] = v;
    }

    /// Pixel as RGB; gray images are broadcast.
    #[inline]
    pub fn rgb(&self, x: usize, y: usize) -> [f32; 3] {
        if self.channels == 1 {
            let v = self.get(x, y, 0);
            [v, v, v]
        } else {
            [self.get(x, y, 0), self.get(x, y, 1), self.get(x, y, 2)]
        }
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        self.validate()?;
        let tag = if self.channels == 3 { "PF" } else { "Pf" };
        let header = format!("{tag}\n{} {}\n-1.0\n", self.width, self.height);
        let row_len = self.width * self.channels;
        let mut out = Vec::with_capacity(header.len() + self.data.len() * 4);
        out.extend_from_slice(header.as_bytes());
        for y in (0..self.height).rev() {
            for v in &self.data[y * row_len..(y + 1) * row_len] {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut pos = 0usize;
        let tag = next_token(bytes, &mut pos).ok_or_else(|| Error::Image("missing PFM tag".into()))?;
        let channels = match tag {
            "PF" => 3,
            "Pf" => 1,
            other => return Err(Error::Image(format!("bad PFM tag `{other}`"))),
        };
        let width = parse_token::<usize>(bytes, &mut pos, "width")?;
        let height = parse_token::<usize>(bytes, &mut pos, "height")?;
        let scale = parse_token::<f64>(bytes, &mut pos, "scale")?;
        if scale == 0.0 || !scale.is_finite() {
            return Err(Error::Image(format!("bad PFM scale {scale}")));
        }
        // exactly one whitespace byte separates the header from the payload
        pos += 1;
        let little = scale < 0.0;
        let n = width * height * channels;
        let payload = bytes
            .get(pos..pos + n * 4)
            .ok_or_else(|| Error::Image(format!("truncated PFM payload, expected {n} floats")))?;
        let row_len = width * channels;
        let mut data = vec![0f32; n];
        for (i, chunk) in payload.chunks_exact(4).enumerate() {
            let raw = [chunk[0], chunk[1], chunk[2], chunk[3]];
            let v = if little { f32::from_le_bytes(raw) } else { f32::from_be_bytes(raw) };
            let file_row = i / row_len;
            let col = i % row_len;
            data[(height - 1 - file_row) * row_len + col] = v;
        }
        PfmImage::from_data(width, height, channels, data)
    }
}

fn next_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Option<&'a str> {
    while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if start == *pos {
        return None;
    }
    std::str::from_utf8(&bytes[start..*pos]).ok()
}

fn parse_token<T: std::str::FromStr>(bytes: &[u8], pos: &mut usize, what: &str) -> Result<T> {
    let tok = next_token(bytes, pos).ok_or_else(|| Error::Image(format!("missing PFM {what}")))?;
    tok.parse()
        .map_err(|_| Error::Image(format!("bad PFM {what} `{tok}`")))
}

pub fn write_pfm(image: &PfmImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = image.to_bytes()?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_pfm(path: impl AsRef<Path>) -> Result<PfmImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    PfmImage::from_bytes(&bytes)
}
