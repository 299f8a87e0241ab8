//! Image and metadata file formats.

pub mod pfm;
pub mod ppm;

pub use pfm::{read_pfm, write_pfm, PfmImage};
pub use ppm::{decode_ppm, encode_preview, read_ppm, write_preview};
