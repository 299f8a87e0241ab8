//! Physically based ground-truth generation for indoor scenes.

pub mod brdf;
pub mod cli;
pub mod error;
pub mod friction;
pub mod integrator;
pub mod layout;
pub mod io;
pub mod lights;
pub mod math;
pub mod scene;
pub mod viewsel;

pub use error::{Error, Result};
