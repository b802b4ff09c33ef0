pub mod config;
pub mod error;
pub mod extension;
pub mod fem;
pub mod iteration;
pub mod mesh;
pub mod navier_stokes;
pub mod output;
pub mod rigid_body;

pub use error::{Error, Result};
