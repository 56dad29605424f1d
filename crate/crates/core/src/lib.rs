//! Iteration of rational maps on 2×2 complex matrices.

pub mod acceptance;
pub mod algebra;
pub mod basin;
pub mod error;
pub mod maps;
pub mod periodic;
pub mod quat;
pub mod raster;
pub mod sample;

pub use algebra::{c, cr, Mat2, C64};
pub use error::{Error, Result};
