#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod grid;
pub mod heat;
pub mod json;
pub mod kernel1d;
pub mod kernelnd;
pub mod operators;
mod parallel;
pub mod quadrature;
pub mod special;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use grid::{GridFunction, LatticePoint};
pub use quadrature::QuadratureConfig;
