//! Exact symbolic engine for global sections of the chiral de Rham complex
//! on closed curves of genus at least two.

pub mod assembly;
pub mod basis;
pub mod engine;
pub mod halfplane;
pub mod linalg;
pub mod report;
pub mod sl2;
pub mod scalar;
pub mod verify;

pub use scalar::{Rational, Scalar};
