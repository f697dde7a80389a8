//! Space-time ultra-weak Trefftz discontinuous Galerkin method for the free
//! Schrödinger equation `i ∂_t ψ + ½ Δ ψ = 0` in one space dimension.

pub mod error;
pub mod exact;
pub mod field;
pub mod linalg;
pub mod mesh;
pub mod poly;
pub mod quadrature;
pub mod spaces;
pub mod assembly;
pub mod norms;
pub mod experiments;

pub use error::{Error, Result};
pub use num_complex::Complex64;
