//! Simulation and analysis of the two-ion interferometric gate on thermally
//! excited motional states.
//!
//! Natural units throughout: ħ = 1, single-ion mass `m`, and by default a
//! centre-of-mass frequency of one. The composite Hilbert space is ordered
//! `qubit₁ ⊗ qubit₂ ⊗ mode_c ⊗ mode_r`.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fock;
pub mod trap;
pub mod gate;
pub mod analysis;
pub mod cli;

pub use error::{Error, Result};

/// Numerical tolerances shared across modules.
pub mod tol {
    pub const HERM: f64 = 1e-9;
    pub const UNIT: f64 = 1e-9;
    pub const TRACE: f64 = 1e-10;
    pub const PSD: f64 = 1e-8;
    pub const NORM: f64 = 1e-10;
    /// Drift up to this multiple of a tolerance is repaired rather than rejected.
    pub const RENORM_FACTOR: f64 = 10.0;
}
