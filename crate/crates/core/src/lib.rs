//! Two coupled harmonic oscillators with opposite-sign free Hamiltonians,
//!
//! ```text
//! H = ½(p_x² + ω_x² x²) − ½(p_y² + ω_y² y²) + g x y
//! ```
//!
//! simulated three ways: closed-form normal modes ([`modes`]), exact
//! Gaussian covariance propagation ([`gaussian`]) and a truncated Fock-space
//! exact diagonalization ([`fock`]). [`envelope`] holds the smooth profile
//! functions built on top of the modal amplitudes.

// NaN-rejecting checks are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod envelope;
pub mod error;
pub mod expm;
pub mod fock;
pub mod gaussian;
pub mod model;
pub mod modes;
pub mod series;

pub use error::{Error, Result};
pub use model::{InitialConditions, Mode, ModelParams, StabilityClass};
pub use series::{Channel, ObservableSeries, TimeGrid};

pub use nalgebra;
pub use num_complex::Complex64;
