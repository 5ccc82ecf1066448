//! Optimal quantum measurements for distinguishing two density operators
//! under the fidelity, with trace-distance-optimal measurements for
//! comparison.
//!
//! The library constructs the canonical minimal fidelity-optimal PVMs from
//! operator geometric means, verifies optimality and minimality of arbitrary
//! POVMs through the parallelism criterion of the pencil
//! (sqrt(sigma), U sqrt(rho)), classifies the uniqueness dichotomy driven by
//! the weak commutativity of the support projectors, and covers the
//! pure-state Bloch-arc picture and Helstrom measurements.
//!
//! All numerical kernels are generic over the real scalar (`f32` or `f64`)
//! through [`scalar::Scalar`]; the `f64` aliases at the crate root are the
//! concrete types the CLI and tests use.

pub mod divergence;
pub mod error;
pub mod gmean;
pub mod matrix;
pub mod optimal;
pub mod pencil;
pub mod pure;
pub mod quantum;
pub mod random;
pub mod scalar;
pub mod tol;
pub mod trace_opt;

pub use error::{Error, Result};

/// Concrete `f64` aliases.
pub type Real = f64;
pub type Complex = num_complex::Complex64;
pub type Matrix = matrix::ComplexMatrix<Real>;
pub type Eigensystem = matrix::HermitianEigensystem<Real>;
pub type Tolerances = tol::ToleranceConfig<Real>;
pub type State = quantum::DensityOperator<Real>;
pub type Measurement = quantum::Povm<Real>;
