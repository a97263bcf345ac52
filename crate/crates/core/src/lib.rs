//! Realizability toolkit for open two-level quantum systems.
//!
//! A qubit coupled to a single boson field evolves in the Heisenberg picture
//! according to a bilinear quantum stochastic differential equation
//!
//! ```text
//! dx = F0 dt + F x dt + G1 x dW̄1 + G2 x dW̄2,    dȲ = (H1; H2) x dt + dW̄
//! ```
//!
//! with `x = (σ1, σ2, σ3)`. This crate decides whether such a coefficient
//! system is generated by some Hamiltonian `𝓗 = αx` and coupling `L = Λx`,
//! recovers `(α, Λ)` when it is, builds the coefficients from `(α, Λ)`, and
//! checks preservation of the Pauli commutation relations two ways: a reduced
//! matrix criterion and a symbolic quantum-Itô expansion.
//!
//! Module map:
//!
//! * [`algebra`]: Levi-Civita tensor, the `Θ` map, the `E` matrix, `vec`, Kronecker products.
//! * [`pauli`]: exact Pauli-basis operator algebra.
//! * [`model`]: parameters, coefficient systems, the forward realization map, mean dynamics.
//! * [`realizability`]: realizability and commutation-preservation checkers.
//! * [`ito`]: the independent symbolic Itô oracle.

// `!(r <= tol)` is used on purpose so that NaN residuals fail.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod error;
pub mod ito;
pub mod model;
pub mod pauli;
pub mod realizability;

mod sampling;

pub use error::{Error, Result};
pub use model::{BilinearQsde, BlochState, PhysicalParams};
pub use realizability::{CcrReport, RealizabilityReport};

/// Default absolute tolerance for the realizability and commutation checks.
pub const DEFAULT_TOL: f64 = 1e-9;
