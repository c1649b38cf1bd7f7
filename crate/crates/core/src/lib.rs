//! Qubit channels generated by zero-bandwidth classical noise.
//!
//! A qubit evolves under `H = r·σ` with a random but time-constant vector
//! `r ~ p(r)`. Averaging over `p` yields a Pauli-diagonal channel fixed by
//! three contraction factors `Λᵢ(t)`. The crate evaluates those factors
//! ([`noise`]), builds and applies the channel ([`channel`]), integrates the
//! corresponding master equations ([`dynamics`]), checks everything against
//! Monte-Carlo averages ([`oracle`]) and evaluates closed-form fidelities
//! ([`fidelity`]).
//!
//! Algebraic routines are generic over [`Real`] (`f32`/`f64`); noise models,
//! quadrature and sampling work in `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod csv;
pub mod dynamics;
mod error;
pub mod fidelity;
pub mod linalg;
pub mod noise;
pub mod oracle;
mod scalar;

pub use error::{Error, Result};
pub use num_complex::Complex;
pub use scalar::Real;

pub type Matrix = linalg::ComplexMatrix<f64>;
pub type Matrix32 = linalg::ComplexMatrix<f32>;
pub type Density = linalg::DensityMatrix<f64>;
pub type Density32 = linalg::DensityMatrix<f32>;
pub type Bloch = linalg::BlochVector<f64>;
pub type Bloch32 = linalg::BlochVector<f32>;
pub type Lambda = channel::LambdaVector<f64>;
pub type Lambda32 = channel::LambdaVector<f32>;
pub type Kraus = channel::KrausCoefficients<f64>;
pub type Kraus32 = channel::KrausCoefficients<f32>;
pub type Trace = dynamics::EvolutionTrace<f64>;
