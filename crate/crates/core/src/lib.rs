//! Even and odd q-deformed charge coherent states.
//!
//! The crate is layered bottom-up:
//!
//! * [`qkernel`]: symmetric q-numbers, q-factorials, the q-exponential and its zero.
//! * [`qcalculus`]: symmetric q-derivative, Jackson q-integrals, q-Bessel J and K.
//! * [`fockspace`]: truncated two-mode Fock space and the deformed generators.
//! * [`states`]: charge coherent states, their even/odd projections and checks.
//! * [`observables`]: quadrature variances, correlation functions, squeezing scans.
//! * [`completeness`]: radial moment and resolution-of-identity verification.

// NaN-rejecting guards are written as `!(x > 0.0)`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod completeness;
pub mod dd;
pub mod error;
pub mod exec;
pub mod fockspace;
pub mod observables;
pub mod qcalculus;
pub mod qkernel;
pub mod states;

pub use error::{QError, Result};
pub use exec::Exec;
pub use qkernel::{Base, Precision, QContext, QContextBuilder, Terms};
