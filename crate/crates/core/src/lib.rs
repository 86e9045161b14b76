//! Coherent-state probability families and group-invariant inferred
//! distributions.
//!
//! The Poisson family arises from Weyl–Heisenberg coherent states on a
//! truncated Fock space, the binomial family from SU(2) spin coherent states.
//! Pairing an observed number state with the coherent-state POV measure gives
//! a distribution on the parameter space, which [`inference`] tabulates and
//! compares with the Gamma and Beta closed forms.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fock;
pub mod inference;
pub mod linops;
pub mod pv_measure;
pub mod special;
pub mod spin;

pub use error::{Error, Result};
pub use fock::{CoherentStateWH, FockSpace, LadderRep, WHGroupElement};
pub use inference::{CoherentFamily, InferredDistribution, QuadratureRule};
pub use linops::{ComplexMatrix, ComplexVector, SpectralDecomposition};
pub use num_complex::Complex64;
pub use pv_measure::{FinitePVMeasure, Observable, StateOperator, VectorState};
pub use spin::{CoherentStateSpin, HalfInt, SpherePoint, SpinRep};
