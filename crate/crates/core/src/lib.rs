//! Numerical verification of curvature identities on metric manifolds.
//!
//! The crate evaluates the classical differential identities of the Riemann
//! tensor (Veblen, Walker, the second-order cyclic identity, Lovelock's
//! divergence identity and its relatives) as numerical residuals on concrete
//! metrics, builds the projective/conformal/concircular/conharmonic/
//! quasi-conformal curvature tensors with their closed-form divergences, and
//! detects recurrent, semisymmetric, pseudosymmetric and weakly-Ricci-
//! symmetric structures by pointwise least-squares fits.
//!
//! Everything rests on a small exact-differentiation engine: truncated
//! multivariate Taylor arithmetic ([`jets`]) pushed through the metric, the
//! Christoffel symbols and the curvature pipeline, so residuals are limited
//! only by floating-point roundoff, not by finite-difference truncation.

pub mod error;
pub mod jets;
pub mod rng;

pub use error::{Error, Result};

pub mod expr;
pub mod metric;
pub mod parse;
pub mod oracle;
pub mod tensor;
pub mod curvature;
pub mod k_tensors;
