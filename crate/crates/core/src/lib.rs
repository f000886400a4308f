//! Exact construction and verification of the cubic solutions of the
//! eiconal equation `|∇f|² = 9|x|⁴`.
//!
//! The exact layer ([`scalar`], [`poly`], [`matrix`], [`cdalgebra`],
//! [`hurwitz`], [`spheremap`], [`cartan`]) works over the field Q(√2, √3)
//! and checks every identity as a zero-polynomial test. The [`recognize`]
//! module is the floating-point counterpart: it brings an arbitrary cubic to
//! normal form and names its congruence class.

pub mod cartan;
pub mod cdalgebra;
pub mod cli;
pub mod error;
pub mod hurwitz;
pub mod matrix;
pub mod poly;
pub mod recognize;
pub mod scalar;
pub mod spheremap;

pub use error::{Error, Result};
pub use matrix::ScalarMatrix;
pub use poly::{grad_inner, norm_sq_poly, Monomial, Polynomial};
pub use scalar::{Rational, Scalar};
