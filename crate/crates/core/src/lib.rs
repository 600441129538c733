//! Mild-solution solver for the Prandtl boundary-layer equations with a
//! Robin wall condition on the half space, built from half-line heat
//! potentials and Picard iteration, plus diagnostics and an independent
//! finite-difference oracle.

// `!(a <= b)` is used on purpose so that NaN fails every tolerance check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod fields;
pub mod kernels;
pub mod oracle;
pub mod prandtl;
pub mod quadrature;

pub use error::{Error, Result};
