//! Numerical toolkit for sharp functional inequalities on hyperbolic space
//! and rotationally symmetric model manifolds.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod constants;
pub mod error;
pub mod gaussmeasure;
pub mod heat;
pub mod manifold;
pub mod numerics;
pub mod rearrange;
pub mod verify;

pub use error::{Error, Result};
