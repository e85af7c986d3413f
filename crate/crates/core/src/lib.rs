//! Reciprocal characteristics and concentration bounds for Markov bridges.
//!
//! Random walks on graphs are described through the products of their jump
//! rates along closed walks; gradient diffusions through the field
//! 𝒰 = ½|∇U|² − ∂ₜU − ½ΔU. Both determine the family of bridges, and both
//! control how far a bridge can wander from its endpoints.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod characteristics;
pub mod ctmc;
pub mod diffusion;
pub mod error;
pub mod fit;
pub mod generators;
pub mod graph;
pub mod pinned_poisson;
pub mod report;
pub mod synthesis;

pub use error::{Error, Result};
