//! Coded distributed computation over finite fields.
//!
//! The crate builds linear codes (Reed-Solomon, one-point Hermitian and
//! generic codes), their coordinatewise Schur products, bilinear and
//! multilinear tensor decompositions, and a master-worker simulator that
//! recovers matrix products from a subset of possibly faulty workers.

pub mod algebra;
pub mod codes;
pub mod error;
pub mod evalcodes;
pub mod harness;
pub mod scheme;
pub mod security;
pub mod subsets;
pub mod tensors;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/fields.md")]
    mod fields {}
    #[doc = include_str!("../../../book/src/codes.md")]
    mod codes {}
    #[doc = include_str!("../../../book/src/evaluation-codes.md")]
    mod evaluation_codes {}
    #[doc = include_str!("../../../book/src/tensors.md")]
    mod tensors {}
    #[doc = include_str!("../../../book/src/schemes.md")]
    mod schemes {}
    #[doc = include_str!("../../../book/src/security.md")]
    mod security {}
    #[doc = include_str!("../../../book/src/harness.md")]
    mod harness {}
}
