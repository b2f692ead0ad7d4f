//! Exact arithmetic over GF(p^m) and dense linear algebra on top of it.

mod field;
mod matrix;
pub mod poly;

pub use field::{prime_power, Elem, Field, FieldElement, MAX_ORDER};
pub use matrix::{FMatrix, Rref, Solution};

