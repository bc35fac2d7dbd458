//! Exact iteration of polynomials and quadratic rational maps over Q, and
//! prime-valuation certificates for maximal growth of the Galois extensions
//! cut out by iterated preimages of 0.

pub mod certificates;
pub mod dynamics;
pub mod exact;
pub mod family;
pub mod number_theory;
pub mod polyfactor;
pub mod serde_util;
