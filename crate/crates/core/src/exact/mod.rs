//! Exact rational, polynomial and rational-map arithmetic.

pub mod parse;
pub mod poly;
pub mod ratmap;
pub mod resultant;

use thiserror::Error;

pub use parse::{parse_map, parse_rational, ParseError};
pub use poly::Poly;
pub use ratmap::{compose, compose_pair, IteratePair, ProjPoint, RatMap, DEFAULT_DEGREE_CAP};
pub use resultant::{discriminant, resultant};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("zero polynomial where a nonzero one is required")]
    ZeroPolynomial,
    #[error("discriminant of a constant polynomial")]
    DegreeZero,
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("iterate of a degree-{degree} map at level {level} exceeds the degree cap {cap}")]
    DegreeCap { degree: usize, level: usize, cap: usize },
}
