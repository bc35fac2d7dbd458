//! Valuations, factoring, square tests and heights over Q.

pub mod factor;
pub mod heights;
pub mod padic;
pub mod primes;
pub mod squares;
pub mod valuation;

pub use factor::{factor, factor_rational, CofactorStatus, FactorEffort, ValuationProfile};
pub use heights::{hgcd, height, rad, HeightError, HeightValue, Provenance};
pub use padic::{
    pair_valuations, valuation_of_iterate, valuation_of_iterate_with, IterValuation,
    PadicConfig, PadicError, PairValuation,
};
pub use primes::{is_prime_u64, is_probable_prime, primes_up_to};
pub use squares::{is_pm_square, is_rational_square, is_square};
pub use valuation::{int_valuation, split_two, valuation, Valuation};
