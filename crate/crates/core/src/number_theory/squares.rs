use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

pub fn is_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

/// `n = y^2` or `n = -y^2` for some integer `y`.
pub fn is_pm_square(n: &BigInt) -> bool {
    is_square(&n.abs())
}

/// Whether a rational is the square of a rational.
pub fn is_rational_square(x: &BigRational) -> bool {
    x.is_zero() || (!x.is_negative() && is_square(x.numer()) && is_square(x.denom()))
}
