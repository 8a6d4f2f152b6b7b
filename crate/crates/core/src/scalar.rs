//! Exact scalar types used by the difference, interpolation and series code.

use std::fmt::{Debug, Display};

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

/// A signed exact integer: `i64`, `i128`, or `BigInt`.
///
/// Growth values, differences and series numerators live in this type;
/// interpolation works in [`Ratio<T>`]. Fixed-width choices trade range
/// for speed and overflow like ordinary integers.
pub trait ExactInt:
    Integer + Signed + Clone + Debug + Display + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    fn of_u64(v: u64) -> Self {
        <Self as FromPrimitive>::from_u64(v).expect("value fits in scalar type")
    }

    fn of_usize(v: usize) -> Self {
        <Self as FromPrimitive>::from_usize(v).expect("value fits in scalar type")
    }
}

impl<T> ExactInt for T where
    T: Integer
        + Signed
        + Clone
        + Debug
        + Display
        + FromPrimitive
        + ToPrimitive
        + Send
        + Sync
        + 'static
{
}

/// Exact rationals over an [`ExactInt`].
pub type Rat<T> = Ratio<T>;

/// Formats a rational as `num/den` parts, always in lowest terms.
pub fn rational_parts<T: ExactInt>(q: &Rat<T>) -> (String, String) {
    (q.numer().to_string(), q.denom().to_string())
}
