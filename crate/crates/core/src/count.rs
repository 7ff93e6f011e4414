//! Exact nonnegative counters for spectrum enumeration.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{CheckedAdd, CheckedMul, FromPrimitive, One, Zero};

/// An exact counter. Overflow is reported, never wrapped: the fixed-width
/// implementations return `None` from the checked operations.
pub trait Count:
    Clone + Ord + Debug + Display + FromStr + Zero + One + CheckedAdd + CheckedMul + FromPrimitive + Send + Sync
{
}

impl<T> Count for T where
    T: Clone + Ord + Debug + Display + FromStr + Zero + One + CheckedAdd + CheckedMul + FromPrimitive + Send + Sync
{
}
