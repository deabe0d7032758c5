//! Numeric abstraction shared by the metric and community code.
//!
//! Every representativeness measure in this crate is a ratio of counts, so a
//! scalar only has to be built from an integer fraction and support field
//! arithmetic plus ordering. Floating-point types are used for experiments;
//! [`BigRational`] gives exact values for oracle tests.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive};

/// A real-valued scalar that can represent ratios of integer counts.
pub trait Scalar: Num + Clone + PartialOrd + Debug + Send + Sync {
    /// `num / den`. `den` must be nonzero.
    fn from_ratio(num: i128, den: i128) -> Self;

    /// Lossy conversion used for reporting.
    fn to_f64(&self) -> f64;

    fn from_count(count: usize) -> Self {
        Self::from_ratio(count as i128, 1)
    }

    /// `|self - other|`
    fn abs_diff(&self, other: &Self) -> Self {
        if self >= other {
            self.clone() - other.clone()
        } else {
            other.clone() - self.clone()
        }
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl Scalar for f64 {
    fn from_ratio(num: i128, den: i128) -> Self {
        debug_assert!(den != 0);
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    fn from_ratio(num: i128, den: i128) -> Self {
        debug_assert!(den != 0);
        (num as f64 / den as f64) as f32
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
}

impl Scalar for BigRational {
    fn from_ratio(num: i128, den: i128) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}
