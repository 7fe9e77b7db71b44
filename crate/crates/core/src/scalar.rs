//! Weight scalars.
//!
//! Every algorithm that only compares and subtracts weights is generic over
//! [`Scalar`]. Floating point types detect ties with a relative tolerance,
//! rationals compare exactly.

use std::fmt::{Debug, Display};
use std::ops::{Add, Sub};

use num_rational::Ratio;
use num_traits::{FromPrimitive, ToPrimitive, Zero};

/// Default relative tolerance under which two floating point weights count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialOrd
    + Zero
    + Add<Output = Self>
    + Sub<Output = Self>
    + ToPrimitive
    + FromPrimitive
    + Send
    + Sync
    + 'static
{
    /// `true` when the two values cannot be told apart at tolerance `tol`.
    ///
    /// Exact types ignore `tol` and test equality.
    fn ties_with(&self, other: &Self, tol: f64) -> bool;

    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("weight not representable in scalar type")
    }

    fn from_ratio(r: &Ratio<i64>) -> Self;

    fn double(&self) -> Self {
        self.clone() + self.clone()
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn ties_with(&self, other: &Self, tol: f64) -> bool {
                let a = *self as f64;
                let b = *other as f64;
                let scale = a.abs().max(b.abs()).max(1.0);
                (a - b).abs() <= tol * scale
            }

            fn from_ratio(r: &Ratio<i64>) -> Self {
                (*r.numer() as f64 / *r.denom() as f64) as $t
            }
        }
    };
}

float_scalar!(f32);
float_scalar!(f64);

impl Scalar for Ratio<i64> {
    fn ties_with(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn from_ratio(r: &Ratio<i64>) -> Self {
        *r
    }
}

impl Scalar for Ratio<i128> {
    fn ties_with(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn from_ratio(r: &Ratio<i64>) -> Self {
        Ratio::new(*r.numer() as i128, *r.denom() as i128)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_ties_are_relative() {
        assert!(1.0f64.ties_with(&(1.0 + 1e-13), TIE_TOLERANCE));
        assert!(!1.0f64.ties_with(&(1.0 + 1e-9), TIE_TOLERANCE));
        assert!(1e6f64.ties_with(&(1e6 + 1e-7), TIE_TOLERANCE));
    }

    #[test]
    fn rational_ties_are_exact() {
        let a = Ratio::new(1i64, 3);
        let b = Ratio::new(2i64, 6);
        assert!(a.ties_with(&b, 0.5));
        assert!(!a.ties_with(&Ratio::new(333_333_333, 1_000_000_000), 0.5));
    }
}
