//! Scalar abstraction shared by the exact and floating-point layers.

use std::fmt::Debug;

use nalgebra::{ClosedAddAssign, ClosedMulAssign, ClosedSubAssign};
use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, One, ToPrimitive, Zero};

/// Ring element usable as a matrix entry of a linear representation.
pub trait Scalar:
    nalgebra::Scalar
    + Zero
    + One
    + ClosedAddAssign
    + ClosedSubAssign
    + ClosedMulAssign
    + std::ops::Neg<Output = Self>
    + Send
    + Sync
{
    /// True for types whose arithmetic is exact.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;

    /// Nearest complex double.
    fn to_c64(&self) -> Complex64;

    /// Division by a nonzero integer. For integer types the division must be exact.
    fn div_int(&self, k: i64) -> Option<Self>;
}

macro_rules! int_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            const EXACT: bool = true;
            fn from_i64(v: i64) -> Self {
                v as $t
            }
            fn to_c64(&self) -> Complex64 {
                Complex64::new(*self as f64, 0.0)
            }
            fn div_int(&self, k: i64) -> Option<Self> {
                let k = k as $t;
                (k != 0 && *self % k == 0).then(|| *self / k)
            }
        }
    };
}
int_scalar!(i64);
int_scalar!(i128);

impl Scalar for BigInt {
    const EXACT: bool = true;
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn div_int(&self, k: i64) -> Option<Self> {
        let k = BigInt::from(k);
        if k.is_zero() {
            return None;
        }
        let (quot, rem) = num_integer::Integer::div_rem(self, &k);
        rem.is_zero().then_some(quot)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn div_int(&self, k: i64) -> Option<Self> {
        (k != 0).then(|| self / BigRational::from_integer(BigInt::from(k)))
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            const EXACT: bool = false;
            fn from_i64(v: i64) -> Self {
                v as $t
            }
            fn to_c64(&self) -> Complex64 {
                Complex64::new(*self as f64, 0.0)
            }
            fn div_int(&self, k: i64) -> Option<Self> {
                (k != 0).then(|| *self / k as $t)
            }
        }
        impl Scalar for Complex<$t> {
            const EXACT: bool = false;
            fn from_i64(v: i64) -> Self {
                Complex::new(v as $t, 0.0)
            }
            fn to_c64(&self) -> Complex64 {
                Complex64::new(self.re as f64, self.im as f64)
            }
            fn div_int(&self, k: i64) -> Option<Self> {
                (k != 0).then(|| *self / k as $t)
            }
        }
    };
}
float_scalar!(f32);
float_scalar!(f64);

/// Real floating-point type (f32 or f64) for the trigonometric-polynomial layer.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Send + Sync + 'static {
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 is representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}
