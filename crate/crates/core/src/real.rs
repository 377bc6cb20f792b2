//! Extended-precision real scalar and the working-precision setting.
//!
//! Every [`Real`] carries its own binary precision. New values are created
//! at the *working precision*, which is a process-wide default (40 decimal
//! digits unless changed) that a thread may override for the duration of a
//! closure with [`with_digits`].

use std::cell::Cell;
use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};

use rug::ops::Pow;
use rug::Float;

pub const DEFAULT_DIGITS: u32 = 40;

static GLOBAL_DIGITS: AtomicU32 = AtomicU32::new(DEFAULT_DIGITS);

thread_local! {
    static LOCAL_DIGITS: Cell<Option<u32>> = const { Cell::new(None) };
}

/// Current working precision in decimal digits.
pub fn working_digits() -> u32 {
    LOCAL_DIGITS
        .with(|d| d.get())
        .unwrap_or_else(|| GLOBAL_DIGITS.load(AtomicOrdering::Relaxed))
}

/// Sets the process-wide default precision. Threads inside [`with_digits`]
/// keep their override.
pub fn set_default_digits(digits: u32) {
    GLOBAL_DIGITS.store(digits.max(16), AtomicOrdering::Relaxed);
}

/// Runs `f` with the working precision of this thread set to `digits`.
pub fn with_digits<R>(digits: u32, f: impl FnOnce() -> R) -> R {
    struct Restore(Option<u32>);
    impl Drop for Restore {
        fn drop(&mut self) {
            LOCAL_DIGITS.with(|d| d.set(self.0));
        }
    }
    let _restore = Restore(LOCAL_DIGITS.with(|d| d.replace(Some(digits.max(16)))));
    f()
}

fn digits_to_bits(digits: u32) -> u32 {
    (f64::from(digits) * std::f64::consts::LOG2_10).ceil() as u32
}

fn working_bits() -> u32 {
    digits_to_bits(working_digits())
}

/// `10^(-digits)`: the unit relative rounding level for a digit count.
pub fn eps_digits(digits: i32) -> Real {
    Real::from(10).powi(-digits)
}

/// Tolerance `10^{-(working_digits - slack)}`.
pub fn working_tolerance(slack: u32) -> Real {
    eps_digits(working_digits().saturating_sub(slack) as i32)
}

#[derive(Clone, PartialEq, PartialOrd)]
pub struct Real(Float);

impl Real {
    pub fn zero() -> Self {
        Real(Float::new(working_bits()))
    }

    pub fn one() -> Self {
        Real::from(1)
    }

    /// Exact ratio `num / den` rounded once at working precision.
    pub fn ratio(num: i64, den: i64) -> Self {
        Real::from(num) / Real::from(den)
    }

    /// Parses a decimal literal such as `"0.1"` directly at working
    /// precision, avoiding the binary rounding of an `f64` detour.
    pub fn parse_decimal(s: &str) -> Option<Self> {
        let parsed = Float::parse(s.trim()).ok()?;
        Some(Real(Float::with_val(working_bits(), parsed)))
    }

    /// Lifts an `f64` through its shortest round-trip decimal form, so that
    /// `0.1_f64` becomes the decimal 0.1 rather than its binary neighbour.
    pub fn from_f64_decimal(x: f64) -> Self {
        if !x.is_finite() {
            return Real::from(x);
        }
        Real::parse_decimal(&format!("{x:?}")).unwrap_or_else(|| Real::from(x))
    }

    pub fn precision_bits(&self) -> u32 {
        self.0.prec()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_sign_negative(&self) -> bool {
        self.0.is_sign_negative() && !self.0.is_zero()
    }

    pub fn is_sign_positive(&self) -> bool {
        self.0.is_sign_positive() && !self.0.is_zero()
    }

    pub fn abs(&self) -> Self {
        Real(self.0.clone().abs())
    }

    pub fn sqrt(&self) -> Self {
        Real(self.0.clone().sqrt())
    }

    pub fn exp(&self) -> Self {
        Real(self.0.clone().exp())
    }

    pub fn ln(&self) -> Self {
        Real(self.0.clone().ln())
    }

    pub fn recip(&self) -> Self {
        Real(self.0.clone().recip())
    }

    pub fn powi(&self, n: i32) -> Self {
        Real(self.0.clone().pow(n))
    }

    /// Real `k`-th root; negative input with even `k` gives NaN.
    pub fn root(&self, k: u32) -> Self {
        Real(self.0.clone().root(k))
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn total_cmp(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }

    pub fn factorial(n: u32) -> Self {
        (1..=n).fold(Real::one(), |acc, k| acc * Real::from(k))
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_string_digits(&self, digits: usize) -> String {
        self.0.to_string_radix(10, Some(digits.max(1)))
    }

    fn prec_with(&self, other: &Self) -> u32 {
        self.0.prec().max(other.0.prec())
    }
}

impl Default for Real {
    fn default() -> Self {
        Real::zero()
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(working_digits() as usize);
        f.write_str(&self.to_string_digits(digits))
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({})", self.to_string_digits(24))
    }
}

macro_rules! from_primitive {
    ($($t:ty),*) => {$(
        impl From<$t> for Real {
            fn from(x: $t) -> Self {
                Real(Float::with_val(working_bits(), x))
            }
        }
    )*};
}
from_primitive!(i32, i64, u32, u64, f64);

impl From<usize> for Real {
    fn from(x: usize) -> Self {
        Real::from(x as u64)
    }
}

macro_rules! binary_op {
    ($trait:ident, $method:ident, $assign_trait:ident, $assign_method:ident, $op:tt) => {
        impl $trait<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                Real(Float::with_val(self.prec_with(rhs), &self.0 $op &rhs.0))
            }
        }
        impl $trait<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self $op &rhs
            }
        }
        impl $trait<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                &self $op rhs
            }
        }
        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                &self $op &rhs
            }
        }
        impl $trait<f64> for &Real {
            type Output = Real;
            fn $method(self, rhs: f64) -> Real {
                Real(Float::with_val(self.0.prec(), &self.0 $op rhs))
            }
        }
        impl $trait<f64> for Real {
            type Output = Real;
            fn $method(self, rhs: f64) -> Real {
                &self $op rhs
            }
        }
        impl $assign_trait<&Real> for Real {
            fn $assign_method(&mut self, rhs: &Real) {
                *self = &*self $op rhs;
            }
        }
        impl $assign_trait<Real> for Real {
            fn $assign_method(&mut self, rhs: Real) {
                *self = &*self $op &rhs;
            }
        }
    };
}

binary_op!(Add, add, AddAssign, add_assign, +);
binary_op!(Sub, sub, SubAssign, sub_assign, -);
binary_op!(Mul, mul, MulAssign, mul_assign, *);
binary_op!(Div, div, DivAssign, div_assign, /);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-self.0)
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-self.0.clone())
    }
}

impl Sum for Real {
    fn sum<I: Iterator<Item = Real>>(iter: I) -> Real {
        iter.fold(Real::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Real> for Real {
    fn sum<I: Iterator<Item = &'a Real>>(iter: I) -> Real {
        iter.fold(Real::zero(), |acc, x| acc + x)
    }
}

impl PartialEq<f64> for Real {
    fn eq(&self, other: &f64) -> bool {
        self.0 == *other
    }
}

impl PartialOrd<f64> for Real {
    fn partial_cmp(&self, other: &f64) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_precision_is_forty_digits() {
        let third = Real::ratio(1, 3);
        assert!(third.precision_bits() >= 133);
        let err = (third * Real::from(3) - Real::one()).abs();
        assert!(err < eps_digits(39));
    }

    #[test]
    fn scoped_precision_restores() {
        let outer = working_digits();
        with_digits(80, || {
            assert_eq!(working_digits(), 80);
            assert!(Real::one().precision_bits() >= 265);
        });
        assert_eq!(working_digits(), outer);
    }

    #[test]
    fn decimal_lift_is_exact_decimal() {
        let a = Real::from_f64_decimal(0.1);
        let b = Real::parse_decimal("0.1").unwrap();
        assert_eq!(a, b);
        assert!((a * Real::from(10) - Real::one()).abs() < eps_digits(39));
    }

    #[test]
    fn roots_and_powers() {
        let x = Real::from(8).root(3);
        assert!((x - Real::from(2)).abs() < eps_digits(38));
        assert_eq!(Real::from(2).powi(-2), Real::ratio(1, 4));
        assert_eq!(Real::factorial(5), Real::from(120));
    }
}
