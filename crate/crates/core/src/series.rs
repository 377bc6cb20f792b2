//! Dense polynomials and truncated power series over [`Real`].

use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Ratio;

use crate::error::{PsletError, Result};
use crate::real::Real;

/// Dense polynomial `c0 + c1 x + ... + cd x^d`.
///
/// Exact zero trailing coefficients are trimmed, so the zero polynomial has
/// no coefficients and `degree()` is `None`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Poly {
    coeffs: Vec<Real>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn new(coeffs: Vec<Real>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    pub fn constant(c: Real) -> Self {
        Poly::new(vec![c])
    }

    /// `c x^k`.
    pub fn monomial(c: Real, k: usize) -> Self {
        let mut coeffs = vec![Real::zero(); k + 1];
        coeffs[k] = c;
        Poly::new(coeffs)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Real::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[Real] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `x^k` (zero beyond the stored degree).
    pub fn coeff(&self, k: usize) -> Real {
        self.coeffs.get(k).cloned().unwrap_or_else(Real::zero)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Real::from(k))
                .collect(),
        )
    }

    /// Antiderivative with zero constant term.
    pub fn integral(&self) -> Poly {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Real::zero());
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c / Real::from(k + 1)),
        );
        Poly::new(coeffs)
    }

    pub fn scale(&self, s: &Real) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Multiplies by `x^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Real::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    pub fn eval(&self, x: &Real) -> Real {
        self.coeffs
            .iter()
            .rev()
            .fold(Real::zero(), |acc, c| acc * x + c)
    }

    /// Largest coefficient magnitude (zero for the zero polynomial).
    pub fn max_abs_coeff(&self) -> Real {
        self.coeffs
            .iter()
            .map(Real::abs)
            .fold(Real::zero(), Real::max)
    }

    /// Splits into the parts made of even and odd powers.
    pub fn parity_split(&self) -> (Poly, Poly) {
        let mut even = Vec::with_capacity(self.coeffs.len());
        let mut odd = Vec::with_capacity(self.coeffs.len());
        for (k, c) in self.coeffs.iter().enumerate() {
            if k % 2 == 0 {
                even.push(c.clone());
                odd.push(Real::zero());
            } else {
                even.push(Real::zero());
                odd.push(c.clone());
            }
        }
        (Poly::new(even), Poly::new(odd))
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Real::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! owned_poly_op {
    ($trait:ident, $method:ident) => {
        impl $trait<Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                (&self).$method(rhs)
            }
        }
    };
}
owned_poly_op!(Add, add);
owned_poly_op!(Sub, sub);
owned_poly_op!(Mul, mul);

/// Power series `a0 + a1 t + ... + aK t^K + O(t^{K+1})`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncSeries {
    coeffs: Vec<Real>,
}

impl TruncSeries {
    /// Pads or truncates `coeffs` to exactly `order + 1` entries.
    pub fn new(mut coeffs: Vec<Real>, order: usize) -> Self {
        coeffs.resize_with(order + 1, Real::zero);
        TruncSeries { coeffs }
    }

    pub fn constant(c: Real, order: usize) -> Self {
        TruncSeries::new(vec![c], order)
    }

    /// The series of `x0 + t`.
    pub fn variable(x0: Real, order: usize) -> Self {
        TruncSeries::new(vec![x0, Real::one()], order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Real] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Real> {
        self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &Real {
        &self.coeffs[k]
    }

    pub fn truncate(&self, order: usize) -> TruncSeries {
        TruncSeries::new(self.coeffs[..=order.min(self.order())].to_vec(), order.min(self.order()))
    }

    pub fn scale(&self, s: &Real) -> TruncSeries {
        TruncSeries {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add_constant(&self, c: &Real) -> TruncSeries {
        let mut out = self.clone();
        out.coeffs[0] += c;
        out
    }

    /// Cauchy product truncated at the smaller of the two orders.
    pub fn mul(&self, rhs: &TruncSeries) -> TruncSeries {
        let order = self.order().min(rhs.order());
        let coeffs = (0..=order)
            .map(|n| (0..=n).map(|k| &self.coeffs[k] * &rhs.coeffs[n - k]).sum())
            .collect();
        TruncSeries { coeffs }
    }

    pub fn add(&self, rhs: &TruncSeries) -> TruncSeries {
        let order = self.order().min(rhs.order());
        TruncSeries {
            coeffs: (0..=order).map(|k| &self.coeffs[k] + &rhs.coeffs[k]).collect(),
        }
    }

    /// `self^exponent`.
    ///
    /// Non-negative integer exponents use repeated squaring and accept any
    /// constant term. Negative integers need a nonzero constant term and
    /// fractional exponents a strictly positive one.
    pub fn pow(&self, exponent: Ratio<i64>) -> Result<TruncSeries> {
        let a0 = &self.coeffs[0];
        if exponent.is_integer() {
            let n = *exponent.numer();
            if n >= 0 {
                return Ok(self.pow_nonneg(n as u64));
            }
            if a0.is_zero() {
                return Err(PsletError::NonpositiveLeadingTerm { a0: 0.0 });
            }
            let b0 = a0.powi(n as i32);
            return Ok(self.pow_recurrence(&Real::from(n), b0));
        }
        if !a0.is_sign_positive() {
            return Err(PsletError::NonpositiveLeadingTerm { a0: a0.to_f64() });
        }
        let (p, q) = (*exponent.numer(), *exponent.denom());
        let b0 = a0.root(q as u32).powi(p as i32);
        let e = Real::ratio(p, q);
        Ok(self.pow_recurrence(&e, b0))
    }

    fn pow_nonneg(&self, mut n: u64) -> TruncSeries {
        let order = self.order();
        let mut acc = TruncSeries::constant(Real::one(), order);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `b = a^e` from `a b' = e a' b`:
    /// `n a0 b_n = sum_{k=1}^{n} ((e + 1) k - n) a_k b_{n-k}`.
    fn pow_recurrence(&self, e: &Real, b0: Real) -> TruncSeries {
        let a = &self.coeffs;
        let order = self.order();
        let e1 = e + 1.0;
        let mut b = Vec::with_capacity(order + 1);
        b.push(b0);
        for n in 1..=order {
            let mut s = Real::zero();
            for k in 1..=n {
                if a[k].is_zero() {
                    continue;
                }
                let w = &e1 * Real::from(k) - Real::from(n);
                s += w * &a[k] * &b[n - k];
            }
            b.push(s / (&a[0] * Real::from(n)));
        }
        TruncSeries { coeffs: b }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::eps_digits;

    fn r(x: i64) -> Real {
        Real::from(x)
    }

    fn poly(c: &[i64]) -> Poly {
        Poly::new(c.iter().map(|&x| r(x)).collect())
    }

    fn ts(c: &[i64], order: usize) -> TruncSeries {
        TruncSeries::new(c.iter().map(|&x| r(x)).collect(), order)
    }

    fn assert_close(a: &Real, b: &Real, digits: i32) {
        assert!((a - b).abs() < eps_digits(digits), "{a} vs {b}");
    }

    #[test]
    fn difference_of_squares() {
        assert_eq!(&poly(&[1, 1]) * &poly(&[1, -1]), poly(&[1, 0, -1]));
    }

    #[test]
    fn power_rule() {
        assert_eq!(poly(&[0, 0, 0, 1]).derivative(), poly(&[0, 0, 3]));
    }

    #[test]
    fn additive_inverse_is_zero_poly() {
        let z = &poly(&[0, 2]) + &poly(&[0, -2]);
        assert!(z.is_zero());
        assert_eq!(z.degree(), None);
    }

    #[test]
    fn integral_inverts_derivative() {
        let p = poly(&[0, 3, -2, 5]);
        assert_eq!(p.derivative().integral(), p);
    }

    #[test]
    fn binomial_square() {
        let s = ts(&[1, 1], 2);
        assert_eq!(s.mul(&s), ts(&[1, 2, 1], 2));
    }

    #[test]
    fn geometric_identity_truncated() {
        assert_eq!(ts(&[1, -1, 1], 2).mul(&ts(&[1, 1], 2)), ts(&[1], 2));
    }

    #[test]
    fn exponential_square() {
        // brute-force oracle: coefficients of e^{2t} are 2^k / k!
        let e = TruncSeries::new(
            (0..=3).map(|k| Real::one() / Real::factorial(k)).collect(),
            3,
        );
        let sq = e.mul(&e);
        let expect = [Real::one(), r(2), r(2), Real::ratio(4, 3)];
        for (a, b) in sq.coeffs().iter().zip(&expect) {
            assert_close(a, b, 38);
        }
    }

    #[test]
    fn product_order_is_minimum() {
        assert_eq!(ts(&[1, 1], 5).mul(&ts(&[1, 1], 2)).order(), 2);
    }

    #[test]
    fn geometric_series_from_inverse() {
        let s = ts(&[1, 1], 3).pow(Ratio::from_integer(-1)).unwrap();
        assert_eq!(s, ts(&[1, -1, 1, -1], 3));
    }

    #[test]
    fn perfect_square_root() {
        let s = ts(&[1, 2, 1], 2).pow(Ratio::new(1, 2)).unwrap();
        for (a, b) in s.coeffs().iter().zip(&[r(1), r(1), r(0)]) {
            assert_close(a, b, 38);
        }
    }

    #[test]
    fn inverse_sqrt_of_four_plus_t() {
        // symbolic oracle: (4 + t)^{-1/2} = 1/2 - t/16 + 3 t^2 / 256
        let s = ts(&[4, 1], 2).pow(Ratio::new(-1, 2)).unwrap();
        let expect = [Real::ratio(1, 2), Real::ratio(-1, 16), Real::ratio(3, 256)];
        for (a, b) in s.coeffs().iter().zip(&expect) {
            assert_close(a, b, 38);
        }
    }

    #[test]
    fn fractional_power_rejects_nonpositive_constant() {
        let err = ts(&[-1, 1], 2).pow(Ratio::new(1, 2)).unwrap_err();
        assert!(matches!(err, PsletError::NonpositiveLeadingTerm { .. }));
        assert!(ts(&[0, 1], 2).pow(Ratio::from_integer(-1)).is_err());
    }

    #[test]
    fn integer_power_accepts_negative_constant() {
        let s = ts(&[-2, 1], 2).pow(Ratio::from_integer(2)).unwrap();
        assert_eq!(s, ts(&[4, -4, 1], 2));
        let inv = ts(&[-2, 1], 2).pow(Ratio::from_integer(-1)).unwrap();
        assert_eq!(inv, TruncSeries::new(vec![Real::ratio(-1, 2), Real::ratio(-1, 4), Real::ratio(-1, 8)], 2));
    }
}
