//! [N/M] Pade approximants of the energy series in `u = 1/lbar`.

use crate::error::{PsletError, Result};
use crate::expansion::PsletExpansion;
use crate::real::{working_tolerance, Real};

/// `(p0 + p1 u + ... + pN u^N) / (1 + q1 u + ... + qM u^M)`.
#[derive(Clone, Debug)]
pub struct PadeApproximant {
    pub p: Vec<Real>,
    /// `q1 ... qM`; `q0 = 1` is implicit.
    pub q: Vec<Real>,
}

impl PadeApproximant {
    pub fn n(&self) -> usize {
        self.p.len() - 1
    }

    pub fn m(&self) -> usize {
        self.q.len()
    }

    pub fn numerator(&self, u: &Real) -> Real {
        horner(&self.p, u)
    }

    pub fn denominator(&self, u: &Real) -> Real {
        horner(&self.q, u) * u + 1.0
    }

    /// First `count` Maclaurin coefficients of the approximant.
    pub fn maclaurin(&self, count: usize) -> Vec<Real> {
        let mut c: Vec<Real> = Vec::with_capacity(count);
        for k in 0..count {
            let mut ck = self.p.get(k).cloned().unwrap_or_default();
            for (j, qj) in self.q.iter().enumerate() {
                if let Some(prev) = k.checked_sub(j + 1) {
                    ck -= qj * &c[prev];
                }
            }
            c.push(ck);
        }
        c
    }
}

fn horner(c: &[Real], u: &Real) -> Real {
    c.iter().rev().fold(Real::zero(), |acc, ci| acc * u + ci)
}

/// Fits `[n/m]` to `c0 ... c_{n+m}`.
///
/// The denominator comes from the `m` equations that cancel the orders
/// `u^{n+1} ... u^{n+m}`, solved by Gaussian elimination with full
/// pivoting; the numerator then follows by convolution.
pub fn pade_fit(c: &[Real], n: usize, m: usize) -> Result<PadeApproximant> {
    if c.len() != n + m + 1 {
        return Err(PsletError::InvalidInput(format!(
            "[{n}/{m}] needs {} coefficients, got {}",
            n + m + 1,
            c.len()
        )));
    }
    let coef = |i: isize| -> Real {
        if i < 0 {
            Real::zero()
        } else {
            c[i as usize].clone()
        }
    };
    let scale = c.iter().map(Real::abs).fold(Real::one(), Real::max);
    let mut a: Vec<Vec<Real>> = (0..m)
        .map(|row| {
            let k = (n + 1 + row) as isize;
            (1..=m).map(|j| coef(k - j as isize)).collect()
        })
        .collect();
    let mut rhs: Vec<Real> = (0..m).map(|row| -coef((n + 1 + row) as isize)).collect();
    let q = solve_full_pivot(&mut a, &mut rhs, &(working_tolerance(4) * &scale))
        .ok_or(PsletError::DegeneratePade { n, m })?;
    let p = (0..=n)
        .map(|i| {
            let mut pi = c[i].clone();
            for (j, qj) in q.iter().enumerate() {
                pi += qj * coef(i as isize - (j as isize + 1));
            }
            pi
        })
        .collect();
    Ok(PadeApproximant { p, q })
}

/// Solves `a x = b` in place; `None` when a pivot falls below `tiny`.
fn solve_full_pivot(a: &mut [Vec<Real>], b: &mut [Real], tiny: &Real) -> Option<Vec<Real>> {
    let m = b.len();
    let mut col_of: Vec<usize> = (0..m).collect();
    for k in 0..m {
        let (mut pr, mut pc) = (k, k);
        let mut best = Real::from(-1);
        for (i, row) in a.iter().enumerate().skip(k) {
            for (j, x) in row.iter().enumerate().skip(k) {
                let ax = x.abs();
                if ax > best {
                    best = ax;
                    pr = i;
                    pc = j;
                }
            }
        }
        if best <= *tiny {
            return None;
        }
        a.swap(k, pr);
        b.swap(k, pr);
        for row in a.iter_mut() {
            row.swap(k, pc);
        }
        col_of.swap(k, pc);
        for i in (k + 1)..m {
            let factor = &a[i][k] / &a[k][k];
            if factor.is_zero() {
                continue;
            }
            let (upper, lower) = a.split_at_mut(i);
            for (target, pivot) in lower[0][k..m].iter_mut().zip(&upper[k][k..m]) {
                *target -= &factor * pivot;
            }
            let t = &factor * &b[k];
            b[i] -= t;
        }
    }
    let mut y = vec![Real::zero(); m];
    for k in (0..m).rev() {
        let mut s = b[k].clone();
        for j in (k + 1)..m {
            s -= &a[k][j] * &y[j];
        }
        y[k] = s / &a[k][k];
    }
    let mut x = vec![Real::zero(); m];
    for (k, yk) in y.into_iter().enumerate() {
        x[col_of[k]] = yk;
    }
    Some(x)
}

/// Numerator over denominator; refuses points where the denominator
/// vanishes at working precision.
pub fn pade_eval(a: &PadeApproximant, u: &Real) -> Result<Real> {
    let den = a.denominator(u);
    let magnitude: Real = std::iter::once(Real::one())
        .chain(a.q.iter().enumerate().map(|(j, qj)| qj.abs() * u.abs().powi(j as i32 + 1)))
        .sum();
    if den.abs() < working_tolerance(4) * magnitude {
        return Err(PsletError::PoleAtEvaluation { u: u.to_f64() });
    }
    Ok(a.numerator(u) / den)
}

/// True if the denominator changes sign or vanishes on `(0, u]`, judged on
/// a uniform sample of the interval.
pub fn denominator_changes_sign(a: &PadeApproximant, u: &Real) -> bool {
    const SAMPLES: usize = 256;
    let d0 = a.denominator(&Real::zero());
    (1..=SAMPLES).any(|i| {
        let x = u * Real::ratio(i as i64, SAMPLES as i64);
        let d = a.denominator(&x);
        d.is_zero() || d.is_sign_negative() != d0.is_sign_negative()
    })
}

/// Which table entry produced an energy after degenerate fallbacks.
#[derive(Clone, Debug)]
pub struct PadeEnergy {
    pub energy: Real,
    pub approximant: PadeApproximant,
}

/// `lbar^2 E^(-2) + [n/m](1/lbar)` fitted to `E^(0) ... E^(n+m)`.
///
/// A singular denominator system drops to `[n/m-1]`, and so on down to the
/// plain partial sum `[n/0]`.
pub fn energy_pade(e: &PsletExpansion, n: usize, m: usize) -> Result<Real> {
    Ok(energy_pade_detailed(e, n, m)?.energy)
}

pub fn energy_pade_detailed(e: &PsletExpansion, n: usize, m: usize) -> Result<PadeEnergy> {
    if n + m > e.max_order {
        return Err(PsletError::OrderOutOfRange {
            requested: (n + m) as i32,
            min: 0,
            max: e.max_order as i32,
        });
    }
    let u = e.lbar().recip();
    let mut mm = m;
    let approximant = loop {
        match pade_fit(&e.energies[..=n + mm], n, mm) {
            Ok(a) => break a,
            Err(PsletError::DegeneratePade { .. }) if mm > 0 => mm -= 1,
            Err(err) => return Err(err),
        }
    };
    if denominator_changes_sign(&approximant, &u) {
        return Err(PsletError::PoleAtEvaluation { u: u.to_f64() });
    }
    let energy = e.solution.leading_energy() + pade_eval(&approximant, &u)?;
    Ok(PadeEnergy { energy, approximant })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::eps_digits;

    fn reals(c: &[f64]) -> Vec<Real> {
        c.iter().map(|&x| Real::from(x)).collect()
    }

    fn close(a: &Real, b: &Real, digits: i32) -> bool {
        (a - b).abs() < eps_digits(digits)
    }

    #[test]
    fn geometric_series_is_rational() {
        let a = pade_fit(&reals(&[1.0, -1.0]), 0, 1).unwrap();
        assert!(close(&a.p[0], &Real::one(), 38));
        assert!(close(&a.q[0], &Real::one(), 38));
        assert!(close(&pade_eval(&a, &Real::one()).unwrap(), &Real::ratio(1, 2), 38));
    }

    #[test]
    fn exponential_one_one() {
        let a = pade_fit(&reals(&[1.0, 1.0, 0.5]), 1, 1).unwrap();
        assert!(close(&a.p[1], &Real::ratio(1, 2), 38));
        assert!(close(&a.q[0], &Real::ratio(-1, 2), 38));
        let v = pade_eval(&a, &Real::from_f64_decimal(0.1)).unwrap();
        // (1 + 0.05) / (1 - 0.05) = 21/19
        assert!(close(&v, &Real::ratio(21, 19), 38));
        assert!((v.to_f64() - 0.1f64.exp()).abs() < 1e-3 * 0.1f64.powi(3) * 100.0);
    }

    #[test]
    fn recovers_rational_function() {
        // long-division oracle for (1 + u)/(1 + 2u + 3u^2)
        let mut c = vec![0.0f64; 4];
        let num = [1.0, 1.0];
        for k in 0..4 {
            let mut ck = if k < 2 { num[k] } else { 0.0 };
            if k >= 1 {
                ck -= 2.0 * c[k - 1];
            }
            if k >= 2 {
                ck -= 3.0 * c[k - 2];
            }
            c[k] = ck;
        }
        let a = pade_fit(&reals(&c), 1, 2).unwrap();
        for (x, e) in a.p.iter().chain(&a.q).zip([1.0, 1.0, 2.0, 3.0]) {
            assert!(close(x, &Real::from(e), 36));
        }
    }

    #[test]
    fn value_at_origin_is_leading_coefficient() {
        let a = pade_fit(&reals(&[0.7, -0.2, 0.3, 0.1, -0.05]), 2, 2).unwrap();
        assert!(close(&pade_eval(&a, &Real::zero()).unwrap(), &Real::from(0.7), 38));
    }

    #[test]
    fn singular_system_is_degenerate() {
        let err = pade_fit(&reals(&[1.0, 0.0, 0.0]), 1, 1).unwrap_err();
        assert_eq!(err, PsletError::DegeneratePade { n: 1, m: 1 });
        assert!(pade_fit(&reals(&[1.0, 2.0]), 1, 1).is_err());
    }

    #[test]
    fn pole_is_refused() {
        let a = pade_fit(&reals(&[1.0, -1.0]), 0, 1).unwrap();
        let err = pade_eval(&a, &Real::from(-1)).unwrap_err();
        assert!(matches!(err, PsletError::PoleAtEvaluation { .. }));
    }

    #[test]
    fn maclaurin_reproduces_input() {
        let c = reals(&[0.3, 1.1, -0.4, 0.25, 0.9, -1.3, 0.05]);
        let a = pade_fit(&c, 3, 3).unwrap();
        for (x, y) in a.maclaurin(7).iter().zip(&c) {
            assert!(close(x, y, 34));
        }
    }
}
