//! Central potentials and their Taylor data.
//!
//! A potential is described by how it acts on the power series of
//! `r = r0 + t`: composing that series through the closed form yields the
//! Taylor expansion of `V(r0 + t)` to any order, and one code path serves
//! every member of the truncated-Coulomb family.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;

use crate::error::{PsletError, Result};
use crate::real::Real;
use crate::series::TruncSeries;

/// Highest Taylor order served by [`potential_derivatives`].
pub const DEFAULT_SERIES_CAP: usize = 24;

/// A spherically symmetric potential.
///
/// `compose` is the whole contract: given the series of `r` about some
/// point, return the series of `V(r)`. User potentials implement this trait
/// directly; [`value_f64`](Potential::value_f64) has a default that goes
/// through `compose` but built-in models override it with closed forms.
pub trait Potential: Send + Sync {
    fn compose(&self, r: &TruncSeries) -> Result<TruncSeries>;

    fn value(&self, r: &Real) -> Result<Real> {
        let s = self.compose(&TruncSeries::constant(r.clone(), 0))?;
        Ok(s.coeff(0).clone())
    }

    fn value_f64(&self, r: f64) -> f64 {
        self.value(&Real::from(r))
            .map(|v| v.to_f64())
            .unwrap_or(f64::NAN)
    }

    fn describe(&self) -> String;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PotentialKind {
    /// `-1 / (r^b + alpha^b)^{1/b}`
    TruncatedFamily { b: u32 },
    /// `-1 / (r + alpha)`
    CutoffCoulomb,
    /// `-1 / sqrt(r^2 + alpha^2)`
    LaserDressed,
    /// `-1 / r`
    Coulomb,
    /// `r^2 / 2`
    Harmonic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PotentialModel {
    kind: PotentialKind,
    alpha: f64,
}

impl PotentialModel {
    pub fn new(kind: PotentialKind, alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(PsletError::InvalidInput(format!(
                "truncation parameter must be finite and >= 0, got {alpha}"
            )));
        }
        if let PotentialKind::TruncatedFamily { b } = kind {
            if b == 0 {
                return Err(PsletError::InvalidInput("exponent b must be >= 1".into()));
            }
        }
        let alpha = match kind {
            PotentialKind::Coulomb | PotentialKind::Harmonic => 0.0,
            _ => alpha,
        };
        Ok(PotentialModel { kind, alpha })
    }

    pub fn cutoff_coulomb(alpha: f64) -> Result<Self> {
        Self::new(PotentialKind::CutoffCoulomb, alpha)
    }

    pub fn laser_dressed(alpha: f64) -> Result<Self> {
        Self::new(PotentialKind::LaserDressed, alpha)
    }

    pub fn family(b: u32, alpha: f64) -> Result<Self> {
        Self::new(PotentialKind::TruncatedFamily { b }, alpha)
    }

    pub fn coulomb() -> Self {
        PotentialModel {
            kind: PotentialKind::Coulomb,
            alpha: 0.0,
        }
    }

    pub fn harmonic() -> Self {
        PotentialModel {
            kind: PotentialKind::Harmonic,
            alpha: 0.0,
        }
    }

    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Same kind with a different truncation parameter.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.kind, alpha)
    }

    /// The spec string without alpha: `cutoff`, `laser`, `family:B`, ...
    pub fn kind_name(&self) -> String {
        match self.kind {
            PotentialKind::Coulomb => "coulomb".into(),
            PotentialKind::Harmonic => "harmonic".into(),
            PotentialKind::CutoffCoulomb => "cutoff".into(),
            PotentialKind::LaserDressed => "laser".into(),
            PotentialKind::TruncatedFamily { b } => format!("family:{b}"),
        }
    }

    /// True for the kinds that vanish at infinity.
    pub fn vanishes_at_infinity(&self) -> bool {
        !matches!(self.kind, PotentialKind::Harmonic)
    }

    fn alpha_real(&self) -> Real {
        Real::from_f64_decimal(self.alpha)
    }

    fn singular_at(&self, r0: &Real) -> bool {
        r0.is_zero()
            && (self.alpha == 0.0)
            && !matches!(self.kind, PotentialKind::Harmonic)
    }
}

impl Potential for PotentialModel {
    fn compose(&self, r: &TruncSeries) -> Result<TruncSeries> {
        let r0 = r.coeff(0);
        if self.singular_at(r0) || r0.is_sign_negative() {
            return Err(PsletError::SingularPoint { r: r0.to_f64() });
        }
        let minus_one = Real::from(-1);
        let s = match self.kind {
            PotentialKind::Coulomb => r.pow(Ratio::from_integer(-1))?.scale(&minus_one),
            PotentialKind::Harmonic => r.mul(r).scale(&Real::ratio(1, 2)),
            PotentialKind::CutoffCoulomb => r
                .add_constant(&self.alpha_real())
                .pow(Ratio::from_integer(-1))?
                .scale(&minus_one),
            PotentialKind::LaserDressed => {
                let a = self.alpha_real();
                r.mul(r)
                    .add_constant(&(&a * &a))
                    .pow(Ratio::new(-1, 2))?
                    .scale(&minus_one)
            }
            PotentialKind::TruncatedFamily { b } => {
                let ab = self.alpha_real().powi(b as i32);
                r.pow(Ratio::from_integer(i64::from(b)))?
                    .add_constant(&ab)
                    .pow(Ratio::new(-1, i64::from(b)))?
                    .scale(&minus_one)
            }
        };
        Ok(s)
    }

    fn value_f64(&self, r: f64) -> f64 {
        let a = self.alpha;
        match self.kind {
            PotentialKind::Coulomb => -1.0 / r,
            PotentialKind::Harmonic => 0.5 * r * r,
            PotentialKind::CutoffCoulomb => -1.0 / (r + a),
            PotentialKind::LaserDressed => -1.0 / (r * r + a * a).sqrt(),
            PotentialKind::TruncatedFamily { b } => {
                let b = b as i32;
                -1.0 / (r.powi(b) + a.powi(b)).powf(1.0 / f64::from(b))
            }
        }
    }

    fn describe(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for PotentialModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            PotentialKind::Coulomb => write!(f, "coulomb"),
            PotentialKind::Harmonic => write!(f, "harmonic"),
            PotentialKind::CutoffCoulomb => write!(f, "cutoff:{}", self.alpha),
            PotentialKind::LaserDressed => write!(f, "laser:{}", self.alpha),
            PotentialKind::TruncatedFamily { b } => write!(f, "family:{b}:{}", self.alpha),
        }
    }
}

/// Parses `cutoff:ALPHA`, `laser:ALPHA`, `family:B:ALPHA`, `coulomb` or
/// `harmonic`. The kind may also appear without its alpha (`cutoff`), in
/// which case alpha defaults to zero and is normally supplied separately.
impl FromStr for PotentialModel {
    type Err = PsletError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| PsletError::InvalidInput(format!("potential spec {s:?}: {why}"));
        let parts: Vec<&str> = s.trim().split(':').map(str::trim).collect();
        let alpha_at = |i: usize| -> Result<f64> {
            match parts.get(i) {
                None => Ok(0.0),
                Some(t) => t.parse::<f64>().map_err(|_| bad("alpha is not a number")),
            }
        };
        let model = match parts[0].to_ascii_lowercase().as_str() {
            "coulomb" if parts.len() == 1 => PotentialModel::coulomb(),
            "harmonic" if parts.len() == 1 => PotentialModel::harmonic(),
            "cutoff" if parts.len() <= 2 => PotentialModel::cutoff_coulomb(alpha_at(1)?)?,
            "laser" if parts.len() <= 2 => PotentialModel::laser_dressed(alpha_at(1)?)?,
            "family" if (2..=3).contains(&parts.len()) => {
                let b = parts[1].parse::<u32>().map_err(|_| bad("b is not a positive integer"))?;
                PotentialModel::family(b, alpha_at(2)?)?
            }
            _ => return Err(bad("expected cutoff:A, laser:A, family:B:A, coulomb or harmonic")),
        };
        Ok(model)
    }
}

/// Raw derivatives `[V(r0), V'(r0), ..., V^(N)(r0)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeTable {
    pub r0: Real,
    pub derivs: Vec<Real>,
}

impl DerivativeTable {
    pub fn order(&self) -> usize {
        self.derivs.len() - 1
    }

    pub fn get(&self, n: usize) -> &Real {
        &self.derivs[n]
    }

    /// Taylor coefficient `V^(n)(r0) / n!`.
    pub fn taylor(&self, n: usize) -> Real {
        &self.derivs[n] / Real::factorial(n as u32)
    }
}

pub fn potential_derivatives(p: &dyn Potential, r0: &Real, n_max: usize) -> Result<DerivativeTable> {
    potential_derivatives_capped(p, r0, n_max, DEFAULT_SERIES_CAP)
}

/// [`potential_derivatives`] with an explicit series-order cap.
pub fn potential_derivatives_capped(
    p: &dyn Potential,
    r0: &Real,
    n_max: usize,
    cap: usize,
) -> Result<DerivativeTable> {
    if n_max > cap {
        return Err(PsletError::OrderOverflow { requested: n_max, cap });
    }
    if !r0.is_sign_positive() {
        return Err(PsletError::SingularPoint { r: r0.to_f64() });
    }
    let series = p.compose(&TruncSeries::variable(r0.clone(), n_max))?;
    let mut fact = Real::one();
    let derivs = series
        .into_coeffs()
        .into_iter()
        .enumerate()
        .map(|(k, c)| {
            if k > 0 {
                fact *= Real::from(k);
            }
            c * &fact
        })
        .collect::<Vec<_>>();
    if let Some(bad) = derivs.iter().find(|d| !d.is_finite()) {
        return Err(PsletError::InvalidInput(format!("non-finite derivative {bad}")));
    }
    Ok(DerivativeTable {
        r0: r0.clone(),
        derivs,
    })
}

pub fn potential_value(p: &dyn Potential, r: &Real) -> Result<Real> {
    p.value(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::eps_digits;

    fn close(a: &Real, b: &Real, digits: i32) -> bool {
        (a - b).abs() < eps_digits(digits)
    }

    #[test]
    fn closed_form_values() {
        let v = PotentialModel::cutoff_coulomb(1.0).unwrap().value(&Real::one()).unwrap();
        assert!(close(&v, &Real::ratio(-1, 2), 38));
        let v = PotentialModel::laser_dressed(3.0).unwrap().value(&Real::from(4)).unwrap();
        assert!(close(&v, &Real::ratio(-1, 5), 38));
        let v = PotentialModel::family(1, 0.1).unwrap().value(&Real::parse_decimal("0.9").unwrap()).unwrap();
        assert!(close(&v, &Real::from(-1), 38));
    }

    #[test]
    fn coulomb_singular_at_origin() {
        let err = PotentialModel::coulomb().value(&Real::zero()).unwrap_err();
        assert!(matches!(err, PsletError::SingularPoint { .. }));
        // alpha > 0 makes the origin regular
        let v = PotentialModel::cutoff_coulomb(2.0).unwrap().value(&Real::zero()).unwrap();
        assert!(close(&v, &Real::ratio(-1, 2), 38));
    }

    #[test]
    fn coulomb_derivatives() {
        let t = potential_derivatives(&PotentialModel::coulomb(), &Real::one(), 3).unwrap();
        let expect = [-1, 1, -2, 6];
        for (d, e) in t.derivs.iter().zip(expect) {
            assert!(close(d, &Real::from(e), 37));
        }
    }

    #[test]
    fn cutoff_derivatives() {
        let p = PotentialModel::cutoff_coulomb(1.0).unwrap();
        let t = potential_derivatives(&p, &Real::one(), 2).unwrap();
        let expect = [Real::ratio(-1, 2), Real::ratio(1, 4), Real::ratio(-1, 4)];
        for (d, e) in t.derivs.iter().zip(&expect) {
            assert!(close(d, e, 37));
        }
    }

    #[test]
    fn order_cap_enforced() {
        let err = potential_derivatives(&PotentialModel::coulomb(), &Real::one(), 25).unwrap_err();
        assert_eq!(err, PsletError::OrderOverflow { requested: 25, cap: 24 });
        assert!(potential_derivatives_capped(&PotentialModel::coulomb(), &Real::one(), 30, 32).is_ok());
    }

    #[test]
    fn spec_strings_round_trip() {
        for s in ["cutoff:1.5", "laser:200", "family:3:0.25", "coulomb", "harmonic"] {
            let p: PotentialModel = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
        assert!("cutoff:x".parse::<PotentialModel>().is_err());
        assert!("family:0:1".parse::<PotentialModel>().is_err());
        assert!("yukawa:1".parse::<PotentialModel>().is_err());
        assert!("cutoff:-1".parse::<PotentialModel>().is_err());
    }

    #[test]
    fn f64_closed_forms_match_series_path() {
        let models = [
            PotentialModel::cutoff_coulomb(0.7).unwrap(),
            PotentialModel::laser_dressed(2.5).unwrap(),
            PotentialModel::family(3, 1.5).unwrap(),
            PotentialModel::coulomb(),
            PotentialModel::harmonic(),
        ];
        for p in &models {
            for r in [0.3, 1.0, 7.5] {
                let hi = p.value(&Real::from(r)).unwrap().to_f64();
                assert!((hi - p.value_f64(r)).abs() < 1e-14 * hi.abs().max(1.0), "{p} at {r}");
            }
        }
    }
}
