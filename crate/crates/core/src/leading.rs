//! Leading order of the shifted-l expansion: the orbit radius `r0`, the
//! oscillator frequency `Omega`, the shift `beta` and the classical energy.

use std::fmt;
use std::str::FromStr;

use crate::error::{PsletError, Result};
use crate::potential::{potential_derivatives, Potential};
use crate::real::{working_digits, Real};

/// Letters for `l = 0, 1, 2, ...` in spectroscopic labels (`j` is skipped).
const L_LETTERS: &[u8] = b"spdfghiklmnoqrtuvwxyz";

/// Angular momentum `l` and radial node count `nr`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateSpec {
    pub l: u32,
    pub nr: u32,
}

impl StateSpec {
    pub fn new(l: u32, nr: u32) -> Self {
        StateSpec { l, nr }
    }

    /// Principal quantum number `n = l + nr + 1`.
    pub fn principal(&self) -> u32 {
        self.l + self.nr + 1
    }

    /// Spectroscopic label such as `3p`, if `l` has a letter.
    pub fn label(&self) -> Option<String> {
        let letter = *L_LETTERS.get(self.l as usize)?;
        Some(format!("{}{}", self.principal(), letter as char))
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.label() {
            Some(label) => f.write_str(&label),
            None => write!(f, "{},{}", self.l, self.nr),
        }
    }
}

/// Accepts spectroscopic labels (`1s`, `3p`, `4f`) or an explicit `l,nr`.
impl FromStr for StateSpec {
    type Err = PsletError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || PsletError::InvalidInput(format!("state {s:?}: expected a label like 3p or l,nr"));
        if let Some((l, nr)) = s.split_once(',') {
            let l = l.trim().parse().map_err(|_| bad())?;
            let nr = nr.trim().parse().map_err(|_| bad())?;
            return Ok(StateSpec { l, nr });
        }
        let split = s.find(|c: char| !c.is_ascii_digit()).ok_or_else(bad)?;
        let (num, letter) = s.split_at(split);
        let n: u32 = num.parse().map_err(|_| bad())?;
        let mut chars = letter.chars();
        let c = chars.next().ok_or_else(bad)?.to_ascii_lowercase();
        if chars.next().is_some() {
            return Err(bad());
        }
        let l = L_LETTERS.iter().position(|&b| b as char == c).ok_or_else(bad)? as u32;
        if n < l + 1 {
            return Err(PsletError::InvalidInput(format!("state {s:?}: n must exceed l")));
        }
        Ok(StateSpec { l, nr: n - l - 1 })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LeadingOrderWarning {
    /// Several radii satisfy the orbit condition; the largest minimum was kept.
    MultiRoot { roots: Vec<f64> },
}

#[derive(Clone, Debug)]
pub struct LeadingOrderSolution {
    pub state: StateSpec,
    pub r0: Real,
    pub omega: Real,
    pub beta: Real,
    pub lbar: Real,
    /// Scale constant, fixed to `lbar^2`.
    pub q: Real,
    /// `1/(2 r0^2) + V(r0)/Q`; the classical energy is `lbar^2 * e_minus2`.
    pub e_minus2: Real,
    pub warnings: Vec<LeadingOrderWarning>,
}

impl LeadingOrderSolution {
    pub fn leading_energy(&self) -> Real {
        &self.lbar * &self.lbar * &self.e_minus2
    }
}

/// `Omega = sqrt(3 + r0 V''(r0) / V'(r0))`.
pub fn omega_at(p: &dyn Potential, r0: &Real) -> Result<Real> {
    let t = potential_derivatives(p, r0, 2)?;
    omega_from(r0, t.get(1), t.get(2))
}

fn omega_from(r0: &Real, v1: &Real, v2: &Real) -> Result<Real> {
    if !v1.is_sign_positive() {
        return Err(PsletError::NonbindingPoint {
            r0: r0.to_f64(),
            slope: v1.to_f64(),
        });
    }
    let radicand = r0 * v2 / v1 + 3.0;
    if !radicand.is_sign_positive() {
        return Err(PsletError::ImaginaryFrequency {
            r0: r0.to_f64(),
            radicand: radicand.to_f64(),
        });
    }
    Ok(radicand.sqrt())
}

/// `f(r0) = sqrt(r0^3 V'(r0)) - l - (1 + (2 nr + 1) Omega(r0)) / 2`.
pub fn r0_residual(p: &dyn Potential, s: StateSpec, r0: &Real) -> Result<Real> {
    Ok(residual_and_slope(p, s, r0, false)?.0)
}

/// The residual and, when asked, its analytic derivative in `r0`.
fn residual_and_slope(p: &dyn Potential, s: StateSpec, r: &Real, slope: bool) -> Result<(Real, Real)> {
    let t = potential_derivatives(p, r, if slope { 3 } else { 2 })?;
    let (v1, v2) = (t.get(1), t.get(2));
    let omega = omega_from(r, v1, v2)?;
    let r2 = r * r;
    let r3 = &r2 * r;
    let root = (&r3 * v1).sqrt();
    let shift = Real::from(s.l) + (Real::from(2 * s.nr + 1) * &omega + 1.0) * 0.5;
    let f = &root - shift;
    if !slope {
        return Ok((f, Real::zero()));
    }
    let v3 = t.get(3);
    let droot = (Real::from(3) * &r2 * v1 + &r3 * v2) / (&root * 2.0);
    let ratio = v2 / v1;
    let dratio = &ratio + r * v3 / v1 - r * &ratio * &ratio;
    let domega = dratio / (&omega * 2.0);
    Ok((f, droot - Real::from(2 * s.nr + 1) * domega * 0.5))
}

fn solution_at(p: &dyn Potential, s: StateSpec, r0: Real, warnings: Vec<LeadingOrderWarning>) -> Result<LeadingOrderSolution> {
    let omega = omega_at(p, &r0)?;
    let beta = -((Real::from(s.nr) + 0.5) * &omega + 0.5);
    let lbar = Real::from(s.l) - &beta;
    let q = &lbar * &lbar;
    let v = p.value(&r0)?;
    let e_minus2 = (&r0 * &r0 * 2.0).recip() + v / &q;
    Ok(LeadingOrderSolution {
        state: s,
        r0,
        omega,
        beta,
        lbar,
        q,
        e_minus2,
        warnings,
    })
}

/// `dE^(-2)/dr0` and `d^2E^(-2)/dr0^2` with `Q` held fixed.
pub fn leading_energy_slope_curvature(p: &dyn Potential, sol: &LeadingOrderSolution) -> Result<(Real, Real)> {
    let t = potential_derivatives(p, &sol.r0, 2)?;
    let r = &sol.r0;
    let slope = -(r * r * r).recip() + t.get(1) / &sol.q;
    let curvature = Real::from(3) / (r * r * r * r) + t.get(2) / &sol.q;
    Ok((slope, curvature))
}

const SCAN_MIN_EXP: i32 = -6;
const SCAN_MAX_EXP: i32 = 9;
const SCAN_PER_DECADE: i32 = 10;

/// Finds the orbit radius for state `s`.
///
/// Scans `[1e-6, 1e9]` geometrically for sign changes of [`r0_residual`],
/// bisects each bracket to 1e-6 relative width, then Newton-polishes with
/// the analytic slope at working precision.
pub fn solve_leading_order(p: &dyn Potential, s: StateSpec) -> Result<LeadingOrderSolution> {
    let ten = Real::from(10);
    let mut samples: Vec<(i32, Real, Real)> = Vec::new();
    for i in (SCAN_MIN_EXP * SCAN_PER_DECADE)..=(SCAN_MAX_EXP * SCAN_PER_DECADE) {
        let r = ten.powi(i).root(SCAN_PER_DECADE as u32);
        if let Ok(f) = r0_residual(p, s, &r) {
            samples.push((i, r, f));
        }
    }
    let mut brackets = Vec::new();
    for (i, r, f) in &samples {
        if f.is_zero() {
            brackets.push((r.clone(), r.clone()));
            continue;
        }
        // only adjacent grid points: the residual may be undefined in a gap
        let next = samples.iter().find(|(j, _, _)| *j == i + 1);
        if let Some((_, rb, fb)) = next {
            if !fb.is_zero() && f.is_sign_negative() != fb.is_sign_negative() {
                brackets.push((r.clone(), rb.clone()));
            }
        }
    }
    if brackets.is_empty() {
        return Err(PsletError::NoBindingRadius { l: s.l, nr: s.nr });
    }

    let mut roots = Vec::new();
    for (a, b) in brackets.iter().rev() {
        if let Ok(r) = refine_root(p, s, a.clone(), b.clone()) {
            roots.push(r);
        }
    }
    let summary: Vec<f64> = roots.iter().map(Real::to_f64).collect();
    let mut first_err = None;
    for r in roots {
        let warnings = if summary.len() > 1 {
            vec![LeadingOrderWarning::MultiRoot { roots: summary.clone() }]
        } else {
            Vec::new()
        };
        let sol = solution_at(p, s, r, warnings)?;
        let (_, curvature) = leading_energy_slope_curvature(p, &sol)?;
        if curvature.is_sign_positive() {
            return Ok(sol);
        }
        first_err.get_or_insert(PsletError::NotAMinimum {
            r0: sol.r0.to_f64(),
            curvature: curvature.to_f64(),
        });
    }
    Err(first_err.unwrap_or(PsletError::NoBindingRadius { l: s.l, nr: s.nr }))
}

fn refine_root(p: &dyn Potential, s: StateSpec, mut lo: Real, mut hi: Real) -> Result<Real> {
    let mut f_lo = r0_residual(p, s, &lo)?;
    if f_lo.is_zero() {
        return Ok(lo);
    }
    let rel = Real::from(1e-6);
    while &hi - &lo > &rel * &hi {
        let mid = (&lo + &hi) * 0.5;
        let f_mid = r0_residual(p, s, &mid)?;
        if f_mid.is_zero() {
            return Ok(mid);
        }
        if f_mid.is_sign_negative() == f_lo.is_sign_negative() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    let mut r = (&lo + &hi) * 0.5;
    let tol = Real::from(10).powi(-(working_digits() as i32 - 3));
    for _ in 0..200 {
        let (f, df) = residual_and_slope(p, s, &r, true)?;
        if df.is_zero() {
            break;
        }
        let step = &f / &df;
        let mut next = &r - &step;
        if next <= lo || next >= hi {
            // Newton left the bracket: fall back to its midpoint
            next = (&lo + &hi) * 0.5;
        }
        if f.is_sign_negative() == f_lo.is_sign_negative() {
            lo = r.clone();
        } else {
            hi = r.clone();
        }
        let done = (&next - &r).abs() <= &tol * &r;
        r = next;
        if done {
            break;
        }
    }
    Ok(r)
}
