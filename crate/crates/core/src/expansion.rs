//! The shifted-l expansion proper.
//!
//! With `eps = lbar^{-1/2}` and the scaled coordinate
//! `x = lbar^{1/2} (r - r0) / r0`, the radial equation becomes
//!
//! ```text
//! [-1/2 d^2/dx^2 + sum_n v_n(x) eps^n] Psi = r0^2 sum_{n>=0} E^(n) eps^{2n+2} Psi
//! ```
//!
//! The wavefunction is written `Psi = F exp(U)` where `F` is a monic
//! polynomial of degree `nr` (its zeros are the radial nodes) and
//! `W = U' = sum_k W_k(x) eps^k`. Substituting gives, at each power of eps,
//! an equation that is linear in the new unknowns `W_k`, `F_k` and the energy
//! coefficient entering at that order. Its coupling to `W_k` runs through
//! `x F_0 W_k`, so matching powers of x from the top down solves the system
//! triangularly: powers above `nr` fix `W_k`, power `nr` fixes the energy and
//! the remaining powers fix the lower coefficients of `F_k`.

use crate::error::{PsletError, Result};
use crate::leading::{solve_leading_order, LeadingOrderSolution, StateSpec};
use crate::potential::{potential_derivatives_capped, Potential, DEFAULT_SERIES_CAP};
use crate::real::{with_digits, working_digits, working_tolerance, Real};
use crate::series::Poly;

pub const DEFAULT_MAX_ORDER: usize = 8;

/// The potential terms `v_n(x)` multiplying `eps^n`, and the anharmonic
/// coefficients `B_n` (coefficient of `x^{n+2}` in `v_n`).
#[derive(Clone, Debug)]
pub struct PerturbationSeries {
    pub v: Vec<Poly>,
    b: Vec<Real>,
}

impl PerturbationSeries {
    /// `B_n` for `1 <= n <= order`.
    pub fn b(&self, n: usize) -> &Real {
        assert!(n >= 1, "B_n starts at n = 1");
        &self.b[n - 1]
    }

    pub fn order(&self) -> usize {
        self.v.len() - 1
    }
}

/// Builds `v_0 ... v_K`.
///
/// `v_0 = Omega^2 x^2 / 2 + (2 beta + 1)/2`, and for `n >= 1`
/// `v_n = (-1)^n (2beta+1)(n+1)/2 x^n + (-1)^n beta(beta+1)(n-1)/2 x^{n-2} + B_n x^{n+2}`
/// with `B_n = (-1)^n (n+3)/2 + r0^{n+4} V^{(n+2)}(r0) / (Q (n+2)!)`.
pub fn build_perturbation_series(
    sol: &LeadingOrderSolution,
    p: &dyn Potential,
    k_max: usize,
) -> Result<PerturbationSeries> {
    if k_max < 2 {
        return Err(PsletError::InvalidInput(format!("series order {k_max} < 2")));
    }
    let table = potential_derivatives_capped(p, &sol.r0, k_max + 2, DEFAULT_SERIES_CAP.max(k_max + 2))?;
    let two_beta_1 = &sol.beta * 2.0 + 1.0;
    let beta_beta_1 = &sol.beta * (&sol.beta + 1.0);

    let mut v = Vec::with_capacity(k_max + 1);
    v.push(Poly::new(vec![
        &two_beta_1 * 0.5,
        Real::zero(),
        &sol.omega * &sol.omega * 0.5,
    ]));
    let mut b = Vec::with_capacity(k_max);
    let mut r0_pow = sol.r0.powi(5);
    for n in 1..=k_max {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let bn = Real::from((n + 3) as f64 * 0.5 * sign) + &r0_pow * table.taylor(n + 2) / &sol.q;
        r0_pow *= &sol.r0;
        let mut coeffs = vec![Real::zero(); n + 3];
        coeffs[n] = &two_beta_1 * ((n + 1) as f64 * 0.5 * sign);
        if n >= 2 {
            coeffs[n - 2] = &beta_beta_1 * ((n - 1) as f64 * 0.5 * sign);
        }
        coeffs[n + 2] = bn.clone();
        b.push(bn);
        v.push(Poly::new(coeffs));
    }
    Ok(PerturbationSeries { v, b })
}

/// Per-order pieces of `F = sum_k F_k eps^k` and `W = U' = sum_k W_k eps^k`.
///
/// `W_k` holds both the odd part (`D` coefficients of `U^(k)`) and the even
/// part (`C` coefficients of `G^(k-1)`).
#[derive(Clone, Debug)]
pub struct WavefunctionCoefficients {
    pub nr: u32,
    pub f: Vec<Poly>,
    pub w: Vec<Poly>,
}

impl WavefunctionCoefficients {
    /// `D_{m,n}`: coefficient of `x^{2m-1}` in `U^(n)`; zero for `m = 0`.
    pub fn d(&self, m: usize, n: usize) -> Real {
        if m == 0 {
            return Real::zero();
        }
        self.w[n].coeff(2 * m - 1)
    }

    /// `C_{m,n}`: coefficient of `x^{2m}` in `G^(n)`, which rides at
    /// `eps^{n+1}`.
    pub fn c(&self, m: usize, n: usize) -> Real {
        self.w[n + 1].coeff(2 * m)
    }

    /// `a_p^(n)`: coefficient of `x^p` (`p < nr`) in `F_n`.
    pub fn a(&self, p: usize, n: usize) -> Real {
        assert!(p < self.nr as usize, "a_p is defined for p < nr");
        self.f[n].coeff(p)
    }

    pub fn eps_order(&self) -> usize {
        self.w.len() - 1
    }
}

#[derive(Clone, Debug)]
pub struct PsletExpansion {
    pub solution: LeadingOrderSolution,
    pub series: PerturbationSeries,
    /// `E^(-1)`, zero by the choice of `beta`.
    pub e_minus1: Real,
    /// `E^(0) ... E^(max_order)`.
    pub energies: Vec<Real>,
    pub coeffs: WavefunctionCoefficients,
    pub max_order: usize,
}

impl PsletExpansion {
    /// `E^(n)` for `-2 <= n <= max_order`.
    pub fn energy_coefficient(&self, n: i32) -> Result<Real> {
        match n {
            -2 => Ok(self.solution.e_minus2.clone()),
            -1 => Ok(self.e_minus1.clone()),
            n if n >= 0 && (n as usize) <= self.max_order => Ok(self.energies[n as usize].clone()),
            _ => Err(PsletError::OrderOutOfRange {
                requested: n,
                min: -2,
                max: self.max_order as i32,
            }),
        }
    }

    /// `lambda^(n) = r0^2 E^(n)`.
    pub fn lambda(&self, n: usize) -> Real {
        &self.energies[n] * &self.solution.r0 * &self.solution.r0
    }

    pub fn lbar(&self) -> &Real {
        &self.solution.lbar
    }
}

/// Runs the leading-order solve and the expansion through `E^(max_order)`.
///
/// For `max_order` above the default the working precision is raised by
/// two digits per extra order.
pub fn compute_expansion(p: &dyn Potential, s: StateSpec, max_order: usize) -> Result<PsletExpansion> {
    let digits = working_digits() + 2 * max_order.saturating_sub(DEFAULT_MAX_ORDER) as u32;
    with_digits(digits, || {
        let sol = solve_leading_order(p, s)?;
        expand(p, sol, max_order)
    })
}

/// Expansion about an already solved leading order.
pub fn expand(p: &dyn Potential, sol: LeadingOrderSolution, max_order: usize) -> Result<PsletExpansion> {
    let k_max = 2 * max_order + 2;
    let series = build_perturbation_series(&sol, p, k_max)?;
    let solver = OrderSolver::new(&sol, &series);
    let (coeffs, rhs) = solver.run(k_max)?;
    let r0_sq = &sol.r0 * &sol.r0;
    let energies = (0..=max_order).map(|n| &rhs[2 * n + 2] / &r0_sq).collect();
    let e_minus1 = (&sol.beta + 0.5 + (Real::from(sol.state.nr) + 0.5) * &sol.omega) / &r0_sq;
    Ok(PsletExpansion {
        solution: sol,
        series,
        e_minus1,
        energies,
        coeffs,
        max_order,
    })
}

struct OrderSolver<'a> {
    omega: Real,
    nr: usize,
    v: &'a [Poly],
}

impl<'a> OrderSolver<'a> {
    fn new(sol: &LeadingOrderSolution, series: &'a PerturbationSeries) -> Self {
        OrderSolver {
            omega: sol.omega.clone(),
            nr: sol.state.nr as usize,
            v: &series.v,
        }
    }

    /// Monic Hermite-type polynomial solving `-F''/2 + Omega x F' - nr Omega F = 0`.
    fn base_polynomial(&self) -> Poly {
        let nr = self.nr;
        let mut c = vec![Real::zero(); nr + 1];
        c[nr] = Real::one();
        for p in (0..nr).rev() {
            if (nr - p).is_multiple_of(2) {
                let num = Real::from((p + 2) * (p + 1)) * &c[p + 2];
                c[p] = num / (&self.omega * (2.0 * (p as f64 - nr as f64)));
            }
        }
        Poly::new(c)
    }

    /// Coefficient of `x^power` in `F_0 (-W'/2 + Omega x W) - F_0' W`.
    fn coupling(&self, f0: &[Real], w: &[Real], power: usize) -> Real {
        let mut acc = Real::zero();
        for (m, fm) in f0.iter().enumerate() {
            if fm.is_zero() {
                continue;
            }
            if let Some(j) = power.checked_sub(m + 1) {
                if let Some(wj) = w.get(j) {
                    acc += fm * &self.omega * wj;
                }
            }
            if let Some(j) = (power + 1).checked_sub(m) {
                if let Some(wj) = w.get(j) {
                    acc -= fm * wj * ((power + m + 1) as f64 * 0.5);
                }
            }
        }
        acc
    }

    /// Returns the coefficient tables and `rhs[k]`, the energy term
    /// `r0^2 E^(k/2 - 1)` found at even `k` (zero elsewhere).
    fn run(&self, k_max: usize) -> Result<(WavefunctionCoefficients, Vec<Real>)> {
        let nr = self.nr;
        let half = Real::ratio(1, 2);
        let tol = working_tolerance(6);

        let f0 = self.base_polynomial();
        let w0 = Poly::new(vec![Real::zero(), -&self.omega]);
        let w0_sq = &w0 * &w0;
        let s0 = &(&w0.derivative().scale(&-&half) - &w0_sq.scale(&half)) + &self.v[0];
        let order0 = &(&f0.derivative().derivative().scale(&-&half) - &(&f0.derivative() * &w0)) + &(&f0 * &s0);
        check_small(&order0, &tol, 0, "zeroth-order balance")?;

        let mut f = vec![f0.clone()];
        let mut w = vec![w0.clone()];
        // S_j = -W_j'/2 - (W^2)_j / 2 + v_j - rhs_j
        let mut s = vec![s0];
        let mut rhs = vec![Real::zero()];
        let f0c = f0.coeffs().to_vec();

        for k in 1..=k_max {
            let mut w_sq_known = Poly::zero();
            for a in 1..k {
                w_sq_known = &w_sq_known + &(&w[a] * &w[k - a]);
            }
            let s_partial = &w_sq_known.scale(&-&half) + &self.v[k];
            let mut known = &f0 * &s_partial;
            for i in 1..k {
                known = &known + &(&f[i] * &s[k - i]);
                known = &known - &(&f[i].derivative() * &w[k - i]);
            }
            let target = -&known;
            let scale = target.max_abs_coeff() + 1.0;
            let top = target.degree().unwrap_or(0);

            // powers above nr fix W_k from the top down
            let mut wk = vec![Real::zero(); top.saturating_sub(nr)];
            for power in ((nr + 1)..=top).rev() {
                let j = power - 1 - nr;
                let lin = self.coupling(&f0c, &wk, power);
                wk[j] = (target.coeff(power) - lin) / &self.omega;
            }
            for c in wk.iter_mut().skip(2 * k + 2) {
                check_scalar(c, &(&tol * &scale), k, "W_k beyond its degree cap")?;
                *c = Real::zero();
            }

            // power nr fixes the energy, lower powers the coefficients of F_k
            let mut energy = self.coupling(&f0c, &wk, nr) - target.coeff(nr);
            if k % 2 == 1 {
                check_scalar(&energy, &(&tol * &scale), k, "energy at odd order")?;
                energy = Real::zero();
            }
            let mut ak = vec![Real::zero(); nr];
            for power in (0..nr).rev() {
                let lin = self.coupling(&f0c, &wk, power);
                let above = ak.get(power + 2).cloned().unwrap_or_default();
                let num = target.coeff(power) - lin
                    + &energy * &f0c[power]
                    + above * ((power + 2) * (power + 1)) as f64 * 0.5;
                ak[power] = num / (&self.omega * (power as f64 - nr as f64));
            }

            let wk = Poly::new(wk);
            let fk = Poly::new(ak);
            check_parity(&wk, k + 1, &tol, k, "W_k parity")?;
            check_parity(&fk, nr + k, &tol, k, "F_k parity")?;

            let w_sq = &w_sq_known + &(&w0 * &wk).scale(&Real::from(2));
            let sk = &(&(&wk.derivative().scale(&-&half) - &w_sq.scale(&half)) + &self.v[k])
                - &Poly::constant(energy.clone());
            w.push(wk);
            f.push(fk);
            s.push(sk);
            rhs.push(energy);
        }

        Ok((
            WavefunctionCoefficients {
                nr: nr as u32,
                f,
                w,
            },
            rhs,
        ))
    }
}

fn check_scalar(x: &Real, tol: &Real, order: usize, what: &'static str) -> Result<()> {
    if x.abs() > *tol || !x.is_finite() {
        return Err(PsletError::InconsistentOrder {
            order,
            what,
            residual: x.to_f64(),
        });
    }
    Ok(())
}

fn check_small(p: &Poly, tol: &Real, order: usize, what: &'static str) -> Result<()> {
    check_scalar(&p.max_abs_coeff(), tol, order, what)
}

/// Coefficients whose power has the wrong parity relative to `parity` must
/// vanish.
fn check_parity(p: &Poly, parity: usize, tol: &Real, order: usize, what: &'static str) -> Result<()> {
    let scale = p.max_abs_coeff() + 1.0;
    for (j, c) in p.coeffs().iter().enumerate() {
        if (j + parity) % 2 == 1 {
            check_scalar(c, &(tol * &scale), order, what)?;
        }
    }
    Ok(())
}

/// `lbar^2 E^(-2) + sum_{n=0}^{upto} E^(n) / lbar^n`.
pub fn energy_partial_sum(e: &PsletExpansion, upto: i32) -> Result<Real> {
    if upto < -2 || upto > e.max_order as i32 {
        return Err(PsletError::OrderOutOfRange {
            requested: upto,
            min: -2,
            max: e.max_order as i32,
        });
    }
    let u = e.lbar().recip();
    let mut total = e.solution.leading_energy();
    let mut un = Real::one();
    for n in 0..=upto.max(-1) {
        total += &e.energies[n as usize] * &un;
        un *= &u;
    }
    Ok(total)
}

/// Largest coefficient of the substituted equation over every computed
/// order and power of x.
///
/// Rebuilds `v_n` from the potential and evaluates the equation as
/// `-(G' + G W)/2 + F (v - rhs)` with `G = F' + F W`, a grouping the solver
/// never uses.
pub fn residual_norm(e: &PsletExpansion, p: &dyn Potential) -> Result<Real> {
    let k_max = e.coeffs.eps_order();
    let series = build_perturbation_series(&e.solution, p, k_max)?;
    let r0_sq = &e.solution.r0 * &e.solution.r0;
    let rhs = |k: usize| -> Real {
        if k >= 2 && k.is_multiple_of(2) {
            &e.energies[k / 2 - 1] * &r0_sq
        } else {
            Real::zero()
        }
    };
    let (f, w) = (&e.coeffs.f, &e.coeffs.w);
    let mut g: Vec<Poly> = Vec::with_capacity(k_max + 1);
    let mut worst = Real::zero();
    for k in 0..=k_max {
        let mut gk = f[k].derivative();
        for (fa, wb) in f[..=k].iter().zip(w[..=k].iter().rev()) {
            gk = &gk + &(fa * wb);
        }
        g.push(gk);
        let mut lhs = g[k].derivative();
        for a in 0..=k {
            lhs = &lhs + &(&g[a] * &w[k - a]);
        }
        let mut res = lhs.scale(&Real::ratio(-1, 2));
        for (a, fa) in f[..=k].iter().enumerate() {
            let pot = &series.v[k - a] - &Poly::constant(rhs(k - a));
            res = &res + &(fa * &pot);
        }
        worst = worst.max(res.max_abs_coeff());
    }
    Ok(worst)
}

/// Unnormalised `Psi(r) = F(x) exp(U(x))` with `U(0) = 0`, both summed
/// through the computed eps order.
pub fn wavefunction_eval(e: &PsletExpansion, r: &Real) -> Real {
    let sol = &e.solution;
    let sqrt_lbar = sol.lbar.sqrt();
    let x = &sqrt_lbar * (r - &sol.r0) / &sol.r0;
    let eps = sqrt_lbar.recip();
    let mut f_val = Real::zero();
    let mut u_val = Real::zero();
    let mut eps_k = Real::one();
    for k in 0..=e.coeffs.eps_order() {
        f_val += e.coeffs.f[k].eval(&x) * &eps_k;
        u_val += e.coeffs.w[k].integral().eval(&x) * &eps_k;
        eps_k *= &eps;
    }
    f_val * u_val.exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::PotentialModel;
    use crate::real::eps_digits;

    fn close(a: &Real, b: &Real, digits: i32) -> bool {
        (a - b).abs() < eps_digits(digits)
    }

    #[test]
    fn coulomb_potential_terms() {
        let p = PotentialModel::coulomb();
        let sol = solve_leading_order(&p, StateSpec::new(0, 0)).unwrap();
        let series = build_perturbation_series(&sol, &p, 4).unwrap();
        let expect = |c: &[f64]| Poly::new(c.iter().map(|&x| Real::from(x)).collect());
        let diff = |a: &Poly, b: &Poly| (a - b).max_abs_coeff();
        assert!(diff(&series.v[0], &expect(&[-0.5, 0.0, 0.5])) < eps_digits(34));
        assert!(diff(&series.v[1], &expect(&[0.0, 1.0, 0.0, -1.0])) < eps_digits(34));
        assert!(close(series.b(2), &Real::ratio(3, 2), 34));
        // (-1)^2 (2 beta + 1) 3/2 x^2 with 2 beta + 1 = -1, and beta(beta+1) = 0
        assert!(diff(&series.v[2], &expect(&[0.0, 0.0, -1.5, 0.0, 1.5])) < eps_digits(34));
    }

    #[test]
    fn hydrogen_ground_state_is_exact() {
        let p = PotentialModel::coulomb();
        let e = compute_expansion(&p, StateSpec::new(0, 0), 8).unwrap();
        for (n, en) in e.energies.iter().enumerate() {
            assert!(en.abs() < eps_digits(30), "E^({n}) = {en}");
        }
        let total = energy_partial_sum(&e, 8).unwrap();
        assert!(close(&total, &Real::ratio(-1, 2), 30));
        assert!(residual_norm(&e, &p).unwrap() < eps_digits(30));
    }

    #[test]
    fn partial_sum_bounds() {
        let p = PotentialModel::coulomb();
        let e = compute_expansion(&p, StateSpec::new(1, 0), 4).unwrap();
        assert!(close(&energy_partial_sum(&e, -2).unwrap(), &e.solution.leading_energy(), 35));
        assert!(matches!(
            energy_partial_sum(&e, 5),
            Err(PsletError::OrderOutOfRange { requested: 5, .. })
        ));
        assert!(energy_partial_sum(&e, -3).is_err());
        assert!(e.energy_coefficient(9).is_err());
    }

    #[test]
    fn wavefunction_at_orbit_radius() {
        let e = compute_expansion(&PotentialModel::coulomb(), StateSpec::new(0, 0), 8).unwrap();
        let psi = wavefunction_eval(&e, &e.solution.r0);
        assert!(close(&psi, &Real::one(), 30));
    }

    #[test]
    fn base_polynomial_is_hermite() {
        // nr = 2: x^2 - 1/(2 Omega)
        let p = PotentialModel::harmonic();
        let e = compute_expansion(&p, StateSpec::new(0, 2), 2).unwrap();
        let f0 = &e.coeffs.f[0];
        assert!(close(&f0.coeff(0), &Real::ratio(-1, 4), 35));
        assert!(f0.coeff(1).is_zero());
        assert_eq!(f0.coeff(2), Real::one());
    }
}
