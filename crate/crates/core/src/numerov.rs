//! Reference eigenvalues by Numerov shooting in double precision.
//!
//! The radial equation `u'' = [l(l+1)/r^2 + 2(V - E)] u` is integrated on a
//! logarithmic grid `r = e^s` with `u = e^{s/2} phi`, which turns it into
//! `phi'' = [(l + 1/2)^2 + 2 r^2 (V - E)] phi` with no first-derivative
//! term. Uniform steps in `s` resolve the origin and the far tail equally.

use crate::error::{PsletError, Result};
use crate::leading::{solve_leading_order, StateSpec};
use crate::potential::Potential;
use crate::real::with_digits;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    /// WKB decay exponent accumulated between the turning point and `r_max`;
    /// for a potential vanishing at infinity this is `r_max` in units of
    /// `1 / sqrt(2|E|)`.
    pub r_max_factor: f64,
    pub points: usize,
    pub match_fraction: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            r_max_factor: 40.0,
            points: 40_000,
            match_fraction: 1.0,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.points < 1000 {
            return Err(PsletError::InvalidInput(format!(
                "grid needs at least 1000 points, got {}",
                self.points
            )));
        }
        if self.r_max_factor.is_nan() || self.r_max_factor < 10.0 {
            return Err(PsletError::InvalidInput(format!(
                "r_max_factor must be at least 10, got {}",
                self.r_max_factor
            )));
        }
        if !(self.match_fraction > 0.0 && self.match_fraction.is_finite()) {
            return Err(PsletError::InvalidInput(format!(
                "match_fraction must be positive, got {}",
                self.match_fraction
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub energy: f64,
    pub nodes_found: u32,
    /// The grid of the finest resolution used.
    pub grid: GridSpec,
    pub richardson_error: f64,
}

/// `r_min / r_max`; small enough that starting from the pure power law is
/// exact to double precision.
const SPAN: f64 = 1e-10;
const MAX_DOUBLINGS: u32 = 6;

/// Grid geometry fixed by a reference energy, independent of resolution.
#[derive(Clone, Debug)]
struct Geometry {
    l: u32,
    s_min: f64,
    s_max: f64,
    /// Matching point in `s`.
    s_match: f64,
}

impl Geometry {
    fn new(p: &dyn Potential, e_ref: f64, l: u32, g: &GridSpec) -> Result<Self> {
        let lang = (f64::from(l) + 0.5).powi(2);
        let gfun = |r: f64| lang + 2.0 * r * r * (p.value_f64(r) - e_ref);

        // outermost sign change of g on a coarse logarithmic sweep
        let (lo_exp, hi_exp, per_decade) = (-8i32, 12i32, 200i32);
        let sample = |k: i32| 10f64.powf(f64::from(k) / f64::from(per_decade));
        let mut last_allowed = None;
        for k in (lo_exp * per_decade)..=(hi_exp * per_decade) {
            if gfun(sample(k)) < 0.0 {
                last_allowed = Some(k);
            }
        }
        let k = last_allowed.ok_or_else(|| {
            PsletError::InvalidInput(format!(
                "energy {e_ref} has no classically allowed region for l = {l}"
            ))
        })?;
        if k == hi_exp * per_decade {
            return Err(PsletError::GridUnderflow {
                turning: f64::INFINITY,
                r_max: sample(k),
            });
        }
        let (mut a, mut b) = (sample(k), sample(k + 1));
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if gfun(mid) < 0.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
        let turning = 0.5 * (a + b);

        // march outward until the WKB exponent reaches r_max_factor
        let ds = 1e-3;
        let mut s = turning.ln();
        let mut exponent = 0.0;
        let cap = (10f64.powi(hi_exp)).ln();
        while exponent < g.r_max_factor {
            let gm = gfun((s + 0.5 * ds).exp()).max(0.0);
            exponent += gm.sqrt() * ds;
            s += ds;
            if s > cap {
                return Err(PsletError::GridUnderflow {
                    turning,
                    r_max: s.exp(),
                });
            }
        }
        let r_max = s.exp();
        let r_match = turning * g.match_fraction;
        if r_match >= r_max {
            return Err(PsletError::GridUnderflow { turning: r_match, r_max });
        }
        Ok(Geometry {
            l,
            s_min: (r_max * SPAN).ln(),
            s_max: s,
            s_match: r_match.ln(),
        })
    }

    fn discretize(&self, p: &dyn Potential, points: usize) -> Grid {
        let h = (self.s_max - self.s_min) / points as f64;
        let (mut two_r2v, mut two_r2) = (Vec::with_capacity(points + 1), Vec::with_capacity(points + 1));
        for i in 0..=points {
            let r = (self.s_min + h * i as f64).exp();
            two_r2.push(2.0 * r * r);
            two_r2v.push(2.0 * r * r * p.value_f64(r));
        }
        let m = ((self.s_match - self.s_min) / h).round() as usize;
        Grid {
            lang: (f64::from(self.l) + 0.5).powi(2),
            h,
            two_r2v,
            two_r2,
            m: m.clamp(2, points - 2),
        }
    }
}

struct Grid {
    lang: f64,
    h: f64,
    two_r2v: Vec<f64>,
    two_r2: Vec<f64>,
    m: usize,
}

const RESCALE: f64 = 1e150;

impl Grid {
    fn n(&self) -> usize {
        self.two_r2.len() - 1
    }

    fn g(&self, i: usize, e: f64) -> f64 {
        self.lang + self.two_r2v[i] - e * self.two_r2[i]
    }

    /// Numerov in summed form on `y = (1 - h^2 g / 12) phi`: the first
    /// difference of `y` is carried explicitly and gains `h^2 g phi` per
    /// step, which keeps roundoff from growing with the grid size.
    ///
    /// Steps along `indices` starting from `phi0, phi1` at the first two;
    /// returns sign changes and the last three values of `phi`.
    fn march(&self, e: f64, mut indices: impl Iterator<Item = usize>, phi0: f64, phi1: f64) -> (u32, [f64; 3]) {
        let h2 = self.h * self.h;
        let (i0, i1) = (indices.next().unwrap(), indices.next().unwrap());
        let (g0, g1) = (self.g(i0, e), self.g(i1, e));
        let mut y = phi1 * (1.0 - h2 * g1 / 12.0);
        let mut d = y - phi0 * (1.0 - h2 * g0 / 12.0);
        let mut g_cur = g1;
        let mut last = [0.0, phi0, phi1];
        let mut nodes = 0;
        for i in indices {
            let phi_cur = last[2];
            d += h2 * g_cur * phi_cur;
            y += d;
            g_cur = self.g(i, e);
            let phi = y / (1.0 - h2 * g_cur / 12.0);
            if phi != 0.0 && (phi < 0.0) != (phi_cur < 0.0) {
                nodes += 1;
            }
            last = [last[1], last[2], phi];
            if phi.abs() > RESCALE {
                y /= RESCALE;
                d /= RESCALE;
                for v in &mut last {
                    *v /= RESCALE;
                }
            }
        }
        (nodes, last)
    }

    /// Outward from the power-law start through index `end`.
    fn outward(&self, e: f64, end: usize) -> (u32, [f64; 3]) {
        self.march(e, 0..=end, 1.0, (self.lang.sqrt() * self.h).exp())
    }

    /// Inward from the decaying tail through index `end`; returns
    /// `phi[end..=end+2]`.
    fn inward(&self, e: f64, end: usize) -> [f64; 3] {
        let n = self.n();
        let step = (self.g(n, e).max(0.0).sqrt() * self.h).exp();
        let (_, v) = self.march(e, (end..=n).rev(), 1.0, step);
        [v[2], v[1], v[0]]
    }

    /// Nodes of the outward solution below the matching point and the
    /// difference of the two logarithmic derivatives `d ln phi / ds` there.
    fn shoot(&self, e: f64) -> (u32, f64) {
        let m = self.m;
        let (nodes_to_m1, out) = self.outward(e, m + 1);
        let inn = self.inward(e, m - 1);
        // a sign change between m and m+1 belongs beyond the matching point
        let nodes = nodes_to_m1 - u32::from((out[2] < 0.0) != (out[1] < 0.0) && out[2] != 0.0);
        let logd = |v: &[f64; 3]| (v[2] - v[0]) / (2.0 * self.h * v[1]);
        (nodes, logd(&out) - logd(&inn))
    }

    /// Number of Dirichlet eigenvalues of the grid problem below `e`.
    fn count(&self, e: f64) -> u32 {
        self.outward(e, self.n()).0
    }
}

/// Shoots at trial energy `e` on a grid laid out for `e` itself.
pub fn integrate_radial(p: &dyn Potential, e: f64, s: StateSpec, g: &GridSpec) -> Result<(u32, f64)> {
    g.validate()?;
    let geo = Geometry::new(p, e, s.l, g)?;
    Ok(geo.discretize(p, g.points).shoot(e))
}

fn solve_on_grid(grid: &Grid, s: StateSpec, e_guess: f64, limit: f64) -> Result<f64> {
    let nr = s.nr;
    let no_state = || PsletError::NoBoundState { l: s.l, nr };
    let width = 0.5 * e_guess.abs().max(f64::MIN_POSITIVE);
    let mut lo = e_guess - width;
    let mut hi = (e_guess + width).min(limit);
    let mut steps = 0;
    while grid.count(lo) > nr {
        lo -= width * f64::from(1u32 << steps.min(30));
        steps += 1;
        if steps > 80 || !lo.is_finite() {
            return Err(no_state());
        }
    }
    steps = 0;
    while grid.count(hi) <= nr {
        hi = if limit.is_finite() {
            hi + 0.5 * (limit - hi)
        } else {
            hi + width * f64::from(1u32 << steps.min(30))
        };
        steps += 1;
        if steps > 80 || hi >= limit {
            return Err(no_state());
        }
    }

    // narrow by node counting, then converge on the mismatch
    let scale = lo.abs().max(hi.abs());
    while hi - lo > 1e-4 * scale {
        let mid = 0.5 * (lo + hi);
        if grid.count(mid) <= nr {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (_, mut f_lo) = grid.shoot(lo);
    let (_, mut f_hi) = grid.shoot(hi);
    let tol = 1e-15 * scale.max(1e-300);
    if f_lo.is_finite() && f_hi.is_finite() && (f_lo < 0.0) != (f_hi < 0.0) {
        // Illinois variant of regula falsi
        let (mut a, mut b) = (lo, hi);
        let mut side = 0i8;
        for _ in 0..200 {
            let c = (a * f_hi - b * f_lo) / (f_hi - f_lo);
            let (_, fc) = grid.shoot(c);
            if fc == 0.0 || (b - a).abs() < tol {
                return Ok(c);
            }
            if (fc < 0.0) == (f_hi < 0.0) {
                b = c;
                f_hi = fc;
                if side == 1 {
                    f_lo *= 0.5;
                }
                side = 1;
            } else {
                a = c;
                f_lo = fc;
                if side == -1 {
                    f_hi *= 0.5;
                }
                side = -1;
            }
            if (b - a).abs() < tol {
                return Ok(0.5 * (a + b));
            }
        }
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if grid.count(mid) <= nr {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn reference_energy(p: &dyn Potential, s: StateSpec) -> Result<f64> {
    let sol = with_digits(30, || solve_leading_order(p, s))?;
    Ok(sol.leading_energy().to_f64())
}

/// Upper end of the bound spectrum: the potential's value far away.
fn continuum_threshold(p: &dyn Potential) -> f64 {
    let v = p.value_f64(1e15);
    if v.is_finite() && v.abs() < 1e-6 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Eigenvalue of the discretized problem at a single resolution.
pub fn eigenvalue_on_grid(p: &dyn Potential, s: StateSpec, g: &GridSpec) -> Result<f64> {
    g.validate()?;
    let e_ref = reference_energy(p, s)?;
    let geo = Geometry::new(p, e_ref, s.l, g)?;
    solve_on_grid(&geo.discretize(p, g.points), s, e_ref, continuum_threshold(p))
}

/// Richardson-extrapolated eigenvalue with `nr` nodes, doubling the grid
/// until the fourth-order error model estimates less than `tol`.
pub fn oracle_eigenvalue(p: &dyn Potential, s: StateSpec, tol: f64) -> Result<OracleResult> {
    oracle_eigenvalue_with(p, s, tol, &GridSpec::default())
}

pub fn oracle_eigenvalue_with(p: &dyn Potential, s: StateSpec, tol: f64, g: &GridSpec) -> Result<OracleResult> {
    g.validate()?;
    let e_ref = reference_energy(p, s)?;
    let limit = continuum_threshold(p);
    let geo = Geometry::new(p, e_ref, s.l, g)?;
    let mut points = g.points;
    let mut e1 = solve_on_grid(&geo.discretize(p, points), s, e_ref, limit)?;
    let mut best = (e1, f64::INFINITY, points);
    for _ in 0..MAX_DOUBLINGS {
        points *= 2;
        let e2 = solve_on_grid(&geo.discretize(p, points), s, e1, limit)?;
        let err = (e2 - e1).abs() / 15.0;
        let extrapolated = e2 + (e2 - e1) / 15.0;
        if err < best.1 {
            best = (extrapolated, err, points);
        }
        if err < tol {
            break;
        }
        e1 = e2;
    }
    let (energy, richardson_error, points) = best;
    let grid = GridSpec { points, ..*g };
    let nodes_found = geo.discretize(p, points).shoot(energy).0;
    Ok(OracleResult {
        energy,
        nodes_found,
        grid,
        richardson_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::PotentialModel;

    #[test]
    fn grid_validation() {
        assert!(GridSpec::default().validate().is_ok());
        let bad = GridSpec { points: 999, ..GridSpec::default() };
        assert!(bad.validate().is_err());
        let bad = GridSpec { r_max_factor: 9.0, ..GridSpec::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn hydrogen_ground_state_shot() {
        let p = PotentialModel::coulomb();
        let s = StateSpec::new(0, 0);
        let (nodes, mismatch) = integrate_radial(&p, -0.5, s, &GridSpec::default()).unwrap();
        assert_eq!(nodes, 0);
        assert!(mismatch.abs() < 1e-6, "{mismatch}");
        let (_, off) = integrate_radial(&p, -0.4, s, &GridSpec::default()).unwrap();
        assert!(off.abs() > 1e-2, "{off}");
    }

    #[test]
    fn oscillator_ground_state_shot() {
        let p = PotentialModel::harmonic();
        let (nodes, mismatch) = integrate_radial(&p, 1.5, StateSpec::new(0, 0), &GridSpec::default()).unwrap();
        assert_eq!(nodes, 0);
        assert!(mismatch.abs() < 1e-6, "{mismatch}");
    }

    #[test]
    fn hydrogen_eigenvalues() {
        let p = PotentialModel::coulomb();
        for (l, nr) in [(0, 0), (0, 1), (2, 1)] {
            let r = oracle_eigenvalue(&p, StateSpec::new(l, nr), 1e-10).unwrap();
            let n = f64::from(l + nr + 1);
            assert!((r.energy + 0.5 / (n * n)).abs() < 1e-10, "{l} {nr} {}", r.energy);
            assert_eq!(r.nodes_found, nr);
            assert!(r.richardson_error < 1e-10);
        }
    }

    #[test]
    fn turning_point_beyond_grid() {
        let p = PotentialModel::coulomb();
        let g = GridSpec { match_fraction: 1e9, ..GridSpec::default() };
        let err = integrate_radial(&p, -0.5, StateSpec::new(0, 0), &g).unwrap_err();
        assert!(matches!(err, PsletError::GridUnderflow { .. }));
    }
}
