use num_rational::Ratio;
use proptest::prelude::*;
use pslet_core::pade::{pade_fit, PadeApproximant};
use pslet_core::potential::potential_derivatives;
use pslet_core::{compute_expansion, energy_partial_sum, PotentialKind, PotentialModel, Real, StateSpec, TruncSeries};

fn series(c: &[f64]) -> TruncSeries {
    TruncSeries::new(c.iter().map(|&x| Real::from(x)).collect(), c.len() - 1)
}

fn max_diff(a: &TruncSeries, b: &TruncSeries) -> f64 {
    a.coeffs()
        .iter()
        .zip(b.coeffs())
        .map(|(x, y)| (x - y).abs().to_f64())
        .fold(0.0, f64::max)
}

fn coeffs(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, len)
}

proptest! {
    #[test]
    fn product_commutes_and_associates(a in coeffs(8), b in coeffs(8), c in coeffs(8)) {
        let (a, b, c) = (series(&a), series(&b), series(&c));
        prop_assert!(max_diff(&a.mul(&b), &b.mul(&a)) < 1e-35);
        prop_assert!(max_diff(&a.mul(&b).mul(&c), &a.mul(&b.mul(&c))) < 1e-33);
    }

    #[test]
    fn fractional_power_inverts(a0 in 0.3f64..3.0, rest in coeffs(9), p in 1i64..6, q in 1i64..6) {
        let mut c = vec![a0];
        c.extend(rest);
        let a = series(&c);
        let e = Ratio::new(p, q);
        let back = a.pow(e).unwrap().pow(e.recip()).unwrap();
        prop_assert!(max_diff(&a, &back) < 1e-30 / a0.min(1.0).powi(10));
    }

    #[test]
    fn integer_power_matches_repeated_product(rest in coeffs(6), k in 0i64..5) {
        let mut c = vec![-1.5];
        c.extend(rest);
        let a = series(&c);
        let mut prod = TruncSeries::constant(Real::one(), a.order());
        for _ in 0..k {
            prod = prod.mul(&a);
        }
        prop_assert!(max_diff(&a.pow(Ratio::from_integer(k)).unwrap(), &prod) < 1e-30);
        prop_assert!(a.pow(Ratio::new(1, 2)).is_err());
    }

    #[test]
    fn derivatives_match_finite_differences(kind in 0usize..3, alpha in 0.05f64..20.0, r in 0.2f64..30.0) {
        let kind = [PotentialKind::CutoffCoulomb, PotentialKind::LaserDressed, PotentialKind::TruncatedFamily { b: 3 }][kind];
        let p = PotentialModel::new(kind, alpha).unwrap();
        let r0 = Real::from(r);
        let t = potential_derivatives(&p, &r0, 3).unwrap();
        let h = Real::from(1e-10 * r.max(1.0));
        for n in 0..3 {
            let up = potential_derivatives(&p, &(&r0 + &h), n).unwrap();
            let dn = potential_derivatives(&p, &(&r0 - &h), n).unwrap();
            let fd = (up.get(n) - dn.get(n)) / (&h * 2.0);
            let scale = t.get(n + 1).abs().max(t.get(n).abs() / &r0);
            prop_assert!(((fd - t.get(n + 1)).abs() / scale).to_f64() < 1e-18);
        }
    }

    #[test]
    fn pade_recovers_rational_functions(
        p in prop::collection::vec(-1.0f64..1.0, 1..=5),
        q in prop::collection::vec(-1.0f64..1.0, 0..=4),
    ) {
        let (n, m) = (p.len() - 1, q.len());
        let exact = PadeApproximant {
            p: p.iter().map(|&x| Real::from(x)).collect(),
            q: q.iter().map(|&x| Real::from(x)).collect(),
        };
        let c = exact.maclaurin(n + m + 1);
        if let Ok(fit) = pade_fit(&c, n, m) {
            for (a, b) in fit.p.iter().chain(&fit.q).zip(exact.p.iter().chain(&exact.q)) {
                prop_assert!((a - b).abs() < 1e-28, "{} vs {}", a, b);
            }
            for (a, b) in fit.maclaurin(n + m + 1).iter().zip(&c) {
                prop_assert!((a - b).abs() < 1e-30);
            }
        }
    }
}

#[test]
fn small_alpha_approaches_coulomb() {
    for kind in [PotentialKind::CutoffCoulomb, PotentialKind::LaserDressed] {
        let mut last = f64::INFINITY;
        for alpha in [1e-2, 1e-3, 1e-4, 1e-5] {
            let p = PotentialModel::new(kind, alpha).unwrap();
            let e = compute_expansion(&p, StateSpec::new(2, 0), 8).unwrap();
            let diff = (energy_partial_sum(&e, 8).unwrap() + 1.0 / 18.0).abs().to_f64();
            assert!(diff < last, "{kind:?} {alpha}: {diff}");
            last = diff;
        }
        assert!(last < 1e-5);
    }
}

#[test]
fn family_members_coincide_with_named_potentials() {
    let cases = [
        (PotentialModel::family(1, 0.7).unwrap(), PotentialModel::cutoff_coulomb(0.7).unwrap()),
        (PotentialModel::family(2, 0.7).unwrap(), PotentialModel::laser_dressed(0.7).unwrap()),
    ];
    for (a, b) in cases {
        let ea = compute_expansion(&a, StateSpec::new(1, 1), 8).unwrap();
        let eb = compute_expansion(&b, StateSpec::new(1, 1), 8).unwrap();
        for (x, y) in ea.energies.iter().zip(&eb.energies) {
            assert!((x - y).abs() < 1e-32);
        }
    }
}
