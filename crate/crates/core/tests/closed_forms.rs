//! Hand-derived nr = 1 coefficients checked against the generic solver.

use proptest::prelude::*;
use pslet_core::{compute_expansion, PotentialKind, PotentialModel, Real, StateSpec};

fn rel(a: &Real, b: &Real) -> f64 {
    let scale = a.abs().max(b.abs()).max(Real::from(1e-30));
    ((a - b).abs() / scale).to_f64()
}

/// Residuals of the closed forms for the lowest orders of an nr = 1 state.
fn closed_form_residuals(p: &PotentialModel, l: u32) -> Vec<(&'static str, f64)> {
    let e = compute_expansion(p, StateSpec::new(l, 1), 8).unwrap();
    let sol = &e.solution;
    let (w, beta) = (&sol.omega, &sol.beta);
    let c = &e.coeffs;
    let (b1, b2) = (e.series.b(1), e.series.b(2));
    let two_beta_1 = beta * 2.0 + 1.0;

    let c10 = -(b1 / w);
    let c00 = (&c10 * 2.0 + &two_beta_1) / w;
    let a1 = -(&c00 / w);
    let d22 = (&c10 * &c10 / 2.0 - b2) / w;
    let d12 = (&d22 * 2.5 + &c00 * &c10 - &two_beta_1 * 1.5) / w;
    let terms = [beta * (beta + 1.0) / 2.0, &a1 * &c10, -(&d12 * 1.5), -(&c00 * &c00 / 2.0)];
    let r0sq = &sol.r0 * &sol.r0;
    // E^(0) can be small against its terms, so measure it on their scale
    let e0_scale = terms.iter().fold(Real::zero(), |acc, t| acc + t.abs()) / &r0sq;
    let e0 = terms.iter().fold(Real::zero(), |acc, t| acc + t) / &r0sq;

    vec![
        ("D_{1,0}", rel(&c.d(1, 0), &-w.clone())),
        ("a_0^(0)", c.a(0, 0).abs().to_f64()),
        ("C_{1,0}", rel(&c.c(1, 0), &c10)),
        ("C_{0,0}", rel(&c.c(0, 0), &c00)),
        ("a_0^(1)", rel(&c.a(0, 1), &a1)),
        ("D_{2,2}", rel(&c.d(2, 2), &d22)),
        ("D_{1,2}", rel(&c.d(1, 2), &d12)),
        ("E^(0)", ((&e.energies[0] - &e0).abs() / e0_scale).to_f64()),
    ]
}

#[test]
fn coulomb_2s_closed_forms_give_zero_correction() {
    let p = PotentialModel::coulomb();
    for (name, r) in closed_form_residuals(&p, 0) {
        assert!(r < 1e-32, "{name}: {r}");
    }
}

fn potential() -> impl Strategy<Value = PotentialModel> {
    let kind = prop_oneof![
        Just(PotentialKind::CutoffCoulomb),
        Just(PotentialKind::LaserDressed),
        (1u32..=4).prop_map(|b| PotentialKind::TruncatedFamily { b }),
    ];
    (kind, -1.3f64..2.3).prop_map(|(k, lg)| PotentialModel::new(k, 10f64.powf(lg)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn nr1_tables_match_closed_forms(p in potential(), l in 0u32..6) {
        for (name, r) in closed_form_residuals(&p, l) {
            prop_assert!(r < 1e-30, "{} {}: {}", p, name, r);
        }
    }
}
