//! Potentials for which the expansion terminates: every correction beyond
//! the leading term vanishes.

use pslet_core::{compute_expansion, energy_partial_sum, energy_pade, residual_norm, PotentialModel, Real, StateSpec};

fn assert_exact(p: &PotentialModel, exact: impl Fn(u32, u32) -> Real) {
    for l in 0..=5 {
        for nr in 0..=5 {
            let e = compute_expansion(p, StateSpec::new(l, nr), 8).unwrap();
            assert!(e.e_minus1.abs() < 1e-36, "E(-1) {l} {nr}");
            for (n, c) in e.energies.iter().enumerate() {
                assert!(c.abs() < 1e-30, "{p} l={l} nr={nr} E({n}) = {c:.5}");
            }
            let total = energy_partial_sum(&e, 8).unwrap();
            assert!((&total - &exact(l, nr)).abs() < 1e-30, "{p} {l} {nr}: {total:.20}");
            let pade = energy_pade(&e, 4, 4).unwrap();
            assert!((&pade - &total).abs() < 1e-30);
            assert!(residual_norm(&e, p).unwrap() < 1e-30);
        }
    }
}

#[test]
fn coulomb_terminates() {
    assert_exact(&PotentialModel::coulomb(), |l, nr| {
        let n = i64::from(l + nr + 1);
        Real::ratio(-1, 2 * n * n)
    });
}

#[test]
fn oscillator_terminates() {
    assert_exact(&PotentialModel::harmonic(), |l, nr| Real::from(l + 2 * nr) + 1.5);
}

#[test]
fn coulomb_frequency_is_one() {
    let e = compute_expansion(&PotentialModel::coulomb(), StateSpec::new(2, 3), 8).unwrap();
    assert!((&e.solution.omega - 1.0).abs() < 1e-38);
    let e = compute_expansion(&PotentialModel::harmonic(), StateSpec::new(2, 3), 8).unwrap();
    assert!((&e.solution.omega - 2.0).abs() < 1e-38);
}
