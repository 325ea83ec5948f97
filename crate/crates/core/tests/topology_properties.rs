use fluxrabi_core::topology::{effective_inductances, y_delta, Branch};
use fluxrabi_core::RawCircuit;
use proptest::prelude::*;

fn circuit(lc: f64, l1: f64, l2: f64) -> RawCircuit {
    RawCircuit::new(lc, l1, l2, 0.87, 4.84, 165.1, 0.5).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn charge_gauge_inductance_identity(lc in 0.01f64..2000.0, l1 in 1.0f64..5000.0, l2 in 1.0f64..5000.0) {
        let raw = circuit(lc, l1, l2);
        let eff = effective_inductances(&y_delta(&raw), &raw);
        let lhs = eff.charge_gauge_inverse_inductance();
        let rhs = 1.0 / (lc + l2);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs, "{lhs} vs {rhs}");
    }

    #[test]
    fn star_round_trip(lc in 0.01f64..2000.0, l1 in 1.0f64..5000.0, l2 in 1.0f64..5000.0) {
        let raw = circuit(lc, l1, l2);
        let star = y_delta(&raw);
        let eff = effective_inductances(&star, &raw);
        let Branch::Finite(l12) = star.l12 else { panic!("open branch at Lc = {lc}") };
        let recovered = 1.0 / eff.l_lc - 1.0 / star.lg1;
        prop_assert!((recovered - 1.0 / l12).abs() <= 1e-12 * (1.0 / eff.l_lc), "{recovered} vs {}", 1.0 / l12);
    }

    #[test]
    fn coupling_ratio_is_share_of_qubit_loop(lc in 0.01f64..2000.0, l1 in 1.0f64..5000.0, l2 in 1.0f64..5000.0) {
        let raw = circuit(lc, l1, l2);
        let eff = effective_inductances(&y_delta(&raw), &raw);
        let expected = lc / (lc + l2);
        prop_assert!((eff.coupling_ratio() - expected).abs() <= 1e-12 * expected);
    }
}

#[test]
fn effective_inductances_approach_loop_sums() {
    let mut last = (f64::INFINITY, f64::INFINITY);
    for lc in [10.0, 1.0, 0.1] {
        let raw = RawCircuit::reference(lc, 0.5).unwrap();
        let eff = effective_inductances(&y_delta(&raw), &raw);
        let gaps = ((eff.l_lc - 800.0).abs(), (eff.l_fq - 2050.0).abs());
        assert!(gaps.0 < last.0 && gaps.1 < last.1, "Lc = {lc}: {gaps:?}");
        last = gaps;
    }
    assert!(last.0 < 0.1 && last.1 < 0.1);
}

#[test]
fn decoupled_circuit_is_exact() {
    let raw = RawCircuit::reference(0.0, 0.5).unwrap();
    let eff = effective_inductances(&y_delta(&raw), &raw);
    assert!(eff.l12.is_open());
    assert_eq!(eff.coupling_ratio(), 0.0);
    assert!((eff.l_lc - 800.0).abs() < 1e-12);
    assert!((eff.l_fq - 2050.0).abs() < 1e-12);
}
