use fluxrabi_core::fitting::{default_fit_grid, fit, fit_charge_variant, FitData, FitProblem};
use fluxrabi_core::rabi::{diagonalize_rabi_at, rabi_energies, RabiParams};
use fluxrabi_core::Gauge;

fn deep(variant: Gauge) -> RabiParams {
    RabiParams {
        omega_ghz: 6.272,
        delta_q_ghz: 2.139,
        ip_na: 282.5,
        g_ghz: 7.338,
        variant,
    }
}

fn max_diff(a: &[f64], b: &[f64], n: usize) -> f64 {
    a.iter().zip(b).take(n).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn flux_variant_is_parity_and_sign_symmetric() {
    let p = deep(Gauge::Flux);
    let neg = RabiParams { g_ghz: -p.g_ghz, ..p };
    let base = rabi_energies(&p, 1.3, 60).unwrap();
    assert!(max_diff(&base, &rabi_energies(&p, -1.3, 60).unwrap(), 16) < 1e-6);
    assert!(max_diff(&base, &rabi_energies(&neg, 1.3, 60).unwrap(), 16) < 1e-6);
}

#[test]
fn variants_are_different_models() {
    let charge_mapped = RabiParams {
        omega_ghz: 15.66,
        g_ghz: 0.985,
        ..deep(Gauge::Charge)
    };
    let a = rabi_energies(&deep(Gauge::Flux), 0.0, 60).unwrap();
    let b = rabi_energies(&charge_mapped, 0.0, 60).unwrap();
    let shift = |e: &[f64]| e.iter().map(|v| v - e[0]).collect::<Vec<_>>();
    assert!(max_diff(&shift(&a), &shift(&b), 4) > 1e-3);

    let a = rabi_energies(&deep(Gauge::Flux), 1.3, 60).unwrap();
    let b = rabi_energies(&deep(Gauge::Charge), 1.3, 60).unwrap();
    assert!(max_diff(&a, &b, 4) > 1e-3);
}

#[test]
fn variants_coincide_without_bias() {
    let a = rabi_energies(&deep(Gauge::Flux), 0.0, 60).unwrap();
    let b = rabi_energies(&deep(Gauge::Charge), 0.0, 60).unwrap();
    assert!(max_diff(&a, &b, 8) < 1e-9);
}

#[test]
fn deep_strong_fock_convergence() {
    let p = deep(Gauge::Flux);
    let a = rabi_energies(&p, 0.0, 40).unwrap();
    let b = rabi_energies(&p, 0.0, 80).unwrap();
    assert!(max_diff(&a, &b, 8) < 1e-3);
    assert!(diagonalize_rabi_at(&p, 0.0, 60).unwrap().converged);
}

fn self_fit(truth: RabiParams, levels: usize) {
    let data = FitData::from_rabi(&truth, &default_fit_grid(), levels, truth.default_fock()).unwrap();
    let start = RabiParams::from_array(truth.as_array().map(|v| v * 1.03), truth.variant);
    let mut problem = FitProblem::new(data, start);
    problem.n_fock = truth.default_fock();
    let r = if truth.variant == Gauge::Charge {
        fit_charge_variant(&problem).unwrap()
    } else {
        fit(&problem).unwrap()
    };
    for (got, want) in r.params.as_array().iter().zip(truth.as_array()) {
        assert!((got - want).abs() < 1e-6 * want.abs(), "{:?}", r.params);
    }
    assert!(r.residual_mhz2 < 1e-12, "{}", r.residual_mhz2);
}

#[test]
fn self_fit_round_trip() {
    self_fit(
        RabiParams {
            omega_ghz: 6.033,
            delta_q_ghz: 1.240,
            ip_na: 281.3,
            g_ghz: 0.424,
            variant: Gauge::Flux,
        },
        3,
    );
}

#[test]
fn charge_variant_self_fit_round_trip() {
    self_fit(
        RabiParams {
            omega_ghz: 6.085,
            delta_q_ghz: 1.240,
            ip_na: 281.3,
            g_ghz: 0.09,
            variant: Gauge::Charge,
        },
        3,
    );
}

#[test]
fn fit_is_deterministic_and_scale_stable() {
    let truth = RabiParams {
        omega_ghz: 6.033,
        delta_q_ghz: 1.240,
        ip_na: 281.3,
        g_ghz: 0.424,
        variant: Gauge::Flux,
    };
    let data = FitData::from_rabi(&truth, &default_fit_grid(), 3, 20).unwrap();
    let start = RabiParams::from_array(truth.as_array().map(|v| v * 0.98), Gauge::Flux);
    let a = fit(&FitProblem::new(data.clone(), start)).unwrap();
    let b = fit(&FitProblem::new(data.clone(), start)).unwrap();
    assert_eq!(a, b);
    for factor in [1.0 + 1e-9, 1.0 - 1e-9] {
        let s = fit(&FitProblem::new(data.scaled(factor), start)).unwrap();
        for (x, y) in s.params.as_array().iter().zip(a.params.as_array()) {
            assert!((x - y).abs() < 1e-6 * y.abs());
        }
    }
}
