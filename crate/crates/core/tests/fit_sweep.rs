use fluxrabi_core::fitting::{fit_circuit, sweep_fit, SweepFitConfig};

#[test]
fn decoupled_circuit_fit_keeps_mapping() {
    let (mapped, r) = fit_circuit(&SweepFitConfig::reference(), 0.0).unwrap();
    assert_eq!(mapped.g_ghz, 0.0);
    assert!(r.params.g_ghz.abs() < 1e-6, "{:?}", r.params);
    assert!((r.params.omega_ghz - mapped.omega_ghz).abs() < 1e-4 * mapped.omega_ghz);
    assert!((r.params.delta_q_ghz - mapped.delta_q_ghz).abs() < 1e-3 * mapped.delta_q_ghz);
    assert!(r.residual_mhz2 < 1.0, "{}", r.residual_mhz2);
}

#[test]
fn weak_coupling_fit_stays_near_mapping() {
    let rows = sweep_fit(&SweepFitConfig::reference(), &[20.0, -1.0]);
    assert!(rows[1].error.is_some() && rows[1].fitted.is_none());
    let m = rows[0].mapped.unwrap();
    let f = rows[0].fitted.unwrap();
    for (a, b) in m.as_array().iter().zip(f.params.as_array()) {
        assert!((a - b).abs() < 0.015 * a.abs(), "{m:?} vs {:?}", f.params);
    }
    assert!(f.residual_mhz2 < f.initial_residual_mhz2);
}
