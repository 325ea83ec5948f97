use fluxrabi_core::planewave::PlaneWaveBasis;
use fluxrabi_core::qubit::{characterize, default_two_level_grid, flux_grid, matrix_elements, QubitNode};
use fluxrabi_core::{CircuitModel, Gauge, RawCircuit};

fn node(lc: f64, gauge: Gauge) -> QubitNode {
    let model = CircuitModel::new(RawCircuit::reference(lc, 0.5).unwrap()).unwrap();
    QubitNode::from_circuit(&model, gauge, PlaneWaveBasis::qubit_default())
}

#[test]
fn flux_selection_rules_at_symmetry_point() {
    let s = node(20.0, Gauge::Flux).spectrum(0.5).unwrap();
    let me = matrix_elements(&s, 0.5).unwrap();
    assert!(me.flux[0][0].abs() < 1e-8, "{}", me.flux[0][0]);
    assert!(me.flux[2][0].abs() < 1e-8, "{}", me.flux[2][0]);
    assert!(me.flux[1][0].abs() > 0.1);
}

#[test]
fn matrix_element_symmetries() {
    let s = node(350.0, Gauge::Charge).spectrum(0.502).unwrap();
    let me = matrix_elements(&s, 0.502).unwrap();
    for j in 0..6 {
        assert!(me.charge_imag[j][j].abs() < 1e-10);
        for i in 0..6 {
            assert!((me.flux[j][i] - me.flux[i][j]).abs() < 1e-10);
            assert!((me.charge_imag[j][i] + me.charge_imag[i][j]).abs() < 1e-10);
        }
    }
}

#[test]
fn diagonal_flux_follows_two_level_form() {
    let n = node(20.0, Gauge::Flux);
    let fit = characterize(&n, &default_two_level_grid()).unwrap();
    for x in flux_grid(0.5, 0.004, 17) {
        let m = matrix_elements(&n.spectrum(x).unwrap(), x).unwrap();
        let model = -fit.phi2max * fit.polarization(x);
        assert!((m.flux[0][0] - model).abs() < 0.01 * fit.phi2max, "Φx = {x}");
    }
}

#[test]
fn charge_element_is_flat_in_flux() {
    let n = node(20.0, Gauge::Charge);
    let values: Vec<f64> = flux_grid(0.5, 0.003, 13)
        .into_iter()
        .map(|x| n.spectrum(x).unwrap().charge_matrix(2)[(0, 1)].abs())
        .collect();
    let hi = values.iter().cloned().fold(f64::MIN, f64::max);
    let lo = values.iter().cloned().fold(f64::MAX, f64::min);
    assert!((hi - lo) / hi < 0.05, "{lo} .. {hi}");
}

#[test]
fn doubling_waves_converges_levels() {
    let n = node(350.0, Gauge::Flux);
    let mut wide = n;
    wide.basis = n.basis.doubled();
    let a = n.spectrum(0.503).unwrap();
    let b = wide.spectrum(0.503).unwrap();
    for i in 0..6 {
        assert!((a.energies[i] - b.energies[i]).abs() < 1e-3, "level {i}");
    }
}

#[test]
fn hamiltonian_is_symmetric() {
    let h = node(350.0, Gauge::Flux).hamiltonian(0.497);
    assert!(fluxrabi_core::linalg::relative_asymmetry(&h) < 1e-12);
}
