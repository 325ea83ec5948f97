//! Independent constructions checked against the plane-wave machinery.

use std::f64::consts::PI;

use fluxrabi_core::linalg::{sym_eigenvalues, Mat};
use fluxrabi_core::planewave::{linear_kernel, quadratic_kernel, PlaneWaveBasis};
use fluxrabi_core::subsystem::{diagonalize_flux_qubit, diagonalize_oscillator};
use fluxrabi_core::{CircuitModel, RawCircuit};
use gauss_quad::GaussLegendre;

/// `(1/2n_max) ∫ e^{−imπn/n_max} nᵖ dn` by composite Gauss-Legendre quadrature.
/// Returns (real, imaginary).
fn kernel_by_quadrature(n_max: f64, m: i64, power: i32) -> (f64, f64) {
    let rule = GaussLegendre::new(20.try_into().unwrap()).unwrap();
    let panels = 64;
    let width = 2.0 * n_max / panels as f64;
    let dk = m as f64 * PI / n_max;
    let mut re = 0.0;
    let mut im = 0.0;
    for p in 0..panels {
        let a = -n_max + p as f64 * width;
        re += rule.integrate(a, a + width, |n| (dk * n).cos() * n.powi(power));
        im -= rule.integrate(a, a + width, |n| (dk * n).sin() * n.powi(power));
    }
    (re / (2.0 * n_max), im / (2.0 * n_max))
}

#[test]
fn quadratic_kernel_matches_quadrature() {
    for n_max in [3.0, 8.0, 41.5] {
        let basis = PlaneWaveBasis::new(n_max, 32).unwrap();
        let k = quadratic_kernel(&basis);
        let mut worst = 0.0_f64;
        for i in 0..32 {
            for j in 0..32 {
                let (re, im) = kernel_by_quadrature(n_max, i as i64 - j as i64, 2);
                worst = worst.max((k[(i, j)] - re).abs()).max(im.abs());
            }
        }
        assert!(worst < 1e-10 * n_max * n_max, "n_max = {n_max}: {worst:e}");
    }
}

#[test]
fn linear_kernel_matches_quadrature() {
    // n̂ = iA, so the kernel f(n) is i times the returned matrix.
    let basis = PlaneWaveBasis::new(8.0, 32).unwrap();
    let a = linear_kernel(&basis);
    for i in 0..32 {
        for j in 0..32 {
            let (re, im) = kernel_by_quadrature(8.0, i as i64 - j as i64, 1);
            assert!(re.abs() < 1e-12);
            assert!((a[(i, j)] - im).abs() < 1e-10, "({i}, {j})");
        }
    }
    assert!((a[(1, 0)] + 8.0 / PI).abs() < 1e-12);
}

/// `−4E_C d²/dφ² + V(φ)` on a uniform flux grid with the fourth-order
/// five-point stencil and hard walls at the ends.
fn finite_difference_levels(ec: f64, potential: impl Fn(f64) -> f64, half_width: f64, points: usize) -> Vec<f64> {
    let h = 2.0 * half_width / (points + 1) as f64;
    let t = 4.0 * ec / (12.0 * h * h);
    let phi = |i: usize| -half_width + (i + 1) as f64 * h;
    let m = Mat::from_fn(points, points, |i, j| match i.abs_diff(j) {
        0 => 30.0 * t + potential(phi(i)),
        1 => -16.0 * t,
        2 => t,
        _ => 0.0,
    });
    sym_eigenvalues(&m).unwrap()
}

#[test]
fn qubit_levels_match_flux_grid() {
    let model = CircuitModel::new(RawCircuit::reference(20.0, 0.503).unwrap()).unwrap();
    let s = model.scales;
    let kx = 2.0 * PI * 0.503;
    let pw = diagonalize_flux_qubit(s.ecj_ghz, s.ej_ghz, s.elfq_ghz, 0.503, &PlaneWaveBasis::qubit_default()).unwrap();
    let fd = finite_difference_levels(
        s.ecj_ghz,
        |p| -s.ej_ghz * (p - kx).cos() + 0.5 * s.elfq_ghz * p * p,
        2.0 * PI,
        1200,
    );
    for i in 0..6 {
        assert!((pw.energies[i] - fd[i]).abs() < 1e-3, "level {i}: {} vs {}", pw.energies[i], fd[i]);
    }
}

#[test]
fn oscillator_levels_match_flux_grid() {
    let model = CircuitModel::new(RawCircuit::reference(350.0, 0.5).unwrap()).unwrap();
    let s = model.scales;
    let pw = diagonalize_oscillator(s.ec_ghz, s.el_ghz, &PlaneWaveBasis::oscillator_default(s.ec_ghz, s.el_ghz)).unwrap();
    let fd = finite_difference_levels(s.ec_ghz, |p| 0.5 * s.el_ghz * p * p, 1.5, 1200);
    for i in 0..6 {
        assert!((pw.energies[i] - fd[i]).abs() < 1e-3, "level {i}: {} vs {}", pw.energies[i], fd[i]);
        let ladder = s.omega_ghz * (i as f64 + 0.5);
        assert!((pw.energies[i] - ladder).abs() < 1e-3);
    }
}
