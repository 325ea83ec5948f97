//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use fluxrabi_core::coupled::{
    coupled_planewave_energies, default_planewave_bases, observables, CoupledSolver, Truncation,
};
use fluxrabi_core::fitting::{default_fit_grid, fit, map_circuit, FitData, FitProblem};
use fluxrabi_core::linalg::{sym_eigenvalues, Mat};
use fluxrabi_core::perturbation::{first_order, net_dispersive_shift, ContributorRange, PerturbationSetup};
use fluxrabi_core::planewave::PlaneWaveBasis;
use fluxrabi_core::qubit::{flux_grid, QubitNode};
use fluxrabi_core::rabi::RabiParams;
use fluxrabi_core::subsystem::{diagonalize_flux_qubit, diagonalize_oscillator};
use fluxrabi_core::units::{charging_energy_ghz, inductive_energy_ghz, FF};
use fluxrabi_core::{CircuitModel, Gauge, RawCircuit, Result};

struct Outcome {
    pass: bool,
    detail: String,
}

fn within(value: f64, target: f64, rel: f64) -> bool {
    ((value - target) / target).abs() <= rel
}

fn model(lc: f64, phix: f64) -> CircuitModel {
    CircuitModel::new(RawCircuit::reference(lc, phix).unwrap()).unwrap()
}

fn compare(label: &str, value: f64, target: f64, rel: f64) -> (bool, String) {
    let ok = within(value, target, rel);
    (ok, format!("{label}={value:.4} (target {target}, {:+.2}%)", 100.0 * (value / target - 1.0)))
}

fn gather(checks: Vec<(bool, String)>) -> Outcome {
    Outcome {
        pass: checks.iter().all(|c| c.0),
        detail: checks.into_iter().map(|c| c.1).collect::<Vec<_>>().join(", "),
    }
}

fn criterion_1() -> Result<Outcome> {
    Ok(gather(vec![
        compare("EJ", inductive_energy_ghz(990.0), 165.1, 1e-3),
        compare("ECJ", charging_energy_ghz(4.84 * FF), 4.0, 5e-3),
    ]))
}

fn mapping_checks(lc: f64, target: [f64; 4]) -> Result<Outcome> {
    let m = map_circuit(&model(lc, 0.5), PlaneWaveBasis::qubit_default())?;
    let p = m.flux;
    Ok(gather(vec![
        compare("omega", p.omega_ghz, target[0], 0.01),
        compare("dq", p.delta_q_ghz, target[1], 0.01),
        compare("g", p.g_ghz, target[2], 0.01),
        compare("Ip", p.ip_na, target[3], 0.01),
    ]))
}

fn criterion_2() -> Result<Outcome> {
    mapping_checks(20.0, [6.033, 1.240, 0.424, 281.3])
}

fn criterion_3() -> Result<Outcome> {
    mapping_checks(350.0, [6.272, 2.139, 7.338, 282.5])
}

fn criterion_4() -> Result<Outcome> {
    let mut checks = Vec::new();
    for (lc, w, g) in [(20.0, 6.085, 0.043), (350.0, 15.66, 0.492)] {
        let p = map_circuit(&model(lc, 0.5), PlaneWaveBasis::qubit_default())?.charge;
        checks.push(compare(&format!("omega'({lc})"), p.omega_ghz, w, 0.01));
        checks.push(compare(&format!("g'({lc})"), p.g_ghz, g, 0.01));
    }
    Ok(gather(checks))
}

fn circuit_fit(lc: f64, levels: usize, variant: Gauge) -> Result<(RabiParams, f64)> {
    let m = model(lc, 0.5);
    let mapping = map_circuit(&m, PlaneWaveBasis::qubit_default())?;
    let data = FitData::from_circuit(&CoupledSolver::new(m, Gauge::Flux), &default_fit_grid(), levels)?;
    let initial = match variant {
        Gauge::Flux => mapping.flux,
        Gauge::Charge => mapping.charge,
    };
    let r = fit(&FitProblem::new(data, initial))?;
    Ok((r.params, r.residual_mhz2))
}

fn fit_checks(levels: usize, target: [f64; 4], residual_ok: impl Fn(f64) -> bool, residual_target: &str) -> Result<Outcome> {
    let (p, residual) = circuit_fit(350.0, levels, Gauge::Flux)?;
    let mut checks = vec![
        compare("omega", p.omega_ghz, target[0], 0.02),
        compare("dq", p.delta_q_ghz, target[1], 0.02),
        compare("g", p.g_ghz, target[2], 0.02),
        compare("Ip", p.ip_na, target[3], 0.02),
    ];
    checks.push((residual_ok(residual), format!("residual={residual:.2} MHz^2 ({residual_target})")));
    Ok(gather(checks))
}

fn criterion_5() -> Result<Outcome> {
    fit_checks(3, [6.064, 2.388, 7.822, 282.9], |r| r <= 25.0, "<= 25")
}

fn criterion_6() -> Result<Outcome> {
    fit_checks(7, [6.054, 2.133, 7.562, 282.2], |r| within(r, 152.0, 0.3), "152 +/- 30%")
}

fn criterion_7() -> Result<Outcome> {
    let node = QubitNode::from_circuit(&model(20.0, 0.5), Gauge::Flux, PlaneWaveBasis::qubit_default());
    let mut worst = f64::INFINITY;
    for x in flux_grid(0.5, 0.01, 41) {
        let e = node.spectrum(x)?.energies;
        worst = worst.min(e[2] - e[1]);
    }
    Ok(Outcome {
        pass: worst > 40.0,
        detail: format!("min(E2-E1) over [0.49, 0.51] = {worst:.3} GHz"),
    })
}

fn gauge_discrepancy(lc: f64, phix: f64, trunc: Truncation, waves: usize) -> Result<f64> {
    let m = model(lc, phix);
    let basis = PlaneWaveBasis::new(8.0, waves)?;
    let flux = CoupledSolver::new(m, Gauge::Flux).with_truncation(trunc).with_qubit_basis(basis).energies(phix)?;
    let charge = CoupledSolver::new(m, Gauge::Charge).with_truncation(trunc).with_qubit_basis(basis).energies(phix)?;
    Ok(flux.iter().zip(&charge).take(8).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

fn criterion_8() -> Result<Outcome> {
    let mut checks = Vec::new();
    for lc in [20.0, 350.0] {
        let coarse = gauge_discrepancy(lc, 0.498, Truncation { n_q: 16, n_ph: 40 }, 32)?;
        let fine = gauge_discrepancy(lc, 0.498, Truncation { n_q: 32, n_ph: 80 }, 64)?;
        checks.push((
            fine < 1e-2 && fine < coarse,
            format!("Lc={lc}: {:.3e} -> {:.3e} MHz", coarse * 1e3, fine * 1e3),
        ));
    }
    Ok(gather(checks))
}

/// `R²` of a least-squares line through the origin (uncentered).
fn r_squared_through_origin(x: &[f64], y: &[f64]) -> f64 {
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let sxx: f64 = x.iter().map(|a| a * a).sum();
    let slope = sxy / sxx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - slope * a).powi(2)).sum();
    let ss_tot: f64 = y.iter().map(|b| b * b).sum();
    1.0 - ss_res / ss_tot
}

fn criterion_9() -> Result<Outcome> {
    let mut worst_current = 0.0_f64;
    let mut worst_charge_flux = 0.0_f64;
    for lc in [0.0, 20.0, 350.0] {
        for x in flux_grid(0.5, 0.006, 7) {
            for gauge in [Gauge::Flux, Gauge::Charge] {
                let m = model(lc, x);
                let spec = CoupledSolver::new(m, gauge).solve(x)?;
                for state in 0..8 {
                    let o = observables(&spec, &m, state)?;
                    worst_current = worst_current.max(o.current_1.abs());
                    if gauge == Gauge::Charge {
                        worst_charge_flux = worst_charge_flux.max(o.flux_1.abs());
                    }
                }
            }
        }
    }
    let lcs: Vec<f64> = (0..=7).map(|k| 50.0 * k as f64).collect();
    let mut phi1 = Vec::new();
    for &lc in &lcs {
        let m = model(lc, 0.498);
        let spec = CoupledSolver::new(m, Gauge::Flux).solve(0.498)?;
        phi1.push(observables(&spec, &m, 0)?.flux_1);
    }
    let r2 = r_squared_through_origin(&lcs, &phi1);
    let m = model(350.0, 0.498);
    let n_flux = observables(&CoupledSolver::new(m, Gauge::Flux).solve(0.498)?, &m, 0)?.photon_number;
    let n_charge = observables(&CoupledSolver::new(m, Gauge::Charge).solve(0.498)?, &m, 0)?.photon_number;
    Ok(gather(vec![
        (worst_current < 0.01, format!("max|<I1>|={worst_current:.2e} nA")),
        (r2 > 0.999 && phi1[0] == 0.0, format!("R^2={r2:.6}")),
        (worst_charge_flux < 1e-6, format!("charge max|<phi1>|={worst_charge_flux:.2e}")),
        (n_charge < 0.2 * n_flux, format!("photons charge/flux={n_charge:.4}/{n_flux:.4}")),
    ]))
}

fn finite_difference_levels(ec: f64, potential: impl Fn(f64) -> f64, half_width: f64, points: usize) -> Result<Vec<f64>> {
    let h = 2.0 * half_width / (points + 1) as f64;
    let t = 4.0 * ec / (12.0 * h * h);
    let phi = |i: usize| -half_width + (i + 1) as f64 * h;
    let m = Mat::from_fn(points, points, |i, j| match i.abs_diff(j) {
        0 => 30.0 * t + potential(phi(i)),
        1 => -16.0 * t,
        2 => t,
        _ => 0.0,
    });
    sym_eigenvalues(&m)
}

fn criterion_10() -> Result<Outcome> {
    let mut checks = Vec::new();
    for lc in [20.0, 350.0] {
        let x = 0.497;
        let m = model(lc, x);
        let reference = CoupledSolver::new(m, Gauge::Flux).energies(x)?;
        let (b1, b2) = default_planewave_bases(Gauge::Flux, &m);
        let pw = coupled_planewave_energies(Gauge::Flux, &m, &b1, &b2)?;
        let d = reference.iter().zip(&pw).take(8).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        checks.push((d < 1e-3, format!("coupled Lc={lc}: {:.3e} MHz", d * 1e3)));
    }
    let m = model(20.0, 0.503);
    let s = m.scales;
    let kx = 2.0 * PI * 0.503;
    let pw = diagonalize_flux_qubit(s.ecj_ghz, s.ej_ghz, s.elfq_ghz, 0.503, &PlaneWaveBasis::qubit_default())?;
    let fd = finite_difference_levels(s.ecj_ghz, |p| -s.ej_ghz * (p - kx).cos() + 0.5 * s.elfq_ghz * p * p, 2.0 * PI, 1200)?;
    let d = (0..6).map(|i| (pw.energies[i] - fd[i]).abs()).fold(0.0, f64::max);
    checks.push((d < 1e-3, format!("qubit vs grid: {:.3e} MHz", d * 1e3)));
    let osc = diagonalize_oscillator(s.ec_ghz, s.el_ghz, &PlaneWaveBasis::oscillator_default(s.ec_ghz, s.el_ghz))?;
    let fd = finite_difference_levels(s.ec_ghz, |p| 0.5 * s.el_ghz * p * p, 1.5, 1200)?;
    let d = (0..6).map(|i| (osc.energies[i] - fd[i]).abs()).fold(0.0, f64::max);
    checks.push((d < 1e-3, format!("oscillator vs grid: {:.3e} MHz", d * 1e3)));
    Ok(gather(checks))
}

fn criterion_11() -> Result<Outcome> {
    let qubit_basis = PlaneWaveBasis::qubit_default();
    let mut worst_first = 0.0_f64;
    for gauge in [Gauge::Flux, Gauge::Charge] {
        for lc in [20.0, 350.0] {
            let m = model(lc, 0.498);
            let q = QubitNode::from_circuit(&m, gauge, qubit_basis).spectrum(0.498)?;
            let setup = PerturbationSetup::new(gauge, &m, &q, 5, 6)?;
            for n in 0..=3 {
                for i in 0..2 {
                    worst_first = worst_first.max(first_order(&setup, n, i)?.abs());
                }
            }
        }
    }

    let m = model(20.0, 0.5);
    let grid = flux_grid(0.5, 0.0015, 13);
    let shifts = net_dispersive_shift(Gauge::Flux, &m, qubit_basis, ContributorRange::default(), &grid)?;
    let solver = CoupledSolver::new(m, Gauge::Flux);
    let mut worst_rel = 0.0_f64;
    for p in &shifts {
        let e = solver.energies(p.phix)?;
        let exact_g = e[2] - e[0] - m.scales.omega_ghz;
        let exact_e = e[3] - e[1] - m.scales.omega_ghz;
        worst_rel = worst_rel
            .max(((p.delta_g_ghz - exact_g) / exact_g).abs())
            .max(((p.delta_e_ghz - exact_e) / exact_e).abs());
    }

    let grid = default_fit_grid();
    let shifts = net_dispersive_shift(Gauge::Charge, &m, qubit_basis, ContributorRange::default(), &grid)?;
    let dominated = shifts
        .iter()
        .filter(|p| {
            let high: f64 = p.tables.iter().map(|t| t.abs_sum_over(&[2, 3])).sum();
            let low: f64 = p.tables.iter().map(|t| t.abs_sum_over(&[0, 1])).sum();
            high > low
        })
        .count();
    let fraction = dominated as f64 / shifts.len() as f64;
    Ok(gather(vec![
        (worst_first < 1e-12, format!("max|E1|={worst_first:.1e} GHz")),
        (worst_rel < 0.1, format!("flux shift vs exact max rel dev={:.2}%", 100.0 * worst_rel)),
        (fraction >= 0.8, format!("charge f,h dominance at {:.0}% of points", 100.0 * fraction)),
    ]))
}

fn criterion_12() -> Result<Outcome> {
    let mut checks = Vec::new();
    for lc in [20.0, 350.0] {
        let (_, flux) = circuit_fit(lc, 3, Gauge::Flux)?;
        let (_, charge) = circuit_fit(lc, 3, Gauge::Charge)?;
        checks.push((flux < charge, format!("Lc={lc}: {flux:.3} < {charge:.3} MHz^2")));
    }
    Ok(gather(checks))
}

fn main() {
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let criteria: [(usize, fn() -> Result<Outcome>); 12] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
        (12, criterion_12),
    ];
    let mut failed = 0;
    for (id, run) in criteria {
        if only.is_some_and(|o| o != id) {
            continue;
        }
        let start = Instant::now();
        let outcome = run().unwrap_or_else(|e| Outcome {
            pass: false,
            detail: format!("error: {e}"),
        });
        if !outcome.pass {
            failed += 1;
        }
        println!(
            "criterion {id:>2}: {} [{:.1}s] {}",
            if outcome.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            outcome.detail
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
