//! Full circuit Hamiltonian of the coupled qubit and oscillator.
//!
//! Flux gauge: `H = H1 + H2 − Φ1Φ2/L12` with `H1` the LC oscillator of
//! inductance `L_LC` and `H2` the qubit node of inductance `L_FQ`.
//!
//! Charge gauge: `H' = H1' + H2' − (L_LC/C_J L12) q1 q2` with the oscillator
//! capacitance renormalized to `C'` and the qubit inductance `Lc + L2`.
//!
//! Two constructions are provided. The eigenbasis product keeps the lowest
//! `N_q` qubit levels and `N_ph` Fock states and uses the numerical qubit
//! matrix elements. The plane-wave product works directly on the `(k1, k2)`
//! grid of both nodes and serves as an independent reference.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{sym_eigen, sym_eigenvalues, Mat};
use crate::planewave::{linear_kernel, PlaneWaveBasis};
use crate::qubit::QubitNode;
use crate::rabi::{fock_momentum, fock_position};
use crate::subsystem::{oscillator_hamiltonian, SubsystemSpectrum};
use crate::topology::CircuitModel;
use crate::units::{inductive_energy_ghz, ELEMENTARY_CHARGE, FLUX_QUANTUM, HBAR, NA, PLANCK, REDUCED_FLUX_QUANTUM};
use crate::Gauge;

/// Levels compared when a truncation is doubled.
pub const CONVERGENCE_LEVELS: usize = 8;

/// Largest level shift (GHz) accepted on doubling.
pub const CONVERGENCE_TOL_GHZ: f64 = 1e-3;

/// Largest product dimension of the plane-wave build.
pub const MAX_PLANEWAVE_DIM: usize = 4096;

/// Truncation of the eigenbasis product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    /// Qubit levels kept.
    pub n_q: usize,
    /// Fock states kept.
    pub n_ph: usize,
}

impl Truncation {
    /// Flux gauge: 10 qubit levels. Charge gauge: 24, since the charge
    /// coupling reaches far up the qubit ladder. 40 Fock states in both.
    pub fn default_for(gauge: Gauge) -> Self {
        match gauge {
            Gauge::Flux => Self { n_q: 10, n_ph: 40 },
            Gauge::Charge => Self { n_q: 24, n_ph: 40 },
        }
    }

    pub fn doubled(&self) -> Self {
        Self {
            n_q: 2 * self.n_q,
            n_ph: 2 * self.n_ph,
        }
    }

    pub fn dim(&self) -> usize {
        self.n_q * self.n_ph
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_q < 4 || self.n_ph < 20 {
            return Err(Error::InvalidBasis(format!(
                "eigenbasis truncation needs N_q >= 4 and N_ph >= 20, got ({}, {})",
                self.n_q, self.n_ph
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "provenance", rename_all = "kebab-case")]
pub enum CoupledBasis {
    EigenbasisProduct { n_q: usize, n_ph: usize },
    PlanewaveProduct { oscillator: PlaneWaveBasis, qubit: PlaneWaveBasis },
}

/// What [`observables`] needs besides the eigenvectors.
#[derive(Debug, Clone)]
enum Frame {
    Eigenbasis {
        n_q: usize,
        n_ph: usize,
        /// `⟨j|φ2|i⟩` among the kept qubit levels.
        qubit_flux: Mat<f64>,
    },
    Planewave {
        h1: Mat<f64>,
        k1: Vec<f64>,
        k2: Vec<f64>,
    },
}

#[derive(Debug, Clone)]
pub struct CoupledSpectrum {
    pub gauge: Gauge,
    pub basis: CoupledBasis,
    pub phix: f64,
    /// Ascending, GHz.
    pub energies: Vec<f64>,
    /// Columns are eigenvectors. Eigenbasis product index `n N_q + i`;
    /// plane-wave product index `k1 N2 + k2`.
    pub vectors: Mat<f64>,
    /// Oscillator frequency of the gauge's `H1`, GHz.
    pub omega_ghz: f64,
    /// Oscillator zero-point flux in the gauge's `H1`, units of `Φ0/2π`.
    pub phi1_zpf: f64,
    frame: Frame,
}

fn oscillator_frame(gauge: Gauge, model: &CircuitModel) -> (f64, f64) {
    match gauge {
        Gauge::Flux => {
            let phi_zpf = model.eff.l_lc * crate::units::PH * model.scales.izpf_na * NA;
            (model.scales.omega_ghz, phi_zpf / REDUCED_FLUX_QUANTUM)
        }
        Gauge::Charge => {
            let q = &model.charge_oscillator;
            (q.omega_prime_ghz, HBAR / (2.0 * q.q1_zpf) / REDUCED_FLUX_QUANTUM)
        }
    }
}

/// Coupling prefactor (GHz) multiplying `X ⊗ Q` where `X = a + a†`,
/// `Q = ⟨j|φ2|i⟩` in the flux gauge and `X = a − a†`, `Q = Im⟨j|n2|i⟩` in the
/// charge gauge.
pub fn eigenbasis_coupling_ghz(gauge: Gauge, model: &CircuitModel) -> f64 {
    let alpha = model.eff.coupling_ratio();
    match gauge {
        Gauge::Flux => -alpha * model.scales.izpf_na * NA * REDUCED_FLUX_QUANTUM / PLANCK / 1e9,
        Gauge::Charge => {
            -alpha / model.raw.cj_farad() * model.charge_oscillator.q1_zpf * 2.0 * ELEMENTARY_CHARGE / PLANCK / 1e9
        }
    }
}

fn assemble_eigenbasis(
    gauge: Gauge,
    model: &CircuitModel,
    qubit: &SubsystemSpectrum,
    trunc: Truncation,
) -> Result<(Mat<f64>, Mat<f64>)> {
    trunc.validate()?;
    if qubit.len() < trunc.n_q {
        return Err(Error::IndexOutOfRange {
            index: trunc.n_q - 1,
            available: qubit.len(),
        });
    }
    let Truncation { n_q, n_ph } = trunc;
    let (omega, _) = oscillator_frame(gauge, model);
    let c = eigenbasis_coupling_ghz(gauge, model);
    let (x, q) = match gauge {
        Gauge::Flux => (fock_position(n_ph), qubit.flux_matrix(n_q)),
        Gauge::Charge => (fock_momentum(n_ph), qubit.charge_matrix(n_q)),
    };
    let dim = n_q * n_ph;
    let h = Mat::from_fn(dim, dim, |r, s| {
        let (m, j) = (r / n_q, r % n_q);
        let (n, i) = (s / n_q, s % n_q);
        let mut v = c * x[(m, n)] * q[(j, i)];
        if r == s {
            v += omega * (n as f64 + 0.5) + qubit.energies[i];
        }
        v
    });
    let flux = if gauge == Gauge::Flux { q } else { qubit.flux_matrix(n_q) };
    Ok((h, flux))
}

/// Eigenbasis-product build from a qubit spectrum of the matching gauge.
pub fn build_coupled_eigenbasis(
    gauge: Gauge,
    model: &CircuitModel,
    qubit: &SubsystemSpectrum,
    trunc: Truncation,
) -> Result<CoupledSpectrum> {
    let (h, qubit_flux) = assemble_eigenbasis(gauge, model, qubit, trunc)?;
    let eig = sym_eigen(&h)?;
    let (omega_ghz, phi1_zpf) = oscillator_frame(gauge, model);
    Ok(CoupledSpectrum {
        gauge,
        basis: CoupledBasis::EigenbasisProduct {
            n_q: trunc.n_q,
            n_ph: trunc.n_ph,
        },
        phix: model.raw.phix,
        energies: eig.values,
        vectors: eig.vectors,
        omega_ghz,
        phi1_zpf,
        frame: Frame::Eigenbasis {
            n_q: trunc.n_q,
            n_ph: trunc.n_ph,
            qubit_flux,
        },
    })
}

/// Energies only, for sweeps and fits.
pub fn coupled_eigenbasis_energies(
    gauge: Gauge,
    model: &CircuitModel,
    qubit: &SubsystemSpectrum,
    trunc: Truncation,
) -> Result<Vec<f64>> {
    let (h, _) = assemble_eigenbasis(gauge, model, qubit, trunc)?;
    sym_eigenvalues(&h)
}

/// Default plane-wave bases for a gauge: 64 oscillator waves and 32 qubit waves.
pub fn default_planewave_bases(gauge: Gauge, model: &CircuitModel) -> (PlaneWaveBasis, PlaneWaveBasis) {
    let ec = match gauge {
        Gauge::Flux => model.scales.ec_ghz,
        Gauge::Charge => model.charge_oscillator.ec_prime_ghz,
    };
    (
        PlaneWaveBasis::oscillator_default(ec, model.scales.el_ghz),
        PlaneWaveBasis::qubit_default(),
    )
}

fn assemble_planewave(
    gauge: Gauge,
    model: &CircuitModel,
    basis1: &PlaneWaveBasis,
    basis2: &PlaneWaveBasis,
) -> Result<(Mat<f64>, Mat<f64>)> {
    basis1.validate()?;
    basis2.validate()?;
    let (n1, n2) = (basis1.n_waves, basis2.n_waves);
    if n1 * n2 > MAX_PLANEWAVE_DIM {
        return Err(Error::InvalidBasis(format!(
            "plane-wave product dimension {} exceeds {MAX_PLANEWAVE_DIM}",
            n1 * n2
        )));
    }
    let s = &model.scales;
    let ec1 = match gauge {
        Gauge::Flux => s.ec_ghz,
        Gauge::Charge => model.charge_oscillator.ec_prime_ghz,
    };
    let h1 = oscillator_hamiltonian(ec1, s.el_ghz, basis1);
    let h2 = QubitNode::from_circuit(model, gauge, *basis2).hamiltonian(model.raw.phix);
    let dim = n1 * n2;
    let mut h = Mat::<f64>::zeros(dim, dim);
    for a in 0..n1 {
        for b in 0..n1 {
            let v = h1[(a, b)];
            for i in 0..n2 {
                h[(a * n2 + i, b * n2 + i)] += v;
            }
        }
        for i in 0..n2 {
            for j in 0..n2 {
                h[(a * n2 + i, a * n2 + j)] += h2[(i, j)];
            }
        }
    }
    let alpha = model.eff.coupling_ratio();
    match gauge {
        Gauge::Flux => {
            // −(Φ0/2π)² k1 k2 / L12
            let e12 = inductive_energy_ghz(1.0) * model.eff.l12.inverse();
            let k1 = basis1.wave_numbers();
            let k2 = basis2.wave_numbers();
            for a in 0..n1 {
                for i in 0..n2 {
                    h[(a * n2 + i, a * n2 + i)] -= e12 * k1[a] * k2[i];
                }
            }
        }
        Gauge::Charge => {
            // −(α/C_J)(2e)² n1 n2 with n = iA, i.e. +8 α E_CJ A1 ⊗ A2.
            let c = 8.0 * alpha * s.ecj_ghz;
            if c != 0.0 {
                let a1 = linear_kernel(basis1);
                let a2 = linear_kernel(basis2);
                for a in 0..n1 {
                    for b in 0..n1 {
                        let va = c * a1[(a, b)];
                        if va == 0.0 {
                            continue;
                        }
                        for i in 0..n2 {
                            for j in 0..n2 {
                                h[(a * n2 + i, b * n2 + j)] += va * a2[(i, j)];
                            }
                        }
                    }
                }
            }
        }
    }
    Ok((h, h1))
}

/// Plane-wave-product build on the `(k1, k2)` grid.
pub fn build_coupled_planewave(
    gauge: Gauge,
    model: &CircuitModel,
    basis1: &PlaneWaveBasis,
    basis2: &PlaneWaveBasis,
) -> Result<CoupledSpectrum> {
    let (h, h1) = assemble_planewave(gauge, model, basis1, basis2)?;
    let eig = sym_eigen(&h)?;
    let (omega_ghz, phi1_zpf) = oscillator_frame(gauge, model);
    Ok(CoupledSpectrum {
        gauge,
        basis: CoupledBasis::PlanewaveProduct {
            oscillator: *basis1,
            qubit: *basis2,
        },
        phix: model.raw.phix,
        energies: eig.values,
        vectors: eig.vectors,
        omega_ghz,
        phi1_zpf,
        frame: Frame::Planewave {
            h1,
            k1: basis1.wave_numbers(),
            k2: basis2.wave_numbers(),
        },
    })
}

pub fn coupled_planewave_energies(
    gauge: Gauge,
    model: &CircuitModel,
    basis1: &PlaneWaveBasis,
    basis2: &PlaneWaveBasis,
) -> Result<Vec<f64>> {
    let (h, _) = assemble_planewave(gauge, model, basis1, basis2)?;
    sym_eigenvalues(&h)
}

/// Assembled Hamiltonian of either construction, for structural checks.
pub fn planewave_hamiltonian(
    gauge: Gauge,
    model: &CircuitModel,
    basis1: &PlaneWaveBasis,
    basis2: &PlaneWaveBasis,
) -> Result<Mat<f64>> {
    Ok(assemble_planewave(gauge, model, basis1, basis2)?.0)
}

pub fn eigenbasis_hamiltonian(
    gauge: Gauge,
    model: &CircuitModel,
    qubit: &SubsystemSpectrum,
    trunc: Truncation,
) -> Result<Mat<f64>> {
    Ok(assemble_eigenbasis(gauge, model, qubit, trunc)?.0)
}

/// `ω_ij = E_j − E_i` for each requested pair.
pub fn transitions(energies: &[f64], pairs: &[(usize, usize)]) -> Result<Vec<f64>> {
    pairs
        .iter()
        .map(|&(i, j)| {
            let top = i.max(j);
            if top >= energies.len() {
                return Err(Error::IndexOutOfRange {
                    index: top,
                    available: energies.len(),
                });
            }
            Ok(energies[j] - energies[i])
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub state_index: usize,
    pub gauge: Gauge,
    /// `⟨a†a⟩` of the gauge's oscillator `H1` (or `H1'`).
    pub photon_number: f64,
    /// `2π⟨Φ1⟩/Φ0` of the gauge's oscillator flux operator.
    pub flux_1: f64,
    /// `2π⟨Φ2⟩/Φ0`.
    pub flux_2: f64,
    /// `⟨I1⟩`, nA.
    pub current_1: f64,
    /// `⟨I2⟩`, nA.
    pub current_2: f64,
}

/// Expectation values in one eigenstate.
///
/// Currents are computed from the loop fluxes of the original circuit. In the
/// charge gauge the oscillator flux operator is shifted by the transformation,
/// `Φ1 → Φ1 + (L_LC/L12) Φ2`, before solving for the currents.
pub fn observables(spec: &CoupledSpectrum, model: &CircuitModel, state: usize) -> Result<Observables> {
    if state >= spec.energies.len() {
        return Err(Error::IndexOutOfRange {
            index: state,
            available: spec.energies.len(),
        });
    }
    let v = spec.vectors.col(state);
    let (photon_number, flux_1, flux_2) = match &spec.frame {
        Frame::Eigenbasis { n_q, n_ph, qubit_flux } => {
            let (n_q, n_ph) = (*n_q, *n_ph);
            let mut photons = 0.0;
            let mut x = 0.0;
            let mut f2 = 0.0;
            for n in 0..n_ph {
                for i in 0..n_q {
                    let c = v[n * n_q + i];
                    photons += n as f64 * c * c;
                    if n + 1 < n_ph {
                        x += 2.0 * ((n + 1) as f64).sqrt() * c * v[(n + 1) * n_q + i];
                    }
                    for j in 0..n_q {
                        f2 += v[n * n_q + j] * qubit_flux[(j, i)] * c;
                    }
                }
            }
            (photons, spec.phi1_zpf * x, f2)
        }
        Frame::Planewave { h1, k1, k2 } => {
            let (n1, n2) = (k1.len(), k2.len());
            let mut e1 = 0.0;
            let mut f1 = 0.0;
            let mut f2 = 0.0;
            for a in 0..n1 {
                for i in 0..n2 {
                    let c = v[a * n2 + i];
                    f1 += c * c * k1[a];
                    f2 += c * c * k2[i];
                    for b in 0..n1 {
                        e1 += c * h1[(a, b)] * v[b * n2 + i];
                    }
                }
            }
            (e1 / spec.omega_ghz - 0.5, f1, f2)
        }
    };
    let to_wb = FLUX_QUANTUM / (2.0 * PI);
    let lab_flux_1 = match spec.gauge {
        Gauge::Flux => flux_1,
        Gauge::Charge => flux_1 + model.eff.coupling_ratio() * flux_2,
    };
    let (current_1, current_2) = model.branch_currents_na(lab_flux_1 * to_wb, flux_2 * to_wb);
    Ok(Observables {
        state_index: state,
        gauge: spec.gauge,
        photon_number,
        flux_1,
        flux_2,
        current_1,
        current_2,
    })
}

/// Result of one truncation-doubling step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub levels: usize,
    pub max_shift_ghz: f64,
    pub converged: bool,
}

impl ConvergenceReport {
    pub fn compare(a: &[f64], b: &[f64]) -> Self {
        let levels = CONVERGENCE_LEVELS.min(a.len()).min(b.len());
        let max_shift_ghz = a
            .iter()
            .zip(b)
            .take(levels)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        Self {
            levels,
            max_shift_ghz,
            converged: max_shift_ghz < CONVERGENCE_TOL_GHZ,
        }
    }
}

/// Eigenbasis-product solver for one circuit and gauge, reusable across flux
/// biases.
#[derive(Debug, Clone, Copy)]
pub struct CoupledSolver {
    pub model: CircuitModel,
    pub gauge: Gauge,
    pub truncation: Truncation,
    pub qubit_basis: PlaneWaveBasis,
}

impl CoupledSolver {
    pub fn new(model: CircuitModel, gauge: Gauge) -> Self {
        Self {
            model,
            gauge,
            truncation: Truncation::default_for(gauge),
            qubit_basis: PlaneWaveBasis::qubit_default(),
        }
    }

    pub fn with_truncation(self, truncation: Truncation) -> Self {
        Self { truncation, ..self }
    }

    pub fn with_qubit_basis(self, qubit_basis: PlaneWaveBasis) -> Self {
        Self { qubit_basis, ..self }
    }

    fn qubit_node(&self) -> QubitNode {
        QubitNode::from_circuit(&self.model, self.gauge, self.qubit_basis)
    }

    pub fn solve(&self, phix: f64) -> Result<CoupledSpectrum> {
        let qubit = self.qubit_node().spectrum(phix)?;
        build_coupled_eigenbasis(self.gauge, &self.model.with_phix(phix), &qubit, self.truncation)
    }

    pub fn energies(&self, phix: f64) -> Result<Vec<f64>> {
        let qubit = self.qubit_node().spectrum(phix)?;
        coupled_eigenbasis_energies(self.gauge, &self.model.with_phix(phix), &qubit, self.truncation)
    }

    /// The same solver with both truncations doubled; the qubit basis is
    /// doubled too when it has fewer waves than the doubled `N_q` needs.
    pub fn doubled(&self) -> Self {
        let truncation = self.truncation.doubled();
        let mut qubit_basis = self.qubit_basis;
        while qubit_basis.n_waves < 2 * truncation.n_q {
            qubit_basis = qubit_basis.doubled();
        }
        Self {
            truncation,
            qubit_basis,
            ..*self
        }
    }

    pub fn convergence(&self, phix: f64) -> Result<ConvergenceReport> {
        Ok(ConvergenceReport::compare(
            &self.energies(phix)?,
            &self.doubled().energies(phix)?,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::RawCircuit;

    fn model(lc: f64) -> CircuitModel {
        CircuitModel::new(RawCircuit::reference(lc, 0.498).unwrap()).unwrap()
    }

    #[test]
    fn transitions_telescope() {
        let e = [0.0, 1.5, 6.0, 7.25];
        let t = transitions(&e, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!((t[0] + t[1] - t[2]).abs() < 1e-12);
        assert!(transitions(&e, &[(0, 4)]).is_err());
    }

    #[test]
    fn decoupled_build_is_direct_sum() {
        let m = model(0.0);
        let solver = CoupledSolver::new(m, Gauge::Flux);
        let spec = solver.solve(0.498).unwrap();
        let qubit = solver.qubit_node().spectrum(0.498).unwrap();
        let w = m.scales.omega_ghz;
        let mut expected: Vec<f64> = (0..40)
            .flat_map(|n| qubit.energies[..10].iter().map(move |e| e + w * (n as f64 + 0.5)))
            .collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in spec.energies.iter().zip(&expected).take(20) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn eigenbasis_hamiltonian_is_symmetric() {
        let m = model(350.0);
        for gauge in [Gauge::Flux, Gauge::Charge] {
            let q = QubitNode::from_circuit(&m, gauge, PlaneWaveBasis::qubit_default())
                .spectrum(0.498)
                .unwrap();
            let h = eigenbasis_hamiltonian(gauge, &m, &q, Truncation { n_q: 6, n_ph: 20 }).unwrap();
            assert!(crate::linalg::relative_asymmetry(&h) < 1e-12);
        }
    }

    #[test]
    fn rejects_small_truncations() {
        let m = model(20.0);
        let solver = CoupledSolver::new(m, Gauge::Flux).with_truncation(Truncation { n_q: 3, n_ph: 40 });
        assert!(solver.solve(0.5).is_err());
        let b = PlaneWaveBasis::new(8.0, 128).unwrap();
        assert!(build_coupled_planewave(Gauge::Flux, &m, &b, &b).is_err());
    }
}
