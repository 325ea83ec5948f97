//! Generalized quantum Rabi model and its charge-gauge variant.
//!
//! Flux gauge:   `H = ω(a†a + ½) − ½(ε σx + Δq σz) + g σx (a + a†)`
//!
//! Charge gauge: `H' = ω'(a†a + ½) − ½(ε σx + Δq σz) + g' (iσy)(a − a†)`
//!
//! Both are real symmetric in the product basis. States are ordered qubit
//! index fastest: basis index `2n + s` for Fock number `n` and `σz = (+1, −1)`
//! for `s = (0, 1)`.
//!
//! The mapped coupling is `ħg = −(L_LC/L12) I_zpf Φ2max`; only `|g|` is kept
//! because the spectrum does not depend on its sign.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{sym_eigen, sym_eigenvalues, Mat};
use crate::qubit::TwoLevelFit;
use crate::topology::CircuitModel;
use crate::units::{energy_bias_ghz, FLUX_QUANTUM, NA, PLANCK};
use crate::Gauge;

/// Lowest Fock truncation accepted.
pub const MIN_FOCK: usize = 8;

/// Levels compared by the Fock-doubling convergence check.
pub const CONVERGENCE_LEVELS: usize = 8;

/// Largest level shift (GHz) tolerated by the Fock-doubling check.
pub const CONVERGENCE_TOL_GHZ: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RabiParams {
    /// `ω/2π`, or `ω'/2π` for the charge variant; GHz.
    pub omega_ghz: f64,
    /// `Δq/2π`, GHz.
    pub delta_q_ghz: f64,
    /// Persistent current defining `ε(Φx)`, nA.
    pub ip_na: f64,
    /// `g/2π`, or `g'/2π` for the charge variant; GHz.
    pub g_ghz: f64,
    pub variant: Gauge,
}

impl RabiParams {
    pub fn epsilon_ghz(&self, phix: f64) -> f64 {
        energy_bias_ghz(self.ip_na, phix)
    }

    /// Default Fock truncation: 60 in deep-strong coupling, 20 when `g/ω < 0.2`.
    pub fn default_fock(&self) -> usize {
        if self.g_ghz.abs() / self.omega_ghz < 0.2 {
            20
        } else {
            60
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.omega_ghz) || !ok(self.delta_q_ghz) || !self.g_ghz.is_finite() || !self.ip_na.is_finite() {
            return Err(Error::InvalidArgument(format!("invalid Rabi parameters {self:?}")));
        }
        Ok(())
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.omega_ghz, self.delta_q_ghz, self.g_ghz, self.ip_na]
    }

    pub fn from_array(p: [f64; 4], variant: Gauge) -> Self {
        Self {
            omega_ghz: p[0],
            delta_q_ghz: p[1],
            g_ghz: p[2],
            ip_na: p[3],
            variant,
        }
    }
}

/// Mapping of circuit quantities onto the flux-gauge Rabi model.
/// `fit` must describe the flux-gauge qubit node (inductance `L_FQ`).
pub fn map_circuit_to_rabi(model: &CircuitModel, fit: &TwoLevelFit) -> RabiParams {
    let alpha = model.eff.coupling_ratio();
    let g = alpha * model.scales.izpf_na * NA * fit.phi2max * FLUX_QUANTUM / PLANCK / 1e9;
    RabiParams {
        omega_ghz: model.scales.omega_ghz,
        delta_q_ghz: fit.delta_q_ghz,
        ip_na: fit.ip_na,
        g_ghz: g.abs(),
        variant: Gauge::Flux,
    }
}

/// Charge-gauge mapping `g' = q1zpf q2max L_LC/(C_J L12)` with `q2 = 2e n`.
/// `fit` must describe the charge-gauge qubit node (inductance `Lc + L2`).
pub fn map_circuit_to_rabi_charge(model: &CircuitModel, fit: &TwoLevelFit) -> RabiParams {
    let alpha = model.eff.coupling_ratio();
    let q2max = 2.0 * crate::units::ELEMENTARY_CHARGE * fit.q2max;
    let g = model.charge_oscillator.q1_zpf * q2max * alpha / model.raw.cj_farad() / PLANCK / 1e9;
    RabiParams {
        omega_ghz: model.charge_oscillator.omega_prime_ghz,
        delta_q_ghz: fit.delta_q_ghz,
        ip_na: fit.ip_na,
        g_ghz: g.abs(),
        variant: Gauge::Charge,
    }
}

/// `a + a†` on the lowest `n` Fock states.
pub fn fock_position(n: usize) -> Mat<f64> {
    Mat::from_fn(n, n, |i, j| {
        if i + 1 == j {
            (j as f64).sqrt()
        } else if j + 1 == i {
            (i as f64).sqrt()
        } else {
            0.0
        }
    })
}

/// `a − a†` on the lowest `n` Fock states (real antisymmetric).
pub fn fock_momentum(n: usize) -> Mat<f64> {
    Mat::from_fn(n, n, |i, j| {
        if i + 1 == j {
            (j as f64).sqrt()
        } else if j + 1 == i {
            -(i as f64).sqrt()
        } else {
            0.0
        }
    })
}

/// Rabi Hamiltonian at bias `ε` (GHz) in the `2n + s` product basis.
pub fn rabi_hamiltonian(params: &RabiParams, epsilon_ghz: f64, n_fock: usize) -> Mat<f64> {
    let dim = 2 * n_fock;
    let mut h = Mat::<f64>::zeros(dim, dim);
    let (w, dq, g) = (params.omega_ghz, params.delta_q_ghz, params.g_ghz);
    for n in 0..n_fock {
        let (up, down) = (2 * n, 2 * n + 1);
        let bare = w * (n as f64 + 0.5);
        h[(up, up)] = bare - 0.5 * dq;
        h[(down, down)] = bare + 0.5 * dq;
        h[(up, down)] = -0.5 * epsilon_ghz;
        h[(down, up)] = -0.5 * epsilon_ghz;
        if n + 1 < n_fock {
            let amp = g * ((n + 1) as f64).sqrt();
            let (up1, down1) = (2 * (n + 1), 2 * (n + 1) + 1);
            match params.variant {
                // σx (a + a†): ⟨n+1, s'|·|n, s⟩ = √(n+1) for s' ≠ s.
                Gauge::Flux => {
                    h[(up1, down)] = amp;
                    h[(down, up1)] = amp;
                    h[(down1, up)] = amp;
                    h[(up, down1)] = amp;
                }
                // (iσy)(a − a†): ⟨n+1|a − a†|n⟩ = −√(n+1), iσy = [[0, 1], [−1, 0]].
                Gauge::Charge => {
                    h[(up1, down)] = -amp;
                    h[(down, up1)] = -amp;
                    h[(down1, up)] = amp;
                    h[(up, down1)] = amp;
                }
            }
        }
    }
    h
}

/// Ascending eigenvalues of the Rabi model at bias `ε`, no convergence check.
pub fn rabi_energies(params: &RabiParams, epsilon_ghz: f64, n_fock: usize) -> Result<Vec<f64>> {
    sym_eigenvalues(&rabi_hamiltonian(params, epsilon_ghz, n_fock))
}

#[derive(Debug, Clone)]
pub struct RabiSpectrum {
    pub energies: Vec<f64>,
    /// Columns are eigenvectors in the `2n + s` basis.
    pub vectors: Mat<f64>,
    pub n_fock: usize,
    /// Largest shift of the lowest levels when `n_fock` is doubled, GHz.
    pub doubling_shift_ghz: f64,
    pub converged: bool,
}

impl RabiSpectrum {
    /// `⟨a†a⟩` in eigenstate `state`.
    pub fn photon_number(&self, state: usize) -> f64 {
        (0..self.vectors.nrows())
            .map(|k| (k / 2) as f64 * self.vectors[(k, state)].powi(2))
            .sum()
    }
}

/// Diagonalize with a Fock-doubling check; a truncation shift above 1 MHz is
/// flagged through `converged`, not returned as an error.
pub fn diagonalize_rabi(params: &RabiParams, phix: f64, n_fock: usize) -> Result<RabiSpectrum> {
    diagonalize_rabi_at(params, params.epsilon_ghz(phix), n_fock)
}

/// As [`diagonalize_rabi`], with the bias `ε` (GHz) given directly.
pub fn diagonalize_rabi_at(params: &RabiParams, epsilon_ghz: f64, n_fock: usize) -> Result<RabiSpectrum> {
    if n_fock < MIN_FOCK {
        return Err(Error::InvalidBasis(format!("n_fock = {n_fock} is below {MIN_FOCK}")));
    }
    params.validate()?;
    let eig = sym_eigen(&rabi_hamiltonian(params, epsilon_ghz, n_fock))?;
    let doubled = rabi_energies(params, epsilon_ghz, 2 * n_fock)?;
    let shift = eig
        .values
        .iter()
        .zip(&doubled)
        .take(CONVERGENCE_LEVELS)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(RabiSpectrum {
        energies: eig.values,
        vectors: eig.vectors,
        n_fock,
        doubling_shift_ghz: shift,
        converged: shift < CONVERGENCE_TOL_GHZ,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(g: f64, variant: Gauge) -> RabiParams {
        RabiParams {
            omega_ghz: 6.0,
            delta_q_ghz: 1.5,
            ip_na: 280.0,
            g_ghz: g,
            variant,
        }
    }

    #[test]
    fn decoupled_levels_are_direct_sum() {
        let p = params(0.0, Gauge::Flux);
        let e = rabi_energies(&p, 0.0, 20).unwrap();
        let mut expected: Vec<f64> = (0..20)
            .flat_map(|n| [6.0 * (n as f64 + 0.5) - 0.75, 6.0 * (n as f64 + 0.5) + 0.75])
            .collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in e.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn displaced_oscillator_limit() {
        let mut p = params(3.0, Gauge::Flux);
        p.delta_q_ghz = 1e-9;
        let s = diagonalize_rabi_at(&p, 0.0, 60).unwrap();
        assert!((s.energies[0] - (3.0 - 9.0 / 6.0)).abs() < 1e-6);
        assert!((s.photon_number(0) - 0.25).abs() < 1e-6);
    }

    #[test]
    fn hamiltonians_are_symmetric() {
        for variant in [Gauge::Flux, Gauge::Charge] {
            let h = rabi_hamiltonian(&params(1.0, variant), 0.3, 12);
            assert_eq!(crate::linalg::relative_asymmetry(&h), 0.0);
        }
    }

    #[test]
    fn coupling_sign_and_bias_parity() {
        let e1 = rabi_energies(&params(2.0, Gauge::Flux), 0.7, 40).unwrap();
        let e2 = rabi_energies(&params(-2.0, Gauge::Flux), 0.7, 40).unwrap();
        let e3 = rabi_energies(&params(2.0, Gauge::Flux), -0.7, 40).unwrap();
        for i in 0..8 {
            assert!((e1[i] - e2[i]).abs() < 1e-6);
            assert!((e1[i] - e3[i]).abs() < 1e-6);
        }
    }

    #[test]
    fn rejects_small_truncation() {
        assert!(diagonalize_rabi(&params(0.1, Gauge::Flux), 0.5, 4).is_err());
    }
}
