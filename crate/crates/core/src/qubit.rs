//! Two-level description of the qubit node.
//!
//! The two lowest levels of the qubit Hamiltonian around the symmetry point
//! follow `ω_os ∓ sqrt(ε² + Δq²)/2` with `ε = 2 Ip (Φx − Φ0/2)`, and their flux
//! expectation values follow `∓Φ2max ε / sqrt(ε² + Δq²)`. Fitting the numerical
//! spectrum to these forms gives `Δq`, `Ip` and `Φ2max`; the charge scale
//! `q2max` is read off the `g`–`e` charge matrix element at the symmetry point.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parallel::map_ordered;
use crate::planewave::PlaneWaveBasis;
use crate::subsystem::{diagonalize_flux_qubit, qubit_hamiltonian, SubsystemSpectrum};
use crate::topology::CircuitModel;
use crate::units::energy_bias_ghz;
use crate::Gauge;

/// Labels of the six lowest qubit levels.
pub const LEVEL_LABELS: [&str; 6] = ["g", "e", "f", "h", "k", "l"];

/// Number of levels tabulated by [`matrix_elements`].
pub const TABULATED_LEVELS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelFit {
    /// Tunnel splitting `Δq/2π`, GHz.
    pub delta_q_ghz: f64,
    /// Persistent current, nA.
    pub ip_na: f64,
    /// Spectral offset `ω_os/2π`, GHz.
    pub omega_os_ghz: f64,
    /// Flux scale, units of Φ0.
    pub phi2max: f64,
    /// `|⟨g|q2|e⟩|` at `Φx = Φ0/2`, units of 2e.
    pub q2max: f64,
    /// Mean squared level residual, GHz².
    pub fit_residual: f64,
}

impl TwoLevelFit {
    pub fn epsilon_ghz(&self, phix: f64) -> f64 {
        energy_bias_ghz(self.ip_na, phix)
    }

    /// `ε / sqrt(ε² + Δq²)`, which is `−⟨g|σx|g⟩` for the two-level model.
    pub fn polarization(&self, phix: f64) -> f64 {
        let eps = self.epsilon_ghz(phix);
        eps / eps.hypot(self.delta_q_ghz)
    }
}

/// Lowest two qubit energies at one flux bias.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelPair {
    pub phix: f64,
    pub ground_ghz: f64,
    pub excited_ghz: f64,
}

/// `(ω_os, Δq, Ip)` fitted to the level pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelFit {
    pub omega_os_ghz: f64,
    pub delta_q_ghz: f64,
    pub ip_na: f64,
    pub residual: f64,
    pub iterations: usize,
}

fn two_level_residuals(levels: &[LevelPair], p: [f64; 3]) -> Vec<f64> {
    let [os, dq, ip] = p;
    levels
        .iter()
        .flat_map(|l| {
            let s = energy_bias_ghz(ip, l.phix).hypot(dq) / 2.0;
            [l.ground_ghz - (os - s), l.excited_ghz - (os + s)]
        })
        .collect()
}

fn mean_square(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum::<f64>() / r.len() as f64
}

/// Solve the 3x3 system `a x = b` by Gaussian elimination with partial pivoting.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col] == 0.0 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Levenberg-Marquardt fit of the lowest two levels to the two-level form.
pub fn fit_two_level(levels: &[LevelPair]) -> Result<LevelFit> {
    if levels.len() < 9 {
        return Err(Error::InvalidArgument(format!(
            "two-level fit needs at least 9 flux points, got {}",
            levels.len()
        )));
    }
    let lo = levels.iter().map(|l| l.phix).fold(f64::INFINITY, f64::min);
    let hi = levels.iter().map(|l| l.phix).fold(f64::NEG_INFINITY, f64::max);
    if lo > 0.5 - 0.004 + 1e-12 || hi < 0.5 + 0.004 - 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "two-level fit grid [{lo}, {hi}] must span ±0.004 around 0.5"
        )));
    }

    // Initial guess: offset from the level mean, splitting from the smallest gap,
    // current from the gap at the grid point farthest from the symmetry point.
    let os0 = levels.iter().map(|l| l.ground_ghz + l.excited_ghz).sum::<f64>() / (2 * levels.len()) as f64;
    let dq0 = levels
        .iter()
        .map(|l| l.excited_ghz - l.ground_ghz)
        .fold(f64::INFINITY, f64::min);
    let far = levels
        .iter()
        .max_by(|a, b| (a.phix - 0.5).abs().total_cmp(&(b.phix - 0.5).abs()))
        .expect("non-empty");
    let gap = far.excited_ghz - far.ground_ghz;
    let eps_far = (gap * gap - dq0 * dq0).max(0.0).sqrt();
    let ip0 = (eps_far / energy_bias_ghz(1.0, 0.5 + (far.phix - 0.5).abs())).max(1.0);

    let mut p = [os0, dq0, ip0];
    let mut r = two_level_residuals(levels, p);
    let initial = mean_square(&r);
    let mut cost = initial;
    let mut lambda = 1e-3;
    let mut iterations = 0;
    for _ in 0..500 {
        iterations += 1;
        // Jacobian of the model (residual = data − model).
        let jac: Vec<[f64; 3]> = levels
            .iter()
            .flat_map(|l| {
                let unit = energy_bias_ghz(1.0, l.phix);
                let eps = unit * p[2];
                let root = eps.hypot(p[1]);
                let ds_ddq = if root > 0.0 { p[1] / (2.0 * root) } else { 0.5 };
                let ds_dip = if root > 0.0 { eps * unit / (2.0 * root) } else { 0.0 };
                [[1.0, -ds_ddq, -ds_dip], [1.0, ds_ddq, ds_dip]]
            })
            .collect();
        let mut jtj = [[0.0; 3]; 3];
        let mut jtr = [0.0; 3];
        for (row, res) in jac.iter().zip(&r) {
            for a in 0..3 {
                jtr[a] += row[a] * res;
                for b in 0..3 {
                    jtj[a][b] += row[a] * row[b];
                }
            }
        }
        let mut improved = false;
        for _ in 0..30 {
            let mut damped = jtj;
            for (a, row) in damped.iter_mut().enumerate() {
                row[a] += lambda * jtj[a][a].max(1e-30);
            }
            let Some(step) = solve3(damped, jtr) else {
                lambda *= 10.0;
                continue;
            };
            let trial = [p[0] + step[0], p[1] + step[1], p[2] + step[2]];
            let trial_r = two_level_residuals(levels, trial);
            let trial_cost = mean_square(&trial_r);
            if trial_cost.is_finite() && trial_cost <= cost {
                let rel_step = (0..3).map(|a| (step[a] / trial[a]).abs()).fold(0.0, f64::max);
                p = trial;
                r = trial_r;
                let converged = rel_step < 1e-13 || cost - trial_cost <= 1e-15 * cost;
                cost = trial_cost;
                lambda = (lambda / 3.0).max(1e-12);
                improved = true;
                if converged {
                    return finish(p, cost, initial, iterations);
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    finish(p, cost, initial, iterations)
}

fn finish(p: [f64; 3], cost: f64, initial: f64, iterations: usize) -> Result<LevelFit> {
    if !cost.is_finite() || cost > initial {
        return Err(Error::FitDivergence(format!(
            "two-level residual {cost:e} did not improve on the initial {initial:e}"
        )));
    }
    Ok(LevelFit {
        omega_os_ghz: p[0],
        delta_q_ghz: p[1].abs(),
        ip_na: p[2].abs(),
        residual: cost,
        iterations,
    })
}

/// Flux bias grid `[center − half_width, center + half_width]` with `points` samples.
pub fn flux_grid(center: f64, half_width: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![center];
    }
    (0..points)
        .map(|i| center - half_width + 2.0 * half_width * i as f64 / (points - 1) as f64)
        .collect()
}

/// Default grid for the two-level fit: 41 points over `[0.496, 0.504]`.
pub fn default_two_level_grid() -> Vec<f64> {
    flux_grid(0.5, 0.004, 41)
}

/// Qubit node parameters (GHz) with its basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitNode {
    pub ecj_ghz: f64,
    pub ej_ghz: f64,
    pub el_ghz: f64,
    pub basis: PlaneWaveBasis,
}

impl QubitNode {
    /// Qubit node of `model` in the given gauge: inductance `L_FQ` in the flux
    /// gauge, `Lc + L2` in the charge gauge.
    pub fn from_circuit(model: &CircuitModel, gauge: Gauge, basis: PlaneWaveBasis) -> Self {
        let s = &model.scales;
        Self {
            ecj_ghz: s.ecj_ghz,
            ej_ghz: s.ej_ghz,
            el_ghz: match gauge {
                Gauge::Flux => s.elfq_ghz,
                Gauge::Charge => s.elfq_charge_ghz,
            },
            basis,
        }
    }

    pub fn hamiltonian(&self, phix: f64) -> crate::linalg::Mat<f64> {
        qubit_hamiltonian(self.ecj_ghz, self.ej_ghz, self.el_ghz, phix, &self.basis)
    }

    pub fn spectrum(&self, phix: f64) -> Result<SubsystemSpectrum> {
        diagonalize_flux_qubit(self.ecj_ghz, self.ej_ghz, self.el_ghz, phix, &self.basis)
    }

    pub fn sweep(&self, grid: &[f64]) -> Result<Vec<SubsystemSpectrum>> {
        map_ordered(grid, |&x| self.spectrum(x)).into_iter().collect()
    }
}

/// `−⟨g|Φ2|g⟩ ≈ ⟨e|Φ2|e⟩ ≈ Φ2max ε/sqrt(ε²+Δq²)`: least-squares scale from the
/// ground and excited diagonal elements separately, then their mean. Units of Φ0.
pub fn extract_phi2max(
    grid: &[f64],
    spectra: &[SubsystemSpectrum],
    delta_q_ghz: f64,
    ip_na: f64,
) -> Result<f64> {
    let mut fg = 0.0;
    let mut fe = 0.0;
    let mut ff = 0.0;
    for (&x, s) in grid.iter().zip(spectra) {
        let eps = energy_bias_ghz(ip_na, x);
        let pol = eps / eps.hypot(delta_q_ghz);
        let m = s.flux_matrix(2);
        fg += -m[(0, 0)] / (2.0 * PI) * pol;
        fe += m[(1, 1)] / (2.0 * PI) * pol;
        ff += pol * pol;
    }
    if ff == 0.0 {
        return Err(Error::InvalidArgument("flux grid contains only the symmetry point".into()));
    }
    let ground = fg / ff;
    let excited = fe / ff;
    let mean = 0.5 * (ground + excited);
    let rel_diff = (ground - excited).abs() / mean.abs();
    if rel_diff > 0.01 {
        return Err(Error::InconsistentFluxScale {
            ground,
            excited,
            rel_diff,
        });
    }
    Ok(mean)
}

/// Full two-level characterization of a qubit node over a flux grid.
pub fn characterize(node: &QubitNode, grid: &[f64]) -> Result<TwoLevelFit> {
    let spectra = node.sweep(grid)?;
    let levels: Vec<LevelPair> = grid
        .iter()
        .zip(&spectra)
        .map(|(&phix, s)| LevelPair {
            phix,
            ground_ghz: s.energies[0],
            excited_ghz: s.energies[1],
        })
        .collect();
    let fit = fit_two_level(&levels)?;
    let phi2max = extract_phi2max(grid, &spectra, fit.delta_q_ghz, fit.ip_na)?;
    let symmetric = node.spectrum(0.5)?;
    let q2max = symmetric.charge_matrix(2)[(0, 1)].abs();
    Ok(TwoLevelFit {
        delta_q_ghz: fit.delta_q_ghz,
        ip_na: fit.ip_na,
        omega_os_ghz: fit.omega_os_ghz,
        phi2max,
        q2max,
        fit_residual: fit.residual,
    })
}

/// Matrix elements of the qubit flux and charge operators among the six lowest
/// levels. Index order is `[j][i]` for `⟨j|·|i⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QubitMatrixElements {
    pub phix: f64,
    /// `⟨j|Φ2|i⟩`, units of Φ0; real.
    pub flux: [[f64; TABULATED_LEVELS]; TABULATED_LEVELS],
    /// `Im ⟨j|q2|i⟩`, units of 2e; the real part is zero.
    pub charge_imag: [[f64; TABULATED_LEVELS]; TABULATED_LEVELS],
}

pub fn matrix_elements(spectrum: &SubsystemSpectrum, phix: f64) -> Result<QubitMatrixElements> {
    if spectrum.len() < TABULATED_LEVELS {
        return Err(Error::IndexOutOfRange {
            index: TABULATED_LEVELS - 1,
            available: spectrum.len(),
        });
    }
    let fm = spectrum.flux_matrix(TABULATED_LEVELS);
    let cm = spectrum.charge_matrix(TABULATED_LEVELS);
    let mut flux = [[0.0; TABULATED_LEVELS]; TABULATED_LEVELS];
    let mut charge_imag = [[0.0; TABULATED_LEVELS]; TABULATED_LEVELS];
    for j in 0..TABULATED_LEVELS {
        for i in 0..TABULATED_LEVELS {
            flux[j][i] = fm[(j, i)] / (2.0 * PI);
            charge_imag[j][i] = cm[(j, i)];
        }
    }
    Ok(QubitMatrixElements {
        phix,
        flux,
        charge_imag,
    })
}
