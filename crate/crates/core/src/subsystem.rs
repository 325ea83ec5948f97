//! Single-node eigenproblems in the plane-wave basis.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{sym_eigen, Mat};
use crate::planewave::{charge_representation, linear_kernel, quadratic_kernel, PlaneWaveBasis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Oscillator,
    Qubit,
}

/// Levels closer than this (GHz, i.e. 1 Hz) are reported as degenerate.
pub const DEGENERACY_GHZ: f64 = 1e-9;

/// Largest tolerated probability on the two outermost waves at either end.
pub const EDGE_WEIGHT_LIMIT: f64 = 1e-6;

/// Eigenstates of a single-node Hamiltonian.
///
/// Coefficients are real: every node Hamiltonian here is real symmetric in the
/// plane-wave basis. Each vector is signed so that its largest-magnitude entry
/// is positive, which makes flux matrix elements real and charge matrix
/// elements purely imaginary with a reproducible sign.
#[derive(Debug, Clone)]
pub struct SubsystemSpectrum {
    pub label: NodeKind,
    pub basis: PlaneWaveBasis,
    /// Ascending, GHz.
    pub energies: Vec<f64>,
    /// `coefficients[s][k]`: amplitude of wave `k` in state `s`.
    pub coefficients: Vec<Vec<f64>>,
    /// Index pairs `(s, s+1)` closer than [`DEGENERACY_GHZ`].
    pub degenerate_pairs: Vec<(usize, usize)>,
    /// Probability of the ground state on the two outermost waves at each end.
    pub edge_weight: f64,
}

impl SubsystemSpectrum {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// `Some(message)` when the ground state leaks onto the basis edge.
    pub fn basis_warning(&self) -> Option<String> {
        (self.edge_weight > EDGE_WEIGHT_LIMIT).then(|| {
            format!(
                "{:?} ground state has weight {:.3e} on the outermost waves; widen the flux range",
                self.label, self.edge_weight
            )
        })
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.len() {
            return Err(Error::IndexOutOfRange {
                index,
                available: self.len(),
            });
        }
        Ok(())
    }

    /// `ψ(n)` sampled on the charge grid, unit-normalized.
    pub fn n_representation(&self, state: usize) -> Result<Vec<Complex64>> {
        self.check_index(state)?;
        Ok(charge_representation(&self.basis, &self.coefficients[state]))
    }

    /// `(φ, ψ(φ))` at the wave numbers, with `ψ(φ_k) = ψ_k / sqrt(Δk)` so that
    /// `Σ |ψ(φ)|² Δk = 1`.
    pub fn flux_representation(&self, state: usize) -> Result<Vec<(f64, f64)>> {
        self.check_index(state)?;
        let scale = 1.0 / self.basis.dk().sqrt();
        Ok(self
            .basis
            .wave_numbers()
            .into_iter()
            .zip(&self.coefficients[state])
            .map(|(k, c)| (k, c * scale))
            .collect())
    }

    /// `⟨j|φ|i⟩` for `i, j < count` (dimensionless flux `φ = 2πΦ/Φ0`).
    pub fn flux_matrix(&self, count: usize) -> Mat<f64> {
        let k = self.basis.wave_numbers();
        let c = &self.coefficients;
        Mat::from_fn(count, count, |j, i| {
            c[j].iter().zip(&c[i]).zip(&k).map(|((a, b), kk)| a * b * kk).sum()
        })
    }

    /// Imaginary part of `⟨j|n|i⟩` for `i, j < count`; the elements are purely
    /// imaginary and the returned matrix is antisymmetric.
    pub fn charge_matrix(&self, count: usize) -> Mat<f64> {
        let a = linear_kernel(&self.basis);
        let n = self.basis.n_waves;
        let applied: Vec<Vec<f64>> = self.coefficients[..count]
            .iter()
            .map(|v| (0..n).map(|r| (0..n).map(|s| a[(r, s)] * v[s]).sum()).collect())
            .collect();
        Mat::from_fn(count, count, |j, i| {
            self.coefficients[j].iter().zip(&applied[i]).map(|(x, y)| x * y).sum()
        })
    }
}

fn node_hamiltonian(basis: &PlaneWaveBasis, charging_ghz: f64, potential: impl Fn(f64) -> f64) -> Mat<f64> {
    let mut h = quadratic_kernel(basis);
    let k = basis.wave_numbers();
    let n = basis.n_waves;
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] *= 4.0 * charging_ghz;
        }
        h[(i, i)] += potential(k[i]);
    }
    h
}

/// `4E_C n² + E_L φ²/2` as a plane-wave matrix, GHz.
pub fn oscillator_hamiltonian(ec_ghz: f64, el_ghz: f64, basis: &PlaneWaveBasis) -> Mat<f64> {
    node_hamiltonian(basis, ec_ghz, |k| 0.5 * el_ghz * k * k)
}

/// `4E_CJ n² − E_J cos(φ − 2πΦx) + E_L φ²/2` as a plane-wave matrix, GHz.
pub fn qubit_hamiltonian(
    ecj_ghz: f64,
    ej_ghz: f64,
    el_ghz: f64,
    phix: f64,
    basis: &PlaneWaveBasis,
) -> Mat<f64> {
    let kx = 2.0 * PI * phix;
    node_hamiltonian(basis, ecj_ghz, |k| -ej_ghz * (k - kx).cos() + 0.5 * el_ghz * k * k)
}

fn solve(label: NodeKind, basis: PlaneWaveBasis, h: Mat<f64>) -> Result<SubsystemSpectrum> {
    let eig = sym_eigen(&h)?;
    let n = basis.n_waves;
    let coefficients: Vec<Vec<f64>> = (0..n)
        .map(|s| {
            let mut v = eig.vector(s);
            let pivot = v
                .iter()
                .copied()
                .fold(0.0_f64, |best, x| if x.abs() > best.abs() { x } else { best });
            if pivot < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            v
        })
        .collect();
    let degenerate_pairs = eig
        .values
        .windows(2)
        .enumerate()
        .filter(|(_, w)| (w[1] - w[0]).abs() < DEGENERACY_GHZ)
        .map(|(i, _)| (i, i + 1))
        .collect();
    let ground = &coefficients[0];
    let edge_weight = [0, 1, n - 2, n - 1].iter().map(|&i| ground[i] * ground[i]).sum();
    Ok(SubsystemSpectrum {
        label,
        basis,
        energies: eig.values,
        coefficients,
        degenerate_pairs,
        edge_weight,
    })
}

pub fn diagonalize_oscillator(ec_ghz: f64, el_ghz: f64, basis: &PlaneWaveBasis) -> Result<SubsystemSpectrum> {
    if !(ec_ghz > 0.0 && el_ghz > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "oscillator energies must be positive (EC = {ec_ghz}, EL = {el_ghz})"
        )));
    }
    basis.validate()?;
    solve(NodeKind::Oscillator, *basis, oscillator_hamiltonian(ec_ghz, el_ghz, basis))
}

pub fn diagonalize_flux_qubit(
    ecj_ghz: f64,
    ej_ghz: f64,
    el_ghz: f64,
    phix: f64,
    basis: &PlaneWaveBasis,
) -> Result<SubsystemSpectrum> {
    if !(ecj_ghz > 0.0 && ej_ghz > 0.0 && el_ghz > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "qubit energies must be positive (ECJ = {ecj_ghz}, EJ = {ej_ghz}, EL = {el_ghz})"
        )));
    }
    basis.validate()?;
    solve(
        NodeKind::Qubit,
        *basis,
        qubit_hamiltonian(ecj_ghz, ej_ghz, el_ghz, phix, basis),
    )
}

/// Sign changes of a sampled real function, ignoring samples below
/// `threshold` times the peak magnitude.
pub fn count_nodes(samples: &[f64], threshold: f64) -> usize {
    let peak = samples.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let mut last = 0.0_f64;
    let mut nodes = 0;
    for &x in samples {
        if x.abs() < threshold * peak {
            continue;
        }
        if last != 0.0 && x.signum() != last.signum() {
            nodes += 1;
        }
        last = x;
    }
    nodes
}
