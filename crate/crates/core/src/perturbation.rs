//! Perturbative level shifts of the uncoupled qubit and oscillator.
//!
//! Unperturbed states `|n i⟩` combine Fock state `n` with qubit level `i`, with
//! `E⁰ = ω(n + ½) + E_i`. The coupling factorizes as `c X ⊗ Q` (see
//! [`crate::coupled`]), so
//!
//! `χ_{ni,mj} = |c X_mn Q_ji|² / (E⁰_ni − E⁰_mj)`
//!
//! and the second-order shift of `|n i⟩` is the sum over `(m, j) ≠ (n, i)`.

use serde::{Deserialize, Serialize};

use crate::coupled::eigenbasis_coupling_ghz;
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::parallel::map_ordered;
use crate::planewave::PlaneWaveBasis;
use crate::qubit::QubitNode;
use crate::rabi::{fock_momentum, fock_position};
use crate::subsystem::SubsystemSpectrum;
use crate::topology::CircuitModel;
use crate::Gauge;

/// Contributors with `|E⁰_ni − E⁰_mj|` below this (GHz) are excluded.
pub const DEGENERACY_GUARD_GHZ: f64 = 1e-3;

/// Default contributor range: Fock states `m ≤ 5`, qubit levels `j < 6`.
pub const DEFAULT_MAX_PHOTON: usize = 5;
pub const DEFAULT_QUBIT_LEVELS: usize = 6;

/// Oscillator and qubit factors of the coupling for one flux bias.
#[derive(Debug, Clone)]
pub struct PerturbationSetup {
    pub gauge: Gauge,
    pub omega_ghz: f64,
    pub qubit_energies: Vec<f64>,
    /// Prefactor `c`, GHz.
    pub coupling_ghz: f64,
    /// Oscillator factor `X_mn`.
    pub oscillator_op: Mat<f64>,
    /// Qubit factor `Q_ji`.
    pub qubit_op: Mat<f64>,
}

impl PerturbationSetup {
    /// `qubit` must be the spectrum of the gauge's qubit node.
    pub fn new(
        gauge: Gauge,
        model: &CircuitModel,
        qubit: &SubsystemSpectrum,
        max_photon: usize,
        qubit_levels: usize,
    ) -> Result<Self> {
        if qubit.len() < qubit_levels {
            return Err(Error::IndexOutOfRange {
                index: qubit_levels - 1,
                available: qubit.len(),
            });
        }
        let n_fock = max_photon + 1;
        let (omega_ghz, oscillator_op, qubit_op) = match gauge {
            Gauge::Flux => (
                model.scales.omega_ghz,
                fock_position(n_fock),
                qubit.flux_matrix(qubit_levels),
            ),
            Gauge::Charge => (
                model.charge_oscillator.omega_prime_ghz,
                fock_momentum(n_fock),
                qubit.charge_matrix(qubit_levels),
            ),
        };
        Ok(Self {
            gauge,
            omega_ghz,
            qubit_energies: qubit.energies[..qubit_levels].to_vec(),
            coupling_ghz: eigenbasis_coupling_ghz(gauge, model),
            oscillator_op,
            qubit_op,
        })
    }

    pub fn max_photon(&self) -> usize {
        self.oscillator_op.nrows() - 1
    }

    pub fn qubit_levels(&self) -> usize {
        self.qubit_energies.len()
    }

    pub fn bare_energy(&self, n: usize, i: usize) -> f64 {
        self.omega_ghz * (n as f64 + 0.5) + self.qubit_energies[i]
    }

    /// `⟨m j|H12|n i⟩`, GHz.
    pub fn element(&self, m: usize, j: usize, n: usize, i: usize) -> f64 {
        self.coupling_ghz * self.oscillator_op[(m, n)] * self.qubit_op[(j, i)]
    }

    fn check(&self, n: usize, i: usize) -> Result<()> {
        if n > self.max_photon() {
            return Err(Error::IndexOutOfRange {
                index: n,
                available: self.max_photon() + 1,
            });
        }
        if i >= self.qubit_levels() {
            return Err(Error::IndexOutOfRange {
                index: i,
                available: self.qubit_levels(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Contributor {
    pub m: usize,
    pub j: usize,
    /// `χ_{ni,mj}`, GHz.
    pub chi_ghz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftTable {
    pub gauge: Gauge,
    /// `(n, i)`.
    pub target: (usize, usize),
    pub contributors: Vec<Contributor>,
    /// `(m, j)` dropped by the degeneracy guard.
    pub excluded: Vec<(usize, usize)>,
    pub first_order_ghz: f64,
    pub total_second_order_ghz: f64,
}

impl ShiftTable {
    /// Sum of `|χ|` over contributors with qubit level in `levels`.
    pub fn abs_sum_over(&self, levels: &[usize]) -> f64 {
        self.contributors
            .iter()
            .filter(|c| levels.contains(&c.j))
            .map(|c| c.chi_ghz.abs())
            .sum()
    }
}

/// `⟨n i|H12|n i⟩`.
pub fn first_order(setup: &PerturbationSetup, n: usize, i: usize) -> Result<f64> {
    setup.check(n, i)?;
    Ok(setup.element(n, i, n, i))
}

/// Second-order contributors `χ_{ni,mj}` over the whole setup range.
pub fn second_order_breakdown(setup: &PerturbationSetup, n: usize, i: usize) -> Result<ShiftTable> {
    setup.check(n, i)?;
    let e_ni = setup.bare_energy(n, i);
    let mut contributors = Vec::new();
    let mut excluded = Vec::new();
    for m in 0..=setup.max_photon() {
        for j in 0..setup.qubit_levels() {
            if (m, j) == (n, i) {
                continue;
            }
            let v = setup.element(m, j, n, i);
            let denom = e_ni - setup.bare_energy(m, j);
            if denom.abs() < DEGENERACY_GUARD_GHZ {
                excluded.push((m, j));
                continue;
            }
            contributors.push(Contributor {
                m,
                j,
                chi_ghz: v * v / denom,
            });
        }
    }
    let total_second_order_ghz = contributors.iter().map(|c| c.chi_ghz).sum();
    Ok(ShiftTable {
        gauge: setup.gauge,
        target: (n, i),
        contributors,
        excluded,
        first_order_ghz: first_order(setup, n, i)?,
        total_second_order_ghz,
    })
}

/// Shifts of `|0g⟩, |1g⟩, |0e⟩, |1e⟩` at one flux bias.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersivePoint {
    pub phix: f64,
    /// `[0g, 1g, 0e, 1e]`.
    pub tables: Vec<ShiftTable>,
    /// `χ_1g − χ_0g`, GHz.
    pub delta_g_ghz: f64,
    /// `χ_1e − χ_0e`, GHz.
    pub delta_e_ghz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContributorRange {
    pub max_photon: usize,
    pub qubit_levels: usize,
}

impl Default for ContributorRange {
    fn default() -> Self {
        Self {
            max_photon: DEFAULT_MAX_PHOTON,
            qubit_levels: DEFAULT_QUBIT_LEVELS,
        }
    }
}

pub fn dispersive_point(
    gauge: Gauge,
    model: &CircuitModel,
    qubit_basis: PlaneWaveBasis,
    range: ContributorRange,
    phix: f64,
) -> Result<DispersivePoint> {
    let qubit = QubitNode::from_circuit(model, gauge, qubit_basis).spectrum(phix)?;
    let setup = PerturbationSetup::new(gauge, &model.with_phix(phix), &qubit, range.max_photon, range.qubit_levels)?;
    let tables = [(0, 0), (1, 0), (0, 1), (1, 1)]
        .iter()
        .map(|&(n, i)| second_order_breakdown(&setup, n, i))
        .collect::<Result<Vec<_>>>()?;
    let chi = |k: usize| tables[k].total_second_order_ghz;
    Ok(DispersivePoint {
        phix,
        delta_g_ghz: chi(1) - chi(0),
        delta_e_ghz: chi(3) - chi(2),
        tables,
    })
}

/// `δω01_g = χ_1g − χ_0g` and `δω01_e = χ_1e − χ_0e` over a flux grid.
pub fn net_dispersive_shift(
    gauge: Gauge,
    model: &CircuitModel,
    qubit_basis: PlaneWaveBasis,
    range: ContributorRange,
    grid: &[f64],
) -> Result<Vec<DispersivePoint>> {
    map_ordered(grid, |&x| dispersive_point(gauge, model, qubit_basis, range, x))
        .into_iter()
        .collect()
}
