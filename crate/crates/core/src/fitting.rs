//! Simplex fits of the Rabi model to circuit transition frequencies.
//!
//! Transitions are labelled by energy order at each flux bias. The reported
//! residual is the mean of `(ω_0i^model − ω_0i^data)²` over the grid and
//! `i ≤ levels`, in MHz². With `levels = 3` the minimized objective also
//! includes `ω_12` and `ω_13`.

use serde::{Deserialize, Serialize};

use crate::coupled::CoupledSolver;
use crate::error::{Error, Result};
use crate::nelder_mead::{minimize, NelderMeadOptions};
use crate::parallel::map_ordered;
use crate::qubit::{characterize, default_two_level_grid, flux_grid, QubitNode, TwoLevelFit};
use crate::rabi::{map_circuit_to_rabi, map_circuit_to_rabi_charge, rabi_energies, RabiParams};
use crate::topology::CircuitModel;
use crate::planewave::PlaneWaveBasis;
use crate::{Gauge, RawCircuit};

const GHZ2_TO_MHZ2: f64 = 1e6;

/// Default fit grid: 41 points over `[0.494, 0.506]`.
pub fn default_fit_grid() -> Vec<f64> {
    flux_grid(0.5, 0.006, 41)
}

/// Transition frequencies of a spectrum at each flux bias.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitData {
    pub grid: Vec<f64>,
    /// Highest excited state `i` in the fitted `ω_0i`.
    pub levels: usize,
    /// `omega_0i[p][i − 1]`, GHz.
    pub omega_0i: Vec<Vec<f64>>,
    /// `(ω_12, ω_13)` per point, GHz.
    pub omega_1j: Vec<[f64; 2]>,
}

impl FitData {
    pub fn from_energies(grid: Vec<f64>, energies: &[Vec<f64>], levels: usize) -> Result<Self> {
        let need = levels.max(3) + 1;
        let mut omega_0i = Vec::with_capacity(grid.len());
        let mut omega_1j = Vec::with_capacity(grid.len());
        for e in energies {
            if e.len() < need {
                return Err(Error::IndexOutOfRange {
                    index: need - 1,
                    available: e.len(),
                });
            }
            omega_0i.push((1..=levels).map(|i| e[i] - e[0]).collect());
            omega_1j.push([e[2] - e[1], e[3] - e[1]]);
        }
        Ok(Self {
            grid,
            levels,
            omega_0i,
            omega_1j,
        })
    }

    /// Circuit spectrum over `grid` from an eigenbasis-product solver.
    pub fn from_circuit(solver: &CoupledSolver, grid: &[f64], levels: usize) -> Result<Self> {
        let energies: Vec<Vec<f64>> = map_ordered(grid, |&x| solver.energies(x)).into_iter().collect::<Result<_>>()?;
        Self::from_energies(grid.to_vec(), &energies, levels)
    }

    /// Spectrum of a Rabi model over `grid`, as fit data.
    pub fn from_rabi(params: &RabiParams, grid: &[f64], levels: usize, n_fock: usize) -> Result<Self> {
        let energies: Vec<Vec<f64>> = map_ordered(grid, |&x| rabi_energies(params, params.epsilon_ghz(x), n_fock))
            .into_iter()
            .collect::<Result<_>>()?;
        Self::from_energies(grid.to_vec(), &energies, levels)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.omega_0i.iter_mut().flatten().for_each(|v| *v *= factor);
        out.omega_1j.iter_mut().flatten().for_each(|v| *v *= factor);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitProblem {
    pub data: FitData,
    pub variant: Gauge,
    pub initial: RabiParams,
    /// Per flux point; uniform by default.
    pub weights: Vec<f64>,
    pub n_fock: usize,
    /// Also fit `ω_12` and `ω_13` when `levels = 3`. On by default.
    pub fit_1j: bool,
    pub options: NelderMeadOptions,
}

impl FitProblem {
    pub fn new(data: FitData, initial: RabiParams) -> Self {
        let weights = vec![1.0; data.grid.len()];
        Self {
            n_fock: initial.default_fock(),
            variant: initial.variant,
            data,
            initial,
            weights,
            fit_1j: true,
            options: NelderMeadOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let points = self.data.grid.len() * self.data.levels;
        if self.data.levels == 0 || points < 12 {
            return Err(Error::InvalidArgument(format!(
                "four fit parameters need at least 12 data points, got {points}"
            )));
        }
        if self.weights.len() != self.data.grid.len() || self.weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::InvalidArgument("one non-negative weight per flux point required".into()));
        }
        if self.data.omega_0i.iter().flatten().any(|v| !(*v > 0.0)) {
            return Err(Error::InvalidArgument("transition frequencies must be positive".into()));
        }
        if 2 * self.n_fock < self.data.levels + 1 {
            return Err(Error::InvalidBasis(format!(
                "n_fock = {} cannot resolve {} levels",
                self.n_fock, self.data.levels
            )));
        }
        self.initial.validate()
    }

    fn params(&self, p: &[f64]) -> RabiParams {
        let mut params = RabiParams::from_array([p[0], p[1], p[2], p[3]], self.variant);
        params.g_ghz = params.g_ghz.abs();
        params
    }

    /// Mean squared `ω_0i` residual in MHz².
    pub fn residual(&self, params: &RabiParams) -> f64 {
        self.mean_square(params, false)
    }

    /// The minimized quantity: [`Self::residual`], or with `fit_1j` the mean
    /// over `ω_0i`, `ω_12` and `ω_13`.
    pub fn objective(&self, params: &RabiParams) -> f64 {
        self.mean_square(params, self.fit_1j && self.data.levels == 3)
    }

    fn mean_square(&self, params: &RabiParams, with_1j: bool) -> f64 {
        if !(params.omega_ghz > 0.0 && params.delta_q_ghz > 0.0) {
            return f64::INFINITY;
        }
        let per_point_count = self.data.levels + if with_1j { 2 } else { 0 };
        let indices: Vec<usize> = (0..self.data.grid.len()).collect();
        let per_point: Vec<f64> = map_ordered(&indices, |&p| {
            let x = self.data.grid[p];
            match rabi_energies(params, params.epsilon_ghz(x), self.n_fock) {
                Ok(e) => {
                    let zero: f64 = self.data.omega_0i[p]
                        .iter()
                        .enumerate()
                        .map(|(k, d)| (e[k + 1] - e[0] - d).powi(2))
                        .sum();
                    let one: f64 = if with_1j {
                        let [d12, d13] = self.data.omega_1j[p];
                        (e[2] - e[1] - d12).powi(2) + (e[3] - e[1] - d13).powi(2)
                    } else {
                        0.0
                    };
                    zero + one
                }
                Err(_) => f64::INFINITY,
            }
        });
        let total_weight: f64 = self.weights.iter().sum::<f64>() * per_point_count as f64;
        let sum: f64 = per_point.iter().zip(&self.weights).map(|(r, w)| r * w).sum();
        sum / total_weight * GHZ2_TO_MHZ2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: RabiParams,
    /// Mean squared `ω_0i` residual, MHz².
    pub residual_mhz2: f64,
    /// Residual of the initial guess, MHz².
    pub initial_residual_mhz2: f64,
    /// Objective evaluations across all restarts.
    pub iterations: usize,
    pub converged: bool,
}

pub fn fit(problem: &FitProblem) -> Result<FitResult> {
    problem.validate()?;
    let initial_residual = problem.residual(&problem.initial);
    let x0 = problem.initial.as_array();
    let m = minimize(|p| problem.objective(&problem.params(p)), &x0, &problem.options);
    if !m.value.is_finite() {
        return Err(Error::FitDivergence(format!("objective is {} at the best point", m.value)));
    }
    Ok(FitResult {
        params: problem.params(&m.x),
        residual_mhz2: problem.residual(&problem.params(&m.x)),
        initial_residual_mhz2: initial_residual,
        iterations: m.evaluations,
        converged: m.converged,
    })
}

/// [`fit`] with the charge-gauge Rabi variant.
pub fn fit_charge_variant(problem: &FitProblem) -> Result<FitResult> {
    if problem.variant != Gauge::Charge || problem.initial.variant != Gauge::Charge {
        return Err(Error::InvalidArgument("fit_charge_variant needs a charge-variant problem".into()));
    }
    fit(problem)
}

/// Two-level fits and Rabi mappings of one circuit in both gauges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitMapping {
    pub flux_qubit: TwoLevelFit,
    pub charge_qubit: TwoLevelFit,
    pub flux: RabiParams,
    pub charge: RabiParams,
}

pub fn map_circuit(model: &CircuitModel, qubit_basis: PlaneWaveBasis) -> Result<CircuitMapping> {
    let grid = default_two_level_grid();
    let flux_qubit = characterize(&QubitNode::from_circuit(model, Gauge::Flux, qubit_basis), &grid)?;
    let charge_qubit = characterize(&QubitNode::from_circuit(model, Gauge::Charge, qubit_basis), &grid)?;
    Ok(CircuitMapping {
        flux_qubit,
        charge_qubit,
        flux: map_circuit_to_rabi(model, &flux_qubit),
        charge: map_circuit_to_rabi_charge(model, &charge_qubit),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepFitRow {
    pub lc_ph: f64,
    pub mapped: Option<RabiParams>,
    pub fitted: Option<FitResult>,
    /// Failure message when this point could not be mapped or fitted.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepFitConfig {
    /// `Lc + L1`, pH.
    pub sum1_ph: f64,
    /// `Lc + L2`, pH.
    pub sum2_ph: f64,
    pub c_pf: f64,
    pub cj_ff: f64,
    pub ej_ghz: f64,
    pub grid: Vec<f64>,
    pub levels: usize,
    pub variant: Gauge,
    pub options: NelderMeadOptions,
}

impl SweepFitConfig {
    pub fn reference() -> Self {
        let raw = RawCircuit::reference(0.0, 0.5).expect("reference circuit");
        Self {
            sum1_ph: 800.0,
            sum2_ph: 2050.0,
            c_pf: raw.c_pf,
            cj_ff: raw.cj_ff,
            ej_ghz: raw.ej_ghz,
            grid: default_fit_grid(),
            levels: 3,
            variant: Gauge::Flux,
            options: NelderMeadOptions::default(),
        }
    }
}

/// Map and fit one circuit of the fixed-sum family.
pub fn fit_circuit(config: &SweepFitConfig, lc_ph: f64) -> Result<(RabiParams, FitResult)> {
    let raw = RawCircuit::with_fixed_sums(
        lc_ph,
        config.sum1_ph,
        config.sum2_ph,
        config.c_pf,
        config.cj_ff,
        config.ej_ghz,
        0.5,
    )?;
    let model = CircuitModel::new(raw)?;
    let mapping = map_circuit(&model, PlaneWaveBasis::qubit_default())?;
    let mapped = match config.variant {
        Gauge::Flux => mapping.flux,
        Gauge::Charge => mapping.charge,
    };
    let data = FitData::from_circuit(&CoupledSolver::new(model, Gauge::Flux), &config.grid, config.levels)?;
    let mut problem = FitProblem::new(data, mapped);
    problem.options = config.options;
    Ok((mapped, fit(&problem)?))
}

/// Fit every `Lc`; failures are recorded per row and the sweep continues.
pub fn sweep_fit(config: &SweepFitConfig, lc_list: &[f64]) -> Vec<SweepFitRow> {
    lc_list
        .iter()
        .map(|&lc_ph| match fit_circuit(config, lc_ph) {
            Ok((mapped, fitted)) => SweepFitRow {
                lc_ph,
                mapped: Some(mapped),
                fitted: Some(fitted),
                error: None,
            },
            Err(e) => SweepFitRow {
                lc_ph,
                mapped: None,
                fitted: None,
                error: Some(e.to_string()),
            },
        })
        .collect()
}
