//! Run configuration. Every physical quantity carries its unit in the key.

use std::path::PathBuf;

use fluxrabi_core::coupled::Truncation;
use fluxrabi_core::nelder_mead::NelderMeadOptions;
use fluxrabi_core::perturbation::ContributorRange;
use fluxrabi_core::planewave::PlaneWaveBasis;
use fluxrabi_core::qubit::flux_grid;
use fluxrabi_core::units::inductive_energy_ghz;
use fluxrabi_core::{CircuitModel, Gauge, RawCircuit};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Task {
    QubitSpectrum,
    InductanceCompare,
    CircuitSpectrumFlux,
    CircuitSpectrumCharge,
    RabiMap,
    RabiFit,
    MatrixElements,
    Observables,
    Perturbation,
    Wavefunctions,
    GaugeCheck,
    PaperRegression,
}

impl Task {
    pub const ALL: [Task; 12] = [
        Task::QubitSpectrum,
        Task::InductanceCompare,
        Task::CircuitSpectrumFlux,
        Task::CircuitSpectrumCharge,
        Task::RabiMap,
        Task::RabiFit,
        Task::MatrixElements,
        Task::Observables,
        Task::Perturbation,
        Task::Wavefunctions,
        Task::GaugeCheck,
        Task::PaperRegression,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::QubitSpectrum => "qubit-spectrum",
            Task::InductanceCompare => "inductance-compare",
            Task::CircuitSpectrumFlux => "circuit-spectrum-flux",
            Task::CircuitSpectrumCharge => "circuit-spectrum-charge",
            Task::RabiMap => "rabi-map",
            Task::RabiFit => "rabi-fit",
            Task::MatrixElements => "matrix-elements",
            Task::Observables => "observables",
            Task::Perturbation => "perturbation",
            Task::Wavefunctions => "wavefunctions",
            Task::GaugeCheck => "gauge-check",
            Task::PaperRegression => "paper-regression",
        }
    }

    pub fn parse(name: &str) -> Option<Task> {
        Task::ALL.into_iter().find(|t| t.name() == name)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub circuit: CircuitConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub numerics: NumericsConfig,
    #[serde(default)]
    pub tasks: Vec<String>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitConfig {
    #[serde(rename = "Lc_pH")]
    pub lc_ph: f64,
    #[serde(rename = "L1_pH")]
    pub l1_ph: f64,
    #[serde(rename = "L2_pH")]
    pub l2_ph: f64,
    #[serde(rename = "C_pF")]
    pub c_pf: f64,
    #[serde(rename = "CJ_fF")]
    pub cj_ff: f64,
    /// Exactly one of `EJ_GHz` and `LJ_pH`.
    #[serde(rename = "EJ_GHz", default, skip_serializing_if = "Option::is_none")]
    pub ej_ghz: Option<f64>,
    #[serde(rename = "LJ_pH", default, skip_serializing_if = "Option::is_none")]
    pub lj_ph: Option<f64>,
}

impl Default for CircuitConfig {
    fn default() -> Self {
        Self {
            lc_ph: 350.0,
            l1_ph: 450.0,
            l2_ph: 1700.0,
            c_pf: 0.87,
            cj_ff: 4.84,
            ej_ghz: None,
            lj_ph: Some(990.0),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(rename = "start_Phi0")]
    pub start: f64,
    #[serde(rename = "stop_Phi0")]
    pub stop: f64,
    pub points: usize,
}

impl GridConfig {
    pub fn values(&self) -> Vec<f64> {
        flux_grid(0.5 * (self.start + self.stop), 0.5 * (self.stop - self.start), self.points)
    }

    fn validate(&self, what: &str) -> Result<(), String> {
        if !(self.start.is_finite() && self.stop.is_finite()) || self.stop < self.start {
            return Err(format!("{what}: need finite start_Phi0 <= stop_Phi0"));
        }
        if self.points == 0 {
            return Err(format!("{what}: points must be positive"));
        }
        if self.points == 1 && self.start != self.stop {
            return Err(format!("{what}: a single point needs start_Phi0 = stop_Phi0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_phix")]
    pub phix: GridConfig,
    /// Lc values for sweeps; the circuit's own Lc when absent.
    #[serde(rename = "Lc_list_pH", default, skip_serializing_if = "Option::is_none")]
    pub lc_list_ph: Option<Vec<f64>>,
    /// Held fixed across the Lc list; the circuit's `Lc + L1` when absent.
    #[serde(rename = "Lc_plus_L1_pH", default, skip_serializing_if = "Option::is_none")]
    pub sum1_ph: Option<f64>,
    #[serde(rename = "Lc_plus_L2_pH", default, skip_serializing_if = "Option::is_none")]
    pub sum2_ph: Option<f64>,
}

fn default_phix() -> GridConfig {
    GridConfig {
        start: 0.494,
        stop: 0.506,
        points: 41,
    }
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            phix: default_phix(),
            lc_list_ph: None,
            sum1_ph: None,
            sum2_ph: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsConfig {
    pub qubit_waves: usize,
    pub qubit_n_max: f64,
    pub flux_qubit_levels: usize,
    pub charge_qubit_levels: usize,
    pub fock_states: usize,
    pub fit_levels: usize,
    pub fit_grid: GridConfig,
    pub fit_curves: bool,
    pub fit_variants: Vec<Gauge>,
    pub fit_max_evaluations: usize,
    pub fit_restarts: usize,
    pub perturbation_max_photon: usize,
    pub perturbation_qubit_levels: usize,
    pub observable_states: usize,
    pub wavefunction_states: usize,
    pub gauge_check_levels: usize,
    pub gauge_check_convergence: bool,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        let q = PlaneWaveBasis::qubit_default();
        let nm = NelderMeadOptions::default();
        let pr = ContributorRange::default();
        Self {
            qubit_waves: q.n_waves,
            qubit_n_max: q.n_max,
            flux_qubit_levels: Truncation::default_for(Gauge::Flux).n_q,
            charge_qubit_levels: Truncation::default_for(Gauge::Charge).n_q,
            fock_states: Truncation::default_for(Gauge::Flux).n_ph,
            fit_levels: 3,
            fit_grid: default_phix(),
            fit_curves: true,
            fit_variants: vec![Gauge::Flux],
            fit_max_evaluations: nm.max_evaluations,
            fit_restarts: nm.restarts,
            perturbation_max_photon: pr.max_photon,
            perturbation_qubit_levels: pr.qubit_levels,
            observable_states: 4,
            wavefunction_states: 6,
            gauge_check_levels: 8,
            gauge_check_convergence: true,
        }
    }
}

impl NumericsConfig {
    pub fn qubit_basis(&self) -> Result<PlaneWaveBasis, String> {
        PlaneWaveBasis::new(self.qubit_n_max, self.qubit_waves).map_err(|e| e.to_string())
    }

    pub fn truncation(&self, gauge: Gauge) -> Truncation {
        Truncation {
            n_q: match gauge {
                Gauge::Flux => self.flux_qubit_levels,
                Gauge::Charge => self.charge_qubit_levels,
            },
            n_ph: self.fock_states,
        }
    }

    pub fn optimizer(&self) -> NelderMeadOptions {
        NelderMeadOptions {
            max_evaluations: self.fit_max_evaluations,
            restarts: self.fit_restarts,
            ..NelderMeadOptions::default()
        }
    }

    pub fn contributors(&self) -> ContributorRange {
        ContributorRange {
            max_photon: self.perturbation_max_photon,
            qubit_levels: self.perturbation_qubit_levels,
        }
    }

    fn validate(&self) -> Result<(), String> {
        self.qubit_basis()?;
        for gauge in [Gauge::Flux, Gauge::Charge] {
            self.truncation(gauge).validate().map_err(|e| e.to_string())?;
            if self.truncation(gauge).n_q > self.qubit_waves {
                return Err(format!("{gauge} qubit levels exceed qubit_waves"));
            }
        }
        self.fit_grid.validate("numerics.fit_grid")?;
        if !(1..=7).contains(&self.fit_levels) {
            return Err("numerics.fit_levels must be between 1 and 7".into());
        }
        if self.fit_variants.is_empty() {
            return Err("numerics.fit_variants must not be empty".into());
        }
        if self.fit_max_evaluations == 0 {
            return Err("numerics.fit_max_evaluations must be positive".into());
        }
        let max_levels = self.flux_qubit_levels.min(self.charge_qubit_levels);
        if self.perturbation_qubit_levels < 2 || self.perturbation_qubit_levels > self.qubit_waves {
            return Err("numerics.perturbation_qubit_levels must be between 2 and qubit_waves".into());
        }
        if self.perturbation_max_photon < 1 {
            return Err("numerics.perturbation_max_photon must be at least 1".into());
        }
        if self.observable_states == 0 || self.gauge_check_levels == 0 || self.wavefunction_states == 0 {
            return Err("state counts must be positive".into());
        }
        if self.wavefunction_states > self.qubit_waves {
            return Err("numerics.wavefunction_states exceeds qubit_waves".into());
        }
        if self.gauge_check_levels > max_levels * self.fock_states {
            return Err("numerics.gauge_check_levels exceeds the truncated dimension".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        let c = &self.circuit;
        match (c.ej_ghz, c.lj_ph) {
            (Some(_), Some(_)) => return Err("circuit: give EJ_GHz or LJ_pH, not both".into()),
            (None, None) => return Err("circuit: one of EJ_GHz or LJ_pH is required".into()),
            _ => {}
        }
        if let Some(lj) = c.lj_ph {
            if !(lj > 0.0 && lj.is_finite()) {
                return Err(format!("circuit: LJ_pH = {lj} must be positive"));
            }
        }
        self.base_circuit().map_err(|e| format!("circuit: {e}"))?;
        self.sweep.phix.validate("sweep.phix")?;
        if let Some(list) = &self.sweep.lc_list_ph {
            if list.is_empty() {
                return Err("sweep.Lc_list_pH must not be empty".into());
            }
        }
        for lc in self.lc_values() {
            self.circuit_at(lc, 0.5).map_err(|e| format!("sweep at Lc = {lc} pH: {e}"))?;
        }
        self.numerics.validate()?;
        self.tasks()?;
        Ok(())
    }

    pub fn ej_ghz(&self) -> f64 {
        match (self.circuit.ej_ghz, self.circuit.lj_ph) {
            (Some(ej), _) => ej,
            (None, Some(lj)) => inductive_energy_ghz(lj),
            (None, None) => f64::NAN,
        }
    }

    fn base_circuit(&self) -> fluxrabi_core::Result<RawCircuit> {
        let c = &self.circuit;
        RawCircuit::new(c.lc_ph, c.l1_ph, c.l2_ph, c.c_pf, c.cj_ff, self.ej_ghz(), 0.5)
    }

    pub fn sums(&self) -> (f64, f64) {
        let c = &self.circuit;
        (
            self.sweep.sum1_ph.unwrap_or(c.lc_ph + c.l1_ph),
            self.sweep.sum2_ph.unwrap_or(c.lc_ph + c.l2_ph),
        )
    }

    pub fn lc_values(&self) -> Vec<f64> {
        self.sweep.lc_list_ph.clone().unwrap_or_else(|| vec![self.circuit.lc_ph])
    }

    pub fn circuit_at(&self, lc: f64, phix: f64) -> fluxrabi_core::Result<RawCircuit> {
        let (s1, s2) = self.sums();
        let c = &self.circuit;
        RawCircuit::with_fixed_sums(lc, s1, s2, c.c_pf, c.cj_ff, self.ej_ghz(), phix)
    }

    pub fn model_at(&self, lc: f64) -> fluxrabi_core::Result<CircuitModel> {
        CircuitModel::new(self.circuit_at(lc, 0.5)?)
    }

    /// Requested tasks in canonical order, all of them when none are listed.
    pub fn tasks(&self) -> Result<Vec<Task>, String> {
        if self.tasks.is_empty() {
            return Ok(Task::ALL.to_vec());
        }
        let mut out = Vec::new();
        for name in &self.tasks {
            let task = Task::parse(name).ok_or_else(|| format!("unknown task {name:?}"))?;
            if !out.contains(&task) {
                out.push(task);
            }
        }
        out.sort();
        Ok(out)
    }
}
