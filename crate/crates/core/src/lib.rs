//! Spectrum of a single-junction flux qubit inductively coupled to an LC
//! oscillator, obtained from circuit quantization, and its description by the
//! quantum Rabi model in the flux and charge gauges.
//!
//! Unit system used throughout: energies are stored as frequencies `E/h` in
//! GHz, inductances in pH, junction capacitance in fF, oscillator capacitance
//! in pF, flux bias in units of the flux quantum, currents in nA.
//!
//! The layers build on each other:
//!
//! * [`units`] and [`topology`]: constants and the algebraic network reduction.
//! * [`planewave`] and [`subsystem`]: single-node eigenproblems in a plane-wave basis.
//! * [`qubit`]: two-level description of the qubit node.
//! * [`rabi`]: the generalized quantum Rabi model and its charge-gauge variant.
//! * [`coupled`]: the full circuit Hamiltonian in either gauge.
//! * [`fitting`]: simplex fits of Rabi models to circuit spectra.
//! * [`perturbation`]: second-order level shifts of the uncoupled system.

pub mod coupled;
pub mod error;
pub mod fitting;
pub mod linalg;
pub mod nelder_mead;
pub mod parallel;
pub mod perturbation;
pub mod planewave;
pub mod qubit;
pub mod rabi;
pub mod subsystem;
pub mod topology;
pub mod units;

pub use error::{Error, Result};
pub use topology::{CircuitModel, RawCircuit};

/// Which frame the circuit Hamiltonian is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gauge {
    /// Coupling term `-Φ1 Φ2 / L12`.
    Flux,
    /// Coupling term `-(L_LC / C_J L12) q1 q2`.
    Charge,
}

impl Gauge {
    pub fn as_str(self) -> &'static str {
        match self {
            Gauge::Flux => "flux",
            Gauge::Charge => "charge",
        }
    }
}

impl std::fmt::Display for Gauge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}
