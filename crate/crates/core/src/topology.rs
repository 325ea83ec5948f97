//! Reduction of the three-inductor network to the node Hamiltonian's
//! inductances, and the energy scales that follow from them.
//!
//! The circuit is fixed: an LC oscillator (capacitor `C`, inductor `L1`) and a
//! single-junction loop (junction `EJ`, `CJ`, inductor `L2`) that share the
//! inductor `Lc` to ground. Eliminating the internal node with the Y-Δ
//! transformation leaves two nodes whose Hamiltonian contains
//! `Φ1²/2L_LC + Φ2²/2L_FQ − Φ1Φ2/L12`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{
    charging_energy_ghz, inductance_from_energy_ph, inductive_energy_ghz, HBAR, NA, PF, PH, UV,
    FF,
};

/// The seven physical circuit parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawCircuit {
    /// Shared inductance, pH. Zero decouples the two loops.
    pub lc_ph: f64,
    /// Oscillator-side inductance, pH.
    pub l1_ph: f64,
    /// Qubit-side inductance, pH.
    pub l2_ph: f64,
    /// Oscillator capacitance, pF.
    pub c_pf: f64,
    /// Junction capacitance, fF.
    pub cj_ff: f64,
    /// Josephson energy `EJ/h`, GHz.
    pub ej_ghz: f64,
    /// External flux through the qubit loop, units of Φ0.
    pub phix: f64,
}

impl RawCircuit {
    pub fn new(
        lc_ph: f64,
        l1_ph: f64,
        l2_ph: f64,
        c_pf: f64,
        cj_ff: f64,
        ej_ghz: f64,
        phix: f64,
    ) -> Result<Self> {
        let raw = Self {
            lc_ph,
            l1_ph,
            l2_ph,
            c_pf,
            cj_ff,
            ej_ghz,
            phix,
        };
        raw.validate()?;
        Ok(raw)
    }

    /// Build from a Josephson inductance `LJ = (Φ0/2π)²/EJ` instead of `EJ`.
    pub fn with_junction_inductance(
        lc_ph: f64,
        l1_ph: f64,
        l2_ph: f64,
        c_pf: f64,
        cj_ff: f64,
        lj_ph: f64,
        phix: f64,
    ) -> Result<Self> {
        if !(lj_ph > 0.0 && lj_ph.is_finite()) {
            return Err(Error::InvalidCircuit {
                name: "LJ",
                value: lj_ph,
                reason: "must be positive and finite",
            });
        }
        Self::new(lc_ph, l1_ph, l2_ph, c_pf, cj_ff, inductive_energy_ghz(lj_ph), phix)
    }

    /// Circuit with the inductance sums `Lc + L1` and `Lc + L2` held fixed.
    pub fn with_fixed_sums(
        lc_ph: f64,
        sum1_ph: f64,
        sum2_ph: f64,
        c_pf: f64,
        cj_ff: f64,
        ej_ghz: f64,
        phix: f64,
    ) -> Result<Self> {
        Self::new(lc_ph, sum1_ph - lc_ph, sum2_ph - lc_ph, c_pf, cj_ff, ej_ghz, phix)
    }

    /// Parameters used for every sweep in the reference study: `Lc + L1 = 800 pH`,
    /// `Lc + L2 = 2050 pH`, `C = 0.87 pF`, `LJ = 990 pH`, `CJ = 4.84 fF`.
    pub fn reference(lc_ph: f64, phix: f64) -> Result<Self> {
        Self::with_fixed_sums(
            lc_ph,
            800.0,
            2050.0,
            0.87,
            4.84,
            inductive_energy_ghz(990.0),
            phix,
        )
    }

    pub fn with_phix(self, phix: f64) -> Self {
        Self { phix, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("L1", self.l1_ph),
            ("L2", self.l2_ph),
            ("C", self.c_pf),
            ("CJ", self.cj_ff),
            ("EJ", self.ej_ghz),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidCircuit {
                    name,
                    value,
                    reason: "must be positive and finite",
                });
            }
        }
        if !(self.lc_ph >= 0.0 && self.lc_ph.is_finite()) {
            return Err(Error::InvalidCircuit {
                name: "Lc",
                value: self.lc_ph,
                reason: "must be non-negative and finite",
            });
        }
        if !self.phix.is_finite() {
            return Err(Error::InvalidCircuit {
                name: "Phix",
                value: self.phix,
                reason: "must be finite",
            });
        }
        Ok(())
    }

    /// Josephson inductance `LJ = (Φ0/2π)²/EJ`, pH.
    pub fn lj_ph(&self) -> f64 {
        inductance_from_energy_ph(self.ej_ghz)
    }

    pub fn c_farad(&self) -> f64 {
        self.c_pf * PF
    }

    pub fn cj_farad(&self) -> f64 {
        self.cj_ff * FF
    }
}

/// Inductance of the star branch between the two nodes. An open branch
/// (`Lc = 0`) is kept as its own variant so that coupling terms vanish exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value_ph", rename_all = "lowercase")]
pub enum Branch {
    Finite(f64),
    Open,
}

impl Branch {
    /// `1/L` in 1/pH; zero for an open branch.
    pub fn inverse(&self) -> f64 {
        match *self {
            Branch::Finite(l) => 1.0 / l,
            Branch::Open => 0.0,
        }
    }

    pub fn value(&self) -> Option<f64> {
        match *self {
            Branch::Finite(l) => Some(l),
            Branch::Open => None,
        }
    }

    pub fn is_open(&self) -> bool {
        matches!(self, Branch::Open)
    }
}

/// Inductances after the Y-Δ transformation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StarInductances {
    /// Node 1 to ground, pH.
    pub lg1: f64,
    /// Node 2 to ground, pH.
    pub lg2: f64,
    /// Node 1 to node 2.
    pub l12: Branch,
}

/// `Lg1 = N/L2`, `Lg2 = N/L1`, `L12 = N/Lc` with `N = LcL1 + LcL2 + L1L2`.
pub fn y_delta(raw: &RawCircuit) -> StarInductances {
    let RawCircuit {
        lc_ph: lc,
        l1_ph: l1,
        l2_ph: l2,
        ..
    } = *raw;
    let numerator = lc * l1 + lc * l2 + l1 * l2;
    StarInductances {
        lg1: numerator / l2,
        lg2: numerator / l1,
        l12: if lc > 0.0 {
            Branch::Finite(numerator / lc)
        } else {
            Branch::Open
        },
    }
}

/// Inductances the same circuit would get if the oscillator and qubit loops
/// were treated as separate components sharing a mutual inductance `Lc`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparateTreatment {
    /// `Lc + L1`, pH.
    pub l_oscillator: f64,
    /// `Lc + L2`, pH.
    pub l_qubit: f64,
    /// `(Lc + L1)(Lc + L2)/Lc`.
    pub l_coupling: Branch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveInductances {
    /// `1/L_LC = 1/Lg1 + 1/L12`, pH.
    pub l_lc: f64,
    /// `1/L_FQ = 1/Lg2 + 1/L12`, pH.
    pub l_fq: f64,
    /// Qubit inductance in the charge gauge, `Lc + L2`, pH.
    pub l_fq_charge: f64,
    /// Copied from the star network.
    pub l12: Branch,
    pub separate: SeparateTreatment,
}

impl EffectiveInductances {
    /// `L_LC / L12`, the shift parameter of the gauge transformation. Equal to
    /// `Lc/(Lc + L2)`.
    pub fn coupling_ratio(&self) -> f64 {
        self.l_lc * self.l12.inverse()
    }

    /// `1/L_FQ − L_LC/L12²` in 1/pH: the qubit's inverse inductance after the
    /// gauge transformation, evaluated from the flux-gauge quantities.
    pub fn charge_gauge_inverse_inductance(&self) -> f64 {
        let inv12 = self.l12.inverse();
        1.0 / self.l_fq - self.l_lc * inv12 * inv12
    }
}

pub fn effective_inductances(star: &StarInductances, raw: &RawCircuit) -> EffectiveInductances {
    let inv12 = star.l12.inverse();
    let l_lc = 1.0 / (1.0 / star.lg1 + inv12);
    let l_fq = 1.0 / (1.0 / star.lg2 + inv12);
    let s1 = raw.lc_ph + raw.l1_ph;
    let s2 = raw.lc_ph + raw.l2_ph;
    EffectiveInductances {
        l_lc,
        l_fq,
        l_fq_charge: s2,
        l12: star.l12,
        separate: SeparateTreatment {
            l_oscillator: s1,
            l_qubit: s2,
            l_coupling: if raw.lc_ph > 0.0 {
                Branch::Finite(s1 * s2 / raw.lc_ph)
            } else {
                Branch::Open
            },
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyScales {
    /// `e²/2C`, GHz.
    pub ec_ghz: f64,
    /// `e²/2CJ`, GHz.
    pub ecj_ghz: f64,
    /// `(Φ0/2π)²/L_LC`, GHz.
    pub el_ghz: f64,
    /// `(Φ0/2π)²/L_FQ`, GHz.
    pub elfq_ghz: f64,
    /// `(Φ0/2π)²/(Lc + L2)`, GHz.
    pub elfq_charge_ghz: f64,
    pub ej_ghz: f64,
    /// Oscillator frequency `1/(2π sqrt(L_LC C))`, GHz.
    pub omega_ghz: f64,
    /// `sqrt(ħω / 2L_LC)`, nA.
    pub izpf_na: f64,
    /// `sqrt(ħω / 2C)`, µV.
    pub vzpf_uv: f64,
}

pub fn energy_scales(raw: &RawCircuit, eff: &EffectiveInductances) -> EnergyScales {
    let l_lc = eff.l_lc * PH;
    let c = raw.c_farad();
    let omega = 1.0 / (l_lc * c).sqrt();
    EnergyScales {
        ec_ghz: charging_energy_ghz(c),
        ecj_ghz: charging_energy_ghz(raw.cj_farad()),
        el_ghz: inductive_energy_ghz(eff.l_lc),
        elfq_ghz: inductive_energy_ghz(eff.l_fq),
        elfq_charge_ghz: inductive_energy_ghz(eff.l_fq_charge),
        ej_ghz: raw.ej_ghz,
        omega_ghz: omega / (2.0 * std::f64::consts::PI) / 1e9,
        izpf_na: (HBAR * omega / (2.0 * l_lc)).sqrt() / NA,
        vzpf_uv: (HBAR * omega / (2.0 * c)).sqrt() / UV,
    }
}

/// Oscillator of the charge-gauge Hamiltonian, whose capacitance is
/// renormalized to `1/C' = 1/C + L_LC²/(CJ L12²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChargeGaugeOscillator {
    /// `C'`, farad.
    pub c_prime_farad: f64,
    /// `e²/2C'`, GHz.
    pub ec_prime_ghz: f64,
    /// `ω'/2π = 1/(2π sqrt(L_LC C'))`, GHz.
    pub omega_prime_ghz: f64,
    /// `sqrt(ħω'C'/2)`, C.
    pub q1_zpf: f64,
}

pub fn charge_gauge_oscillator(raw: &RawCircuit, eff: &EffectiveInductances) -> ChargeGaugeOscillator {
    let ratio = eff.coupling_ratio();
    let inv_c = 1.0 / raw.c_farad() + ratio * ratio / raw.cj_farad();
    let c_prime = 1.0 / inv_c;
    let omega = 1.0 / (eff.l_lc * PH * c_prime).sqrt();
    ChargeGaugeOscillator {
        c_prime_farad: c_prime,
        ec_prime_ghz: charging_energy_ghz(c_prime),
        omega_prime_ghz: omega / (2.0 * std::f64::consts::PI) / 1e9,
        q1_zpf: (HBAR * omega * c_prime / 2.0).sqrt(),
    }
}

/// Everything derivable algebraically from a [`RawCircuit`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircuitModel {
    pub raw: RawCircuit,
    pub star: StarInductances,
    pub eff: EffectiveInductances,
    pub scales: EnergyScales,
    pub charge_oscillator: ChargeGaugeOscillator,
}

impl CircuitModel {
    pub fn new(raw: RawCircuit) -> Result<Self> {
        raw.validate()?;
        let star = y_delta(&raw);
        let eff = effective_inductances(&star, &raw);
        let scales = energy_scales(&raw, &eff);
        let charge_oscillator = charge_gauge_oscillator(&raw, &eff);
        Ok(Self {
            raw,
            star,
            eff,
            scales,
            charge_oscillator,
        })
    }

    pub fn with_phix(&self, phix: f64) -> Self {
        Self {
            raw: self.raw.with_phix(phix),
            ..*self
        }
    }

    /// Solve `[[Lc+L1, Lc],[Lc, Lc+L2]] (I1, I2) = (Φ1, Φ2)`. Fluxes in Wb,
    /// currents in nA.
    pub fn branch_currents_na(&self, flux1_wb: f64, flux2_wb: f64) -> (f64, f64) {
        let lc = self.raw.lc_ph * PH;
        let a = (self.raw.lc_ph + self.raw.l1_ph) * PH;
        let d = (self.raw.lc_ph + self.raw.l2_ph) * PH;
        let det = a * d - lc * lc;
        let i1 = (d * flux1_wb - lc * flux2_wb) / det;
        let i2 = (a * flux2_wb - lc * flux1_wb) / det;
        (i1 / NA, i2 / NA)
    }
}
