//! Physical constants and conversions into the crate's unit system.

use std::f64::consts::PI;

/// Planck constant, J s (exact SI value).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Elementary charge, C (exact SI value).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Reduced Planck constant, J s.
pub const HBAR: f64 = PLANCK / (2.0 * PI);
/// Superconducting flux quantum `h / 2e`, Wb.
pub const FLUX_QUANTUM: f64 = PLANCK / (2.0 * ELEMENTARY_CHARGE);
/// Reduced flux quantum `Φ0 / 2π`, Wb.
pub const REDUCED_FLUX_QUANTUM: f64 = FLUX_QUANTUM / (2.0 * PI);

pub const PH: f64 = 1e-12;
pub const PF: f64 = 1e-12;
pub const FF: f64 = 1e-15;
pub const GHZ: f64 = 1e9;
pub const NA: f64 = 1e-9;
pub const UV: f64 = 1e-6;

/// The constants bundled as a value, for callers that want to pass them around.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PhysicalConstants {
    pub h: f64,
    pub hbar: f64,
    pub e: f64,
    pub phi0: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            h: PLANCK,
            hbar: HBAR,
            e: ELEMENTARY_CHARGE,
            phi0: FLUX_QUANTUM,
        }
    }
}

/// Energy in joules to frequency `E/h` in GHz.
pub fn joule_to_ghz(energy: f64) -> f64 {
    energy / PLANCK / GHZ
}

/// Inductive energy `(Φ0/2π)² / L` as a frequency in GHz, for `L` in pH.
pub fn inductive_energy_ghz(inductance_ph: f64) -> f64 {
    joule_to_ghz(REDUCED_FLUX_QUANTUM * REDUCED_FLUX_QUANTUM / (inductance_ph * PH))
}

/// Inverse of [`inductive_energy_ghz`]: the inductance in pH with the given energy.
pub fn inductance_from_energy_ph(energy_ghz: f64) -> f64 {
    REDUCED_FLUX_QUANTUM * REDUCED_FLUX_QUANTUM / (energy_ghz * GHZ * PLANCK) / PH
}

/// Charging energy `e² / 2C` as a frequency in GHz, for `C` in farads.
pub fn charging_energy_ghz(capacitance_farad: f64) -> f64 {
    joule_to_ghz(ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / (2.0 * capacitance_farad))
}

/// Qubit energy bias `ε/h` in GHz for persistent current `Ip` (nA) at flux
/// bias `phix` (units of Φ0): `ε = 2 Ip (Φx − Φ0/2)`.
pub fn energy_bias_ghz(ip_na: f64, phix: f64) -> f64 {
    2.0 * ip_na * NA * (phix - 0.5) * FLUX_QUANTUM / PLANCK / GHZ
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flux_quantum_is_h_over_2e() {
        assert_eq!(FLUX_QUANTUM, PLANCK / (2.0 * ELEMENTARY_CHARGE));
        assert!((FLUX_QUANTUM - 2.067_833_848e-15).abs() < 1e-23);
        let c = PhysicalConstants::default();
        assert!((c.hbar * 2.0 * PI - c.h).abs() <= 1e-15 * c.h);
    }

    #[test]
    fn josephson_energy_of_990_ph() {
        let ej = inductive_energy_ghz(990.0);
        assert!((ej / 165.1 - 1.0).abs() < 1e-3, "{ej}");
        assert!((inductance_from_energy_ph(ej) - 990.0).abs() < 1e-9);
    }

    #[test]
    fn charging_energy_of_junction() {
        let ec = charging_energy_ghz(4.84 * FF);
        assert!((ec / 4.0 - 1.0).abs() < 5e-3, "{ec}");
    }

    #[test]
    fn energy_bias_is_odd_about_half_flux() {
        assert_eq!(energy_bias_ghz(280.0, 0.5), 0.0);
        let a = energy_bias_ghz(280.0, 0.503);
        let b = energy_bias_ghz(280.0, 0.497);
        assert!((a + b).abs() < 1e-12);
        // Ip Φ0 / h = Ip / 2e
        let expect = 2.0 * 280e-9 * 0.003 / (2.0 * ELEMENTARY_CHARGE) / 1e9;
        assert!((a - expect).abs() < 1e-12);
    }
}
