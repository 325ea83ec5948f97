//! Plane-wave basis on the dimensionless-charge axis.
//!
//! A wavefunction on `n ∈ [−n_max, n_max)` with periodic boundaries is expanded
//! as `ψ(n) = Σ_k ψ_k e^{ikn} / sqrt(2 n_max)` with `k = π η / n_max`. The
//! wave numbers `k` are values of the dimensionless flux `φ = 2πΦ/Φ0`, so any
//! function of `φ` is diagonal in this basis, while powers of `n` become
//! Toeplitz kernels `f_{k−k'}(nᵖ) = (1/2n_max) ∫ e^{−i(k−k')n} nᵖ dn`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneWaveBasis {
    /// Half-width of the charge domain.
    pub n_max: f64,
    /// Number of plane waves; even.
    pub n_waves: usize,
    /// Samples of the charge grid used for wavefunctions and the FFT kernels.
    pub grid_points: usize,
}

impl PlaneWaveBasis {
    pub fn new(n_max: f64, n_waves: usize) -> Result<Self> {
        Self::with_grid(n_max, n_waves, 8 * n_waves)
    }

    pub fn with_grid(n_max: f64, n_waves: usize, grid_points: usize) -> Result<Self> {
        let basis = Self {
            n_max,
            n_waves,
            grid_points,
        };
        basis.validate()?;
        Ok(basis)
    }

    /// 32 waves with `n_max = 8`: the wave numbers span `[−2π, 2π)` around the
    /// double well.
    pub fn qubit_default() -> Self {
        Self {
            n_max: 8.0,
            n_waves: 32,
            grid_points: 256,
        }
    }

    /// 64 waves with `n_max` set to ten zero-point charge widths of the
    /// oscillator `4 E_C n² + E_L φ²/2`, whose ground state has
    /// `σ_n = (E_L / 32 E_C)^{1/4}`.
    pub fn oscillator_default(ec_ghz: f64, el_ghz: f64) -> Self {
        let sigma_n = (el_ghz / (32.0 * ec_ghz)).powf(0.25);
        Self {
            n_max: (10.0 * sigma_n).max(1.0),
            n_waves: 64,
            grid_points: 512,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n_max > 0.0 && self.n_max.is_finite()) {
            return Err(Error::InvalidBasis(format!("n_max must be positive, got {}", self.n_max)));
        }
        if self.n_waves < 8 || self.n_waves % 2 != 0 {
            return Err(Error::InvalidBasis(format!(
                "n_waves must be even and at least 8, got {}",
                self.n_waves
            )));
        }
        if self.grid_points < 4 * self.n_waves {
            return Err(Error::InvalidBasis(format!(
                "grid_points must be at least 4 * n_waves = {}, got {}",
                4 * self.n_waves,
                self.grid_points
            )));
        }
        Ok(())
    }

    /// Wave-number spacing `π / n_max`.
    pub fn dk(&self) -> f64 {
        PI / self.n_max
    }

    /// Integer labels `η = −N/2, …, N/2 − 1`.
    pub fn eta(&self, index: usize) -> i64 {
        index as i64 - (self.n_waves / 2) as i64
    }

    /// Wave numbers `k_η = π η / n_max` in ascending order.
    pub fn wave_numbers(&self) -> Vec<f64> {
        (0..self.n_waves).map(|i| self.eta(i) as f64 * self.dk()).collect()
    }

    /// Charge grid `n_j = −n_max + j Δn`, `Δn = 2 n_max / grid_points`.
    pub fn charge_grid(&self) -> Vec<f64> {
        let dn = self.grid_spacing();
        (0..self.grid_points).map(|j| -self.n_max + j as f64 * dn).collect()
    }

    pub fn grid_spacing(&self) -> f64 {
        2.0 * self.n_max / self.grid_points as f64
    }

    /// The same charge domain with twice the waves (twice the flux range).
    pub fn doubled(&self) -> Self {
        Self {
            n_max: self.n_max,
            n_waves: 2 * self.n_waves,
            grid_points: 2 * self.grid_points,
        }
    }
}

fn sign(m: i64) -> f64 {
    if m.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `f_{Δk}(n²)` for `Δk = mπ/n_max`: `n_max²/3` at `m = 0`, otherwise
/// `2(−1)^m n_max²/(mπ)²`.
pub fn quadratic_kernel_element(n_max: f64, m: i64) -> f64 {
    if m == 0 {
        n_max * n_max / 3.0
    } else {
        let mp = m as f64 * PI;
        2.0 * sign(m) * n_max * n_max / (mp * mp)
    }
}

/// Imaginary part of `f_{Δk}(n)`: the element is `i(−1)^m n_max/(mπ)`, zero at
/// `m = 0`.
pub fn linear_kernel_element(n_max: f64, m: i64) -> f64 {
    if m == 0 {
        0.0
    } else {
        sign(m) * n_max / (m as f64 * PI)
    }
}

/// Matrix of `n²` over wave indices; real symmetric.
pub fn quadratic_kernel(basis: &PlaneWaveBasis) -> Mat<f64> {
    let n = basis.n_waves;
    Mat::from_fn(n, n, |a, b| quadratic_kernel_element(basis.n_max, a as i64 - b as i64))
}

/// Matrix `A` with `n̂ = i A` over wave indices. `A` is real antisymmetric, so
/// `n̂` is Hermitian with purely imaginary elements.
pub fn linear_kernel(basis: &PlaneWaveBasis) -> Mat<f64> {
    let n = basis.n_waves;
    Mat::from_fn(n, n, |a, b| linear_kernel_element(basis.n_max, a as i64 - b as i64))
}

/// `n̂` as a complex matrix, for callers that want the operator itself.
pub fn charge_operator(basis: &PlaneWaveBasis) -> Vec<Vec<Complex64>> {
    let a = linear_kernel(basis);
    (0..basis.n_waves)
        .map(|i| (0..basis.n_waves).map(|j| Complex64::new(0.0, a[(i, j)])).collect())
        .collect()
}

/// Kernel values `f_{mπ/n_max}(g)` for `m = −(N−1)…(N−1)` of a sampled
/// function `g(n)`, obtained from the discrete Fourier transform of its samples
/// on the charge grid. Index `m + N − 1` of the result holds `f_m`.
pub fn dft_kernel(basis: &PlaneWaveBasis, g: impl Fn(f64) -> f64) -> Vec<Complex64> {
    let len = basis.grid_points;
    let mut buf: Vec<Complex64> = basis
        .charge_grid()
        .into_iter()
        .map(|n| Complex64::new(g(n), 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    // Σ_j g(n_j) e^{−iπ m n_j / n_max} = e^{iπm} Σ_j g(n_j) e^{−2πi m j / len}
    let max_m = basis.n_waves as i64 - 1;
    (-max_m..=max_m)
        .map(|m| buf[m.rem_euclid(len as i64) as usize] * sign(m) / len as f64)
        .collect()
}

/// `n²` kernel matrix from [`dft_kernel`], real part.
pub fn quadratic_kernel_dft(basis: &PlaneWaveBasis) -> Mat<f64> {
    let f = dft_kernel(basis, |n| n * n);
    let offset = basis.n_waves as i64 - 1;
    let n = basis.n_waves;
    Mat::from_fn(n, n, |a, b| f[(a as i64 - b as i64 + offset) as usize].re)
}

/// Evaluate `ψ(n_j) = Σ_k ψ_k e^{i k n_j} / sqrt(2 n_max)` on the charge grid by
/// inverse FFT.
pub fn charge_representation(basis: &PlaneWaveBasis, coefficients: &[f64]) -> Vec<Complex64> {
    let len = basis.grid_points;
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for (i, &c) in coefficients.iter().enumerate() {
        let eta = basis.eta(i);
        buf[eta.rem_euclid(len as i64) as usize] += Complex64::new(c * sign(eta), 0.0);
    }
    FftPlanner::new().plan_fft_inverse(len).process(&mut buf);
    let norm = 1.0 / (2.0 * basis.n_max).sqrt();
    buf.into_iter().map(|z| z * norm).collect()
}
