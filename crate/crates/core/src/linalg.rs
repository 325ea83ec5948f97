//! Dense real-symmetric eigensolver front end.
//!
//! Every Hamiltonian assembled in this crate is real symmetric: kinetic
//! kernels of `n²` are real, the potential is diagonal, and the charge
//! coupling `n1 n2` is a product of two imaginary antisymmetric factors.
//!
//! faer runs single-threaded; concurrency comes from sweeping independent
//! points.

pub use faer::Mat;
use faer::Side;

use crate::error::{Error, Result};

/// Eigenvalues in ascending order and the matching unit eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Mat<f64>,
}

impl SymEigen {
    pub fn vector(&self, index: usize) -> Vec<f64> {
        self.vectors.col(index).iter().copied().collect()
    }
}

pub fn sym_eigen(matrix: &Mat<f64>) -> Result<SymEigen> {
    let dim = matrix.nrows();
    let evd = matrix
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::EigenNoConvergence { dim })?;
    let raw_values: Vec<f64> = evd.S().column_vector().iter().copied().collect();
    let vectors = evd.U();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| raw_values[a].total_cmp(&raw_values[b]));
    let values = order.iter().map(|&i| raw_values[i]).collect();
    let vectors = Mat::from_fn(dim, dim, |r, c| vectors[(r, order[c])]);
    Ok(SymEigen { values, vectors })
}

pub fn sym_eigenvalues(matrix: &Mat<f64>) -> Result<Vec<f64>> {
    let dim = matrix.nrows();
    let mut values = matrix
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::EigenNoConvergence { dim })?;
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// `max |A_ij − A_ji| / max |A_ij|`.
pub fn relative_asymmetry(matrix: &Mat<f64>) -> f64 {
    let n = matrix.nrows();
    let mut scale = 0.0_f64;
    let mut diff = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            scale = scale.max(matrix[(i, j)].abs());
            diff = diff.max((matrix[(i, j)] - matrix[(j, i)]).abs());
        }
    }
    if scale == 0.0 {
        0.0
    } else {
        diff / scale
    }
}

/// `vᵀ M w` for a dense matrix.
pub fn bilinear(v: &[f64], matrix: &Mat<f64>, w: &[f64]) -> f64 {
    let n = matrix.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        if v[i] == 0.0 {
            continue;
        }
        let mut row = 0.0;
        for j in 0..n {
            row += matrix[(i, j)] * w[j];
        }
        acc += v[i] * row;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenpairs_of_small_matrix() {
        let m = Mat::from_fn(3, 3, |i, j| match (i, j) {
            (0, 0) => 2.0,
            (1, 1) => -1.0,
            (2, 2) => 5.0,
            (0, 1) | (1, 0) => 0.5,
            _ => 0.0,
        });
        let e = sym_eigen(&m).unwrap();
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        for k in 0..3 {
            let v = e.vector(k);
            for i in 0..3 {
                let mv: f64 = (0..3).map(|j| m[(i, j)] * v[j]).sum();
                assert!((mv - e.values[k] * v[i]).abs() < 1e-12);
            }
        }
        let vals = sym_eigenvalues(&m).unwrap();
        for (a, b) in vals.iter().zip(&e.values) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
