//! Small dense and tridiagonal linear algebra.
//!
//! Everything here works on matrices whose order is at most a few hundred:
//! projected tridiagonal matrices, the compressed `(m+2k)`-dimensional cycle
//! matrices and the `k × k` projected Lyapunov equations.

mod eig;
mod lyap;
mod orth;
mod tridiag;

pub use eig::{extreme_eigenvalues, sym_eig, SymEig, SymmetricSource};
pub use lyap::solve_projected_lyapunov;
pub use orth::{orthonormalize, Orthonormalized};
pub use tridiag::{TridiagonalLu, TridiagonalMatrix};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Dense symmetric matrix, symmetrized on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSym(DMatrix<f64>);

impl DenseSym {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension {
                expected: m.nrows(),
                actual: m.ncols(),
            });
        }
        let sym = (&m + m.transpose()) * 0.5;
        Ok(Self(sym))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    pub fn order(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    /// `Vᵀ S V`, symmetrized.
    pub fn congruence(&self, v: &DMatrix<f64>) -> DenseSym {
        let m = v.transpose() * &self.0 * v;
        DenseSym((&m + m.transpose()) * 0.5)
    }
}

impl From<&TridiagonalMatrix> for DenseSym {
    fn from(t: &TridiagonalMatrix) -> Self {
        DenseSym(t.to_dense())
    }
}

/// Sine of the largest principal angle between the column spans of two
/// matrices with orthonormal columns: `‖(I − A Aᵀ) B‖₂`.
pub fn max_principal_angle_sine(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let resid = b - a * (a.transpose() * b);
    if resid.ncols() == 0 || resid.nrows() == 0 {
        return 0.0;
    }
    resid.singular_values().max()
}

/// Relative least-squares residual of projecting the columns of `x` onto the
/// span of `basis` (orthonormal columns): `‖x − P x‖_F / ‖x‖_F`.
pub fn projection_residual(basis: &DMatrix<f64>, x: &DMatrix<f64>) -> f64 {
    let norm = x.norm();
    if norm == 0.0 {
        return 0.0;
    }
    (x - basis * (basis.transpose() * x)).norm() / norm
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetrizes_on_construction() {
        let s = DenseSym::new(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 4.0, 1.0])).unwrap();
        assert_eq!(s.as_matrix()[(0, 1)], 3.0);
        assert_eq!(s.as_matrix()[(1, 0)], 3.0);
        assert!(DenseSym::new(DMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn principal_angle_of_identical_and_orthogonal_spans() {
        let e1 = DMatrix::from_column_slice(3, 1, &[1.0, 0.0, 0.0]);
        let e2 = DMatrix::from_column_slice(3, 1, &[0.0, 1.0, 0.0]);
        assert_eq!(max_principal_angle_sine(&e1, &e1), 0.0);
        assert!((max_principal_angle_sine(&e1, &e2) - 1.0).abs() < 1e-15);
    }
}
