use nalgebra::{linalg::SymmetricEigen, DMatrix, DVector};

use super::{DenseSym, TridiagonalMatrix};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 10_000;

/// Eigendecomposition `S = V diag(values) Vᵀ` with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct SymEig {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

/// Anything `sym_eig` accepts.
pub trait SymmetricSource {
    fn to_symmetric_dense(&self) -> DMatrix<f64>;
}

impl SymmetricSource for DenseSym {
    fn to_symmetric_dense(&self) -> DMatrix<f64> {
        self.as_matrix().clone()
    }
}

impl SymmetricSource for TridiagonalMatrix {
    fn to_symmetric_dense(&self) -> DMatrix<f64> {
        self.to_dense()
    }
}

pub fn sym_eig<S: SymmetricSource + ?Sized>(s: &S) -> Result<SymEig> {
    let m = s.to_symmetric_dense();
    let n = m.nrows();
    if n == 0 {
        return Ok(SymEig {
            values: DVector::zeros(0),
            vectors: DMatrix::zeros(0, 0),
        });
    }
    let eig = SymmetricEigen::try_new(m, f64::EPSILON, MAX_SWEEPS).ok_or_else(|| {
        Error::Numerical(format!(
            "symmetric eigensolver did not converge in {MAX_SWEEPS} sweeps (order {n})"
        ))
    })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(SymEig { values, vectors })
}

/// Extreme eigenvalues only; cheap for the sizes used here.
pub fn extreme_eigenvalues<S: SymmetricSource + ?Sized>(s: &S) -> Result<(f64, f64)> {
    let e = sym_eig(s)?;
    let n = e.values.len();
    if n == 0 {
        return Err(Error::input("empty matrix has no eigenvalues"));
    }
    Ok((e.values[0], e.values[n - 1]))
}
