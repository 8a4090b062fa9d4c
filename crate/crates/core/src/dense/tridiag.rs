use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix: diagonal `alpha`, off-diagonal `beta`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalMatrix {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl TridiagonalMatrix {
    /// `offdiag` must be exactly one shorter than `diag` (or both empty).
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        let expected = diag.len().saturating_sub(1);
        if offdiag.len() != expected {
            return Err(Error::Dimension {
                expected,
                actual: offdiag.len(),
            });
        }
        Ok(Self { diag, offdiag })
    }

    pub fn order(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// Leading principal submatrix of order `n`.
    pub fn leading(&self, n: usize) -> TridiagonalMatrix {
        let n = n.min(self.order());
        TridiagonalMatrix {
            diag: self.diag[..n].to_vec(),
            offdiag: self.offdiag[..n.saturating_sub(1)].to_vec(),
        }
    }

    /// Principal submatrix on rows/columns `start..start+n`.
    pub fn block(&self, start: usize, n: usize) -> TridiagonalMatrix {
        TridiagonalMatrix {
            diag: self.diag[start..start + n].to_vec(),
            offdiag: self.offdiag[start..start + n.saturating_sub(1)].to_vec(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.order();
        let mut t = DMatrix::zeros(n, n);
        for (i, &a) in self.diag.iter().enumerate() {
            t[(i, i)] = a;
        }
        for (i, &b) in self.offdiag.iter().enumerate() {
            t[(i, i + 1)] = b;
            t[(i + 1, i)] = b;
        }
        t
    }

    /// Gershgorin bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        let n = self.order();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.offdiag[i - 1].abs() } else { 0.0 };
                let right = if i + 1 < n { self.offdiag[i].abs() } else { 0.0 };
                self.diag[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }

    pub fn matvec(&self, x: &DVector<f64>) -> DVector<f64> {
        let n = self.order();
        let mut y = DVector::zeros(n);
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.offdiag[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.offdiag[i] * x[i + 1];
            }
            y[i] = acc;
        }
        y
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence count).
    pub fn count_below(&self, x: f64) -> usize {
        let tiny = f64::MIN_POSITIVE.sqrt() * self.norm_bound().max(1.0);
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..self.order() {
            let coupling = if i > 0 {
                self.offdiag[i - 1] * self.offdiag[i - 1] / d
            } else {
                0.0
            };
            d = self.diag[i] - x - coupling;
            if d == 0.0 {
                d = -tiny;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// LU factorization of `T - shift·I` with partial pivoting.
    pub fn shifted_lu(&self, shift: f64) -> Result<TridiagonalLu> {
        TridiagonalLu::factor(self, shift)
    }
}

/// Pivoted LU of a (shifted) tridiagonal matrix, in the layout of LAPACK `gttrf`.
#[derive(Debug, Clone)]
pub struct TridiagonalLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    ipiv: Vec<usize>,
}

impl TridiagonalLu {
    fn factor(t: &TridiagonalMatrix, shift: f64) -> Result<Self> {
        let n = t.order();
        let mut d: Vec<f64> = t.diag.iter().map(|a| a - shift).collect();
        let mut dl = t.offdiag.clone();
        let mut du = t.offdiag.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut ipiv: Vec<usize> = (0..n).collect();

        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] != 0.0 {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                ipiv[i] = i + 1;
            }
        }
        if let Some(i) = d.iter().position(|&v| v == 0.0) {
            return Err(Error::Numerical(format!(
                "shifted tridiagonal matrix is singular at pivot {i}"
            )));
        }
        Ok(Self {
            dl,
            d,
            du,
            du2,
            ipiv,
        })
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            let ip = self.ipiv[i];
            let temp = b[2 * i + 1 - ip] - self.dl[i] * b[ip];
            b[i] = b[ip];
            b[i + 1] = temp;
        }
        if n == 0 {
            return;
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}
