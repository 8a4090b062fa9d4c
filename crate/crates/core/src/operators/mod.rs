//! Matrix-free symmetric operators, sparse storage, problem generators and
//! file ingestion.
//!
//! Solvers only ever see a [`SymmetricOperator`]: a shared, immutable
//! [`MatVec`] implementation plus a scalar factor and an atomic matvec tally.
//! Scaling is lazy so the same stored matrix serves scaled and unscaled runs.

mod csr;
mod generalized;
mod generators;
mod mtx;

pub use csr::SparseCsr;
pub use generalized::{EnvelopeCholesky, GeneralizedOperator, Ordering};
pub use generators::{gaussian_rhs, kron_sum_laplacian, laplacian_extreme_eigenvalues};
pub use mtx::{load_matrix_market, load_vector, parse_matrix_market};

use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// The action `x ↦ A x` of a symmetric matrix of order [`MatVec::dim`].
pub trait MatVec: Send + Sync {
    fn dim(&self) -> usize;

    /// Writes `A x` into `y`. Both slices have length `dim()`.
    fn apply_into(&self, x: &[f64], y: &mut [f64]);
}

/// Dense symmetric matrix as an operator; used for small test problems.
#[derive(Debug, Clone)]
pub struct DenseOperator(pub DMatrix<f64>);

impl MatVec for DenseOperator {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        let n = self.0.nrows();
        y.iter_mut().for_each(|v| *v = 0.0);
        for (j, &xj) in x.iter().enumerate().take(n) {
            if xj != 0.0 {
                for (yi, a) in y.iter_mut().zip(self.0.column(j).iter()) {
                    *yi += a * xj;
                }
            }
        }
    }
}

/// Closed interval `[lo, hi]` containing (or estimating) the spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralInterval {
    pub lo: f64,
    pub hi: f64,
}

impl SpectralInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0) || !(hi >= lo) || !hi.is_finite() {
            return Err(Error::input(format!(
                "spectral interval needs 0 < lo <= hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn condition(&self) -> f64 {
        self.hi / self.lo
    }
}

/// Symmetric positive definite operator with a matvec tally.
pub struct SymmetricOperator {
    inner: Arc<dyn MatVec>,
    scale: f64,
    spectral_hint: Option<SpectralInterval>,
    matvecs: AtomicU64,
}

impl std::fmt::Debug for SymmetricOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SymmetricOperator")
            .field("dimension", &self.dimension())
            .field("scale", &self.scale)
            .field("spectral_hint", &self.spectral_hint)
            .field("matvecs", &self.matvec_count())
            .finish()
    }
}

impl SymmetricOperator {
    pub fn new(inner: impl MatVec + 'static) -> Self {
        Self::from_arc(Arc::new(inner))
    }

    pub fn from_arc(inner: Arc<dyn MatVec>) -> Self {
        Self {
            inner,
            scale: 1.0,
            spectral_hint: None,
            matvecs: AtomicU64::new(0),
        }
    }

    pub fn dense(m: DMatrix<f64>) -> Self {
        Self::new(DenseOperator(m))
    }

    /// Attaches known extreme eigenvalues of the (unscaled) operator.
    pub fn with_spectral_hint(mut self, hint: SpectralInterval) -> Self {
        self.spectral_hint = Some(SpectralInterval {
            lo: hint.lo * self.scale,
            hi: hint.hi * self.scale,
        });
        self
    }

    pub fn spectral_hint(&self) -> Option<SpectralInterval> {
        self.spectral_hint
    }

    pub fn dimension(&self) -> usize {
        self.inner.dim()
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn inner(&self) -> &Arc<dyn MatVec> {
        &self.inner
    }

    /// A new operator `factor · A` sharing the stored matrix, with its own tally.
    pub fn scaled(&self, factor: f64) -> SymmetricOperator {
        SymmetricOperator {
            inner: Arc::clone(&self.inner),
            scale: self.scale * factor,
            spectral_hint: self.spectral_hint.map(|h| SpectralInterval {
                lo: h.lo * factor,
                hi: h.hi * factor,
            }),
            matvecs: AtomicU64::new(0),
        }
    }

    pub fn matvec_count(&self) -> u64 {
        self.matvecs.load(AtomicOrdering::Relaxed)
    }

    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.dimension()];
        self.apply_into(v, &mut y)?;
        Ok(y)
    }

    pub fn apply_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        let n = self.dimension();
        for len in [x.len(), y.len()] {
            if len != n {
                return Err(Error::Dimension {
                    expected: n,
                    actual: len,
                });
            }
        }
        self.inner.apply_into(x, y);
        if self.scale != 1.0 {
            y.iter_mut().for_each(|v| *v *= self.scale);
        }
        self.matvecs.fetch_add(1, AtomicOrdering::Relaxed);
        Ok(())
    }

    /// Dense matrix of the operator; `N` applies, not counted. Test helper.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dimension();
        let mut m = DMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            self.inner.apply_into(&e, &mut col);
            e[j] = 0.0;
            for i in 0..n {
                m[(i, j)] = col[i] * self.scale;
            }
        }
        m
    }
}

/// Rescales `A ← A/‖c‖₂²` and `c ← c/‖c‖₂`.
pub fn normalize_problem(a: &SymmetricOperator, c: &[f64]) -> Result<(SymmetricOperator, Vec<f64>)> {
    if c.len() != a.dimension() {
        return Err(Error::Dimension {
            expected: a.dimension(),
            actual: c.len(),
        });
    }
    let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::input("right-hand side has zero norm"));
    }
    let op = a.scaled(1.0 / (norm * norm));
    let rhs = c.iter().map(|v| v / norm).collect();
    Ok((op, rhs))
}
