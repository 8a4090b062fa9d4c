//! Low-rank solvers for `A X + X A = c cᵀ`: the reference projection method,
//! Lanczos with compression, and the two-pass baseline, together with
//! residual estimation and verification.

mod compress;
mod fp;
mod projection;
mod reference;
mod residual;
mod two_pass;

pub use compress::{compress_solve, compress_solve_observed, CycleSnapshot};
pub use fp::{fp_bound_constants, FpBoundConstants, FpBoundInputs};
pub use projection::CycleProjection;
pub use reference::{reference_solve, reference_solve_adaptive, ReferenceDiagnostics};
pub use residual::{residual_bound, residual_estimate, true_residual_fro};
pub use two_pass::two_pass_solve;

use nalgebra::{DMatrix, DVector};

use crate::dense::{orthonormalize, sym_eig, DenseSym, TridiagonalMatrix};
use crate::error::{Error, Result};
use crate::lanczos::{MemoryMeter, ReorthPolicy, TrackedVec};
use crate::operators::{SpectralInterval, SymmetricOperator};
use crate::zolotarev::{choose_pole_count, zolotarev_poles, PoleSet};

/// Where the spectral interval for pole selection comes from.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum SpectrumPolicy {
    /// Known extreme eigenvalues of the operator as passed to the solver.
    Exact(SpectralInterval),
    /// `[0.1·λmin(T₁), 1.1·λmax(T₁)]` from the first cycle.
    #[default]
    FirstCycleRitz,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Relative tolerance; a cycle stops when the estimate is below `tol·‖c‖²/2`.
    pub tol: f64,
    /// Maximum number of stored length-`N` vectors.
    pub maxmem: usize,
    /// Cap on Lanczos steps (one matvec each) for a single pass.
    pub max_matvecs: usize,
    /// Fixed poles; chosen from the spectral interval when absent.
    pub poles: Option<PoleSet>,
    pub spectrum: SpectrumPolicy,
    pub reorth: ReorthPolicy,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            maxmem: 120,
            max_matvecs: 100_000,
            poles: None,
            spectrum: SpectrumPolicy::FirstCycleRitz,
            reorth: ReorthPolicy::FirstCycle,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::input(format!("tol must lie in (0, 1), got {}", self.tol)));
        }
        if self.maxmem < 5 {
            return Err(Error::input(format!(
                "maxmem must be at least 5 (2k + 3 with k = 1), got {}",
                self.maxmem
            )));
        }
        if self.max_matvecs == 0 {
            return Err(Error::input("max_matvecs must be positive"));
        }
        if let Some(p) = &self.poles {
            self.check_pole_count(p.len())?;
        }
        Ok(())
    }

    /// Steps of the first cycle, taken before the pole count is known.
    pub fn first_cycle_len(&self) -> usize {
        self.maxmem - 1
    }

    fn check_pole_count(&self, k: usize) -> Result<usize> {
        if self.maxmem < 2 * k + 3 {
            return Err(Error::input(format!(
                "maxmem = {} is too small for k = {k} poles (need at least 2k + 3 = {})",
                self.maxmem,
                2 * k + 3
            )));
        }
        Ok(self.maxmem - 2 * k - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Tolerance,
    Breakdown,
    MatvecCap,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    /// Operator applications during the solve (both passes for two-pass).
    pub matvecs: u64,
    /// Applications in the first pass of two-pass; equal to `matvecs` otherwise.
    pub pass_one_matvecs: u64,
    pub cycles: usize,
    /// Total Lanczos steps `M`.
    pub total_steps: usize,
    pub k: usize,
    pub m: usize,
    /// Residual estimate at the end of every cycle.
    pub estimates: Vec<f64>,
    pub peak_vectors: usize,
    pub termination: Termination,
    pub interval: SpectralInterval,
    pub poles: PoleSet,
}

/// `X ≈ Z Y Zᵀ` with orthonormal `Z` (`N × r`) and symmetric `Y`.
#[derive(Debug, Clone)]
pub struct LowRankSolution {
    z: DMatrix<f64>,
    y: DenseSym,
    c_norm2: f64,
}

impl LowRankSolution {
    pub fn new(z: DMatrix<f64>, y: DenseSym, c_norm2: f64) -> Result<Self> {
        if z.ncols() != y.order() {
            return Err(Error::Dimension {
                expected: z.ncols(),
                actual: y.order(),
            });
        }
        Ok(Self { z, y, c_norm2 })
    }

    pub fn z(&self) -> &DMatrix<f64> {
        &self.z
    }

    pub fn y(&self) -> &DenseSym {
        &self.y
    }

    pub fn rank(&self) -> usize {
        self.z.ncols()
    }

    /// `‖c‖₂²` of the equation this solves.
    pub fn c_norm2(&self) -> f64 {
        self.c_norm2
    }

    pub fn dimension(&self) -> usize {
        self.z.nrows()
    }

    /// Dense `N × N` matrix `Z Y Zᵀ`.
    pub fn to_dense(&self) -> DMatrix<f64> {
        &self.z * self.y.as_matrix() * self.z.transpose()
    }

    pub fn fro_norm(&self) -> f64 {
        self.y.as_matrix().norm()
    }

    /// `‖Z₁Y₁Z₁ᵀ − Z₂Y₂Z₂ᵀ‖_F` without forming `N × N` matrices.
    pub fn distance(&self, other: &LowRankSolution) -> Result<f64> {
        if self.dimension() != other.dimension() {
            return Err(Error::Dimension {
                expected: self.dimension(),
                actual: other.dimension(),
            });
        }
        let (r1, r2) = (self.rank(), other.rank());
        let mut g = DMatrix::zeros(self.dimension(), r1 + r2);
        g.columns_mut(0, r1).copy_from(&self.z);
        g.columns_mut(r1, r2).copy_from(&other.z);
        let mut middle = DMatrix::zeros(r1 + r2, r1 + r2);
        middle.view_mut((0, 0), (r1, r1)).copy_from(self.y.as_matrix());
        middle.view_mut((r1, r1), (r2, r2)).copy_from(&(-other.y.as_matrix()));
        Ok(small_coordinates_norm(&g, &middle))
    }
}

/// `‖G C Gᵀ‖_F` computed as `‖R C Rᵀ‖_F` from `G = Q R`.
fn small_coordinates_norm(g: &DMatrix<f64>, c: &DMatrix<f64>) -> f64 {
    let orth = orthonormalize(g, None);
    let r = DMatrix::from_fn(orth.q.ncols(), g.ncols(), |i, j| orth.coeffs[(i, j)]);
    (&r * c * r.transpose()).norm()
}

/// Poles, interval and cycle length fixed after the first cycle.
#[derive(Debug, Clone)]
pub(crate) struct PoleSetup {
    pub interval: SpectralInterval,
    pub poles: PoleSet,
    pub k: usize,
    pub m: usize,
}

impl PoleSetup {
    pub fn resolve(config: &SolverConfig, t1: &TridiagonalMatrix) -> Result<Self> {
        let interval = match config.spectrum {
            SpectrumPolicy::Exact(iv) => iv,
            SpectrumPolicy::FirstCycleRitz => estimate_extremal_eigs(t1)?,
        };
        let poles = match &config.poles {
            Some(p) => p.clone(),
            None => zolotarev_poles(
                choose_pole_count(config.tol, interval.lo, interval.hi)?,
                interval.lo,
                interval.hi,
            )?,
        };
        let k = poles.len();
        let m = config.check_pole_count(k)?;
        Ok(Self {
            interval,
            poles,
            k,
            m,
        })
    }
}

/// `(0.1·λmin(T₁), 1.1·λmax(T₁))`.
pub fn estimate_extremal_eigs(t1: &TridiagonalMatrix) -> Result<SpectralInterval> {
    if t1.order() == 0 {
        return Err(Error::input("empty tridiagonal matrix"));
    }
    let eig = sym_eig(t1)?;
    let lo = eig.values[0];
    let hi = eig.values[eig.values.len() - 1];
    if lo <= 0.0 {
        return Err(Error::NotPositiveDefinite(lo));
    }
    SpectralInterval::new(0.1 * lo, 1.1 * hi)
}

const ROW_CHUNK: usize = 256;

/// In place `[cols, tail] ← [cols, tail] · coeffs`, keeping the first
/// `coeffs.ncols()` columns. Rows are processed in chunks so no further
/// length-`N` storage is needed (unless the output is wider than `cols`).
pub(crate) fn combine_in_place(
    cols: &mut Vec<TrackedVec>,
    tail: Option<&[f64]>,
    coeffs: &DMatrix<f64>,
    meter: &std::sync::Arc<MemoryMeter>,
    n: usize,
) {
    let inputs = cols.len();
    assert_eq!(
        inputs + usize::from(tail.is_some()),
        coeffs.nrows(),
        "coefficient rows must match the stored columns"
    );
    let p = coeffs.ncols();
    while cols.len() < p {
        cols.push(TrackedVec::zeros(n, meter));
    }
    let width = coeffs.nrows();
    let mut start = 0;
    while start < n {
        let h = ROW_CHUNK.min(n - start);
        let mut block = DMatrix::zeros(h, width);
        for (j, col) in cols[..inputs].iter().enumerate() {
            block.column_mut(j).copy_from_slice(&col[start..start + h]);
        }
        if let Some(t) = tail {
            block.column_mut(width - 1).copy_from_slice(&t[start..start + h]);
        }
        let out = &block * coeffs;
        for (j, col) in cols[..p].iter_mut().enumerate() {
            col[start..start + h].copy_from_slice(out.column(j).as_slice());
        }
        start += h;
    }
    cols.truncate(p);
}

/// Moves tracked columns into a dense matrix, releasing each as it is copied.
pub(crate) fn into_dense(cols: Vec<TrackedVec>, n: usize) -> DMatrix<f64> {
    let mut z = DMatrix::zeros(n, cols.len());
    for (j, col) in cols.into_iter().enumerate() {
        z.column_mut(j).copy_from_slice(&col);
    }
    z
}

/// Re-orthonormalizes `Z` and carries the triangular factor into `Y`.
pub(crate) fn finish_solution(z: DMatrix<f64>, y: &DenseSym, c_norm2: f64) -> Result<LowRankSolution> {
    let orth = orthonormalize(&z, None);
    let r = DMatrix::from_fn(orth.q.ncols(), z.ncols(), |i, j| orth.coeffs[(i, j)]);
    let y = DenseSym::new(&r * y.as_matrix() * r.transpose())?;
    LowRankSolution::new(orth.q, y, c_norm2)
}

pub(crate) fn check_problem(op: &SymmetricOperator, c: &[f64]) -> Result<()> {
    if c.len() != op.dimension() {
        return Err(Error::Dimension {
            expected: op.dimension(),
            actual: c.len(),
        });
    }
    Ok(())
}

pub(crate) fn lanczos_c_norm2(c: &[f64]) -> f64 {
    crate::lanczos::norm2(c).powi(2)
}

pub(crate) fn first_row(m: &DMatrix<f64>) -> DVector<f64> {
    m.row(0).transpose()
}

pub(crate) fn last_row(m: &DMatrix<f64>) -> DVector<f64> {
    m.row(m.nrows() - 1).transpose()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extremal_estimate_formula() {
        let t = TridiagonalMatrix::new(vec![1.0, 4.0], vec![0.0]).unwrap();
        let iv = estimate_extremal_eigs(&t).unwrap();
        assert!((iv.lo - 0.1).abs() < 1e-15 && (iv.hi - 4.4).abs() < 1e-14);
        let t = TridiagonalMatrix::new(vec![2.0, 2.0], vec![1.0]).unwrap();
        let iv = estimate_extremal_eigs(&t).unwrap();
        assert!((iv.lo - 0.1).abs() < 1e-14 && (iv.hi - 3.3).abs() < 1e-14);
        let t = TridiagonalMatrix::new(vec![-1.0, 2.0], vec![0.5]).unwrap();
        assert!(matches!(estimate_extremal_eigs(&t), Err(Error::NotPositiveDefinite(_))));
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = SolverConfig { tol: 1.5, ..Default::default() };
        assert!(bad.validate().is_err());
        let small = SolverConfig { maxmem: 4, ..Default::default() };
        assert!(small.validate().is_err());
        assert_eq!(SolverConfig::default().check_pole_count(10).unwrap(), 99);
        assert!(SolverConfig { maxmem: 22, ..Default::default() }.check_pole_count(10).is_err());
    }

    #[test]
    fn combine_matches_dense_product() {
        let meter = MemoryMeter::new();
        let n = 600;
        let data: Vec<Vec<f64>> = (0..5)
            .map(|j| (0..n).map(|i| ((i * (j + 3)) % 17) as f64 - 8.0).collect())
            .collect();
        let full = DMatrix::from_fn(n, 5, |i, j| data[j][i]);
        let coeffs = DMatrix::from_fn(5, 3, |i, j| (i as f64 + 1.0) * (j as f64 - 0.5));
        let mut cols: Vec<TrackedVec> = data[..4].iter().map(|d| TrackedVec::from_vec(d.clone(), &meter)).collect();
        combine_in_place(&mut cols, Some(&data[4]), &coeffs, &meter, n);
        assert_eq!(cols.len(), 3);
        assert_eq!(meter.peak(), 4);
        let got = into_dense(cols, n);
        assert!((got - full * coeffs).norm() < 1e-9);
        assert_eq!(meter.current(), 0);
    }

    #[test]
    fn distance_of_low_rank_matches_dense() {
        let z1 = orthonormalize(&DMatrix::from_fn(7, 2, |i, j| (i * 3 + j) as f64 % 5.0 - 1.0), None).q;
        let z2 = orthonormalize(&DMatrix::from_fn(7, 3, |i, j| ((i * (j + 2)) as f64 * 0.7).sin()), None).q;
        let y1 = DenseSym::new(DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.0])).unwrap();
        let y2 = DenseSym::new(DMatrix::from_fn(3, 3, |i, j| 1.0 / (1.0 + i as f64 + j as f64))).unwrap();
        let a = LowRankSolution::new(z1, y1, 1.0).unwrap();
        let b = LowRankSolution::new(z2, y2, 1.0).unwrap();
        let dense = (a.to_dense() - b.to_dense()).norm();
        assert!((a.distance(&b).unwrap() - dense).abs() < 1e-13 * dense);
        assert!((a.fro_norm() - a.to_dense().norm()).abs() < 1e-13);
    }
}
