//! C interface to the `lyapcomp` solvers.
//!
//! Operators and solutions are opaque handles created and destroyed through
//! this API. Every fallible function returns an [`LcStatus`]; on failure the
//! message is available from [`lc_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use lyapcomp::error::Error;
use lyapcomp::lanczos::ReorthPolicy;
use lyapcomp::operators::{normalize_problem, SparseCsr, SpectralInterval, SymmetricOperator};
use lyapcomp::solvers::{
    compress_solve, reference_solve_adaptive, true_residual_fro, two_pass_solve, LowRankSolution, SolveReport,
    SolverConfig, SpectrumPolicy, Termination,
};
use nalgebra::DMatrix;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    DimensionMismatch = 3,
    NotPositiveDefinite = 4,
    NumericalFailure = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LcMethod {
    Compress = 0,
    TwoPass = 1,
    Reference = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LcReorth {
    FirstCycle = 0,
    Full = 1,
    None = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LcTermination {
    Tolerance = 0,
    Breakdown = 1,
    MatvecCap = 2,
}

/// Solver settings; start from [`lc_config_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct LcConfig {
    pub tol: f64,
    /// Maximum number of stored vectors of length `n`.
    pub maxmem: usize,
    pub max_matvecs: usize,
    pub reorth: LcReorth,
    pub method: LcMethod,
}

/// Summary of a finished solve.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct LcReport {
    pub matvecs: u64,
    pub cycles: usize,
    pub total_steps: usize,
    pub poles: usize,
    pub cycle_length: usize,
    pub peak_vectors: usize,
    pub termination: LcTermination,
    /// Spectral interval used for the poles, for the normalized operator.
    pub interval_lo: f64,
    pub interval_hi: f64,
    /// Last residual estimate, relative to `‖c‖²`.
    pub last_estimate: f64,
}

/// Symmetric positive definite operator `A`.
pub struct LcOperator {
    op: SymmetricOperator,
}

/// Low-rank solution `X = Z Y Zᵀ` of `A X + X A = c cᵀ`.
pub struct LcSolution {
    solution: LowRankSolution,
    report: SolveReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: LcStatus, msg: impl Into<String>) -> LcStatus {
    set_error(msg.into());
    status
}

fn status_of(e: &Error) -> LcStatus {
    match e {
        Error::Dimension { .. } => LcStatus::DimensionMismatch,
        Error::NotPositiveDefinite(_) | Error::Factorization(_) => LcStatus::NotPositiveDefinite,
        Error::Numerical(_) | Error::SingularEquation(_) => LcStatus::NumericalFailure,
        _ => LcStatus::InvalidInput,
    }
}

/// Runs `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), LcStatus>) -> LcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LcStatus::Ok,
        Ok(Err(status)) => status,
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(LcStatus::Panic, format!("panic: {msg}"))
        }
    }
}

fn check(e: Error) -> LcStatus {
    let status = status_of(&e);
    fail(status, e.to_string())
}

unsafe fn input<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], LcStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(LcStatus::NullPointer, format!("{what} is null")));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, LcStatus> {
    p.as_ref().ok_or_else(|| fail(LcStatus::NullPointer, format!("{what} is null")))
}

fn out_ptr<T>(p: *mut T) -> Result<(), LcStatus> {
    if p.is_null() {
        Err(fail(LcStatus::NullPointer, "output pointer is null"))
    } else {
        Ok(())
    }
}

fn symmetric_operator(csr: SparseCsr, out: *mut *mut LcOperator) -> Result<(), LcStatus> {
    let scale = csr.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !csr.is_symmetric(1e-12 * scale.max(f64::MIN_POSITIVE)) {
        return Err(fail(LcStatus::InvalidInput, "matrix is not symmetric"));
    }
    let op = Box::new(LcOperator {
        op: SymmetricOperator::new(csr),
    });
    // SAFETY: checked non-null by the caller.
    unsafe { *out = Box::into_raw(op) };
    Ok(())
}

/// Creates an operator from a symmetric matrix in CSR layout with 0-based
/// indices: `row_offsets` has `n + 1` entries, `col_indices` and `values`
/// have `row_offsets[n]` entries.
///
/// # Safety
/// The arrays must be valid for the stated lengths and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lc_operator_from_csr(
    n: usize,
    row_offsets: *const usize,
    col_indices: *const usize,
    values: *const f64,
    out: *mut *mut LcOperator,
) -> LcStatus {
    guard(|| {
        out_ptr(out)?;
        if n == 0 {
            return Err(fail(LcStatus::InvalidInput, "dimension must be positive"));
        }
        let offsets = input(row_offsets, n + 1, "row_offsets")?;
        if offsets[0] != 0 || offsets.windows(2).any(|w| w[0] > w[1]) {
            return Err(fail(LcStatus::InvalidInput, "row_offsets must start at 0 and be non-decreasing"));
        }
        let nnz = offsets[n];
        let cols = input(col_indices, nnz, "col_indices")?;
        let vals = input(values, nnz, "values")?;
        let mut triplets = Vec::with_capacity(nnz);
        for i in 0..n {
            for p in offsets[i]..offsets[i + 1] {
                triplets.push((i, cols[p], vals[p]));
            }
        }
        let csr = SparseCsr::from_triplets(n, &triplets).map_err(check)?;
        symmetric_operator(csr, out)
    })
}

/// Creates an operator from a dense symmetric `n × n` matrix stored by columns.
///
/// # Safety
/// `values` must hold `n * n` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lc_operator_from_dense(n: usize, values: *const f64, out: *mut *mut LcOperator) -> LcStatus {
    guard(|| {
        out_ptr(out)?;
        if n == 0 {
            return Err(fail(LcStatus::InvalidInput, "dimension must be positive"));
        }
        let vals = input(values, n * n, "values")?;
        let csr = SparseCsr::from_dense(&DMatrix::from_column_slice(n, n, vals)).map_err(check)?;
        symmetric_operator(csr, out)
    })
}

/// Supplies the extreme eigenvalues `0 < lo <= hi` of the operator, used for
/// the poles instead of the estimate from the first cycle.
///
/// # Safety
/// `op` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lc_operator_set_spectrum(op: *mut LcOperator, lo: f64, hi: f64) -> LcStatus {
    guard(|| {
        let handle = op
            .as_mut()
            .ok_or_else(|| fail(LcStatus::NullPointer, "operator is null"))?;
        let iv = SpectralInterval::new(lo, hi).map_err(check)?;
        let inner = SymmetricOperator::from_arc(handle.op.inner().clone());
        handle.op = inner.with_spectral_hint(iv);
        Ok(())
    })
}

/// Dimension of the operator, or 0 for a null handle.
///
/// # Safety
/// `op` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lc_operator_dimension(op: *const LcOperator) -> usize {
    op.as_ref().map_or(0, |o| o.op.dimension())
}

/// # Safety
/// `op` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lc_operator_free(op: *mut LcOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

#[no_mangle]
pub extern "C" fn lc_config_default() -> LcConfig {
    let d = SolverConfig::default();
    LcConfig {
        tol: d.tol,
        maxmem: d.maxmem,
        max_matvecs: d.max_matvecs,
        reorth: LcReorth::FirstCycle,
        method: LcMethod::Compress,
    }
}

fn solver_config(c: &LcConfig, interval: Option<SpectralInterval>) -> SolverConfig {
    SolverConfig {
        tol: c.tol,
        maxmem: c.maxmem,
        max_matvecs: c.max_matvecs,
        poles: None,
        spectrum: interval.map_or(SpectrumPolicy::FirstCycleRitz, SpectrumPolicy::Exact),
        reorth: match c.reorth {
            LcReorth::FirstCycle => ReorthPolicy::FirstCycle,
            LcReorth::Full => ReorthPolicy::Full,
            LcReorth::None => ReorthPolicy::None,
        },
    }
}

/// Solves `A X + X A = c cᵀ`. The problem is rescaled internally, which does
/// not change `X`. A solve that stops at the matvec cap still succeeds; check
/// `termination` in the report.
///
/// # Safety
/// `op` must be a live handle, `c` must hold `len` doubles, `config` may be
/// null for the defaults and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lc_solve(
    op: *const LcOperator,
    c: *const f64,
    len: usize,
    config: *const LcConfig,
    out: *mut *mut LcSolution,
) -> LcStatus {
    guard(|| {
        out_ptr(out)?;
        let op = &handle(op, "operator")?.op;
        let c = input(c, len, "c")?;
        let config = config.as_ref().copied().unwrap_or_else(|| lc_config_default());
        let (scaled, c) = normalize_problem(op, c).map_err(check)?;
        let solver = solver_config(&config, scaled.spectral_hint());
        let (solution, report) = match config.method {
            LcMethod::Compress => compress_solve(&scaled, &c, &solver),
            LcMethod::TwoPass => two_pass_solve(&scaled, &c, &solver),
            LcMethod::Reference => reference_solve_adaptive(&scaled, &c, &solver),
        }
        .map_err(check)?;
        *out = Box::into_raw(Box::new(LcSolution { solution, report }));
        Ok(())
    })
}

/// Length `n` of the solution factor's columns, or 0 for a null handle.
///
/// # Safety
/// `sol` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lc_solution_dimension(sol: *const LcSolution) -> usize {
    sol.as_ref().map_or(0, |s| s.solution.dimension())
}

/// Rank `r` of the factorization, or 0 for a null handle.
///
/// # Safety
/// `sol` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lc_solution_rank(sol: *const LcSolution) -> usize {
    sol.as_ref().map_or(0, |s| s.solution.rank())
}

unsafe fn copy_matrix(m: &DMatrix<f64>, buf: *mut f64, len: usize) -> Result<(), LcStatus> {
    let need = m.len();
    if len < need {
        return Err(fail(
            LcStatus::BufferTooSmall,
            format!("buffer holds {len} values, {need} needed"),
        ));
    }
    if need > 0 {
        out_ptr(buf)?;
        slice::from_raw_parts_mut(buf, need).copy_from_slice(m.as_slice());
    }
    Ok(())
}

/// Copies the orthonormal factor `Z` (`n × r`, by columns) into `buf`.
///
/// # Safety
/// `sol` must be a live handle and `buf` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn lc_solution_factor(sol: *const LcSolution, buf: *mut f64, len: usize) -> LcStatus {
    guard(|| copy_matrix(handle(sol, "solution")?.solution.z(), buf, len))
}

/// Copies the symmetric core `Y` (`r × r`, by columns) into `buf`. It is
/// scaled so that `X = Z Y Zᵀ` solves the original equation.
///
/// # Safety
/// `sol` must be a live handle and `buf` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn lc_solution_core(sol: *const LcSolution, buf: *mut f64, len: usize) -> LcStatus {
    guard(|| copy_matrix(handle(sol, "solution")?.solution.y().as_matrix(), buf, len))
}

/// # Safety
/// `sol` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lc_solution_report(sol: *const LcSolution, out: *mut LcReport) -> LcStatus {
    guard(|| {
        out_ptr(out)?;
        let r = &handle(sol, "solution")?.report;
        *out = LcReport {
            matvecs: r.matvecs,
            cycles: r.cycles,
            total_steps: r.total_steps,
            poles: r.k,
            cycle_length: r.m,
            peak_vectors: r.peak_vectors,
            termination: match r.termination {
                Termination::Tolerance => LcTermination::Tolerance,
                Termination::Breakdown => LcTermination::Breakdown,
                Termination::MatvecCap => LcTermination::MatvecCap,
            },
            interval_lo: r.interval.lo,
            interval_hi: r.interval.hi,
            last_estimate: r.estimates.last().copied().unwrap_or(f64::NAN),
        };
        Ok(())
    })
}

/// Writes `‖A X + X A − c cᵀ‖_F / ‖c‖²` to `out`, using `2r + 1` operator
/// applications.
///
/// # Safety
/// Handles must be live, `c` must hold `len` doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn lc_solution_residual(
    op: *const LcOperator,
    sol: *const LcSolution,
    c: *const f64,
    len: usize,
    out: *mut f64,
) -> LcStatus {
    guard(|| {
        out_ptr(out)?;
        let op = &handle(op, "operator")?.op;
        let sol = &handle(sol, "solution")?.solution;
        let c = input(c, len, "c")?;
        let res = true_residual_fro(op, sol, c).map_err(check)?;
        let c2: f64 = c.iter().map(|v| v * v).sum();
        *out = res / c2;
        Ok(())
    })
}

/// # Safety
/// `sol` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lc_solution_free(sol: *mut LcSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Copies the last error message of this thread, NUL-terminated and
/// truncated to fit, into `buf`. Returns the full message length plus one
/// (0 when there is no message). `buf` may be null to query the length.
///
/// # Safety
/// `buf` must be null or writable for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn lc_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes_with_nul();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len) - 1;
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn lc_status_string(status: LcStatus) -> *const c_char {
    let s: &'static std::ffi::CStr = match status {
        LcStatus::Ok => c"ok",
        LcStatus::NullPointer => c"null pointer",
        LcStatus::InvalidInput => c"invalid input",
        LcStatus::DimensionMismatch => c"dimension mismatch",
        LcStatus::NotPositiveDefinite => c"operator is not positive definite",
        LcStatus::NumericalFailure => c"numerical failure",
        LcStatus::BufferTooSmall => c"buffer too small",
        LcStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}
