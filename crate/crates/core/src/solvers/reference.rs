use nalgebra::DMatrix;

use super::compress::{run_cycles, WindowUse};
use super::{
    check_problem, combine_in_place, finish_solution, first_row, into_dense, residual_estimate, LowRankSolution,
    SolveReport, SolverConfig,
};
use crate::dense::{solve_projected_lyapunov, DenseSym, TridiagonalMatrix};
use crate::error::{Error, Result};
use crate::lanczos::{LanczosState, MemoryMeter, ReorthPolicy};
use crate::operators::SymmetricOperator;
use crate::rational_arnoldi::{rational_block_arnoldi, real_poles, ShiftSource};
use crate::zolotarev::PoleSet;

#[derive(Debug, Clone)]
pub struct ReferenceDiagnostics {
    /// Lanczos steps actually taken.
    pub steps: usize,
    pub breakdown: bool,
    pub tridiagonal: TridiagonalMatrix,
    /// Coupling of the last step to the next Lanczos vector.
    pub beta: f64,
    /// Orthonormal basis of the rational Krylov space of the tridiagonal.
    pub u: DMatrix<f64>,
    /// Projected solution on `u`.
    pub y: DenseSym,
    pub estimate: f64,
    pub matvecs: u64,
    pub peak_vectors: usize,
}

/// Rational projection of the whole tridiagonal for starting vector `e₁`,
/// returning the basis `U` and the solution `Y` of the projected equation.
pub(crate) fn project_tridiagonal(
    t: &TridiagonalMatrix,
    poles: &PoleSet,
    c_norm2: f64,
) -> Result<(DMatrix<f64>, DenseSym)> {
    let mut e1 = DMatrix::zeros(t.order(), 1);
    e1[(0, 0)] = 1.0;
    let u = rational_block_arnoldi(ShiftSource::Tridiagonal(t), &e1, &real_poles(poles.poles()))?.v;
    let h = DenseSym::from(t).congruence(&u);
    let y = solve_projected_lyapunov(&h, &first_row(&u), c_norm2)?;
    Ok((u, y))
}

/// Keeps the full Lanczos basis for `steps` iterations and projects onto the
/// rational Krylov space of the tridiagonal. Meant as a testing baseline:
/// memory grows with `steps`.
pub fn reference_solve(
    op: &SymmetricOperator,
    c: &[f64],
    steps: usize,
    poles: &PoleSet,
    reorth: bool,
) -> Result<(LowRankSolution, ReferenceDiagnostics)> {
    check_problem(op, c)?;
    if steps == 0 || steps > op.dimension() {
        return Err(Error::input(format!(
            "step count must lie in 1..={}, got {steps}",
            op.dimension()
        )));
    }
    let start = op.matvec_count();
    let meter = MemoryMeter::new();
    let mut lanczos = LanczosState::start(c, true, reorth, false, &meter)?;
    lanczos.advance(op, steps)?;
    let c_norm2 = lanczos.c_norm().powi(2);
    let t = lanczos.tridiagonal();
    let beta = if lanczos.breakdown() { 0.0 } else { lanczos.beta_last() };
    let (u, y) = project_tridiagonal(&t, poles, c_norm2)?;
    let estimate = residual_estimate(&u.row(u.nrows() - 1).transpose(), &DMatrix::identity(u.ncols(), u.ncols()), &y, beta);
    let breakdown = lanczos.breakdown();
    let mut basis = lanczos.detach_window(false)?;
    drop(lanczos);
    let n = op.dimension();
    combine_in_place(&mut basis, None, &u, &meter, n);
    let sol = finish_solution(into_dense(basis, n), &y, c_norm2)?;
    let diagnostics = ReferenceDiagnostics {
        steps: t.order(),
        breakdown,
        tridiagonal: t,
        beta,
        u,
        y,
        estimate,
        matvecs: op.matvec_count() - start,
        peak_vectors: meter.peak(),
    };
    Ok((sol, diagnostics))
}

/// [`reference_solve`] at the step count chosen by the cycle stopping rule of
/// [`super::compress_solve`]. The step count comes from a basis-free first
/// pass, so this costs twice the matvecs of the compressed solver.
pub fn reference_solve_adaptive(
    op: &SymmetricOperator,
    c: &[f64],
    config: &SolverConfig,
) -> Result<(LowRankSolution, SolveReport)> {
    let before = op.matvec_count();
    let meter = MemoryMeter::new();
    let run = run_cycles(
        op,
        c,
        config,
        &meter,
        WindowUse::ReorthOnly,
        &mut |_, _, _| Ok(()),
        &mut |_| {},
    )?;
    let pass_one_matvecs = op.matvec_count() - before;
    let steps = run.tridiagonal.order().min(op.dimension());
    let reorth = config.reorth != ReorthPolicy::None;
    let (sol, diag) = reference_solve(op, c, steps, &run.setup.poles, reorth)?;
    let report = SolveReport {
        matvecs: op.matvec_count() - before,
        pass_one_matvecs,
        cycles: run.projection.cycle(),
        total_steps: diag.steps,
        k: run.setup.k,
        m: run.setup.m,
        estimates: run.estimates,
        peak_vectors: meter.peak().max(diag.peak_vectors),
        termination: run.termination,
        interval: run.setup.interval,
        poles: run.setup.poles,
    };
    Ok((sol, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zolotarev::{choose_pole_count, zolotarev_poles};
    use nalgebra::DVector;

    #[test]
    fn decoupled_two_by_two_breaks_down() {
        let op = SymmetricOperator::dense(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0])));
        let poles = zolotarev_poles(1, 1.0, 2.0).unwrap();
        let (sol, diag) = reference_solve(&op, &[1.0, 0.0], 2, &poles, true).unwrap();
        assert!(diag.breakdown);
        assert_eq!(diag.steps, 1);
        assert_eq!(diag.estimate, 0.0);
        let x = sol.to_dense();
        assert!((x[(0, 0)] - 0.5).abs() < 1e-15);
        assert!(x[(1, 1)].abs() < 1e-15 && x[(0, 1)].abs() < 1e-15);
    }

    #[test]
    fn matches_kronecker_solution() {
        let n = 16;
        let b = DMatrix::from_fn(n, n, |i, j| ((i * 7 + j * 3) % 11) as f64 / 11.0 - 0.5);
        let a = &b * b.transpose() + DMatrix::identity(n, n);
        let c: Vec<f64> = (0..n).map(|i| (i as f64 * 0.9).cos()).collect();
        let eig = a.clone().symmetric_eigen();
        let (lo, hi) = (eig.eigenvalues.min(), eig.eigenvalues.max());
        let poles = zolotarev_poles(choose_pole_count(1e-10, lo, hi).unwrap(), lo, hi).unwrap();
        let op = SymmetricOperator::dense(a.clone());
        let (sol, diag) = reference_solve(&op, &c, n, &poles, true).unwrap();
        assert_eq!(diag.matvecs, diag.steps as u64);
        let eye = DMatrix::<f64>::identity(n, n);
        let k = a.kronecker(&eye) + eye.kronecker(&a);
        let cv = DVector::from_column_slice(&c);
        let rhs = (&cv * cv.transpose()).reshape_generic(nalgebra::Dyn(n * n), nalgebra::U1);
        let x = k.lu().solve(&rhs).unwrap().reshape_generic(nalgebra::Dyn(n), nalgebra::Dyn(n));
        assert!((sol.to_dense() - &x).norm() <= 1e-8 * x.norm());
        assert!(diag.peak_vectors <= n + 2);
    }

    #[test]
    fn rejects_bad_step_counts() {
        let op = SymmetricOperator::dense(DMatrix::identity(3, 3));
        let poles = zolotarev_poles(1, 1.0, 1.0).unwrap();
        assert!(reference_solve(&op, &[1.0, 0.0, 0.0], 0, &poles, true).is_err());
        assert!(reference_solve(&op, &[1.0, 0.0, 0.0], 4, &poles, true).is_err());
        assert!(reference_solve(&op, &[1.0, 0.0], 1, &poles, true).is_err());
    }
}
