use std::sync::Arc;

use log::warn;
use nalgebra::DMatrix;

use super::compress::{run_cycles, WindowUse};
use super::reference::project_tridiagonal;
use super::{combine_in_place, finish_solution, into_dense, LowRankSolution, SolveReport, SolverConfig};
use crate::dense::{sym_eig, DenseSym};
use crate::error::Result;
use crate::lanczos::{LanczosState, MemoryMeter, ReorthPolicy, TrackedVec};
use crate::operators::SymmetricOperator;

/// Two-pass Lanczos: the first pass runs the same cycles and stopping rule as
/// [`super::compress_solve`] but stores no basis. The projected equation for
/// the whole tridiagonal is then solved and diagonalized, and a second
/// identical Lanczos pass accumulates the low-rank factor. Uses twice the
/// matvecs of the first pass.
pub fn two_pass_solve(
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
    let c_norm2 = super::lanczos_c_norm2(c);
    let t = &run.tridiagonal;

    let (u, y) = project_tridiagonal(t, &run.setup.poles, c_norm2)?;
    let eig = sym_eig(&y)?;
    let coeffs = &u * &eig.vectors;
    let factor = second_pass(op, c, config, &meter, run.first_cycle_steps, &coeffs, t.diag())?;
    let y = DenseSym::new(DMatrix::from_diagonal(&eig.values))?;
    let sol = finish_solution(into_dense(factor, op.dimension()), &y, c_norm2)?;
    let report = SolveReport {
        matvecs: op.matvec_count() - before,
        pass_one_matvecs,
        cycles: run.projection.cycle(),
        total_steps: t.order(),
        k: run.setup.k,
        m: run.setup.m,
        estimates: run.estimates,
        peak_vectors: meter.peak(),
        termination: run.termination,
        interval: run.setup.interval,
        poles: run.setup.poles,
    };
    Ok((sol, report))
}

/// Reruns the first pass with the same reorthogonalization schedule and
/// returns `Q · coeffs`, streaming vectors once they are no longer needed.
fn second_pass(
    op: &SymmetricOperator,
    c: &[f64],
    config: &SolverConfig,
    meter: &Arc<MemoryMeter>,
    first_cycle_steps: usize,
    coeffs: &DMatrix<f64>,
    pass_one_alphas: &[f64],
) -> Result<Vec<TrackedVec>> {
    let n = op.dimension();
    let steps = coeffs.nrows();
    let reorth = config.reorth != ReorthPolicy::None;
    let mut lanczos = LanczosState::start(c, reorth, reorth, false, meter)?;
    let mut acc: Vec<TrackedVec>;
    if config.reorth == ReorthPolicy::Full {
        lanczos.advance(op, steps)?;
        acc = lanczos.detach_window(true)?;
        combine_in_place(&mut acc, lanczos.seam(), coeffs, meter, n);
    } else if reorth {
        let first = first_cycle_steps.min(steps);
        lanczos.advance(op, first)?;
        acc = lanczos.detach_window(true)?;
        let head = coeffs.rows(0, first).into_owned();
        combine_in_place(&mut acc, lanczos.seam(), &head, meter, n);
        lanczos.set_reorth(false)?;
        lanczos.set_retain(false)?;
    } else {
        acc = (0..coeffs.ncols()).map(|_| TrackedVec::zeros(n, meter)).collect();
    }
    while lanczos.steps_done() < steps {
        let row = coeffs.row(lanczos.steps_done());
        let q = lanczos.q_curr();
        for (col, &weight) in acc.iter_mut().zip(row.iter()) {
            col.iter_mut().zip(q).for_each(|(a, qi)| *a += weight * qi);
        }
        lanczos.advance(op, 1)?;
    }
    let alphas = lanczos.alphas();
    if alphas.len() != pass_one_alphas.len() || alphas.iter().zip(pass_one_alphas).any(|(a, b)| a != b) {
        warn!("second Lanczos pass differs from the first; is the operator deterministic?");
    }
    Ok(acc)
}
