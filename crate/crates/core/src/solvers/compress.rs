use std::sync::Arc;
use std::time::Instant;

use log::{debug, info};

use super::{
    check_problem, combine_in_place, finish_solution, into_dense, CycleProjection, LowRankSolution, PoleSetup,
    SolveReport, SolverConfig, Termination,
};
use crate::dense::TridiagonalMatrix;
use crate::error::Result;
use crate::lanczos::{LanczosState, MemoryMeter, ReorthPolicy, TrackedVec};
use crate::operators::SymmetricOperator;

/// State handed to an observer at the end of every cycle.
#[derive(Debug)]
pub struct CycleSnapshot<'a> {
    pub projection: &'a CycleProjection,
    /// Lanczos coefficients of all steps so far.
    pub alphas: &'a [f64],
    pub betas: &'a [f64],
}

/// Outcome of the cycle loop, before any long vectors are combined.
pub(crate) struct CycleRun {
    pub projection: CycleProjection,
    pub setup: PoleSetup,
    pub termination: Termination,
    pub estimates: Vec<f64>,
    pub first_cycle_steps: usize,
    /// Tridiagonal of all steps taken.
    pub tridiagonal: TridiagonalMatrix,
}

/// How the cycle loop treats the Lanczos window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum WindowUse {
    /// Every cycle's vectors are handed to the hook (compression).
    Keep,
    /// Vectors are only kept while reorthogonalizing (first pass of two-pass).
    ReorthOnly,
}

/// Runs Lanczos cycle by cycle, updating the small projection and calling
/// `hook(lanczos, projection, is_final)` after each cycle.
pub(crate) fn run_cycles(
    op: &SymmetricOperator,
    c: &[f64],
    config: &SolverConfig,
    meter: &Arc<MemoryMeter>,
    window: WindowUse,
    hook: &mut dyn FnMut(&mut LanczosState, &CycleProjection, bool) -> Result<()>,
    observer: &mut dyn FnMut(&CycleSnapshot<'_>),
) -> Result<CycleRun> {
    config.validate()?;
    check_problem(op, c)?;
    let reorth = config.reorth != ReorthPolicy::None;
    let full = config.reorth == ReorthPolicy::Full;
    let retain = reorth || window == WindowUse::Keep;
    let mut lanczos = LanczosState::start(c, retain, reorth, full && window == WindowUse::Keep, meter)?;
    let c_norm2 = lanczos.c_norm().powi(2);
    let threshold = config.tol * c_norm2 / 2.0;
    let cap = config.max_matvecs;

    let first = config.first_cycle_len().min(cap);
    lanczos.advance(op, first)?;
    let t1 = lanczos.tridiagonal();
    let setup = PoleSetup::resolve(config, &t1)?;
    info!(
        "first cycle: {} steps, interval [{:.6e}, {:.6e}], k = {}, m = {}",
        t1.order(),
        setup.interval.lo,
        setup.interval.hi,
        setup.k,
        setup.m
    );
    let seam_beta = |l: &LanczosState| if l.breakdown() { 0.0 } else { l.beta_last() };
    let mut projection = CycleProjection::first_cycle(&t1, seam_beta(&lanczos), &setup.poles, c_norm2)?;
    let first_cycle_steps = t1.order();
    drop(t1);
    let mut estimates = Vec::new();
    loop {
        let estimate = projection.estimate();
        estimates.push(estimate);
        debug!(
            "cycle {}: {} steps, estimate {:.3e}",
            projection.cycle(),
            projection.total_steps(),
            estimate
        );
        observer(&CycleSnapshot {
            projection: &projection,
            alphas: lanczos.alphas(),
            betas: lanczos.betas(),
        });
        let termination = if lanczos.breakdown() {
            Some(Termination::Breakdown)
        } else if estimate <= threshold {
            Some(Termination::Tolerance)
        } else if lanczos.steps_done() >= cap {
            Some(Termination::MatvecCap)
        } else {
            None
        };
        hook(&mut lanczos, &projection, termination.is_some())?;
        if let Some(termination) = termination {
            return Ok(CycleRun {
                projection,
                setup,
                termination,
                estimates,
                first_cycle_steps,
                tridiagonal: lanczos.tridiagonal(),
            });
        }
        if projection.cycle() == 1 && config.reorth == ReorthPolicy::FirstCycle {
            lanczos.set_reorth(false)?;
            if window == WindowUse::ReorthOnly {
                lanczos.set_retain(false)?;
            }
        }
        let before = lanczos.steps_done();
        lanczos.advance(op, setup.m.min(cap - before))?;
        let t_hat = TridiagonalMatrix::new(
            lanczos.alphas()[before..].to_vec(),
            lanczos.betas()[before..lanczos.steps_done() - 1].to_vec(),
        )?;
        projection.next_cycle(&t_hat, seam_beta(&lanczos))?;
    }
}

/// Lanczos with compression: stores at most `config.maxmem` vectors of
/// length `N` (unless full reorthogonalization is requested).
pub fn compress_solve(
    op: &SymmetricOperator,
    c: &[f64],
    config: &SolverConfig,
) -> Result<(LowRankSolution, SolveReport)> {
    compress_solve_observed(op, c, config, &mut |_| {})
}

/// [`compress_solve`] with a callback at the end of every cycle.
pub fn compress_solve_observed(
    op: &SymmetricOperator,
    c: &[f64],
    config: &SolverConfig,
    observer: &mut dyn FnMut(&CycleSnapshot<'_>),
) -> Result<(LowRankSolution, SolveReport)> {
    let started = Instant::now();
    let matvecs_before = op.matvec_count();
    let meter = MemoryMeter::new();
    let n = op.dimension();
    let mut basis: Vec<TrackedVec> = Vec::new();
    let mut hook = |lanczos: &mut LanczosState, proj: &CycleProjection, last: bool| -> Result<()> {
        let mut block = lanczos.detach_window(true)?;
        basis.append(&mut block);
        let coeffs = if last {
            proj.solution_coefficients()
        } else {
            proj.w_tilde().clone()
        };
        let meter = Arc::clone(lanczos.meter());
        combine_in_place(&mut basis, lanczos.seam(), &coeffs, &meter, n);
        Ok(())
    };
    let run = run_cycles(op, c, config, &meter, WindowUse::Keep, &mut hook, observer)?;
    let c_norm2 = super::lanczos_c_norm2(c);
    let sol = finish_solution(into_dense(basis, n), run.projection.y(), c_norm2)?;
    let matvecs = op.matvec_count() - matvecs_before;
    debug!("compression finished in {:.3?}", started.elapsed());
    let report = SolveReport {
        matvecs,
        pass_one_matvecs: matvecs,
        cycles: run.projection.cycle(),
        total_steps: run.projection.total_steps(),
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
