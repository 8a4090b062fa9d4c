//! Resumable Lanczos process with optional basis retention and
//! reorthogonalization, plus instrumentation of long-vector memory.

use std::ops::{Deref, DerefMut};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use crate::dense::TridiagonalMatrix;
use crate::error::{Error, Result};
use crate::operators::SymmetricOperator;

/// Counts live length-`N` vectors; shared by every [`TrackedVec`] of a solve.
#[derive(Debug, Default)]
pub struct MemoryMeter {
    current: AtomicUsize,
    peak: AtomicUsize,
}

impl MemoryMeter {
    pub fn new() -> Arc<Self> {
        Arc::new(Self::default())
    }

    fn acquire(&self) {
        let now = self.current.fetch_add(1, Ordering::Relaxed) + 1;
        self.peak.fetch_max(now, Ordering::Relaxed);
    }

    fn release(&self) {
        self.current.fetch_sub(1, Ordering::Relaxed);
    }

    pub fn current(&self) -> usize {
        self.current.load(Ordering::Relaxed)
    }

    pub fn peak(&self) -> usize {
        self.peak.load(Ordering::Relaxed)
    }
}

/// A length-`N` vector registered with a [`MemoryMeter`] for its lifetime.
#[derive(Debug)]
pub struct TrackedVec {
    data: Vec<f64>,
    meter: Arc<MemoryMeter>,
}

impl TrackedVec {
    pub fn zeros(n: usize, meter: &Arc<MemoryMeter>) -> Self {
        Self::from_vec(vec![0.0; n], meter)
    }

    pub fn from_vec(data: Vec<f64>, meter: &Arc<MemoryMeter>) -> Self {
        meter.acquire();
        Self {
            data,
            meter: Arc::clone(meter),
        }
    }

    pub fn meter(&self) -> &Arc<MemoryMeter> {
        &self.meter
    }

    /// Unregisters the vector and hands out the plain storage.
    pub fn into_inner(mut self) -> Vec<f64> {
        std::mem::take(&mut self.data)
    }
}

impl Clone for TrackedVec {
    fn clone(&self) -> Self {
        Self::from_vec(self.data.clone(), &self.meter)
    }
}

impl Drop for TrackedVec {
    fn drop(&mut self) {
        self.meter.release();
    }
}

impl Deref for TrackedVec {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.data
    }
}

impl DerefMut for TrackedVec {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Which Lanczos steps orthogonalize the new vector against stored vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReorthPolicy {
    /// Only during the first cycle (needed for eigenvalue estimates).
    #[default]
    FirstCycle,
    /// Every step, against all previous vectors. Keeps a copy of every
    /// detached vector, so the memory budget is not honoured.
    Full,
    None,
}

/// Lanczos iteration state for `A` and starting vector `c / ‖c‖`.
///
/// The last `q` is always held as `q_curr`. When retention is on, the vectors
/// of the running cycle live in a window; otherwise only `q_prev` is kept.
#[derive(Debug)]
pub struct LanczosState {
    n: usize,
    q_prev: Option<TrackedVec>,
    q_curr: TrackedVec,
    window: Vec<TrackedVec>,
    history: Option<Vec<TrackedVec>>,
    retain: bool,
    reorth: bool,
    alphas: Vec<f64>,
    betas: Vec<f64>,
    breakdown: bool,
    norm_estimate: f64,
    c_norm: f64,
    meter: Arc<MemoryMeter>,
}

impl LanczosState {
    /// Starts at `q₁ = c/‖c‖`. `keep_history` stores copies of detached
    /// windows for full reorthogonalization across cycles.
    pub fn start(
        c: &[f64],
        retain: bool,
        reorth: bool,
        keep_history: bool,
        meter: &Arc<MemoryMeter>,
    ) -> Result<Self> {
        let c_norm = norm2(c);
        if !(c_norm > 0.0) || !c_norm.is_finite() {
            return Err(Error::input("starting vector has zero or non-finite norm"));
        }
        if reorth && !retain {
            return Err(Error::Usage("reorthogonalization needs a retained window".into()));
        }
        let q = TrackedVec::from_vec(c.iter().map(|v| v / c_norm).collect(), meter);
        Ok(Self {
            n: c.len(),
            q_prev: None,
            q_curr: q,
            window: Vec::new(),
            history: keep_history.then(Vec::new),
            retain,
            reorth,
            alphas: Vec::new(),
            betas: Vec::new(),
            breakdown: false,
            norm_estimate: 0.0,
            c_norm,
            meter: Arc::clone(meter),
        })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn c_norm(&self) -> f64 {
        self.c_norm
    }

    pub fn steps_done(&self) -> usize {
        self.alphas.len()
    }

    pub fn breakdown(&self) -> bool {
        self.breakdown
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    /// `β₁ … β_j`; the last one couples `T_j` to `q_{j+1}`.
    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    /// `β_j` after `j` steps (0 before the first step).
    pub fn beta_last(&self) -> f64 {
        self.betas.last().copied().unwrap_or(0.0)
    }

    /// `T_j` after `j` steps.
    pub fn tridiagonal(&self) -> TridiagonalMatrix {
        let j = self.alphas.len();
        TridiagonalMatrix::new(self.alphas.clone(), self.betas[..j.saturating_sub(1)].to_vec())
            .expect("lengths are consistent")
    }

    /// The newest basis vector `q_{j+1}` (the unnormalized remainder after a
    /// breakdown).
    pub fn q_curr(&self) -> &[f64] {
        &self.q_curr
    }

    /// Seam vector `q_j` kept after [`LanczosState::detach_window`].
    pub fn seam(&self) -> Option<&[f64]> {
        self.q_prev.as_deref()
    }

    pub fn window(&self) -> &[TrackedVec] {
        &self.window
    }

    pub fn meter(&self) -> &Arc<MemoryMeter> {
        &self.meter
    }

    pub fn set_reorth(&mut self, on: bool) -> Result<()> {
        if on && !self.retain {
            return Err(Error::Usage("reorthogonalization needs a retained window".into()));
        }
        self.reorth = on;
        Ok(())
    }

    pub fn set_retain(&mut self, on: bool) -> Result<()> {
        if !on && self.reorth {
            return Err(Error::Usage("cannot drop the window while reorthogonalizing".into()));
        }
        if !on {
            if let Some(last) = self.window.pop() {
                self.q_prev = Some(last);
            }
            self.window.clear();
        }
        self.retain = on;
        Ok(())
    }

    fn breakdown_tol(&self) -> f64 {
        self.n as f64 * f64::EPSILON * self.norm_estimate
    }

    /// Runs up to `steps` iterations and returns how many were done (fewer
    /// only on breakdown). Each iteration applies `op` exactly once.
    pub fn advance(&mut self, op: &SymmetricOperator, steps: usize) -> Result<usize> {
        if self.breakdown {
            return Err(Error::Usage("Lanczos process has already broken down".into()));
        }
        if op.dimension() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                actual: op.dimension(),
            });
        }
        for done in 0..steps {
            let mut w = TrackedVec::zeros(self.n, &self.meter);
            op.apply_into(&self.q_curr, &mut w)?;
            let beta_prev = self.beta_last();
            if let Some(prev) = self.q_prev.as_deref().or(self.window.last().map(|v| &v[..])) {
                axpy(-beta_prev, prev, &mut w);
            }
            let alpha = dot(&self.q_curr, &w);
            axpy(-alpha, &self.q_curr, &mut w);
            if self.reorth {
                self.reorthogonalize(&mut w);
            }
            let beta = norm2(&w);
            self.alphas.push(alpha);
            self.betas.push(beta);
            self.norm_estimate = self.norm_estimate.max(beta_prev.abs() + alpha.abs() + beta.abs());
            let broke = beta <= self.breakdown_tol();
            if !broke {
                w.iter_mut().for_each(|v| *v /= beta);
            }
            let old = std::mem::replace(&mut self.q_curr, w);
            if self.retain {
                self.q_prev = None;
                self.window.push(old);
            } else {
                self.q_prev = Some(old);
            }
            if broke {
                self.breakdown = true;
                return Ok(done + 1);
            }
        }
        Ok(steps)
    }

    /// Two classical Gram–Schmidt passes against history, window and `q_curr`.
    fn reorthogonalize(&self, w: &mut [f64]) {
        let history = self.history.iter().flatten();
        let seam = if self.history.is_none() { self.q_prev.as_ref() } else { None };
        let basis: Vec<&[f64]> = history
            .chain(seam)
            .chain(self.window.iter())
            .chain(std::iter::once(&self.q_curr))
            .map(|v| &v[..])
            .collect();
        for _ in 0..2 {
            let h: Vec<f64> = basis.iter().map(|q| dot(q, w)).collect();
            for (q, hi) in basis.iter().zip(h) {
                axpy(-hi, q, w);
            }
        }
    }

    /// Takes the vectors of the current cycle. The last one stays behind as
    /// the seam vector (needed by the next step) unless `keep_seam` is false,
    /// which ends the process.
    pub fn detach_window(&mut self, keep_seam: bool) -> Result<Vec<TrackedVec>> {
        if !self.retain {
            return Err(Error::Usage("window was not retained".into()));
        }
        let mut block = std::mem::take(&mut self.window);
        if let Some(history) = self.history.as_mut() {
            history.extend(block.iter().cloned());
        }
        if keep_seam {
            self.q_prev = block.pop();
        }
        Ok(block)
    }

    /// Releases the seam and current vector; used when a solve finishes.
    pub fn take_vectors(self) -> (Option<TrackedVec>, TrackedVec) {
        (self.q_prev, self.q_curr)
    }
}
