//! Small dense recurrences carried from one compression cycle to the next.
//!
//! Nothing here touches length-`N` vectors, so the same driver decides the
//! stopping step for both the compressed solver and the first pass of the
//! two-pass solver.

use nalgebra::{DMatrix, DVector};

use super::{first_row, last_row, residual::residual_estimate};
use crate::dense::{solve_projected_lyapunov, DenseSym, TridiagonalMatrix};
use crate::error::Result;
use crate::rational_arnoldi::{rational_block_arnoldi, real_poles, Pole, ShiftSource};
use crate::zolotarev::PoleSet;

/// Compressed projection of the Lanczos tridiagonal after a number of cycles.
///
/// With `W` the (never formed) orthonormal basis of the block rational Krylov
/// space of the full tridiagonal matrix for `[e₁, e_last]`, this keeps
/// `Wᵀ T W`, `Wᵀ e₁` and `Wᵀ e_last`, plus the per-cycle factor `W̃` that maps
/// the stored vectors of the cycle onto the new compressed basis.
#[derive(Debug, Clone)]
pub struct CycleProjection {
    poles: Vec<Pole>,
    c_norm2: f64,
    cycle: usize,
    total_steps: usize,
    beta: f64,
    s_tilde: DenseSym,
    w: DVector<f64>,
    last: DVector<f64>,
    w_tilde: DMatrix<f64>,
    u_tilde: DMatrix<f64>,
    y: DenseSym,
    estimate: f64,
}

impl CycleProjection {
    /// First cycle: `t1` is the leading tridiagonal and `beta` its coupling
    /// to the next Lanczos vector.
    pub fn first_cycle(t1: &TridiagonalMatrix, beta: f64, poles: &PoleSet, c_norm2: f64) -> Result<Self> {
        let n = t1.order();
        let mut start = DMatrix::zeros(n, 2);
        start[(0, 0)] = 1.0;
        start[(n - 1, 1)] = 1.0;
        let poles = real_poles(poles.poles());
        let w_tilde = rational_block_arnoldi(ShiftSource::Tridiagonal(t1), &start, &poles)?.v;
        let s_tilde = DenseSym::from(t1).congruence(&w_tilde);
        let w = first_row(&w_tilde);
        Self::finish(poles, c_norm2, 1, n, beta, s_tilde, w, w_tilde)
    }

    /// Appends a cycle whose new diagonal block is `t_hat`; the coupling to
    /// the previous cycle is the previous `beta`.
    pub fn next_cycle(&mut self, t_hat: &TridiagonalMatrix, beta: f64) -> Result<()> {
        let r = self.s_tilde.order();
        let m = t_hat.order();
        let mut s = DMatrix::zeros(r + m, r + m);
        s.view_mut((0, 0), (r, r)).copy_from(self.s_tilde.as_matrix());
        s.view_mut((r, r), (m, m)).copy_from(&t_hat.to_dense());
        for i in 0..r {
            let coupling = self.beta * self.last[i];
            s[(i, r)] = coupling;
            s[(r, i)] = coupling;
        }
        let s = DenseSym::new(s)?;
        let mut start = DMatrix::zeros(r + m, 2);
        start.view_mut((0, 0), (r, 1)).copy_from(&self.w);
        start[(r + m - 1, 1)] = 1.0;
        let w_tilde = rational_block_arnoldi(ShiftSource::Dense(&s), &start, &self.poles)?.v;
        let s_tilde = s.congruence(&w_tilde);
        let w = w_tilde.rows(0, r).transpose() * &self.w;
        let poles = std::mem::take(&mut self.poles);
        *self = Self::finish(
            poles,
            self.c_norm2,
            self.cycle + 1,
            self.total_steps + m,
            beta,
            s_tilde,
            w,
            w_tilde,
        )?;
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn finish(
        poles: Vec<Pole>,
        c_norm2: f64,
        cycle: usize,
        total_steps: usize,
        beta: f64,
        s_tilde: DenseSym,
        w: DVector<f64>,
        w_tilde: DMatrix<f64>,
    ) -> Result<Self> {
        let start = DMatrix::from_column_slice(w.len(), 1, w.as_slice());
        let u_tilde = rational_block_arnoldi(ShiftSource::Dense(&s_tilde), &start, &poles)?.v;
        let h = s_tilde.congruence(&u_tilde);
        let g = u_tilde.transpose() * &w;
        let y = solve_projected_lyapunov(&h, &g, c_norm2)?;
        let last = last_row(&w_tilde);
        let estimate = residual_estimate(&last, &u_tilde, &y, beta);
        Ok(Self {
            poles,
            c_norm2,
            cycle,
            total_steps,
            beta,
            s_tilde,
            w,
            last,
            w_tilde,
            u_tilde,
            y,
            estimate,
        })
    }

    pub fn cycle(&self) -> usize {
        self.cycle
    }

    /// Lanczos steps covered so far.
    pub fn total_steps(&self) -> usize {
        self.total_steps
    }

    /// Coupling of the last covered Lanczos vector to the next one.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Width of the compressed basis.
    pub fn width(&self) -> usize {
        self.s_tilde.order()
    }

    /// Projected tridiagonal on the compressed basis.
    pub fn s_tilde(&self) -> &DenseSym {
        &self.s_tilde
    }

    /// Compressed basis coordinates of `e₁`.
    pub fn w(&self) -> &DVector<f64> {
        &self.w
    }

    /// Compressed basis coordinates of the last covered step.
    pub fn last_row(&self) -> &DVector<f64> {
        &self.last
    }

    /// Map from `[previous compressed basis, new Lanczos vectors]` to the
    /// new compressed basis.
    pub fn w_tilde(&self) -> &DMatrix<f64> {
        &self.w_tilde
    }

    /// Orthonormal basis, in compressed coordinates, of the single-vector
    /// rational Krylov space the solution lives in.
    pub fn u_tilde(&self) -> &DMatrix<f64> {
        &self.u_tilde
    }

    /// Solution of the projected equation on `u_tilde`.
    pub fn y(&self) -> &DenseSym {
        &self.y
    }

    /// Residual estimate at the end of this cycle.
    pub fn estimate(&self) -> f64 {
        self.estimate
    }

    /// `W̃ Ũ`: coefficients of the solution basis on the stored vectors.
    pub fn solution_coefficients(&self) -> DMatrix<f64> {
        &self.w_tilde * &self.u_tilde
    }
}
