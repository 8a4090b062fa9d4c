//! Block rational Arnoldi for small symmetric matrices: orthonormal bases of
//! `span{q(S)⁻¹ p(S) B : deg p ≤ k − 1}` with `q(z) = ∏ (z − ξᵢ)`.

use log::{debug, warn};
use nalgebra::DMatrix;

use crate::dense::{orthonormalize, sym_eig, DenseSym, TridiagonalMatrix};
use crate::error::{Error, Result};

/// Relative distance below which a pole counts as an eigenvalue of `S`.
pub const COLLISION_TOL: f64 = 1e-12;
/// Relative amount by which a colliding pole is moved.
pub const COLLISION_SHIFT: f64 = 1e-8;

/// A real pole, or a pole `re ± i·im` together with its conjugate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pole {
    Real(f64),
    ConjugatePair { re: f64, im: f64 },
}

impl Pole {
    /// Number of poles this entry stands for.
    pub fn multiplicity(&self) -> usize {
        match self {
            Pole::Real(_) => 1,
            Pole::ConjugatePair { .. } => 2,
        }
    }

    fn distance_to(&self, lambda: f64) -> f64 {
        match *self {
            Pole::Real(x) => (lambda - x).abs(),
            Pole::ConjugatePair { re, im } => (lambda - re).hypot(im),
        }
    }

    fn nudged(&self, amount: f64) -> Pole {
        match *self {
            Pole::Real(x) => Pole::Real(x - amount),
            Pole::ConjugatePair { re, im } => Pole::ConjugatePair { re: re - amount, im },
        }
    }
}

/// Converts real poles (e.g. from a `PoleSet`) to [`Pole`] entries.
pub fn real_poles(xs: &[f64]) -> Vec<Pole> {
    xs.iter().map(|&x| Pole::Real(x)).collect()
}

/// Orthonormal basis produced by [`rational_block_arnoldi`].
#[derive(Debug, Clone)]
pub struct RationalBasis {
    pub v: DMatrix<f64>,
    /// Poles actually used, after any collision perturbation.
    pub poles: Vec<Pole>,
    pub block_width: usize,
    pub source_dim: usize,
    /// Columns dropped as numerically dependent.
    pub dropped: usize,
    /// Number of block solves with a shifted (or quadratic) matrix.
    pub shift_solves: usize,
}

impl RationalBasis {
    pub fn width(&self) -> usize {
        self.v.ncols()
    }
}

/// Matrix whose shifted systems are solved inside the Arnoldi loop.
#[derive(Debug, Clone, Copy)]
pub enum ShiftSource<'a> {
    Dense(&'a DenseSym),
    Tridiagonal(&'a TridiagonalMatrix),
}

impl ShiftSource<'_> {
    fn order(&self) -> usize {
        match self {
            ShiftSource::Dense(s) => s.order(),
            ShiftSource::Tridiagonal(t) => t.order(),
        }
    }

    fn norm(&self) -> f64 {
        match self {
            ShiftSource::Dense(s) => s.as_matrix().norm(),
            ShiftSource::Tridiagonal(t) => t.norm_bound(),
        }
    }

    fn multiply(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        match self {
            ShiftSource::Dense(s) => s.as_matrix() * x,
            ShiftSource::Tridiagonal(t) => {
                let mut y = DMatrix::zeros(x.nrows(), x.ncols());
                for j in 0..x.ncols() {
                    y.set_column(j, &t.matvec(&x.column(j).into_owned()));
                }
                y
            }
        }
    }

    /// Whether some eigenvalue lies within `tol` of the pole.
    fn collides(&self, pole: &Pole, tol: f64, eigs: &Option<Vec<f64>>) -> bool {
        match (self, pole) {
            (ShiftSource::Tridiagonal(t), Pole::Real(x)) => {
                t.count_below(x + tol) > t.count_below(x - tol)
            }
            (ShiftSource::Tridiagonal(t), Pole::ConjugatePair { re, im }) => {
                *im <= tol && {
                    let r = (tol * tol - im * im).sqrt();
                    t.count_below(re + r) > t.count_below(re - r)
                }
            }
            (ShiftSource::Dense(_), _) => eigs
                .as_ref()
                .expect("dense eigenvalues computed")
                .iter()
                .any(|&l| pole.distance_to(l) <= tol),
        }
    }

    fn solve(&self, pole: &Pole, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let n = self.order();
        match (self, pole) {
            (ShiftSource::Tridiagonal(t), Pole::Real(xi)) => {
                let lu = t.shifted_lu(*xi)?;
                let mut out = x.clone();
                for j in 0..out.ncols() {
                    lu.solve_in_place(out.column_mut(j).as_mut_slice());
                }
                Ok(out)
            }
            (_, Pole::Real(xi)) => {
                let shifted = self.dense() - DMatrix::identity(n, n) * *xi;
                dense_solve(shifted, x)
            }
            (_, Pole::ConjugatePair { re, im }) => {
                let s = self.dense();
                let quad = &s * &s - &s * (2.0 * re) + DMatrix::identity(n, n) * (re * re + im * im);
                dense_solve(quad, x)
            }
        }
    }

    fn dense(&self) -> DMatrix<f64> {
        match self {
            ShiftSource::Dense(s) => s.as_matrix().clone(),
            ShiftSource::Tridiagonal(t) => t.to_dense(),
        }
    }
}

fn dense_solve(m: DMatrix<f64>, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    m.lu()
        .solve(x)
        .ok_or_else(|| Error::Numerical("shifted matrix is singular".into()))
}

/// Moves every pole that is within `COLLISION_TOL·‖S‖` of an eigenvalue of
/// `S` by `COLLISION_SHIFT·‖S‖`, with a warning.
fn separate_poles(src: &ShiftSource<'_>, poles: &[Pole]) -> Result<Vec<Pole>> {
    let norm = src.norm();
    let tol = COLLISION_TOL * norm;
    let eigs = match src {
        ShiftSource::Dense(s) => Some(sym_eig(*s)?.values.iter().copied().collect()),
        ShiftSource::Tridiagonal(_) => None,
    };
    let mut out = Vec::with_capacity(poles.len());
    for pole in poles {
        let mut p = *pole;
        let mut tries = 0;
        while src.collides(&p, tol, &eigs) {
            tries += 1;
            if tries > 8 {
                return Err(Error::Numerical(format!(
                    "pole {pole:?} could not be separated from the spectrum"
                )));
            }
            let moved = p.nudged(COLLISION_SHIFT * norm);
            warn!("pole {p:?} collides with an eigenvalue; moved to {moved:?}");
            p = moved;
        }
        out.push(p);
    }
    Ok(out)
}

/// Orthonormal basis of the rational Krylov space of a small symmetric
/// matrix, starting block `b` (`n × ℓ`) and the given poles.
///
/// The first block is `orth((S − ξ₁)⁻¹ B)`; each later pole is applied to the
/// most recent block, which is then orthogonalized against all previous ones.
/// A conjugate pair contributes `Q⁻¹V` and `S Q⁻¹V` with the real quadratic
/// `Q = (S − ξ)(S − ξ̄)`.
pub fn rational_block_arnoldi(
    source: ShiftSource<'_>,
    b: &DMatrix<f64>,
    poles: &[Pole],
) -> Result<RationalBasis> {
    let n = source.order();
    if b.nrows() != n {
        return Err(Error::Dimension {
            expected: n,
            actual: b.nrows(),
        });
    }
    if poles.is_empty() {
        return Err(Error::input("at least one pole is required"));
    }
    let poles = separate_poles(&source, poles)?;
    let ell = b.ncols();
    let mut basis = DMatrix::<f64>::zeros(n, 0);
    let mut last = b.clone();
    let mut dropped = 0;
    let mut shift_solves = 0;
    for pole in &poles {
        let solved = source.solve(pole, &last)?;
        shift_solves += 1;
        let block = match pole {
            Pole::Real(_) => solved,
            Pole::ConjugatePair { .. } => {
                let s_solved = source.multiply(&solved);
                let mut both = DMatrix::zeros(n, 2 * solved.ncols());
                both.columns_mut(0, solved.ncols()).copy_from(&solved);
                both.columns_mut(solved.ncols(), solved.ncols()).copy_from(&s_solved);
                both
            }
        };
        let expected = block.ncols();
        let orth = orthonormalize(&block, (basis.ncols() > 0).then_some(&basis));
        dropped += expected - orth.q.ncols();
        if orth.q.ncols() == 0 {
            debug!("rational Krylov space became invariant after {} columns", basis.ncols());
            break;
        }
        let q = orth.q;
        let start = basis.ncols();
        basis = basis.insert_columns(start, q.ncols(), 0.0);
        basis.columns_mut(start, q.ncols()).copy_from(&q);
        last = q;
    }
    if dropped > 0 {
        debug!("rational Arnoldi dropped {dropped} dependent column(s)");
    }
    Ok(RationalBasis {
        v: basis,
        poles,
        block_width: ell,
        source_dim: n,
        dropped,
        shift_solves,
    })
}
