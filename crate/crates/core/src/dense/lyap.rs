use nalgebra::{DMatrix, DVector};

use super::{sym_eig, DenseSym};
use crate::error::{Error, Result};

/// Solves `H Y + Y H = scale · g gᵀ` by diagonalizing `H`.
///
/// With `H = V Λ Vᵀ` and `h = Vᵀ g`, the solution in the eigenbasis is
/// `scale · hᵢ hⱼ / (λᵢ + λⱼ)`.
pub fn solve_projected_lyapunov(h: &DenseSym, g: &DVector<f64>, scale: f64) -> Result<DenseSym> {
    let n = h.order();
    if g.len() != n {
        return Err(Error::Dimension {
            expected: n,
            actual: g.len(),
        });
    }
    if n == 0 {
        return DenseSym::new(DMatrix::zeros(0, 0));
    }
    let eig = sym_eig(h)?;
    let lambda = &eig.values;
    let norm = lambda.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let mut min_pair = f64::INFINITY;
    for i in 0..n {
        for j in 0..n {
            min_pair = min_pair.min((lambda[i] + lambda[j]).abs());
        }
    }
    if min_pair <= 1e-14 * norm || min_pair == 0.0 {
        return Err(Error::SingularEquation(min_pair));
    }
    let coeff = eig.vectors.transpose() * g;
    let inner = DMatrix::from_fn(n, n, |i, j| scale * coeff[i] * coeff[j] / (lambda[i] + lambda[j]));
    DenseSym::new(&eig.vectors * inner * eig.vectors.transpose())
}
