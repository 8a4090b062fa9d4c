use std::f64::consts::PI;

use super::{SparseCsr, SpectralInterval};
use crate::error::{Error, Result};

/// Five-point Laplacian `A = B ⊗ I + I ⊗ B`, `B = (n+1)² · tridiag(−1, 2, −1)`,
/// of order `N = n_side²` on the interior grid of the unit square.
///
/// Grid point `(i, j)` (x index `i` fastest) maps to row `j · n_side + i`.
pub fn kron_sum_laplacian(n_side: usize) -> Result<SparseCsr> {
    if n_side == 0 {
        return Err(Error::input("n_side must be at least 1"));
    }
    let n = n_side;
    let h = ((n + 1) * (n + 1)) as f64;
    let mut t = Vec::with_capacity(5 * n * n);
    for j in 0..n {
        for i in 0..n {
            let p = j * n + i;
            if j > 0 {
                t.push((p, p - n, -h));
            }
            if i > 0 {
                t.push((p, p - 1, -h));
            }
            t.push((p, p, 4.0 * h));
            if i + 1 < n {
                t.push((p, p + 1, -h));
            }
            if j + 1 < n {
                t.push((p, p + n, -h));
            }
        }
    }
    SparseCsr::from_triplets(n * n, &t)
}

/// Exact extreme eigenvalues of [`kron_sum_laplacian`], from
/// `eig(B) = (n+1)² (2 − 2 cos(jπ/(n+1)))`.
pub fn laplacian_extreme_eigenvalues(n_side: usize) -> Result<SpectralInterval> {
    if n_side == 0 {
        return Err(Error::input("n_side must be at least 1"));
    }
    let h = ((n_side + 1) * (n_side + 1)) as f64;
    let theta = PI / (n_side + 1) as f64;
    let b_eig = |j: usize| h * (2.0 - 2.0 * (j as f64 * theta).cos());
    // 1 − cos x = 2 sin²(x/2) avoids cancellation for the smallest one.
    let b_min = 4.0 * h * (theta / 2.0).sin().powi(2);
    SpectralInterval::new(2.0 * b_min, 2.0 * b_eig(n_side))
}

/// Samples `f(x, y) = (2/π) exp(−2(x−½)²) exp(−2(y−½)²)` on the interior grid
/// `x_i = i/(n_side+1)`, in the ordering of [`kron_sum_laplacian`].
pub fn gaussian_rhs(n_side: usize) -> Result<Vec<f64>> {
    if n_side == 0 {
        return Err(Error::input("n_side must be at least 1"));
    }
    let step = 1.0 / (n_side + 1) as f64;
    let g = |t: f64| (-2.0 * (t - 0.5) * (t - 0.5)).exp();
    let mut c = Vec::with_capacity(n_side * n_side);
    for j in 1..=n_side {
        let gy = g(j as f64 * step);
        for i in 1..=n_side {
            c.push(2.0 / PI * g(i as f64 * step) * gy);
        }
    }
    Ok(c)
}
