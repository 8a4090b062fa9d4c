#![allow(dead_code)]

use lyapcomp::dense::TridiagonalMatrix;
use lyapcomp::operators::{
    gaussian_rhs, kron_sum_laplacian, laplacian_extreme_eigenvalues, normalize_problem, SparseCsr, SpectralInterval,
    SymmetricOperator,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random SPD matrix with eigenvalues spread over `[1, cond]`.
pub fn random_spd(n: usize, cond: f64, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    let q = g.qr().q();
    let eig = DVector::from_fn(n, |i, _| {
        if n == 1 {
            1.0
        } else {
            cond.powf(i as f64 / (n - 1) as f64)
        }
    });
    let a = &q * DMatrix::from_diagonal(&eig) * q.transpose();
    (&a + a.transpose()) * 0.5
}

pub fn random_vector(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Solves `(A ⊗ I + I ⊗ A) vec(X) = vec(c cᵀ)` directly.
pub fn kronecker_solution(a: &DMatrix<f64>, c: &[f64]) -> DMatrix<f64> {
    let n = a.nrows();
    let eye = DMatrix::<f64>::identity(n, n);
    let k = a.kronecker(&eye) + eye.kronecker(a);
    let cv = DVector::from_column_slice(c);
    let rhs = DVector::from_column_slice((&cv * cv.transpose()).as_slice());
    let x = k.cholesky().expect("Kronecker sum of an SPD matrix is SPD").solve(&rhs);
    DMatrix::from_column_slice(n, n, x.as_slice())
}

pub fn dense_extremes(a: &DMatrix<f64>) -> SpectralInterval {
    let e = a.clone().symmetric_eigen().eigenvalues;
    SpectralInterval::new(e.min(), e.max()).unwrap()
}

/// Normalized 2D Laplacian problem with Gaussian right-hand side and its
/// exact (scaled) spectral interval.
pub fn lap4d(n_side: usize) -> (SymmetricOperator, Vec<f64>, SpectralInterval) {
    laplacian_problem(n_side, &gaussian_rhs(n_side).unwrap())
}

/// Same operator with a random right-hand side, which needs many more
/// Lanczos steps than the smooth Gaussian one.
pub fn rough_laplacian(n_side: usize, seed: u64) -> (SymmetricOperator, Vec<f64>, SpectralInterval) {
    laplacian_problem(n_side, &random_vector(n_side * n_side, &mut rng(seed)))
}

fn laplacian_problem(n_side: usize, c: &[f64]) -> (SymmetricOperator, Vec<f64>, SpectralInterval) {
    let op = SymmetricOperator::new(kron_sum_laplacian(n_side).unwrap())
        .with_spectral_hint(laplacian_extreme_eigenvalues(n_side).unwrap());
    let (op, c) = normalize_problem(&op, c).unwrap();
    let hint = op.spectral_hint().unwrap();
    (op, c, hint)
}

/// `tridiag(−1, 2, −1) + shift·I` of order `n`, with its exact spectrum.
pub fn shifted_path_laplacian(n: usize, shift: f64) -> (SymmetricOperator, SpectralInterval) {
    let mut t = Vec::new();
    for i in 0..n {
        if i > 0 {
            t.push((i, i - 1, -1.0));
        }
        t.push((i, i, 2.0 + shift));
        if i + 1 < n {
            t.push((i, i + 1, -1.0));
        }
    }
    let theta = std::f64::consts::PI / (n + 1) as f64;
    let lo = 4.0 * (theta / 2.0).sin().powi(2) + shift;
    let hi = 2.0 - 2.0 * (n as f64 * theta).cos() + shift;
    let op = SymmetricOperator::new(SparseCsr::from_triplets(n, &t).unwrap());
    (op, SpectralInterval::new(lo, hi).unwrap())
}

/// Tridiagonal built from Lanczos coefficients of the first `steps` steps.
pub fn leading_tridiagonal(alphas: &[f64], betas: &[f64], steps: usize) -> TridiagonalMatrix {
    TridiagonalMatrix::new(alphas[..steps].to_vec(), betas[..steps - 1].to_vec()).unwrap()
}

pub fn unit_columns(n: usize, rows: &[usize]) -> DMatrix<f64> {
    let mut e = DMatrix::zeros(n, rows.len());
    for (j, &i) in rows.iter().enumerate() {
        e[(i, j)] = 1.0;
    }
    e
}
