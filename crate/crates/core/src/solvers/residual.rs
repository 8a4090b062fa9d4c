use nalgebra::{DMatrix, DVector};

use super::{small_coordinates_norm, LowRankSolution};
use crate::dense::DenseSym;
use crate::error::{Error, Result};
use crate::operators::SymmetricOperator;

/// `β · ‖ℓᵀ Ũ Y‖₂`, where `ℓ` holds the coordinates of the last Lanczos
/// vector of the cycle and `β` its coupling to the next one.
pub fn residual_estimate(last_row: &DVector<f64>, u_tilde: &DMatrix<f64>, y: &DenseSym, beta: f64) -> f64 {
    if beta == 0.0 {
        return 0.0;
    }
    let row = last_row.transpose() * u_tilde * y.as_matrix();
    beta.abs() * row.norm()
}

/// Upper bound on the true residual norm from the estimate and the
/// rational approximation error: `√(2·est² + 2·(κ·raterr·‖c‖²)²)`.
pub fn residual_bound(estimate: f64, condition: f64, raterr: f64, c_norm2: f64) -> f64 {
    let approx = condition * raterr * c_norm2;
    (2.0 * estimate * estimate + 2.0 * approx * approx).sqrt()
}

/// `‖A Z Y Zᵀ + Z Y Zᵀ A − c cᵀ‖_F`, evaluated on the span of `[Z, A Z, c]`.
/// Applies the operator once per column of `Z`.
pub fn true_residual_fro(op: &SymmetricOperator, sol: &LowRankSolution, c: &[f64]) -> Result<f64> {
    let n = op.dimension();
    if sol.dimension() != n || c.len() != n {
        return Err(Error::Dimension {
            expected: n,
            actual: if sol.dimension() != n { sol.dimension() } else { c.len() },
        });
    }
    let r = sol.rank();
    let mut g = DMatrix::zeros(n, 2 * r + 1);
    g.columns_mut(0, r).copy_from(sol.z());
    let mut az = vec![0.0; n];
    for j in 0..r {
        op.apply_into(sol.z().column(j).as_slice(), &mut az)?;
        g.column_mut(r + j).copy_from_slice(&az);
    }
    g.column_mut(2 * r).copy_from_slice(c);
    let mut middle = DMatrix::zeros(2 * r + 1, 2 * r + 1);
    middle.view_mut((0, r), (r, r)).copy_from(sol.y().as_matrix());
    middle.view_mut((r, 0), (r, r)).copy_from(sol.y().as_matrix());
    middle[(2 * r, 2 * r)] = -1.0;
    Ok(small_coordinates_norm(&g, &middle))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::orthonormalize;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spd(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        let b = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        &b * b.transpose() + DMatrix::identity(n, n) * (n as f64 * 0.1)
    }

    #[test]
    fn zero_solution_leaves_rhs() {
        let a = SymmetricOperator::dense(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 3.0])));
        let sol = LowRankSolution::new(DMatrix::zeros(3, 0), DenseSym::zeros(0), 14.0).unwrap();
        let c = [1.0, 2.0, 3.0];
        assert!((true_residual_fro(&a, &sol, &c).unwrap() - 14.0).abs() < 1e-13);
    }

    #[test]
    fn exact_diagonal_solution() {
        let a = SymmetricOperator::dense(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0])));
        let z = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        let sol = LowRankSolution::new(z, DenseSym::new(DMatrix::from_element(1, 1, 0.5)).unwrap(), 1.0).unwrap();
        assert!(true_residual_fro(&a, &sol, &[1.0, 0.0]).unwrap() < 1e-14);
    }

    #[test]
    fn matches_dense_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        let n = 50;
        let a = spd(n, &mut rng);
        let z = orthonormalize(&DMatrix::from_fn(n, 4, |_, _| rng.random_range(-1.0..1.0)), None).q;
        let y = DenseSym::new({
            let b = DMatrix::from_fn(4, 4, |_, _| rng.random_range(-1.0..1.0));
            &b * b.transpose()
        })
        .unwrap();
        let c: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let cv = DVector::from_column_slice(&c);
        let sol = LowRankSolution::new(z, y, cv.norm_squared()).unwrap();
        let x = sol.to_dense();
        let dense = (&a * &x + &x * &a - &cv * cv.transpose()).norm();
        let op = SymmetricOperator::dense(a);
        let got = true_residual_fro(&op, &sol, &c).unwrap();
        assert!((got - dense).abs() < 1e-12 * dense);
        assert_eq!(op.matvec_count(), 4);
    }

    #[test]
    fn estimate_and_bound_formulas() {
        let y = DenseSym::new(DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0])).unwrap();
        let u = DMatrix::identity(2, 2);
        let last = DVector::from_vec(vec![0.0, 1.0]);
        assert!((residual_estimate(&last, &u, &y, 0.5) - 0.5 * 10f64.sqrt()).abs() < 1e-15);
        assert_eq!(residual_estimate(&last, &u, &y, 0.0), 0.0);
        assert!((residual_bound(3.0, 2.0, 1.0, 2.0) - (18.0f64 + 32.0).sqrt()).abs() < 1e-14);
    }
}
