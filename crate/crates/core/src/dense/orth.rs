use nalgebra::{DMatrix, DVector};

/// Result of [`orthonormalize`].
#[derive(Debug, Clone)]
pub struct Orthonormalized {
    /// New orthonormal columns, orthogonal to `against`.
    pub q: DMatrix<f64>,
    /// `block ≈ [against, q] · coeffs`; shape `(against.ncols() + q.ncols()) × block.ncols()`.
    pub coeffs: DMatrix<f64>,
    /// Indices of block columns dropped as numerically dependent.
    pub dropped: Vec<usize>,
}

const DROP_TOL: f64 = 1e-12;

/// Block Gram–Schmidt with one unconditional reorthogonalization pass and a
/// third pass when the second still loses more than a factor `1/√2`.
///
/// A column whose projected norm falls to `1e-12` of its original norm is dropped.
pub fn orthonormalize(block: &DMatrix<f64>, against: Option<&DMatrix<f64>>) -> Orthonormalized {
    let n = block.nrows();
    let fixed = against.map_or(0, |a| a.ncols());
    if let Some(a) = against {
        assert_eq!(a.nrows(), n, "basis and block row counts differ");
    }
    let p = block.ncols();
    let mut accepted: Vec<DVector<f64>> = Vec::with_capacity(p);
    let mut coeffs = DMatrix::zeros(fixed + p, p);
    let mut dropped = Vec::new();

    for j in 0..p {
        let mut v: DVector<f64> = block.column(j).into_owned();
        let original = v.norm();
        let mut h = DVector::zeros(fixed + accepted.len());
        let mut previous = original;
        let mut norm = original;
        for pass in 0..3 {
            if pass == 2 && norm >= std::f64::consts::FRAC_1_SQRT_2 * previous {
                break;
            }
            let step = project_out(&mut v, against, &accepted);
            h += step;
            previous = norm;
            norm = v.norm();
        }
        for (i, value) in h.iter().enumerate() {
            coeffs[(i, j)] = *value;
        }
        if original == 0.0 || norm <= DROP_TOL * original {
            dropped.push(j);
            continue;
        }
        coeffs[(fixed + accepted.len(), j)] = norm;
        v /= norm;
        accepted.push(v);
    }

    let width = accepted.len();
    let q = if width == 0 {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&accepted)
    };
    // Rows belonging to dropped columns never received entries; trim them.
    let coeffs = coeffs.rows(0, fixed + width).into_owned();
    Orthonormalized { q, coeffs, dropped }
}

fn project_out(
    v: &mut DVector<f64>,
    against: Option<&DMatrix<f64>>,
    accepted: &[DVector<f64>],
) -> DVector<f64> {
    let fixed = against.map_or(0, |a| a.ncols());
    let mut h = DVector::zeros(fixed + accepted.len());
    // Classical Gram–Schmidt: all coefficients from the same vector.
    if let Some(a) = against {
        let ha = a.tr_mul(v);
        for (i, value) in ha.iter().enumerate() {
            h[i] = *value;
        }
    }
    for (i, q) in accepted.iter().enumerate() {
        h[fixed + i] = q.dot(v);
    }
    if let Some(a) = against {
        v.gemv(-1.0, a, &h.rows(0, fixed).into_owned(), 1.0);
    }
    for (i, q) in accepted.iter().enumerate() {
        v.axpy(-h[fixed + i], q, 1.0);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
        DMatrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn single_column_is_normalized() {
        let block = DMatrix::from_column_slice(3, 1, &[2.0, 0.0, 0.0]);
        let out = orthonormalize(&block, None);
        assert_eq!(out.q.column(0).as_slice(), &[1.0, 0.0, 0.0]);
        assert_eq!(out.coeffs[(0, 0)], 2.0);
        assert!(out.dropped.is_empty());
    }

    #[test]
    fn dependent_column_is_dropped() {
        let block = DMatrix::from_column_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let out = orthonormalize(&block, None);
        assert_eq!(out.q.ncols(), 1);
        assert_eq!(out.dropped, vec![1]);
        assert!((&out.q * &out.coeffs - &block).norm() < 1e-15);
    }

    #[test]
    fn random_block_against_basis() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let basis = orthonormalize(&random(&mut rng, 50, 4), None).q;
        let block = random(&mut rng, 50, 3);
        let out = orthonormalize(&block, Some(&basis));
        assert_eq!(out.q.ncols(), 3);
        let gram = out.q.transpose() * &out.q - DMatrix::identity(3, 3);
        assert!(gram.norm() < 1e-12);
        assert!((basis.transpose() * &out.q).norm() < 1e-12);
        let mut full = DMatrix::zeros(50, 7);
        full.columns_mut(0, 4).copy_from(&basis);
        full.columns_mut(4, 3).copy_from(&out.q);
        assert!((full * &out.coeffs - &block).norm() < 1e-12 * block.norm());
    }

    #[test]
    fn idempotent_on_orthonormal_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let q = orthonormalize(&random(&mut rng, 40, 6), None).q;
        let again = orthonormalize(&q, None).q;
        for j in 0..6 {
            assert!((q.column(j) - again.column(j)).norm() <= 1e-13);
        }
    }
}
