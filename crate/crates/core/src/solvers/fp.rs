//! Constants of the finite-precision error bounds for Lanczos and for
//! Lanczos with compression.

/// Unit roundoff of `f64`.
pub const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FpBoundInputs {
    /// Problem dimension `N`.
    pub n: usize,
    /// Lanczos steps `M`.
    pub steps: usize,
    /// Maximum number of nonzeros in a row of `A`.
    pub max_row_nnz: usize,
    /// Estimate of `‖|A|‖₂ / ‖A‖₂`.
    pub norm_ratio: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// `‖A‖₂`.
    pub norm_a: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FpBoundConstants {
    pub eps: f64,
    pub eps0: f64,
    pub eps1: f64,
    pub eps2: f64,
    /// `M^{5/2} ε₂ ‖A‖₂`: how far the computed Ritz values may leave the spectrum.
    pub spectral_slack: f64,
    /// Upper bound on the condition number of the `(M+1)`-step tridiagonal.
    pub kappa: f64,
    /// Upper bound on the condition number of the shifted tridiagonal.
    pub kappa_tilde: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// `λmin > (M+1)^{5/2} ε₂ ‖A‖₂`. The bounds are meaningless when false
    /// and the dependent constants are then infinite.
    pub assumption_holds: bool,
}

impl FpBoundConstants {
    /// `(λmin − slack, λmax + slack)`, the interval on which the rational
    /// approximation error enters the compressed bound.
    pub fn widened_interval(&self, lambda_min: f64, lambda_max: f64) -> (f64, f64) {
        (lambda_min - self.spectral_slack, lambda_max + self.spectral_slack)
    }

    /// `C₁ ((√κ̃ − 1)/(√κ̃ + 1))^M + C₂ ε₁`, the scaled residual bound of plain
    /// finite-precision Lanczos.
    pub fn lanczos_residual_bound(&self, steps: usize) -> f64 {
        let root = self.kappa_tilde.sqrt();
        self.c1 * ((root - 1.0) / (root + 1.0)).powi(steps as i32) + self.c2 * self.eps1
    }
}

fn positive_ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        f64::INFINITY
    }
}

pub fn fp_bound_constants(input: &FpBoundInputs) -> FpBoundConstants {
    let eps = UNIT_ROUNDOFF;
    let m = input.steps as f64;
    let eps0 = 2.0 * (input.n as f64 + 4.0) * eps;
    let eps1 = 2.0 * (7.0 + input.max_row_nnz as f64 * input.norm_ratio) * eps;
    let eps2 = std::f64::consts::SQRT_2 * (6.0 * eps0).max(eps1);
    let spectral_slack = m.powf(2.5) * eps2 * input.norm_a;
    let slack_next = (m + 1.0).powf(2.5) * eps2 * input.norm_a;
    let (lo, hi) = (input.lambda_min, input.lambda_max);
    let assumption_holds = lo > slack_next;
    let kappa = positive_ratio(hi + slack_next, lo - slack_next);
    let kappa_tilde = positive_ratio(hi + lo, 2.0 * lo - 2.0 * slack_next);
    let c1 = (1.0 + 2.0 * eps0) * (m + 1.0) * (4.0 + 4.0 * (2.0 * kappa).sqrt());
    let c2 = positive_ratio((1.0 + 2.0 * eps0).sqrt() * m * hi, lo - spectral_slack);
    let c3 = positive_ratio(2.0 * (1.0 + 2.0 * eps0) * m * hi, lo - spectral_slack);
    FpBoundConstants {
        eps,
        eps0,
        eps1,
        eps2,
        spectral_slack,
        kappa,
        kappa_tilde,
        c1,
        c2,
        c3,
        assumption_holds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inputs() -> FpBoundInputs {
        FpBoundInputs {
            n: 100,
            steps: 100,
            max_row_nnz: 5,
            norm_ratio: 1.0,
            lambda_min: 1.0,
            lambda_max: 8.0,
            norm_a: 8.0,
        }
    }

    #[test]
    fn epsilon_spot_values() {
        let u = 2f64.powi(-53);
        let f = fp_bound_constants(&inputs());
        assert_eq!(f.eps, u);
        assert_eq!(f.eps0, 208.0 * u);
        assert_eq!(f.eps1, 24.0 * u);
        assert_eq!(f.eps2, 2f64.sqrt() * 1248.0 * u);
        let f = fp_bound_constants(&FpBoundInputs { max_row_nnz: 0, ..inputs() });
        assert_eq!(f.eps1, 14.0 * u);
        assert!(f.assumption_holds);
    }

    #[test]
    fn assumption_flag_on_tiny_lambda_min() {
        let f = fp_bound_constants(&FpBoundInputs {
            lambda_min: 1e-16,
            norm_a: 1.0,
            lambda_max: 1.0,
            ..inputs()
        });
        assert!(!f.assumption_holds);
        assert!(f.kappa.is_infinite() && f.c2.is_infinite());
    }
}
