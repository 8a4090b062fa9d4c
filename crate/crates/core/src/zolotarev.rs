//! Optimal real poles for rational approximation on `[a, b] ∪ [−b, −a]`,
//! the squared rational error functional, and its exponential bound.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Default number of Chebyshev sample points for [`raterr`].
pub const DEFAULT_GRID_POINTS: usize = 4096;

/// Complete elliptic integral `K(m)` plus Jacobi `sn`, `cn`, `dn` for the
/// parameter `m = k²` (so `K(0) = π/2`).
///
/// Stores the complementary parameter `m₁ = 1 − m` as well; when `m` is close
/// to 1, construct through [`EllipticKernel::from_complement`] so that `m₁`
/// never suffers cancellation.
#[derive(Debug, Clone, Copy)]
pub struct EllipticKernel {
    m: f64,
    m1: f64,
    k: f64,
}

impl EllipticKernel {
    pub fn new(m: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&m) {
            return Err(Error::input(format!("elliptic parameter m = {m} outside [0, 1)")));
        }
        Self::build(m, 1.0 - m)
    }

    /// Builds from `m₁ = 1 − m`, with `0 < m₁ ≤ 1`.
    pub fn from_complement(m1: f64) -> Result<Self> {
        if !(m1 > 0.0 && m1 <= 1.0) {
            return Err(Error::input(format!(
                "complementary parameter m1 = {m1} outside (0, 1]"
            )));
        }
        Self::build(1.0 - m1, m1)
    }

    fn build(m: f64, m1: f64) -> Result<Self> {
        let k = PI / (2.0 * agm(1.0, m1.sqrt()));
        Ok(Self { m, m1, k })
    }

    pub fn parameter(&self) -> f64 {
        self.m
    }

    pub fn complement(&self) -> f64 {
        self.m1
    }

    /// Quarter period `K(m)`.
    pub fn quarter_period(&self) -> f64 {
        self.k
    }

    /// `(sn, cn, dn)` at `u` by the Bulirsch AGM recurrence in the
    /// complementary parameter, accurate also for `m` close to 1.
    pub fn sncndn(&self, u: f64) -> (f64, f64, f64) {
        if self.m == 0.0 {
            return (u.sin(), u.cos(), 1.0);
        }
        let mut means = Vec::with_capacity(16);
        let mut roots = Vec::with_capacity(16);
        let mut a = 1.0;
        let mut emc = self.m1;
        let mut c;
        loop {
            means.push(a);
            emc = emc.sqrt();
            roots.push(emc);
            c = 0.5 * (a + emc);
            if (a - emc).abs() <= 1e-15 * a || means.len() == 64 {
                break;
            }
            emc *= a;
            a = c;
        }
        let v = u * c;
        let (sn, cn) = v.sin_cos();
        if sn == 0.0 {
            return (sn, cn, 1.0);
        }
        let mut ratio = cn / sn;
        let mut c = c * ratio;
        let mut dn = 1.0;
        for (&mean, &root) in means.iter().zip(&roots).rev() {
            ratio *= c;
            c *= dn;
            dn = (root + ratio) / (mean + ratio);
            ratio = c / mean;
        }
        let s = (c * c + 1.0).sqrt().recip().copysign(sn);
        (s, c * s, dn)
    }

    pub fn dn(&self, u: f64) -> f64 {
        self.sncndn(u).2
    }
}

fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        if (a - b).abs() <= f64::EPSILON * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    0.5 * (a + b)
}

/// `k` real negative poles together with the interval `[a, b]` they target.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleSet {
    poles: Vec<f64>,
    a: f64,
    b: f64,
}

impl PoleSet {
    /// User-supplied poles; each must lie outside `[a, b]`. Sorted ascending.
    pub fn new(mut poles: Vec<f64>, a: f64, b: f64) -> Result<Self> {
        check_interval(a, b)?;
        if poles.is_empty() {
            return Err(Error::input("pole set must be non-empty"));
        }
        if let Some(p) = poles.iter().find(|p| !p.is_finite() || (a..=b).contains(*p)) {
            return Err(Error::input(format!("pole {p} lies in [{a}, {b}]")));
        }
        poles.sort_by(f64::total_cmp);
        Ok(Self { poles, a, b })
    }

    pub fn poles(&self) -> &[f64] {
        &self.poles
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn len(&self) -> usize {
        self.poles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0) || !(b >= a) || !b.is_finite() {
        return Err(Error::input(format!("need 0 < a <= b, got a = {a}, b = {b}")));
    }
    Ok(())
}

/// Optimal poles `−b·dn((2j−1)K/(2k), 1 − (a/b)²)`, `j = 1..k`.
pub fn zolotarev_poles(k: usize, a: f64, b: f64) -> Result<PoleSet> {
    check_interval(a, b)?;
    if k == 0 {
        return Err(Error::input("pole count must be at least 1"));
    }
    let ratio = a / b;
    let kernel = EllipticKernel::from_complement(ratio * ratio)?;
    let quarter = kernel.quarter_period();
    let poles = (1..=k)
        .map(|j| -b * kernel.dn((2 * j - 1) as f64 * quarter / (2 * k) as f64))
        .collect();
    let mut set = PoleSet::new(poles, a, b)?;
    for p in &mut set.poles {
        *p = p.clamp(-b, -a);
    }
    Ok(set)
}

fn log_rational(poles: &[f64], z: f64) -> f64 {
    poles
        .iter()
        .map(|&p| 2.0 * ((z + p) / (z - p)).abs().ln())
        .sum()
}

/// `max_{z∈[a,b]} ∏ ((z + ξᵢ)/(z − ξᵢ))²` sampled on `grid_points` Chebyshev
/// points of `[a, b]` (endpoints included), refined by golden-section search
/// around every sampled local maximum.
pub fn raterr(poles: &[f64], a: f64, b: f64, grid_points: usize) -> Result<f64> {
    check_interval(a, b)?;
    if let Some(p) = poles.iter().find(|p| (a..=b).contains(*p)) {
        return Err(Error::input(format!("pole {p} lies in [{a}, {b}]")));
    }
    if poles.iter().any(|p| a == b && *p == -a) {
        return Ok(0.0);
    }
    let n = grid_points.max(2);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let nodes: Vec<f64> = (0..n)
        .map(|j| (mid - half * (PI * j as f64 / (n - 1) as f64).cos()).clamp(a, b))
        .collect();
    let vals: Vec<f64> = nodes.iter().map(|&z| log_rational(poles, z)).collect();
    let mut best = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for j in 1..n - 1 {
        if vals[j] >= vals[j - 1] && vals[j] >= vals[j + 1] {
            best = best.max(golden_max(|z| log_rational(poles, z), nodes[j - 1], nodes[j + 1]));
        }
    }
    Ok(best.exp())
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..60 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    f1.max(f2)
}

/// `4·ρ^{−2k}` with `ρ = exp(π² / (2 ln(4b/a)))`.
pub fn zolotarev_bound(k: usize, a: f64, b: f64) -> f64 {
    let log_rho = PI * PI / (2.0 * (4.0 * b / a).ln());
    4.0 * (-2.0 * k as f64 * log_rho).exp()
}

/// Smallest `k ≥ 1` with `(b/a)·zolotarev_bound(k, a, b) ≤ tol/2`.
pub fn choose_pole_count(tol: f64, a: f64, b: f64) -> Result<usize> {
    check_interval(a, b)?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::input(format!("tolerance {tol} must be positive")));
    }
    let mut k = 1;
    while (b / a) * zolotarev_bound(k, a, b) > 0.5 * tol {
        k += 1;
    }
    Ok(k)
}
