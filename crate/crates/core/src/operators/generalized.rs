//! The operator `−L⁻¹ M L⁻ᵀ` of a generalized Lyapunov equation with
//! `E = L Lᵀ`, applied through a sparse Cholesky factor of `E`.

use std::collections::VecDeque;

use super::{MatVec, SparseCsr};
use crate::error::{Error, Result};

/// Symmetric fill-reducing ordering applied before factorization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Ordering {
    Natural,
    #[default]
    ReverseCuthillMcKee,
}

/// Reverse Cuthill–McKee permutation (`perm[new] = old`) of a structurally
/// symmetric pattern. Each connected component starts from a minimum-degree node.
pub fn reverse_cuthill_mckee(a: &SparseCsr) -> Vec<usize> {
    let n = a.dimension();
    let degree: Vec<usize> = (0..n).map(|i| a.row(i).0.len()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&i| (degree[i], i));
    let mut queue = VecDeque::new();
    let mut neighbours = Vec::new();
    for &start in &by_degree {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            neighbours.clear();
            neighbours.extend(a.row(v).0.iter().copied().filter(|&u| !visited[u]));
            neighbours.sort_by_key(|&u| (degree[u], u));
            for &u in &neighbours {
                visited[u] = true;
                queue.push_back(u);
            }
        }
    }
    order.reverse();
    order
}

/// Envelope (profile) Cholesky factor `A = L Lᵀ`; row `i` of `L` is stored
/// densely from its first structural nonzero to the diagonal.
#[derive(Debug, Clone)]
pub struct EnvelopeCholesky {
    n: usize,
    first: Vec<usize>,
    offsets: Vec<usize>,
    values: Vec<f64>,
}

impl EnvelopeCholesky {
    pub fn factor(a: &SparseCsr) -> Result<Self> {
        let n = a.dimension();
        let mut first = vec![0usize; n];
        for (i, f) in first.iter_mut().enumerate() {
            let (cols, _) = a.row(i);
            *f = cols.first().copied().unwrap_or(i).min(i);
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for i in 0..n {
            offsets.push(offsets[i] + (i - first[i] + 1));
        }
        let mut values = vec![0.0; offsets[n]];
        for i in 0..n {
            let (cols, vals) = a.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                if j <= i {
                    values[offsets[i] + j - first[i]] = v;
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            for j in fi..i {
                let fj = first[j];
                let lo = fi.max(fj);
                let mut s = values[offsets[i] + j - fi];
                for k in lo..j {
                    s -= values[offsets[i] + k - fi] * values[offsets[j] + k - fj];
                }
                values[offsets[i] + j - fi] = s / values[offsets[j + 1] - 1];
            }
            let row = &values[offsets[i]..offsets[i + 1] - 1];
            let d = values[offsets[i + 1] - 1] - row.iter().map(|v| v * v).sum::<f64>();
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::Factorization(format!(
                    "non-positive pivot {d:e} at row {i}; matrix is not positive definite"
                )));
            }
            values[offsets[i + 1] - 1] = d.sqrt();
        }
        Ok(Self {
            n,
            first,
            offsets,
            values,
        })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    /// Stored entries (envelope size).
    pub fn envelope_len(&self) -> usize {
        self.values.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if j > i || j < self.first[i] {
            0.0
        } else {
            self.values[self.offsets[i] + j - self.first[i]]
        }
    }

    /// In place `x ← L⁻¹ x`.
    pub fn solve_lower(&self, x: &mut [f64]) {
        for i in 0..self.n {
            let fi = self.first[i];
            let row = &self.values[self.offsets[i]..self.offsets[i + 1]];
            let (off, diag) = row.split_at(row.len() - 1);
            let s: f64 = off.iter().zip(&x[fi..i]).map(|(l, v)| l * v).sum();
            x[i] = (x[i] - s) / diag[0];
        }
    }

    /// In place `x ← L⁻ᵀ x`.
    pub fn solve_upper(&self, x: &mut [f64]) {
        for i in (0..self.n).rev() {
            let fi = self.first[i];
            let row = &self.values[self.offsets[i]..self.offsets[i + 1]];
            let (off, diag) = row.split_at(row.len() - 1);
            x[i] /= diag[0];
            let xi = x[i];
            for (xk, l) in x[fi..i].iter_mut().zip(off) {
                *xk -= l * xi;
            }
        }
    }
}

/// `v ↦ −L⁻¹ M L⁻ᵀ v` with `E = L Lᵀ`.
///
/// With a permutation `P` the factor is `L = Pᵀ L_p` where `P E Pᵀ = L_p L_pᵀ`,
/// which is a valid (not triangular) factor of `E`; operator and transformed
/// right-hand side are both expressed with this `L`.
#[derive(Debug, Clone)]
pub struct GeneralizedOperator {
    m: SparseCsr,
    factor: EnvelopeCholesky,
    perm: Vec<usize>,
}

impl GeneralizedOperator {
    pub fn new(m: SparseCsr, e: &SparseCsr, ordering: Ordering) -> Result<Self> {
        let n = m.dimension();
        if e.dimension() != n {
            return Err(Error::Dimension {
                expected: n,
                actual: e.dimension(),
            });
        }
        if !e.is_structurally_symmetric() || !m.is_structurally_symmetric() {
            return Err(Error::input("M and E must have symmetric sparsity patterns"));
        }
        let perm = match ordering {
            Ordering::Natural => (0..n).collect(),
            Ordering::ReverseCuthillMcKee => reverse_cuthill_mckee(e),
        };
        let factor = EnvelopeCholesky::factor(&e.permuted(&perm))?;
        Ok(Self { m, factor, perm })
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn factor(&self) -> &EnvelopeCholesky {
        &self.factor
    }

    /// The matrix `M` (the mass matrix `E` is only kept in factored form).
    pub fn matrix(&self) -> &SparseCsr {
        &self.m
    }

    /// Right-hand side `−L⁻¹ b` of the transformed equation.
    pub fn transform_rhs(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.m.dimension();
        if b.len() != n {
            return Err(Error::Dimension {
                expected: n,
                actual: b.len(),
            });
        }
        let mut x: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        self.factor.solve_lower(&mut x);
        x.iter_mut().for_each(|v| *v = -*v);
        Ok(x)
    }
}

impl MatVec for GeneralizedOperator {
    fn dim(&self) -> usize {
        self.m.dimension()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        let n = self.dim();
        let mut t = x.to_vec();
        self.factor.solve_upper(&mut t);
        let mut z = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            z[old] = t[new];
        }
        self.m.apply_into(&z, &mut t);
        for (new, &old) in self.perm.iter().enumerate() {
            y[new] = t[old];
        }
        self.factor.solve_lower(y);
        y.iter_mut().for_each(|v| *v = -*v);
    }
}
