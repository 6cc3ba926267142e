//! Extreme eigenpairs of the adjacency matrix by Lanczos iteration.
//!
//! Full reorthogonalization (two Gram-Schmidt passes per step) keeps the
//! basis orthonormal, so repeated eigenvalues show up once the Krylov space
//! breaks down and the iteration restarts from a fresh random direction.
//! Graphs up to [`FULL_BASIS_LIMIT`] nodes are always run to a complete basis,
//! which makes the result exact up to rounding.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::seeded;

pub const FULL_BASIS_LIMIT: usize = 400;

const START_SEED: u64 = 0x5EED_1A2C;
const RESIDUAL_TOL: f64 = 1e-9;

/// Eigenvalues of largest magnitude, largest first, plus optionally the unit
/// eigenvector of the largest algebraic eigenvalue.
#[derive(Clone, Debug)]
pub struct Extremes {
    pub values: Vec<f64>,
    pub principal: Option<Vec<f64>>,
    pub steps: usize,
    pub residual: f64,
}

fn matvec(g: &Graph, x: &[f64], y: &mut [f64]) {
    let fill = |(v, out): (usize, &mut f64)| {
        *out = g.neighbors(v).iter().map(|&w| x[w]).sum();
    };
    if g.node_count() >= 20_000 {
        y.par_iter_mut().enumerate().for_each(fill);
    } else {
        y.iter_mut().enumerate().for_each(fill);
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Two passes of classical Gram-Schmidt against every basis vector.
fn orthogonalize(basis: &[Vec<f64>], w: &mut [f64]) {
    for _ in 0..2 {
        let coeffs: Vec<f64> = if basis.len() * w.len() >= 1 << 16 {
            basis.par_iter().map(|q| dot(q, w)).collect()
        } else {
            basis.iter().map(|q| dot(q, w)).collect()
        };
        for (q, c) in basis.iter().zip(coeffs) {
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= c * qi;
            }
        }
    }
}

/// Random unit vector orthogonal to `basis`, or `None` if the basis is complete.
fn fresh_direction(basis: &[Vec<f64>], n: usize, rng: &mut impl Rng) -> Option<Vec<f64>> {
    for _ in 0..3 {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        orthogonalize(basis, &mut v);
        let nv = norm(&v);
        if nv > 1e-8 {
            v.iter_mut().for_each(|x| *x /= nv);
            return Some(v);
        }
    }
    None
}

struct Ritz {
    /// Indices into the eigen-decomposition, by descending magnitude.
    order: Vec<usize>,
    eigen: SymmetricEigen<f64, nalgebra::Dyn>,
}

fn ritz(alpha: &[f64], beta: &[f64]) -> Ritz {
    let m = alpha.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eigen = SymmetricEigen::new(t);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        eigen.eigenvalues[b]
            .abs()
            .total_cmp(&eigen.eigenvalues[a].abs())
            .then(eigen.eigenvalues[b].total_cmp(&eigen.eigenvalues[a]))
    });
    Ritz { order, eigen }
}

/// Top `k` eigenvalues of the adjacency matrix by magnitude.
pub fn extreme_eigenpairs(g: &Graph, k: usize, want_vector: bool) -> Result<Extremes> {
    let n = g.node_count();
    let k = k.min(n);
    if n == 0 || k == 0 {
        return Ok(Extremes {
            values: Vec::new(),
            principal: want_vector.then(Vec::new),
            steps: 0,
            residual: 0.0,
        });
    }
    let scale = g.degrees().max().unwrap_or(0).max(1) as f64;
    let breakdown = 1e-10 * scale;
    let mut rng = seeded(START_SEED);

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut q = fresh_direction(&basis, n, &mut rng).expect("nonempty space");
    let mut w = vec![0.0; n];
    let mut checkpoint = if n <= FULL_BASIS_LIMIT {
        n
    } else {
        (3 * k + 50).min(n)
    };

    loop {
        matvec(g, &q, &mut w);
        let a = dot(&q, &w);
        basis.push(std::mem::take(&mut q));
        orthogonalize(&basis, &mut w);
        alpha.push(a);
        let b = norm(&w);
        let complete = basis.len() == n;
        let mut restarted = false;
        if !complete {
            if b > breakdown {
                q = w.iter().map(|x| x / b).collect();
                beta.push(b);
            } else if let Some(v) = fresh_direction(&basis, n, &mut rng) {
                q = v;
                beta.push(0.0);
                restarted = true;
            }
        }
        let exhausted = q.is_empty();
        let m = basis.len();
        // Right after a restart the basis spans an invariant subspace and
        // every residual is zero, so convergence cannot be judged yet.
        if (m < checkpoint || restarted) && !exhausted {
            continue;
        }

        let r = ritz(&alpha, &beta);
        let tail = if exhausted { 0.0 } else { b };
        let top = &r.order[..k.min(m)];
        let principal_idx = (0..m)
            .max_by(|&x, &y| r.eigen.eigenvalues[x].total_cmp(&r.eigen.eigenvalues[y]))
            .unwrap();
        let residual_of = |i: usize| tail * r.eigen.eigenvectors[(m - 1, i)].abs();
        let mut residual = top.iter().map(|&i| residual_of(i)).fold(0.0, f64::max);
        if want_vector {
            residual = residual.max(residual_of(principal_idx));
        }
        let converged = residual <= RESIDUAL_TOL * scale && top.len() == k;
        if converged || exhausted {
            if !converged {
                return Err(Error::Convergence { residual });
            }
            let values = top.iter().map(|&i| r.eigen.eigenvalues[i]).collect();
            let principal = want_vector.then(|| {
                let y = r.eigen.eigenvectors.column(principal_idx);
                let mut x = vec![0.0; n];
                for (j, qj) in basis.iter().enumerate() {
                    let c = y[j];
                    for (xi, qi) in x.iter_mut().zip(qj) {
                        *xi += c * qi;
                    }
                }
                let nx = norm(&x);
                x.iter_mut().for_each(|v| *v /= nx);
                x
            });
            return Ok(Extremes {
                values,
                principal,
                steps: m,
                residual,
            });
        }
        checkpoint = (checkpoint + checkpoint / 2).min(n);
    }
}
