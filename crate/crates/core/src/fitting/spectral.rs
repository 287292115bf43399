//! Adjacency spectral clustering.
//!
//! The `k` eigenvectors of the adjacency matrix with the largest eigenvalues
//! in absolute value are stacked into an `n × k` matrix, each row is projected
//! onto the unit sphere, and the rows are clustered with k-means.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

use super::kmeans::kmeans;
use super::CommunityAssignment;

/// Graphs up to this size use a dense symmetric eigensolver.
pub const DENSE_LIMIT: usize = 500;
/// Required eigen-residual `‖Au − λu‖` for unit `u`.
pub const RESIDUAL_TOL: f64 = 1e-6;
const KMEANS_RESTARTS: usize = 10;
const ZERO_ROW: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenMethod {
    /// Dense below [`DENSE_LIMIT`] nodes, Lanczos above.
    Auto,
    Dense,
    Lanczos,
}

#[derive(Debug, Clone)]
pub struct SpectralEmbedding {
    /// Selected eigenvalues, ordered by decreasing `|λ|`.
    pub eigenvalues: Vec<f64>,
    /// `rows[i][c]` is entry `i` of eigenvector `c`.
    pub rows: Vec<Vec<f64>>,
    /// Rows scaled to unit length; zero rows are left as zeros.
    pub normalized: Vec<Vec<f64>>,
    /// Nodes whose embedding row is (numerically) zero.
    pub zero_rows: Vec<usize>,
}

impl SpectralEmbedding {
    pub fn k(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Largest deviation of `UᵀU` from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let k = self.k();
        let mut worst: f64 = 0.0;
        for a in 0..k {
            for b in 0..k {
                let dot: f64 = self.rows.iter().map(|r| r[a] * r[b]).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// Largest `‖Au − λu‖` over the selected eigenpairs.
    pub fn max_residual(&self, g: &Graph) -> f64 {
        (0..self.k())
            .map(|c| {
                let u: Vec<f64> = self.rows.iter().map(|r| r[c]).collect();
                residual(g, &u, self.eigenvalues[c])
            })
            .fold(0.0, f64::max)
    }
}

fn matvec(g: &Graph, x: &[f64], out: &mut [f64]) {
    for (v, o) in out.iter_mut().enumerate() {
        *o = g.neighbors(v).iter().map(|&u| x[u as usize]).sum();
    }
}

fn residual(g: &Graph, u: &[f64], lambda: f64) -> f64 {
    let mut au = vec![0.0; u.len()];
    matvec(g, u, &mut au);
    au.iter()
        .zip(u)
        .map(|(a, x)| (a - lambda * x).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Indices of the `k` largest `|λ|`, larger signed value first on ties.
fn top_abs(values: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        values[b]
            .abs()
            .total_cmp(&values[a].abs())
            .then(values[b].total_cmp(&values[a]))
            .then(a.cmp(&b))
    });
    idx.truncate(k);
    idx
}

/// Flips the sign so the largest-magnitude entry (first on ties) is positive.
fn canonical_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() + 1e-12 {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn dense_top(g: &Graph, k: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = g.node_count();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for (u, v) in g.edges() {
        a[(u, v)] = 1.0;
        a[(v, u)] = 1.0;
    }
    let eig = SymmetricEigen::new(a);
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let picks = top_abs(&values, k);
    let vectors = picks
        .iter()
        .map(|&c| eig.eigenvectors.column(c).iter().copied().collect())
        .collect();
    (picks.iter().map(|&c| values[c]).collect(), vectors)
}

/// Lanczos with full reorthogonalization. The Krylov space grows until the
/// top-`|λ|` Ritz pairs meet [`RESIDUAL_TOL`], or fails at `n` vectors.
fn lanczos_top<R: Rng + ?Sized>(g: &Graph, k: usize, rng: &mut R) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = g.node_count();
    let random_unit = |rng: &mut R, basis: &[Vec<f64>]| -> Option<Vec<f64>> {
        for _ in 0..8 {
            let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
            for _ in 0..2 {
                for q in basis {
                    let c = dot(&v, q);
                    v.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
                }
            }
            let nv = norm(&v);
            if nv > 1e-8 {
                v.iter_mut().for_each(|x| *x /= nv);
                return Some(v);
            }
        }
        None
    };

    let mut basis: Vec<Vec<f64>> = vec![random_unit(rng, &[]).expect("n >= 1")];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];

    for j in 0..n {
        matvec(g, &basis[j], &mut w);
        let a = dot(&w, &basis[j]);
        alpha.push(a);
        for _ in 0..2 {
            for q in &basis {
                let c = dot(&w, q);
                w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
        }
        let b = norm(&w);
        let dim = j + 1;
        // a breakdown only closes one invariant subspace; repeated eigenvalues
        // may still be missing, so convergence is judged on regular steps
        let check = dim == n || (dim >= k && dim % 10 == 0 && b >= 1e-10);
        if check {
            let t = DMatrix::<f64>::from_fn(dim, dim, |r, c| {
                if r == c {
                    alpha[r]
                } else if r + 1 == c {
                    beta[r]
                } else if c + 1 == r {
                    beta[c]
                } else {
                    0.0
                }
            });
            let eig = SymmetricEigen::new(t);
            let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
            let picks = top_abs(&values, k);
            let estimates_ok = picks
                .iter()
                .all(|&c| (b * eig.eigenvectors[(dim - 1, c)]).abs() <= RESIDUAL_TOL * 0.1);
            if estimates_ok || dim == n {
                let mut vectors = Vec::with_capacity(k);
                for &c in &picks {
                    let y = eig.eigenvectors.column(c);
                    let mut u = vec![0.0; n];
                    for (q, &coef) in basis.iter().zip(y.iter()) {
                        u.iter_mut().zip(q).for_each(|(x, qv)| *x += coef * qv);
                    }
                    let nu = norm(&u);
                    u.iter_mut().for_each(|x| *x /= nu);
                    vectors.push(u);
                }
                let lambdas: Vec<f64> = picks.iter().map(|&c| values[c]).collect();
                let worst = vectors
                    .iter()
                    .zip(&lambdas)
                    .map(|(u, &l)| residual(g, u, l))
                    .fold(0.0, f64::max);
                if worst <= RESIDUAL_TOL {
                    return Ok((lambdas, vectors));
                }
                if dim == n {
                    return Err(Error::EigenNonConvergence(format!(
                        "Lanczos residual {worst:.3e} above {RESIDUAL_TOL:e} with a full basis"
                    )));
                }
            }
        }
        if dim == n {
            break;
        }
        let next = if b > 1e-10 {
            beta.push(b);
            w.iter().map(|x| x / b).collect()
        } else {
            // invariant subspace found; continue from a fresh direction
            beta.push(0.0);
            match random_unit(rng, &basis) {
                Some(v) => v,
                None => {
                    return Err(Error::EigenNonConvergence(
                        "could not extend the Krylov basis".into(),
                    ))
                }
            }
        };
        basis.push(next);
    }
    Err(Error::EigenNonConvergence("Lanczos exhausted the basis".into()))
}

/// Top-`|λ|` eigenpairs of the adjacency matrix and their row-normalized
/// embedding.
pub fn spectral_embedding<R: Rng + ?Sized>(
    g: &Graph,
    k: usize,
    method: EigenMethod,
    rng: &mut R,
) -> Result<SpectralEmbedding> {
    let n = g.node_count();
    if k == 0 || k > n {
        return Err(Error::invalid(format!("spectral clustering needs 1 <= k <= n (k={k}, n={n})")));
    }
    let use_dense = match method {
        EigenMethod::Dense => true,
        EigenMethod::Lanczos => false,
        EigenMethod::Auto => n <= DENSE_LIMIT,
    };
    let (eigenvalues, mut vectors) = if use_dense { dense_top(g, k) } else { lanczos_top(g, k, rng)? };
    for v in &mut vectors {
        canonical_sign(v);
    }
    let rows: Vec<Vec<f64>> = (0..n).map(|i| vectors.iter().map(|v| v[i]).collect()).collect();
    let mut zero_rows = Vec::new();
    let normalized = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let nr = norm(r);
            if nr < ZERO_ROW {
                zero_rows.push(i);
                vec![0.0; r.len()]
            } else {
                r.iter().map(|x| x / nr).collect()
            }
        })
        .collect();
    Ok(SpectralEmbedding {
        eigenvalues,
        rows,
        normalized,
        zero_rows,
    })
}

/// Spectral clustering into (at most) `k` communities.
///
/// Zero embedding rows are left out of k-means and joined to the largest
/// cluster. The result is relabelled in order of first appearance, so fewer
/// than `k` labels appear only when k-means cannot fill every cluster.
pub fn spectral_clustering<R: Rng + ?Sized>(g: &Graph, k: usize, rng: &mut R) -> Result<CommunityAssignment> {
    spectral_clustering_with(g, k, EigenMethod::Auto, rng)
}

pub fn spectral_clustering_with<R: Rng + ?Sized>(
    g: &Graph,
    k: usize,
    method: EigenMethod,
    rng: &mut R,
) -> Result<CommunityAssignment> {
    let n = g.node_count();
    if k == 1 {
        if n == 0 {
            return Err(Error::invalid("spectral clustering of an empty graph"));
        }
        return Ok(CommunityAssignment::from_labels(&vec![0; n]));
    }
    let emb = spectral_embedding(g, k, method, rng)?;
    let is_zero: Vec<bool> = {
        let mut z = vec![false; n];
        emb.zero_rows.iter().for_each(|&i| z[i] = true);
        z
    };
    let active: Vec<usize> = (0..n).filter(|&i| !is_zero[i]).collect();
    let mut labels = vec![0usize; n];
    if !active.is_empty() {
        let points: Vec<Vec<f64>> = active.iter().map(|&i| emb.normalized[i].clone()).collect();
        let km = kmeans(&points, k, KMEANS_RESTARTS, rng);
        let mut counts = vec![0usize; k];
        for (&i, &l) in active.iter().zip(&km.labels) {
            labels[i] = l;
            counts[l] += 1;
        }
        let largest = (0..k).fold(0, |best, c| if counts[c] > counts[best] { c } else { best });
        for &i in &emb.zero_rows {
            labels[i] = largest;
        }
    }
    Ok(CommunityAssignment::from_labels(&labels))
}
