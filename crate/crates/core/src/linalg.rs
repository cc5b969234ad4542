//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Above this size truncated SVDs switch to a randomized range finder.
pub const DENSE_SVD_LIMIT: usize = 300;

/// Rank-`r` factorization `a ≈ u * diag(s) * vᵀ`, singular values descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: DMatrix<f64>,
    pub s: DVector<f64>,
    pub v: DMatrix<f64>,
}

impl Svd {
    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.u * DMatrix::from_diagonal(&self.s) * self.v.transpose()
    }
}

/// Truncated SVD with exactly `rank` components. Components beyond the
/// matrix rank are zero. Signs are fixed so the largest-magnitude entry of
/// each left vector is positive.
pub fn truncated_svd(a: &DMatrix<f64>, rank: usize, seed: u64) -> Svd {
    let (m, n) = a.shape();
    let k = m.min(n);
    let mut out = Svd {
        u: DMatrix::zeros(m, rank),
        s: DVector::zeros(rank),
        v: DMatrix::zeros(n, rank),
    };
    if k == 0 || rank == 0 {
        return out;
    }
    let take = rank.min(k);
    let full = if k <= DENSE_SVD_LIMIT || take * 2 + 10 >= k {
        dense_svd(a)
    } else {
        randomized_svd(a, take, seed)
    };
    for j in 0..take.min(full.s.len()) {
        let mut u = full.u.column(j).into_owned();
        let mut v = full.v.column(j).into_owned();
        let pivot = u.iter().copied().fold(0.0f64, |best, x| if x.abs() > best.abs() { x } else { best });
        if pivot < 0.0 {
            u.neg_mut();
            v.neg_mut();
        }
        out.u.set_column(j, &u);
        out.v.set_column(j, &v);
        out.s[j] = full.s[j];
    }
    out
}

fn dense_svd(a: &DMatrix<f64>) -> Svd {
    let svd = a.clone().svd(true, true);
    let u = svd.u.expect("requested u");
    let vt = svd.v_t.expect("requested v_t");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]).then(i.cmp(&j)));
    let s = DVector::from_iterator(order.len(), order.iter().map(|&i| svd.singular_values[i]));
    let u = DMatrix::from_columns(&order.iter().map(|&i| u.column(i).into_owned()).collect::<Vec<_>>());
    let v = DMatrix::from_columns(&order.iter().map(|&i| vt.row(i).transpose()).collect::<Vec<_>>());
    Svd { u, s, v }
}

fn orthonormal_basis(y: DMatrix<f64>) -> DMatrix<f64> {
    y.qr().q()
}

fn randomized_svd(a: &DMatrix<f64>, rank: usize, seed: u64) -> Svd {
    let (m, n) = a.shape();
    let width = (rank + 10).min(m.min(n));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omega = DMatrix::from_fn(n, width, |_, _| StandardNormal.sample(&mut rng));
    let mut q = orthonormal_basis(a * omega);
    for _ in 0..4 {
        let z = orthonormal_basis(a.transpose() * &q);
        q = orthonormal_basis(a * z);
    }
    let b = q.transpose() * a;
    let small = dense_svd(&b);
    Svd {
        u: q * small.u,
        s: small.s,
        v: small.v,
    }
}

/// Spectral radius of a square matrix from its (complex) eigenvalues.
pub fn spectral_radius(a: &DMatrix<f64>) -> f64 {
    if a.nrows() == 0 {
        return 0.0;
    }
    a.clone()
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Growth-rate estimate `‖Aᵏ1‖^(1/k)` of the spectral radius of a
/// non-negative matrix given as adjacency lists with multiplicity.
pub fn spectral_radius_estimate(out: &[Vec<usize>], steps: usize) -> f64 {
    let n = out.len();
    if n == 0 {
        return 0.0;
    }
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut log_growth = 0.0;
    for _ in 0..steps {
        let mut y = vec![0.0; n];
        for (u, vs) in out.iter().enumerate() {
            for &v in vs {
                y[u] += x[v];
            }
        }
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        log_growth += norm.ln();
        x = y.into_iter().map(|v| v / norm).collect();
    }
    (log_growth / steps as f64).exp()
}
