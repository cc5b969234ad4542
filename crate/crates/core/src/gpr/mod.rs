//! Gaussian-process regression with a Matérn kernel.

mod kernel;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use kernel::{euclidean, MaternKernel, Nu};

#[derive(Debug, Error)]
pub enum GprError {
    #[error("need at least 2 training points, got {0}")]
    TooFewPoints(usize),
    #[error("non-finite value in training data")]
    NonFinite,
    #[error("kernel matrix not positive definite even with jitter {0}")]
    SingularKernel(f64),
    #[error("expected {expected} columns, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("{0}")]
    Config(String),
}

pub const JITTER_START: f64 = 1e-8;
pub const JITTER_MAX: f64 = 1e-2;
pub const LENGTH_SCALE_BOUNDS: (f64, f64) = (1e-2, 1e3);
pub const NOISE_BOUNDS: (f64, f64) = (1e-6, 1.0);
pub const SIGNAL_BOUNDS: (f64, f64) = (1e-6, 1e3);

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    /// Maximize the log marginal likelihood over the kernel hyperparameters.
    pub tune: bool,
    /// Starting point; also the fixed kernel when `tune` is off.
    pub kernel: MaternKernel,
    /// Local searches, the first from `kernel`, the rest log-uniform.
    pub restarts: usize,
    /// Likelihood evaluations allowed per local search.
    pub max_evals: usize,
    pub seed: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            tune: true,
            kernel: MaternKernel::default(),
            restarts: 5,
            max_evals: 60,
            seed: 0,
        }
    }
}

/// A fitted GP. Targets are standardized internally.
#[derive(Debug, Clone)]
pub struct GprModel {
    kernel: MaternKernel,
    x: Vec<Vec<f64>>,
    y_mean: f64,
    y_scale: f64,
    jitter: f64,
    chol: DMatrix<f64>,
    alpha: DVector<f64>,
    lml: f64,
}

/// Debug dump; training rows are referenced by id, not copied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDump {
    pub kernel: MaternKernel,
    pub target_mean: f64,
    pub target_std: f64,
    pub jitter: f64,
    pub log_marginal_likelihood: f64,
    pub training_ids: Vec<usize>,
}

pub fn standardize(y: &[f64]) -> (Vec<f64>, f64, f64) {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let scale = if var.sqrt() > 1e-12 * mean.abs().max(1.0) { var.sqrt() } else { 1.0 };
    (y.iter().map(|v| (v - mean) / scale).collect(), mean, scale)
}

fn pairwise_distances(x: &[Vec<f64>]) -> DMatrix<f64> {
    let n = x.len();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let r = euclidean(&x[i], &x[j]);
            d[(i, j)] = r;
            d[(j, i)] = r;
        }
    }
    d
}

fn kernel_matrix(k: &MaternKernel, dist: &DMatrix<f64>, diag: f64) -> DMatrix<f64> {
    let n = dist.nrows();
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        for i in j..n {
            let v = if i == j { k.signal_variance + diag } else { k.at_distance(dist[(i, j)]) };
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

struct Factor {
    chol: Cholesky<f64, Dyn>,
    jitter: f64,
}

/// Cholesky of `K + (noise + jitter) I`, escalating the jitter on failure.
fn factor(k: &MaternKernel, dist: &DMatrix<f64>) -> Result<Factor, GprError> {
    let mut jitter = JITTER_START;
    loop {
        if let Some(chol) = Cholesky::new(kernel_matrix(k, dist, k.noise_variance + jitter)) {
            return Ok(Factor { chol, jitter });
        }
        jitter *= 10.0;
        if jitter > JITTER_MAX * (1.0 + 1e-9) {
            return Err(GprError::SingularKernel(jitter / 10.0));
        }
    }
}

fn log_marginal_likelihood(f: &Factor, y: &DVector<f64>) -> (f64, DVector<f64>) {
    let alpha = f.chol.solve(y);
    let l = f.chol.l_dirty();
    let log_det_half: f64 = (0..y.len()).map(|i| l[(i, i)].ln()).sum();
    let n = y.len() as f64;
    let lml = -0.5 * y.dot(&alpha) - log_det_half - 0.5 * n * (2.0 * std::f64::consts::PI).ln();
    (lml, alpha)
}

fn median_distance(dist: &DMatrix<f64>) -> f64 {
    let n = dist.nrows();
    let mut v: Vec<f64> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| dist[(i, j)])
        .filter(|&d| d > 0.0)
        .collect();
    if v.is_empty() {
        return 1.0;
    }
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

type Theta = [f64; 3];

fn bounds() -> [(f64, f64); 3] {
    [
        (LENGTH_SCALE_BOUNDS.0.ln(), LENGTH_SCALE_BOUNDS.1.ln()),
        (SIGNAL_BOUNDS.0.ln(), SIGNAL_BOUNDS.1.ln()),
        (NOISE_BOUNDS.0.ln(), NOISE_BOUNDS.1.ln()),
    ]
}

fn to_kernel(theta: &Theta, nu: Nu) -> MaternKernel {
    MaternKernel {
        length_scale: theta[0].exp(),
        signal_variance: theta[1].exp(),
        nu,
        noise_variance: theta[2].exp(),
    }
}

fn from_kernel(k: &MaternKernel) -> Theta {
    let b = bounds();
    let t = [k.length_scale.ln(), k.signal_variance.ln(), k.noise_variance.max(1e-300).ln()];
    [0, 1, 2].map(|i| t[i].clamp(b[i].0, b[i].1))
}

/// Gradient-free coordinate search in log space.
fn local_search(start: Theta, max_evals: usize, f: &mut impl FnMut(&Theta) -> f64) -> (Theta, f64) {
    let b = bounds();
    let mut theta = start;
    let mut best = f(&theta);
    let mut evals = 1;
    let mut step = [1.0f64; 3];
    while evals < max_evals && step.iter().any(|&s| s > 1e-2) {
        for c in 0..3 {
            let mut moved = false;
            for dir in [1.0, -1.0] {
                let mut cand = theta;
                cand[c] = (theta[c] + dir * step[c]).clamp(b[c].0, b[c].1);
                if cand[c] == theta[c] || evals >= max_evals {
                    continue;
                }
                let v = f(&cand);
                evals += 1;
                if v > best {
                    theta = cand;
                    best = v;
                    moved = true;
                    break;
                }
            }
            step[c] = if moved { (step[c] * 1.5).min(4.0) } else { step[c] * 0.5 };
        }
    }
    (theta, best)
}

impl GprModel {
    pub fn fit(x: &[Vec<f64>], y: &[f64], opts: &FitOptions) -> Result<GprModel, GprError> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(GprError::TooFewPoints(n.min(y.len())));
        }
        let dim = x[0].len();
        if let Some(bad) = x.iter().find(|r| r.len() != dim) {
            return Err(GprError::Shape {
                expected: dim,
                got: bad.len(),
            });
        }
        if x.iter().flatten().chain(y).any(|v| !v.is_finite()) {
            return Err(GprError::NonFinite);
        }
        let (ys, y_mean, y_scale) = standardize(y);
        let yv = DVector::from_vec(ys);
        let dist = pairwise_distances(x);
        let nu = opts.kernel.nu;
        let kernel = if opts.tune {
            let mut objective = |t: &Theta| match factor(&to_kernel(t, nu), &dist) {
                Ok(f) => log_marginal_likelihood(&f, &yv).0,
                Err(_) => f64::NEG_INFINITY,
            };
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let b = bounds();
            let mut first = opts.kernel;
            if opts.kernel == MaternKernel::default() {
                first.length_scale = median_distance(&dist);
            }
            let mut best: Option<(Theta, f64)> = None;
            for r in 0..opts.restarts.max(1) {
                let start = if r == 0 {
                    from_kernel(&first)
                } else {
                    [0, 1, 2].map(|i| rng.gen_range(b[i].0..=b[i].1))
                };
                let (t, v) = local_search(start, opts.max_evals, &mut objective);
                if best.as_ref().is_none_or(|(_, bv)| v > *bv) {
                    best = Some((t, v));
                }
            }
            let (t, v) = best.expect("at least one restart");
            if v == f64::NEG_INFINITY {
                return Err(GprError::SingularKernel(JITTER_MAX));
            }
            to_kernel(&t, nu)
        } else {
            opts.kernel
        };
        let f = factor(&kernel, &dist)?;
        let (lml, alpha) = log_marginal_likelihood(&f, &yv);
        Ok(GprModel {
            kernel,
            x: x.to_vec(),
            y_mean,
            y_scale,
            jitter: f.jitter,
            chol: f.chol.l(),
            alpha,
            lml,
        })
    }

    pub fn kernel(&self) -> &MaternKernel {
        &self.kernel
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn log_marginal_likelihood(&self) -> f64 {
        self.lml
    }

    pub fn target_mean(&self) -> f64 {
        self.y_mean
    }

    pub fn target_std(&self) -> f64 {
        self.y_scale
    }

    /// Lower Cholesky factor of `K + (noise + jitter) I`.
    pub fn cholesky(&self) -> &DMatrix<f64> {
        &self.chol
    }

    pub fn n_train(&self) -> usize {
        self.x.len()
    }

    /// Raw-scale means and standardized-scale predictive variances (noise
    /// included, clamped at 0).
    pub fn predict(&self, xs: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<f64>), GprError> {
        let dim = self.x[0].len();
        if let Some(bad) = xs.iter().find(|r| r.len() != dim) {
            return Err(GprError::Shape {
                expected: dim,
                got: bad.len(),
            });
        }
        let n = self.x.len();
        let mut means = Vec::with_capacity(xs.len());
        let mut vars = Vec::with_capacity(xs.len());
        for q in xs {
            let ks = DVector::from_iterator(n, self.x.iter().map(|t| self.kernel.eval(q, t)));
            let m = ks.dot(&self.alpha);
            let v = self
                .chol
                .solve_lower_triangular(&ks)
                .expect("Cholesky factor has a positive diagonal");
            let var = (self.kernel.prior_variance() - v.norm_squared()).max(0.0);
            means.push(m * self.y_scale + self.y_mean);
            vars.push(var);
        }
        Ok((means, vars))
    }

    pub fn predict_mean(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>, GprError> {
        Ok(self.predict(xs)?.0)
    }

    pub fn dump(&self, training_ids: &[usize]) -> ModelDump {
        ModelDump {
            kernel: self.kernel,
            target_mean: self.y_mean,
            target_std: self.y_scale,
            jitter: self.jitter,
            log_marginal_likelihood: self.lml,
            training_ids: training_ids.to_vec(),
        }
    }
}

/// Pearson correlation. `degenerate` marks a zero-variance input, for which
/// `r` is reported as 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PearsonScore {
    pub r: f64,
    pub degenerate: bool,
}

pub fn pearson(a: &[f64], b: &[f64]) -> PearsonScore {
    assert_eq!(a.len(), b.len(), "pearson needs equal lengths");
    let n = a.len() as f64;
    if a.len() < 2 {
        return PearsonScore { r: 0.0, degenerate: true };
    }
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    let tiny = |s: f64, m: f64| s <= 1e-24 * n * m.abs().max(1.0).powi(2);
    if tiny(saa, ma) || tiny(sbb, mb) {
        log::warn!("pearson: zero-variance input");
        return PearsonScore { r: 0.0, degenerate: true };
    }
    PearsonScore {
        r: (sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0),
        degenerate: false,
    }
}
