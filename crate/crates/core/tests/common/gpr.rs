//! Dense Gaussian-process reference.

use nalgebra::{DMatrix, DVector};
use perfal::gpr::{FitOptions, MaternKernel, Nu};
use rand::Rng;

pub fn matern(nu: Nu, ls: f64, s2: f64, r: f64) -> f64 {
    let c = match nu {
        Nu::Half => (-r / ls).exp(),
        Nu::ThreeHalves => {
            let a = 3f64.sqrt() * r / ls;
            (1.0 + a) * (-a).exp()
        }
        Nu::FiveHalves => {
            let a = 5f64.sqrt() * r / ls;
            (1.0 + a + 5.0 * r * r / (3.0 * ls * ls)) * (-a).exp()
        }
    };
    s2 * c
}

/// Posterior mean (raw scale) and variance from the explicit inverse of the
/// noisy Gram matrix.
pub fn dense_posterior(k: &MaternKernel, diag: f64, x: &[f64], y: &[f64], q: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let nf = n as f64;
    let mu = y.iter().sum::<f64>() / nf;
    let sd = (y.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / nf).sqrt();
    let ys = DVector::from_iterator(n, y.iter().map(|v| (v - mu) / sd));
    let gram = DMatrix::from_fn(n, n, |i, j| {
        matern(k.nu, k.length_scale, k.signal_variance, (x[i] - x[j]).abs()) + if i == j { diag } else { 0.0 }
    });
    let inv = gram.try_inverse().expect("invertible");
    let w = &inv * ys;
    let mut means = Vec::new();
    let mut vars = Vec::new();
    for &t in q {
        let ks = DVector::from_iterator(n, x.iter().map(|&xi| matern(k.nu, k.length_scale, k.signal_variance, (t - xi).abs())));
        means.push(ks.dot(&w) * sd + mu);
        vars.push(k.signal_variance + k.noise_variance - (ks.transpose() * &inv * &ks)[(0, 0)]);
    }
    (means, vars)
}

pub fn spaced_points(rng: &mut impl Rng, n: usize, gap: f64) -> Vec<f64> {
    let mut x: Vec<f64> = Vec::new();
    while x.len() < n {
        let c = rng.gen_range(0.0..10.0);
        if x.iter().all(|&p: &f64| (p - c).abs() >= gap) {
            x.push(c);
        }
    }
    x
}

pub fn rows(x: &[f64]) -> Vec<Vec<f64>> {
    x.iter().map(|&v| vec![v]).collect()
}

pub fn fixed(k: MaternKernel) -> FitOptions {
    FitOptions {
        tune: false,
        kernel: k,
        ..FitOptions::default()
    }
}

pub fn random_kernel(rng: &mut impl Rng, noise: f64) -> MaternKernel {
    MaternKernel {
        length_scale: rng.gen_range(0.3..3.0),
        signal_variance: rng.gen_range(0.5..2.0),
        nu: [Nu::Half, Nu::ThreeHalves, Nu::FiveHalves][rng.gen_range(0..3)],
        noise_variance: noise,
    }
}
