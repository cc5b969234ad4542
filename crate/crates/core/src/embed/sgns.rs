//! Skip-gram with negative sampling, shared by Graph2Vec (documents as
//! inputs) and the walk-based methods (words as inputs).

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, WeightedAliasIndex};

/// Noise distribution proportional to `count^0.75`; uniform when every count is 0.
#[derive(Debug, Clone)]
pub(crate) struct NegativeTable {
    alias: Option<WeightedAliasIndex<f64>>,
    len: usize,
}

impl NegativeTable {
    pub fn new(counts: &[u64]) -> Self {
        let weights: Vec<f64> = counts.iter().map(|&c| (c as f64).powf(0.75)).collect();
        Self {
            alias: WeightedAliasIndex::new(weights).ok(),
            len: counts.len(),
        }
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        match &self.alias {
            Some(a) => a.sample(rng),
            None => rng.gen_range(0..self.len.max(1)),
        }
    }
}

pub(crate) struct Sgns {
    pub dim: usize,
    pub input: Vec<f32>,
    pub output: Vec<f32>,
    table: NegativeTable,
    negatives: usize,
    grad: Vec<f32>,
    curves: Curves,
}

const MAX_EXP: f32 = 6.0;
const CURVE_SIZE: usize = 1024;

/// Sigmoid and log-sigmoid sampled on `[-MAX_EXP, MAX_EXP]`.
struct Curves {
    sigmoid: Vec<f32>,
    log_sigmoid: Vec<f32>,
}

impl Curves {
    fn new() -> Self {
        let xs: Vec<f64> = (0..CURVE_SIZE)
            .map(|i| (i as f64 / CURVE_SIZE as f64 * 2.0 - 1.0) * f64::from(MAX_EXP))
            .collect();
        Self {
            sigmoid: xs.iter().map(|x| (1.0 / (1.0 + (-x).exp())) as f32).collect(),
            log_sigmoid: xs.iter().map(|x| (-(-x).exp().ln_1p()) as f32).collect(),
        }
    }

    fn slot(x: f32) -> usize {
        (((x + MAX_EXP) / (2.0 * MAX_EXP)) * CURVE_SIZE as f32) as usize
    }

    fn sigmoid(&self, x: f32) -> f32 {
        if x >= MAX_EXP {
            1.0
        } else if x <= -MAX_EXP {
            0.0
        } else {
            self.sigmoid[Self::slot(x).min(CURVE_SIZE - 1)]
        }
    }

    fn log_sigmoid(&self, x: f32) -> f32 {
        if x >= MAX_EXP {
            0.0
        } else if x <= -MAX_EXP {
            x
        } else {
            self.log_sigmoid[Self::slot(x).min(CURVE_SIZE - 1)]
        }
    }
}

fn dot(a: &[f32], b: &[f32]) -> f32 {
    let mut lanes = [0.0f32; 8];
    let mut ca = a.chunks_exact(8);
    let mut cb = b.chunks_exact(8);
    for (x, y) in (&mut ca).zip(&mut cb) {
        for i in 0..8 {
            lanes[i] += x[i] * y[i];
        }
    }
    let tail: f32 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    lanes.iter().sum::<f32>() + tail
}

impl Sgns {
    /// Inputs start uniform in `±0.5/dim`, outputs at zero.
    pub fn new(n_inputs: usize, counts: &[u64], dim: usize, negatives: usize, rng: &mut ChaCha8Rng) -> Self {
        let scale = 0.5 / dim as f32;
        let input = (0..n_inputs * dim).map(|_| (rng.gen::<f32>() * 2.0 - 1.0) * scale).collect();
        Self {
            dim,
            input,
            output: vec![0.0; counts.len() * dim],
            table: NegativeTable::new(counts),
            negatives,
            grad: vec![0.0; dim],
            curves: Curves::new(),
        }
    }

    /// One positive pair plus sampled negatives. Returns the pair's loss.
    pub fn step(&mut self, row: usize, target: usize, lr: f32, rng: &mut ChaCha8Rng) -> f64 {
        let d = self.dim;
        self.grad.iter_mut().for_each(|g| *g = 0.0);
        let h = &mut self.input[row * d..(row + 1) * d];
        let mut loss = 0.0f32;
        for k in 0..=self.negatives {
            let (word, label) = if k == 0 {
                (target, 1.0f32)
            } else {
                let w = self.table.sample(rng);
                if w == target {
                    continue;
                }
                (w, 0.0)
            };
            let o = &mut self.output[word * d..(word + 1) * d];
            let z = dot(h, o);
            let s = self.curves.sigmoid(z);
            loss -= self.curves.log_sigmoid(if label > 0.5 { z } else { -z });
            let g = (label - s) * lr;
            for ((gr, oi), hi) in self.grad.iter_mut().zip(o.iter_mut()).zip(h.iter()) {
                *gr += g * *oi;
                *oi += g * hi;
            }
        }
        for (x, g) in h.iter_mut().zip(&self.grad) {
            *x += g;
        }
        f64::from(loss)
    }

    pub fn input_rows(&self) -> Vec<Vec<f64>> {
        self.input
            .chunks(self.dim)
            .map(|r| r.iter().map(|&x| f64::from(x)).collect())
            .collect()
    }
}

/// Learning rate after `done` of `total` updates: linear decay with a floor.
pub(crate) fn decayed(lr: f64, done: usize, total: usize) -> f32 {
    let frac = if total == 0 { 0.0 } else { done as f64 / total as f64 };
    (lr * (1.0 - frac).max(1e-4)) as f32
}
