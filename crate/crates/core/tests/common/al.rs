//! Reference query strategies.

use perfal::gpr::{FitOptions, GprModel, MaternKernel};
use rand::Rng;

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Greedy farthest-point selection, recomputing every distance from scratch
/// at each step.
pub fn coreset_from_scratch(x: &[Vec<f64>], labeled: &[usize], unlabeled: &[usize], b: usize) -> Vec<usize> {
    let mut centers: Vec<usize> = labeled.to_vec();
    let mut picks = Vec::new();
    for _ in 0..b.min(unlabeled.len()) {
        let mut best: Option<(f64, usize)> = None;
        for &u in unlabeled {
            if picks.contains(&u) {
                continue;
            }
            let d = centers.iter().map(|&c| dist(&x[u], &x[c])).fold(f64::INFINITY, f64::min);
            best = match best {
                Some((bd, bu)) if bd > d || (bd == d && bu < u) => Some((bd, bu)),
                _ => Some((d, u)),
            };
        }
        let (_, u) = best.unwrap();
        picks.push(u);
        centers.push(u);
    }
    picks
}

/// Largest distance from any unlabeled point to its nearest center.
pub fn cover_radius(x: &[Vec<f64>], centers: &[usize], unlabeled: &[usize]) -> f64 {
    unlabeled
        .iter()
        .map(|&u| centers.iter().map(|&c| dist(&x[u], &x[c])).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Minimum cover radius over every `b`-subset of the unlabeled points.
pub fn optimal_radius(x: &[Vec<f64>], labeled: &[usize], unlabeled: &[usize], b: usize) -> f64 {
    let mut best = f64::INFINITY;
    let mut pick = Vec::new();
    subsets(unlabeled, b, 0, &mut pick, &mut |s| {
        let mut c = labeled.to_vec();
        c.extend_from_slice(s);
        best = best.min(cover_radius(x, &c, unlabeled));
    });
    best
}

fn subsets(items: &[usize], k: usize, from: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if cur.len() == k {
        f(cur);
        return;
    }
    for i in from..items.len() {
        cur.push(items[i]);
        subsets(items, k, i + 1, cur, f);
        cur.pop();
    }
}

/// Ids ordered by descending score then ascending id, first `b`.
pub fn top_b_by_sort(ids: &[usize], scores: &[f64], b: usize) -> Vec<usize> {
    let mut pairs: Vec<(f64, usize)> = scores.iter().copied().zip(ids.iter().copied()).collect();
    pairs.sort_by(|a, c| c.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&c.1)));
    pairs.into_iter().take(b).map(|p| p.1).collect()
}

/// Committee disagreement as mean squared pairwise difference over two.
pub fn pairwise_variance(member_means: &[Vec<f64>]) -> Vec<f64> {
    let k = member_means.len() as f64;
    (0..member_means[0].len())
        .map(|i| {
            let mut s = 0.0;
            for a in member_means {
                for b in member_means {
                    s += (a[i] - b[i]).powi(2);
                }
            }
            s / (2.0 * k * k)
        })
        .collect()
}

/// Refits every committee member by hand and predicts at `unlabeled`.
pub fn naive_member_means(
    kernel: &MaternKernel,
    x: &[Vec<f64>],
    y: &[f64],
    labeled: &[usize],
    unlabeled: &[usize],
    resamples: &[Vec<usize>],
) -> Vec<Vec<f64>> {
    let opts = FitOptions {
        tune: false,
        kernel: *kernel,
        ..FitOptions::default()
    };
    let q: Vec<Vec<f64>> = unlabeled.iter().map(|&u| x[u].clone()).collect();
    resamples
        .iter()
        .filter(|idx| {
            let mut d = (*idx).clone();
            d.sort_unstable();
            d.dedup();
            d.len() >= 2
        })
        .filter_map(|idx| {
            let xs: Vec<Vec<f64>> = idx.iter().map(|&i| x[labeled[i]].clone()).collect();
            let ys: Vec<f64> = idx.iter().map(|&i| y[labeled[i]]).collect();
            GprModel::fit(&xs, &ys, &opts).ok()?.predict_mean(&q).ok()
        })
        .collect()
}

pub fn random_points(rng: &mut impl Rng, n: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..dim).map(|_| rng.gen_range(-5.0..5.0)).collect()).collect()
}

/// Splits `0..n` into a labeled prefix of random size and the rest.
pub fn random_split(rng: &mut impl Rng, n: usize, max_l: usize) -> (Vec<usize>, Vec<usize>) {
    let mut ids: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        ids.swap(i, rng.gen_range(0..=i));
    }
    let l = rng.gen_range(0..=max_l.min(n - 1));
    (ids[..l].to_vec(), ids[l..].to_vec())
}
