//! Small combinatorics used by the designs and the design-assisted sampler.

use rand::Rng as _;

use crate::rng::Rng;

pub fn ln_choose(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

pub fn choose_f64(n: usize, k: usize) -> f64 {
    ln_choose(n, k).exp().round()
}

/// Elementary symmetric polynomial table: `table[k][j]` is the sum over
/// j-subsets of `weights[k..]` of the product of their weights.
fn esp_table(weights: &[f64], t: usize) -> Vec<Vec<f64>> {
    let n = weights.len();
    let mut table = vec![vec![0.0; t + 1]; n + 1];
    table[n][0] = 1.0;
    for k in (0..n).rev() {
        table[k][0] = 1.0;
        for j in 1..=t {
            table[k][j] = table[k + 1][j] + weights[k] * table[k + 1][j - 1];
        }
    }
    table
}

fn rescale(weights: &[f64]) -> Vec<f64> {
    let positive: Vec<f64> = weights.iter().copied().filter(|&w| w > 0.0).collect();
    if positive.is_empty() {
        return weights.to_vec();
    }
    let ln_mean = positive.iter().map(|w| w.ln()).sum::<f64>() / positive.len() as f64;
    let scale = (-ln_mean).exp();
    weights.iter().map(|w| w * scale).collect()
}

/// Sum over `t`-subsets of the product of weights.
pub fn esp(weights: &[f64], t: usize) -> f64 {
    if t > weights.len() {
        return 0.0;
    }
    let positive: Vec<f64> = weights.iter().copied().filter(|&w| w > 0.0).collect();
    if positive.is_empty() {
        return if t == 0 { 1.0 } else { 0.0 };
    }
    let ln_mean = positive.iter().map(|w| w.ln()).sum::<f64>() / positive.len() as f64;
    let scaled = rescale(weights);
    esp_table(&scaled, t)[0][t] * (ln_mean * t as f64).exp()
}

/// Draws a `t`-subset (ascending indices) with probability proportional to the
/// product of its weights. Returns `None` if no subset has positive weight.
pub fn sample_weighted_subset(weights: &[f64], t: usize, rng: &mut Rng) -> Option<Vec<usize>> {
    if t > weights.len() {
        return None;
    }
    let w = rescale(weights);
    let table = esp_table(&w, t);
    if table[0][t] <= 0.0 {
        return None;
    }
    let mut out = Vec::with_capacity(t);
    let mut need = t;
    for k in 0..w.len() {
        if need == 0 {
            break;
        }
        let total = table[k][need];
        let take = w[k] * table[k + 1][need - 1];
        if rng.random::<f64>() * total < take {
            out.push(k);
            need -= 1;
        }
    }
    (need == 0).then_some(out)
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + n - k {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
