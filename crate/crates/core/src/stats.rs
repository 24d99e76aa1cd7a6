//! Estimators and one-sided tests used by the Monte Carlo checks.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, ContinuousCDF, DiscreteCDF, Normal, StudentsT};

/// Standard normal quantile.
pub fn normal_quantile(p: f64) -> f64 {
    Normal::new(0.0, 1.0)
        .expect("standard normal")
        .inverse_cdf(p)
}

fn normal_sf(z: f64) -> f64 {
    Normal::new(0.0, 1.0).expect("standard normal").sf(z)
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n − 1 denominator); zero for fewer than two values.
pub fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (xs.len() - 1) as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    pub stderr: f64,
    /// Normal-approximation 95% interval for the mean.
    pub ci95: (f64, f64),
    pub min: f64,
    pub max: f64,
}

pub fn summarize(xs: &[f64]) -> Summary {
    let n = xs.len();
    let m = mean(xs);
    let std = sample_std(xs);
    let stderr = if n > 0 {
        std / (n as f64).sqrt()
    } else {
        f64::NAN
    };
    let z = normal_quantile(0.975);
    Summary {
        n,
        mean: m,
        std,
        stderr,
        ci95: (m - z * stderr, m + z * stderr),
        min: xs.iter().copied().fold(f64::INFINITY, f64::min),
        max: xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

/// Two-sided normal-approximation half width for a binomial proportion `p`
/// estimated from `n` draws.
pub fn binomial_half_width(p: f64, n: usize, confidence: f64) -> f64 {
    let z = normal_quantile(0.5 + confidence / 2.0);
    z * (p * (1.0 - p) / n as f64).sqrt()
}

/// `P(X ≥ count)` for `X ~ Bin(n, p)`.
pub fn binomial_upper_tail(count: u64, n: u64, p: f64) -> f64 {
    if count == 0 {
        return 1.0;
    }
    Binomial::new(p.clamp(0.0, 1.0), n)
        .expect("valid binomial")
        .sf(count - 1)
}

/// `P(X ≤ count)` for `X ~ Bin(n, p)`.
pub fn binomial_lower_tail(count: u64, n: u64, p: f64) -> f64 {
    Binomial::new(p.clamp(0.0, 1.0), n)
        .expect("valid binomial")
        .cdf(count)
}

/// Exact two-sided check that `count` successes out of `n` are compatible
/// with a success probability somewhere in `[lo, hi]` at level `alpha`.
pub fn binomial_in_band(count: u64, n: u64, lo: f64, hi: f64, alpha: f64) -> bool {
    binomial_upper_tail(count, n, hi) >= alpha / 2.0
        && binomial_lower_tail(count, n, lo) >= alpha / 2.0
}

/// One-sided p-value for `H₁: p_b > p_a` (pooled two-proportion z test).
pub fn two_proportion_p_greater(hits_a: usize, n_a: usize, hits_b: usize, n_b: usize) -> f64 {
    let pa = hits_a as f64 / n_a as f64;
    let pb = hits_b as f64 / n_b as f64;
    let pooled = (hits_a + hits_b) as f64 / (n_a + n_b) as f64;
    let se = (pooled * (1.0 - pooled) * (1.0 / n_a as f64 + 1.0 / n_b as f64)).sqrt();
    if se == 0.0 {
        return if pb > pa { 0.0 } else { 1.0 };
    }
    normal_sf((pb - pa) / se)
}

/// One-sided Welch test p-value for `H₁: mean(b) > mean(a)`.
pub fn welch_p_greater(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (va, vb) = (sample_std(a).powi(2) / na, sample_std(b).powi(2) / nb);
    let diff = mean(b) - mean(a);
    let se2 = va + vb;
    if se2 == 0.0 {
        return if diff > 0.0 { 0.0 } else { 1.0 };
    }
    let df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    let t = diff / se2.sqrt();
    StudentsT::new(0.0, 1.0, df)
        .map(|d| d.sf(t))
        .unwrap_or(f64::NAN)
}

fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&i, &j| xs[i].total_cmp(&xs[j]));
    let mut r = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (mean(a), mean(b));
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

/// Spearman rank correlation (average ranks for ties).
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    pearson(&ranks(xs), &ranks(ys))
}

/// Exact one-sided permutation p-value for a positive Spearman correlation.
/// Only meant for short series (n ≤ 8).
pub fn spearman_p_positive(xs: &[f64], ys: &[f64]) -> f64 {
    assert!(xs.len() <= 8, "exact permutation test limited to n <= 8");
    let observed = spearman(xs, ys);
    let ry = ranks(ys);
    let rx = ranks(xs);
    let mut perm: Vec<usize> = (0..ry.len()).collect();
    let mut hits = 0usize;
    let mut total = 0usize;
    permute(&mut perm, 0, &mut |p| {
        let shuffled: Vec<f64> = p.iter().map(|&i| ry[i]).collect();
        total += 1;
        if pearson(&rx, &shuffled) >= observed - 1e-12 {
            hits += 1;
        }
    });
    hits as f64 / total as f64
}

fn permute(v: &mut [usize], k: usize, f: &mut impl FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, f);
        v.swap(k, i);
    }
}
