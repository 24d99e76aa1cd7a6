use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{CenterSet, Dataset};

const SUM_TOLERANCE: f64 = 1e-12;

/// A probability vector over the sites of a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingDistribution {
    probs: Vec<f64>,
}

impl SamplingDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::input("empty distribution"));
        }
        if let Some(bad) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::input(format!("invalid probability {bad}")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::input(format!("probabilities sum to {sum}")));
        }
        Ok(SamplingDistribution { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// FNV-1a over the bit patterns of the entries.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for p in &self.probs {
            for b in p.to_bits().to_le_bytes() {
                h ^= u64::from(b);
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
        h
    }
}

/// D² distribution: `p(x) = w_x · min_c ‖x − c‖² / Φ(X, C)`.
pub fn d2_distribution(x: &Dataset, c: &CenterSet) -> Result<SamplingDistribution> {
    if c.is_empty() {
        return Err(Error::input("D² distribution needs at least one center"));
    }
    let total = c.potential();
    if total <= 0.0 {
        return Err(Error::DegeneratePotential);
    }
    let probs = x
        .weights()
        .iter()
        .zip(c.min_dist_sq())
        .map(|(&w, &d)| w as f64 * d / total)
        .collect();
    SamplingDistribution::new(probs)
}

/// Uniform over points, i.e. proportional to site weight.
pub fn uniform_distribution(x: &Dataset) -> SamplingDistribution {
    let n = x.total_weight() as f64;
    SamplingDistribution {
        probs: x.weights().iter().map(|&w| w as f64 / n).collect(),
    }
}

/// Inverse-CDF sampler. Each draw consumes exactly one `f64` from the RNG.
#[derive(Debug, Clone)]
pub struct Sampler {
    cumulative: Vec<f64>,
    last_positive: usize,
}

impl Sampler {
    pub fn new(dist: &SamplingDistribution) -> Self {
        let mut acc = 0.0;
        let cumulative = dist
            .probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        let last_positive = dist.probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
        Sampler {
            cumulative,
            last_positive,
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = self.cumulative[self.cumulative.len() - 1];
        let u = rng.random::<f64>() * total;
        // First index whose cumulative mass exceeds u; zero-mass entries never qualify.
        let idx = self.cumulative.partition_point(|&c| c <= u);
        idx.min(self.last_positive)
    }
}

/// Draws one site index from `dist`.
pub fn sample<R: Rng + ?Sized>(dist: &SamplingDistribution, rng: &mut R) -> usize {
    Sampler::new(dist).draw(rng)
}
