use std::collections::BTreeSet;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{Stream, TrialSeed};
use crate::stats::{summarize, Summary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Adversary {
    RemoveMin,
    RemoveMax,
    /// Adversarial steps fall back to proportional sampling.
    None,
}

impl FromStr for Adversary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "remove_min" | "min" => Ok(Adversary::RemoveMin),
            "remove_max" | "max" => Ok(Adversary::RemoveMax),
            "none" => Ok(Adversary::None),
            _ => Err(Error::input(format!("unknown adversary {s:?}"))),
        }
    }
}

/// What the adversary does to the survivors after every step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decrement {
    #[default]
    None,
    HalveRandomSurvivor,
}

impl FromStr for Decrement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Decrement::None),
            "halve" | "halve_random_survivor" => Ok(Decrement::HalveRandomSurvivor),
            _ => Err(Error::input(format!("unknown decrement rule {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemovalExperimentConfig {
    pub numbers: Vec<f64>,
    /// Probability that a step is adversarial. `1` models the all-adversarial
    /// worst case.
    pub eps: f64,
    pub steps: usize,
    pub adversary: Adversary,
    #[serde(default)]
    pub decrement: Decrement,
    pub trials: usize,
    pub base_seed: u64,
}

impl RemovalExperimentConfig {
    pub fn z(&self) -> usize {
        self.numbers.len()
    }

    pub fn validate(&self) -> Result<()> {
        let z = self.z();
        if z < 2 {
            return Err(Error::input("need at least two numbers"));
        }
        if self.numbers.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(Error::input("numbers must be finite and nonnegative"));
        }
        let sum: f64 = self.numbers.iter().sum();
        if (sum - z as f64).abs() > 1e-9 * z as f64 {
            return Err(Error::input(format!(
                "numbers must average 1, sum is {sum} for z = {z}"
            )));
        }
        if !(0.0..=1.0).contains(&self.eps) {
            return Err(Error::input("eps must lie in [0, 1]"));
        }
        if self.steps < 1 || self.steps > z - 1 {
            return Err(Error::input(format!("steps must lie in [1, {}]", z - 1)));
        }
        if self.trials < 1 {
            return Err(Error::input("trials must be >= 1"));
        }
        Ok(())
    }
}

/// `z` ones.
pub fn all_ones(z: usize) -> Vec<f64> {
    vec![1.0; z]
}

/// One number of value `z/2` and `z − 1` equal light numbers sharing the rest.
pub fn one_heavy(z: usize) -> Vec<f64> {
    let heavy = z as f64 / 2.0;
    let light = (z as f64 - heavy) / (z - 1) as f64;
    let mut v = vec![light; z];
    v[0] = heavy;
    v
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemovalTrial {
    pub final_average: f64,
    pub removed_sum: f64,
    pub remaining_sum: f64,
    pub adversarial_steps: usize,
}

/// Which bound on `E[A_ℓ]` applies to a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum Regime {
    /// `ℓ < z/2`: `E[A_ℓ] ≤ 2`.
    FewSteps { bound: f64 },
    /// `ℓ ≥ z/2` and `z / ln z ≥ max{18, 24ε/(1−ε)²}`: `E[A_ℓ] ≤ 4/(1−ε)·ln z + 2`.
    ManySteps { bound: f64 },
    /// `ℓ ≥ z/2` below the size threshold; only `min(z, max{..}·ln z)` holds.
    BelowThreshold { bound: f64 },
}

impl Regime {
    pub fn classify(z: usize, eps: f64, steps: usize) -> Regime {
        let zf = z as f64;
        if (steps as f64) < zf / 2.0 {
            return Regime::FewSteps { bound: 2.0 };
        }
        let threshold = if eps < 1.0 {
            18f64.max(24.0 * eps / ((1.0 - eps) * (1.0 - eps)))
        } else {
            f64::INFINITY
        };
        if zf / zf.ln() >= threshold {
            Regime::ManySteps {
                bound: 4.0 / (1.0 - eps) * zf.ln() + 2.0,
            }
        } else {
            Regime::BelowThreshold {
                bound: zf.min(threshold * zf.ln()),
            }
        }
    }

    pub fn bound(&self) -> f64 {
        match *self {
            Regime::FewSteps { bound }
            | Regime::ManySteps { bound }
            | Regime::BelowThreshold { bound } => bound,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RemovalReport {
    pub trials: Vec<RemovalTrial>,
    pub summary: Summary,
    pub regime: Regime,
}

impl RemovalReport {
    pub fn mean_final_average(&self) -> f64 {
        self.summary.mean
    }
}

/// Fenwick tree over the survivor values.
struct Fenwick {
    tree: Vec<f64>,
}

impl Fenwick {
    fn new(values: &[f64]) -> Self {
        let n = values.len();
        let mut tree = vec![0.0; n + 1];
        for (i, &v) in values.iter().enumerate() {
            let mut j = i + 1;
            tree[j] += v;
            let parent = j + (j & j.wrapping_neg());
            if parent <= n {
                let t = tree[j];
                j = parent;
                tree[j] += t;
            }
        }
        Fenwick { tree }
    }

    fn add(&mut self, i: usize, delta: f64) {
        let mut j = i + 1;
        while j < self.tree.len() {
            self.tree[j] += delta;
            j += j & j.wrapping_neg();
        }
    }

    fn total(&self) -> f64 {
        let mut j = self.tree.len() - 1;
        let mut sum = 0.0;
        while j > 0 {
            sum += self.tree[j];
            j &= j - 1;
        }
        sum
    }

    /// Smallest index whose prefix sum exceeds `target`.
    fn find(&self, mut target: f64) -> usize {
        let n = self.tree.len() - 1;
        let mut pos = 0;
        let mut step = n.next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= target {
                pos = next;
                target -= self.tree[next];
            }
            step >>= 1;
        }
        pos.min(n - 1)
    }
}

struct State {
    values: Vec<f64>,
    alive: Vec<usize>,
    slot: Vec<usize>,
    order: BTreeSet<(u64, usize)>,
    fenwick: Fenwick,
}

impl State {
    fn new(values: &[f64]) -> Self {
        let n = values.len();
        State {
            values: values.to_vec(),
            alive: (0..n).collect(),
            slot: (0..n).collect(),
            // Nonnegative floats order like their bit patterns.
            order: values
                .iter()
                .enumerate()
                .map(|(i, v)| (v.to_bits(), i))
                .collect(),
            fenwick: Fenwick::new(values),
        }
    }

    fn remaining_sum(&self) -> f64 {
        self.alive.iter().map(|&i| self.values[i]).sum()
    }

    fn is_alive(&self, i: usize) -> bool {
        self.alive.get(self.slot[i]) == Some(&i)
    }

    fn remove(&mut self, i: usize) -> f64 {
        let v = self.values[i];
        let s = self.slot[i];
        let last = *self.alive.last().expect("survivor");
        self.alive.swap_remove(s);
        if last != i {
            self.slot[last] = s;
        }
        self.order.remove(&(v.to_bits(), i));
        self.fenwick.add(i, -v);
        v
    }

    fn set(&mut self, i: usize, v: f64) {
        let old = self.values[i];
        self.order.remove(&(old.to_bits(), i));
        self.order.insert((v.to_bits(), i));
        self.fenwick.add(i, v - old);
        self.values[i] = v;
    }

    fn uniform(&self, rng: &mut ChaCha8Rng) -> usize {
        self.alive[rng.random_range(0..self.alive.len())]
    }

    fn proportional(&self, rng: &mut ChaCha8Rng) -> usize {
        if self.order.last().is_none_or(|&(bits, _)| bits == 0) {
            return self.uniform(rng);
        }
        let u: f64 = rng.random();
        let total = self.fenwick.total();
        if total > 0.0 {
            let i = self.fenwick.find(u * total);
            if self.is_alive(i) && self.values[i] > 0.0 {
                return i;
            }
        }
        // Rounding residue in the tree: fall back to an exact scan.
        let mut target = u * self.remaining_sum();
        let mut last = self.alive[0];
        for &j in &self.alive {
            if self.values[j] > 0.0 {
                last = j;
                if target < self.values[j] {
                    return j;
                }
                target -= self.values[j];
            }
        }
        last
    }
}

fn run_trial(cfg: &RemovalExperimentConfig, seed: TrialSeed) -> RemovalTrial {
    let mut rng = seed.rng(Stream::Aux, 0);
    let mut state = State::new(&cfg.numbers);
    let mut removed_sum = 0.0;
    let mut adversarial_steps = 0;
    for _ in 0..cfg.steps {
        let adversarial = rng.random::<f64>() < cfg.eps;
        let victim = match (adversarial, cfg.adversary) {
            (true, Adversary::RemoveMin) => state.order.first().expect("survivor").1,
            (true, Adversary::RemoveMax) => state.order.last().expect("survivor").1,
            _ => state.proportional(&mut rng),
        };
        if adversarial {
            adversarial_steps += 1;
        }
        removed_sum += state.remove(victim);
        if cfg.decrement == Decrement::HalveRandomSurvivor {
            let i = state.uniform(&mut rng);
            state.set(i, state.values[i] / 2.0);
        }
    }
    let remaining_sum = state.remaining_sum();
    RemovalTrial {
        final_average: remaining_sum / state.alive.len() as f64,
        removed_sum,
        remaining_sum,
        adversarial_steps,
    }
}

/// Runs the abstract removal process: each step is adversarial with
/// probability `eps`, otherwise a survivor is removed with probability
/// proportional to its value. Trials run in parallel on their own streams.
pub fn removal_experiment(cfg: &RemovalExperimentConfig) -> Result<RemovalReport> {
    cfg.validate()?;
    let trials: Vec<RemovalTrial> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| run_trial(cfg, TrialSeed::new(cfg.base_seed, t)))
        .collect();
    let averages: Vec<f64> = trials.iter().map(|t| t.final_average).collect();
    Ok(RemovalReport {
        summary: summarize(&averages),
        regime: Regime::classify(cfg.z(), cfg.eps, cfg.steps),
        trials,
    })
}
