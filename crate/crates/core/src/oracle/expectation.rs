use std::cell::Cell;

use super::EnumerationBudget;
use crate::error::{Error, Result};
use crate::geometry::{CenterSet, Dataset};
use crate::rng::TrialSeed;
use crate::seeding::{
    d2_distribution, perturb, uniform_distribution, FirstStep, SamplingDistribution, StrategyView,
    Variant,
};

struct Enumerator<'a> {
    x: &'a Dataset,
    k: usize,
    variant: &'a Variant,
    budget: u64,
    outcomes: Cell<u64>,
}

impl Enumerator<'_> {
    fn charge(&self, n: u64) -> Result<()> {
        let used = self.outcomes.get().saturating_add(n);
        self.outcomes.set(used);
        if used > self.budget {
            return Err(Error::BudgetExceeded {
                budget: self.budget,
                what: "seeding outcome tree".into(),
            });
        }
        Ok(())
    }

    fn covered_mask(&self, chosen: &[usize]) -> Option<Vec<bool>> {
        let labels = self.x.labels()?;
        let hit: Vec<usize> = chosen.iter().map(|&s| labels[s]).collect();
        Some(labels.iter().map(|l| hit.contains(l)).collect())
    }

    /// Exact law of the site picked by a greedy step: every `ℓ`-tuple of
    /// candidates is enumerated with its probability and mapped to its
    /// argmin (lowest index on ties).
    fn greedy_law(&self, centers: &CenterSet, base: &[f64], ell: usize) -> Result<Vec<f64>> {
        let support: Vec<usize> = (0..base.len()).filter(|&s| base[s] > 0.0).collect();
        let m = support.len();
        let tuples = (m as u64).checked_pow(ell as u32).unwrap_or(u64::MAX);
        self.charge(tuples)?;
        let after: Vec<f64> = support
            .iter()
            .map(|&s| centers.potential_with(self.x, self.x.point(s)))
            .collect::<Result<_>>()?;

        let mut law = vec![0.0; base.len()];
        let mut idx = vec![0usize; ell];
        loop {
            let mut prob = 1.0;
            let mut best = idx[0];
            for &j in &idx {
                prob *= base[support[j]];
                // `support` is ascending, so the lowest index wins ties.
                if after[j] < after[best] || (after[j] == after[best] && j < best) {
                    best = j;
                }
            }
            law[support[best]] += prob;

            let mut pos = 0;
            loop {
                if pos == ell {
                    return Ok(law);
                }
                idx[pos] += 1;
                if idx[pos] < m {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }

    fn choice_law(
        &self,
        centers: &CenterSet,
        iteration: usize,
        chosen: &[usize],
    ) -> Result<Vec<f64>> {
        let base = if iteration == 1 {
            uniform_distribution(self.x)
        } else {
            match d2_distribution(self.x, centers) {
                Ok(p) => p,
                Err(Error::DegeneratePotential) => {
                    return Ok(uniform_distribution(self.x).probs().to_vec())
                }
                Err(e) => return Err(e),
            }
        };
        match self.variant {
            Variant::Plain => Ok(base.probs().to_vec()),
            Variant::Noisy(model) => {
                let mask = self.covered_mask(chosen);
                let view = StrategyView {
                    iteration,
                    covered_sites: mask.as_deref(),
                    chosen_sites: chosen,
                };
                let mut unused = TrialSeed::new(0, 0).iteration(0);
                Ok(perturb(model, &base, &view, &mut unused)?.probs().to_vec())
            }
            Variant::Greedy { ell, first_step } => {
                if iteration == 1 && *first_step == FirstStep::Single {
                    Ok(base.probs().to_vec())
                } else {
                    self.greedy_law(centers, base.probs(), *ell)
                }
            }
            Variant::Moderate { ell, p_mix } => {
                if iteration == 1 {
                    return Ok(base.probs().to_vec());
                }
                let greedy = self.greedy_law(centers, base.probs(), *ell)?;
                Ok(base
                    .probs()
                    .iter()
                    .zip(&greedy)
                    .map(|(p, g)| p_mix * p + (1.0 - p_mix) * g)
                    .collect())
            }
        }
    }

    fn expand(
        &self,
        centers: &CenterSet,
        iteration: usize,
        chosen: &mut Vec<usize>,
    ) -> Result<f64> {
        if iteration > self.k {
            self.charge(1)?;
            return Ok(centers.potential());
        }
        let law = self.choice_law(centers, iteration, chosen)?;
        let mut expected = 0.0;
        for (site, &p) in law.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let mut next = centers.clone();
            next.push(self.x, self.x.point(site).clone())?;
            chosen.push(site);
            expected += p * self.expand(&next, iteration + 1, chosen)?;
            chosen.pop();
        }
        Ok(expected)
    }
}

/// Exact expected seeding potential, obtained by walking every sampling
/// outcome with its probability. Greedy steps enumerate all `ℓ`-tuples of
/// candidates. Refuses (rather than approximates) once the outcome count
/// exceeds the budget.
pub fn exact_expected_cost(
    x: &Dataset,
    k: usize,
    variant: &Variant,
    budget: &EnumerationBudget,
) -> Result<f64> {
    if k < 1 {
        return Err(Error::input("k must be >= 1"));
    }
    match variant {
        Variant::Greedy { ell, .. } | Variant::Moderate { ell, .. } if *ell < 1 => {
            return Err(Error::input("ell must be >= 1"))
        }
        Variant::Moderate { p_mix, .. } if !(0.0..=1.0).contains(p_mix) => {
            return Err(Error::input("p_mix must lie in [0, 1]"))
        }
        Variant::Noisy(m) if m.strategy().is_random() => {
            return Err(Error::input("randomised adversaries cannot be enumerated"))
        }
        _ => {}
    }
    let e = Enumerator {
        x,
        k,
        variant,
        budget: budget.max_outcomes,
        outcomes: Cell::new(0),
    };
    e.expand(&CenterSet::empty(x), 1, &mut Vec::with_capacity(k))
}

/// Exact law of the site chosen in one step from a frozen center set.
pub fn step_law(
    x: &Dataset,
    centers: &CenterSet,
    variant: &Variant,
) -> Result<SamplingDistribution> {
    let e = Enumerator {
        x,
        k: centers.len() + 1,
        variant,
        budget: EnumerationBudget::default().max_outcomes,
        outcomes: Cell::new(0),
    };
    let iteration = centers.len() + 1;
    SamplingDistribution::new(e.choice_law(centers, iteration, &[])?)
}
