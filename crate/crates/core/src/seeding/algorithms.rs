use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::distribution::{d2_distribution, uniform_distribution, Sampler, SamplingDistribution};
use super::perturb::{perturb, PerturbationModel, StrategyView};
use super::trace::{CoverageTracker, IterationRecord, SeedingTrace, StepKind};
use crate::error::{Error, Result};
use crate::geometry::{CenterSet, Dataset};
use crate::rng::{Stream, TrialSeed};

/// How the first center of a greedy run is picked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FirstStep {
    /// One uniform draw, as in plain k-means++.
    #[default]
    Single,
    /// `ℓ` uniform candidates, keep the cost minimiser. With large `ℓ` this is
    /// the deterministic "always take the current minimiser" heuristic.
    Greedy,
}

impl FromStr for FirstStep {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(FirstStep::Single),
            "greedy" => Ok(FirstStep::Greedy),
            other => Err(Error::input(format!("unknown first step '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Variant {
    Plain,
    Greedy { ell: usize, first_step: FirstStep },
    Noisy(PerturbationModel),
    Moderate { ell: usize, p_mix: f64 },
}

impl Variant {
    pub fn greedy(ell: usize) -> Self {
        Variant::Greedy {
            ell,
            first_step: FirstStep::Single,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Variant::Plain | Variant::Noisy(_) => Ok(()),
            Variant::Greedy { ell, .. } if *ell < 1 => Err(Error::input("ell must be >= 1")),
            Variant::Moderate { ell, .. } if *ell < 1 => Err(Error::input("ell must be >= 1")),
            Variant::Moderate { p_mix, .. } if !(0.0..=1.0).contains(p_mix) => Err(Error::input(
                format!("p_mix must lie in [0, 1], got {p_mix}"),
            )),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Seeding {
    pub centers: CenterSet,
    pub trace: SeedingTrace,
}

/// Plain k-means++.
pub fn kmeanspp_seed(x: &Dataset, k: usize, seed: &TrialSeed) -> Result<Seeding> {
    seed_with(x, k, &Variant::Plain, seed)
}

/// Greedy k-means++ with `ell` D² candidates per iteration after the first.
pub fn greedy_seed(x: &Dataset, k: usize, ell: usize, seed: &TrialSeed) -> Result<Seeding> {
    seed_with(x, k, &Variant::greedy(ell), seed)
}

/// k-means++ where every distribution, including the uniform first one,
/// passes through the adversary before sampling.
pub fn noisy_seed(
    x: &Dataset,
    k: usize,
    model: &PerturbationModel,
    seed: &TrialSeed,
) -> Result<Seeding> {
    seed_with(x, k, &Variant::Noisy(model.clone()), seed)
}

/// Each iteration after the first is a plain D² step with probability
/// `p_mix` and a greedy `ell`-candidate step otherwise.
pub fn moderately_greedy_seed(
    x: &Dataset,
    k: usize,
    ell: usize,
    p_mix: f64,
    seed: &TrialSeed,
) -> Result<Seeding> {
    seed_with(x, k, &Variant::Moderate { ell, p_mix }, seed)
}

/// Among `candidates`, the site minimising `Φ(X, C ∪ {u})`; ties go to the
/// lowest site index.
pub fn best_candidate(x: &Dataset, c: &CenterSet, candidates: &[usize]) -> Result<usize> {
    let mut sites = candidates.to_vec();
    sites.sort_unstable();
    sites.dedup();
    let mut best: Option<(usize, f64)> = None;
    for s in sites {
        let v = c.potential_with(x, x.point(s))?;
        if best.is_none_or(|(_, b)| v < b) {
            best = Some((s, v));
        }
    }
    best.map(|(s, _)| s)
        .ok_or_else(|| Error::input("no candidates"))
}

/// Draws `ell` candidates from `sampler` and keeps the best one.
pub fn greedy_choice<R: Rng + ?Sized>(
    x: &Dataset,
    c: &CenterSet,
    sampler: &Sampler,
    ell: usize,
    rng: &mut R,
) -> Result<(usize, Vec<usize>)> {
    let candidates: Vec<usize> = (0..ell).map(|_| sampler.draw(rng)).collect();
    let site = best_candidate(x, c, &candidates)?;
    Ok((site, candidates))
}

/// One moderately greedy step on a fixed center set. The coin is read from
/// `coin_rng` so that the candidate stream is shared with the pure variants.
///
/// Returns `(site, candidates, took_greedy_branch)`.
pub fn moderate_choice<R: Rng + ?Sized, Q: Rng + ?Sized>(
    x: &Dataset,
    c: &CenterSet,
    sampler: &Sampler,
    ell: usize,
    p_mix: f64,
    rng: &mut R,
    coin_rng: &mut Q,
) -> Result<(usize, Vec<usize>, bool)> {
    if coin_rng.random::<f64>() < p_mix {
        let s = sampler.draw(rng);
        Ok((s, vec![s], false))
    } else {
        let (s, cands) = greedy_choice(x, c, sampler, ell, rng)?;
        Ok((s, cands, true))
    }
}

struct Choice {
    site: usize,
    candidates: Vec<usize>,
    hash: u64,
    step: StepKind,
    greedy_branch: Option<bool>,
}

/// Runs any seeding variant for `k` iterations.
pub fn seed_with(x: &Dataset, k: usize, variant: &Variant, seed: &TrialSeed) -> Result<Seeding> {
    if k < 1 {
        return Err(Error::input("k must be >= 1"));
    }
    variant.validate()?;

    let mut centers = CenterSet::empty(x);
    let mut tracker = CoverageTracker::new(x);
    let mut records = Vec::with_capacity(k);
    let mut chosen: Vec<usize> = Vec::with_capacity(k);

    for i in 1..=k {
        let mut rng = seed.iteration(i);
        let choice = if i == 1 {
            let mut dist = uniform_distribution(x);
            if let Variant::Noisy(model) = variant {
                let view = StrategyView {
                    iteration: i,
                    covered_sites: tracker.as_ref().map(|t| t.covered_sites()),
                    chosen_sites: &chosen,
                };
                dist = perturb(
                    model,
                    &dist,
                    &view,
                    &mut seed.rng(Stream::Adversary, i as u64),
                )?;
            }
            let sampler = Sampler::new(&dist);
            let (site, candidates) = match variant {
                Variant::Greedy {
                    ell,
                    first_step: FirstStep::Greedy,
                } => greedy_choice(x, &centers, &sampler, *ell, &mut rng)?,
                _ => {
                    let s = sampler.draw(&mut rng);
                    (s, vec![s])
                }
            };
            Choice {
                site,
                candidates,
                hash: dist.fingerprint(),
                step: StepKind::Uniform,
                greedy_branch: None,
            }
        } else {
            match d2_distribution(x, &centers) {
                Ok(p) => sampled_step(
                    x, &centers, p, variant, i, &tracker, &chosen, seed, &mut rng,
                )?,
                Err(Error::DegeneratePotential) => {
                    let dist = uniform_distribution(x);
                    let s = Sampler::new(&dist).draw(&mut rng);
                    Choice {
                        site: s,
                        candidates: vec![s],
                        hash: dist.fingerprint(),
                        step: StepKind::Degenerate,
                        greedy_branch: None,
                    }
                }
                Err(e) => return Err(e),
            }
        };

        centers.push(x, x.point(choice.site).clone())?;
        let coverage = tracker
            .as_mut()
            .map(|t| t.record(i, choice.site, x, &centers));
        chosen.push(choice.site);
        records.push(IterationRecord {
            iteration: i,
            chosen_site: choice.site,
            candidates: choice.candidates,
            distribution_hash: choice.hash,
            step: choice.step,
            greedy_branch: choice.greedy_branch,
            potential: centers.potential(),
            coverage,
        });
    }

    Ok(Seeding {
        centers,
        trace: SeedingTrace {
            records,
            psi: tracker.map(|t| t.psi()),
        },
    })
}

#[allow(clippy::too_many_arguments)]
fn sampled_step<R: Rng + ?Sized>(
    x: &Dataset,
    centers: &CenterSet,
    p: SamplingDistribution,
    variant: &Variant,
    iteration: usize,
    tracker: &Option<CoverageTracker<'_>>,
    chosen: &[usize],
    seed: &TrialSeed,
    rng: &mut R,
) -> Result<Choice> {
    let dist = match variant {
        Variant::Noisy(model) => {
            let view = StrategyView {
                iteration,
                covered_sites: tracker.as_ref().map(|t| t.covered_sites()),
                chosen_sites: chosen,
            };
            perturb(
                model,
                &p,
                &view,
                &mut seed.rng(Stream::Adversary, iteration as u64),
            )?
        }
        _ => p,
    };
    let sampler = Sampler::new(&dist);
    let (site, candidates, greedy_branch) = match variant {
        Variant::Plain | Variant::Noisy(_) => {
            let s = sampler.draw(rng);
            (s, vec![s], None)
        }
        Variant::Greedy { ell, .. } => {
            let (s, c) = greedy_choice(x, centers, &sampler, *ell, rng)?;
            (s, c, None)
        }
        Variant::Moderate { ell, p_mix } => {
            let mut coin = seed.rng(Stream::Coin, iteration as u64);
            let (s, c, g) = moderate_choice(x, centers, &sampler, *ell, *p_mix, rng, &mut coin)?;
            (s, c, Some(g))
        }
    };
    Ok(Choice {
        site,
        candidates,
        hash: dist.fingerprint(),
        step: StepKind::Sampled,
        greedy_branch,
    })
}
