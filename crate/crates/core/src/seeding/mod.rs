//! D² sampling and the four seeding procedures.

mod algorithms;
mod distribution;
mod perturb;
mod trace;

pub use algorithms::{
    best_candidate, greedy_choice, greedy_seed, kmeanspp_seed, moderate_choice,
    moderately_greedy_seed, noisy_seed, seed_with, FirstStep, Seeding, Variant,
};
pub use distribution::{
    d2_distribution, sample, uniform_distribution, Sampler, SamplingDistribution,
};
pub use perturb::{perturb, project, CustomStrategy, PerturbationModel, Strategy, StrategyView};
pub use trace::{Coverage, IterationRecord, SeedingTrace, StepKind};
