//! Seeding laboratory for k-means++ and its greedy, noisy and moderately
//! greedy variants.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: points, weighted datasets, cached center sets and cost
//!   evaluation.
//! - [`seeding`]: D² distributions, the perturbation adversary and the four
//!   seeding procedures, each returning a [`seeding::SeedingTrace`].
//! - [`lloyd`]: Lloyd refinement of a seeded center set.
//! - [`instances`]: the simplex lower-bound instance, the three-point line,
//!   Gaussian mixtures and the plain-text dataset format.
//! - [`oracle`]: brute-force optima, exact expectations by enumeration,
//!   closed-form potentials and the removal experiment.
//! - [`stats`]: the small set of estimators and tests the Monte Carlo
//!   checks rely on.
//!
//! All randomness flows through [`rng::TrialSeed`], which hands out one
//! ChaCha stream per seeding iteration so that runs are reproducible and
//! different variants can be compared draw for draw.

pub mod error;
pub mod geometry;
pub mod instances;
pub mod lloyd;
pub mod oracle;
pub mod rng;
pub mod seeding;
pub mod stats;

pub use error::{Error, Result};
pub use geometry::{cost, cost_decomposition, mean, CenterSet, Dataset, Point};
