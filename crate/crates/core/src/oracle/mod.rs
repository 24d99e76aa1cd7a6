//! Ground truth for the Monte Carlo checks: exact optima and expectations on
//! tiny inputs, closed-form potentials of the simplex instance and the
//! abstract removal process.

mod closed_form;
mod expectation;
mod partitions;
mod removal;

use serde::{Deserialize, Serialize};

pub use closed_form::phi_i_closed_form;
pub use expectation::{exact_expected_cost, step_law};
pub use partitions::{brute_force_opt, partitions_up_to};
pub use removal::{
    all_ones, one_heavy, removal_experiment, Adversary, Decrement, Regime, RemovalExperimentConfig,
    RemovalReport, RemovalTrial,
};

/// Cap on the number of outcomes an enumeration may visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationBudget {
    pub max_outcomes: u64,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget {
            max_outcomes: 10_000_000,
        }
    }
}
