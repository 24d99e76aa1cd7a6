//! Monte Carlo runner for the seeding laboratory: per-trial rows and
//! aggregates, trace event replay, parameter sweeps and the `seedlab` CLI
//! plumbing.

pub mod config;
pub mod events;
pub mod experiment;
pub mod sweep;

pub use config::{Algorithm, ExperimentConfig, Params};
pub use events::{verify_trace_events, EventSummary, SimplexEvents};
pub use experiment::{
    ratio_denominator, read_rows, run_experiment, run_on_dataset, write_report, Aggregates,
    Denominator, ExperimentReport, RowEvents, TrialRow,
};
pub use sweep::{sweep, AxisParam, SweepAxis, SweepRow, SweepTable};

use seedlab_core::Error;

/// Process exit code for an error: 1 input or config, 2 budget refusal,
/// 3 I/O.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BudgetExceeded { .. } => 2,
        Error::Io(_) => 3,
        _ => 1,
    }
}
