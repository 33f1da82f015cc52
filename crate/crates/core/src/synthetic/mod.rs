//! Synthetic problems with exact `g*`, `f*` and frontier distance, exact
//! excess-risk evaluation, and the convergence-rate harness.

mod experiment;
mod problem;
mod report;

pub use experiment::{
    fit_slope, rate_experiment, rate_experiment_with_workers, run_trial, trial_seed, EstimatorConfig,
    RateExperimentConfig, RateReport, SizeSummary, SlopeFit, SlopeWindow,
};
pub use problem::{ProblemKind, SyntheticProblem, STAIRCASE_PERIOD};
pub use report::sig17;
