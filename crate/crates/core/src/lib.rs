//! Structured prediction over finite output spaces through surrogate mean
//! estimation.
//!
//! A task loss `ℓ(z, y)` over finite label sets is embedded bilinearly,
//! `ℓ(z, y) = ⟨ψ(z), φ(y)⟩`. Learning then amounts to estimating the
//! conditional mean `g*(x) = E[φ(Y) | X = x]` and decoding the estimate with
//! `argmin_z ⟨ψ(z), g_n(x)⟩`. The crate provides:
//!
//! * [`loss`]: finite losses, decoding, margin gap and distance to the
//!   decision frontier;
//! * [`estimators`]: k-NN and kernel ridge regression weights and their
//!   hyperparameter schedules;
//! * [`diagnostics`]: empirical margin profiles and exponent fits;
//! * [`synthetic`]: generative problems with known `g*` and the Monte-Carlo
//!   convergence-rate harness.

pub mod diagnostics;
pub mod error;
pub mod estimators;
pub mod loss;
pub mod stats;
pub mod synthetic;

pub use error::{Error, Result};
pub use estimators::{KernelSpec, SampleSet, WeightProfile};
pub use loss::{decode, FiniteLoss, RiskVector, SignedMeasure};
pub use synthetic::{RateExperimentConfig, RateReport, SyntheticProblem};
