//! Monte-Carlo convergence-rate experiments.
//!
//! For every sample size `n` and trial, a dataset is drawn with a seed
//! derived from `(master_seed, n_index, trial_index)`, the estimator is fit
//! with its scheduled hyperparameter, and the plug-in predictor is scored on
//! the regular evaluation grid. Trials run on a rayon pool and are reduced by
//! index, so reports are bit-identical for a given configuration.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::problem::{ProblemKind, SyntheticProblem};
use crate::error::{contract, Error, Result};
use crate::estimators::{
    knn_schedule, knn_weights, krr_fit, krr_schedule, predict_surrogate, KernelSpec, Metric,
};
use crate::loss::decode;
use crate::stats::{linear_fit, log_spaced_sizes, mean_and_stderr};

/// Estimator and hyperparameter schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EstimatorConfig {
    /// k-NN with `k_n = ⌊k₀ n^{2β/(2β+1)}⌋`.
    Knn { k0: f64, beta: f64 },
    /// Kernel ridge regression with `λ_n = λ₀ n^{−1/(2q+σ)}`. `p` (the
    /// interpolation exponent) only enters the theoretical slope.
    Krr {
        kernel: KernelSpec,
        lambda0: f64,
        q: f64,
        sigma: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        p: Option<f64>,
    },
    /// k-NN with a constant `k` (clamped to `n`).
    FixedKnn { k: usize },
    /// Kernel ridge regression with a constant `λ`.
    FixedKrr { kernel: KernelSpec, lambda: f64 },
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                contract(format!("{name} = {v} must be positive and finite"))
            }
        };
        match *self {
            EstimatorConfig::Knn { k0, beta } => {
                positive("k0", k0)?;
                positive("beta", beta)
            }
            EstimatorConfig::Krr { kernel, lambda0, q, sigma, p } => {
                kernel.validate()?;
                positive("lambda0", lambda0)?;
                if (2.0 * q + sigma).is_nan() || 2.0 * q + sigma <= 0.0 {
                    return contract(format!("2q + sigma = {} must be positive", 2.0 * q + sigma));
                }
                if let Some(p) = p {
                    if !p.is_finite() {
                        return contract("interpolation exponent p must be finite");
                    }
                }
                Ok(())
            }
            EstimatorConfig::FixedKnn { k } => {
                if k == 0 {
                    return contract("fixed k must be at least 1");
                }
                Ok(())
            }
            EstimatorConfig::FixedKrr { kernel, lambda } => {
                kernel.validate()?;
                positive("lambda", lambda)
            }
        }
    }

    /// `k` or `λ` used at sample size `n`.
    pub fn hyperparameter(&self, n: usize) -> f64 {
        match *self {
            EstimatorConfig::Knn { k0, beta } => knn_schedule(n, k0, beta) as f64,
            EstimatorConfig::Krr { lambda0, q, sigma, .. } => krr_schedule(n, lambda0, q, sigma),
            EstimatorConfig::FixedKnn { k } => k.min(n) as f64,
            EstimatorConfig::FixedKrr { lambda, .. } => lambda,
        }
    }

    /// Exponent of the excess-risk bound for a problem with margin exponent
    /// `alpha`: `−β(α+1)/(2β+1)` for scheduled k-NN, `−(q−p)(1+α)/(2q+σ)` for
    /// scheduled KRR when `p` is given.
    pub fn theoretical_slope(&self, alpha: Option<f64>) -> Option<f64> {
        let alpha = alpha?;
        match *self {
            EstimatorConfig::Knn { beta, .. } => Some(-beta * (alpha + 1.0) / (2.0 * beta + 1.0)),
            EstimatorConfig::Krr { q, sigma, p: Some(p), .. } => Some(-(q - p) * (1.0 + alpha) / (2.0 * q + sigma)),
            _ => None,
        }
    }
}

/// Which sample sizes the log-log slope is fit on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SlopeWindow {
    /// `n ≥ n_max / 10`.
    #[default]
    TopDecade,
    All,
    Range { min_n: usize, max_n: usize },
}

impl SlopeWindow {
    fn contains(&self, n: usize, n_max: usize) -> bool {
        match *self {
            SlopeWindow::TopDecade => n * 10 >= n_max,
            SlopeWindow::All => true,
            SlopeWindow::Range { min_n, max_n } => (min_n..=max_n).contains(&n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateExperimentConfig {
    pub problem: SyntheticProblem,
    pub estimator: EstimatorConfig,
    #[serde(default = "default_n_grid")]
    pub n_grid: Vec<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_eval_grid_size")]
    pub eval_grid_size: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub slope_window: SlopeWindow,
}

fn default_n_grid() -> Vec<usize> {
    log_spaced_sizes(10, 100_000, 13)
}

fn default_trials() -> usize {
    100
}

fn default_eval_grid_size() -> usize {
    100
}

impl RateExperimentConfig {
    /// Configuration with the default grid (10 … 10⁵), 100 trials, and a
    /// 100-point evaluation partition.
    pub fn new(problem: SyntheticProblem, estimator: EstimatorConfig) -> Self {
        Self {
            problem,
            estimator,
            n_grid: default_n_grid(),
            trials: default_trials(),
            eval_grid_size: default_eval_grid_size(),
            master_seed: 0,
            slope_window: SlopeWindow::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.estimator.validate()?;
        if self.n_grid.is_empty() {
            return contract("n_grid is empty");
        }
        if self.n_grid[0] == 0 {
            return contract("n_grid entries must be at least 1");
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return contract("n_grid must be strictly increasing");
        }
        if self.trials == 0 {
            return contract("trials must be at least 1");
        }
        if self.eval_grid_size == 0 {
            return contract("eval_grid_size must be at least 1");
        }
        if let SlopeWindow::Range { min_n, max_n } = self.slope_window {
            if min_n > max_n {
                return contract("slope window range is empty");
            }
        }
        Ok(())
    }
}

/// Statistics of one sample size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeSummary {
    pub n: usize,
    /// `k` or `λ` used at this size.
    pub hyperparameter: f64,
    pub mean_excess_risk: f64,
    pub stderr: f64,
    /// Trials whose excess risk was exactly zero.
    pub zero_count: usize,
}

/// Least-squares fit of `log(risk)` against `log(n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    /// `C` in `risk ≈ C · n^{slope}`.
    pub constant: f64,
    pub r_squared: f64,
    /// Sample sizes used by the fit.
    pub used_n: Vec<usize>,
    /// Sample sizes inside the window dropped because their risk was zero.
    pub zero_n: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    /// Effective configuration, defaults resolved.
    pub config: RateExperimentConfig,
    pub per_n: Vec<SizeSummary>,
    /// `trial_risks[i][t]`: excess risk of trial `t` at `n_grid[i]`.
    pub trial_risks: Vec<Vec<f64>>,
    pub fitted_slope: Option<f64>,
    pub fit: Option<SlopeFit>,
    pub theoretical_slope: Option<f64>,
    pub regime_note: Option<String>,
}

impl RateReport {
    pub fn means(&self) -> Vec<f64> {
        self.per_n.iter().map(|s| s.mean_excess_risk).collect()
    }
}

/// Slope of `log(risk)` against `log(n)` over `window`, skipping zero risks.
pub fn fit_slope(n_values: &[usize], risks: &[f64], window: SlopeWindow) -> Result<SlopeFit> {
    if n_values.len() != risks.len() {
        return contract("n values and risks differ in length");
    }
    if n_values.windows(2).any(|w| w[0] >= w[1]) {
        return contract("n values must be strictly increasing");
    }
    if let Some(r) = risks.iter().find(|r| !r.is_finite() || **r < 0.0) {
        return contract(format!("risk {r} is not a finite non-negative number"));
    }
    let n_max = n_values.last().copied().unwrap_or(0);
    let mut used_n = Vec::new();
    let mut zero_n = Vec::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&n, &r) in n_values.iter().zip(risks) {
        if !window.contains(n, n_max) {
            continue;
        }
        if r == 0.0 {
            zero_n.push(n);
            continue;
        }
        used_n.push(n);
        xs.push((n as f64).ln());
        ys.push(r.ln());
    }
    if used_n.len() < 3 {
        return Err(Error::ExponentialRegime { nonzero: used_n.len() });
    }
    let line = linear_fit(&xs, &ys).ok_or_else(|| Error::Internal("degenerate slope fit".into()))?;
    Ok(SlopeFit {
        slope: line.slope,
        constant: line.intercept.exp(),
        r_squared: line.r_squared,
        used_n,
        zero_n,
    })
}

/// Seed of one trial: splitmix64 chained over `(master, n_index, trial)`.
pub fn trial_seed(master_seed: u64, n_index: usize, trial: usize) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    mix(mix(mix(master_seed) ^ n_index as u64) ^ trial as u64)
}

/// Excess risk of one trial at sample size `n`.
pub fn run_trial(config: &RateExperimentConfig, grid: &[f64], n: usize, seed: u64) -> Result<f64> {
    let problem = &config.problem;
    let loss = problem.loss();
    let data = problem.sample(n, seed)?;
    let mut predictions = Vec::with_capacity(grid.len());
    match config.estimator {
        EstimatorConfig::Knn { .. } | EstimatorConfig::FixedKnn { .. } => {
            let k = config.estimator.hyperparameter(n) as usize;
            for &x in grid {
                let w = knn_weights(&[x], &data, k, Metric::Euclidean)?;
                predictions.push(decode(loss, &predict_surrogate(&w, &data, loss)?)?);
            }
        }
        EstimatorConfig::Krr { kernel, .. } | EstimatorConfig::FixedKrr { kernel, .. } => {
            let lambda = config.estimator.hyperparameter(n);
            let coefficients = krr_fit(&data, &kernel, lambda)?.coefficients(&data, loss.n_y())?;
            for &x in grid {
                predictions.push(decode(loss, &coefficients.predict(&[x], &data, &kernel)?)?);
            }
        }
    }
    problem.excess_risk(&predictions, grid)
}

/// Runs the experiment on the current rayon pool.
pub fn rate_experiment(config: &RateExperimentConfig) -> Result<RateReport> {
    config.validate()?;
    let grid = config.problem.eval_grid(config.eval_grid_size);
    let jobs: Vec<(usize, usize)> = (0..config.n_grid.len())
        .flat_map(|i| (0..config.trials).map(move |t| (i, t)))
        .collect();
    let risks: Vec<f64> = jobs
        .par_iter()
        .map(|&(i, t)| run_trial(config, &grid, config.n_grid[i], trial_seed(config.master_seed, i, t)))
        .collect::<Result<Vec<f64>>>()?;

    let trial_risks: Vec<Vec<f64>> = risks.chunks(config.trials).map(<[f64]>::to_vec).collect();
    let per_n: Vec<SizeSummary> = config
        .n_grid
        .iter()
        .zip(&trial_risks)
        .map(|(&n, r)| {
            let (mean, stderr) = mean_and_stderr(r);
            SizeSummary {
                n,
                hyperparameter: config.estimator.hyperparameter(n),
                mean_excess_risk: mean,
                stderr,
                zero_count: r.iter().filter(|&&v| v == 0.0).count(),
            }
        })
        .collect();

    let means: Vec<f64> = per_n.iter().map(|s| s.mean_excess_risk).collect();
    let (fit, regime_note) = match fit_slope(&config.n_grid, &means, config.slope_window) {
        Ok(fit) => {
            let mut notes = Vec::new();
            let in_window = fit.used_n.len() + fit.zero_n.len();
            if in_window < config.n_grid.len() {
                notes.push(format!(
                    "{} early sample sizes excluded from the fit window",
                    config.n_grid.len() - in_window
                ));
            }
            if !fit.zero_n.is_empty() {
                notes.push(format!("zero mean excess risk at n = {:?} excluded", fit.zero_n));
            }
            (Some(fit), (!notes.is_empty()).then(|| notes.join("; ")))
        }
        Err(Error::ExponentialRegime { nonzero }) => (
            None,
            Some(format!(
                "exponential regime: only {nonzero} nonzero mean risks in the fit window, slope undefined"
            )),
        ),
        Err(e) => return Err(e),
    };

    Ok(RateReport {
        config: config.clone(),
        fitted_slope: fit.as_ref().map(|f| f.slope),
        fit,
        theoretical_slope: config.estimator.theoretical_slope(config.problem.margin_exponent()),
        per_n,
        trial_risks,
        regime_note,
    })
}

/// Runs the experiment on a dedicated pool of `workers` threads.
pub fn rate_experiment_with_workers(config: &RateExperimentConfig, workers: usize) -> Result<RateReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Internal(format!("cannot build worker pool: {e}")))?;
    pool.install(|| rate_experiment(config))
}

impl RateExperimentConfig {
    /// Shorthand for the power-margin problem with scheduled k-NN.
    pub fn power_margin_knn(alpha: f64, k0: f64, beta: f64) -> Result<Self> {
        Ok(Self::new(
            SyntheticProblem::new(ProblemKind::PowerMargin { alpha })?,
            EstimatorConfig::Knn { k0, beta },
        ))
    }
}
