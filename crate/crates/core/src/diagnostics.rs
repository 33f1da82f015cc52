//! Margin diagnostics: the empirical law of `d(g*(X), F)`, no-density and
//! low-density checks, and a log-log fit of the exponent `α` in
//! `P(d(g*(X), F) < t) ≤ c_α tᵅ`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::loss::{frontier_distance, FiniteLoss, SignedMeasure};
use crate::stats::{linear_fit, log_spaced};
use crate::synthetic::{sig17, SyntheticProblem};

/// Smallest threshold of the default grid.
pub const DEFAULT_MIN_THRESHOLD: f64 = 1e-3;
/// Number of thresholds in the default grid.
pub const DEFAULT_THRESHOLD_COUNT: usize = 50;
/// Fraction of thresholds dropped at each end by the default fit window.
pub const DEFAULT_TRIM: f64 = 0.1;

/// Empirical CDF of the frontier distance on a threshold grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginProfile {
    pub thresholds: Vec<f64>,
    /// `cdf[j] = P̂(d < thresholds[j])`.
    pub cdf: Vec<f64>,
    pub sample_count: usize,
}

/// 50 log-spaced thresholds from `1e-3` to `max_distance`.
pub fn default_thresholds(max_distance: f64) -> Result<Vec<f64>> {
    if !(max_distance > DEFAULT_MIN_THRESHOLD && max_distance.is_finite()) {
        return contract(format!(
            "largest observed distance {max_distance} must exceed {DEFAULT_MIN_THRESHOLD}"
        ));
    }
    Ok(log_spaced(DEFAULT_MIN_THRESHOLD, max_distance, DEFAULT_THRESHOLD_COUNT))
}

/// Profile of precomputed frontier distances.
pub fn margin_profile(distances: &[f64], thresholds: &[f64]) -> Result<MarginProfile> {
    if distances.is_empty() {
        return contract("margin profile needs at least one evaluation point");
    }
    if thresholds.is_empty() {
        return contract("threshold grid is empty");
    }
    if thresholds[0] <= 0.0 || thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return contract("thresholds must be positive and strictly increasing");
    }
    if distances.iter().any(|d| d.is_nan()) {
        return contract("frontier distance is NaN");
    }
    let mut sorted = distances.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let cdf = thresholds
        .iter()
        .map(|&t| sorted.partition_point(|&d| d < t) as f64 / n)
        .collect();
    Ok(MarginProfile { thresholds: thresholds.to_vec(), cdf, sample_count: sorted.len() })
}

/// Profile of a synthetic problem at `points` (drawn from, or a quadrature
/// of, `ρ_X`). With `thresholds = None` the default grid is used.
pub fn margin_profile_for_problem(
    problem: &SyntheticProblem,
    points: &[f64],
    thresholds: Option<&[f64]>,
) -> Result<MarginProfile> {
    let distances = points
        .iter()
        .map(|&x| problem.frontier_distance(x))
        .collect::<Result<Vec<f64>>>()?;
    profile_with_grid(&distances, thresholds)
}

/// Profile of explicit conditional means `g*(x)`, using the ambient frontier
/// distance of `loss`.
pub fn margin_profile_from_measures(
    loss: &FiniteLoss,
    measures: &[SignedMeasure],
    thresholds: Option<&[f64]>,
) -> Result<MarginProfile> {
    let distances = measures
        .iter()
        .map(|mu| frontier_distance(loss, mu))
        .collect::<Result<Vec<f64>>>()?;
    profile_with_grid(&distances, thresholds)
}

fn profile_with_grid(distances: &[f64], thresholds: Option<&[f64]>) -> Result<MarginProfile> {
    match thresholds {
        Some(t) => margin_profile(distances, t),
        None => {
            let max = distances.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            margin_profile(distances, &default_thresholds(max)?)
        }
    }
}

/// Which thresholds enter the exponent fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FitWindow {
    /// Drop this fraction of the grid at each end.
    Trim(f64),
    /// Keep thresholds in `[lo, hi]`.
    Range(f64, f64),
}

impl Default for FitWindow {
    fn default() -> Self {
        FitWindow::Trim(DEFAULT_TRIM)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaFit {
    pub alpha_hat: f64,
    pub c_alpha_hat: f64,
    pub r_squared: f64,
    pub fit_range: (f64, f64),
}

pub fn fit_alpha(profile: &MarginProfile) -> Result<AlphaFit> {
    fit_alpha_in(profile, FitWindow::default())
}

/// Least squares on `(log t, log cdf)` over the window, using only points
/// with `0 < cdf < 1`.
pub fn fit_alpha_in(profile: &MarginProfile, window: FitWindow) -> Result<AlphaFit> {
    let m = profile.thresholds.len();
    let (lo_idx, hi_idx) = match window {
        FitWindow::Trim(frac) => {
            if !(0.0..0.5).contains(&frac) {
                return contract(format!("trim fraction {frac} must lie in [0, 0.5)"));
            }
            let drop = (frac * m as f64).floor() as usize;
            (drop, m - drop)
        }
        FitWindow::Range(lo, hi) => {
            let a = profile.thresholds.partition_point(|&t| t < lo);
            let b = profile.thresholds.partition_point(|&t| t <= hi);
            (a, b.max(a))
        }
    };
    if lo_idx >= hi_idx {
        return Err(Error::ProfileDegenerate { usable: 0 });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = profile.thresholds[lo_idx..hi_idx]
        .iter()
        .zip(&profile.cdf[lo_idx..hi_idx])
        .filter(|(_, &c)| c > 0.0 && c < 1.0)
        .map(|(&t, &c)| (t.ln(), c.ln()))
        .unzip();
    if xs.len() < 3 {
        return Err(Error::ProfileDegenerate { usable: xs.len() });
    }
    let line = linear_fit(&xs, &ys).ok_or(Error::ProfileDegenerate { usable: xs.len() })?;
    Ok(AlphaFit {
        alpha_hat: line.slope,
        c_alpha_hat: line.intercept.exp(),
        r_squared: line.r_squared,
        fit_range: (profile.thresholds[lo_idx], profile.thresholds[hi_idx - 1]),
    })
}

/// Largest threshold with empirical mass zero below it (a lower estimate of
/// the no-density margin `t₀`), or `None` if the first threshold already
/// carries mass.
pub fn check_no_density(profile: &MarginProfile) -> Option<f64> {
    let zeros = profile.cdf.iter().take_while(|&&c| c == 0.0).count();
    zeros.checked_sub(1).map(|j| profile.thresholds[j])
}

/// Profile plus fit in the exported JSON layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileReport {
    pub thresholds: Vec<f64>,
    pub cdf: Vec<f64>,
    pub sample_count: usize,
    pub alpha_hat: Option<f64>,
    pub c_alpha_hat: Option<f64>,
    pub r_squared: Option<f64>,
    pub fit_range: Option<[f64; 2]>,
    pub no_density_t0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ProfileReport {
    /// Fits `α` (recording a degenerate profile as a note) and checks for a
    /// no-density gap.
    pub fn build(profile: &MarginProfile, window: FitWindow) -> Result<Self> {
        let (fit, note) = match fit_alpha_in(profile, window) {
            Ok(f) => (Some(f), None),
            Err(e @ Error::ProfileDegenerate { .. }) => (None, Some(e.to_string())),
            Err(e) => return Err(e),
        };
        Ok(Self {
            thresholds: profile.thresholds.clone(),
            cdf: profile.cdf.clone(),
            sample_count: profile.sample_count,
            alpha_hat: fit.as_ref().map(|f| f.alpha_hat),
            c_alpha_hat: fit.as_ref().map(|f| f.c_alpha_hat),
            r_squared: fit.as_ref().map(|f| f.r_squared),
            fit_range: fit.as_ref().map(|f| [f.fit_range.0, f.fit_range.1]),
            no_density_t0: check_no_density(profile),
            note,
        })
    }
}

impl MarginProfile {
    /// Two columns `t, cdf`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "cdf"])?;
        for (&t, &c) in self.thresholds.iter().zip(&self.cdf) {
            w.write_record([sig17(t), sig17(c)])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loss::FiniteLoss;
    use approx::assert_abs_diff_eq;

    fn power_profile(alpha: f64) -> MarginProfile {
        let t = log_spaced(1e-3, 1.0, 50);
        let cdf = t.iter().map(|x: &f64| x.powf(alpha)).collect();
        MarginProfile { thresholds: t, cdf, sample_count: 1 }
    }

    #[test]
    fn exact_power_law_recovers_alpha() {
        for alpha in [0.1, 0.5, 1.0, 2.0] {
            let fit = fit_alpha(&power_profile(alpha)).unwrap();
            assert_abs_diff_eq!(fit.alpha_hat, alpha, epsilon = 1e-9);
            assert_abs_diff_eq!(fit.c_alpha_hat, 1.0, epsilon = 1e-9);
            assert_abs_diff_eq!(fit.r_squared, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn zero_profile_is_degenerate() {
        let p = MarginProfile { thresholds: log_spaced(1e-3, 1.0, 50), cdf: vec![0.0; 50], sample_count: 10 };
        assert!(matches!(fit_alpha(&p), Err(Error::ProfileDegenerate { usable: 0 })));
        assert_eq!(check_no_density(&p), Some(1.0));
    }

    #[test]
    fn constant_distance_profile() {
        let t = log_spaced(1e-3, 1.0, 50);
        let p = margin_profile(&[0.25; 7], &t).unwrap();
        for (&ti, &c) in t.iter().zip(&p.cdf) {
            assert_eq!(c, if ti > 0.25 { 1.0 } else { 0.0 });
        }
        let t0 = check_no_density(&p).unwrap();
        assert!(t0 <= 0.25 && t0 > 0.2);
    }

    #[test]
    fn single_point_gap() {
        let t = [0.1, 0.2, 0.3, 0.4];
        let p = margin_profile(&[0.35], &t).unwrap();
        assert_eq!(check_no_density(&p), Some(0.3));
        let p = margin_profile(&[0.05], &t).unwrap();
        assert_eq!(check_no_density(&p), None);
    }

    #[test]
    fn profile_contract() {
        assert!(margin_profile(&[], &[0.1]).is_err());
        assert!(margin_profile(&[0.1], &[0.2, 0.1]).is_err());
        assert!(margin_profile(&[0.1], &[0.0, 0.1]).is_err());
        assert!(default_thresholds(1e-4).is_err());
    }

    #[test]
    fn identity_problem_cdf_is_t() {
        // g*(x) = x on a regular grid: P(|x| < t) = t
        let problem = SyntheticProblem::power_margin(1.0).unwrap();
        let n = 20_000;
        let grid = problem.eval_grid(n);
        let p = margin_profile_for_problem(&problem, &grid, None).unwrap();
        for (&t, &c) in p.thresholds.iter().zip(&p.cdf) {
            assert!((c - t.min(1.0)).abs() <= 2.0 / (n as f64).sqrt(), "t {t} cdf {c}");
        }
        assert_eq!(check_no_density(&p), None);
    }

    #[test]
    fn staircase_has_no_density() {
        let problem = SyntheticProblem::staircase();
        let grid = problem.eval_grid(5000);
        let p = margin_profile_for_problem(&problem, &grid, Some(&log_spaced(1e-3, 1.0, 50))).unwrap();
        assert!(p.cdf.iter().all(|&c| c == 0.0));
        assert_eq!(check_no_density(&p), Some(1.0));
    }

    #[test]
    fn sampled_small_alpha_fit() {
        use rand::{Rng, SeedableRng};
        let problem = SyntheticProblem::power_margin(0.1).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let xs: Vec<f64> = (0..100_000).map(|_| -1.0 + 2.0 * rng.random::<f64>()).collect();
        let p = margin_profile_for_problem(&problem, &xs, None).unwrap();
        let fit = fit_alpha(&p).unwrap();
        assert!((0.08..=0.12).contains(&fit.alpha_hat), "alpha_hat {}", fit.alpha_hat);
    }

    #[test]
    fn scalar_and_matrix_profiles_are_consistent() {
        // same embedding: exact; one-hot 0-1 embedding: distances scale by 1/√2
        let problem = SyntheticProblem::power_margin(1.0).unwrap();
        let grid = problem.eval_grid(2000);
        let t = log_spaced(1e-3, 0.5, 30);
        let scalar = margin_profile_for_problem(&problem, &grid, Some(&t)).unwrap();
        let direct: Vec<f64> = grid.iter().map(|&x| x.abs()).collect();
        assert_eq!(scalar, margin_profile(&direct, &t).unwrap());

        let measures: Vec<SignedMeasure> = grid.iter().map(|&x| problem.conditional(x).unwrap()).collect();
        let t_scaled: Vec<f64> = t.iter().map(|v| v / 2f64.sqrt()).collect();
        let matrix = margin_profile_from_measures(&FiniteLoss::binary(), &measures, Some(&t_scaled)).unwrap();
        let mismatches = scalar.cdf.iter().zip(&matrix.cdf).filter(|(a, b)| a != b).count();
        // rounding may move a point sitting exactly on a threshold
        assert!(mismatches <= 2, "{mismatches}");
    }

    #[test]
    fn report_layout() {
        let r = ProfileReport::build(&power_profile(1.0), FitWindow::default()).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        for key in ["thresholds", "cdf", "alpha_hat", "c_alpha_hat", "r_squared", "fit_range"] {
            assert!(json.get(key).is_some(), "{key}");
        }
        assert_eq!(json["fit_range"].as_array().unwrap().len(), 2);
        let mut buf = Vec::new();
        power_profile(1.0).write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,cdf\n"));
        assert_eq!(text.lines().count(), 51);
    }
}
