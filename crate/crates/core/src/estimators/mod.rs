//! Surrogate estimators of the conditional mean `g*(x) = E[φ(Y) | X = x]`.
//!
//! Every estimator here is linear in the labels: at a query point it
//! produces a [`WeightProfile`] `α(x)` over the training samples and
//! `g_n(x) = Σ_i α_i(x) φ(Y_i)` ([`predict_surrogate`]). Decoding `g_n(x)`
//! with [`crate::loss::decode`] gives the plug-in predictor `f_n(x)`.

mod io;
mod kernel;
mod knn;
mod krr;
mod schedule;

pub use kernel::{KernelFamily, KernelSpec};
pub use io::read_points_csv;
pub use knn::{knn_weights, Metric};
pub use krr::{krr_fit, krr_weights, KrrCoefficients, KrrFactorization};
pub use schedule::{knn_schedule, krr_schedule};

use crate::error::{contract, Result};
use crate::loss::{FiniteLoss, SignedMeasure};

/// Training inputs in `ℝ^d` with observation-label indices.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    dim: usize,
    // row-major n x dim
    inputs: Vec<f64>,
    labels: Vec<usize>,
}

impl SampleSet {
    pub fn new(dim: usize, inputs: Vec<f64>, labels: Vec<usize>) -> Result<Self> {
        if dim == 0 {
            return contract("sample inputs need at least one coordinate");
        }
        if labels.is_empty() {
            return contract("sample set is empty");
        }
        if inputs.len() != dim * labels.len() {
            return contract(format!(
                "{} coordinates do not form {} points of dimension {dim}",
                inputs.len(),
                labels.len()
            ));
        }
        if let Some(i) = inputs.iter().position(|v| !v.is_finite()) {
            return contract(format!("coordinate {} of point {} is not finite", i % dim, i / dim));
        }
        Ok(Self { dim, inputs, labels })
    }

    pub fn from_rows(rows: &[Vec<f64>], labels: Vec<usize>) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return contract("sample points have differing dimensions");
        }
        Self::new(dim, rows.concat(), labels)
    }

    /// One-dimensional inputs.
    pub fn from_scalars(xs: Vec<f64>, labels: Vec<usize>) -> Result<Self> {
        Self::new(1, xs, labels)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.inputs[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> {
        self.inputs.chunks_exact(self.dim)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Reorders samples so that sample `i` of the result is sample `perm[i]`
    /// of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.len() {
            return contract("permutation length differs from the sample count");
        }
        let mut inputs = Vec::with_capacity(self.inputs.len());
        let mut labels = Vec::with_capacity(self.len());
        for &p in perm {
            inputs.extend_from_slice(self.point(p));
            labels.push(self.labels[p]);
        }
        Self::new(self.dim, inputs, labels)
    }

    pub(crate) fn check_query(&self, query: &[f64]) -> Result<()> {
        if query.len() != self.dim {
            return contract(format!(
                "query has dimension {}, samples have {}",
                query.len(),
                self.dim
            ));
        }
        if query.iter().any(|v| !v.is_finite()) {
            return contract("query has a non-finite coordinate");
        }
        Ok(())
    }

    pub(crate) fn check_labels(&self, n_y: usize) -> Result<()> {
        if let Some(&bad) = self.labels.iter().find(|&&y| y >= n_y) {
            return contract(format!("sample label index {bad} out of range for {n_y} observation labels"));
        }
        Ok(())
    }
}

/// Per-sample weights `α(x)` at one query point.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightProfile(Vec<f64>);

impl WeightProfile {
    pub fn new(alpha: Vec<f64>) -> Self {
        Self(alpha)
    }

    pub fn alpha(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn nonzeros(&self) -> usize {
        self.0.iter().filter(|&&a| a != 0.0).count()
    }
}

/// `g_n(x)[y] = Σ_{i : Y_i = y} α_i(x)`.
pub fn predict_surrogate(profile: &WeightProfile, data: &SampleSet, loss: &FiniteLoss) -> Result<SignedMeasure> {
    if profile.len() != data.len() {
        return contract(format!(
            "weight profile has {} entries for {} samples",
            profile.len(),
            data.len()
        ));
    }
    data.check_labels(loss.n_y())?;
    let mut out = vec![0.0; loss.n_y()];
    for (&a, &y) in profile.alpha().iter().zip(data.labels()) {
        out[y] += a;
    }
    Ok(SignedMeasure::new(out))
}
