//! Finite losses, their canonical bilinear embedding, and plug-in decoding.
//!
//! A loss `ℓ : Z × Y → ℝ₊` over finite label sets is stored as its matrix.
//! The embedding is fixed: `ψ(z)` is row `z` of the matrix and `φ(y)` is the
//! `y`-th standard basis vector of `ℝ^{|Y|}`, so `⟨ψ(z), φ(y)⟩ = ℓ(z, y)`
//! holds exactly. Surrogate estimates and conditional means are then
//! [`SignedMeasure`]s over `Y`, and decoding is the argmin of the
//! [`RiskVector`] `⟨ψ(z), μ⟩`.

mod geometry;
mod io;

pub use geometry::{
    binary_decode, binary_frontier_distance, frontier_distance, frontier_witness, is_on_frontier,
    margin_gap, FrontierWitness, SandwichConstants,
};

use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};

/// Absolute tolerance on risk differences below which two labels are
/// considered tied by the diagnostics.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// A loss matrix over ordered prediction labels `Z` and observation labels `Y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "io::LossFile", into = "io::LossFile")]
pub struct FiniteLoss {
    z_labels: Vec<String>,
    y_labels: Vec<String>,
    // row-major |Z| x |Y|
    matrix: Vec<f64>,
}

impl FiniteLoss {
    /// Builds a loss from its labels and rows. Every row must have `|Y|`
    /// finite, non-negative entries and labels must be unique.
    pub fn new(z_labels: Vec<String>, y_labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if z_labels.is_empty() {
            return contract("loss needs at least one prediction label");
        }
        if y_labels.is_empty() {
            return contract("loss needs at least one observation label");
        }
        if rows.len() != z_labels.len() {
            return contract(format!(
                "loss matrix has {} rows but {} prediction labels",
                rows.len(),
                z_labels.len()
            ));
        }
        check_unique(&z_labels, "prediction")?;
        check_unique(&y_labels, "observation")?;
        let mut matrix = Vec::with_capacity(z_labels.len() * y_labels.len());
        for (z, row) in rows.iter().enumerate() {
            if row.len() != y_labels.len() {
                return contract(format!(
                    "loss row {z} has {} entries, expected {}",
                    row.len(),
                    y_labels.len()
                ));
            }
            for (y, &v) in row.iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return contract(format!("loss entry ({z}, {y}) = {v} is not finite and non-negative"));
                }
            }
            matrix.extend_from_slice(row);
        }
        Ok(Self { z_labels, y_labels, matrix })
    }

    /// The 0-1 loss `ℓ(z, y) = 1{z ≠ y}` with `Z = Y = labels`.
    pub fn zero_one<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        let labels: Vec<String> = labels.iter().map(|s| s.as_ref().to_owned()).collect();
        let n = labels.len();
        let rows = (0..n)
            .map(|z| (0..n).map(|y| if z == y { 0.0 } else { 1.0 }).collect())
            .collect();
        Self::new(labels.clone(), labels, rows)
    }

    /// Binary classification over `{-1, +1}` (in that order) with the 0-1 loss.
    pub fn binary() -> Self {
        Self::zero_one(&["-1", "+1"]).expect("static loss is valid")
    }

    /// The three-class loss over `{a, b, c}` with `ℓ(a,b) = ℓ(a,c) = 1`,
    /// `ℓ(b,c) = 2` (symmetric) and zero diagonal.
    pub fn three_class() -> Self {
        let labels = vec!["a".to_owned(), "b".to_owned(), "c".to_owned()];
        let rows = vec![
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 2.0],
            vec![1.0, 2.0, 0.0],
        ];
        Self::new(labels.clone(), labels, rows).expect("static loss is valid")
    }

    pub fn z_labels(&self) -> &[String] {
        &self.z_labels
    }

    pub fn y_labels(&self) -> &[String] {
        &self.y_labels
    }

    pub fn n_z(&self) -> usize {
        self.z_labels.len()
    }

    pub fn n_y(&self) -> usize {
        self.y_labels.len()
    }

    pub fn entry(&self, z: usize, y: usize) -> f64 {
        self.matrix[z * self.n_y() + y]
    }

    /// `ψ(z)`: row `z` of the loss matrix.
    pub fn psi(&self, z: usize) -> &[f64] {
        let n_y = self.n_y();
        &self.matrix[z * n_y..(z + 1) * n_y]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.matrix.chunks_exact(self.n_y())
    }

    pub fn z_index(&self, label: &str) -> Option<usize> {
        self.z_labels.iter().position(|l| l == label)
    }

    pub fn y_index(&self, label: &str) -> Option<usize> {
        self.y_labels.iter().position(|l| l == label)
    }

    /// `c_ψ = max_z ‖ψ(z)‖₂`.
    pub fn c_psi(&self) -> f64 {
        self.rows().map(norm2).fold(0.0, f64::max)
    }

    /// `‖ψ(a) − ψ(b)‖₂`.
    pub fn psi_distance(&self, a: usize, b: usize) -> f64 {
        self.psi(a)
            .iter()
            .zip(self.psi(b))
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }

    pub(crate) fn check_measure(&self, mu: &SignedMeasure) -> Result<()> {
        if mu.len() != self.n_y() {
            return contract(format!(
                "measure has {} weights but the loss has {} observation labels",
                mu.len(),
                self.n_y()
            ));
        }
        Ok(())
    }
}

fn check_unique(labels: &[String], what: &str) -> Result<()> {
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return contract(format!("duplicate {what} label {l:?}"));
        }
    }
    Ok(())
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// A (possibly signed) weight sequence over the observation labels, i.e. an
/// element of the embedding space `ℝ^{|Y|}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SignedMeasure(Vec<f64>);

impl SignedMeasure {
    pub fn new(weights: Vec<f64>) -> Self {
        Self(weights)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    /// `φ(y)`: the unit mass on label `y`.
    pub fn dirac(len: usize, y: usize) -> Self {
        let mut w = vec![0.0; len];
        w[y] = 1.0;
        Self(w)
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Non-negative weights summing to one within `tol`.
    pub fn is_probability(&self, tol: f64) -> bool {
        self.0.iter().all(|&w| w >= 0.0) && (self.total_mass() - 1.0).abs() <= tol
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self(self.0.iter().map(|w| c * w).collect())
    }

    /// `self + s · direction`, componentwise.
    pub fn shifted(&self, direction: &[f64], s: f64) -> Self {
        Self(self.0.iter().zip(direction).map(|(w, d)| w + s * d).collect())
    }
}

impl From<Vec<f64>> for SignedMeasure {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// Expected losses `⟨ψ(z), μ⟩` for every prediction label.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskVector(Vec<f64>);

impl RiskVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Index of the smallest value; ties go to the lowest index.
    pub fn argmin(&self) -> usize {
        let mut best = 0;
        for (z, &v) in self.0.iter().enumerate().skip(1) {
            if v < self.0[best] {
                best = z;
            }
        }
        best
    }

    /// `(smallest, second smallest)` values. Needs at least two entries.
    pub(crate) fn two_smallest(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut second = f64::INFINITY;
        for &v in &self.0 {
            if v < lo {
                second = lo;
                lo = v;
            } else if v < second {
                second = v;
            }
        }
        (lo, second)
    }
}

/// `values[z] = Σ_y L[z][y] · μ[y]`.
pub fn risk_vector(loss: &FiniteLoss, mu: &SignedMeasure) -> Result<RiskVector> {
    loss.check_measure(mu)?;
    Ok(risk_vector_unchecked(loss, mu.weights()))
}

pub(crate) fn risk_vector_unchecked(loss: &FiniteLoss, mu: &[f64]) -> RiskVector {
    RiskVector(
        loss.rows()
            .map(|row| row.iter().zip(mu).map(|(l, w)| l * w).sum())
            .collect(),
    )
}

/// Plug-in decoding: the index in `loss.z_labels()` minimizing `⟨ψ(z), μ⟩`,
/// ties broken towards the lowest index.
pub fn decode(loss: &FiniteLoss, mu: &SignedMeasure) -> Result<usize> {
    Ok(risk_vector(loss, mu)?.argmin())
}
