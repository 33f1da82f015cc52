//! Decision regions and the frontier `F` in the embedding space.
//!
//! `R_z` is the polyhedral cone of measures for which `z` minimizes the
//! expected loss; `F` is the set of measures with at least two minimizers.
//! For a measure with a unique minimizer `z*`, `F` is reached exactly when
//! some rival `z'` ties `z*`, so the distance to `F` is the smallest distance
//! to the hyperplanes `⟨ψ(z') − ψ(z*), ξ⟩ = 0`.

use super::{norm2, risk_vector, FiniteLoss, SignedMeasure, TIE_TOLERANCE};
use crate::error::{contract, Result};

/// Best-to-second-best expected-loss gap `γ`.
pub fn margin_gap(loss: &FiniteLoss, mu: &SignedMeasure) -> Result<f64> {
    if loss.n_z() < 2 {
        return contract("margin gap needs at least two prediction labels");
    }
    let (lo, second) = risk_vector(loss, mu)?.two_smallest();
    Ok(second - lo)
}

/// True when the two best expected losses agree within [`TIE_TOLERANCE`].
pub fn is_on_frontier(loss: &FiniteLoss, mu: &SignedMeasure) -> Result<bool> {
    Ok(margin_gap(loss, mu)? <= TIE_TOLERANCE)
}

/// The decoded label, its closest rival, and the Euclidean distance to the
/// frontier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontierWitness {
    pub distance: f64,
    pub best: usize,
    /// Label whose tie hyperplane realizes the distance.
    pub rival: usize,
}

impl FrontierWitness {
    /// Unit direction `(ψ(best) − ψ(rival)) / ‖·‖` moving towards the
    /// frontier. `None` when the two rows coincide.
    pub fn direction(&self, loss: &FiniteLoss) -> Option<Vec<f64>> {
        let diff: Vec<f64> = loss
            .psi(self.best)
            .iter()
            .zip(loss.psi(self.rival))
            .map(|(a, b)| a - b)
            .collect();
        let n = norm2(&diff);
        (n > 0.0).then(|| diff.into_iter().map(|d| d / n).collect())
    }

    /// Closest point of `F` to `mu`.
    pub fn projection(&self, loss: &FiniteLoss, mu: &SignedMeasure) -> SignedMeasure {
        match self.direction(loss) {
            Some(dir) => mu.shifted(&dir, self.distance),
            None => mu.clone(),
        }
    }
}

/// Distance from `mu` to the frontier together with the rival realizing it.
pub fn frontier_witness(loss: &FiniteLoss, mu: &SignedMeasure) -> Result<FrontierWitness> {
    if loss.n_z() < 2 {
        return contract("frontier distance needs at least two prediction labels");
    }
    let risk = risk_vector(loss, mu)?;
    let best = risk.argmin();
    let r = risk.values();
    let mut witness = FrontierWitness { distance: f64::INFINITY, best, rival: best };
    for rival in (0..loss.n_z()).filter(|&z| z != best) {
        let gap = (r[rival] - r[best]).max(0.0);
        let norm = loss.psi_distance(best, rival);
        let d = if norm == 0.0 {
            // identical rows tie permanently; otherwise this rival never ties
            if gap <= TIE_TOLERANCE {
                0.0
            } else {
                continue;
            }
        } else {
            gap / norm
        };
        if d < witness.distance {
            witness.distance = d;
            witness.rival = rival;
        }
    }
    Ok(witness)
}

/// `d(μ, F)` in the ambient space `ℝ^{|Y|}`.
pub fn frontier_distance(loss: &FiniteLoss, mu: &SignedMeasure) -> Result<f64> {
    Ok(frontier_witness(loss, mu)?.distance)
}

/// Frontier distance for binary classification in the scalar embedding
/// `φ(y) = y`, `ψ(z) = −z`, where `g*(x) = E[Y | X = x] ∈ [−1, 1]` and `F = {0}`.
pub fn binary_frontier_distance(g: f64) -> f64 {
    g.abs()
}

/// Decode in the scalar binary embedding: index 1 (`+1`) when `g > 0`,
/// index 0 (`−1`) otherwise, matching the lowest-index tie rule of
/// [`super::decode`] on [`FiniteLoss::binary`].
pub fn binary_decode(g: f64) -> usize {
    usize::from(g > 0.0)
}

/// Constants `c ≤ c'` with `c·γ ≤ d(μ, F) ≤ c'·γ` for every measure, where
/// `c = 1 / max ‖ψ(z) − ψ(z')‖` and `c' = 1 / min` over pairs of distinct rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichConstants {
    pub lower: f64,
    pub upper: f64,
}

impl SandwichConstants {
    /// `None` when all rows of the loss coincide.
    pub fn for_loss(loss: &FiniteLoss) -> Option<Self> {
        let mut max = 0.0f64;
        let mut min = f64::INFINITY;
        for a in 0..loss.n_z() {
            for b in a + 1..loss.n_z() {
                let d = loss.psi_distance(a, b);
                if d > 0.0 {
                    max = max.max(d);
                    min = min.min(d);
                }
            }
        }
        (max > 0.0).then(|| Self { lower: 1.0 / max, upper: 1.0 / min })
    }
}
