//! k-nearest-neighbour local averaging.

use serde::{Deserialize, Serialize};

use super::{SampleSet, WeightProfile};
use crate::error::{contract, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    #[default]
    Euclidean,
}

impl Metric {
    /// A monotone transform of the distance; ties are detected on it with
    /// exact equality.
    fn rank_key(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Euclidean => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum(),
        }
    }
}

/// k-NN weights at `query`.
///
/// Points strictly inside the k-th distance get `1/k`; points beyond it get
/// `0`. The `p` points tied at the k-th distance share the `k − m` remaining
/// slots (`m` = number strictly closer), each receiving `(k − m)/(p·k)`.
/// When a single slot remains this is the usual `(p·k)⁻¹`.
pub fn knn_weights(query: &[f64], data: &SampleSet, k: usize, metric: Metric) -> Result<WeightProfile> {
    let n = data.len();
    if k == 0 || k > n {
        return contract(format!("k = {k} must lie in 1..={n}"));
    }
    data.check_query(query)?;

    let dist: Vec<f64> = data.points().map(|p| metric.rank_key(query, p)).collect();
    let mut scratch = dist.clone();
    let (_, kth, _) = scratch.select_nth_unstable_by(k - 1, f64::total_cmp);
    let kth = *kth;

    let closer = dist.iter().filter(|&&d| d < kth).count();
    let tied = dist.iter().filter(|&&d| d == kth).count();
    let kf = k as f64;
    let inner = 1.0 / kf;
    let boundary = (k - closer) as f64 / (tied as f64 * kf);

    let alpha = dist
        .iter()
        .map(|&d| {
            if d < kth {
                inner
            } else if d == kth {
                boundary
            } else {
                0.0
            }
        })
        .collect();
    Ok(WeightProfile::new(alpha))
}
