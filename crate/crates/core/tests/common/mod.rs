#![allow(dead_code)]

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use structrates_core::loss::{decode, FiniteLoss, SignedMeasure};

pub fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// Random loss with `2..=max` labels on each side. With `coarse`, entries are
/// drawn from `{0, 0.5, ..., 2}` so that exact ties are common.
pub fn random_loss<R: Rng>(rng: &mut R, max: usize, coarse: bool) -> FiniteLoss {
    let nz = rng.random_range(2..=max);
    let ny = rng.random_range(2..=max);
    let rows = (0..nz)
        .map(|_| {
            (0..ny)
                .map(|_| {
                    if coarse {
                        f64::from(rng.random_range(0..=4u8)) * 0.5
                    } else {
                        rng.random::<f64>() * 2.0
                    }
                })
                .collect()
        })
        .collect();
    FiniteLoss::new(labels("z", nz), labels("y", ny), rows).unwrap()
}

/// Random probability vector, or with `coarse`, a measure on a small lattice
/// of signed values.
pub fn random_measure<R: Rng>(rng: &mut R, len: usize, coarse: bool) -> SignedMeasure {
    if coarse {
        return SignedMeasure::new((0..len).map(|_| f64::from(rng.random_range(-2..=4i8)) * 0.25).collect());
    }
    let raw: Vec<f64> = (0..len).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let total: f64 = raw.iter().sum();
    SignedMeasure::new(raw.into_iter().map(|v| v / total).collect())
}

/// Brute-force decode: first index with the smallest expected loss.
pub fn exhaustive_decode(loss: &FiniteLoss, mu: &SignedMeasure) -> usize {
    let risks: Vec<f64> = (0..loss.n_z())
        .map(|z| (0..loss.n_y()).map(|y| loss.entry(z, y) * mu.weights()[y]).sum())
        .collect();
    let mut best = 0;
    for z in 1..risks.len() {
        if risks[z] < risks[best] {
            best = z;
        }
    }
    best
}

/// Uniform sample of the open ball of radius `r` around `center`.
pub fn sample_ball<R: Rng>(rng: &mut R, center: &SignedMeasure, r: f64) -> SignedMeasure {
    let d = center.len();
    let dir: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
    let norm = dir.iter().map(|v: &f64| v * v).sum::<f64>().sqrt();
    let radius = r * rng.random::<f64>().powf(1.0 / d as f64);
    SignedMeasure::new(
        center.weights().iter().zip(&dir).map(|(c, v)| c + radius * v / norm).collect(),
    )
}

/// Number of ball samples whose decode differs from the center's.
pub fn ball_violations<R: Rng>(rng: &mut R, loss: &FiniteLoss, mu: &SignedMeasure, r: f64, samples: usize) -> usize {
    let center = decode(loss, mu).unwrap();
    (0..samples)
        .filter(|_| decode(loss, &sample_ball(rng, mu, r)).unwrap() != center)
        .count()
}
