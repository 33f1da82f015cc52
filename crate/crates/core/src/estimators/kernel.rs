use serde::{Deserialize, Serialize};

use super::SampleSet;
use crate::error::{contract, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    /// `exp(−‖x − x'‖₂² / (2 γ²))`
    Gaussian,
    /// `exp(−‖x − x'‖₁ / γ)`
    Laplacian,
}

/// A translation-invariant kernel with `k(x, x) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub bandwidth: f64,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, bandwidth: f64) -> Result<Self> {
        let spec = Self { family, bandwidth };
        spec.validate()?;
        Ok(spec)
    }

    pub fn gaussian(bandwidth: f64) -> Result<Self> {
        Self::new(KernelFamily::Gaussian, bandwidth)
    }

    pub fn laplacian(bandwidth: f64) -> Result<Self> {
        Self::new(KernelFamily::Laplacian, bandwidth)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return contract(format!("kernel bandwidth {} must be positive and finite", self.bandwidth));
        }
        Ok(())
    }

    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match self.family {
            KernelFamily::Gaussian => {
                let sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-sq / (2.0 * self.bandwidth * self.bandwidth)).exp()
            }
            KernelFamily::Laplacian => {
                let l1: f64 = a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum();
                (-l1 / self.bandwidth).exp()
            }
        }
    }

    /// `K̂_x = (k(x, X_i) / n)_i`.
    pub fn scaled_column(&self, query: &[f64], data: &SampleSet) -> Result<Vec<f64>> {
        data.check_query(query)?;
        let inv_n = 1.0 / data.len() as f64;
        let col: Vec<f64> = data.points().map(|p| self.eval(query, p) * inv_n).collect();
        if col.iter().any(|v| !v.is_finite()) {
            return contract("kernel produced a non-finite value");
        }
        Ok(col)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn unit_diagonal_and_symmetry() {
        for k in [KernelSpec::gaussian(0.3).unwrap(), KernelSpec::laplacian(0.7).unwrap()] {
            let a = [0.2, -1.0];
            let b = [1.5, 0.4];
            assert_eq!(k.eval(&a, &a), 1.0);
            assert_eq!(k.eval(&a, &b), k.eval(&b, &a));
            assert!(k.eval(&a, &b) > 0.0 && k.eval(&a, &b) < 1.0);
        }
    }

    #[test]
    fn closed_forms() {
        let g = KernelSpec::gaussian(2.0).unwrap();
        assert_abs_diff_eq!(g.eval(&[0.0], &[2.0]), (-0.5f64).exp(), epsilon = 1e-15);
        let l = KernelSpec::laplacian(2.0).unwrap();
        assert_abs_diff_eq!(l.eval(&[0.0, 0.0], &[1.0, -1.0]), (-1.0f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn bandwidth_must_be_positive() {
        assert!(KernelSpec::gaussian(0.0).is_err());
        assert!(KernelSpec::laplacian(-1.0).is_err());
        assert!(KernelSpec::gaussian(f64::NAN).is_err());
    }
}
