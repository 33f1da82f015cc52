//! Kernel ridge regression weights `α(x) = (K̂ + λ)⁻¹ K̂_x` with
//! `K̂ = (k(X_i, X_j)/n)_{ij}` and `K̂_x = (k(x, X_i)/n)_i`.

use faer::linalg::solvers::{Llt, Solve};
use faer::{Mat, MatRef, Side};

use super::{KernelSpec, SampleSet, WeightProfile};
use crate::error::{contract, Error, Result};
use crate::loss::SignedMeasure;

/// Cholesky factor of `K̂ + λI`, reusable across queries.
#[derive(Debug, Clone)]
pub struct KrrFactorization {
    llt: Llt<f64>,
    lambda: f64,
}

impl KrrFactorization {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn n(&self) -> usize {
        self.llt.L().nrows()
    }

    /// `(K̂ + λI)⁻¹ rhs`.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        if rhs.len() != n {
            return contract(format!("right-hand side has length {}, system has {n}", rhs.len()));
        }
        let x = self.llt.solve(MatRef::from_column_major_slice(rhs, n, 1));
        Ok(x.col_as_slice(0).to_vec())
    }

    /// Solves once against the one-hot label matrix so that `g_n(x)` costs
    /// `O(n·|Y|)` per query instead of a triangular solve.
    pub fn coefficients(&self, data: &SampleSet, n_y: usize) -> Result<KrrCoefficients> {
        self.check_data(data)?;
        data.check_labels(n_y)?;
        let n = self.n();
        let phi = Mat::<f64>::from_fn(n, n_y, |i, y| if data.labels()[i] == y { 1.0 } else { 0.0 });
        let c = self.llt.solve(phi.as_ref());
        let mut rows = vec![0.0; n * n_y];
        for y in 0..n_y {
            for (i, &v) in c.col_as_slice(y).iter().enumerate() {
                rows[i * n_y + y] = v;
            }
        }
        Ok(KrrCoefficients { n_y, rows })
    }

    fn check_data(&self, data: &SampleSet) -> Result<()> {
        if data.len() != self.n() {
            return contract(format!(
                "factorization was built on {} samples, got {}",
                self.n(),
                data.len()
            ));
        }
        Ok(())
    }
}

/// `(K̂ + λI)⁻¹ Φ` where row `i` of `Φ` is `φ(Y_i)`.
#[derive(Debug, Clone)]
pub struct KrrCoefficients {
    n_y: usize,
    // row-major n x n_y
    rows: Vec<f64>,
}

impl KrrCoefficients {
    /// `g_n(x) = Σ_i α_i(x) φ(Y_i) = K̂_xᵀ (K̂ + λI)⁻¹ Φ`.
    pub fn predict(&self, query: &[f64], data: &SampleSet, kernel: &KernelSpec) -> Result<SignedMeasure> {
        let col = kernel.scaled_column(query, data)?;
        if col.len() * self.n_y != self.rows.len() {
            return contract("coefficients were built on a different sample set");
        }
        let mut out = vec![0.0; self.n_y];
        for (k, row) in col.iter().zip(self.rows.chunks_exact(self.n_y)) {
            for (o, c) in out.iter_mut().zip(row) {
                *o += k * c;
            }
        }
        Ok(SignedMeasure::new(out))
    }
}

/// Builds `K̂ + λI` and factorizes it.
pub fn krr_fit(data: &SampleSet, kernel: &KernelSpec, lambda: f64) -> Result<KrrFactorization> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return contract(format!("ridge parameter {lambda} must be positive and finite"));
    }
    kernel.validate()?;
    let n = data.len();
    let inv_n = 1.0 / n as f64;
    let mut finite = true;
    // only the lower triangle is read by the factorization
    let gram = Mat::<f64>::from_fn(n, n, |i, j| {
        if j > i {
            return 0.0;
        }
        let v = kernel.eval(data.point(i), data.point(j)) * inv_n;
        finite &= v.is_finite();
        if i == j {
            v + lambda
        } else {
            v
        }
    });
    if !finite {
        return contract("kernel produced a non-finite value");
    }
    let llt = Llt::new(gram.as_ref(), Side::Lower)
        .map_err(|e| Error::Internal(format!("Cholesky factorization of K + λI failed: {e:?}")))?;
    Ok(KrrFactorization { llt, lambda })
}

/// `α(x) = (K̂ + λI)⁻¹ K̂_x`.
pub fn krr_weights(
    query: &[f64],
    fact: &KrrFactorization,
    data: &SampleSet,
    kernel: &KernelSpec,
) -> Result<WeightProfile> {
    fact.check_data(data)?;
    let col = kernel.scaled_column(query, data)?;
    Ok(WeightProfile::new(fact.solve(&col)?))
}
