//! Generative problems with known conditional means.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};
use crate::estimators::SampleSet;
use crate::loss::{binary_decode, binary_frontier_distance, decode, frontier_distance, risk_vector, FiniteLoss, SignedMeasure};

/// Default strip period of the staircase problem.
pub const STAIRCASE_PERIOD: f64 = 1.0 / 50.0;

/// Which generative family, with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemKind {
    /// `X ~ U[−1, 1]`, `g*(x) = sign(x)|x|^{1/α}`, `Y ∈ {−1, +1}`.
    PowerMargin { alpha: f64 },
    /// `X ~ U[−1, 1]`, `Y = +1` on `pℤ + (−p/4, p/4)` and `−1` elsewhere.
    Staircase {
        #[serde(default = "default_period")]
        period: f64,
    },
    /// `X ~ U([−1, −½] ∪ [½, 1])`, `g*(x) = sign(x)(1 − |x|)^p`.
    SeparatedSupport { p: f64 },
    /// `X ~ U[0, 1]`, labels `{a, b, c}` with a conditional law that walks
    /// from the `b` region through the barycenter (`x = ½`) to the `c` region.
    ThreeClassSimplex,
}

fn default_period() -> f64 {
    STAIRCASE_PERIOD
}

impl ProblemKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ProblemKind::PowerMargin { alpha } if !(alpha > 0.0 && alpha.is_finite()) => {
                contract(format!("power-margin exponent {alpha} must be positive"))
            }
            ProblemKind::Staircase { period } if !(period > 0.0 && period.is_finite()) => {
                contract(format!("staircase period {period} must be positive"))
            }
            ProblemKind::SeparatedSupport { p } if !(p > 0.0 && p.is_finite()) => {
                contract(format!("separated-support exponent {p} must be positive"))
            }
            _ => Ok(()),
        }
    }
}

// three_class_simplex path: b-side endpoint, barycenter, c-side endpoint
const SIMPLEX_START: [f64; 3] = [0.1, 0.8, 0.1];
const SIMPLEX_MID: [f64; 3] = [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0];
const SIMPLEX_END: [f64; 3] = [0.1, 0.1, 0.8];

/// A generative problem `(ρ_X, g*)` with its loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProblemKind", into = "ProblemKind")]
pub struct SyntheticProblem {
    kind: ProblemKind,
    loss: FiniteLoss,
}

impl TryFrom<ProblemKind> for SyntheticProblem {
    type Error = crate::error::Error;

    fn try_from(kind: ProblemKind) -> Result<Self> {
        Self::new(kind)
    }
}

impl From<SyntheticProblem> for ProblemKind {
    fn from(p: SyntheticProblem) -> Self {
        p.kind
    }
}

impl SyntheticProblem {
    pub fn new(kind: ProblemKind) -> Result<Self> {
        kind.validate()?;
        let loss = match kind {
            ProblemKind::ThreeClassSimplex => FiniteLoss::three_class(),
            _ => FiniteLoss::binary(),
        };
        Ok(Self { kind, loss })
    }

    pub fn power_margin(alpha: f64) -> Result<Self> {
        Self::new(ProblemKind::PowerMargin { alpha })
    }

    pub fn staircase() -> Self {
        Self::new(ProblemKind::Staircase { period: STAIRCASE_PERIOD }).expect("default period is valid")
    }

    pub fn separated_support(p: f64) -> Result<Self> {
        Self::new(ProblemKind::SeparatedSupport { p })
    }

    pub fn three_class_simplex() -> Self {
        Self::new(ProblemKind::ThreeClassSimplex).expect("parameter-free")
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn loss(&self) -> &FiniteLoss {
        &self.loss
    }

    pub fn is_binary(&self) -> bool {
        !matches!(self.kind, ProblemKind::ThreeClassSimplex)
    }

    /// Support of `ρ_X` as closed intervals, each with its share of the mass
    /// (uniform within each interval).
    pub fn support(&self) -> &'static [(f64, f64)] {
        match self.kind {
            ProblemKind::PowerMargin { .. } | ProblemKind::Staircase { .. } => &[(-1.0, 1.0)],
            ProblemKind::SeparatedSupport { .. } => &[(-1.0, -0.5), (0.5, 1.0)],
            ProblemKind::ThreeClassSimplex => &[(0.0, 1.0)],
        }
    }

    pub fn in_support(&self, x: f64) -> bool {
        self.support().iter().any(|&(a, b)| a <= x && x <= b)
    }

    fn check_support(&self, x: f64) -> Result<()> {
        if !self.in_support(x) {
            return contract(format!("x = {x} lies outside the support {:?}", self.support()));
        }
        Ok(())
    }

    /// Exponent `α` of the low-density condition `P(d(g*(X), F) < t) ≤ c tᵅ`,
    /// or `None` under no-density separation.
    pub fn margin_exponent(&self) -> Option<f64> {
        match self.kind {
            ProblemKind::PowerMargin { alpha } => Some(alpha),
            ProblemKind::Staircase { .. } => None,
            ProblemKind::SeparatedSupport { p } => Some(1.0 / p),
            ProblemKind::ThreeClassSimplex => Some(1.0),
        }
    }

    /// `g*(x) = E[Y | X = x] ∈ [−1, 1]` for the binary families.
    pub fn binary_mean(&self, x: f64) -> Result<Option<f64>> {
        self.check_support(x)?;
        Ok(self.binary_mean_unchecked(x))
    }

    fn binary_mean_unchecked(&self, x: f64) -> Option<f64> {
        match self.kind {
            ProblemKind::PowerMargin { alpha } => Some(x.signum() * x.abs().powf(1.0 / alpha)),
            ProblemKind::Staircase { period } => {
                let offset = (x - period * (x / period).round()).abs();
                Some(if offset < period / 4.0 { 1.0 } else { -1.0 })
            }
            ProblemKind::SeparatedSupport { p } => Some(x.signum() * (1.0 - x.abs()).powf(p)),
            ProblemKind::ThreeClassSimplex => None,
        }
    }

    fn simplex_law(x: f64) -> [f64; 3] {
        let (from, to, t) = if x <= 0.5 {
            (SIMPLEX_START, SIMPLEX_MID, 2.0 * x)
        } else {
            (SIMPLEX_MID, SIMPLEX_END, 2.0 * x - 1.0)
        };
        std::array::from_fn(|i| (1.0 - t) * from[i] + t * to[i])
    }

    /// The conditional law of `Y` given `X = x` as a measure over the loss's
    /// observation labels, i.e. `g*(x)` in the one-hot embedding.
    pub fn conditional(&self, x: f64) -> Result<SignedMeasure> {
        self.check_support(x)?;
        Ok(match self.binary_mean_unchecked(x) {
            Some(g) => SignedMeasure::new(vec![(1.0 - g) / 2.0, (1.0 + g) / 2.0]),
            None => SignedMeasure::new(Self::simplex_law(x).to_vec()),
        })
    }

    /// Exact Bayes prediction `f*(x)` as an index into `loss().z_labels()`.
    /// Binary families decode the scalar `g*(x)` directly so that `f*` keeps
    /// the sign of `g*` even where `(1 ± g)/2` round to the same value.
    pub fn bayes_predict(&self, x: f64) -> Result<usize> {
        self.check_support(x)?;
        match self.binary_mean_unchecked(x) {
            Some(g) => Ok(binary_decode(g)),
            None => decode(&self.loss, &self.conditional(x)?),
        }
    }

    /// `d(g*(x), F)`. Binary families use the scalar embedding, where it is
    /// `|g*(x)|`; the three-class problem uses the one-hot embedding.
    pub fn frontier_distance(&self, x: f64) -> Result<f64> {
        self.check_support(x)?;
        match self.binary_mean_unchecked(x) {
            Some(g) => Ok(binary_frontier_distance(g)),
            None => frontier_distance(&self.loss, &self.conditional(x)?),
        }
    }

    fn draw_x<R: Rng>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        match self.kind {
            ProblemKind::PowerMargin { .. } | ProblemKind::Staircase { .. } => -1.0 + 2.0 * u,
            ProblemKind::SeparatedSupport { .. } => {
                let side = if rng.random::<bool>() { 1.0 } else { -1.0 };
                side * (0.5 + 0.5 * u)
            }
            ProblemKind::ThreeClassSimplex => u,
        }
    }

    fn draw_y<R: Rng>(&self, x: f64, rng: &mut R) -> usize {
        match self.binary_mean_unchecked(x) {
            Some(g) => usize::from(rng.random::<f64>() < (1.0 + g) / 2.0),
            None => {
                let law = Self::simplex_law(x);
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (y, &p) in law.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        return y;
                    }
                }
                law.len() - 1
            }
        }
    }

    /// `n` i.i.d. draws from `ρ`, deterministic in `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<SampleSet> {
        self.sample_with(n, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn sample_with<R: Rng>(&self, n: usize, rng: &mut R) -> Result<SampleSet> {
        if n == 0 {
            return contract("sample size must be at least 1");
        }
        let mut xs = Vec::with_capacity(n);
        let mut ys = Vec::with_capacity(n);
        for _ in 0..n {
            let x = self.draw_x(rng);
            ys.push(self.draw_y(x, rng));
            xs.push(x);
        }
        SampleSet::from_scalars(xs, ys)
    }

    /// Regular partition of the support: midpoints of `size` equal cells,
    /// split evenly across the support intervals.
    pub fn eval_grid(&self, size: usize) -> Vec<f64> {
        let pieces = self.support();
        let per = size / pieces.len();
        let extra = size % pieces.len();
        let mut out = Vec::with_capacity(size);
        for (i, &(a, b)) in pieces.iter().enumerate() {
            let m = per + usize::from(i < extra);
            let h = (b - a) / m as f64;
            out.extend((0..m).map(|j| a + (j as f64 + 0.5) * h));
        }
        out
    }

    /// Mean excess risk of `predictions` (indices into `loss().z_labels()`)
    /// over `grid`. Binary families use `1{f_n ≠ f*}·|g*(x)|`; the three-class
    /// problem uses the expected-loss difference under the exact law.
    pub fn excess_risk(&self, predictions: &[usize], grid: &[f64]) -> Result<f64> {
        if predictions.len() != grid.len() {
            return contract(format!(
                "{} predictions for {} grid points",
                predictions.len(),
                grid.len()
            ));
        }
        if grid.is_empty() {
            return contract("evaluation grid is empty");
        }
        let mut total = 0.0;
        for (&pred, &x) in predictions.iter().zip(grid) {
            if pred >= self.loss.n_z() {
                return contract(format!("prediction index {pred} out of range"));
            }
            let best = self.bayes_predict(x)?;
            if pred == best {
                continue;
            }
            total += match self.binary_mean_unchecked(x) {
                Some(g) => g.abs(),
                None => {
                    let risk = risk_vector(&self.loss, &self.conditional(x)?)?;
                    (risk.values()[pred] - risk.values()[best]).max(0.0)
                }
            };
        }
        Ok(total / grid.len() as f64)
    }
}
