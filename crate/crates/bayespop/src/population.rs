//! Discretized type spaces and Bayesian strategies.
//!
//! The type measure is represented exactly by finitely many weighted atoms.
//! A Bayesian strategy assigns one simplex point per atom (a row-stochastic
//! `K x n` array); signed strategies drop the simplex constraint and carry
//! the strong norm
//!
//! ```text
//! |||s||| = sum_k w_k * ||s_k||_2
//! ```
//!
//! which is the topology every trajectory and solver in this crate is
//! measured in.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::simplex::SimplexPoint;
use crate::{Error, Result};

/// Finite weighted atoms approximating a type measure, with an optional
/// metric between atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteTypeSpace {
    weights: Vec<f64>,
    metric: Option<Vec<Vec<f64>>>,
}

impl DiscreteTypeSpace {
    /// A type space from raw probability weights.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Shape("type space needs at least one atom".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Config(
                "type weights must be finite and nonnegative".into(),
            ));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!(
                "type weights must sum to 1 within 1e-12, got {sum:.17e}"
            )));
        }
        Ok(Self {
            weights,
            metric: None,
        })
    }

    /// A single-atom type space (the homogeneous-population special case).
    pub fn single() -> Self {
        Self {
            weights: vec![1.0],
            metric: None,
        }
    }

    /// `K` atoms of equal weight.
    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Shape("type space needs at least one atom".into()));
        }
        // Build weights that sum to 1 exactly: the last atom absorbs the
        // rounding residue.
        let w = 1.0 / k as f64;
        let mut weights = vec![w; k];
        let partial: f64 = weights[..k - 1].iter().sum();
        weights[k - 1] = 1.0 - partial;
        Self::new(weights)
    }

    /// Attaches a metric between atoms: symmetric, zero diagonal,
    /// nonnegative, triangle inequality within 1e-9 on all triples.
    pub fn with_metric(mut self, metric: Vec<Vec<f64>>) -> Result<Self> {
        let k = self.len();
        if metric.len() != k || metric.iter().any(|row| row.len() != k) {
            return Err(Error::Shape(format!("metric must be {k}x{k}")));
        }
        for i in 0..k {
            if metric[i][i] != 0.0 {
                return Err(Error::Config(format!("metric diagonal nonzero at {i}")));
            }
            for j in 0..k {
                let d = metric[i][j];
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::Config(format!(
                        "metric entry ({i},{j}) must be finite and nonnegative"
                    )));
                }
                if (d - metric[j][i]).abs() > 0.0 {
                    return Err(Error::Config(format!("metric asymmetric at ({i},{j})")));
                }
            }
        }
        for i in 0..k {
            for j in 0..k {
                for l in 0..k {
                    if metric[i][j] > metric[i][l] + metric[l][j] + 1e-9 {
                        return Err(Error::Config(format!(
                            "metric violates the triangle inequality on ({i},{j},{l})"
                        )));
                    }
                }
            }
        }
        self.metric = Some(metric);
        Ok(self)
    }

    /// Number of atoms.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn metric(&self) -> Option<&Vec<Vec<f64>>> {
        self.metric.as_ref()
    }
}

/// A Bayesian strategy on a discrete type space: one belief per atom.
#[derive(Debug, Clone, PartialEq)]
pub struct BayesianStrategy {
    rows: Vec<SimplexPoint>,
}

impl BayesianStrategy {
    pub fn new(rows: Vec<SimplexPoint>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Shape("strategy needs at least one row".into()));
        }
        let n = rows[0].dim();
        if rows.iter().any(|r| r.dim() != n) {
            return Err(Error::Shape("strategy rows differ in length".into()));
        }
        Ok(Self { rows })
    }

    /// Every type holds the same belief.
    pub fn constant(k: usize, x: SimplexPoint) -> Result<Self> {
        Self::new(vec![x; k.max(1)])
    }

    /// Every type sits at the uniform belief.
    pub fn uniform(k: usize, n: usize) -> Self {
        Self {
            rows: vec![SimplexPoint::uniform(n); k.max(1)],
        }
    }

    /// Every type puts all mass on strategy `j`.
    pub fn vertex(k: usize, n: usize, j: usize) -> Self {
        Self {
            rows: vec![SimplexPoint::vertex(n, j); k.max(1)],
        }
    }

    pub fn num_types(&self) -> usize {
        self.rows.len()
    }

    pub fn num_strategies(&self) -> usize {
        self.rows[0].dim()
    }

    pub fn rows(&self) -> &[SimplexPoint] {
        &self.rows
    }

    pub fn row(&self, k: usize) -> &SimplexPoint {
        &self.rows[k]
    }

    /// Rowwise difference as a signed strategy.
    pub fn sub(&self, other: &BayesianStrategy) -> Result<SignedBayesianStrategy> {
        if self.num_types() != other.num_types() || self.num_strategies() != other.num_strategies()
        {
            return Err(Error::Shape("strategy shapes differ".into()));
        }
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| {
                a.entries()
                    .iter()
                    .zip(b.entries())
                    .map(|(x, y)| x - y)
                    .collect()
            })
            .collect();
        Ok(SignedBayesianStrategy { rows })
    }
}

/// A signed (not necessarily stochastic) strategy: one real vector per atom.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedBayesianStrategy {
    rows: Vec<Vec<f64>>,
}

impl SignedBayesianStrategy {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Shape("signed strategy needs at least one row".into()));
        }
        let n = rows[0].len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("signed strategy rows differ in length".into()));
        }
        if rows.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("SignedBayesianStrategy::new"));
        }
        Ok(Self { rows })
    }

    pub fn zero(k: usize, n: usize) -> Self {
        Self {
            rows: vec![vec![0.0; n]; k],
        }
    }

    pub fn num_types(&self) -> usize {
        self.rows.len()
    }

    pub fn num_strategies(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.rows[k]
    }

    pub fn scale(&self, a: f64) -> SignedBayesianStrategy {
        SignedBayesianStrategy {
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|x| a * x).collect())
                .collect(),
        }
    }

    pub fn add(&self, other: &SignedBayesianStrategy) -> Result<SignedBayesianStrategy> {
        if self.num_types() != other.num_types() || self.num_strategies() != other.num_strategies()
        {
            return Err(Error::Shape("signed strategy shapes differ".into()));
        }
        Ok(SignedBayesianStrategy {
            rows: self
                .rows
                .iter()
                .zip(&other.rows)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                .collect(),
        })
    }

    /// True iff every row lies in the tangent space (sums to zero within
    /// 1e-12).
    pub fn rows_sum_to_zero(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.iter().sum::<f64>().abs() <= 1e-12)
    }
}

/// The strong norm `sum_k w_k ||s_k||_2`.
pub fn strong_norm(s: &SignedBayesianStrategy, space: &DiscreteTypeSpace) -> Result<f64> {
    if s.num_types() != space.len() {
        return Err(Error::Shape(format!(
            "strategy has {} rows, type space has {} atoms",
            s.num_types(),
            space.len()
        )));
    }
    Ok(s
        .rows()
        .iter()
        .zip(space.weights())
        .map(|(row, w)| w * row.iter().map(|x| x * x).sum::<f64>().sqrt())
        .sum())
}

/// Strong-norm distance between two strategies.
pub fn strong_distance(
    a: &BayesianStrategy,
    b: &BayesianStrategy,
    space: &DiscreteTypeSpace,
) -> Result<f64> {
    strong_norm(&a.sub(b)?, space)
}

/// The aggregate belief `sum_k w_k sigma_k`, a convex combination of the
/// rows and hence itself a simplex point.
pub fn expectation(sigma: &BayesianStrategy, space: &DiscreteTypeSpace) -> Result<SimplexPoint> {
    if sigma.num_types() != space.len() {
        return Err(Error::Shape(format!(
            "strategy has {} rows, type space has {} atoms",
            sigma.num_types(),
            space.len()
        )));
    }
    let n = sigma.num_strategies();
    let mut agg = vec![0.0; n];
    for (row, w) in sigma.rows().iter().zip(space.weights()) {
        for (a, x) in agg.iter_mut().zip(row.entries()) {
            *a += w * x;
        }
    }
    crate::simplex::renormalize(&agg, 1e-9)
}

/// The smallest Lipschitz constant of the strategy as a map between atoms:
/// `max ||sigma_i - sigma_j|| / d(i,j)` over atom pairs at positive distance.
pub fn lipschitz_in_type(sigma: &BayesianStrategy, space: &DiscreteTypeSpace) -> Result<f64> {
    let metric = space
        .metric()
        .ok_or_else(|| Error::Config("lipschitz_in_type requires a type metric".into()))?;
    if sigma.num_types() != space.len() {
        return Err(Error::Shape("strategy/type-space size mismatch".into()));
    }
    if space.len() < 2 {
        return Err(Error::Config(
            "lipschitz_in_type needs at least two atoms".into(),
        ));
    }
    let mut worst = 0.0f64;
    for i in 0..space.len() {
        for j in (i + 1)..space.len() {
            let d = metric[i][j];
            if d > 0.0 {
                let gap = sigma.row(i).distance(sigma.row(j));
                worst = worst.max(gap / d);
            }
        }
    }
    Ok(worst)
}

/// Minimum probability over all rows and strategies; the distance of the
/// strategy from the simplex boundary.
pub fn min_row_entry(sigma: &BayesianStrategy) -> f64 {
    sigma
        .rows()
        .iter()
        .map(|r| r.min_entry())
        .fold(f64::INFINITY, f64::min)
}

/// A seeded random strategy: every row is a flat-Dirichlet sample obtained
/// from normalized exponentials of uniform draws. Deterministic per seed.
pub fn random_strategy(space: &DiscreteTypeSpace, n: usize, seed: u64) -> BayesianStrategy {
    assert!(n >= 2, "need at least 2 strategies");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..space.len())
        .map(|_| {
            let raw: Vec<f64> = (0..n)
                .map(|_| {
                    let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
                    -u.ln()
                })
                .collect();
            let s: f64 = raw.iter().sum();
            SimplexPoint::new(raw.iter().map(|x| x / s).collect())
                .or_else(|_| crate::simplex::renormalize(&raw.iter().map(|x| x / s).collect::<Vec<_>>(), 1e-9))
                .expect("normalized exponentials form a simplex point")
        })
        .collect();
    BayesianStrategy::new(rows).expect("rows are consistent by construction")
}
