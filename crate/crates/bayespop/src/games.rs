//! Bayesian population games on a discrete type space.
//!
//! A game assigns every type atom a payoff vector that depends on the whole
//! population state. Two concrete families are provided:
//!
//! - matrix-type games: atom `k` carries an `n x n` matrix `A_k` and earns
//!   `A_k * E(sigma)` against the aggregate belief;
//! - aggregative games: atom `k` carries an arbitrary rule `x -> R^n`
//!   evaluated at the aggregate `E(sigma)`.
//!
//! On top of payoff evaluation the module hosts the structural tests used by
//! the convergence certificates: strong-Lipschitz estimation, negative
//! semidefiniteness (randomized falsifier plus an exact tangent-eigenvalue
//! test for common matrices), the directional-derivative form behind the
//! self-defeating-externalities criterion, and validation of declared
//! potential functions against the payoff field.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::population::{
    expectation, random_strategy, strong_distance, BayesianStrategy, DiscreteTypeSpace,
    SignedBayesianStrategy,
};
use crate::simplex::SimplexPoint;
use crate::{Error, Result};

/// Payoff rule of an aggregative type: maps the aggregate belief to a payoff
/// vector.
pub type AggregateRule = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Scalar potential over strategies, evaluated together with the type space.
#[derive(Clone)]
pub struct Potential {
    name: String,
    eval: Arc<dyn Fn(&BayesianStrategy, &DiscreteTypeSpace) -> f64 + Send + Sync>,
}

impl Potential {
    pub fn new<F>(name: impl Into<String>, eval: F) -> Self
    where
        F: Fn(&BayesianStrategy, &DiscreteTypeSpace) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
        }
    }

    /// The identically-zero potential (for trivial games).
    pub fn zero() -> Self {
        Self::new("zero", |_, _| 0.0)
    }

    /// `phi(sigma) = 1/2 <E(sigma), A E(sigma)>`, the canonical potential of
    /// a game in which every type plays the same symmetric matrix `A`.
    pub fn quadratic_aggregate(a: Vec<Vec<f64>>) -> Self {
        Self::new("quadratic_aggregate", move |sigma, space| {
            let e = expectation(sigma, space).expect("validated shapes");
            let ax = mat_vec(&a, e.entries());
            0.5 * e.entries().iter().zip(&ax).map(|(x, y)| x * y).sum::<f64>()
        })
    }

    /// `phi(sigma) = sum_j (b_j E_j - E_j^3 / 3)`, the potential of the
    /// quadratic-congestion rule `u_j(x) = b_j - x_j^2` shared by all types.
    pub fn cubic_congestion(b: Vec<f64>) -> Self {
        Self::new("cubic_congestion", move |sigma, space| {
            let e = expectation(sigma, space).expect("validated shapes");
            e.entries()
                .iter()
                .zip(&b)
                .map(|(x, bj)| bj * x - x * x * x / 3.0)
                .sum()
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, sigma: &BayesianStrategy, space: &DiscreteTypeSpace) -> f64 {
        (self.eval)(sigma, space)
    }
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Potential({})", self.name)
    }
}

#[derive(Clone)]
enum GameKind {
    /// One payoff matrix per type atom.
    MatrixType(Vec<Vec<Vec<f64>>>),
    /// One aggregate rule per type atom.
    Aggregative(Vec<AggregateRule>),
}

/// A Bayesian population game together with an optionally declared
/// potential.
#[derive(Clone)]
pub struct GameSpec {
    n: usize,
    kind: GameKind,
    potential: Option<Potential>,
}

impl fmt::Debug for GameSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            GameKind::MatrixType(ms) => write!(
                f,
                "GameSpec::matrix(n={}, K={}, potential={:?})",
                self.n,
                ms.len(),
                self.potential
            ),
            GameKind::Aggregative(rs) => write!(
                f,
                "GameSpec::aggregative(n={}, K={}, potential={:?})",
                self.n,
                rs.len(),
                self.potential
            ),
        }
    }
}

impl GameSpec {
    /// A matrix-type game: one finite `n x n` matrix per atom.
    pub fn matrix_game(matrices: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if matrices.is_empty() {
            return Err(Error::Shape("matrix game needs at least one type".into()));
        }
        let n = matrices[0].len();
        if n < 2 {
            return Err(Error::Shape("payoff matrices must be at least 2x2".into()));
        }
        for m in &matrices {
            if m.len() != n || m.iter().any(|row| row.len() != n) {
                return Err(Error::Shape(format!("all matrices must be {n}x{n}")));
            }
            if m.iter().flatten().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite("GameSpec::matrix_game"));
            }
        }
        Ok(Self {
            n,
            kind: GameKind::MatrixType(matrices),
            potential: None,
        })
    }

    /// Every one of `k` types plays the same matrix.
    pub fn common_matrix(a: Vec<Vec<f64>>, k: usize) -> Result<Self> {
        Self::matrix_game(vec![a; k.max(1)])
    }

    /// The zero game: every payoff is identically zero.
    pub fn zero(n: usize, k: usize) -> Result<Self> {
        Self::common_matrix(vec![vec![0.0; n]; n], k)
    }

    /// Rock-paper-scissors for every type.
    pub fn rock_paper_scissors(k: usize) -> Result<Self> {
        Self::common_matrix(
            vec![
                vec![0.0, -1.0, 1.0],
                vec![1.0, 0.0, -1.0],
                vec![-1.0, 1.0, 0.0],
            ],
            k,
        )
    }

    /// An aggregative game from per-type rules on the aggregate belief.
    pub fn aggregative(n: usize, rules: Vec<AggregateRule>) -> Result<Self> {
        if rules.is_empty() {
            return Err(Error::Shape(
                "aggregative game needs at least one type".into(),
            ));
        }
        if n < 2 {
            return Err(Error::Shape("need at least 2 strategies".into()));
        }
        Ok(Self {
            n,
            kind: GameKind::Aggregative(rules),
            potential: None,
        })
    }

    /// The quadratic-congestion game `u_j(x) = b_j - x_j^2`, shared by all
    /// `k` types; pair with [`Potential::cubic_congestion`].
    pub fn quadratic_congestion(b: Vec<f64>, k: usize) -> Result<Self> {
        let n = b.len();
        let rule: AggregateRule = Arc::new(move |x: &[f64]| {
            x.iter().zip(&b).map(|(xj, bj)| bj - xj * xj).collect()
        });
        Self::aggregative(n, vec![rule; k.max(1)])
    }

    /// Declares a potential; validate it with [`check_potential_gradient`]
    /// when loading external configurations.
    pub fn with_potential(mut self, potential: Potential) -> Self {
        self.potential = Some(potential);
        self
    }

    pub fn potential(&self) -> Option<&Potential> {
        self.potential.as_ref()
    }

    /// Number of strategies.
    pub fn num_strategies(&self) -> usize {
        self.n
    }

    /// Number of type atoms the game is defined for.
    pub fn num_types(&self) -> usize {
        match &self.kind {
            GameKind::MatrixType(ms) => ms.len(),
            GameKind::Aggregative(rs) => rs.len(),
        }
    }

    /// The payoff matrices, when the game is matrix-type.
    pub fn matrices(&self) -> Option<&[Vec<Vec<f64>>]> {
        match &self.kind {
            GameKind::MatrixType(ms) => Some(ms),
            GameKind::Aggregative(_) => None,
        }
    }

    /// The common payoff matrix, when all types share one.
    pub fn common_matrix_ref(&self) -> Option<&Vec<Vec<f64>>> {
        let ms = self.matrices()?;
        let first = &ms[0];
        if ms.iter().all(|m| m == first) {
            Some(first)
        } else {
            None
        }
    }

    fn payoff_at_aggregate(&self, aggregate: &SimplexPoint, k: usize) -> Result<Vec<f64>> {
        match &self.kind {
            GameKind::MatrixType(ms) => {
                let m = ms.get(k).ok_or_else(|| {
                    Error::Shape(format!("type index {k} out of range (K={})", ms.len()))
                })?;
                Ok(mat_vec(m, aggregate.entries()))
            }
            GameKind::Aggregative(rs) => {
                let rule = rs.get(k).ok_or_else(|| {
                    Error::Shape(format!("type index {k} out of range (K={})", rs.len()))
                })?;
                let u = rule(aggregate.entries());
                if u.len() != self.n {
                    return Err(Error::Shape(format!(
                        "aggregative rule for type {k} returned {} entries, expected {}",
                        u.len(),
                        self.n
                    )));
                }
                if u.iter().any(|x| !x.is_finite()) {
                    return Err(Error::NonFinite("aggregative payoff"));
                }
                Ok(u)
            }
        }
    }
}

/// Payoff vector of type `k` at state `sigma`.
pub fn payoff(
    game: &GameSpec,
    sigma: &BayesianStrategy,
    k: usize,
    space: &DiscreteTypeSpace,
) -> Result<Vec<f64>> {
    let aggregate = expectation(sigma, space)?;
    game.payoff_at_aggregate(&aggregate, k)
}

/// Payoff vectors of every type, stacked into a `K x n` matrix. The
/// aggregate is computed once and shared.
pub fn payoff_all(
    game: &GameSpec,
    sigma: &BayesianStrategy,
    space: &DiscreteTypeSpace,
) -> Result<Vec<Vec<f64>>> {
    let aggregate = expectation(sigma, space)?;
    (0..game.num_types())
        .map(|k| game.payoff_at_aggregate(&aggregate, k))
        .collect()
}

/// Estimate of the strong-Lipschitz constant of the game.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzEstimate {
    /// Largest sampled ratio `max_k ||G(sigma,k)-G(rho,k)|| / |||sigma-rho|||`.
    pub empirical: f64,
    /// `max_k ||A_k||_op` for matrix-type games: a certified upper bound.
    pub certified: Option<f64>,
}

impl LipschitzEstimate {
    /// The constant to use in bounds: certified when available, else the
    /// sampled value.
    pub fn bound(&self) -> f64 {
        self.certified.unwrap_or(self.empirical)
    }
}

/// Samples strategy pairs and measures the payoff sensitivity in the strong
/// norm; matrix-type games also receive the exact operator-norm bound.
pub fn strong_lipschitz_estimate(
    game: &GameSpec,
    space: &DiscreteTypeSpace,
    samples: usize,
    seed: u64,
) -> Result<LipschitzEstimate> {
    if samples < 2 {
        return Err(Error::Config("need at least 2 samples".into()));
    }
    let n = game.num_strategies();
    let mut empirical = 0.0f64;
    for i in 0..samples {
        let sigma = random_strategy(space, n, seed.wrapping_add(2 * i as u64));
        let rho = random_strategy(space, n, seed.wrapping_add(2 * i as u64 + 1));
        let dist = strong_distance(&sigma, &rho, space)?;
        if dist <= 1e-14 {
            continue;
        }
        let ps = payoff_all(game, &sigma, space)?;
        let pr = payoff_all(game, &rho, space)?;
        let worst_row = ps
            .iter()
            .zip(&pr)
            .map(|(a, b)| euclid_distance(a, b))
            .fold(0.0f64, f64::max);
        empirical = empirical.max(worst_row / dist);
    }
    let certified = game
        .matrices()
        .map(|ms| ms.iter().map(|m| operator_norm(m)).fold(0.0f64, f64::max));
    Ok(LipschitzEstimate {
        empirical,
        certified,
    })
}

/// Outcome of the negative-semidefiniteness test.
#[derive(Debug, Clone, PartialEq)]
pub struct NsdReport {
    /// True iff no probe (and, when available, the exact eigenvalue test)
    /// contradicts negative semidefiniteness.
    pub verdict: bool,
    /// Largest sampled value of the defining integral.
    pub worst_value: f64,
    /// Max eigenvalue of the symmetric part restricted to the tangent
    /// space, for games whose types share one matrix.
    pub exact_tangent_eigenvalue: Option<f64>,
}

/// Randomized falsifier for
/// `sum_k w_k <G(sigma,k)-G(rho,k), sigma_k-rho_k> <= 0`,
/// with the exact symmetric-part eigenvalue test in the common-matrix case.
pub fn is_negative_semidefinite(
    game: &GameSpec,
    space: &DiscreteTypeSpace,
    trials: usize,
    seed: u64,
) -> Result<NsdReport> {
    if trials < 1 {
        return Err(Error::Config("need at least one trial".into()));
    }
    let n = game.num_strategies();
    let mut worst = f64::NEG_INFINITY;
    for i in 0..trials {
        let sigma = random_strategy(space, n, seed.wrapping_add(2 * i as u64));
        let rho = random_strategy(space, n, seed.wrapping_add(2 * i as u64 + 1));
        let ps = payoff_all(game, &sigma, space)?;
        let pr = payoff_all(game, &rho, space)?;
        let mut total = 0.0;
        for k in 0..space.len() {
            let w = space.weights()[k];
            let diff_payoff: Vec<f64> = ps[k].iter().zip(&pr[k]).map(|(a, b)| a - b).collect();
            let diff_strategy: Vec<f64> = sigma
                .row(k)
                .entries()
                .iter()
                .zip(rho.row(k).entries())
                .map(|(a, b)| a - b)
                .collect();
            total += w * dot(&diff_payoff, &diff_strategy);
        }
        worst = worst.max(total);
    }
    let exact = game
        .common_matrix_ref()
        .map(|a| max_tangent_eigenvalue_of_symmetric_part(a));
    let verdict = worst <= 1e-9 && exact.map_or(true, |lam| lam <= 1e-12);
    Ok(NsdReport {
        verdict,
        worst_value: worst,
        exact_tangent_eigenvalue: exact,
    })
}

/// Central finite-difference approximation of the aggregated directional
/// payoff derivative `sum_k w_k <DG_k[sigma](s0), s0_k>` along a zero-sum
/// direction `s0`. Nonpositivity of this form over all probes is the
/// self-defeating-externalities property.
pub fn sde_directional_form(
    game: &GameSpec,
    space: &DiscreteTypeSpace,
    sigma: &BayesianStrategy,
    s0: &SignedBayesianStrategy,
    h: f64,
) -> Result<f64> {
    if !s0.rows_sum_to_zero() {
        return Err(Error::Domain(
            "direction rows must sum to zero (tangent space)".into(),
        ));
    }
    if h <= 0.0 || !h.is_finite() {
        return Err(Error::Config(format!("step must be positive, got {h}")));
    }
    let plus = perturb(sigma, s0, h)?;
    let minus = perturb(sigma, s0, -h)?;
    let pp = payoff_all(game, &plus, space)?;
    let pm = payoff_all(game, &minus, space)?;
    let mut total = 0.0;
    for k in 0..space.len() {
        let w = space.weights()[k];
        let diff: Vec<f64> = pp[k].iter().zip(&pm[k]).map(|(a, b)| a - b).collect();
        total += w * dot(&diff, s0.row(k));
    }
    Ok(total / (2.0 * h))
}

/// Validates a declared potential against the payoff field: for random
/// zero-sum directions, the central finite difference of the potential must
/// match `sum_k w_k <G(sigma,k), s0_k>`. Returns the largest discrepancy.
pub fn check_potential_gradient(
    game: &GameSpec,
    space: &DiscreteTypeSpace,
    sigma: &BayesianStrategy,
    probes: usize,
    seed: u64,
) -> Result<f64> {
    let potential = game
        .potential()
        .ok_or_else(|| Error::Config("game declares no potential".into()))?;
    let n = game.num_strategies();
    let k = space.len();
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
    let payoffs = payoff_all(game, sigma, space)?;
    let mut worst = 0.0f64;
    for _ in 0..probes {
        let s0 = random_tangent_direction(&mut rng, k, n)?;
        let mut h = 1e-5;
        let (fp, fm) = loop {
            match (perturb(sigma, &s0, h), perturb(sigma, &s0, -h)) {
                (Ok(p), Ok(m)) => break (p, m),
                _ => {
                    h *= 0.5;
                    if h < 1e-10 {
                        return Err(Error::Step(
                            "potential probe step shrank below 1e-10 without entering the simplex"
                                .into(),
                        ));
                    }
                }
            }
        };
        let fd = (potential.eval(&fp, space) - potential.eval(&fm, space)) / (2.0 * h);
        let analytic: f64 = (0..k)
            .map(|i| space.weights()[i] * dot(&payoffs[i], s0.row(i)))
            .sum();
        worst = worst.max((fd - analytic).abs());
    }
    Ok(worst)
}

/// Metric between matrix types: operator-norm distance of their matrices.
/// With this metric a matrix-type game is 1-Lipschitz in the type argument.
pub fn operator_norm_metric(game: &GameSpec) -> Result<Vec<Vec<f64>>> {
    let ms = game
        .matrices()
        .ok_or_else(|| Error::Config("operator-norm metric needs a matrix-type game".into()))?;
    let k = ms.len();
    let mut metric = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in (i + 1)..k {
            let diff: Vec<Vec<f64>> = ms[i]
                .iter()
                .zip(&ms[j])
                .map(|(ri, rj)| ri.iter().zip(rj).map(|(a, b)| a - b).collect())
                .collect();
            let d = operator_norm(&diff);
            metric[i][j] = d;
            metric[j][i] = d;
        }
    }
    Ok(metric)
}

/// Spectral norm of a square matrix.
pub fn operator_norm(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let flat: Vec<f64> = m.iter().flatten().cloned().collect();
    let dm = DMatrix::from_row_slice(n, n, &flat);
    dm.svd(false, false).singular_values[0]
}

/// Max eigenvalue of `(A + A^T)/2` restricted to the tangent space
/// `{ z : sum z_j = 0 }`, computed in an orthonormal Helmert basis.
pub fn max_tangent_eigenvalue_of_symmetric_part(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut sym = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            sym[(i, j)] = 0.5 * (a[i][j] + a[j][i]);
        }
    }
    // Helmert columns: k ones followed by -k, normalized.
    let mut basis = DMatrix::zeros(n, n - 1);
    for k in 1..n {
        let scale = 1.0 / ((k * (k + 1)) as f64).sqrt();
        for i in 0..k {
            basis[(i, k - 1)] = scale;
        }
        basis[(k, k - 1)] = -(k as f64) * scale;
    }
    let restricted = basis.transpose() * sym * basis;
    let eig = restricted.symmetric_eigen();
    eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

fn perturb(
    sigma: &BayesianStrategy,
    s0: &SignedBayesianStrategy,
    h: f64,
) -> Result<BayesianStrategy> {
    if sigma.num_types() != s0.num_types() || sigma.num_strategies() != s0.num_strategies() {
        return Err(Error::Shape("direction/strategy shapes differ".into()));
    }
    let rows: Result<Vec<SimplexPoint>> = sigma
        .rows()
        .iter()
        .zip(s0.rows())
        .map(|(row, dir)| {
            let moved: Vec<f64> = row
                .entries()
                .iter()
                .zip(dir)
                .map(|(x, d)| x + h * d)
                .collect();
            crate::simplex::renormalize(&moved, 1e-12).map_err(|_| {
                Error::Step(format!(
                    "perturbed row left the simplex at step {h:e}"
                ))
            })
        })
        .collect();
    BayesianStrategy::new(rows?)
}

/// Random direction with zero-sum rows, each row scaled to unit Euclidean
/// norm.
pub fn random_tangent_direction(
    rng: &mut rand_chacha::ChaCha8Rng,
    k: usize,
    n: usize,
) -> Result<SignedBayesianStrategy> {
    use rand::Rng;
    let rows: Result<Vec<Vec<f64>>> = (0..k)
        .map(|_| {
            let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let t = crate::simplex::tangent_project(&raw)?;
            let norm = t.norm().max(1e-12);
            Ok(t.entries().iter().map(|x| x / norm).collect())
        })
        .collect();
    SignedBayesianStrategy::new(rows?)
}

fn mat_vec(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    m.iter().map(|row| dot(row, x)).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn euclid_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
