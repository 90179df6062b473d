//! The regularized best-response dynamic and its certification machinery.
//!
//! The dynamic moves every type towards its regularized best response:
//!
//! ```text
//! sigma_dot = b_eps(sigma) - sigma
//! ```
//!
//! The Euler step `sigma <- (1-dt)*sigma + dt*b_eps(sigma)` is an exact
//! convex combination of simplex points, so trajectories never need drift
//! repair; the optional RK4 method trades that exact invariant for accuracy
//! and renormalizes after every stage.
//!
//! Two runtime certificates accompany the integrator: a Gronwall bound on
//! the divergence of trajectories started close together (continuity of the
//! semiflow in the strong norm), and a forward-invariance check for
//! type-Lipschitz, interior-valued strategy sets.

use std::collections::BTreeMap;

use crate::games::{payoff_all, strong_lipschitz_estimate, GameSpec};
use crate::population::{
    lipschitz_in_type, min_row_entry, strong_distance, strong_norm, BayesianStrategy,
    DiscreteTypeSpace, SignedBayesianStrategy,
};
use crate::regularizers::{NoiseLevel, Regularizer};
use crate::simplex::SimplexPoint;
use crate::{Error, Result};

/// Time-stepping method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Euler,
    Rk4,
}

/// Integrator settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub method: Method,
    pub dt: f64,
    pub horizon: f64,
    pub record_every: usize,
}

impl IntegratorConfig {
    pub fn new(method: Method, dt: f64, horizon: f64, record_every: usize) -> Result<Self> {
        if !dt.is_finite() || dt <= 0.0 {
            return Err(Error::Config(format!("dt must be positive, got {dt}")));
        }
        if method == Method::Euler && dt > 1.0 {
            return Err(Error::Config(format!(
                "Euler requires dt <= 1 for simplex preservation, got {dt}"
            )));
        }
        if !horizon.is_finite() || horizon < dt {
            return Err(Error::Config(format!(
                "horizon must be at least dt, got {horizon}"
            )));
        }
        if record_every == 0 {
            return Err(Error::Config("record_every must be at least 1".into()));
        }
        Ok(Self {
            method,
            dt,
            horizon,
            record_every,
        })
    }

    pub fn euler(dt: f64, horizon: f64, record_every: usize) -> Result<Self> {
        Self::new(Method::Euler, dt, horizon, record_every)
    }

    pub fn rk4(dt: f64, horizon: f64, record_every: usize) -> Result<Self> {
        Self::new(Method::Rk4, dt, horizon, record_every)
    }

    fn num_steps(&self) -> usize {
        ((self.horizon / self.dt).round() as usize).max(1)
    }
}

/// A recorded trajectory: strictly increasing times, one state per time,
/// and a scalar diagnostic map per recorded state.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<BayesianStrategy>,
    diagnostics: Vec<BTreeMap<String, f64>>,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[BayesianStrategy] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &BayesianStrategy {
        &self.states[i]
    }

    pub fn terminal(&self) -> &BayesianStrategy {
        self.states.last().expect("trajectory is never empty")
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn diagnostics(&self) -> &[BTreeMap<String, f64>] {
        &self.diagnostics
    }

    pub fn diagnostics_mut(&mut self) -> &mut [BTreeMap<String, f64>] {
        &mut self.diagnostics
    }

    /// The named diagnostic at every recorded time, if present everywhere.
    pub fn series(&self, key: &str) -> Option<Vec<f64>> {
        self.diagnostics
            .iter()
            .map(|d| d.get(key).copied())
            .collect()
    }

    fn push(&mut self, t: f64, state: BayesianStrategy, residual: f64) {
        let mut diag = BTreeMap::new();
        diag.insert("residual".to_string(), residual);
        self.times.push(t);
        self.states.push(state);
        self.diagnostics.push(diag);
    }
}

/// The regularized best response of every type: row `k` maximizes
/// `<y, G(sigma, k)> - eps * v(y)`. All rows are interior.
pub fn best_response(
    game: &GameSpec,
    v: &Regularizer,
    eps: NoiseLevel,
    sigma: &BayesianStrategy,
    space: &DiscreteTypeSpace,
) -> Result<BayesianStrategy> {
    let payoffs = payoff_all(game, sigma, space)?;
    let rows: Result<Vec<SimplexPoint>> = payoffs
        .iter()
        .map(|u| v.conjugate_argmax(eps, u))
        .collect();
    BayesianStrategy::new(rows?)
}

/// The revision vector field `b_eps(sigma) - sigma`; every row lies in the
/// tangent space.
pub fn vector_field(
    game: &GameSpec,
    v: &Regularizer,
    eps: NoiseLevel,
    sigma: &BayesianStrategy,
    space: &DiscreteTypeSpace,
) -> Result<SignedBayesianStrategy> {
    best_response(game, v, eps, sigma, space)?.sub(sigma)
}

/// The exact convex combination `(1-dt)*sigma + dt*target`, the shared step
/// of the Euler integrator and the damped fixed-point solver.
pub fn convex_step(
    sigma: &BayesianStrategy,
    target: &BayesianStrategy,
    dt: f64,
) -> Result<BayesianStrategy> {
    if !(0.0..=1.0).contains(&dt) {
        return Err(Error::Config(format!(
            "convex step size must lie in [0,1], got {dt}"
        )));
    }
    let rows: Result<Vec<SimplexPoint>> = sigma
        .rows()
        .iter()
        .zip(target.rows())
        .map(|(a, b)| {
            let mixed: Vec<f64> = a
                .entries()
                .iter()
                .zip(b.entries())
                .map(|(x, y)| (1.0 - dt) * x + dt * y)
                .collect();
            SimplexPoint::new(mixed)
        })
        .collect();
    BayesianStrategy::new(rows?)
}

/// Integrates the dynamic from `sigma0` and records the state plus the
/// stationarity residual `|||b_eps(sigma) - sigma|||` every
/// `record_every`-th step (the initial and final states always included).
pub fn integrate(
    game: &GameSpec,
    v: &Regularizer,
    eps: NoiseLevel,
    sigma0: &BayesianStrategy,
    space: &DiscreteTypeSpace,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    let steps = cfg.num_steps();
    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        diagnostics: Vec::new(),
    };
    let mut sigma = sigma0.clone();
    for i in 0..steps {
        let beta = best_response(game, v, eps, &sigma, space)?;
        if i % cfg.record_every == 0 {
            let residual = strong_norm(&beta.sub(&sigma)?, space)?;
            traj.push(i as f64 * cfg.dt, sigma.clone(), residual);
        }
        sigma = match cfg.method {
            Method::Euler => convex_step(&sigma, &beta, cfg.dt)?,
            Method::Rk4 => rk4_step(game, v, eps, &sigma, &beta, space, cfg.dt)?,
        };
    }
    let beta = best_response(game, v, eps, &sigma, space)?;
    let residual = strong_norm(&beta.sub(&sigma)?, space)?;
    traj.push(steps as f64 * cfg.dt, sigma, residual);
    Ok(traj)
}

fn rk4_step(
    game: &GameSpec,
    v: &Regularizer,
    eps: NoiseLevel,
    sigma: &BayesianStrategy,
    beta_at_sigma: &BayesianStrategy,
    space: &DiscreteTypeSpace,
    dt: f64,
) -> Result<BayesianStrategy> {
    let field_at = |state: &BayesianStrategy| -> Result<SignedBayesianStrategy> {
        vector_field(game, v, eps, state, space)
    };
    let k1 = beta_at_sigma.sub(sigma)?;
    let y2 = offset_state(sigma, &k1, 0.5 * dt)?;
    let k2 = field_at(&y2)?;
    let y3 = offset_state(sigma, &k2, 0.5 * dt)?;
    let k3 = field_at(&y3)?;
    let y4 = offset_state(sigma, &k3, dt)?;
    let k4 = field_at(&y4)?;
    let combined = k1
        .add(&k2.scale(2.0))?
        .add(&k3.scale(2.0))?
        .add(&k4)?
        .scale(dt / 6.0);
    offset_state(sigma, &combined, 1.0)
}

/// `sigma + h * delta`, repaired back onto the simplex within tolerance
/// 1e-9 (drift beyond that aborts the run).
fn offset_state(
    sigma: &BayesianStrategy,
    delta: &SignedBayesianStrategy,
    h: f64,
) -> Result<BayesianStrategy> {
    let rows: Result<Vec<SimplexPoint>> = sigma
        .rows()
        .iter()
        .zip(delta.rows())
        .map(|(row, d)| {
            let moved: Vec<f64> = row
                .entries()
                .iter()
                .zip(d)
                .map(|(x, dx)| x + h * dx)
                .collect();
            crate::simplex::renormalize(&moved, 1e-9)
        })
        .collect();
    BayesianStrategy::new(rows?)
}

/// Outcome of the semiflow-continuity experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct GronwallReport {
    /// Whether the distance stayed below the bound at every recorded time.
    pub holds: bool,
    /// Largest observed `distance / bound` ratio.
    pub max_ratio: f64,
    /// Field Lipschitz constant `1 + kappa/(eps*gamma)` used in the bound.
    pub rate: f64,
    /// Strong-Lipschitz constant of the game that entered the rate.
    pub kappa: f64,
    /// Initial strong-norm distance.
    pub initial_distance: f64,
}

/// Integrates two initial conditions side by side and verifies
/// `|||sigma_t - sigma'_t||| <= exp((1 + kappa/(eps*gamma)) t) * d0 + 1e-9`
/// at every recorded time. For matrix-type games `kappa` is the certified
/// operator-norm bound; otherwise it is sampled.
pub fn gronwall_check(
    game: &GameSpec,
    v: &Regularizer,
    eps: NoiseLevel,
    sigma0: &BayesianStrategy,
    sigma0_alt: &BayesianStrategy,
    space: &DiscreteTypeSpace,
    cfg: &IntegratorConfig,
) -> Result<GronwallReport> {
    let est = strong_lipschitz_estimate(game, space, 200, 0x5eed)?;
    let kappa = est.bound();
    let rate = 1.0 + kappa / (eps.get() * v.strong_convexity_modulus());
    let a = integrate(game, v, eps, sigma0, space, cfg)?;
    let b = integrate(game, v, eps, sigma0_alt, space, cfg)?;
    let d0 = strong_distance(sigma0, sigma0_alt, space)?;
    let mut holds = true;
    let mut max_ratio = 0.0f64;
    for (i, t) in a.times().iter().enumerate() {
        let dist = strong_distance(a.state(i), b.state(i), space)?;
        let bound = (rate * t).exp() * d0 + 1e-9;
        if dist > bound {
            holds = false;
        }
        max_ratio = max_ratio.max(dist / bound);
    }
    Ok(GronwallReport {
        holds,
        max_ratio,
        rate,
        kappa,
        initial_distance: d0,
    })
}

/// Outcome of the forward-invariance audit along a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport {
    /// The Lipschitz budget that was checked.
    pub alpha: f64,
    /// Whether `alpha >= 1/(eps*gamma)`, the hypothesis of the certified
    /// claim.
    pub alpha_certified: bool,
    /// Type-Lipschitz constant of the initial state.
    pub initial_lipschitz: f64,
    /// Largest type-Lipschitz constant along the recorded trajectory.
    pub max_lipschitz: f64,
    /// `max_lipschitz <= alpha + 1e-9`.
    pub lipschitz_ok: bool,
    /// For matrix-type games: whether the supplied metric dominates the
    /// operator-norm distance of the matrices (the game is then 1-Lipschitz
    /// in the type argument). `None` when not decidable.
    pub game_one_lipschitz: Option<bool>,
    /// Interior floor `min(m, smallest best-response entry observed)`.
    pub interior_floor: f64,
    /// Smallest strategy entry observed along the trajectory.
    pub min_entry_observed: f64,
    /// `min_entry_observed >= interior_floor - 1e-12`.
    pub interior_ok: bool,
}

/// Audits a recorded trajectory for forward invariance of the set of
/// `alpha`-type-Lipschitz strategies with entries at least `m`.
pub fn invariance_check(
    game: &GameSpec,
    v: &Regularizer,
    eps: NoiseLevel,
    traj: &Trajectory,
    space: &DiscreteTypeSpace,
    alpha: f64,
    m: f64,
) -> Result<InvarianceReport> {
    let metric = space
        .metric()
        .ok_or_else(|| Error::Config("invariance check requires a type metric".into()))?;
    let game_one_lipschitz = game.matrices().map(|ms| {
        let k = ms.len();
        let mut ok = true;
        for i in 0..k {
            for j in (i + 1)..k {
                let diff: Vec<Vec<f64>> = ms[i]
                    .iter()
                    .zip(&ms[j])
                    .map(|(ri, rj)| ri.iter().zip(rj).map(|(a, b)| a - b).collect())
                    .collect();
                if crate::games::operator_norm(&diff) > metric[i][j] + 1e-9 {
                    ok = false;
                }
            }
        }
        ok
    });

    let initial_lipschitz = lipschitz_in_type(traj.state(0), space)?;
    let mut max_lipschitz = 0.0f64;
    let mut min_entry_observed = f64::INFINITY;
    let mut beta_floor = f64::INFINITY;
    for state in traj.states() {
        max_lipschitz = max_lipschitz.max(lipschitz_in_type(state, space)?);
        min_entry_observed = min_entry_observed.min(min_row_entry(state));
        let beta = best_response(game, v, eps, state, space)?;
        beta_floor = beta_floor.min(min_row_entry(&beta));
    }
    let interior_floor = m.min(beta_floor);
    Ok(InvarianceReport {
        alpha,
        alpha_certified: alpha + 1e-12 >= 1.0 / (eps.get() * v.strong_convexity_modulus()),
        initial_lipschitz,
        max_lipschitz,
        lipschitz_ok: initial_lipschitz > alpha + 1e-9 || max_lipschitz <= alpha + 1e-9,
        game_one_lipschitz,
        interior_floor,
        min_entry_observed,
        interior_ok: min_entry_observed >= interior_floor - 1e-12,
    })
}
