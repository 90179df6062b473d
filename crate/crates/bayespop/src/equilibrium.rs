//! Regularized equilibria as fixed points of the best-response map.
//!
//! The solver is damped Picard iteration
//!
//! ```text
//! sigma <- (1-d)*sigma + d*b_eps(sigma)
//! ```
//!
//! which is exactly the Euler discretization of the revision dynamic with
//! step `d`, so every solve doubles as a dynamics run. Non-convergence is
//! reported as data (the best iterate with `converged = false`), never as an
//! error: existence of a fixed point is guaranteed, uniqueness and global
//! attraction are not, and multistart is the caller's tool for multiplicity.

use crate::dynamics::{best_response, convex_step};
use crate::games::GameSpec;
use crate::population::{random_strategy, strong_norm, BayesianStrategy, DiscreteTypeSpace};
use crate::regularizers::{NoiseLevel, Regularizer};
use crate::{Error, Result};

/// Result of one fixed-point solve.
#[derive(Debug, Clone)]
pub struct EquilibriumResult {
    pub strategy: BayesianStrategy,
    /// Strong-norm stationarity gap `|||b_eps(sigma) - sigma|||` at the
    /// returned iterate.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Damped Picard iteration towards a fixed point of the best-response map.
pub fn solve_fixed_point(
    game: &GameSpec,
    v: &Regularizer,
    eps: NoiseLevel,
    sigma_init: &BayesianStrategy,
    space: &DiscreteTypeSpace,
    damping: f64,
    tol: f64,
    max_iter: usize,
) -> Result<EquilibriumResult> {
    if !(0.0..=1.0).contains(&damping) || damping == 0.0 {
        return Err(Error::Config(format!(
            "damping must lie in (0,1], got {damping}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
    }
    let mut sigma = sigma_init.clone();
    let mut best: Option<(f64, BayesianStrategy, usize)> = None;
    for iter in 0..=max_iter {
        let beta = best_response(game, v, eps, &sigma, space)?;
        let residual = strong_norm(&beta.sub(&sigma)?, space)?;
        if best.as_ref().map_or(true, |(r, _, _)| residual < *r) {
            best = Some((residual, sigma.clone(), iter));
        }
        if residual <= tol {
            return Ok(EquilibriumResult {
                strategy: sigma,
                residual,
                iterations: iter,
                converged: true,
            });
        }
        if iter == max_iter {
            break;
        }
        sigma = convex_step(&sigma, &beta, damping)?;
    }
    let (residual, strategy, iterations) = best.expect("at least one iterate was evaluated");
    Ok(EquilibriumResult {
        strategy,
        residual,
        iterations,
        converged: false,
    })
}

/// The stationarity gap `|||b_eps(sigma) - sigma|||`; zero exactly at the
/// regularized equilibria.
pub fn residual(
    game: &GameSpec,
    v: &Regularizer,
    eps: NoiseLevel,
    sigma: &BayesianStrategy,
    space: &DiscreteTypeSpace,
) -> Result<f64> {
    let beta = best_response(game, v, eps, sigma, space)?;
    strong_norm(&beta.sub(sigma)?, space)
}

/// One entry of a noise-level sweep.
#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub epsilon: f64,
    pub result: EquilibriumResult,
}

/// Solves the game at every noise level, in descending order, warm-starting
/// each solve from the previous solution. The first start is a seeded random
/// strategy.
#[allow(clippy::too_many_arguments)]
pub fn epsilon_sweep(
    game: &GameSpec,
    v: &Regularizer,
    eps_list: &[f64],
    space: &DiscreteTypeSpace,
    seed: u64,
    damping: f64,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<SweepEntry>> {
    if eps_list.is_empty() {
        return Err(Error::Config("epsilon sweep needs at least one level".into()));
    }
    let mut levels: Vec<NoiseLevel> = eps_list
        .iter()
        .map(|&e| NoiseLevel::new(e))
        .collect::<Result<_>>()?;
    levels.sort_by(|a, b| b.get().partial_cmp(&a.get()).expect("finite"));
    let mut current = random_strategy(space, game.num_strategies(), seed);
    let mut out = Vec::with_capacity(levels.len());
    for eps in levels {
        let result = solve_fixed_point(game, v, eps, &current, space, damping, tol, max_iter)?;
        current = result.strategy.clone();
        out.push(SweepEntry {
            epsilon: eps.get(),
            result,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate, IntegratorConfig};
    use crate::population::strong_distance;
    use crate::simplex::SimplexPoint;

    fn shannon() -> Regularizer {
        Regularizer::shannon()
    }

    fn eps(e: f64) -> NoiseLevel {
        NoiseLevel::new(e).unwrap()
    }

    fn point(vs: &[f64]) -> SimplexPoint {
        SimplexPoint::new(vs.to_vec()).unwrap()
    }

    #[test]
    fn zero_game_solves_in_a_few_steps() {
        let space = DiscreteTypeSpace::single();
        let zero = GameSpec::zero(2, 1).unwrap();
        let start = BayesianStrategy::vertex(1, 2, 0);
        let r = solve_fixed_point(&zero, &shannon(), eps(1.0), &start, &space, 1.0, 1e-12, 100)
            .unwrap();
        assert!(r.converged);
        assert!(r.iterations <= 3);
        assert!(r.residual <= 1e-12);
        assert!(r.strategy.row(0).distance(&SimplexPoint::uniform(2)) < 1e-12);
    }

    #[test]
    fn rps_equilibrium_is_uniform() {
        let space = DiscreteTypeSpace::single();
        let game = GameSpec::rock_paper_scissors(1).unwrap();
        let start = random_strategy(&space, 3, 3);
        let r = solve_fixed_point(&game, &shannon(), eps(1.0), &start, &space, 0.5, 1e-8, 100_000)
            .unwrap();
        assert!(r.converged);
        assert!(r.residual <= 1e-8);
        assert!(r.strategy.row(0).distance(&SimplexPoint::uniform(3)) < 1e-6);
    }

    #[test]
    fn coordination_game_low_noise() {
        let space = DiscreteTypeSpace::single();
        let game = GameSpec::common_matrix(vec![vec![1.0, 0.0], vec![0.0, 1.0]], 1).unwrap();
        // biased start climbs to the near-vertex equilibrium
        let start = BayesianStrategy::new(vec![point(&[0.9, 0.1])]).unwrap();
        let r = solve_fixed_point(&game, &shannon(), eps(0.1), &start, &space, 0.5, 1e-10, 100_000)
            .unwrap();
        assert!(r.converged);
        let agg = crate::population::expectation(&r.strategy, &space).unwrap();
        assert!(agg.entries()[0] > 0.999, "aggregate {:?}", agg.entries());

        // the symmetric point is an exact fixed point
        let sym = BayesianStrategy::uniform(1, 2);
        let r = solve_fixed_point(&game, &shannon(), eps(0.1), &sym, &space, 0.5, 1e-10, 10)
            .unwrap();
        assert!(r.converged);
        assert!(r.iterations == 0);
        assert!(strong_distance(&r.strategy, &sym, &space).unwrap() < 1e-15);
    }

    #[test]
    fn residual_examples() {
        let space = DiscreteTypeSpace::single();
        let zero = GameSpec::zero(2, 1).unwrap();
        let uniform = BayesianStrategy::uniform(1, 2);
        assert!(residual(&zero, &shannon(), eps(1.0), &uniform, &space).unwrap() <= 1e-12);

        let vertex = BayesianStrategy::vertex(1, 2, 0);
        let r = residual(&zero, &shannon(), eps(1.0), &vertex, &space).unwrap();
        assert!((r - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn converged_results_reverify() {
        let space = DiscreteTypeSpace::uniform(3).unwrap();
        let game = GameSpec::rock_paper_scissors(3).unwrap();
        for seed in 0..5 {
            let start = random_strategy(&space, 3, seed);
            let r = solve_fixed_point(&game, &shannon(), eps(0.5), &start, &space, 0.5, 1e-8, 100_000)
                .unwrap();
            assert!(r.converged);
            let fresh = residual(&game, &shannon(), eps(0.5), &r.strategy, &space).unwrap();
            assert!(fresh <= 2.0 * 1e-8);
        }
    }

    #[test]
    fn solver_matches_euler_stepwise() {
        // damping d and Euler dt=d perform the identical update
        let space = DiscreteTypeSpace::uniform(2).unwrap();
        let game = GameSpec::common_matrix(vec![vec![0.3, -0.2], vec![0.1, 0.4]], 2).unwrap();
        let start = random_strategy(&space, 2, 11);
        let d = 0.3;
        let cfg = IntegratorConfig::euler(d, 10.0 * d, 1).unwrap();
        let traj = integrate(&game, &shannon(), eps(1.0), &start, &space, &cfg).unwrap();
        for m in 1..=10usize {
            let r = solve_fixed_point(&game, &shannon(), eps(1.0), &start, &space, d, 1e-300, m)
                .unwrap();
            // with an unattainable tolerance the solver walks the Euler orbit;
            // its reported iterate must sit exactly on the trajectory
            let gap = strong_distance(&r.strategy, traj.state(r.iterations), &space).unwrap();
            assert!(gap <= 1e-12, "step {m} gap {gap}");
            assert!(!r.converged);
        }
    }

    #[test]
    fn sweep_descends_and_warm_starts() {
        let space = DiscreteTypeSpace::single();
        let game = GameSpec::rock_paper_scissors(1).unwrap();
        let entries = epsilon_sweep(
            &game,
            &shannon(),
            &[0.5, 2.0, 1.0, 0.1],
            &space,
            7,
            0.5,
            1e-8,
            100_000,
        )
        .unwrap();
        let eps_order: Vec<f64> = entries.iter().map(|e| e.epsilon).collect();
        assert_eq!(eps_order, vec![2.0, 1.0, 0.5, 0.1]);
        for e in &entries {
            assert!(e.result.converged);
            assert!(e.result.strategy.row(0).distance(&SimplexPoint::uniform(3)) < 1e-6);
        }
    }

    #[test]
    fn sweep_tracks_vertex_as_noise_vanishes() {
        let space = DiscreteTypeSpace::single();
        let game = GameSpec::common_matrix(vec![vec![1.0, 0.0], vec![0.0, 1.0]], 1).unwrap();
        // warm start biased towards the first strategy
        let entries = {
            let mut current = BayesianStrategy::new(vec![point(&[0.8, 0.2])]).unwrap();
            let mut out = Vec::new();
            for e in [1.0, 0.5, 0.2, 0.1, 0.05] {
                let r = solve_fixed_point(
                    &game,
                    &shannon(),
                    eps(e),
                    &current,
                    &space,
                    0.5,
                    1e-10,
                    100_000,
                )
                .unwrap();
                current = r.strategy.clone();
                out.push((e, r));
            }
            out
        };
        let mut last = 0.0;
        for (_, r) in &entries {
            assert!(r.converged);
            let agg = crate::population::expectation(&r.strategy, &space).unwrap();
            assert!(agg.entries()[0] >= last - 1e-12);
            last = agg.entries()[0];
        }
        assert!(last > 0.999);
    }

    #[test]
    fn solver_is_permutation_invariant() {
        let space = DiscreteTypeSpace::new(vec![0.3, 0.7]).unwrap();
        let swapped_space = DiscreteTypeSpace::new(vec![0.7, 0.3]).unwrap();
        let m1 = vec![vec![0.5, 0.1], vec![-0.2, 0.3]];
        let m2 = vec![vec![-0.4, 0.2], vec![0.6, 0.0]];
        let game = GameSpec::matrix_game(vec![m1.clone(), m2.clone()]).unwrap();
        let swapped_game = GameSpec::matrix_game(vec![m2, m1]).unwrap();
        let start = random_strategy(&space, 2, 21);
        let swapped_start = BayesianStrategy::new(vec![
            start.row(1).clone(),
            start.row(0).clone(),
        ])
        .unwrap();
        let a = solve_fixed_point(&game, &shannon(), eps(0.5), &start, &space, 0.5, 1e-10, 100_000)
            .unwrap();
        let b = solve_fixed_point(
            &swapped_game,
            &shannon(),
            eps(0.5),
            &swapped_start,
            &swapped_space,
            0.5,
            1e-10,
            100_000,
        )
        .unwrap();
        assert!(a.converged && b.converged);
        assert!(a.strategy.row(0).distance(b.strategy.row(1)) < 1e-12);
        assert!(a.strategy.row(1).distance(b.strategy.row(0)) < 1e-12);
    }
}
