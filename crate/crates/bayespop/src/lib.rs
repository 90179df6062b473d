//! Regularized best-response dynamics in heterogeneous population games.
//!
//! A population of agents is distributed over finitely many *types* (a
//! weighted atom per type). Each type holds a belief over `n` strategies, so
//! a population state is a row-stochastic `K x n` array. A game assigns every
//! type a payoff vector that may depend on the whole state; agents revise
//! towards the *regularized best response*
//!
//! ```text
//! b_eps(u) = argmax_{y in simplex} <y, u> - eps * v(y)
//! ```
//!
//! where `v` is a strongly convex regularizer (Shannon negentropy, Tsallis,
//! or Burg). The continuous-time revision protocol is the smooth dynamic
//!
//! ```text
//! sigma_dot = b_eps(sigma) - sigma
//! ```
//!
//! whose rest points are the regularized equilibria of the game.
//!
//! The crate provides, module by module:
//!
//! - [`simplex`] — simplex geometry, tangent projections, drift repair
//! - [`regularizers`] — the regularizer family and its conjugate-argmax maps
//! - [`population`] — discretized type spaces, strategies, the strong norm
//! - [`games`] — matrix-type and aggregative games, stability/potential tests
//! - [`dynamics`] — the revision vector field, simplex-preserving integrators,
//!   continuity and invariance certification
//! - [`equilibrium`] — damped fixed-point solver and noise-level sweeps
//! - [`diagnostics`] — potential/Lyapunov scalars and monotonicity audits
//! - [`scenario`] / [`cli`] — JSON scenario files and the command front end
//!
//! Start with the runnable examples (`cargo run --example conjugate_maps`,
//! `... --example stable_game_lyapunov`, and friends); each one demonstrates
//! a single capability end to end.

pub mod simplex;

pub mod regularizers;

pub mod population;

pub mod games;

pub mod dynamics;

pub mod equilibrium;

pub mod diagnostics;

pub mod scenario;

pub mod checks;

pub mod cli;

use thiserror::Error;

/// Unified error type for the whole crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An input contained NaN or infinity where a finite value is required.
    #[error("non-finite input in {0}")]
    NonFinite(&'static str),

    /// A vector violated the simplex constraints beyond the allowed tolerance.
    #[error("simplex drift beyond tolerance {tol:.3e} (sum {sum:.17e}, min entry {min:.17e}) in {context}: {entries:?}")]
    Drift {
        context: &'static str,
        tol: f64,
        sum: f64,
        min: f64,
        entries: Vec<f64>,
    },

    /// Dimensions of two objects do not agree.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A value lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A scenario or call-site configuration is invalid or incomplete.
    #[error("configuration error: {0}")]
    Config(String),

    /// A root finder exhausted its iteration budget.
    #[error("root finder did not converge after {iterations} iterations on bracket [{lo:.17e}, {hi:.17e}], residual {residual:.3e}")]
    Solver {
        iterations: usize,
        lo: f64,
        hi: f64,
        residual: f64,
    },

    /// A finite-difference or integrator step left the simplex.
    #[error("step left the simplex: {0}")]
    Step(String),

    /// Filesystem or serialization failure in the command front end.
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub use dynamics::{IntegratorConfig, Method, Trajectory};
pub use equilibrium::EquilibriumResult;
pub use games::{GameSpec, Potential};
pub use population::{BayesianStrategy, DiscreteTypeSpace, SignedBayesianStrategy};
pub use regularizers::{NoiseLevel, Regularizer};
pub use simplex::{SimplexPoint, TangentVector};
