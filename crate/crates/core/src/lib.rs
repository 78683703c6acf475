//! Seed-deterministic building blocks for sequential decision making.
//!
//! The crate is organised bottom-up:
//!
//! * [`stochastics`] owns every source of randomness and the dense
//!   Cholesky machinery the Gaussian-process code sits on.
//! * [`concentration`] evaluates tail bounds (Markov, Chebyshev, Chernoff,
//!   Hoeffding, Gaussian) and checks them against Monte-Carlo frequencies.
//! * [`bandit`] runs explore-then-exploit and UCB on K-armed bandits.
//! * [`gp`] is exact Gaussian-process regression plus information gain.
//! * [`bo`] drives GP-UCB and GP Thompson sampling, discrete and continuous.
//! * [`planning`] covers tree MDPs: backward induction, A* and MCTS.
//! * [`harness`] turns a JSON experiment description into CSV/JSON output.
//!
//! All logarithms are natural logarithms.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bandit;
pub mod bo;
pub mod concentration;
pub mod error;
pub mod gp;
pub mod harness;
pub mod planning;
pub mod stochastics;

pub use error::{Error, Result};
