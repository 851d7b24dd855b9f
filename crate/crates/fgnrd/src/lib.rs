//! Convex optimization through no-regret game dynamics.
//!
//! The crate turns `min f(x)` into a two-player zero-sum game over the payoff
//! `g(x, y) = <x, y> - f*(y)` and runs weighted online learners for both
//! players: the averaged iterates form an approximate equilibrium whose error
//! is the sum of the players' average regrets, which is also a primal
//! optimality certificate. Classic first-order methods fall out of specific
//! strategy pairs, and each is implemented twice — once in its boxed
//! iterative form, once as a dynamic — so their equivalence is tested rather
//! than assumed.
//!
//! Module map:
//! - [`point`], [`weights`], [`loss`], [`trace`]: shared domain types and
//!   regret accounting.
//! - [`geometry`]: constraint sets with LMO / projection / Bregman / gauge /
//!   prox oracles.
//! - [`problems`]: the benchmark objective catalog with closed-form
//!   conjugates and constants.
//! - [`learners`]: the online strategies behind a common trait.
//! - [`dynamics`]: the game driver and equilibrium-gap certification.
//! - [`optimizers`]: the derived iterative methods behind a common trait.
//! - [`verify`]: equivalence checks, regret-bound certification, rate fits.
//! - [`cli`]: the batch experiment runner.

pub mod cli;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod learners;
pub mod linalg;
pub mod loss;
pub mod optimizers;
pub mod point;
pub mod problems;
pub mod trace;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
pub use point::Point;
