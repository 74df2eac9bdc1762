//! Regret-minimizing episodic reinforcement learning in smooth
//! continuous-state MDPs via orthogonal Legendre feature maps.
//!
//! The crate provides:
//!
//! - [`features`]: orthonormal Legendre (and baseline monomial) polynomial
//!   feature maps over [-1, 1]^d;
//! - [`env`]: episodic simulators (squashed LQR, a synthetic smooth MDP
//!   with closed-form transition density, and a small tabular reference);
//! - [`lsvi`]: optimistic least-squares value iteration over an arbitrary
//!   feature map, with the degree-selection rule;
//! - [`eleanor`]: desk-scale optimistic planning over per-stage parameter
//!   vectors constrained to confidence balls;
//! - [`validation`]: empirical checks of basis orthonormality, polynomial
//!   approximation rates, and inherent Bellman error decay;
//! - [`harness`]: the experiment runner behind the `smooth-rl` CLI.

pub mod eleanor;
pub mod env;
pub mod features;
pub mod harness;
pub mod lsvi;
pub mod quad;
pub mod validation;
