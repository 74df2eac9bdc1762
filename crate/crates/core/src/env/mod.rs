//! Episodic simulation environments.
//!
//! Every environment here is a finite-horizon MDP over continuous vectors:
//! states live in [-1, 1]^{d_S} (strictly inside the unit ball for the
//! squashed-LQR family), actions in [-1, 1]^{d_A}. Configs are immutable;
//! each run owns a private rng stream, so concurrent runs with distinct
//! streams are safe, while a single episode is strictly sequential.

mod lqr;
mod smooth;
mod tabular;

pub use lqr::{lqr_step, paper_environments, squash, SquashedLqr, SquashedLqrConfig};
pub use smooth::{density_eval, SmoothDensityMdp, SmoothDensityMdpConfig, SmoothMap};
pub use tabular::TabularMdp;

use nalgebra::DVector;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("shape mismatch: expected {expected}, got {got} ({context})")]
    ShapeMismatch { expected: usize, got: usize, context: &'static str },
    #[error("matrix {0} must be symmetric positive semidefinite")]
    NotPsd(&'static str),
    #[error("initial state must lie strictly inside the unit ball (norm {0})")]
    InitialStateOutsideBall(f64),
    #[error("horizon must be at least 1")]
    ZeroHorizon,
    #[error("{0} must be non-negative and finite")]
    BadScalar(&'static str),
    #[error("state or action outside the admissible set: {0}")]
    OutOfDomain(String),
}

/// One (state, action, reward) record.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub state: DVector<f64>,
    pub action: DVector<f64>,
    pub reward: f64,
}

/// The full record of one episode: exactly H steps.
#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    pub episode_index: usize,
    pub steps: Vec<Step>,
}

impl Transcript {
    /// Sum of the per-step rewards.
    pub fn episodic_return(&self) -> f64 {
        self.steps.iter().map(|s| s.reward).sum()
    }

    /// Canonical text form, used by the byte-level determinism checks.
    /// Floats are written with Rust's shortest round-trip formatting.
    pub fn to_canonical_string(&self) -> String {
        let mut out = format!("episode {}\n", self.episode_index);
        for (h, step) in self.steps.iter().enumerate() {
            out.push_str(&format!(
                "{} s=[{}] a=[{}] r={}\n",
                h + 1,
                join_floats(step.state.as_slice()),
                join_floats(step.action.as_slice()),
                step.reward
            ));
        }
        out
    }
}

fn join_floats(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// An episodic simulator.
pub trait Environment: Sync {
    fn horizon(&self) -> usize;
    fn state_dim(&self) -> usize;
    fn action_dim(&self) -> usize;
    fn initial_state(&self) -> DVector<f64>;

    /// Advance one stage. `h` is the 1-based stage index. Implementations
    /// document the order in which they consume rng draws.
    fn step(
        &self,
        h: usize,
        state: &DVector<f64>,
        action: &DVector<f64>,
        rng: &mut ChaCha8Rng,
    ) -> Result<(DVector<f64>, f64), EnvError>;

    /// (lowest, highest) attainable noiseless per-step reward. Used to size
    /// value caps and pick the clipping range.
    fn reward_bounds(&self) -> (f64, f64);
}

/// Run one full episode under `policy` (a map from stage and state to an
/// action). Rng draws are consumed strictly in stage order, and within each
/// stage in the order documented by the environment (transition noise
/// first, reward noise second).
pub fn run_episode<E, P>(
    env: &E,
    episode_index: usize,
    mut policy: P,
    rng: &mut ChaCha8Rng,
) -> Result<Transcript, EnvError>
where
    E: Environment + ?Sized,
    P: FnMut(usize, &DVector<f64>) -> DVector<f64>,
{
    let mut state = env.initial_state();
    let mut steps = Vec::with_capacity(env.horizon());
    for h in 1..=env.horizon() {
        let action = policy(h, &state);
        let (next, reward) = env.step(h, &state, &action, rng)?;
        steps.push(Step { state: state.clone(), action, reward });
        state = next;
    }
    Ok(Transcript { episode_index, steps })
}

/// Uniform grid of candidate actions: `points` per action dimension,
/// spanning [-1, 1] inclusive, in row-major (odometer) order. Learners need
/// a finite candidate set for their per-stage argmax.
pub fn uniform_action_grid(action_dim: usize, points: usize) -> Vec<DVector<f64>> {
    assert!(points >= 1 && action_dim >= 1);
    let coords: Vec<f64> = if points == 1 {
        vec![0.0]
    } else {
        (0..points)
            .map(|i| -1.0 + 2.0 * i as f64 / (points - 1) as f64)
            .collect()
    };
    let total = coords.len().pow(action_dim as u32);
    let mut grid = Vec::with_capacity(total);
    let mut digits = vec![0usize; action_dim];
    for _ in 0..total {
        grid.push(DVector::from_iterator(action_dim, digits.iter().map(|&i| coords[i])));
        for d in (0..action_dim).rev() {
            digits[d] += 1;
            if digits[d] < coords.len() {
                break;
            }
            digits[d] = 0;
        }
    }
    grid
}
