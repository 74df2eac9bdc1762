//! Squashed linear-quadratic regulator.
//!
//! Dynamics s_{h+1} = g(A s_h + B a_h + xi_h) with g(x) = x / (1 + ||x||_2),
//! reward r_h = -s_h^T Q s_h - a_h^T R a_h (+ optional observation noise).
//! The squashing map confines states to the open unit ball, which turns the
//! classical LQR into a bounded, smooth, non-linear control problem.

use super::{EnvError, Environment};
use nalgebra::{DMatrix, DVector};

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Configuration of one squashed-LQR instance.
#[derive(Debug, Clone)]
pub struct SquashedLqrConfig {
    /// State transition matrix, d_S x d_S.
    pub a: DMatrix<f64>,
    /// Control matrix, d_S x d_A.
    pub b: DMatrix<f64>,
    /// State cost, symmetric PSD, d_S x d_S.
    pub q: DMatrix<f64>,
    /// Action cost, symmetric PSD, d_A x d_A.
    pub r: DMatrix<f64>,
    /// Per-coordinate standard deviation of the transition noise xi.
    pub noise_std: f64,
    /// Standard deviation of the additive reward observation noise eta.
    pub reward_noise_std: f64,
    pub horizon: usize,
    pub initial_state: DVector<f64>,
}

impl SquashedLqrConfig {
    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn action_dim(&self) -> usize {
        self.b.ncols()
    }

    fn validate(&self) -> Result<(), EnvError> {
        let ds = self.state_dim();
        let da = self.action_dim();
        if self.a.ncols() != ds {
            return Err(EnvError::ShapeMismatch { expected: ds, got: self.a.ncols(), context: "A columns" });
        }
        if self.b.nrows() != ds {
            return Err(EnvError::ShapeMismatch { expected: ds, got: self.b.nrows(), context: "B rows" });
        }
        check_psd(&self.q, ds, "Q")?;
        check_psd(&self.r, da, "R")?;
        if self.horizon == 0 {
            return Err(EnvError::ZeroHorizon);
        }
        if !(self.noise_std.is_finite() && self.noise_std >= 0.0) {
            return Err(EnvError::BadScalar("noise_std"));
        }
        if !(self.reward_noise_std.is_finite() && self.reward_noise_std >= 0.0) {
            return Err(EnvError::BadScalar("reward_noise_std"));
        }
        if self.initial_state.len() != ds {
            return Err(EnvError::ShapeMismatch { expected: ds, got: self.initial_state.len(), context: "initial state" });
        }
        let norm = self.initial_state.norm();
        if norm >= 1.0 {
            return Err(EnvError::InitialStateOutsideBall(norm));
        }
        Ok(())
    }

    /// Largest attainable noiseless per-step cost:
    /// sup over the open unit state ball of s^T Q s (= lambda_max(Q)) plus
    /// the maximum of a^T R a over the action cube (attained at a vertex).
    pub fn max_step_cost(&self) -> f64 {
        let q_top = symmetric_lambda_max(&self.q);
        let da = self.action_dim();
        let mut r_top = 0.0f64;
        for mask in 0..(1u32 << da) {
            let a = DVector::from_iterator(
                da,
                (0..da).map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 }),
            );
            r_top = r_top.max((a.transpose() * &self.r * &a)[(0, 0)]);
        }
        q_top + r_top
    }
}

fn check_psd(m: &DMatrix<f64>, dim: usize, name: &'static str) -> Result<(), EnvError> {
    if m.nrows() != dim || m.ncols() != dim {
        return Err(EnvError::ShapeMismatch { expected: dim, got: m.nrows(), context: name });
    }
    let asym = (m - m.transpose()).norm();
    if asym > 1e-10 {
        return Err(EnvError::NotPsd(name));
    }
    let eigs = m.clone().symmetric_eigen().eigenvalues;
    if eigs.iter().any(|&l| l < -1e-10) {
        return Err(EnvError::NotPsd(name));
    }
    Ok(())
}

fn symmetric_lambda_max(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// The squashing map g(x) = x / (1 + ||x||_2); its image is the open unit
/// ball.
pub fn squash(x: &DVector<f64>) -> DVector<f64> {
    x / (1.0 + x.norm())
}

/// One transition of the squashed LQR. Draws, in order, one standard normal
/// per state coordinate (transition noise) and then one for the reward
/// noise; both draws happen even when the corresponding std is zero so that
/// the rng stream is aligned across noise settings.
pub fn lqr_step(
    cfg: &SquashedLqrConfig,
    state: &DVector<f64>,
    action: &DVector<f64>,
    rng: &mut ChaCha8Rng,
) -> Result<(DVector<f64>, f64), EnvError> {
    if state.len() != cfg.state_dim() {
        return Err(EnvError::ShapeMismatch { expected: cfg.state_dim(), got: state.len(), context: "state" });
    }
    if action.len() != cfg.action_dim() {
        return Err(EnvError::ShapeMismatch { expected: cfg.action_dim(), got: action.len(), context: "action" });
    }
    let mut drift = &cfg.a * state + &cfg.b * action;
    for i in 0..drift.len() {
        let z: f64 = StandardNormal.sample(rng);
        drift[i] += cfg.noise_std * z;
    }
    let next = squash(&drift);
    let eta: f64 = StandardNormal.sample(rng);
    let reward = -(state.transpose() * &cfg.q * state)[(0, 0)]
        - (action.transpose() * &cfg.r * action)[(0, 0)]
        + cfg.reward_noise_std * eta;
    Ok((next, reward))
}

/// A validated, ready-to-run squashed-LQR environment.
#[derive(Debug, Clone)]
pub struct SquashedLqr {
    cfg: SquashedLqrConfig,
}

impl SquashedLqr {
    pub fn new(cfg: SquashedLqrConfig) -> Result<Self, EnvError> {
        cfg.validate()?;
        Ok(Self { cfg })
    }

    pub fn config(&self) -> &SquashedLqrConfig {
        &self.cfg
    }
}

impl Environment for SquashedLqr {
    fn horizon(&self) -> usize {
        self.cfg.horizon
    }

    fn state_dim(&self) -> usize {
        self.cfg.state_dim()
    }

    fn action_dim(&self) -> usize {
        self.cfg.action_dim()
    }

    fn initial_state(&self) -> DVector<f64> {
        self.cfg.initial_state.clone()
    }

    fn step(
        &self,
        _h: usize,
        state: &DVector<f64>,
        action: &DVector<f64>,
        rng: &mut ChaCha8Rng,
    ) -> Result<(DVector<f64>, f64), EnvError> {
        lqr_step(&self.cfg, state, action, rng)
    }

    fn reward_bounds(&self) -> (f64, f64) {
        (-self.cfg.max_step_cost(), 0.0)
    }
}

/// The two benchmark instances: d_S = 2, d_A = 1, B = [1, 1]^T, Q = I,
/// R = [0.2], H = 20, s_1 = 0, transition noise std 0.1, no reward noise.
/// They differ only in the dynamics matrix: the left one is a scaled
/// rotation, the right one the exchange matrix.
pub fn paper_environments() -> (SquashedLqrConfig, SquashedLqrConfig) {
    let base = |a: DMatrix<f64>| SquashedLqrConfig {
        a,
        b: DMatrix::from_column_slice(2, 1, &[1.0, 1.0]),
        q: DMatrix::identity(2, 2),
        r: DMatrix::from_element(1, 1, 0.2),
        noise_std: 0.1,
        reward_noise_std: 0.0,
        horizon: 20,
        initial_state: DVector::zeros(2),
    };
    let left = base(DMatrix::from_row_slice(2, 2, &[0.7, 0.7, -0.7, 0.7]));
    let right = base(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
    (left, right)
}
