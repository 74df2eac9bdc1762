//! A synthetic smooth MDP with an analytically known transition density.
//!
//! State and action are scalars in [-1, 1]. The next state is drawn from an
//! exponentially tilted density on [-1, 1]:
//!
//!     p(s' | s, a) = Z(lambda)^{-1} e^{lambda s'},   lambda = kappa * m(s, a),
//!     Z(lambda) = int_{-1}^{1} e^{lambda t} dt = 2 sinh(lambda) / lambda,
//!
//! where m is a configurable smooth map. The density is strictly positive,
//! integrates to one in closed form, tends to the uniform 1/2 as
//! kappa -> 0, and is infinitely differentiable in (s, a) whenever m is.
//! Sampling uses the closed-form inverse CDF, so a transition consumes
//! exactly one uniform draw.

use super::{EnvError, Environment};
use nalgebra::DVector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// A named smooth map from a state-action pair to a scalar. An enum rather
/// than a closure so configs stay comparable and serializable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SmoothMap {
    Zero,
    /// gain * tanh(s + a)
    TanhSum { gain: f64 },
    /// gain * cos(pi s) * a
    CosStateTimesAction { gain: f64 },
    /// gain * s * a  (an exact degree-2 polynomial)
    Bilinear { gain: f64 },
}

impl SmoothMap {
    pub fn eval(&self, s: f64, a: f64) -> f64 {
        match *self {
            SmoothMap::Zero => 0.0,
            SmoothMap::TanhSum { gain } => gain * (s + a).tanh(),
            SmoothMap::CosStateTimesAction { gain } => gain * (std::f64::consts::PI * s).cos() * a,
            SmoothMap::Bilinear { gain } => gain * s * a,
        }
    }

    /// Sup of |eval| over [-1, 1]^2.
    pub fn sup_abs(&self) -> f64 {
        match *self {
            SmoothMap::Zero => 0.0,
            SmoothMap::TanhSum { gain } => gain.abs() * 2.0f64.tanh(),
            SmoothMap::CosStateTimesAction { gain } | SmoothMap::Bilinear { gain } => gain.abs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothDensityMdpConfig {
    /// Tilt center: the next-state distribution leans toward the sign of
    /// `mean_fn(s, a)`. Must map into (-1, 1).
    pub mean_fn: SmoothMap,
    /// Tilt strength kappa; 0 gives the uniform density on [-1, 1].
    pub concentration: f64,
    /// Deterministic reward, mapping into [-1, 1].
    pub reward_fn: SmoothMap,
    pub horizon: usize,
}

impl SmoothDensityMdpConfig {
    /// The default synthetic instance: mean 0.5 tanh(s + a), kappa = 8,
    /// reward 0.5 cos(pi s) a, horizon 2.
    pub fn default_synthetic() -> Self {
        Self {
            mean_fn: SmoothMap::TanhSum { gain: 0.5 },
            concentration: 8.0,
            reward_fn: SmoothMap::CosStateTimesAction { gain: 0.5 },
            horizon: 2,
        }
    }

    /// An instance whose reward and transition density are exact low-degree
    /// polynomials in (s, a): zero tilt (density identically 1/2) and a
    /// bilinear reward.
    pub fn exact_polynomial() -> Self {
        Self {
            mean_fn: SmoothMap::Zero,
            concentration: 8.0,
            reward_fn: SmoothMap::Bilinear { gain: 0.25 },
            horizon: 2,
        }
    }

    fn validate(&self) -> Result<(), EnvError> {
        if self.horizon == 0 {
            return Err(EnvError::ZeroHorizon);
        }
        if !(self.concentration.is_finite() && self.concentration >= 0.0) {
            return Err(EnvError::BadScalar("concentration"));
        }
        if self.mean_fn.sup_abs() >= 1.0 {
            return Err(EnvError::OutOfDomain("mean_fn must map into (-1, 1)".into()));
        }
        if self.reward_fn.sup_abs() > 1.0 {
            return Err(EnvError::OutOfDomain("reward_fn must map into [-1, 1]".into()));
        }
        Ok(())
    }

    fn lambda(&self, s: f64, a: f64) -> f64 {
        self.concentration * self.mean_fn.eval(s, a)
    }
}

/// lambda / (2 sinh lambda), the reciprocal normalizer, with the removable
/// singularity at 0 handled by its Taylor expansion.
fn inverse_normalizer(lambda: f64) -> f64 {
    if lambda.abs() < 1e-5 {
        let l2 = lambda * lambda;
        0.5 / (1.0 + l2 / 6.0 + l2 * l2 / 120.0)
    } else {
        lambda / (2.0 * lambda.sinh())
    }
}

/// Closed-form transition density p(s_next | s, a).
pub fn density_eval(
    cfg: &SmoothDensityMdpConfig,
    s_next: f64,
    s: f64,
    a: f64,
) -> Result<f64, EnvError> {
    for (name, v) in [("s_next", s_next), ("s", s), ("a", a)] {
        if !v.is_finite() || v.abs() > 1.0 {
            return Err(EnvError::OutOfDomain(format!("{name} = {v} outside [-1, 1]")));
        }
    }
    let lambda = cfg.lambda(s, a);
    Ok(inverse_normalizer(lambda) * (lambda * s_next).exp())
}

/// Inverse CDF of the tilted density: maps u in [0, 1] to [-1, 1].
fn sample_tilted(lambda: f64, u: f64) -> f64 {
    if lambda.abs() < 1e-8 {
        return 2.0 * u - 1.0;
    }
    // F(t) = (e^{lambda t} - e^{-lambda}) / (e^{lambda} - e^{-lambda})
    let lo = (-lambda).exp();
    let span = lambda.exp() - lo;
    ((lo + u * span).ln() / lambda).clamp(-1.0, 1.0)
}

/// A validated smooth-density environment.
#[derive(Debug, Clone)]
pub struct SmoothDensityMdp {
    cfg: SmoothDensityMdpConfig,
}

impl SmoothDensityMdp {
    pub fn new(cfg: SmoothDensityMdpConfig) -> Result<Self, EnvError> {
        cfg.validate()?;
        Ok(Self { cfg })
    }

    pub fn config(&self) -> &SmoothDensityMdpConfig {
        &self.cfg
    }
}

impl Environment for SmoothDensityMdp {
    fn horizon(&self) -> usize {
        self.cfg.horizon
    }

    fn state_dim(&self) -> usize {
        1
    }

    fn action_dim(&self) -> usize {
        1
    }

    fn initial_state(&self) -> DVector<f64> {
        DVector::zeros(1)
    }

    /// Consumes exactly one uniform draw (the transition); the reward is
    /// deterministic.
    fn step(
        &self,
        _h: usize,
        state: &DVector<f64>,
        action: &DVector<f64>,
        rng: &mut ChaCha8Rng,
    ) -> Result<(DVector<f64>, f64), EnvError> {
        if state.len() != 1 {
            return Err(EnvError::ShapeMismatch { expected: 1, got: state.len(), context: "state" });
        }
        if action.len() != 1 {
            return Err(EnvError::ShapeMismatch { expected: 1, got: action.len(), context: "action" });
        }
        let (s, a) = (state[0], action[0]);
        let u: f64 = rng.random();
        let next = sample_tilted(self.cfg.lambda(s, a), u);
        let reward = self.cfg.reward_fn.eval(s, a);
        Ok((DVector::from_vec(vec![next]), reward))
    }

    fn reward_bounds(&self) -> (f64, f64) {
        let b = self.cfg.reward_fn.sup_abs();
        (-b, b)
    }
}
