//! Desk-scale optimistic planning over per-stage parameter vectors.
//!
//! The planner searches for parameter vectors theta_1..theta_H, one per
//! stage, that maximize the optimistic initial value
//! max_a theta_1^T phi(s_1, a) subject to (i) a per-stage Euclidean norm
//! cap derived from a geometric radius schedule and (ii) each theta_h lying
//! in the ridge-regression confidence ellipsoid (in the Gram norm) around
//! the least-squares solution whose targets are
//! r + max_a theta_{h+1}^T phi(s', a) - the self-consistency constraint.
//!
//! The exact program is NP-hard in general, so the search is a random-
//! restart local search with a declared candidate budget, honest about
//! infeasibility, and guarded to desk scale (Ntilde <= 64, H <= 10).
//! Candidates are parameterized inside the ellipsoids, so self-consistency
//! holds by construction and only the norm-cap projection can introduce a
//! residual.

use crate::features::{FeatureError, StateActionFeatures};
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Desk-scale guards.
pub const MAX_PLAN_FEATURES: usize = 64;
pub const MAX_PLAN_HORIZON: usize = 10;

#[derive(Debug, Error)]
pub enum EleanorError {
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error("plan scale exceeded: Ntilde = {n_features} (max {max_features}), H = {horizon} (max {max_horizon})")]
    PlanScaleExceeded { n_features: usize, max_features: usize, horizon: usize, max_horizon: usize },
    #[error("{name} must have one entry per stage ({expected}), got {got}")]
    LengthMismatch { name: &'static str, expected: usize, got: usize },
    #[error("action grid is empty")]
    EmptyActionGrid,
    #[error("invalid parameter: {0}")]
    InvalidParam(&'static str),
    #[error("gram matrix is not positive definite")]
    SingularGram,
}

/// The geometric confidence-radius schedule: values[h-1] = sum_{tau=1}^{H-h}
/// base^tau, strictly decreasing in h, zero at the terminal stage.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusSchedule {
    pub base: f64,
    pub horizon: usize,
    pub values: Vec<f64>,
}

/// Build the schedule by direct summation (the summation form is
/// authoritative; the geometric closed form is only a shortcut).
pub fn confidence_radii(horizon: usize, base: f64) -> RadiusSchedule {
    assert!(horizon >= 1, "horizon must be at least 1");
    assert!(base > 1.0, "schedule base must exceed 1");
    let values = (1..=horizon)
        .map(|h| (1..=horizon - h).map(|tau| base.powi(tau as i32)).sum())
        .collect();
    RadiusSchedule { base, horizon, values }
}

impl RadiusSchedule {
    /// Norm cap for stage h, 1-based: the smallest budget satisfying
    /// cap(h) >= base * (value(h+1) + 1) with the beyond-horizon value taken
    /// as zero. This equals values[h-1] strictly before the terminal stage
    /// and `base` at it, so the terminal stage can still represent a
    /// reward-scale function (a literal zero cap would pin theta_H = 0).
    pub fn norm_cap(&self, h: usize) -> f64 {
        assert!(h >= 1 && h <= self.horizon);
        let next = if h < self.horizon { self.values[h] } else { 0.0 };
        self.base * (next + 1.0)
    }

    pub fn norm_caps(&self) -> Vec<f64> {
        (1..=self.horizon).map(|h| self.norm_cap(h)).collect()
    }
}

/// One recorded transition with its features cached: phi(s_h, a_h), the
/// observed reward, and - except at the terminal stage - phi(s_{h+1}, a')
/// for every candidate action a'.
#[derive(Debug, Clone)]
pub struct EleanorTransition {
    pub phi: DVector<f64>,
    pub reward: f64,
    pub next_phis: Option<Vec<DVector<f64>>>,
}

/// Past transitions grouped by stage.
#[derive(Debug, Clone, Default)]
pub struct EleanorDataset {
    stages: Vec<Vec<EleanorTransition>>,
}

impl EleanorDataset {
    pub fn new(horizon: usize) -> Self {
        Self { stages: vec![Vec::new(); horizon] }
    }

    pub fn horizon(&self) -> usize {
        self.stages.len()
    }

    pub fn stage(&self, h: usize) -> &[EleanorTransition] {
        &self.stages[h - 1]
    }

    /// Record a transition at stage h (1-based), caching its features.
    /// `next_state` must be Some below the terminal stage and None at it.
    pub fn push<F: StateActionFeatures>(
        &mut self,
        features: &F,
        action_grid: &[DVector<f64>],
        h: usize,
        state: &[f64],
        action: &[f64],
        reward: f64,
        next_state: Option<&[f64]>,
    ) -> Result<(), EleanorError> {
        let phi = features.eval(state, action)?;
        let next_phis = match next_state {
            Some(s_next) => Some(
                action_grid
                    .iter()
                    .map(|a| features.eval(s_next, a.as_slice()))
                    .collect::<Result<Vec<_>, _>>()?,
            ),
            None => None,
        };
        self.stages[h - 1].push(EleanorTransition { phi, reward, next_phis });
        Ok(())
    }
}

/// The result of one planning call.
#[derive(Debug, Clone)]
pub struct EleanorPlan {
    /// One parameter vector per stage.
    pub thetas: Vec<DVector<f64>>,
    /// max_a theta_1^T phi(s_1, a) over the action grid.
    pub optimistic_value: f64,
    /// Largest violation of the self-consistency (ellipsoid) constraints,
    /// in the Gram norm. Zero unless a norm-cap projection displaced a
    /// candidate.
    pub feasibility_residual: f64,
    /// Whether the residual met the configured slack.
    pub feasible: bool,
}

/// Everything the planner needs besides the confidence geometry.
pub struct PlanSpec<'a, F: StateActionFeatures> {
    pub features: &'a F,
    pub dataset: &'a EleanorDataset,
    pub initial_state: &'a [f64],
    pub action_grid: &'a [DVector<f64>],
    /// Ridge regularizer for the per-stage Gram matrices.
    pub lambda: f64,
    /// Feasibility slack on the residual.
    pub slack: f64,
}

/// Optimistic plan with norm caps derived from the radius schedule.
pub fn optimistic_plan<F: StateActionFeatures>(
    spec: &PlanSpec<'_, F>,
    schedule: &RadiusSchedule,
    ridge_radius: &[f64],
    budget: usize,
    rng: &mut ChaCha8Rng,
) -> Result<EleanorPlan, EleanorError> {
    if schedule.horizon != spec.dataset.horizon() {
        return Err(EleanorError::LengthMismatch {
            name: "schedule",
            expected: spec.dataset.horizon(),
            got: schedule.horizon,
        });
    }
    optimistic_plan_with_caps(spec, &schedule.norm_caps(), ridge_radius, budget, rng)
}

/// Optimistic plan with explicit per-stage norm caps.
pub fn optimistic_plan_with_caps<F: StateActionFeatures>(
    spec: &PlanSpec<'_, F>,
    caps: &[f64],
    ridge_radius: &[f64],
    budget: usize,
    rng: &mut ChaCha8Rng,
) -> Result<EleanorPlan, EleanorError> {
    let solver = PlanSolver::new(spec, caps, ridge_radius)?;
    Ok(solver.search_plan(budget, rng))
}

/// Greedy action of a plan at stage h: the grid argmax of
/// theta_h^T phi(s, a), ties to the lowest index.
pub fn act<F: StateActionFeatures>(
    plan: &EleanorPlan,
    features: &F,
    h: usize,
    state: &[f64],
    action_grid: &[DVector<f64>],
) -> Result<DVector<f64>, EleanorError> {
    if action_grid.is_empty() {
        return Err(EleanorError::EmptyActionGrid);
    }
    let theta = &plan.thetas[h - 1];
    let mut best = 0usize;
    let mut best_value = f64::NEG_INFINITY;
    for (i, a) in action_grid.iter().enumerate() {
        let value = theta.dot(&features.eval(state, a.as_slice())?);
        if value > best_value {
            best_value = value;
            best = i;
        }
    }
    Ok(action_grid[best].clone())
}

struct PlanSolver<'a, F: StateActionFeatures> {
    spec: &'a PlanSpec<'a, F>,
    caps: &'a [f64],
    radii: &'a [f64],
    horizon: usize,
    n: usize,
    cholesky: Vec<Cholesky<f64, Dyn>>,
    initial_phis: Vec<DVector<f64>>,
}

/// One evaluated candidate.
struct Candidate {
    thetas: Vec<DVector<f64>>,
    value: f64,
    residual: f64,
}

impl<'a, F: StateActionFeatures> PlanSolver<'a, F> {
    fn new(
        spec: &'a PlanSpec<'a, F>,
        caps: &'a [f64],
        radii: &'a [f64],
    ) -> Result<Self, EleanorError> {
        let horizon = spec.dataset.horizon();
        let n = spec.features.len();
        if n > MAX_PLAN_FEATURES || horizon > MAX_PLAN_HORIZON || horizon == 0 {
            return Err(EleanorError::PlanScaleExceeded {
                n_features: n,
                max_features: MAX_PLAN_FEATURES,
                horizon,
                max_horizon: MAX_PLAN_HORIZON,
            });
        }
        if caps.len() != horizon {
            return Err(EleanorError::LengthMismatch { name: "caps", expected: horizon, got: caps.len() });
        }
        if radii.len() != horizon {
            return Err(EleanorError::LengthMismatch { name: "ridge_radius", expected: horizon, got: radii.len() });
        }
        if !(spec.lambda.is_finite() && spec.lambda > 0.0) {
            return Err(EleanorError::InvalidParam("lambda must be positive"));
        }
        if caps.iter().chain(radii).any(|v| !v.is_finite() || *v < 0.0) {
            return Err(EleanorError::InvalidParam("caps and radii must be non-negative"));
        }
        if spec.action_grid.is_empty() {
            return Err(EleanorError::EmptyActionGrid);
        }
        let mut cholesky = Vec::with_capacity(horizon);
        for h in 1..=horizon {
            let mut gram = DMatrix::identity(n, n) * spec.lambda;
            for tr in spec.dataset.stage(h) {
                gram.ger(1.0, &tr.phi, &tr.phi, 1.0);
            }
            cholesky.push(gram.cholesky().ok_or(EleanorError::SingularGram)?);
        }
        let initial_phis = spec
            .action_grid
            .iter()
            .map(|a| spec.features.eval(spec.initial_state, a.as_slice()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { spec, caps, radii, horizon, n, cholesky, initial_phis })
    }

    /// Ridge center for stage h given the next stage's parameters.
    fn center(&self, h: usize, theta_next: Option<&DVector<f64>>) -> DVector<f64> {
        let mut moment = DVector::zeros(self.n);
        for tr in self.spec.dataset.stage(h) {
            let mut target = tr.reward;
            if let (Some(theta), Some(next_phis)) = (theta_next, tr.next_phis.as_ref()) {
                let best = next_phis
                    .iter()
                    .map(|p| theta.dot(p))
                    .fold(f64::NEG_INFINITY, f64::max);
                target += best;
            }
            moment.axpy(target, &tr.phi, 1.0);
        }
        self.cholesky[h - 1].solve(&moment)
    }

    /// Clamp to the norm cap and report the ellipsoid-norm violation this
    /// introduces relative to the given center.
    fn project_to_cap(&self, h: usize, theta: DVector<f64>, center: &DVector<f64>) -> (DVector<f64>, f64) {
        let cap = self.caps[h - 1];
        let norm = theta.norm();
        let projected = if norm > cap {
            if cap == 0.0 { DVector::zeros(self.n) } else { theta * (cap / norm) }
        } else {
            theta
        };
        let gram_dist = (self.cholesky[h - 1].l().transpose() * (&projected - center)).norm();
        let residual = (gram_dist - self.radii[h - 1]).max(0.0);
        (projected, residual)
    }

    /// Build a full candidate from ellipsoid offsets for stages 2..=H; the
    /// first stage is optimized in closed form per grid action (the linear
    /// objective over an ellipsoid peaks at center + r G^{-1} phi / ||phi||_{G^{-1}}).
    fn build(&self, offsets: &[DVector<f64>]) -> Candidate {
        let mut thetas = vec![DVector::zeros(self.n); self.horizon];
        let mut residual = 0.0f64;
        let mut theta_next: Option<DVector<f64>> = None;
        for h in (2..=self.horizon).rev() {
            let center = self.center(h, theta_next.as_ref());
            let raw = &center
                + self.cholesky[h - 1]
                    .l()
                    .transpose()
                    .solve_upper_triangular(&offsets[h - 2])
                    .unwrap_or_else(|| DVector::zeros(self.n));
            let (theta, res) = self.project_to_cap(h, raw, &center);
            residual = residual.max(res);
            theta_next = Some(theta.clone());
            thetas[h - 1] = theta;
        }

        let center = self.center(1, theta_next.as_ref());
        let r1 = self.radii[0];
        let mut best: Option<(f64, DVector<f64>, f64)> = None;
        for phi in &self.initial_phis {
            let theta = if r1 > 0.0 {
                let dir = self.cholesky[0].solve(phi);
                let denom = phi.dot(&dir).max(0.0).sqrt();
                if denom > 1e-14 { &center + dir * (r1 / denom) } else { center.clone() }
            } else {
                center.clone()
            };
            let (theta, res) = self.project_to_cap(1, theta, &center);
            let value = self.objective(&theta);
            if best.as_ref().is_none_or(|(v, _, _)| value > *v) {
                best = Some((value, theta, res));
            }
        }
        let (value, theta1, res1) = best.expect("action grid is non-empty");
        thetas[0] = theta1;
        Candidate { thetas, value, residual: residual.max(res1) }
    }

    /// The candidate with zero offsets and no first-stage optimization: the
    /// ridge-regression center chain itself.
    fn center_chain(&self) -> Candidate {
        let mut thetas = vec![DVector::zeros(self.n); self.horizon];
        let mut residual = 0.0f64;
        let mut theta_next: Option<DVector<f64>> = None;
        for h in (1..=self.horizon).rev() {
            let center = self.center(h, theta_next.as_ref());
            let (theta, res) = self.project_to_cap(h, center.clone(), &center);
            residual = residual.max(res);
            theta_next = Some(theta.clone());
            thetas[h - 1] = theta;
        }
        let value = self.objective(&thetas[0]);
        Candidate { thetas, value, residual }
    }

    fn objective(&self, theta1: &DVector<f64>) -> f64 {
        self.initial_phis
            .iter()
            .map(|p| theta1.dot(p))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Random restarts interleaved with coordinate-wise refinement of the
    /// incumbent. The iteration sequence depends only on the seed and the
    /// incumbent history, never on the budget, so the incumbent value is
    /// non-decreasing in the budget for a fixed seed.
    fn search(&self, budget: usize, rng: &mut ChaCha8Rng) -> Candidate {
        let mut incumbent = self.center_chain();
        if budget == 0 {
            return incumbent;
        }
        let slack = self.spec.slack;
        let mut incumbent_offsets = vec![DVector::zeros(self.n); self.horizon.saturating_sub(1)];
        let mut coord_cursor = 0usize;
        let free_coords = (self.horizon - 1) * self.n;
        for i in 1..=budget {
            let (candidate, offsets) = if free_coords == 0 || i % 3 == 1 {
                // fresh restart
                let offsets: Vec<DVector<f64>> = (2..=self.horizon)
                    .map(|h| uniform_in_ball(self.n, self.radii[h - 1], rng))
                    .collect();
                (self.build(&offsets), offsets)
            } else if i % 3 == 2 {
                // Gaussian nudge of every offset around the incumbent
                let offsets: Vec<DVector<f64>> = incumbent_offsets
                    .iter()
                    .enumerate()
                    .map(|(j, u)| {
                        let radius = self.radii[j + 1];
                        let sigma = radius / 4.0;
                        let mut v = u.clone();
                        for x in v.iter_mut() {
                            *x += sigma * standard_normal(rng);
                        }
                        clamp_to_ball(v, radius)
                    })
                    .collect();
                (self.build(&offsets), offsets)
            } else {
                // single-coordinate step, round-robin over (stage, coord, sign)
                let slot = coord_cursor % (free_coords * 2);
                coord_cursor += 1;
                let sign = if slot % 2 == 0 { 1.0 } else { -1.0 };
                let flat = slot / 2;
                let stage_idx = flat / self.n;
                let coord = flat % self.n;
                let radius = self.radii[stage_idx + 1];
                let mut offsets = incumbent_offsets.clone();
                offsets[stage_idx][coord] += sign * radius / 4.0;
                offsets[stage_idx] = clamp_to_ball(offsets[stage_idx].clone(), radius);
                (self.build(&offsets), offsets)
            };
            if better(&candidate, &incumbent, slack) {
                incumbent = candidate;
                incumbent_offsets = offsets;
            }
        }
        incumbent
    }
}

/// Prefer feasible over infeasible, then higher value; among infeasible
/// candidates prefer the smaller residual.
fn better(candidate: &Candidate, incumbent: &Candidate, slack: f64) -> bool {
    let cand_ok = candidate.residual <= slack;
    let inc_ok = incumbent.residual <= slack;
    match (cand_ok, inc_ok) {
        (true, true) => candidate.value > incumbent.value,
        (true, false) => true,
        (false, true) => false,
        (false, false) => candidate.residual < incumbent.residual,
    }
}

impl Candidate {
    fn into_plan(self, slack: f64) -> EleanorPlan {
        EleanorPlan {
            feasible: self.residual <= slack,
            thetas: self.thetas,
            optimistic_value: self.value,
            feasibility_residual: self.residual,
        }
    }
}

impl<F: StateActionFeatures> PlanSolver<'_, F> {
    fn search_plan(&self, budget: usize, rng: &mut ChaCha8Rng) -> EleanorPlan {
        self.search(budget, rng).into_plan(self.spec.slack)
    }
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    use rand_distr::Distribution;
    rand_distr::StandardNormal.sample(rng)
}

/// Uniform sample from the Euclidean ball of the given radius.
fn uniform_in_ball(n: usize, radius: f64, rng: &mut ChaCha8Rng) -> DVector<f64> {
    if radius == 0.0 {
        return DVector::zeros(n);
    }
    let mut v = DVector::from_fn(n, |_, _| standard_normal(rng));
    let norm = v.norm();
    if norm > 0.0 {
        let u: f64 = rng.random();
        v *= radius * u.powf(1.0 / n as f64) / norm;
    }
    v
}

fn clamp_to_ball(v: DVector<f64>, radius: f64) -> DVector<f64> {
    let norm = v.norm();
    if norm > radius {
        if radius == 0.0 { DVector::zeros(v.len()) } else { v * (radius / norm) }
    } else {
        v
    }
}
