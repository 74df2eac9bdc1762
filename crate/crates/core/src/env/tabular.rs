//! A small finite MDP with exact dynamic programming, used as a reference
//! model: paired with one-hot indicator features it is an exactly linear
//! MDP, so optimistic value iteration can be checked against the true Q*.

use super::{EnvError, Environment};
use nalgebra::DVector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Finite-horizon tabular MDP. States and actions are indices; the
/// [`Environment`] impl carries them in 1-vectors so the same learner code
/// runs on tabular and continuous problems.
#[derive(Debug, Clone)]
pub struct TabularMdp {
    pub n_states: usize,
    pub n_actions: usize,
    pub horizon: usize,
    /// transition[s][a][s'] = probability, each row summing to 1.
    pub transition: Vec<Vec<Vec<f64>>>,
    /// reward[s][a], deterministic.
    pub reward: Vec<Vec<f64>>,
    pub initial_state: usize,
}

impl TabularMdp {
    /// A five-state two-action swim-upstream chain. Action 0 steps left
    /// deterministically and pays 0.01 only at state 0; action 1 tries to
    /// step right (advance 0.6, stay 0.3, slip back 0.1) and pays 1.0 only
    /// at the last state. The optimal policy must cross four unrewarded
    /// states, so undirected exploration learns slowly.
    pub fn river_swim() -> Self {
        let n = 5;
        let mut transition = vec![vec![vec![0.0; n]; 2]; n];
        let mut reward = vec![vec![0.0; 2]; n];
        for s in 0..n {
            let left = s.saturating_sub(1);
            transition[s][0][left] = 1.0;
            if s + 1 < n {
                transition[s][1][s + 1] += 0.6;
                transition[s][1][s] += 0.3;
                transition[s][1][left] += 0.1;
            } else {
                transition[s][1][s] += 0.9;
                transition[s][1][s - 1] += 0.1;
            }
        }
        reward[0][0] = 0.01;
        reward[n - 1][1] = 1.0;
        Self { n_states: n, n_actions: 2, horizon: 5, transition, reward, initial_state: 0 }
    }

    pub fn validate(&self) -> Result<(), EnvError> {
        if self.horizon == 0 {
            return Err(EnvError::ZeroHorizon);
        }
        for s in 0..self.n_states {
            for a in 0..self.n_actions {
                let total: f64 = self.transition[s][a].iter().sum();
                if (total - 1.0).abs() > 1e-12 || self.transition[s][a].iter().any(|&p| p < 0.0) {
                    return Err(EnvError::OutOfDomain(format!(
                        "transition row ({s}, {a}) is not a distribution"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Exact optimal state-action values by backward induction:
    /// q[h-1][s][a] for h in 1..=H.
    pub fn optimal_q(&self) -> Vec<Vec<Vec<f64>>> {
        let mut q = vec![vec![vec![0.0; self.n_actions]; self.n_states]; self.horizon];
        let mut v_next = vec![0.0; self.n_states];
        for h in (0..self.horizon).rev() {
            let mut v_here = vec![0.0; self.n_states];
            for s in 0..self.n_states {
                let mut best = f64::NEG_INFINITY;
                for a in 0..self.n_actions {
                    let continuation: f64 = self.transition[s][a]
                        .iter()
                        .zip(&v_next)
                        .map(|(&p, &v)| p * v)
                        .sum();
                    let value = self.reward[s][a] + continuation;
                    q[h][s][a] = value;
                    best = best.max(value);
                }
                v_here[s] = best;
            }
            v_next = v_here;
        }
        q
    }

    /// V*_1 at the initial state.
    pub fn optimal_value(&self) -> f64 {
        let q = self.optimal_q();
        q[0][self.initial_state]
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// The finite action set as 1-vectors of indices.
    pub fn action_grid(&self) -> Vec<DVector<f64>> {
        (0..self.n_actions)
            .map(|a| DVector::from_vec(vec![a as f64]))
            .collect()
    }
}

impl Environment for TabularMdp {
    fn horizon(&self) -> usize {
        self.horizon
    }

    fn state_dim(&self) -> usize {
        1
    }

    fn action_dim(&self) -> usize {
        1
    }

    fn initial_state(&self) -> DVector<f64> {
        DVector::from_vec(vec![self.initial_state as f64])
    }

    /// Consumes one uniform draw per step (the categorical transition);
    /// the reward is deterministic.
    fn step(
        &self,
        _h: usize,
        state: &DVector<f64>,
        action: &DVector<f64>,
        rng: &mut ChaCha8Rng,
    ) -> Result<(DVector<f64>, f64), EnvError> {
        let s = state[0].round() as usize;
        let a = action[0].round() as usize;
        if s >= self.n_states || a >= self.n_actions {
            return Err(EnvError::OutOfDomain(format!("state {s} / action {a}")));
        }
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut next = self.n_states - 1;
        for (sp, &p) in self.transition[s][a].iter().enumerate() {
            acc += p;
            if u < acc {
                next = sp;
                break;
            }
        }
        Ok((DVector::from_vec(vec![next as f64]), self.reward[s][a]))
    }

    fn reward_bounds(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for row in &self.reward {
            for &r in row {
                lo = lo.min(r);
                hi = hi.max(r);
            }
        }
        (lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::run_episode;
    use rand::SeedableRng;

    #[test]
    fn river_swim_is_a_valid_mdp() {
        let mdp = TabularMdp::river_swim();
        mdp.validate().unwrap();
        assert_eq!(mdp.n_states, 5);
        assert_eq!(mdp.n_actions, 2);
        assert_eq!(mdp.reward_bounds(), (0.0, 1.0));
    }

    #[test]
    fn optimal_policy_beats_left_shore() {
        let mdp = TabularMdp::river_swim();
        let v_star = mdp.optimal_value();
        // Always-left collects 0.01 per step at the shore.
        let left_value = 0.01 * mdp.horizon as f64;
        assert!(v_star > left_value, "v* = {v_star} vs left {left_value}");
        // Bounded by one unit reward per step.
        assert!(v_star <= mdp.horizon as f64);
    }

    #[test]
    fn dp_is_consistent_with_monte_carlo() {
        let mdp = TabularMdp::river_swim();
        let q = mdp.optimal_q();
        // Greedy-on-Q* rollouts estimate V*_1(s_1).
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let episodes = 40_000;
        let mut total = 0.0;
        for k in 0..episodes {
            let t = run_episode(
                &mdp,
                k,
                |h, s: &DVector<f64>| {
                    let row = &q[h - 1][s[0] as usize];
                    let best = if row[1] >= row[0] { 1.0 } else { 0.0 };
                    DVector::from_vec(vec![best])
                },
                &mut rng,
            )
            .unwrap();
            total += t.episodic_return();
        }
        let estimate = total / episodes as f64;
        assert!((estimate - mdp.optimal_value()).abs() < 0.01);
    }
}
