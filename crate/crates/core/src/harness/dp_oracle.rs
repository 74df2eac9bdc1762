//! Grid dynamic-programming estimates of the optimal expected return.
//!
//! The benchmark reports episodic return; turning return curves into regret
//! curves needs an estimate of V*_1(s_1). Backward value iteration on a
//! tensor-product state grid with multilinear interpolation supplies it:
//! the expectation over transition noise is taken with an 8-node
//! Gauss-Hermite rule per noise coordinate, and actions range over a
//! uniform grid.

use super::HarnessError;
use crate::env::{squash, SmoothDensityMdpConfig, SquashedLqrConfig};
use crate::quad::{GaussHermite, GaussLegendre};
use nalgebra::DVector;

/// Memory guard on the state grid.
const MAX_GRID_CELLS: usize = 4_000_000;

const HERMITE_ORDER: usize = 8;

/// Estimated optimal expected return of a squashed LQR (d_S <= 2) from its
/// initial state.
pub fn dp_oracle(
    cfg: &SquashedLqrConfig,
    state_resolution: usize,
    action_resolution: usize,
) -> Result<f64, HarnessError> {
    let ds = cfg.state_dim();
    if ds > 2 {
        return Err(HarnessError::Config(format!(
            "dp_oracle supports state dimension <= 2, got {ds}"
        )));
    }
    if state_resolution < 2 || action_resolution < 1 {
        return Err(HarnessError::Config("grid resolutions too small".into()));
    }
    let cells = state_resolution.pow(ds as u32);
    if cells > MAX_GRID_CELLS {
        return Err(HarnessError::Config(format!(
            "state grid of {cells} cells exceeds the cap {MAX_GRID_CELLS}"
        )));
    }

    let axis: Vec<f64> = grid_axis(state_resolution);
    let actions = crate::env::uniform_action_grid(cfg.action_dim(), action_resolution);
    // noise nodes: tensor Gauss-Hermite, or the single zero node when
    // the dynamics are deterministic
    let noise_nodes: Vec<(DVector<f64>, f64)> = if cfg.noise_std == 0.0 {
        vec![(DVector::zeros(ds), 1.0)]
    } else {
        let gh = GaussHermite::new(HERMITE_ORDER);
        let scale = std::f64::consts::SQRT_2 * cfg.noise_std;
        let weight_norm = std::f64::consts::PI.sqrt().powi(ds as i32);
        let mut nodes = Vec::with_capacity(HERMITE_ORDER.pow(ds as u32));
        let mut digits = vec![0usize; ds];
        loop {
            let point = DVector::from_iterator(ds, digits.iter().map(|&i| scale * gh.nodes()[i]));
            let weight: f64 =
                digits.iter().map(|&i| gh.weights()[i]).product::<f64>() / weight_norm;
            nodes.push((point, weight));
            if !increment(&mut digits, HERMITE_ORDER) {
                break;
            }
        }
        nodes
    };

    // hoist per-action quantities; the innermost loop is allocation-free
    let action_costs: Vec<f64> =
        actions.iter().map(|a| (a.transpose() * &cfg.r * a)[(0, 0)]).collect();
    let action_drifts: Vec<DVector<f64>> = actions.iter().map(|a| &cfg.b * a).collect();
    let noise_pairs: Vec<(f64, f64, f64)> = noise_nodes
        .iter()
        .map(|(n, w)| (n[0], if ds == 2 { n[1] } else { 0.0 }, *w))
        .collect();

    let mut value = vec![0.0f64; cells];
    for _stage in 0..cfg.horizon {
        let mut next_value = vec![f64::NEG_INFINITY; cells];
        for cell in 0..cells {
            let state = cell_state(cell, ds, &axis, state_resolution);
            let state_cost = (state.transpose() * &cfg.q * &state)[(0, 0)];
            let lin = &cfg.a * &state;
            let (lx, ly) = (lin[0], if ds == 2 { lin[1] } else { 0.0 });
            let mut best = f64::NEG_INFINITY;
            for (ai, drift) in action_drifts.iter().enumerate() {
                let dx = lx + drift[0];
                let dy = ly + if ds == 2 { drift[1] } else { 0.0 };
                let mut expectation = 0.0;
                for &(nx, ny, weight) in &noise_pairs {
                    let tx = dx + nx;
                    let ty = dy + ny;
                    let scale = 1.0 / (1.0 + (tx * tx + ty * ty).sqrt());
                    expectation += weight
                        * interpolate2(&value, tx * scale, ty * scale, state_resolution, ds);
                }
                best = best.max(-state_cost - action_costs[ai] + expectation);
            }
            next_value[cell] = best;
        }
        value = next_value;
    }
    let s1 = &cfg.initial_state;
    Ok(interpolate2(
        &value,
        s1[0],
        if ds == 2 { s1[1] } else { 0.0 },
        state_resolution,
        ds,
    ))
}

/// Estimated optimal expected return of the synthetic smooth MDP: value
/// iteration on a 1-D state grid, with the transition expectation taken by
/// quadrature against the closed-form density.
pub fn smooth_oracle(
    cfg: &SmoothDensityMdpConfig,
    state_resolution: usize,
    action_resolution: usize,
) -> Result<f64, HarnessError> {
    if state_resolution < 2 || action_resolution < 1 {
        return Err(HarnessError::Config("grid resolutions too small".into()));
    }
    let axis = grid_axis(state_resolution);
    let actions = crate::env::uniform_action_grid(1, action_resolution);
    let rule = GaussLegendre::new(64);
    let mut value = vec![0.0f64; state_resolution];
    for _stage in 0..cfg.horizon {
        let mut next_value = vec![f64::NEG_INFINITY; state_resolution];
        for (i, &s) in axis.iter().enumerate() {
            let mut best = f64::NEG_INFINITY;
            for action in &actions {
                let a = action[0];
                let expectation = rule.integrate(|t| {
                    let p = crate::env::density_eval(cfg, t, s, a)
                        .expect("grid points lie in [-1, 1]");
                    p * interpolate2(&value, t, 0.0, state_resolution, 1)
                });
                best = best.max(cfg.reward_fn.eval(s, a) + expectation);
            }
            next_value[i] = best;
        }
        value = next_value;
    }
    Ok(interpolate2(&value, 0.0, 0.0, state_resolution, 1))
}

fn grid_axis(resolution: usize) -> Vec<f64> {
    (0..resolution)
        .map(|i| -1.0 + 2.0 * i as f64 / (resolution - 1) as f64)
        .collect()
}

fn increment(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

fn cell_state(cell: usize, ds: usize, axis: &[f64], resolution: usize) -> DVector<f64> {
    match ds {
        1 => DVector::from_vec(vec![axis[cell]]),
        2 => DVector::from_vec(vec![axis[cell / resolution], axis[cell % resolution]]),
        _ => unreachable!("guarded to d_S <= 2"),
    }
}

/// Multilinear interpolation of grid values at a point of [-1, 1]^d
/// (clamped to the grid hull). The second coordinate is ignored in 1-D.
fn interpolate2(values: &[f64], x: f64, y: f64, resolution: usize, ds: usize) -> f64 {
    let locate = |v: f64| -> (usize, f64) {
        let clamped = v.clamp(-1.0, 1.0);
        let t = (clamped + 1.0) / 2.0 * (resolution - 1) as f64;
        let i = (t.floor() as usize).min(resolution - 2);
        (i, t - i as f64)
    };
    match ds {
        1 => {
            let (i, frac) = locate(x);
            values[i] * (1.0 - frac) + values[i + 1] * frac
        }
        2 => {
            let (i, fi) = locate(x);
            let (j, fj) = locate(y);
            let at = |r: usize, c: usize| values[r * resolution + c];
            let top = at(i, j) * (1.0 - fj) + at(i, j + 1) * fj;
            let bottom = at(i + 1, j) * (1.0 - fj) + at(i + 1, j + 1) * fj;
            top * (1.0 - fi) + bottom * fi
        }
        _ => unreachable!(),
    }
}
