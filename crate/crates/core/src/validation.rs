//! Numerical validation of the approximation-theoretic machinery: basis
//! orthonormality under quadrature, algebraic decay of polynomial
//! approximation error for functions of limited smoothness, and the decay
//! of the empirical inherent Bellman error on a known-density MDP.
//!
//! All operations are pure given their inputs (and seed); reports serialize
//! as CSV rows of (degree, error) plus a summary line (slope, residual).

use crate::eleanor::confidence_radii;
use crate::env::{density_eval, SmoothDensityMdpConfig};
use crate::features::{eval_1d, FeatureMap};
use crate::quad::GaussLegendre;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ValidationError {
    #[error("degrees must be non-empty, strictly increasing, and within [{lo}, {hi}]")]
    InvalidDegrees { lo: usize, hi: usize },
    #[error("approximation error {error:.3e} at degree {degree} underflows: the function is represented exactly, no rate can be fitted")]
    DegenerateFit { degree: usize, error: f64 },
    #[error("transition density integrates to {mass} (expected 1 within 1e-6)")]
    DensityNotNormalized { mass: f64 },
    #[error("the feature map must be 2-dimensional (state, action), got {0}")]
    WrongMapDimension(usize),
    #[error("feature evaluation failed: {0}")]
    Feature(#[from] crate::features::FeatureError),
    #[error("density evaluation failed: {0}")]
    Density(#[from] crate::env::EnvError),
}

/// Max absolute deviation of the quadrature Gram matrix of the normalized
/// Legendre family from the identity: max_{i,j <= max_degree}
/// |int p_i p_j - delta_ij| under an `quad_order`-node Gauss-Legendre rule.
pub fn orthonormality_report(max_degree: usize, quad_order: usize) -> f64 {
    assert!(
        quad_order > max_degree,
        "quadrature order must exceed the max degree for exactness"
    );
    let rule = GaussLegendre::new(quad_order);
    // evaluate the whole family at every node once
    let table: Vec<Vec<f64>> = rule
        .nodes()
        .iter()
        .map(|&x| (0..=max_degree).map(|n| eval_1d(n, x).unwrap()).collect())
        .collect();
    let mut worst = 0.0f64;
    for i in 0..=max_degree {
        for j in 0..=max_degree {
            let integral: f64 = rule
                .weights()
                .iter()
                .enumerate()
                .map(|(k, &w)| w * table[k][i] * table[k][j])
                .sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((integral - target).abs());
        }
    }
    worst
}

/// A fitted log-log decay rate: errors at increasing degrees together with
/// the least-squares slope of log(error) against log(degree).
#[derive(Debug, Clone)]
pub struct RateFit {
    pub degrees: Vec<usize>,
    pub errors: Vec<f64>,
    pub fitted_slope: f64,
    /// Root-mean-square residual of the linear fit in log-log space.
    pub fit_residual: f64,
}

impl RateFit {
    /// CSV serialization: `degree,error` rows and a trailing summary line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("degree,error\n");
        for (n, e) in self.degrees.iter().zip(&self.errors) {
            out.push_str(&format!("{n},{e}\n"));
        }
        out.push_str(&format!("# slope = {}, residual = {}\n", self.fitted_slope, self.fit_residual));
        out
    }
}

/// Degrees above this cannot be requested (matches the 1-D recurrence cap).
const MAX_RATE_DEGREE: usize = crate::features::MAX_DEGREE;

/// An observed error below this is treated as exact representation.
const DEGENERATE_ERROR: f64 = 1e-12;

/// Projection coefficients of `f` onto the normalized Legendre basis up to
/// `max_degree`, by composite Gauss-Legendre quadrature. An even panel
/// count keeps piecewise-smooth integrands (|x| and friends) exact.
fn projection_coefficients<F: Fn(f64) -> f64>(f: &F, max_degree: usize) -> Vec<f64> {
    let rule = GaussLegendre::new(48);
    let panels = 16usize;
    let width = 2.0 / panels as f64;
    let mut coeffs = vec![0.0; max_degree + 1];
    for p in 0..panels {
        let a = -1.0 + p as f64 * width;
        let mid = a + 0.5 * width;
        let scale = 0.5 * width;
        for (&t, &w) in rule.nodes().iter().zip(rule.weights()) {
            let x = mid + scale * t;
            let fx = f(x);
            for (n, c) in coeffs.iter_mut().enumerate() {
                *c += scale * w * fx * eval_1d(n, x).unwrap();
            }
        }
    }
    coeffs
}

/// Estimate how fast the L^2-projection error of `f` decays with the
/// polynomial degree. For each degree N the projection onto span{p_0..p_N}
/// is computed by quadrature and its sup-norm error measured on a dense
/// grid; the slope of log(error) vs log(N) is returned.
///
/// The L^2 projection stands in for the best sup-norm approximation: it is
/// computable and attains the same algebraic rate class on this basis.
pub fn approximation_rate<F: Fn(f64) -> f64>(
    f: F,
    smoothness: usize,
    degrees: &[usize],
) -> Result<RateFit, ValidationError> {
    let lo = smoothness + 1;
    let hi = MAX_RATE_DEGREE;
    let valid = !degrees.is_empty()
        && degrees.windows(2).all(|w| w[0] < w[1])
        && degrees.iter().all(|&n| n >= lo && n <= hi);
    if !valid {
        return Err(ValidationError::InvalidDegrees { lo, hi });
    }
    let max_degree = *degrees.last().unwrap();
    let coeffs = projection_coefficients(&f, max_degree);

    let grid_points = 10_000usize;
    let mut errors = vec![0.0f64; degrees.len()];
    for i in 0..=grid_points {
        let x = -1.0 + 2.0 * i as f64 / grid_points as f64;
        let fx = f(x);
        let mut partial = 0.0;
        let mut cut = 0usize;
        for (n, &c) in coeffs.iter().enumerate() {
            partial += c * eval_1d(n, x).unwrap();
            while cut < degrees.len() && degrees[cut] == n {
                errors[cut] = errors[cut].max((fx - partial).abs());
                cut += 1;
            }
        }
    }

    for (&n, &e) in degrees.iter().zip(&errors) {
        if e < DEGENERATE_ERROR {
            return Err(ValidationError::DegenerateFit { degree: n, error: e });
        }
    }

    let xs: Vec<f64> = degrees.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|&e| e.ln()).collect();
    let (slope, residual) = linear_fit(&xs, &ys);
    Ok(RateFit { degrees: degrees.to_vec(), errors, fitted_slope: slope, fit_residual: residual })
}

/// Least-squares slope and RMS residual of y against x.
fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - x_mean) * (y - y_mean)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = y_mean - slope * x_mean;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - (slope * x + intercept)).powi(2))
        .sum();
    (slope, (ss_res / n).sqrt())
}

/// Result of the empirical inherent-Bellman-error estimate.
#[derive(Debug, Clone, Copy)]
pub struct IbeEstimate {
    pub value: f64,
    /// Set when no theta samples were requested, so the max is vacuous.
    pub empty_sample_warning: bool,
}

/// Monte-Carlo estimate of the inherent Bellman error of (MDP, feature map):
/// the max over sampled theta (uniform in the ball whose radius is the
/// stage-1 planning norm cap) of the sup-norm distance, over a dense
/// (state, action) grid, between T* Q_theta and its best span
/// representative. T* is evaluated by quadrature against the closed-form
/// transition density with a grid max over actions; the inner minimization
/// is the least-squares projection onto the span, verified on the grid.
pub fn empirical_ibe(
    cfg: &SmoothDensityMdpConfig,
    map: &FeatureMap,
    theta_samples: usize,
    state_points: usize,
    action_points: usize,
    rng: &mut ChaCha8Rng,
) -> Result<IbeEstimate, ValidationError> {
    if map.dimension() != 2 {
        return Err(ValidationError::WrongMapDimension(map.dimension()));
    }
    if theta_samples == 0 {
        return Ok(IbeEstimate { value: 0.0, empty_sample_warning: true });
    }
    let n = map.len();
    let states = uniform_points(state_points);
    let actions = uniform_points(action_points);

    // composite quadrature nodes over the next state
    let rule = GaussLegendre::new(16);
    let panels = 8usize;
    let width = 2.0 / panels as f64;
    let mut nodes = Vec::with_capacity(panels * rule.order());
    let mut node_weights = Vec::with_capacity(panels * rule.order());
    for p in 0..panels {
        let a = -1.0 + p as f64 * width;
        let mid = a + 0.5 * width;
        let scale = 0.5 * width;
        for (&t, &w) in rule.nodes().iter().zip(rule.weights()) {
            nodes.push(mid + scale * t);
            node_weights.push(scale * w);
        }
    }

    let pairs = states.len() * actions.len();
    // rewards and weighted density rows, fixed across theta samples
    let mut rewards = DVector::zeros(pairs);
    let mut density = DMatrix::zeros(pairs, nodes.len());
    for (i, &s) in states.iter().enumerate() {
        for (j, &a) in actions.iter().enumerate() {
            let row = i * actions.len() + j;
            rewards[row] = cfg.reward_fn.eval(s, a);
            let mut mass = 0.0;
            for (k, (&t, &w)) in nodes.iter().zip(&node_weights).enumerate() {
                let p = density_eval(cfg, t, s, a)?;
                density[(row, k)] = w * p;
                mass += w * p;
            }
            if (mass - 1.0).abs() > 1e-6 {
                return Err(ValidationError::DensityNotNormalized { mass });
            }
        }
    }

    // span features over the (s, a) grid and over the (node, action) queries
    let mut span = DMatrix::zeros(pairs, n);
    for (i, &s) in states.iter().enumerate() {
        for (j, &a) in actions.iter().enumerate() {
            span.row_mut(i * actions.len() + j).copy_from(&map.evaluate(&[s, a])?.transpose());
        }
    }
    let normal = span.transpose() * &span;
    let chol = normal
        .cholesky()
        .expect("the Legendre span Gram over a dense grid is positive definite");
    let mut next_features = DMatrix::zeros(nodes.len() * actions.len(), n);
    for (k, &t) in nodes.iter().enumerate() {
        for (j, &a) in actions.iter().enumerate() {
            next_features
                .row_mut(k * actions.len() + j)
                .copy_from(&map.evaluate(&[t, a])?.transpose());
        }
    }

    // radius of the theta ball: the stage-1 planning norm cap
    let radius = confidence_radii(cfg.horizon.max(1), 2.0).norm_cap(1);

    let mut worst = 0.0f64;
    let mut greedy = DVector::zeros(nodes.len());
    for _ in 0..theta_samples {
        let theta = sample_ball(n, radius, rng);
        // g(t) = max_a theta^T phi(t, a) at every quadrature node
        let projected = &next_features * &theta;
        for k in 0..nodes.len() {
            let mut best = f64::NEG_INFINITY;
            for j in 0..actions.len() {
                best = best.max(projected[k * actions.len() + j]);
            }
            greedy[k] = best;
        }
        let bellman = &rewards + &density * &greedy;
        // least-squares projection onto the span, residual checked on grid
        let theta_prime = chol.solve(&(span.transpose() * &bellman));
        let residual = (&span * theta_prime - bellman).abs().max();
        worst = worst.max(residual);
    }
    Ok(IbeEstimate { value: worst, empty_sample_warning: false })
}

fn uniform_points(count: usize) -> Vec<f64> {
    assert!(count >= 2);
    (0..count)
        .map(|i| -1.0 + 2.0 * i as f64 / (count - 1) as f64)
        .collect()
}

/// Uniform sample from the Euclidean ball.
fn sample_ball(n: usize, radius: f64, rng: &mut ChaCha8Rng) -> DVector<f64> {
    let mut v = DVector::from_fn(n, |_, _| rand_distr::StandardNormal.sample(rng));
    let norm = v.norm();
    if norm > 0.0 {
        let u: f64 = rng.random();
        v *= radius * u.powf(1.0 / n as f64) / norm;
    }
    v
}
