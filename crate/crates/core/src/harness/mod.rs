//! Experiment runner: execute (environment x algorithm x seed) grids,
//! record per-episode returns, aggregate them into confidence bands, and
//! serialize everything as deterministic CSV.
//!
//! Distinct runs execute concurrently on isolated rng streams derived from
//! the master seed and the run label; results are merged by a single
//! aggregator in a fixed order, so repeated invocations of the same config
//! produce byte-identical files. The `SMOOTH_RL_THREADS` environment
//! variable caps the worker count (default: available cores).

mod config;
mod dp_oracle;
pub mod rng;
mod svg;

pub use config::{AlgorithmKind, AlgorithmSpec, DegreeSpec, EnvironmentName, ExperimentConfig};
pub use dp_oracle::{dp_oracle, smooth_oracle};
pub use svg::{parse_aggregate_csv, render_svg};

use crate::eleanor::{
    act, confidence_radii, optimistic_plan, EleanorDataset, PlanSpec, MAX_PLAN_FEATURES,
    MAX_PLAN_HORIZON,
};
use crate::env::{
    paper_environments, uniform_action_grid, Environment, SmoothDensityMdp,
    SmoothDensityMdpConfig, SquashedLqr, Step, Transcript,
};
use crate::features::{FeatureMap, JointFeatureMap, StateActionFeatures};
use crate::lsvi::{choose_degree, theory_bonus_scale, ClipRange, LsviConfig, LsviLearner};
use rayon::prelude::*;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("aggregation requires at least two seeds")]
    InsufficientSeeds,
    #[error("numerical failure: {0}")]
    Numerical(String),
}

/// One recorded episode of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRow {
    pub env: EnvironmentName,
    pub algo: AlgorithmKind,
    pub degree: usize,
    pub seed: u64,
    /// 1-based episode index.
    pub episode: usize,
    pub episodic_return: f64,
}

/// Cross-seed summary of one curve at one episode.
#[derive(Debug, Clone, PartialEq)]
pub struct AggRow {
    pub env: String,
    pub algo: String,
    pub degree: usize,
    pub episode: usize,
    pub mean: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

/// A run that aborted with a numerical error; the episodes completed before
/// the failure stay in the record.
#[derive(Debug, Clone)]
pub struct RunFailure {
    pub env: EnvironmentName,
    pub algo: AlgorithmKind,
    pub degree: usize,
    pub seed: u64,
    pub completed_episodes: usize,
    pub message: String,
}

/// Everything an experiment produced.
#[derive(Debug, Clone, Default)]
pub struct RunRecord {
    pub raw: Vec<RawRow>,
    pub aggregate: Vec<AggRow>,
    pub failures: Vec<RunFailure>,
    pub master_seed: u64,
}

impl RunRecord {
    /// Populate the aggregate rows: per-episode mean across seeds with the
    /// 95% normal-approximation interval mean +/- 1.96 s / sqrt(n), where s
    /// is the sample standard deviation.
    pub fn aggregate(&mut self) -> Result<(), HarnessError> {
        self.aggregate = aggregate_rows(&self.raw)?;
        Ok(())
    }

    /// Returns of one run in episode order.
    pub fn returns_for(
        &self,
        env: EnvironmentName,
        algo: AlgorithmKind,
        degree: usize,
        seed: u64,
    ) -> Vec<f64> {
        self.raw
            .iter()
            .filter(|r| r.env == env && r.algo == algo && r.degree == degree && r.seed == seed)
            .map(|r| r.episodic_return)
            .collect()
    }

    /// Raw CSV: header comments (master seed, rng rule version), then
    /// `env,algo,degree,seed,episode,return` rows.
    pub fn to_raw_csv(&self) -> String {
        let mut out = self.csv_preamble();
        out.push_str("env,algo,degree,seed,episode,return\n");
        for r in &self.raw {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.env, r.algo, r.degree, r.seed, r.episode, r.episodic_return
            );
        }
        out
    }

    /// Aggregate CSV: `env,algo,degree,episode,mean,ci_lo,ci_hi`.
    pub fn to_aggregate_csv(&self) -> String {
        let mut out = self.csv_preamble();
        out.push_str("env,algo,degree,episode,mean,ci_lo,ci_hi\n");
        for r in &self.aggregate {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.env, r.algo, r.degree, r.episode, r.mean, r.ci_lo, r.ci_hi
            );
        }
        out
    }

    /// Cumulative-regret CSV against a known optimal value:
    /// `env,algo,degree,seed,episode,cumulative_regret`.
    pub fn to_regret_csv(&self, oracle_value: f64) -> String {
        let mut out = self.csv_preamble();
        let _ = writeln!(out, "# oracle_value = {oracle_value}");
        out.push_str("env,algo,degree,seed,episode,cumulative_regret\n");
        let mut cum = 0.0;
        let mut key: Option<(EnvironmentName, AlgorithmKind, usize, u64)> = None;
        for r in &self.raw {
            let this_key = (r.env, r.algo, r.degree, r.seed);
            if key != Some(this_key) {
                key = Some(this_key);
                cum = 0.0;
            }
            cum += oracle_value - r.episodic_return;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.env, r.algo, r.degree, r.seed, r.episode, cum
            );
        }
        out
    }

    fn csv_preamble(&self) -> String {
        format!(
            "# master_seed = {}\n# rng = {}\n",
            self.master_seed,
            rng::RNG_RULE_VERSION
        )
    }
}

/// Cumulative regret of one run: partial sums of
/// (oracle_value - episodic return).
pub fn regret_curve(returns: &[f64], oracle_value: f64) -> Vec<f64> {
    returns
        .iter()
        .scan(0.0, |acc, &r| {
            *acc += oracle_value - r;
            Some(*acc)
        })
        .collect()
}

fn aggregate_rows(raw: &[RawRow]) -> Result<Vec<AggRow>, HarnessError> {
    let mut out = Vec::new();
    // rows arrive grouped (env, algo, degree, seed, episode); regroup by
    // curve and episode while preserving first-appearance order
    let mut curves: Vec<((EnvironmentName, AlgorithmKind, usize), Vec<(usize, Vec<f64>)>)> =
        Vec::new();
    for r in raw {
        let curve_key = (r.env, r.algo, r.degree);
        let curve = match curves.iter_mut().find(|(k, _)| *k == curve_key) {
            Some((_, c)) => c,
            None => {
                curves.push((curve_key, Vec::new()));
                &mut curves.last_mut().unwrap().1
            }
        };
        match curve.iter_mut().find(|(e, _)| *e == r.episode) {
            Some((_, values)) => values.push(r.episodic_return),
            None => curve.push((r.episode, vec![r.episodic_return])),
        }
    }
    for ((env, algo, degree), episodes) in curves {
        for (episode, values) in episodes {
            let n = values.len();
            if n < 2 {
                return Err(HarnessError::InsufficientSeeds);
            }
            let mean = values.iter().sum::<f64>() / n as f64;
            let variance =
                values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            let half_width = 1.96 * (variance.sqrt() / (n as f64).sqrt());
            out.push(AggRow {
                env: env.to_string(),
                algo: algo.to_string(),
                degree,
                episode,
                mean,
                ci_lo: mean - half_width,
                ci_hi: mean + half_width,
            });
        }
    }
    Ok(out)
}

struct Job {
    env: EnvironmentName,
    algo: AlgorithmSpec,
    degree: usize,
    seed: u64,
}

struct JobOutcome {
    returns: Vec<f64>,
    error: Option<String>,
}

/// Run the full (environment x algorithm x seed) grid of a config and
/// collect per-episode returns. Runs execute in parallel; row order is the
/// nested config order and is independent of scheduling. Runs that hit a
/// numerical error are recorded as failures with their completed episodes
/// preserved.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunRecord, HarnessError> {
    cfg.validate()?;
    let mut jobs = Vec::new();
    for &env in &cfg.environments {
        let probe = build_env(cfg, env)?;
        let dim = probe.state_dim() + probe.action_dim();
        let horizon = probe.horizon();
        for &algo in &cfg.algorithms {
            let degree = resolve_degree(algo.degree, cfg.episodes, dim);
            check_desk_scale(algo.kind, dim, degree, horizon)?;
            for &seed in &cfg.seeds {
                jobs.push(Job { env, algo, degree, seed });
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
    let outcomes: Vec<JobOutcome> =
        pool.install(|| jobs.par_iter().map(|job| execute_job(cfg, job)).collect());

    let mut record = RunRecord { master_seed: cfg.master_seed, ..Default::default() };
    for (job, outcome) in jobs.iter().zip(outcomes) {
        for (k, &ret) in outcome.returns.iter().enumerate() {
            record.raw.push(RawRow {
                env: job.env,
                algo: job.algo.kind,
                degree: job.degree,
                seed: job.seed,
                episode: k + 1,
                episodic_return: ret,
            });
        }
        if let Some(message) = outcome.error {
            record.failures.push(RunFailure {
                env: job.env,
                algo: job.algo.kind,
                degree: job.degree,
                seed: job.seed,
                completed_episodes: outcome.returns.len(),
                message,
            });
        }
    }
    Ok(record)
}

/// Run an experiment and write its outputs under the config's output
/// directory: `raw.csv` first, then `aggregate.csv`, plus `regret.csv` when
/// an oracle value is configured and `curves.svg` when SVG emission is on.
pub fn run_and_write(cfg: &ExperimentConfig) -> Result<RunRecord, HarnessError> {
    let mut record = run_experiment(cfg)?;
    std::fs::create_dir_all(&cfg.output_dir)?;
    std::fs::write(cfg.output_dir.join("raw.csv"), record.to_raw_csv())?;
    record.aggregate()?;
    std::fs::write(cfg.output_dir.join("aggregate.csv"), record.to_aggregate_csv())?;
    if let Some(oracle) = cfg.oracle_value {
        std::fs::write(cfg.output_dir.join("regret.csv"), record.to_regret_csv(oracle))?;
    }
    if cfg.emit_svg {
        std::fs::write(cfg.output_dir.join("curves.svg"), render_svg(&record.aggregate))?;
    }
    Ok(record)
}

/// Read worker cap from SMOOTH_RL_THREADS, defaulting to the machine.
fn worker_count() -> usize {
    match std::env::var("SMOOTH_RL_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => n,
            _ => default_workers(),
        },
        Err(_) => default_workers(),
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn resolve_degree(spec: DegreeSpec, episodes: usize, dimension: usize) -> usize {
    match spec {
        DegreeSpec::Fixed(n) => n,
        DegreeSpec::Auto { smoothness } => choose_degree(episodes, dimension, smoothness),
    }
}

fn check_desk_scale(
    kind: AlgorithmKind,
    dim: usize,
    degree: usize,
    horizon: usize,
) -> Result<(), HarnessError> {
    if kind != AlgorithmKind::LegendreEleanor {
        return Ok(());
    }
    let n_features = binomial(degree + dim, dim);
    if n_features > MAX_PLAN_FEATURES || horizon > MAX_PLAN_HORIZON {
        return Err(HarnessError::Config(format!(
            "legendre_eleanor is desk-scale only: needs Ntilde <= {MAX_PLAN_FEATURES} and H <= {MAX_PLAN_HORIZON}, got Ntilde = {n_features}, H = {horizon}"
        )));
    }
    Ok(())
}

fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n - k);
    let mut result: usize = 1;
    for i in 0..k {
        result = result * (n - i) / (i + 1);
    }
    result
}

fn build_env(
    cfg: &ExperimentConfig,
    name: EnvironmentName,
) -> Result<Box<dyn Environment>, HarnessError> {
    let horizon = cfg.horizon_for(name);
    match name {
        EnvironmentName::LqrLeft | EnvironmentName::LqrRight => {
            let (left, right) = paper_environments();
            let mut lqr = if name == EnvironmentName::LqrLeft { left } else { right };
            lqr.noise_std = cfg.noise_std;
            lqr.reward_noise_std = cfg.reward_noise_std;
            lqr.horizon = horizon;
            Ok(Box::new(
                SquashedLqr::new(lqr).map_err(|e| HarnessError::Config(e.to_string()))?,
            ))
        }
        EnvironmentName::SyntheticSmooth => {
            let mut smooth = SmoothDensityMdpConfig::default_synthetic();
            smooth.horizon = horizon;
            Ok(Box::new(
                SmoothDensityMdp::new(smooth).map_err(|e| HarnessError::Config(e.to_string()))?,
            ))
        }
    }
}

fn execute_job(cfg: &ExperimentConfig, job: &Job) -> JobOutcome {
    let env = match build_env(cfg, job.env) {
        Ok(env) => env,
        Err(e) => return JobOutcome { returns: Vec::new(), error: Some(e.to_string()) },
    };
    let label = format!("{}/{}/{}/seed{}", job.env, job.algo.kind, job.degree, job.seed);
    let rng = rng::derive_stream(cfg.master_seed, &label);
    let result = match job.algo.kind {
        AlgorithmKind::LegendreLsvi | AlgorithmKind::MonomialLsvi => {
            run_lsvi(cfg, env.as_ref(), job, rng)
        }
        AlgorithmKind::LegendreEleanor => run_eleanor(cfg, env.as_ref(), job, rng),
    };
    match result {
        Ok(returns) => JobOutcome { returns, error: None },
        Err((returns, message)) => JobOutcome { returns, error: Some(message) },
    }
}

type PartialRun = Result<Vec<f64>, (Vec<f64>, String)>;

fn run_lsvi(
    cfg: &ExperimentConfig,
    env: &dyn Environment,
    job: &Job,
    mut rng: rand_chacha::ChaCha8Rng,
) -> PartialRun {
    let dim = env.state_dim() + env.action_dim();
    let horizon = env.horizon();
    let map = match job.algo.kind {
        AlgorithmKind::LegendreLsvi => FeatureMap::legendre(dim, job.degree),
        AlgorithmKind::MonomialLsvi => FeatureMap::monomial(dim, job.degree),
        AlgorithmKind::LegendreEleanor => unreachable!(),
    }
    .map_err(|e| (Vec::new(), e.to_string()))?;
    let features = JointFeatureMap::new(map, env.state_dim(), env.action_dim())
        .map_err(|e| (Vec::new(), e.to_string()))?;
    let beta =
        theory_bonus_scale(cfg.c_beta, features.len(), cfg.episodes, horizon, cfg.delta);
    let (lo, hi) = env.reward_bounds();
    let v_max = (horizon as f64 * lo.abs().max(hi.abs())).max(1e-6);
    let clip = if hi <= 0.0 { ClipRange::NonPositive } else { ClipRange::Symmetric };
    let grid = uniform_action_grid(env.action_dim(), cfg.action_grid);
    let lsvi_cfg = LsviConfig { horizon, lambda: cfg.lambda, beta, v_max, clip };
    let mut learner = LsviLearner::new(features, lsvi_cfg, grid.clone())
        .map_err(|e| (Vec::new(), e.to_string()))?;

    let mut returns = Vec::with_capacity(cfg.episodes);
    for episode in 0..cfg.episodes {
        let fail = |returns: &[f64], e: String| (returns.to_vec(), e);
        let mut state = env.initial_state();
        let mut steps = Vec::with_capacity(horizon);
        for h in 1..=horizon {
            let action = learner
                .select_action(h, state.as_slice(), &grid)
                .map_err(|e| fail(&returns, e.to_string()))?;
            let (next, reward) =
                env.step(h, &state, &action, &mut rng).map_err(|e| fail(&returns, e.to_string()))?;
            steps.push(Step { state, action, reward });
            state = next;
        }
        let transcript = Transcript { episode_index: episode, steps };
        let episodic_return = transcript.episodic_return();
        learner
            .update_after_episode(&transcript)
            .map_err(|e| fail(&returns, e.to_string()))?;
        returns.push(episodic_return);
    }
    Ok(returns)
}

fn run_eleanor(
    cfg: &ExperimentConfig,
    env: &dyn Environment,
    job: &Job,
    mut rng: rand_chacha::ChaCha8Rng,
) -> PartialRun {
    let dim = env.state_dim() + env.action_dim();
    let horizon = env.horizon();
    let map = FeatureMap::legendre(dim, job.degree).map_err(|e| (Vec::new(), e.to_string()))?;
    let features = JointFeatureMap::new(map, env.state_dim(), env.action_dim())
        .map_err(|e| (Vec::new(), e.to_string()))?;
    let grid = uniform_action_grid(env.action_dim(), cfg.action_grid);
    let schedule = confidence_radii(horizon, cfg.eleanor_base);
    let radius =
        theory_bonus_scale(cfg.c_beta, features.len(), cfg.episodes, horizon, cfg.delta);
    let radii = vec![radius; horizon];
    let mut dataset = EleanorDataset::new(horizon);
    let initial_state = env.initial_state();

    let mut returns = Vec::with_capacity(cfg.episodes);
    for _episode in 0..cfg.episodes {
        let fail = |returns: &[f64], e: String| (returns.to_vec(), e);
        let spec = PlanSpec {
            features: &features,
            dataset: &dataset,
            initial_state: initial_state.as_slice(),
            action_grid: &grid,
            lambda: cfg.lambda,
            slack: cfg.eleanor_slack,
        };
        let plan = optimistic_plan(&spec, &schedule, &radii, cfg.eleanor_budget, &mut rng)
            .map_err(|e| fail(&returns, e.to_string()))?;
        let mut state = initial_state.clone();
        let mut episodic_return = 0.0;
        let mut observed = Vec::with_capacity(horizon);
        for h in 1..=horizon {
            let action = act(&plan, &features, h, state.as_slice(), &grid)
                .map_err(|e| fail(&returns, e.to_string()))?;
            let (next, reward) =
                env.step(h, &state, &action, &mut rng).map_err(|e| fail(&returns, e.to_string()))?;
            episodic_return += reward;
            observed.push((state.clone(), action, reward, next.clone()));
            state = next;
        }
        for (h, (s, a, r, s_next)) in observed.into_iter().enumerate() {
            let h = h + 1;
            let next_state = if h < horizon { Some(s_next.as_slice()) } else { None };
            dataset
                .push(&features, &grid, h, s.as_slice(), a.as_slice(), r, next_state)
                .map_err(|e| fail(&returns, e.to_string()))?;
        }
        returns.push(episodic_return);
    }
    Ok(returns)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tiny_config() -> ExperimentConfig {
        ExperimentConfig {
            environments: vec![EnvironmentName::LqrLeft],
            algorithms: vec![AlgorithmSpec {
                kind: AlgorithmKind::LegendreLsvi,
                degree: DegreeSpec::Fixed(1),
            }],
            episodes: 3,
            seeds: vec![0, 1],
            action_grid: 5,
            horizon: Some(4),
            ..Default::default()
        }
    }

    #[test]
    fn aggregate_ci_arithmetic() {
        let raw: Vec<RawRow> = [1.0, 2.0, 3.0]
            .iter()
            .enumerate()
            .map(|(seed, &ret)| RawRow {
                env: EnvironmentName::LqrLeft,
                algo: AlgorithmKind::LegendreLsvi,
                degree: 3,
                seed: seed as u64,
                episode: 1,
                episodic_return: ret,
            })
            .collect();
        let agg = aggregate_rows(&raw).unwrap();
        assert_eq!(agg.len(), 1);
        assert_abs_diff_eq!(agg[0].mean, 2.0, epsilon = 1e-15);
        // sample std of {1,2,3} is 1, so the half width is 1.96 / sqrt(3)
        assert_abs_diff_eq!(agg[0].ci_hi - agg[0].mean, 1.1316065276116664, epsilon = 1e-12);

        let flat: Vec<RawRow> = (0..4)
            .map(|seed| RawRow { seed, episodic_return: 0.5, ..raw[0].clone() })
            .collect();
        let agg = aggregate_rows(&flat).unwrap();
        assert_eq!(agg[0].ci_lo, agg[0].ci_hi);
    }

    #[test]
    fn aggregate_rejects_single_seed() {
        let raw = vec![RawRow {
            env: EnvironmentName::LqrLeft,
            algo: AlgorithmKind::LegendreLsvi,
            degree: 3,
            seed: 0,
            episode: 1,
            episodic_return: 1.0,
        }];
        assert!(matches!(aggregate_rows(&raw), Err(HarnessError::InsufficientSeeds)));
    }

    #[test]
    fn regret_curve_shapes() {
        assert_eq!(regret_curve(&[2.0, 2.0, 2.0], 2.0), vec![0.0, 0.0, 0.0]);
        assert_eq!(regret_curve(&[1.0, 1.0, 1.0], 2.0), vec![1.0, 2.0, 3.0]);
        let curve = regret_curve(&[0.5, 1.5, 0.0], 2.0);
        assert_eq!(curve, vec![1.5, 2.0, 4.0]);
    }

    #[test]
    fn run_experiment_row_count_and_order() {
        let cfg = tiny_config();
        let record = run_experiment(&cfg).unwrap();
        assert!(record.failures.is_empty());
        // |algorithms| x |seeds| x K rows
        assert_eq!(record.raw.len(), 1 * 2 * 3);
        let episodes: Vec<usize> = record.raw.iter().map(|r| r.episode).collect();
        assert_eq!(episodes, vec![1, 2, 3, 1, 2, 3]);
        let seeds: Vec<u64> = record.raw.iter().map(|r| r.seed).collect();
        assert_eq!(seeds, vec![0, 0, 0, 1, 1, 1]);
    }

    #[test]
    fn repeated_runs_are_byte_identical() {
        let cfg = tiny_config();
        let mut a = run_experiment(&cfg).unwrap();
        let mut b = run_experiment(&cfg).unwrap();
        a.aggregate().unwrap();
        b.aggregate().unwrap();
        assert_eq!(a.to_raw_csv(), b.to_raw_csv());
        assert_eq!(a.to_aggregate_csv(), b.to_aggregate_csv());
        assert!(a.to_raw_csv().contains("env,algo,degree,seed,episode,return"));
    }

    #[test]
    fn zero_noise_runs_have_zero_ci_width() {
        let mut cfg = tiny_config();
        cfg.noise_std = 0.0;
        cfg.reward_noise_std = 0.0;
        cfg.seeds = vec![0, 1, 2, 3, 4];
        let mut record = run_experiment(&cfg).unwrap();
        record.aggregate().unwrap();
        for row in &record.aggregate {
            assert_eq!(row.ci_lo, row.ci_hi, "episode {}", row.episode);
            assert_eq!(row.ci_lo, row.mean);
        }
    }

    #[test]
    fn eleanor_rejects_off_scale_configs() {
        let mut cfg = tiny_config();
        cfg.algorithms = vec![AlgorithmSpec {
            kind: AlgorithmKind::LegendreEleanor,
            degree: DegreeSpec::Fixed(2),
        }];
        cfg.horizon = Some(20); // beyond the desk-scale guard
        assert!(matches!(run_experiment(&cfg), Err(HarnessError::Config(_))));
    }

    #[test]
    fn eleanor_runs_on_the_smooth_env() {
        let cfg = ExperimentConfig {
            environments: vec![EnvironmentName::SyntheticSmooth],
            algorithms: vec![AlgorithmSpec {
                kind: AlgorithmKind::LegendreEleanor,
                degree: DegreeSpec::Fixed(2),
            }],
            episodes: 4,
            seeds: vec![0, 1],
            action_grid: 5,
            eleanor_budget: 20,
            ..Default::default()
        };
        let record = run_experiment(&cfg).unwrap();
        assert!(record.failures.is_empty(), "{:?}", record.failures);
        assert_eq!(record.raw.len(), 8);
        // smooth-env rewards live in [-0.5, 0.5] per step
        for row in &record.raw {
            assert!(row.episodic_return.abs() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn regret_is_monotone_under_the_dp_oracle_value() {
        // the oracle value upper-bounds anything a learner achieves early,
        // so every cumulative-regret curve must be non-decreasing
        let mut cfg = tiny_config();
        cfg.horizon = None; // paper horizon 20
        cfg.episodes = 20;
        cfg.algorithms[0].degree = DegreeSpec::Fixed(2);
        cfg.c_beta = 0.2;
        let record = run_experiment(&cfg).unwrap();
        let oracle = dp_oracle(&crate::env::paper_environments().0, 33, 11).unwrap();
        for &seed in &cfg.seeds {
            let returns = record.returns_for(
                EnvironmentName::LqrLeft,
                AlgorithmKind::LegendreLsvi,
                2,
                seed,
            );
            let curve = regret_curve(&returns, oracle);
            assert!(curve.windows(2).all(|w| w[1] >= w[0]), "seed {seed}: {curve:?}");
        }
    }

    #[test]
    fn worker_cap_does_not_change_results() {
        // SMOOTH_RL_THREADS only changes scheduling, never output
        let cfg = tiny_config();
        let baseline = run_experiment(&cfg).unwrap().to_raw_csv();
        std::env::set_var("SMOOTH_RL_THREADS", "1");
        let serial = run_experiment(&cfg).unwrap().to_raw_csv();
        std::env::remove_var("SMOOTH_RL_THREADS");
        assert_eq!(baseline, serial);
    }

    #[test]
    fn auto_degree_resolves_through_the_rule() {
        let mut cfg = tiny_config();
        cfg.algorithms = vec![AlgorithmSpec {
            kind: AlgorithmKind::LegendreLsvi,
            degree: DegreeSpec::Auto { smoothness: 1 },
        }];
        cfg.episodes = 2;
        let record = run_experiment(&cfg).unwrap();
        // d = 3, nu = 1: ceil(2^{1/7}) = 2
        assert!(record.raw.iter().all(|r| r.degree == 2));
    }
}
