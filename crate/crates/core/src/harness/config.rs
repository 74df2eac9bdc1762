//! Experiment configuration and its on-disk format.
//!
//! The config file is flat UTF-8 text, one `key = value` pair per line,
//! with `#` starting a comment. Lists are comma-separated. Unknown or
//! duplicated keys are errors, so a config file never silently drifts from
//! the code that reads it.

use super::HarnessError;
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EnvironmentName {
    LqrLeft,
    LqrRight,
    SyntheticSmooth,
}

impl EnvironmentName {
    pub fn parse(token: &str) -> Result<Self, HarnessError> {
        match token {
            "lqr_left" => Ok(Self::LqrLeft),
            "lqr_right" => Ok(Self::LqrRight),
            "synthetic_smooth" => Ok(Self::SyntheticSmooth),
            other => Err(HarnessError::Config(format!(
                "unknown environment `{other}` (expected lqr_left, lqr_right or synthetic_smooth)"
            ))),
        }
    }

    /// Horizon used when the config does not override it.
    pub fn default_horizon(self) -> usize {
        match self {
            Self::LqrLeft | Self::LqrRight => 20,
            Self::SyntheticSmooth => 2,
        }
    }
}

impl fmt::Display for EnvironmentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::LqrLeft => "lqr_left",
            Self::LqrRight => "lqr_right",
            Self::SyntheticSmooth => "synthetic_smooth",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgorithmKind {
    LegendreLsvi,
    MonomialLsvi,
    LegendreEleanor,
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::LegendreLsvi => "legendre_lsvi",
            Self::MonomialLsvi => "monomial_lsvi",
            Self::LegendreEleanor => "legendre_eleanor",
        };
        f.write_str(s)
    }
}

/// Polynomial degree: fixed, or chosen by the K-dependent rule for a given
/// smoothness order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeSpec {
    Fixed(usize),
    Auto { smoothness: usize },
}

/// One algorithm entry, e.g. `legendre_lsvi:3` or `monomial_lsvi:auto:1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlgorithmSpec {
    pub kind: AlgorithmKind,
    pub degree: DegreeSpec,
}

impl AlgorithmSpec {
    pub fn parse(token: &str) -> Result<Self, HarnessError> {
        let mut parts = token.splitn(2, ':');
        let name = parts.next().unwrap_or_default();
        let degree_part = parts
            .next()
            .ok_or_else(|| HarnessError::Config(format!(
                "algorithm `{token}` is missing a degree (use name:<N> or name:auto:<nu>)"
            )))?;
        let kind = match name {
            "legendre_lsvi" => AlgorithmKind::LegendreLsvi,
            "monomial_lsvi" => AlgorithmKind::MonomialLsvi,
            "legendre_eleanor" => AlgorithmKind::LegendreEleanor,
            other => {
                return Err(HarnessError::Config(format!("unknown algorithm `{other}`")));
            }
        };
        let degree = if let Some(nu) = degree_part.strip_prefix("auto:") {
            let smoothness = nu.parse::<usize>().map_err(|_| {
                HarnessError::Config(format!("bad smoothness in `{token}`"))
            })?;
            DegreeSpec::Auto { smoothness }
        } else {
            let n = degree_part.parse::<usize>().map_err(|_| {
                HarnessError::Config(format!("bad degree in `{token}`"))
            })?;
            if n == 0 {
                return Err(HarnessError::Config(format!("degree must be >= 1 in `{token}`")));
            }
            DegreeSpec::Fixed(n)
        };
        Ok(Self { kind, degree })
    }
}

/// A full experiment description: which environments, which learners, how
/// many episodes and seeds, every hyperparameter, and where results go.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub environments: Vec<EnvironmentName>,
    pub algorithms: Vec<AlgorithmSpec>,
    pub episodes: usize,
    pub seeds: Vec<u64>,
    pub master_seed: u64,
    /// Horizon override; None keeps each environment's default.
    pub horizon: Option<usize>,
    /// Candidate actions per action dimension.
    pub action_grid: usize,
    pub c_beta: f64,
    pub lambda: f64,
    pub delta: f64,
    /// LQR transition noise std.
    pub noise_std: f64,
    /// LQR reward observation noise std.
    pub reward_noise_std: f64,
    pub eleanor_budget: usize,
    pub eleanor_base: f64,
    pub eleanor_slack: f64,
    pub output_dir: PathBuf,
    pub emit_svg: bool,
    /// Optimal expected return used for regret curves, when known.
    pub oracle_value: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            environments: Vec::new(),
            algorithms: Vec::new(),
            episodes: 0,
            seeds: Vec::new(),
            master_seed: 0,
            horizon: None,
            action_grid: 21,
            c_beta: 1.0,
            lambda: 1.0,
            delta: 0.05,
            noise_std: 0.1,
            reward_noise_std: 0.0,
            eleanor_budget: 200,
            eleanor_base: 2.0,
            eleanor_slack: 1e-3,
            output_dir: PathBuf::from("out"),
            emit_svg: false,
            oracle_value: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_str_contents(&text)
    }

    pub fn from_str_contents(text: &str) -> Result<Self, HarnessError> {
        let mut seen = BTreeMap::new();
        for (lineno, raw_line) in text.lines().enumerate() {
            let line = match raw_line.find('#') {
                Some(i) => &raw_line[..i],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                HarnessError::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if seen.insert(key.clone(), value).is_some() {
                return Err(HarnessError::Config(format!("duplicate key `{key}`")));
            }
        }
        Self::from_pairs(seen)
    }

    fn from_pairs(mut pairs: BTreeMap<String, String>) -> Result<Self, HarnessError> {
        let mut cfg = Self::default();
        let mut take = |key: &str| pairs.remove(key);

        let environments = take("environments")
            .ok_or_else(|| HarnessError::Config("missing key `environments`".into()))?;
        cfg.environments = split_list(&environments)
            .iter()
            .map(|t| EnvironmentName::parse(t))
            .collect::<Result<Vec<_>, _>>()?;

        let algorithms = take("algorithms")
            .ok_or_else(|| HarnessError::Config("missing key `algorithms`".into()))?;
        cfg.algorithms = split_list(&algorithms)
            .iter()
            .map(|t| AlgorithmSpec::parse(t))
            .collect::<Result<Vec<_>, _>>()?;

        cfg.episodes = parse_scalar(take("episodes"), "episodes")?
            .ok_or_else(|| HarnessError::Config("missing key `episodes`".into()))?;

        let seeds = take("seeds").ok_or_else(|| HarnessError::Config("missing key `seeds`".into()))?;
        cfg.seeds = split_list(&seeds)
            .iter()
            .map(|t| t.parse::<u64>().map_err(|_| HarnessError::Config(format!("bad seed `{t}`"))))
            .collect::<Result<Vec<_>, _>>()?;

        if let Some(v) = parse_scalar(take("master_seed"), "master_seed")? {
            cfg.master_seed = v;
        }
        if let Some(v) = parse_scalar(take("horizon"), "horizon")? {
            cfg.horizon = Some(v);
        }
        if let Some(v) = parse_scalar(take("action_grid"), "action_grid")? {
            cfg.action_grid = v;
        }
        if let Some(v) = parse_scalar(take("c_beta"), "c_beta")? {
            cfg.c_beta = v;
        }
        if let Some(v) = parse_scalar(take("lambda"), "lambda")? {
            cfg.lambda = v;
        }
        if let Some(v) = parse_scalar(take("delta"), "delta")? {
            cfg.delta = v;
        }
        if let Some(v) = parse_scalar(take("noise_std"), "noise_std")? {
            cfg.noise_std = v;
        }
        if let Some(v) = parse_scalar(take("reward_noise_std"), "reward_noise_std")? {
            cfg.reward_noise_std = v;
        }
        if let Some(v) = parse_scalar(take("eleanor_budget"), "eleanor_budget")? {
            cfg.eleanor_budget = v;
        }
        if let Some(v) = parse_scalar(take("eleanor_base"), "eleanor_base")? {
            cfg.eleanor_base = v;
        }
        if let Some(v) = parse_scalar(take("eleanor_slack"), "eleanor_slack")? {
            cfg.eleanor_slack = v;
        }
        if let Some(v) = take("output_dir") {
            cfg.output_dir = PathBuf::from(v);
        }
        if let Some(v) = take("emit_svg") {
            cfg.emit_svg = match v.as_str() {
                "true" => true,
                "false" => false,
                other => {
                    return Err(HarnessError::Config(format!("emit_svg must be true/false, got `{other}`")));
                }
            };
        }
        if let Some(v) = parse_scalar(take("oracle_value"), "oracle_value")? {
            cfg.oracle_value = Some(v);
        }

        if let Some((key, _)) = pairs.into_iter().next() {
            return Err(HarnessError::Config(format!("unknown key `{key}`")));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.environments.is_empty() {
            return Err(HarnessError::Config("at least one environment required".into()));
        }
        if has_duplicates(&self.environments) {
            return Err(HarnessError::Config("duplicate environments".into()));
        }
        if self.algorithms.is_empty() {
            return Err(HarnessError::Config("at least one algorithm required".into()));
        }
        let mut algo_keys: Vec<String> =
            self.algorithms.iter().map(|a| format!("{}@{:?}", a.kind, a.degree)).collect();
        algo_keys.sort();
        if algo_keys.windows(2).any(|w| w[0] == w[1]) {
            return Err(HarnessError::Config("duplicate algorithm entries".into()));
        }
        if self.episodes == 0 {
            return Err(HarnessError::Config("episodes must be >= 1".into()));
        }
        if self.seeds.is_empty() {
            return Err(HarnessError::Config("at least one seed required".into()));
        }
        if has_duplicates(&self.seeds) {
            return Err(HarnessError::Config("seeds must be distinct".into()));
        }
        if self.horizon == Some(0) {
            return Err(HarnessError::Config("horizon must be >= 1".into()));
        }
        if self.action_grid == 0 {
            return Err(HarnessError::Config("action_grid must be >= 1".into()));
        }
        for (name, v) in [
            ("c_beta", self.c_beta),
            ("lambda", self.lambda),
            ("delta", self.delta),
            ("noise_std", self.noise_std),
            ("reward_noise_std", self.reward_noise_std),
            ("eleanor_base", self.eleanor_base),
            ("eleanor_slack", self.eleanor_slack),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(HarnessError::Config(format!("{name} must be finite and non-negative")));
            }
        }
        if self.lambda == 0.0 {
            return Err(HarnessError::Config("lambda must be positive".into()));
        }
        if self.delta <= 0.0 || self.delta >= 1.0 {
            return Err(HarnessError::Config("delta must lie in (0, 1)".into()));
        }
        if self.eleanor_base <= 1.0 {
            return Err(HarnessError::Config("eleanor_base must exceed 1".into()));
        }
        Ok(())
    }

    /// Horizon for one environment under this config.
    pub fn horizon_for(&self, env: EnvironmentName) -> usize {
        self.horizon.unwrap_or_else(|| env.default_horizon())
    }
}

fn split_list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(|t| t.trim().to_string())
        .filter(|t| !t.is_empty())
        .collect()
}

fn parse_scalar<T: std::str::FromStr>(
    value: Option<String>,
    key: &str,
) -> Result<Option<T>, HarnessError> {
    match value {
        None => Ok(None),
        Some(v) => v
            .parse::<T>()
            .map(Some)
            .map_err(|_| HarnessError::Config(format!("bad value for `{key}`: `{v}`"))),
    }
}

fn has_duplicates<T: Ord + Clone>(items: &[T]) -> bool {
    let mut sorted = items.to_vec();
    sorted.sort();
    sorted.windows(2).any(|w| w[0] == w[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
environments = lqr_left\n\
algorithms = legendre_lsvi:3\n\
episodes = 10\n\
seeds = 0, 1\n";

    #[test]
    fn parses_minimal_config_with_defaults() {
        let cfg = ExperimentConfig::from_str_contents(MINIMAL).unwrap();
        assert_eq!(cfg.environments, vec![EnvironmentName::LqrLeft]);
        assert_eq!(
            cfg.algorithms,
            vec![AlgorithmSpec { kind: AlgorithmKind::LegendreLsvi, degree: DegreeSpec::Fixed(3) }]
        );
        assert_eq!(cfg.episodes, 10);
        assert_eq!(cfg.seeds, vec![0, 1]);
        assert_eq!(cfg.action_grid, 21);
        assert_eq!(cfg.horizon_for(EnvironmentName::LqrLeft), 20);
        assert_eq!(cfg.horizon_for(EnvironmentName::SyntheticSmooth), 2);
        assert_eq!(cfg.lambda, 1.0);
    }

    #[test]
    fn parses_comments_lists_and_overrides() {
        let text = "\
# the benchmark pair\n\
environments = lqr_left, lqr_right   # both\n\
algorithms = legendre_lsvi:3, legendre_lsvi:auto:1, monomial_lsvi:4\n\
episodes = 500\n\
seeds = 0,1,2,3,4\n\
horizon = 20\n\
c_beta = 0.5\n\
emit_svg = true\n\
output_dir = results/paper\n";
        let cfg = ExperimentConfig::from_str_contents(text).unwrap();
        assert_eq!(cfg.environments.len(), 2);
        assert_eq!(cfg.algorithms.len(), 3);
        assert_eq!(
            cfg.algorithms[1].degree,
            DegreeSpec::Auto { smoothness: 1 }
        );
        assert_eq!(cfg.horizon, Some(20));
        assert!(cfg.emit_svg);
        assert_eq!(cfg.output_dir, PathBuf::from("results/paper"));
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        let text = format!("{MINIMAL}typo_key = 3\n");
        let err = ExperimentConfig::from_str_contents(&text).unwrap_err();
        assert!(err.to_string().contains("unknown key"));

        let text = format!("{MINIMAL}episodes = 20\n");
        let err = ExperimentConfig::from_str_contents(&text).unwrap_err();
        assert!(err.to_string().contains("duplicate key"));
    }

    #[test]
    fn rejects_bad_values() {
        for broken in [
            "environments = mars\nalgorithms = legendre_lsvi:3\nepisodes = 1\nseeds = 0\n",
            "environments = lqr_left\nalgorithms = legendre_lsvi\nepisodes = 1\nseeds = 0\n",
            "environments = lqr_left\nalgorithms = legendre_lsvi:0\nepisodes = 1\nseeds = 0\n",
            "environments = lqr_left\nalgorithms = legendre_lsvi:3\nepisodes = 0\nseeds = 0\n",
            "environments = lqr_left\nalgorithms = legendre_lsvi:3\nepisodes = 1\nseeds = 0,0\n",
            "environments = lqr_left\nalgorithms = legendre_lsvi:3\nepisodes = 1\nseeds = 0\ndelta = 2\n",
            "environments = lqr_left\nalgorithms = legendre_lsvi:3\nepisodes = 1\nseeds = 0\neleanor_base = 1.0\n",
        ] {
            assert!(ExperimentConfig::from_str_contents(broken).is_err(), "{broken}");
        }
    }

    #[test]
    fn algorithm_token_round_trip() {
        let spec = AlgorithmSpec::parse("legendre_eleanor:2").unwrap();
        assert_eq!(spec.kind, AlgorithmKind::LegendreEleanor);
        assert_eq!(spec.degree, DegreeSpec::Fixed(2));
        assert!(AlgorithmSpec::parse("legendre_lsvi:auto:notanumber").is_err());
        assert!(AlgorithmSpec::parse("unknown:3").is_err());
    }
}
