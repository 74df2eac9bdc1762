//! Command-line entry point: run experiments from config files, run the
//! numerical validation suites, estimate optimal values, and plot curves.
//!
//! Exit codes: 0 on success, 2 on configuration errors, 3 on numerical
//! failures.

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use smooth_rl::env::SmoothDensityMdpConfig;
use smooth_rl::features::FeatureMap;
use smooth_rl::harness::{
    dp_oracle, parse_aggregate_csv, render_svg, run_and_write, smooth_oracle, EnvironmentName,
    ExperimentConfig, HarnessError,
};
use smooth_rl::validation::{approximation_rate, empirical_ibe, orthonormality_report};
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "smooth-rl", version, about = "Episodic RL benchmarks over orthogonal polynomial feature maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file and write CSV results.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run one of the numerical validation suites and print its report.
    Validate {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Seed for the Monte-Carlo parts (ibe suite).
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Estimate the optimal expected return of an environment by grid
    /// dynamic programming.
    Oracle {
        #[arg(long)]
        env: String,
        #[arg(long, default_value_t = 65)]
        state_grid: usize,
        #[arg(long, default_value_t = 21)]
        action_grid: usize,
    },
    /// Render an aggregate CSV as an SVG line plot.
    Plot {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Orthonormality,
    Rate,
    Ibe,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                HarnessError::Config(_) => ExitCode::from(EXIT_CONFIG),
                _ => ExitCode::from(EXIT_NUMERICAL),
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, HarnessError> {
    match cli.command {
        Command::Run { config } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            let record = run_and_write(&cfg)?;
            println!(
                "wrote {} raw rows and {} aggregate rows to {}",
                record.raw.len(),
                record.aggregate.len(),
                cfg.output_dir.display()
            );
            if record.failures.is_empty() {
                Ok(ExitCode::SUCCESS)
            } else {
                for f in &record.failures {
                    eprintln!(
                        "run failed: {}/{}:{} seed {} after {} episodes: {}",
                        f.env, f.algo, f.degree, f.seed, f.completed_episodes, f.message
                    );
                }
                Ok(ExitCode::from(EXIT_NUMERICAL))
            }
        }
        Command::Validate { suite, seed } => run_validation(suite, seed),
        Command::Oracle { env, state_grid, action_grid } => {
            let name = EnvironmentName::parse(&env)?;
            let value = match name {
                EnvironmentName::LqrLeft | EnvironmentName::LqrRight => {
                    let (left, right) = smooth_rl::env::paper_environments();
                    let cfg = if name == EnvironmentName::LqrLeft { left } else { right };
                    dp_oracle(&cfg, state_grid, action_grid)?
                }
                EnvironmentName::SyntheticSmooth => {
                    let cfg = SmoothDensityMdpConfig::default_synthetic();
                    smooth_oracle(&cfg, state_grid, action_grid)?
                }
            };
            println!("env = {name}");
            println!("optimal_value_estimate = {value}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Plot { input, output } => {
            let text = std::fs::read_to_string(&input)?;
            let rows = parse_aggregate_csv(&text)?;
            std::fs::write(&output, render_svg(&rows))?;
            println!("wrote {}", output.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_validation(suite: Suite, seed: u64) -> Result<ExitCode, HarnessError> {
    match suite {
        Suite::Orthonormality => {
            let deviation = orthonormality_report(10, 64);
            println!("suite = orthonormality");
            println!("max_degree,quad_order,max_abs_deviation");
            println!("10,64,{deviation}");
            let pass = deviation < 1e-10;
            println!("pass = {pass}");
            Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(EXIT_NUMERICAL) })
        }
        Suite::Rate => {
            println!("suite = rate");
            let kink = approximation_rate(|x: f64| x.abs(), 0, &[4, 8, 16, 32])
                .map_err(|e| HarnessError::Numerical(e.to_string()))?;
            println!("# f(x) = |x|");
            print!("{}", kink.to_csv());
            let smooth =
                approximation_rate(|x: f64| (std::f64::consts::PI * x).cos(), 0, &[4, 6, 8, 10])
                    .map_err(|e| HarnessError::Numerical(e.to_string()))?;
            println!("# f(x) = cos(pi x)");
            print!("{}", smooth.to_csv());
            let pass = kink.fitted_slope <= -0.8 && smooth.fitted_slope <= -3.0;
            println!("pass = {pass}");
            Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(EXIT_NUMERICAL) })
        }
        Suite::Ibe => {
            println!("suite = ibe");
            println!("degree,estimate");
            let cfg = SmoothDensityMdpConfig::default_synthetic();
            let mut estimates = Vec::new();
            for degree in [2usize, 4, 6, 8] {
                let map = FeatureMap::legendre(2, degree)
                    .map_err(|e| HarnessError::Numerical(e.to_string()))?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let est = empirical_ibe(&cfg, &map, 150, 101, 21, &mut rng)
                    .map_err(|e| HarnessError::Numerical(e.to_string()))?;
                println!("{degree},{}", est.value);
                estimates.push(est.value);
            }
            let pass = estimates.windows(2).all(|w| w[1] <= w[0] + 1e-3);
            println!("pass = {pass}");
            Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(EXIT_NUMERICAL) })
        }
    }
}
