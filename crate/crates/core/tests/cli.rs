//! End-to-end checks of the command-line surface: config handling, exit
//! codes, output files, and the validate/oracle/plot subcommands.

use std::path::{Path, PathBuf};
use std::process::Command;

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_smooth-rl"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("smooth-rl-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("experiment.cfg");
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn run_writes_csv_outputs() {
    let dir = temp_dir("run");
    let config = write_config(
        &dir,
        &format!(
            "# tiny smoke experiment\n\
             environments = lqr_left\n\
             algorithms = legendre_lsvi:1, monomial_lsvi:1\n\
             episodes = 3\n\
             seeds = 0, 1\n\
             horizon = 3\n\
             action_grid = 5\n\
             emit_svg = true\n\
             output_dir = {}\n",
            dir.join("out").display()
        ),
    );
    let output = binary().args(["run", "--config"]).arg(&config).output().unwrap();
    assert!(output.status.success(), "stderr: {}", String::from_utf8_lossy(&output.stderr));

    let raw = std::fs::read_to_string(dir.join("out/raw.csv")).unwrap();
    assert!(raw.starts_with("# master_seed = 0\n# rng = fnv1a-splitmix-chacha8-v1\n"));
    assert!(raw.contains("env,algo,degree,seed,episode,return\n"));
    // 2 algorithms x 2 seeds x 3 episodes data rows
    assert_eq!(raw.lines().filter(|l| l.starts_with("lqr_left,")).count(), 12);

    let aggregate = std::fs::read_to_string(dir.join("out/aggregate.csv")).unwrap();
    assert!(aggregate.contains("env,algo,degree,episode,mean,ci_lo,ci_hi\n"));
    assert_eq!(aggregate.lines().filter(|l| l.starts_with("lqr_left,")).count(), 6);

    let svg = std::fs::read_to_string(dir.join("out/curves.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));

    // plot subcommand reproduces an SVG from the aggregate CSV
    let plotted = dir.join("replot.svg");
    let output = binary()
        .args(["plot", "--in"])
        .arg(dir.join("out/aggregate.csv"))
        .args(["--out"])
        .arg(&plotted)
        .output()
        .unwrap();
    assert!(output.status.success());
    assert_eq!(std::fs::read_to_string(&plotted).unwrap(), svg);

    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn config_errors_exit_with_code_two() {
    let dir = temp_dir("badcfg");
    let config = write_config(
        &dir,
        "environments = lqr_left\nalgorithms = legendre_lsvi:3\nepisodes = 5\nseeds = 0\nmystery = 1\n",
    );
    let output = binary().args(["run", "--config"]).arg(&config).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("unknown key"));

    let output = binary().args(["run", "--config"]).arg(dir.join("missing.cfg")).output().unwrap();
    assert_eq!(output.status.code(), Some(3)); // io error, not a config error

    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn validate_suites_pass() {
    for suite in ["orthonormality", "rate"] {
        let output = binary().args(["validate", "--suite", suite]).output().unwrap();
        assert!(output.status.success(), "suite {suite}");
        let stdout = String::from_utf8_lossy(&output.stdout);
        assert!(stdout.contains("pass = true"), "suite {suite}: {stdout}");
    }
}

#[test]
fn oracle_reports_an_estimate() {
    let output = binary()
        .args(["oracle", "--env", "lqr_left", "--state-grid", "33", "--action-grid", "11"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    let value: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("optimal_value_estimate = "))
        .unwrap()
        .parse()
        .unwrap();
    // pure-cost problem: optimal value is negative but far above the
    // do-nothing return
    assert!(value < 0.0 && value > -5.0, "estimate {value}");

    let output = binary().args(["oracle", "--env", "nowhere"]).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn regret_csv_written_when_oracle_value_given() {
    let dir = temp_dir("regret");
    let config = write_config(
        &dir,
        &format!(
            "environments = lqr_left\n\
             algorithms = legendre_lsvi:1\n\
             episodes = 4\n\
             seeds = 0, 1\n\
             horizon = 2\n\
             action_grid = 3\n\
             oracle_value = -0.4\n\
             output_dir = {}\n",
            dir.join("out").display()
        ),
    );
    let output = binary().args(["run", "--config"]).arg(&config).output().unwrap();
    assert!(output.status.success());
    let regret = std::fs::read_to_string(dir.join("out/regret.csv")).unwrap();
    assert!(regret.contains("# oracle_value = -0.4"));
    assert!(regret.contains("env,algo,degree,seed,episode,cumulative_regret"));
    // cumulative within a run: 4 rows per seed
    assert_eq!(regret.lines().filter(|l| l.starts_with("lqr_left,")).count(), 8);
    let _ = std::fs::remove_dir_all(&dir);
}
