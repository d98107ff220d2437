//! The `windings` command line.
//!
//! Exit status: 0 on success, 1 when a gating check failed, 2 on usage,
//! config and other errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};
use crate::experiments::{parse_config, run_suite, ExperimentConfig, ExperimentReport, Suite};
use crate::levy_angular::{compute_constants, ConstantsTable};
use crate::samplers::RngSeed;
use crate::stable_process::{generate_path, PathConfig, StableIndex};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECKS_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Overrides the default report directory of `experiment`.
pub const OUT_DIR_ENV: &str = "WINDINGS_OUT_DIR";

/// Report directory used when neither `--out`, the environment nor the
/// config name one.
pub const DEFAULT_OUT_DIR: &str = "reports";

#[derive(Debug, Parser)]
#[command(name = "windings", version, about = "Windings of planar isotropic stable processes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Print the constants C_nu, K, I, k, r, L_tilde as CSV.
    Constants {
        /// Stable index in (0, 2); repeat for several rows.
        #[arg(long = "alpha", num_args = 1.., default_values_t = [0.5, 1.0, 1.5])]
        alphas: Vec<f64>,
        /// Write `constants.csv` under this directory instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample one path started at 1 and write it as CSV (t,re,im,theta,H).
    Simulate {
        /// Stable index in (0, 2]; 2 gives planar Brownian motion.
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        horizon: f64,
        #[arg(long)]
        base_step: Option<f64>,
        #[arg(long)]
        angle_cap: Option<f64>,
        #[arg(long)]
        max_points: Option<usize>,
        /// Write `path_alpha-<α>_seed-<seed>.csv` under this directory
        /// instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a suite and write its JSON, CSV and timing reports.
    Experiment {
        #[arg(long, value_enum)]
        suite: Suite,
        /// JSON config; missing fields take their defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        replicas: Option<usize>,
        /// Replaces the indices of the config; repeat for several.
        #[arg(long = "alpha", num_args = 1..)]
        alphas: Vec<f64>,
        /// Report directory; overrides WINDINGS_OUT_DIR and the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pretty-print a stored JSON report.
    Report { path: PathBuf },
}

/// Parse `args` (program name first), run the command and return the exit
/// status. Normal output goes to `out`, errors to stderr.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(&cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

/// Execute one command.
pub fn dispatch(command: &CliCommand, out: &mut dyn Write) -> Result<i32> {
    match command {
        CliCommand::Constants { alphas, out: dir } => {
            let mut text = format!("{}\n", ConstantsTable::CSV_HEADER);
            for &alpha in alphas {
                if !(alpha > 0.0 && alpha < 2.0) {
                    return Err(Error::Range { value: alpha, low: 0.0, high: 2.0 });
                }
                text.push_str(&compute_constants(alpha)?.csv_row());
                text.push('\n');
            }
            emit(&text, dir.as_deref(), "constants.csv", out)?;
            Ok(EXIT_OK)
        }
        CliCommand::Simulate { alpha, seed, horizon, base_step, angle_cap, max_points, out: dir } => {
            let defaults = PathConfig::default();
            let config = PathConfig {
                horizon: *horizon,
                base_step: base_step.unwrap_or(defaults.base_step.min(*horizon)),
                angle_cap: angle_cap.unwrap_or(defaults.angle_cap),
                max_points: max_points.unwrap_or(defaults.max_points),
                ..defaults
            };
            let path = generate_path(StableIndex::new(*alpha)?, &config, &mut RngSeed::new(*seed).stream())?;
            let mut csv = Vec::new();
            path.write_csv(&mut csv).map_err(|e| Error::io("<memory>", e))?;
            let text = String::from_utf8(csv).expect("CSV is ASCII");
            emit(&text, dir.as_deref(), &format!("path_alpha-{alpha}_seed-{seed}.csv"), out)?;
            Ok(EXIT_OK)
        }
        CliCommand::Experiment { suite, config, seed, replicas, alphas, out: dir } => {
            let mut cfg = match config {
                Some(path) => parse_config(path)?,
                None => ExperimentConfig::default(),
            };
            if let Some(seed) = seed {
                cfg.seed = *seed;
            }
            if let Some(n) = replicas {
                cfg.replicas = *n;
            }
            if !alphas.is_empty() {
                cfg.alphas = alphas.clone();
            }
            cfg.validate()?;
            let dir = output_dir(dir.as_deref(), &cfg);
            let (report, timing) = run_suite(*suite, &cfg)?;
            let files = report.write(&dir, &timing)?;
            write!(out, "{}", report.render()).map_err(|e| Error::io("<stdout>", e))?;
            for f in files {
                writeln!(out, "wrote {}", f.display()).map_err(|e| Error::io("<stdout>", e))?;
            }
            Ok(if report.passed() { EXIT_OK } else { EXIT_CHECKS_FAILED })
        }
        CliCommand::Report { path } => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            let report = ExperimentReport::from_json(&text)?;
            write!(out, "{}", report.render()).map_err(|e| Error::io("<stdout>", e))?;
            Ok(if report.passed() { EXIT_OK } else { EXIT_CHECKS_FAILED })
        }
    }
}

/// `--out`, then `WINDINGS_OUT_DIR`, then the config, then [`DEFAULT_OUT_DIR`].
pub fn output_dir(flag: Option<&Path>, config: &ExperimentConfig) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

fn emit(text: &str, dir: Option<&Path>, name: &str, out: &mut dyn Write) -> Result<()> {
    match dir {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            let path = dir.join(name);
            std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
        }
        None => out.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String) {
        let mut out = Vec::new();
        let code = run(std::iter::once("windings").chain(args.iter().copied()), &mut out);
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn constants_row_for_cauchy() {
        let (code, text) = run_capture(&["constants", "--alpha", "1.0"]);
        assert_eq!(code, EXIT_OK);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("alpha,C_nu,K,I,k,r,L_tilde"));
        let row: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
        assert!((row[2] - 1.0).abs() < 1e-10);
        assert!((row[1] - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-12);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_capture(&["experiment", "--suite", "nosuch"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["constants", "--alpha", "abc"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["constants", "--alpha", "2.5"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["report", "/nonexistent/report.json"]).0, EXIT_USAGE);
    }

    #[test]
    fn simulate_writes_path_csv() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path().to_str().unwrap();
        let (code, _) = run_capture(&["simulate", "--alpha", "1.5", "--seed", "3", "--horizon", "0.1", "--out", d]);
        assert_eq!(code, EXIT_OK);
        let text = std::fs::read_to_string(dir.path().join("path_alpha-1.5_seed-3.csv")).unwrap();
        assert!(text.starts_with("t,re,im,theta,H\n"));
        assert!(text.lines().count() > 2);
    }

    #[test]
    fn output_dir_precedence() {
        let cfg = ExperimentConfig { output_dir: Some("from_config".into()), ..ExperimentConfig::default() };
        assert_eq!(output_dir(Some(Path::new("flag")), &cfg), PathBuf::from("flag"));
        if std::env::var_os(OUT_DIR_ENV).is_none() {
            assert_eq!(output_dir(None, &cfg), PathBuf::from("from_config"));
            assert_eq!(output_dir(None, &ExperimentConfig::default()), PathBuf::from(DEFAULT_OUT_DIR));
        }
    }
}
