//! Command-line front end: scenario registry, sampling and reports.

pub mod config;
pub mod sampling;
pub mod scenario;

use std::ffi::OsString;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};
use crate::verify::ToleranceTier;
use crate::C64;
pub use config::{parse_config, CustomConfig, RKind};
pub use sampling::{sample_points, SamplePlan};
pub use scenario::{describe, run_scenario, RunOptions, Scenario, VerificationReport, SCENARIOS};

#[derive(Debug, Parser)]
#[command(
    name = "dynrmat",
    version,
    about = "Build dynamical r-matrices and verify their identities at sampled points"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario and emit a JSON report.
    Verify(VerifyArgs),
    /// List the builtin scenarios.
    ListScenarios,
    /// Print the identities a scenario exercises.
    Describe {
        #[arg(long)]
        scenario: String,
    },
}

#[derive(Debug, clap::Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub scenario: String,
    /// Comma-separated values such as `0.5,2,1+0.3i`.
    #[arg(long)]
    pub epsilon: Option<String>,
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.4)]
    pub radius: f64,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Override the tolerance of derivative-based checks: analytic, fd or algebraic.
    #[arg(long)]
    pub tolerance_tier: Option<ToleranceTier>,
    /// Configuration file for the custom scenario.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn parse_epsilons(text: &str) -> Result<Vec<C64>> {
    text.split(',')
        .map(|w| {
            let w = w.trim();
            C64::from_str(w).map_err(|_| Error::input(format!("`{w}` is not a complex number")))
        })
        .collect()
}

fn verify(args: &VerifyArgs) -> Result<VerificationReport> {
    let mut scenario = match (&args.config, args.scenario.as_str()) {
        (Some(path), "custom") => Scenario::custom(parse_config(&std::fs::read_to_string(path)?)?),
        (Some(_), other) => {
            return Err(Error::input(format!(
                "--config applies to the custom scenario, not `{other}`"
            )))
        }
        (None, name) => Scenario::builtin(name)?,
    };
    if let Some(e) = &args.epsilon {
        scenario.epsilons = parse_epsilons(e)?;
    }
    if args.radius.is_nan() || args.radius < 0.0 {
        return Err(Error::input("radius must be nonnegative"));
    }
    let opts = RunOptions {
        samples: args.samples,
        plan: SamplePlan {
            radius: args.radius,
            seed: args.seed,
            ..SamplePlan::default()
        },
        tier: args.tolerance_tier,
    };
    run_scenario(&scenario, &opts)
}

fn print_summary(report: &VerificationReport) {
    let s = &report.summary;
    eprintln!(
        "{}: {}/{} samples passed, {}/{} checks passed, max relative residual {:.3e}, {:.2}s{}",
        report.scenario,
        s.samples_passed,
        s.samples,
        s.checks_passed,
        s.checks,
        s.max_residual_rel,
        s.wall_time_seconds,
        if s.vacuous { " (vacuous)" } else { "" }
    );
    for r in report.reports.iter().filter(|r| !r.passed()).take(10) {
        eprintln!(
            "  fail {} residual {:.3e} > {:.1e}",
            r.check, r.residual_rel, r.tolerance
        );
    }
}

/// Parse arguments and run; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match cli.command {
        Command::ListScenarios => {
            for (name, what) in SCENARIOS {
                println!("{name:<20} {what}");
            }
            0
        }
        Command::Describe { scenario } => match describe(&scenario) {
            Ok(text) => {
                println!("{text}");
                0
            }
            Err(e) => {
                eprintln!("error: {e}");
                2
            }
        },
        Command::Verify(args) => {
            let report = match verify(&args) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return 2;
                }
            };
            let json = match serde_json::to_string_pretty(&report) {
                Ok(j) => j,
                Err(e) => {
                    eprintln!("error: {e}");
                    return 2;
                }
            };
            match &args.output {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, json + "\n") {
                        eprintln!("error: {e}");
                        return 2;
                    }
                }
                None => println!("{json}"),
            }
            print_summary(&report);
            report.exit_code()
        }
    }
}
