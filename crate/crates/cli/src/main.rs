//! `twostate`: figure data as CSV and the verification suite.

mod figures;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::Table;
use twostate::mc::GENERATOR;
use twostate::verify::{run_checks, VerifyConfig};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "twostate",
    version,
    about = "Two-state teleportation figures and checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    config: RunConfig,
}

#[derive(Debug, Args)]
struct RunConfig {
    /// Points on the θ grid over [0, π/2], endpoints included.
    #[arg(long, global = true, default_value_t = 181)]
    theta_steps: usize,
    /// Points on the α² grid over [0, 1/2], endpoints included.
    #[arg(long, global = true, default_value_t = 101)]
    alpha_steps: usize,
    /// Monte Carlo samples per estimate.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    samples: usize,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classical strategy fidelities against θ.
    FigClassical,
    /// Channel strategies against α² at fixed θ.
    FigChannel {
        /// Ensemble angle in radians, within [0, π/2].
        #[arg(
            long,
            required_unless_present = "unknown",
            allow_negative_numbers = true
        )]
        theta: Option<f64>,
        /// Average over all pure inputs instead of the two-state ensemble.
        #[arg(long)]
        unknown: bool,
    },
    /// Telecloning fidelities and entanglement against θ.
    FigTelecloning,
    /// Run the invariant suite; exit status 1 if any check fails.
    Verify {
        /// Perturb one closed form to confirm that the suite notices.
        #[arg(long)]
        tamper: bool,
    },
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn validate(config: &RunConfig) -> Result<(), String> {
    if config.theta_steps < 2 {
        return Err(format!(
            "--theta-steps must be at least 2, got {}",
            config.theta_steps
        ));
    }
    if config.alpha_steps < 2 {
        return Err(format!(
            "--alpha-steps must be at least 2, got {}",
            config.alpha_steps
        ));
    }
    if config.samples < 100 {
        return Err(format!(
            "--samples must be at least 100, got {}",
            config.samples
        ));
    }
    Ok(())
}

fn open_output(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn base_meta(command: &str, config: &RunConfig) -> Vec<(String, String)> {
    vec![
        ("twostate".into(), env!("CARGO_PKG_VERSION").into()),
        ("command".into(), command.into()),
        ("theta_steps".into(), config.theta_steps.to_string()),
        ("alpha_steps".into(), config.alpha_steps.to_string()),
        ("samples".into(), config.samples.to_string()),
        ("seed".into(), config.seed.to_string()),
        ("rng".into(), GENERATOR.into()),
    ]
}

fn figure(command: &Command, config: &RunConfig) -> Result<Table, ExitCode> {
    let (name, header, rows, extra): (_, Vec<&'static str>, _, Vec<(String, String)>) =
        match command {
            Command::FigClassical => (
                "fig-classical",
                figures::CLASSICAL_HEADER.to_vec(),
                figures::classical_rows(config.theta_steps),
                vec![],
            ),
            Command::FigChannel { unknown: true, .. } => (
                "fig-channel",
                figures::CHANNEL_UNKNOWN_HEADER.to_vec(),
                figures::channel_unknown_rows(config.alpha_steps),
                vec![("inputs".into(), "all pure states".into())],
            ),
            Command::FigChannel { theta, .. } => {
                let theta = theta.expect("clap requires --theta without --unknown");
                (
                    "fig-channel",
                    figures::CHANNEL_HEADER.to_vec(),
                    figures::channel_rows(theta, config.alpha_steps),
                    vec![("theta".into(), output::format_number(theta))],
                )
            }
            Command::FigTelecloning => (
                "fig-telecloning",
                figures::TELECLONING_HEADER.to_vec(),
                figures::telecloning_rows(config.theta_steps),
                vec![],
            ),
            Command::Verify { .. } => unreachable!("verify is not a figure"),
        };
    let rows = rows.map_err(usage_error)?;
    let mut meta = base_meta(name, config);
    meta.extend(extra);
    Ok(Table { meta, header, rows })
}

fn verify(tamper: bool, config: &RunConfig) -> ExitCode {
    let report = run_checks(&VerifyConfig {
        samples: config.samples,
        seed: config.seed,
        tamper,
    });
    let failed = report.iter().filter(|c| !c.passed).count();
    let write = |mut out: Box<dyn Write>| -> io::Result<()> {
        for check in &report {
            writeln!(out, "{check}")?;
        }
        writeln!(out, "{} checks, {} failed", report.len(), failed)?;
        out.flush()
    };
    if let Err(e) = open_output(&config.out).and_then(write) {
        return usage_error(format!("cannot write report: {e}"));
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFY_FAILED)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Err(msg) = validate(&cli.config) {
        return usage_error(msg);
    }
    if let Command::Verify { tamper } = cli.command {
        return verify(tamper, &cli.config);
    }
    let table = match figure(&cli.command, &cli.config) {
        Ok(t) => t,
        Err(code) => return code,
    };
    match open_output(&cli.config.out).and_then(|out| table.write_to(out)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => usage_error(format!("cannot write output: {e}")),
    }
}
