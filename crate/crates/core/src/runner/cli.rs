use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::Parser;

use crate::emobility;
use crate::engine::DEFAULT_STEP_BOUND;
use crate::gherkin::{generate_skeletons, render_skeletons, StepRegistry};

use super::{load_features, run_suite, EngineFactories, ReportFormat, RunConfig};

pub const EXIT_PASSED: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Run Gherkin features against executable scenario specifications.
#[derive(Debug, Parser)]
#[command(name = "scenarist", version)]
struct Cli {
    /// Feature files or directories containing them.
    #[arg(long, num_args = 1.., required_unless_present = "list_engines")]
    features: Vec<PathBuf>,

    /// Only run scenarios carrying one of these tags, e.g. "@RpsSystem,@Csos".
    #[arg(long, default_value = "")]
    tags: String,

    /// Engine factory to run the features against.
    #[arg(long, default_value = "composed")]
    engine: String,

    /// Step bound per usage scenario.
    #[arg(long, default_value_t = DEFAULT_STEP_BOUND as u64, value_parser = clap::value_parser!(u64).range(1..))]
    max_steps: u64,

    /// Print the selected event trace of every scenario.
    #[arg(long)]
    trace: bool,

    /// Report format: pretty or json-lines.
    #[arg(long, default_value = "pretty")]
    format: ReportFormat,

    /// Print step skeletons for the features instead of running them.
    #[arg(long)]
    skeletons: bool,

    /// List the registered engine factories.
    #[arg(long)]
    list_engines: bool,
}

/// Runs the CLI over the e-mobility corpus. Returns the process exit code.
pub fn cli_main<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    cli_main_with(args, &emobility::engine_factories(), &emobility::step_registry(), out, err)
}

pub fn cli_main_with<I, T>(
    args: I,
    factories: &EngineFactories,
    registry: &StepRegistry,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_PASSED
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };

    if cli.list_engines {
        for name in factories.names() {
            let _ = writeln!(out, "{name}");
        }
        return EXIT_PASSED;
    }

    if cli.skeletons {
        return match load_features(&cli.features) {
            Ok(features) => {
                for f in &features {
                    let _ = writeln!(out, "// Feature: {}", f.name);
                    let _ = write!(out, "{}", render_skeletons(&generate_skeletons(f)));
                }
                EXIT_PASSED
            }
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                EXIT_USAGE
            }
        };
    }

    let config = RunConfig {
        features: cli.features,
        tags: cli.tags,
        max_steps: cli.max_steps as usize,
        trace: cli.trace,
        format: cli.format,
        engine: cli.engine,
    };
    match run_suite(&config, factories, registry) {
        Ok(report) => {
            let _ = write!(out, "{}", super::write_report(&report, config.format, config.trace));
            if report.is_success() {
                EXIT_PASSED
            } else {
                EXIT_FAILED
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}
