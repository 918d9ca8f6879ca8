use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use reaedp::experiments::{run, ExperimentConfig, Subcommand};

/// Run one experiment and write results.csv, results.json and summary.json
/// under <out>/<subcommand>/.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[arg(value_enum)]
    command: Subcommand,
    /// JSON config file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    flags: ExperimentConfig,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = cli
        .config
        .as_deref()
        .map(ExperimentConfig::from_file)
        .transpose()
        .map(|file| file.unwrap_or_default().overridden_by(&cli.flags))
        .and_then(|cfg| run(cli.command, &cfg));
    match result {
        Ok(summary) => {
            println!("{}", summary.results_csv.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
