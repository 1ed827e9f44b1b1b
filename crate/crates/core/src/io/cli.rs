//! Command-line front end.

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde_json::json;

use crate::io::config::Overrides;
use crate::io::output::Format;
use crate::io::run::{run, Command, RunConfig};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CommandArg {
    Simulate,
    Modes,
    Converge,
    Validate,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "delaytherm", version, about = "Delayed 1D thermoelasticity by modal decomposition")]
struct Args {
    #[arg(value_enum)]
    command: CommandArg,
    /// JSON configuration file (optional for `validate`).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    output: PathBuf,
    #[arg(long)]
    modes: Option<usize>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long = "t-final")]
    t_final: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    dx: Option<f64>,
    /// Comma-separated, strictly decreasing delays for `converge`.
    #[arg(long = "tau-list", value_delimiter = ',')]
    tau_list: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    #[arg(long)]
    parallel: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Args {
    fn into_run_config(self) -> RunConfig {
        RunConfig {
            command: match self.command {
                CommandArg::Simulate => Command::Simulate,
                CommandArg::Modes => Command::Modes,
                CommandArg::Converge => Command::Converge,
                CommandArg::Validate => Command::Validate,
            },
            config_path: self.config,
            output_dir: self.output,
            overrides: Overrides {
                n_modes: self.modes,
                tau: self.tau,
                horizon: self.t_final,
                dt: self.dt,
                dx: self.dx,
                tau_list: self.tau_list,
            },
            format: match self.format {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            },
            parallel: self.parallel,
            seed: self.seed,
        }
    }
}

/// Runs the CLI on the process arguments and returns the exit status.
pub fn main() -> i32 {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let cfg = args.into_run_config();
    if cfg.command != Command::Validate && cfg.config_path.is_none() {
        eprintln!("error: --config is required for {}", cfg.command.name());
        return 2;
    }
    match run(&cfg) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            for (name, sha) in &outcome.files {
                println!("wrote {name} ({sha})");
            }
            outcome.exit_code
        }
        Err(err) => {
            let record = json!({
                "error": {
                    "command": cfg.command.name(),
                    "message": err.to_string(),
                    "exit_code": err.exit_code(),
                }
            });
            eprintln!("{record}");
            err.exit_code()
        }
    }
}
