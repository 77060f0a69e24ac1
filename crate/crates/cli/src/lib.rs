//! Command-line front end for `rtn-geometry`.

pub mod commands;
pub mod compute;
pub mod config;
pub mod error;
pub mod output;

use clap::{Parser, Subcommand};
use commands::Figure;
use config::{parse_pairs, parse_real, Axis, RunConfig};
use error::{CliError, Result};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "rtngeo", version, about = "Dephasing dynamics and geometric phases under random telegraph noise")]
pub struct Cli {
    /// Config file of `section.key = value` lines.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output directory. `run` writes to stdout without it.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Monte Carlo master seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Monte Carlo trajectory count.
    #[arg(long = "mc-traj", global = true, value_name = "N")]
    pub mc_traj: Option<usize>,

    /// Overrides a config key, e.g. `--set noise.a=0.5`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the time series for one configuration.
    Run,
    /// Repeat the run over values of one parameter.
    Sweep {
        /// One of a, nu, kappa, lambda, theta, omega0.
        #[arg(long)]
        axis: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        values: Vec<String>,
    },
    /// Check the analytic route against the independent oracles.
    CompareOracles {
        /// Shift the first residue by this amount before comparing.
        #[arg(long, hide = true, allow_hyphen_values = true)]
        fault_residue: Option<f64>,
    },
    /// Write the data behind a figure preset.
    Reproduce {
        #[arg(value_enum)]
        figure: Figure,
    },
}

/// Resolves the configuration: defaults, then the file, then flags.
pub fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut pairs = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            parse_pairs(&text)?
        }
        None => Default::default(),
    };
    for item in &cli.set {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("--set expects KEY=VALUE, got '{item}'")))?;
        pairs.insert(k.trim().to_string(), v.trim().to_string());
    }
    if let Some(seed) = cli.seed {
        pairs.insert("run.seed".into(), seed.to_string());
    }
    if let Some(n) = cli.mc_traj {
        pairs.insert("oracle.mc_traj".into(), n.to_string());
    }
    RunConfig::from_pairs(&pairs)
}

pub fn execute(cli: &Cli) -> Result<()> {
    let cfg = load_config(cli)?;
    let out_dir = || cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    match &cli.command {
        Command::Run => commands::run(&cfg, cli.out.as_deref()),
        Command::Sweep { axis, values } => {
            let axis = Axis::parse(axis)?;
            let values = values.iter().map(|v| parse_real(v)).collect::<Result<Vec<_>>>()?;
            let points = commands::sweep(&cfg, axis, &values, &out_dir())?;
            eprintln!("wrote {} runs and summary.csv to {}", points.len(), out_dir().display());
            Ok(())
        }
        Command::CompareOracles { fault_residue } => {
            let rows = commands::compare_oracles(&cfg, *fault_residue)?;
            let mut text = Vec::new();
            commands::print_comparisons(&mut text, &rows).map_err(CliError::io("<buffer>"))?;
            print!("{}", String::from_utf8_lossy(&text));
            if let Some(dir) = &cli.out {
                output::create_dir(dir)?;
                let path = dir.join("compare.txt");
                std::fs::write(&path, &text).map_err(CliError::io(&path))?;
            }
            let failed: Vec<&str> = rows.iter().filter(|c| !c.pass()).map(|c| c.quantity).collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Tolerance(failed.join(", ")))
            }
        }
        Command::Reproduce { figure } => {
            let points = commands::reproduce(*figure, &cfg, &out_dir())?;
            eprintln!("wrote {} runs for {} under {}", points.len(), figure.name(), out_dir().display());
            Ok(())
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("rtngeo: {e}");
            e.exit_code()
        }
    }
}
