use std::fs;
use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use twomode_cli::{
    crossval, envelope_csv, parse_config, report_modes, resolve_out_dir, run, summarize_csv, CliError, ConfigError,
    Engine, RunConfig,
};
use twomode_core::envelope::MetricProfile;
use twomode_core::{InitialConditions, ModelParams};

/// Two-mode coupled oscillator simulator.
#[derive(Debug, Parser)]
#[command(name = "twomode", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the Gaussian and/or Fock engines and write CSV output.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_parser = parse_engine)]
        engine: Option<Engine>,
        /// Output directory (default: config `output_dir`, then $TWOMODE_OUT_DIR).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print normal-mode frequencies, eigenvectors and modal coefficients.
    Modes {
        #[arg(long)]
        omega_x: f64,
        #[arg(long)]
        omega_y: f64,
        #[arg(short = 'g', long = "g", allow_negative_numbers = true)]
        g: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        x0: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        px0: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        y0: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        py0: f64,
    },
    /// Compare both engines on the same grid.
    Crossval {
        #[arg(long)]
        config: PathBuf,
    },
    /// Sample the metric profiles A(x), B(x) as CSV.
    Envelope {
        #[arg(long)]
        m0: f64,
        #[arg(long)]
        k: f64,
        #[arg(long)]
        x_min: f64,
        #[arg(long)]
        x_max: f64,
        #[arg(long, default_value_t = 201)]
        samples: usize,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mean and half-range of every column of a series CSV.
    Summarize { csv: PathBuf },
}

fn parse_engine(s: &str) -> Result<Engine, String> {
    s.parse().map_err(|e: ConfigError| e.to_string())
}

fn load_config(path: &PathBuf) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(parse_config(&text)?)
}

/// `Ok(false)` means the command ran but reported a failed check.
fn dispatch(command: Command) -> Result<bool, CliError> {
    match command {
        Command::Simulate { config, engine, out } => {
            let mut cfg = load_config(&config)?;
            if let Some(engine) = engine {
                cfg.engine = engine;
                // re-validate engine-dependent fields
                cfg = twomode_cli::config::from_table(&cfg.to_table())?;
            }
            let dir = resolve_out_dir(out.as_deref(), &cfg);
            let output = run(&cfg, &dir)?;
            for w in output.runs.warnings() {
                eprintln!("warning: {w}");
            }
            for f in &output.files {
                println!("{}", f.display());
            }
            Ok(true)
        }
        Command::Modes {
            omega_x,
            omega_y,
            g,
            x0,
            px0,
            y0,
            py0,
        } => {
            let params = ModelParams::new(omega_x, omega_y, g).map_err(|e| ConfigError::Validation(e.to_string()))?;
            let report = report_modes(&params, &InitialConditions::classical(x0, px0, y0, py0))?;
            println!("{report}");
            Ok(true)
        }
        Command::Crossval { config } => {
            let report = crossval(&load_config(&config)?)?;
            println!("{report}");
            Ok(report.passed())
        }
        Command::Envelope {
            m0,
            k,
            x_min,
            x_max,
            samples,
            out,
        } => {
            let profile = MetricProfile::new(m0, k).map_err(|e| ConfigError::Validation(e.to_string()))?;
            match out {
                Some(path) => {
                    let file = fs::File::create(&path).map_err(|source| CliError::Io { path, source })?;
                    envelope_csv(io::BufWriter::new(file), &profile, x_min, x_max, samples)?;
                }
                None => envelope_csv(io::stdout().lock(), &profile, x_min, x_max, samples)?,
            }
            Ok(true)
        }
        Command::Summarize { csv } => {
            println!("{}", summarize_csv(&csv)?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
