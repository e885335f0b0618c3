use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ma_ee::harness::{
    emit_results, figure_config, motor_curves, motor_curves_to_csv, optimized_positions, positions_to_csv,
    render_results, run_experiment, selftest, ExperimentConfig, Figure, Format, Scale,
};
use ma_ee::motor::MotorParams;
use ma_ee::{Error, Result};

#[derive(Parser)]
#[command(name = "ma-ee", version, about = "Movable-antenna energy-efficiency simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    realizations: Option<usize>,
    /// Worker threads; 1 runs serially.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    scale: Option<Scale>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by --config.
    Run,
    /// Reproduce one EE figure (fig5 to fig13).
    Figure { name: String },
    /// Tabulate pull-out torque and mechanical power against speed.
    MotorCurves {
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// Run the built-in consistency checks.
    Selftest,
}

impl Cli {
    fn apply_overrides(&self, config: &mut ExperimentConfig) -> Result<()> {
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(r) = self.realizations {
            config.realizations = r;
        }
        if self.threads.is_some() {
            config.threads = self.threads;
        }
        if self.out.is_some() {
            config.output = self.out.clone();
        }
        if let Some(f) = self.format {
            config.format = f;
        }
        config.validate()
    }
}

fn write(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Run => {
            let path = cli.config.as_ref().ok_or_else(|| Error::Config {
                field: "config".into(),
                reason: "`run` needs --config PATH".into(),
            })?;
            let mut config = ExperimentConfig::from_file(path)?;
            cli.apply_overrides(&mut config)?;
            let rows = run_experiment(&config)?;
            match &config.output {
                Some(path) => emit_results(&rows, config.format, path)?,
                None => print!("{}", render_results(&rows, config.format)?),
            }
        }
        Command::Figure { name } => {
            let figure: Figure = name.parse()?;
            let mut config = figure_config(figure, cli.scale.unwrap_or_default());
            cli.apply_overrides(&mut config)?;
            eprintln!("{figure}: {}", figure.title());
            if figure == Figure::Fig6 {
                let rows = optimized_positions(&config, 0)?;
                let text = match config.format {
                    Format::Csv => positions_to_csv(&rows),
                    Format::Json => serde_json::to_string_pretty(&rows).map_err(|e| Error::Io(e.to_string()))?,
                };
                write(&text, config.output.as_ref())?;
            } else {
                let rows = run_experiment(&config)?;
                match &config.output {
                    Some(path) => emit_results(&rows, config.format, path)?,
                    None => print!("{}", render_results(&rows, config.format)?),
                }
            }
        }
        Command::MotorCurves { points } => {
            let motor = match &cli.config {
                Some(path) => ExperimentConfig::from_file(path)?.motor,
                None => MotorParams::am2224(),
            };
            let pts = motor_curves(&motor, *points)?;
            let text = match cli.format.unwrap_or_default() {
                Format::Csv => motor_curves_to_csv(&pts),
                Format::Json => serde_json::to_string_pretty(&pts).map_err(|e| Error::Io(e.to_string()))?,
            };
            write(&text, cli.out.as_ref())?;
        }
        Command::Selftest => {
            let checks = selftest();
            for c in &checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            return Ok(checks.iter().all(|c| c.passed));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
