use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use snake1d::commands::{correct, evaluate_suite_dir, generate_suite_files, plot_files};
use snake1d::{Error, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "snake1d", version, about = "Active contour baseline correction for 1D spectra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate and subtract the baseline of a two-column CSV spectrum.
    Correct {
        input: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output prefix (default: input path without extension).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write <prefix>.svg.
        #[arg(long)]
        svg: bool,
    },
    /// Write the seeded synthetic benchmark suite and its manifest.
    Generate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write into a non-empty directory.
        #[arg(long)]
        force: bool,
    },
    /// Correct every spectrum of a generated suite and score the baselines.
    Evaluate {
        dir: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Summary CSV path (default: <dir>/summary.csv).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a spectrum (and optionally its baseline) as SVG.
    Plot {
        input: PathBuf,
        #[arg(long)]
        baseline: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Correct { input, config, out, svg } => {
            let config = RunConfig::load_or_default(config.as_deref())?;
            let input = input
                .or_else(|| config.input.clone())
                .ok_or_else(|| Error::Usage("no input spectrum given".into()))?;
            let out = out.or_else(|| config.output.clone());
            let outcome = correct(&input, &config, out.as_deref(), svg)?;
            println!("iterations run: {}", outcome.result.iterations_run);
            println!("best area: {}", outcome.result.best_area);
            println!("final area: {}", outcome.final_area);
            println!("baseline: {}", outcome.baseline_path.display());
            println!("corrected: {}", outcome.corrected_path.display());
            if let Some(svg) = outcome.svg_path {
                println!("plot: {}", svg.display());
            }
        }
        Command::Generate { config, out, seed, force } => {
            let config = RunConfig::load_or_default(config.as_deref())?;
            let out = out
                .or_else(|| config.output.clone())
                .ok_or_else(|| Error::Usage("generate needs --out <dir>".into()))?;
            let rows = generate_suite_files(&config, &out, seed, force)?;
            println!("wrote {} spectra to {}", rows.len(), out.display());
        }
        Command::Evaluate { dir, config, out } => {
            let config = RunConfig::load_or_default(config.as_deref())?;
            let summary = evaluate_suite_dir(&dir, &config, out.as_deref())?;
            print!("{}", summary.to_text_table());
        }
        Command::Plot { input, baseline, out } => {
            plot_files(&input, baseline.as_deref(), &out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
