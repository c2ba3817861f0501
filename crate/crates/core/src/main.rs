use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qpde::pipeline::{self, report_summary, RunConfig, RunOutput, SolverMode};
use qpde::Error;

#[derive(Parser)]
#[command(
    name = "qpde",
    version,
    about = "Channel heat transfer via binarized least squares and QAOA"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// March the problem with one solver and write its field.
    Run(RunArgs),
    /// Run the classical solver and the selected quantum route, write both
    /// fields and the comparison report.
    Compare(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration; omitted keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Solver route: classical, qaoa or brute_force.
    #[arg(long, value_parser = parse_mode)]
    mode: Option<SolverMode>,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the configured sampling seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn parse_mode(s: &str) -> Result<SolverMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig, Error> {
        let mut config = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(mode) = self.mode {
            config.solver_mode = mode;
        }
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        config.validate()?;
        Ok(config)
    }
}

fn prepare_dir(dir: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn warn_unrepresentable(output: &RunOutput) {
    for s in output.report.steps.iter().filter(|s| s.unrepresentable > 0) {
        eprintln!(
            "warning: step {}: {} exact value(s) fall outside the representable range",
            s.step, s.unrepresentable
        );
    }
}

fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run(args) => {
            let config = args.resolve()?;
            prepare_dir(&args.out)?;
            let output = pipeline::run(&config)?;
            warn_unrepresentable(&output);
            let name = match config.solver_mode {
                SolverMode::Classical => "field_classical.csv",
                _ => "field_quantum.csv",
            };
            let path = args.out.join(name);
            pipeline::emit_field(&output.field, &path)?;
            pipeline::emit_traces(&output.traces, &args.out)?;
            println!("{} field written to {}", config.solver_mode, path.display());
        }
        Command::Compare(args) => {
            let config = args.resolve()?;
            prepare_dir(&args.out)?;
            let output = pipeline::run(&config)?;
            warn_unrepresentable(&output);
            pipeline::emit_field(&output.classical, &args.out.join("field_classical.csv"))?;
            pipeline::emit_field(&output.field, &args.out.join("field_quantum.csv"))?;
            pipeline::emit_report(&output.report, &args.out.join("report.csv"))?;
            pipeline::emit_traces(&output.traces, &args.out)?;
            print!("{}", report_summary(&output.report));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            if err.is_config() {
                ExitCode::from(2)
            } else if err.is_io() {
                ExitCode::from(1)
            } else {
                ExitCode::from(3)
            }
        }
    }
}
