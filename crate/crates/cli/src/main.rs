//! `coxpoly`: enumeration of compact hyperbolic Coxeter 5-polytopes with
//! nine facets.
//!
//! Exit codes: 0 success, 2 undecided matrices remain, 3 input error,
//! 1 any other failure.

mod artifact;
mod export;
mod pipeline;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coxpoly::pasting::Approach;

use export::Format;
use pipeline::{PipelineConfig, PipelineError, Selection, Stage, DEFAULT_POLYTOPES};

#[derive(Parser, Debug)]
#[command(name = "coxpoly", version, about = "Compact hyperbolic Coxeter polytope enumeration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Read and select the polytopes.
    Ingest(RunArgs),
    /// Build or load the diagram library.
    Libgen(RunArgs),
    /// Enumerate potential vectors and apply the intersection filter.
    Enumerate(RunArgs),
    /// Solve and certify the filtered vectors.
    Solve(RunArgs),
    /// Glue prisms onto basis certificates until a fixed point.
    Glue(RunArgs),
    /// Run the whole pipeline and write the report.
    Report(RunArgs),
    /// Write one diagram per final certificate.
    Export {
        #[command(flatten)]
        run: RunArgs,
        /// text or dot.
        #[arg(long, default_value = "text")]
        format: String,
    },
    /// Check an output directory written by `report`.
    Verify {
        #[arg(long, env = "COXPOLY_OUT", default_value = "coxpoly-out")]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ApproachArg {
    Basis,
    Direct,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Polytope list, one incidence line per polytope in census numbering.
    /// Defaults to the bundled census.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Comma-separated census numbers, or `sweep` for every polytope with at
    /// least two diverging facet pairs.
    #[arg(long, value_delimiter = ',')]
    polytopes: Vec<String>,
    #[arg(long, value_enum, default_value = "basis")]
    approach: ApproachArg,
    #[arg(long, default_value_t = 7)]
    max_weight: u8,
    /// Solver timeout per matrix, in seconds.
    #[arg(long, default_value_t = 30.0)]
    timeout: f64,
    /// Rows held in memory per layer before spilling to disk.
    #[arg(long, default_value_t = 64 << 20)]
    row_budget: usize,
    #[arg(long, env = "COXPOLY_WORKERS")]
    workers: Option<usize>,
    #[arg(long, env = "COXPOLY_OUT", default_value = "coxpoly-out")]
    out: PathBuf,
    /// Allow the heavy cases.
    #[arg(long)]
    heavy: bool,
}

impl RunArgs {
    fn config(&self, stage: Stage, export: Option<Format>) -> Result<PipelineConfig, PipelineError> {
        let selection = if self.polytopes.is_empty() {
            Selection::Ids(DEFAULT_POLYTOPES.to_vec())
        } else if self.polytopes == ["sweep"] {
            Selection::Sweep
        } else {
            let ids: Result<Vec<usize>, _> = self.polytopes.iter().map(|s| s.trim().parse()).collect();
            Selection::Ids(ids.map_err(|e| PipelineError::Input(format!("--polytopes: {e}")))?)
        };
        if !(self.timeout > 0.0) {
            return Err(PipelineError::Input("--timeout must be positive".into()));
        }
        if !(2..=7).contains(&self.max_weight) {
            return Err(PipelineError::Input("--max-weight must be in 2..=7".into()));
        }
        Ok(PipelineConfig {
            input: self.input.clone(),
            stage,
            approach: match self.approach {
                ApproachArg::Basis => Approach::Basis,
                ApproachArg::Direct => Approach::Direct,
            },
            max_weight: self.max_weight,
            timeout: Duration::from_secs_f64(self.timeout),
            row_budget: self.row_budget,
            out: self.out.clone(),
            selection,
            heavy: self.heavy,
            export,
        })
    }
}

fn exit_for(e: &PipelineError) -> ExitCode {
    match e {
        PipelineError::Input(_) | PipelineError::Stale(_) => ExitCode::from(3),
        PipelineError::Io(_) | PipelineError::Verify(_) => ExitCode::from(1),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    let (args, stage, export) = match &cli.command {
        Command::Ingest(a) => (a, Stage::Ingest, None),
        Command::Libgen(a) => (a, Stage::Libgen, None),
        Command::Enumerate(a) => (a, Stage::Enumerate, None),
        Command::Solve(a) => (a, Stage::Solve, None),
        Command::Glue(a) => (a, Stage::Glue, None),
        Command::Report(a) => (a, Stage::Report, None),
        Command::Export { run, format } => match format.parse::<Format>() {
            Ok(f) => (run, Stage::Glue, Some(f)),
            Err(e) => {
                eprintln!("coxpoly: {e}");
                return ExitCode::from(3);
            }
        },
        Command::Verify { out } => {
            return match pipeline::verify(out) {
                Ok(v) => {
                    println!("verified {} certificates, {} files", v.certificates, v.files);
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("coxpoly: {e}");
                    exit_for(&e)
                }
            };
        }
    };
    let cfg = match args.config(stage, export) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("coxpoly: {e}");
            return exit_for(&e);
        }
    };
    if let Some(n) = args.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("coxpoly: workers: {e}");
        }
    }
    match pipeline::run(&cfg) {
        Ok(report) => {
            for p in &report.polytopes {
                println!(
                    "P{}: seilper {} filtered {} certificates {} final {}",
                    p.id, p.seilper, p.filtered, p.certificates, p.final_count
                );
            }
            if let Some(n) = report.prisms {
                println!("prisms {n}");
            }
            let total: usize = report.polytopes.iter().map(|p| p.final_count).sum();
            println!("total {total}");
            if report.undecided.is_empty() {
                ExitCode::SUCCESS
            } else {
                for u in &report.undecided {
                    eprintln!("undecided {u}");
                }
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("coxpoly: {e}");
            exit_for(&e)
        }
    }
}
