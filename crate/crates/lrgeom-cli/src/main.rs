use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lrgeom::examples;
use lrgeom::poly::MonomialOrder;
use lrgeom::report::Report;
use lrgeom::runner::{exit_code, run, RunOptions, Selection};
use lrgeom::scenario::{load, parse_scenario_file, Scenario, ScenarioFile};

/// Exact Lie-Rinehart geometry over polynomial rings.
#[derive(Parser, Debug)]
#[command(name = "lrgeom", version)]
struct Cli {
    /// Also write the report as JSON to this path (`-` for stdout instead of text).
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Monomial order for normal forms, overriding the scenario.
    #[arg(long, global = true, value_name = "grevlex|lex")]
    order: Option<MonomialOrder>,
    /// Worker threads for the parallel kernels.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Skip presentation validation before the selected tasks.
    #[arg(long, global = true)]
    lazy: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every task listed in a scenario file.
    Verify { file: PathBuf },
    /// Solve the Koszul system and print the Christoffel matrices.
    SolveLc { file: PathBuf },
    /// Print the curvature matrices of the scenario's connection.
    Curvature { file: PathBuf },
    /// Run a built-in scenario.
    Example {
        name: String,
        /// `all` or a single task name.
        #[arg(long, default_value = "all")]
        check: String,
        /// Print the scenario JSON instead of running it.
        #[arg(long)]
        dump: bool,
    },
    /// List the built-in scenarios.
    ListExamples,
}

/// Input or usage problem; maps to exit status 2.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

fn read_file(path: &Path) -> Result<ScenarioFile, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    parse_scenario_file(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn open(file: ScenarioFile, cli: &Cli) -> Result<Scenario, InputError> {
    Ok(load(file, cli.order)?)
}

fn execute(sc: &Scenario, selection: Selection, cli: &Cli) -> Result<Report, InputError> {
    Ok(run(sc, &RunOptions { selection, lazy: cli.lazy })?)
}

fn emit(report: &Report, cli: &Cli) -> Result<(), InputError> {
    match cli.json.as_deref() {
        Some(p) if p == Path::new("-") => println!("{}", report.to_json()),
        Some(p) => {
            std::fs::write(p, report.to_json() + "\n").map_err(|e| InputError(format!("{}: {e}", p.display())))?;
            print!("{}", report.to_text());
        }
        None => print!("{}", report.to_text()),
    }
    Ok(())
}

fn tasks(list: &[&str]) -> Selection {
    Selection::Tasks(list.iter().map(|s| s.to_string()).collect())
}

fn main_inner(cli: &Cli) -> Result<i32, InputError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let report = match &cli.command {
        Command::ListExamples => {
            for e in examples::EXAMPLES {
                println!("{:<24} {}", e.name, e.summary);
            }
            return Ok(0);
        }
        Command::Verify { file } => {
            let sc = open(read_file(file)?, cli)?;
            execute(&sc, Selection::All, cli)?
        }
        Command::SolveLc { file } => {
            let sc = open(read_file(file)?, cli)?;
            execute(&sc, tasks(&["solve"]), cli)?
        }
        Command::Curvature { file } => {
            let sc = open(read_file(file)?, cli)?;
            execute(&sc, tasks(&["curvature"]), cli)?
        }
        Command::Example { name, check, dump } => {
            let file = examples::build(name).ok_or_else(|| {
                InputError(format!("unknown example `{name}`; available: {}", examples::names().join(", ")))
            })?;
            if *dump {
                print!("{}", file.to_json());
                return Ok(0);
            }
            let sc = open(file, cli)?;
            let selection = if check == "all" { Selection::All } else { Selection::Only(check.clone()) };
            execute(&sc, selection, cli)?
        }
    };
    emit(&report, cli)?;
    Ok(exit_code(&report))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
