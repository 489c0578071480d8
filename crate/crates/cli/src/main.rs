use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use macroreal_cli::{bundled, load_scenario_text, parse, plan, run, CliError, RunOptions};

#[derive(Parser)]
#[command(name = "macroreal", version, about = "Run macrorealism and continuity scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a scenario and write its outputs.
    Run {
        /// Scenario file, or the name of a bundled scenario.
        #[arg(long)]
        scenario: String,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Overrides the trajectory master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads for trajectory ensembles (0 = all cores).
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Check a scenario without running it.
    Validate {
        #[arg(long)]
        scenario: String,
    },
    /// List the bundled scenarios.
    List,
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for (name, desc) in bundled::list_scenarios() {
                println!("{name:<26} {desc}");
            }
            ExitCode::SUCCESS
        }
        Command::Validate { scenario } => {
            let checked = load_scenario_text(&scenario).and_then(|t| parse(&t)).and_then(plan);
            match checked {
                Ok(p) => {
                    for w in &p.warnings {
                        println!("warning: {w}");
                    }
                    println!("ok: {} ({} engine, {} time points)", p.scenario.name, p.scenario.engine.as_str(), p.times.len());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Command::Run { scenario, out_dir, seed, threads } => {
            if threads > 0 {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
                    eprintln!("warning: could not configure thread pool: {e}");
                }
            }
            let text = match load_scenario_text(&scenario) {
                Ok(t) => t,
                Err(e) => return fail(e),
            };
            let p = match parse(&text).and_then(plan) {
                Ok(p) => p,
                Err(e) => return fail(e),
            };
            for w in &p.warnings {
                eprintln!("warning: {w}");
            }
            let opts = RunOptions { out_dir: out_dir.clone(), seed, threads: rayon::current_num_threads() };
            match run(&p, &text, &opts) {
                Ok((_, record)) => {
                    println!(
                        "{}: wrote {} files to {} in {:.2} s",
                        record.scenario,
                        record.outputs.len() + 1,
                        out_dir.display(),
                        record.wall_clock_seconds
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
    }
}
