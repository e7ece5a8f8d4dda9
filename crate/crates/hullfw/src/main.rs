use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hullfw::harness::{
    config_hash, load_results, outcome_to_row, render_table, run_grid, solve_with, summarize,
    FamilySpec, GridSpec, RunHeader,
};
use hullfw::objective::ProblemInstance;
use hullfw::tree::SolverConfig;

#[derive(Parser)]
#[command(name = "hullfw", about = "Mixed-integer convex solver over integer hulls")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance file
    Solve {
        instance: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "hullfw", value_parser = ["hullfw", "oa", "nlp-bnb"])]
        solver: String,
        #[arg(long)]
        time_limit: Option<f64>,
        /// write the structured run log as JSON
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Run an experiment grid described by a spec file
    Grid {
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Summarize a results directory
    Report {
        dir: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 10.0, 300.0, 600.0, 1200.0])]
        buckets: Vec<f64>,
        #[arg(long, default_value_t = 1800.0)]
        time_limit: f64,
    },
    /// Generate an instance file from a family spec
    Gen {
        /// family spec JSON, e.g. {"family":"portfolio","n":20,"integer_fraction":0.5}
        family: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run() -> hullfw::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Solve { instance, config, solver, time_limit, log } => {
            let text = fs::read_to_string(&instance)?;
            let inst: ProblemInstance = serde_json::from_str(&text)?;
            let mut cfg = match config {
                Some(path) => serde_json::from_str(&fs::read_to_string(&path)?)?,
                None => SolverConfig::default(),
            };
            if time_limit.is_some() {
                cfg.time_limit = time_limit;
            }
            let start = std::time::Instant::now();
            let mut outcome = solve_with(&solver, &inst, &cfg)?;
            let wall = start.elapsed().as_secs_f64();
            let name = instance
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            outcome.log.header = RunHeader {
                instance: name.clone(),
                solver: solver.clone(),
                config_hash: config_hash(&cfg),
                seed: 0,
            };
            let row = outcome_to_row(&name, &solver, 0, &outcome, wall);
            println!(
                "status={} primal={} dual={} rel_gap={} nodes={} lmo_calls={} wall_seconds={:.3}",
                row.status, row.primal, row.dual, row.rel_gap, row.nodes, row.lmo_calls, wall
            );
            if let Some(path) = log {
                fs::write(&path, serde_json::to_string_pretty(&outcome.log)?)?;
            }
        }
        Command::Grid { spec, out, jobs } => {
            let grid: GridSpec = serde_json::from_str(&fs::read_to_string(&spec)?)?;
            let rows = run_grid(&grid, &out, jobs)?;
            println!("{} cells written to {}", rows.len(), out.display());
        }
        Command::Report { dir, buckets, time_limit } => {
            let rows = load_results(&dir)?;
            let table = summarize(&rows, &buckets, time_limit, 1.0)?;
            print!("{}", render_table(&table));
        }
        Command::Gen { family, seed, out } => {
            let spec: FamilySpec = serde_json::from_str(&family)?;
            let (name, inst) = spec.build(seed)?;
            fs::write(&out, serde_json::to_string_pretty(&inst)?)?;
            println!("wrote {name} (seed {seed}) to {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
