use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::Parser;
use essp_bench::BenchError;
use essp_core::format::read_qpbf;
use essp_core::recipe::{trace_recipe, Recipe, RecipeOpts};

/// Run one solver on one instance file.
#[derive(Parser)]
struct Cli {
    #[arg(long)]
    qpbf: PathBuf,
    /// Solver or full recipe, e.g. `essp`, `qpbo-i`, `bp+essp`.
    #[arg(long, default_value = "essp")]
    solver: String,
    /// Initializer (`rand`, `zeros`, `bp`, `qpbo`); prefixed to the solver.
    #[arg(long)]
    init: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    budget: Option<f64>,
    /// Write the full trace as JSON.
    #[arg(long)]
    trace: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<(), BenchError> {
    let name = match &cli.init {
        Some(init) => format!("{init}+{}", cli.solver),
        None => cli.solver.clone(),
    };
    let recipe: Recipe = name.parse().map_err(|_| BenchError::Config(format!("unknown solver {name:?}")))?;
    if cli.budget.is_some_and(|b| !(b > 0.0 && b.is_finite())) {
        return Err(BenchError::Config("budget must be positive".into()));
    }
    let file = std::fs::File::open(&cli.qpbf).map_err(|e| BenchError::io(&cli.qpbf, e))?;
    let f = read_qpbf(std::io::BufReader::new(file))?;
    let opts = RecipeOpts { seed: cli.seed, time_budget: cli.budget.map(Duration::from_secs_f64), ..RecipeOpts::default() };
    let instance = cli.qpbf.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    let mut trace = trace_recipe(&f, &recipe, &opts, &instance, None)?;
    trace.solver = name;
    println!("solver     {}", trace.solver);
    println!("energy     {}", trace.final_energy);
    println!("time       {:.6}", trace.wall_time);
    if let Some(frac) = trace.labeled_fraction {
        println!("labeled    {frac:.4}");
    }
    println!("labeling   {}", trace.labeling);
    if let Some(path) = cli.trace {
        std::fs::write(&path, serde_json::to_vec_pretty(&trace)?).map_err(|e| BenchError::io(&path, e))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
