use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use essp_bench::curves::grid_for;
use essp_bench::report::GRID_POINTS;
use essp_bench::{emit_reports, load_results, marginalize, plots_for, run_matrix, BenchConfig, BenchError, Factor};
use essp_core::format::write_qpbf;

#[derive(Parser)]
#[command(about = "Run solver comparison matrices and plot their traces")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate the instance grid, run every solver and write reports.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `out_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Plot the mean curves of one factor value from a finished run.
    Plot {
        /// Directory written by `bench run`.
        #[arg(long)]
        traces: PathBuf,
        #[arg(long)]
        factor: Factor,
        #[arg(long)]
        value: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), BenchError> {
    match cli.cmd {
        Cmd::Run { config, out } => {
            let mut cfg = BenchConfig::load(&config)?;
            if let Some(out) = out {
                cfg.out_dir = out;
            }
            let result = run_matrix(&cfg)?;
            let plots = plots_for(&result)?;
            let written = emit_reports(&cfg.out_dir, &plots, &result)?;
            let inst_dir = cfg.out_dir.join("instances");
            std::fs::create_dir_all(&inst_dir).map_err(|e| BenchError::io(&inst_dir, e))?;
            for inst in essp_bench::matrix::build_instances(&cfg)? {
                let path = inst_dir.join(format!("{}.qpbf", inst.info.id));
                let file = std::fs::File::create(&path).map_err(|e| BenchError::io(&path, e))?;
                write_qpbf(&inst.f, std::io::BufWriter::new(file))?;
            }
            println!("{} runs over {} instances", result.traces.len(), result.instances.len());
            for p in written {
                println!("wrote {}", p.display());
            }
        }
        Cmd::Plot { traces, factor, value, out } => {
            let result = load_results(&traces)?;
            let refs: Vec<_> = result.traces.iter().collect();
            if refs.is_empty() {
                return Err(BenchError::EmptyCurves);
            }
            let grid = grid_for(&refs, GRID_POINTS);
            let curves = marginalize(&result.traces, &result.instances, factor, value, &grid)?;
            let plot = essp_bench::Plot { factor, value, curves };
            let path = out.unwrap_or_else(|| traces.join(plot.file_name()));
            std::fs::write(&path, essp_bench::svg::render(&plot.title(), &plot.curves))
                .map_err(|e| BenchError::io(&path, e))?;
            for c in &plot.curves {
                println!("{:<14} n={:<4} final mean {:.4}", c.solver, c.count, c.energies.last().unwrap());
            }
            println!("wrote {}", path.display());
        }
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
