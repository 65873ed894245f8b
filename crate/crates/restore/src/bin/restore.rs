use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};
use essp_core::recipe::RecipeOpts;
use essp_restore::glyph::{add_noise, synthetic_glyphs, GlyphSet};
use essp_restore::{read_pbm, restore, train_prior, write_pbm, PriorModel, Raster, RestoreError, RestoreParams, DEFAULT_TAU};

/// Binary glyph restoration with a trained pairwise prior.
#[derive(Parser)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Train a prior from a directory of PBM images.
    Train {
        #[arg(long)]
        glyphs: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Frequency floor.
        #[arg(long, default_value_t = DEFAULT_TAU)]
        tau: f64,
    },
    /// Restore a noisy PBM image.
    Run {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        noisy: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Defaults to 2·pixels / retained pairs.
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, default_value = "essp")]
        solver: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Wall-clock budget in seconds.
        #[arg(long)]
        budget: Option<f64>,
        /// Where to write the restored image.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a synthetic 16x16 training set.
    Glyphs {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 12)]
        copies: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Flip pixels of a PBM image at random.
    Noise {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.2)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn read_raster(path: &Path) -> Result<Raster, RestoreError> {
    read_pbm(&fs::read_to_string(path).map_err(|e| RestoreError::io(path, e))?)
}

fn write_raster(path: &Path, r: &Raster) -> Result<(), RestoreError> {
    fs::write(path, write_pbm(r)).map_err(|e| RestoreError::io(path, e))
}

fn run(cli: Cli) -> Result<(), RestoreError> {
    match cli.cmd {
        Cmd::Train { glyphs, out, tau } => {
            let set = GlyphSet::load_dir(&glyphs)?;
            let prior = train_prior(&set, tau)?;
            prior.save(&out)?;
            println!("trained on {} images of {}x{}, {} pairs retained", prior.images, prior.width, prior.height, prior.pairs.len());
        }
        Cmd::Run { model, noisy, alpha, beta, solver, seed, budget, out } => {
            if budget.is_some_and(|b| !(b > 0.0 && b.is_finite())) {
                return Err(RestoreError::Param("budget must be positive".into()));
            }
            let prior = PriorModel::load(&model)?;
            let y = read_raster(&noisy)?;
            let opts = RecipeOpts { seed, time_budget: budget.map(Duration::from_secs_f64), ..RecipeOpts::default() };
            let r = restore(&prior, &y, &RestoreParams { alpha, beta, solver, opts })?;
            println!("solver       {}", r.trace.solver);
            println!("energy       {}", r.energy);
            println!("noisy        {}", r.noisy_energy);
            println!("lower bound  {}", r.lower_bound);
            println!("beta         {}", r.beta);
            println!("factors      cr {:.3} sr {:.3} ug {:.3}", r.factors.cr, r.factors.sr, r.factors.ug);
            println!("time         {:.6}", r.trace.wall_time);
            println!("changed      {}", r.raster.hamming(&y));
            print!("{}", r.raster.to_ascii());
            if let Some(out) = out {
                write_raster(&out, &r.raster)?;
            }
        }
        Cmd::Glyphs { out, copies, seed } => {
            let paths = synthetic_glyphs(copies, seed).save_dir(&out)?;
            println!("wrote {} images to {}", paths.len(), out.display());
        }
        Cmd::Noise { input, out, p, seed } => {
            let r = read_raster(&input)?;
            write_raster(&out, &add_noise(&r, p, seed)?)?;
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
