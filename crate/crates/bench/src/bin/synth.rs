use std::io::BufRead;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use essp_bench::BenchError;
use essp_core::format::write_qpbf;
use essp_core::synth::{generate, measure_factors, FactorSpec};

/// Generate instances from a JSON-lines spec file, one instance per line.
#[derive(Parser)]
struct Cli {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn run(cli: Cli) -> Result<(), BenchError> {
    let file = std::fs::File::open(&cli.spec).map_err(|e| BenchError::io(&cli.spec, e))?;
    let mut specs = Vec::new();
    for (i, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| BenchError::io(&cli.spec, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let spec: FactorSpec =
            serde_json::from_str(&line).map_err(|e| BenchError::Config(format!("line {}: {e}", i + 1)))?;
        spec.validate().map_err(|e| BenchError::Config(format!("line {}: {e}", i + 1)))?;
        specs.push(spec);
    }
    std::fs::create_dir_all(&cli.out).map_err(|e| BenchError::io(&cli.out, e))?;
    for (i, spec) in specs.iter().enumerate() {
        let f = generate(spec)?;
        let path = cli.out.join(format!("instance-{i:04}.qpbf"));
        let file = std::fs::File::create(&path).map_err(|e| BenchError::io(&path, e))?;
        write_qpbf(&f, std::io::BufWriter::new(file))?;
        let m = measure_factors(&f);
        println!("{}\tn={}\tcr={:.4}\tsr={:.4}\tug={:.4}", path.display(), spec.n, m.cr, m.sr, m.ug);
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
