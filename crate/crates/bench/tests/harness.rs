use std::process::Command;
use std::time::Instant;

use essp_bench::matrix::build_instances;
use essp_bench::report::{summarize, traces_csv};
use essp_bench::{emit_reports, load_results, plots_for, run_matrix, BenchConfig, BenchError, MatrixResult, SolverEntry};
use essp_core::format::read_qpbf;
use essp_core::Labeling;

fn small_config(dir: &std::path::Path) -> BenchConfig {
    BenchConfig {
        n: 30,
        instances_per_cell: 2,
        cr: vec![0.3],
        sr: vec![0.1, 0.5],
        ug: vec![0.1],
        solvers: ["bp", "bp+essp", "rand+essp", "rand+qpbo-i", "qpbo"].iter().map(|s| SolverEntry::named(s)).collect(),
        budget_secs: 5.0,
        out_dir: dir.to_path_buf(),
        seed: 17,
        ..BenchConfig::default()
    }
}

#[test]
fn one_run_respects_the_budget() {
    let cfg = BenchConfig {
        n: 300,
        instances_per_cell: 1,
        cr: vec![0.7],
        sr: vec![0.5],
        ug: vec![0.1],
        solvers: vec![SolverEntry::named("rand+qpbo-i")],
        budget_secs: 1.0,
        recipe: essp_core::recipe::RecipeOpts { qpbo_i_rounds: usize::MAX, ..Default::default() },
        ..BenchConfig::default()
    };
    let start = Instant::now();
    let result = run_matrix(&cfg).unwrap();
    assert_eq!(result.traces.len(), 1);
    let t = &result.traces[0];
    assert!(t.wall_time <= 1.2, "run took {}s", t.wall_time);
    assert!(t.samples.iter().all(|s| s.time <= 1.2));
    assert!(start.elapsed().as_secs_f64() < 30.0);
}

#[test]
fn reports_are_complete_and_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let result = run_matrix(&cfg).unwrap();
    assert_eq!(result.traces.len(), 4 * 5);
    let plots = plots_for(&result).unwrap();
    assert_eq!(plots.len(), 1 + 2 + 1);
    let written = emit_reports(dir.path(), &plots, &result).unwrap();
    assert_eq!(written.len(), 3 + plots.len());

    let csv = std::fs::read_to_string(dir.path().join("traces.csv")).unwrap();
    let rows = csv.lines().count() - 1;
    assert_eq!(rows, result.traces.iter().map(|t| t.samples.len()).sum::<usize>());

    for p in &plots {
        let svg = std::fs::read_to_string(dir.path().join(p.file_name())).unwrap();
        let doc = roxmltree::Document::parse(&svg).expect("well-formed SVG");
        assert_eq!(doc.root_element().tag_name().name(), "svg");
        let lines = doc.descendants().filter(|n| n.has_tag_name("polyline")).count();
        assert_eq!(lines, 5);
    }

    // every stored final energy re-evaluates from its labeling
    let instances = build_instances(&cfg).unwrap();
    let summary = summarize(&result);
    for run in &summary.runs {
        let inst = instances.iter().find(|i| i.info.id == run.instance).unwrap();
        let x = Labeling::parse(&run.labeling).unwrap();
        assert_eq!(inst.f.evaluate(&x).unwrap(), run.final_energy, "{} on {}", run.solver, run.instance);
    }
    let chained: Vec<_> = summary.runs.iter().filter(|r| r.solver == "bp+essp").collect();
    for c in chained {
        let bp = summary.runs.iter().find(|r| r.solver == "bp" && r.instance == c.instance).unwrap();
        assert!(c.final_energy <= bp.final_energy);
    }
    assert!(summary.cells.iter().filter(|c| c.solver == "qpbo").all(|c| c.labeled_fraction.is_some()));

    let back = load_results(dir.path()).unwrap();
    assert_eq!(back.instances, result.instances);
    for (a, b) in back.traces.iter().zip(&result.traces) {
        assert_eq!(a.samples.iter().map(|s| s.energy).collect::<Vec<_>>(), b.samples.iter().map(|s| s.energy).collect::<Vec<_>>());
        assert_eq!(a.final_energy, b.final_energy);
    }
}

fn energy_column(result: &MatrixResult) -> Vec<String> {
    let csv = String::from_utf8(traces_csv(&result.traces).unwrap()).unwrap();
    csv.lines().skip(1).map(|l| {
        let f: Vec<&str> = l.split(',').collect();
        format!("{},{},{}", f[0], f[1], f[3])
    }).collect()
}

#[test]
fn reruns_reproduce_energies() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let a = run_matrix(&cfg).unwrap();
    let b = run_matrix(&cfg).unwrap();
    assert_eq!(energy_column(&a), energy_column(&b));
    let hashes = |r: &MatrixResult| r.traces.iter().map(|t| t.labeling_hash.clone()).collect::<Vec<_>>();
    assert_eq!(hashes(&a), hashes(&b));
}

#[test]
fn empty_curve_set_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("reports");
    let result = MatrixResult { instances: Vec::new(), traces: Vec::new() };
    assert!(matches!(plots_for(&result), Err(BenchError::EmptyCurves)));
    assert!(matches!(emit_reports(&out, &[], &result), Err(BenchError::EmptyCurves)));
    assert!(!out.exists());
}

#[test]
fn cli_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.json");
    let out = dir.path().join("out");
    let cfg = BenchConfig { out_dir: out.clone(), budget_secs: 2.0, ..small_config(&out) };
    std::fs::write(&cfg_path, serde_json::to_string(&cfg).unwrap()).unwrap();

    let status = Command::new(env!("CARGO_BIN_EXE_bench")).args(["run", "--config"]).arg(&cfg_path).output().unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    assert!(out.join("traces.csv").exists() && out.join("summary.json").exists());
    let inst = out.join("instances").join("cr0.30-sr0.10-ug0.10-k0.qpbf");
    let f = read_qpbf(std::io::BufReader::new(std::fs::File::open(&inst).unwrap())).unwrap();
    assert_eq!(f.num_vars(), 30);

    let plot = Command::new(env!("CARGO_BIN_EXE_bench"))
        .args(["plot", "--traces"])
        .arg(&out)
        .args(["--factor", "sr", "--value", "0.5"])
        .output()
        .unwrap();
    assert!(plot.status.success(), "{}", String::from_utf8_lossy(&plot.stderr));
    roxmltree::Document::parse(&std::fs::read_to_string(out.join("plot_sr_0.50.svg")).unwrap()).unwrap();

    let solve = Command::new(env!("CARGO_BIN_EXE_solve"))
        .arg("--qpbf")
        .arg(&inst)
        .args(["--solver", "essp", "--init", "bp", "--seed", "4"])
        .output()
        .unwrap();
    assert!(solve.status.success());
    assert!(String::from_utf8_lossy(&solve.stdout).contains("bp+essp"));

    std::fs::write(&cfg_path, r#"{"solvers": []}"#).unwrap();
    let bad = Command::new(env!("CARGO_BIN_EXE_bench")).args(["run", "--config"]).arg(&cfg_path).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));

    let spec = dir.path().join("specs.jsonl");
    std::fs::write(&spec, "{\"n\": 12, \"cr\": 0.4, \"sr\": 0.2, \"ug\": 0.1, \"seed\": 3}\n").unwrap();
    let gen = dir.path().join("gen");
    let synth = Command::new(env!("CARGO_BIN_EXE_synth")).arg("--spec").arg(&spec).arg("--out").arg(&gen).output().unwrap();
    assert!(synth.status.success());
    assert!(gen.join("instance-0000.qpbf").exists());
    std::fs::write(&spec, "{\"n\": 4, \"cr\": 1.0, \"sr\": 0.2, \"ug\": 0.1}\n").unwrap();
    let infeasible = Command::new(env!("CARGO_BIN_EXE_synth")).arg("--spec").arg(&spec).arg("--out").arg(&gen).output().unwrap();
    assert_eq!(infeasible.status.code(), Some(2));
}
