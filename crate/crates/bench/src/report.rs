use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use essp_core::recipe::{RunTrace, TraceSample};
use serde::{Deserialize, Serialize};

use crate::curves::{grid_for, marginalize, Curve, Factor};
use crate::error::{BenchError, Result};
use crate::matrix::{InstanceInfo, MatrixResult};
use crate::svg;

pub const TRACES_CSV: &str = "traces.csv";
pub const SUMMARY_JSON: &str = "summary.json";
pub const INSTANCES_JSON: &str = "instances.json";

/// Points on the shared time grid of each plot.
pub const GRID_POINTS: usize = 60;

#[derive(Clone, Debug)]
pub struct Plot {
    pub factor: Factor,
    pub value: f64,
    pub curves: Vec<Curve>,
}

impl Plot {
    pub fn file_name(&self) -> String {
        format!("plot_{}_{:.2}.svg", self.factor, self.value)
    }

    pub fn title(&self) -> String {
        format!("mean energy, {} = {}", self.factor, self.value)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    solver: String,
    instance: String,
    time: f64,
    energy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub cell: String,
    pub solver: String,
    pub runs: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labeled_fraction: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub solver: String,
    pub instance: String,
    pub seed: u64,
    pub final_energy: f64,
    pub labeling: String,
    pub labeling_hash: String,
    pub labeled_fraction: Option<f64>,
    pub wall_time: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub cells: Vec<CellSummary>,
    pub runs: Vec<RunSummary>,
}

pub fn summarize(result: &MatrixResult) -> Summary {
    let cell_of: BTreeMap<&str, String> = result.instances.iter().map(|i| (i.id.as_str(), i.cell.key())).collect();
    let mut groups: BTreeMap<(String, String), Vec<&RunTrace>> = BTreeMap::new();
    for t in &result.traces {
        let cell = cell_of.get(t.instance.as_str()).cloned().unwrap_or_default();
        groups.entry((cell, t.solver.clone())).or_default().push(t);
    }
    let cells = groups
        .into_iter()
        .map(|((cell, solver), ts)| {
            let e: Vec<f64> = ts.iter().map(|t| t.final_energy).collect();
            let fractions: Vec<f64> = ts.iter().filter_map(|t| t.labeled_fraction).collect();
            CellSummary {
                cell,
                solver,
                runs: e.len(),
                mean: e.iter().sum::<f64>() / e.len() as f64,
                min: e.iter().copied().fold(f64::INFINITY, f64::min),
                max: e.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                labeled_fraction: (!fractions.is_empty())
                    .then(|| fractions.iter().sum::<f64>() / fractions.len() as f64),
            }
        })
        .collect();
    let runs = result
        .traces
        .iter()
        .map(|t| RunSummary {
            solver: t.solver.clone(),
            instance: t.instance.clone(),
            seed: t.seed,
            final_energy: t.final_energy,
            labeling: t.labeling.clone(),
            labeling_hash: t.labeling_hash.clone(),
            labeled_fraction: t.labeled_fraction,
            wall_time: t.wall_time,
        })
        .collect();
    Summary { cells, runs }
}

/// One plot per value of each factor axis present in the instances.
pub fn plots_for(result: &MatrixResult) -> Result<Vec<Plot>> {
    let refs: Vec<&RunTrace> = result.traces.iter().collect();
    if refs.is_empty() {
        return Err(BenchError::EmptyCurves);
    }
    let grid = grid_for(&refs, GRID_POINTS);
    let mut plots = Vec::new();
    for factor in [Factor::Cr, Factor::Sr, Factor::Ug] {
        let mut values: Vec<f64> = result.instances.iter().map(|i| factor.of(i)).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for value in values {
            let curves = marginalize(&result.traces, &result.instances, factor, value, &grid)?;
            plots.push(Plot { factor, value, curves });
        }
    }
    Ok(plots)
}

fn write(dir: &Path, name: &str, contents: &[u8]) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| BenchError::io(&path, e))?;
    Ok(path)
}

pub fn traces_csv(traces: &[RunTrace]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for t in traces {
        for s in &t.samples {
            w.serialize(CsvRow { solver: t.solver.clone(), instance: t.instance.clone(), time: s.time, energy: s.energy })?;
        }
    }
    w.into_inner().map_err(|e| BenchError::io("traces.csv", e.into_error()))
}

/// Writes `traces.csv`, `summary.json`, `instances.json` and one SVG per
/// plot. Nothing is written when there is nothing to plot.
pub fn emit_reports(dir: &Path, plots: &[Plot], result: &MatrixResult) -> Result<Vec<PathBuf>> {
    if plots.is_empty() || plots.iter().any(|p| p.curves.is_empty()) {
        return Err(BenchError::EmptyCurves);
    }
    // render everything before touching the filesystem
    let csv = traces_csv(&result.traces)?;
    let summary = serde_json::to_vec_pretty(&summarize(result))?;
    let instances = serde_json::to_vec_pretty(&result.instances)?;
    let svgs: Vec<(String, String)> = plots.iter().map(|p| (p.file_name(), svg::render(&p.title(), &p.curves))).collect();

    fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
    let mut written = vec![
        write(dir, TRACES_CSV, &csv)?,
        write(dir, SUMMARY_JSON, &summary)?,
        write(dir, INSTANCES_JSON, &instances)?,
    ];
    for (name, body) in svgs {
        written.push(write(dir, &name, body.as_bytes())?);
    }
    Ok(written)
}

/// Reads back what [`emit_reports`] wrote.
pub fn load_results(dir: &Path) -> Result<MatrixResult> {
    let read = |name: &str| {
        let path = dir.join(name);
        fs::read(&path).map_err(|e| BenchError::io(&path, e))
    };
    let instances: Vec<InstanceInfo> = serde_json::from_slice(&read(INSTANCES_JSON)?)?;
    let summary: Summary = serde_json::from_slice(&read(SUMMARY_JSON)?)?;
    let mut samples: BTreeMap<(String, String), Vec<TraceSample>> = BTreeMap::new();
    let bytes = read(TRACES_CSV)?;
    for row in csv::Reader::from_reader(bytes.as_slice()).deserialize() {
        let row: CsvRow = row?;
        samples.entry((row.solver, row.instance)).or_default().push(TraceSample { time: row.time, energy: row.energy });
    }
    let traces = summary
        .runs
        .into_iter()
        .map(|r| RunTrace {
            samples: samples.remove(&(r.solver.clone(), r.instance.clone())).unwrap_or_default(),
            solver: r.solver,
            instance: r.instance,
            seed: r.seed,
            final_energy: r.final_energy,
            labeling: r.labeling,
            labeling_hash: r.labeling_hash,
            labeled_fraction: r.labeled_fraction,
            wall_time: r.wall_time,
        })
        .collect();
    Ok(MatrixResult { instances, traces })
}
