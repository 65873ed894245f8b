use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use essp_core::recipe::{RunTrace, TraceSample};
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};
use crate::matrix::InstanceInfo;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Factor {
    Cr,
    Sr,
    Ug,
}

impl Factor {
    pub fn of(self, info: &InstanceInfo) -> f64 {
        match self {
            Factor::Cr => info.cell.cr,
            Factor::Sr => info.cell.sr,
            Factor::Ug => info.cell.ug,
        }
    }
}

impl FromStr for Factor {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cr" => Ok(Factor::Cr),
            "sr" => Ok(Factor::Sr),
            "ug" => Ok(Factor::Ug),
            _ => Err(BenchError::Config(format!("unknown factor {s:?}, expected cr, sr or ug"))),
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Factor::Cr => "cr",
            Factor::Sr => "sr",
            Factor::Ug => "ug",
        })
    }
}

/// Mean energy-vs-time curve of one solver.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub solver: String,
    pub times: Vec<f64>,
    pub energies: Vec<f64>,
    /// Traces averaged into the curve.
    pub count: usize,
}

/// `points` log-spaced times from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo && points >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..points).map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp()).collect()
}

/// Grid spanning the traces: from the earliest first sample (at least a
/// microsecond) to the latest end of run.
pub fn grid_for(traces: &[&RunTrace], points: usize) -> Vec<f64> {
    let lo = traces
        .iter()
        .filter_map(|t| t.samples.first())
        .map(|s| s.time)
        .fold(f64::INFINITY, f64::min)
        .max(1e-6);
    let hi = traces.iter().map(|t| t.wall_time.max(t.elapsed())).fold(lo, f64::max);
    log_grid(lo, hi.max(lo * 1.0001), points)
}

/// Best-so-far energy at each grid time. Before the first sample the
/// first sample's energy is used.
pub fn step_resample(samples: &[TraceSample], grid: &[f64]) -> Vec<f64> {
    assert!(!samples.is_empty(), "trace without samples");
    let mut k = 0;
    grid.iter()
        .map(|&t| {
            while k + 1 < samples.len() && samples[k + 1].time <= t {
                k += 1;
            }
            samples[k].energy
        })
        .collect()
}

/// Pointwise mean per solver over the traces whose instance has
/// `factor == value`. Solvers keep their first-appearance order.
pub fn marginalize(
    traces: &[RunTrace],
    instances: &[InstanceInfo],
    factor: Factor,
    value: f64,
    grid: &[f64],
) -> Result<Vec<Curve>> {
    let by_id: BTreeMap<&str, &InstanceInfo> = instances.iter().map(|i| (i.id.as_str(), i)).collect();
    let matching: Vec<&RunTrace> = traces
        .iter()
        .filter(|t| by_id.get(t.instance.as_str()).is_some_and(|i| (factor.of(i) - value).abs() <= 1e-9))
        .filter(|t| !t.samples.is_empty())
        .collect();
    if matching.is_empty() {
        return Err(BenchError::NoMatch(format!("{factor} = {value}")));
    }
    let mut order: Vec<&str> = Vec::new();
    let mut sums: BTreeMap<&str, (Vec<f64>, usize)> = BTreeMap::new();
    for t in matching {
        let entry = sums.entry(t.solver.as_str()).or_insert_with(|| {
            order.push(t.solver.as_str());
            (vec![0.0; grid.len()], 0)
        });
        for (acc, e) in entry.0.iter_mut().zip(step_resample(&t.samples, grid)) {
            *acc += e;
        }
        entry.1 += 1;
    }
    Ok(order
        .into_iter()
        .map(|s| {
            let (sum, count) = &sums[s];
            Curve {
                solver: s.to_string(),
                times: grid.to_vec(),
                energies: sum.iter().map(|v| v / *count as f64).collect(),
                count: *count,
            }
        })
        .collect())
}
