use essp_core::recipe::{derive_seed, trace_recipe, RecipeOpts, RunTrace};
use essp_core::synth::{generate, measure_factors, FactorSpec, Factors};
use essp_core::Qpbf;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{BenchConfig, Cell};
use crate::error::{BenchError, Result};

/// Worker cap from `QPBF_THREADS`; `None` lets rayon decide.
pub fn thread_cap() -> Option<usize> {
    std::env::var("QPBF_THREADS").ok()?.trim().parse().ok().filter(|&n: &usize| n > 0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceInfo {
    pub id: String,
    pub cell: Cell,
    pub spec: FactorSpec,
    pub measured: Factors,
}

pub struct Instance {
    pub info: InstanceInfo,
    pub f: Qpbf,
}

#[derive(Clone, Debug)]
pub struct MatrixResult {
    pub instances: Vec<InstanceInfo>,
    pub traces: Vec<RunTrace>,
}

/// Generates every instance of the grid. Instance seeds depend only on the
/// master seed and the instance position.
pub fn build_instances(cfg: &BenchConfig) -> Result<Vec<Instance>> {
    let mut specs = Vec::new();
    for (c, cell) in cfg.cells().into_iter().enumerate() {
        for k in 0..cfg.instances_per_cell {
            let seed = derive_seed(cfg.seed, (c * cfg.instances_per_cell + k) as u64);
            let spec = FactorSpec { scale: cfg.scale, ..FactorSpec::new(cfg.n, cell.cr, cell.sr, cell.ug, seed) };
            specs.push((format!("{}-k{k}", cell.key()), cell, spec));
        }
    }
    with_pool(|| {
        specs
            .into_par_iter()
            .map(|(id, cell, spec)| {
                let f = generate(&spec)?;
                let measured = measure_factors(&f);
                Ok(Instance { info: InstanceInfo { id, cell, spec, measured }, f })
            })
            .collect()
    })
}

/// Runs every solver on every instance, one single-threaded run per job.
/// Traces come back ordered by instance, then solver.
pub fn run_instances(cfg: &BenchConfig, instances: &[Instance]) -> Result<Vec<RunTrace>> {
    let recipes = cfg.recipes()?;
    let jobs: Vec<(usize, usize)> =
        (0..instances.len()).flat_map(|i| (0..recipes.len()).map(move |s| (i, s))).collect();
    with_pool(|| {
        jobs.into_par_iter()
            .map(|(i, s)| {
                let base = cfg.solvers[s].opts.as_ref().unwrap_or(&cfg.recipe);
                // all solvers on an instance share its run seed, so `rand+X`
                // recipes start from the same labeling
                let opts = RecipeOpts {
                    seed: derive_seed(cfg.seed ^ 0x5EED, i as u64),
                    time_budget: Some(cfg.budget()),
                    ..base.clone()
                };
                let inst = &instances[i];
                let mut trace = trace_recipe(&inst.f, &recipes[s], &opts, &inst.info.id, None)?;
                trace.solver = cfg.solvers[s].name.clone();
                Ok(trace)
            })
            .collect()
    })
}

pub fn run_matrix(cfg: &BenchConfig) -> Result<MatrixResult> {
    cfg.validate()?;
    let instances = build_instances(cfg)?;
    let traces = run_instances(cfg, &instances)?;
    Ok(MatrixResult { instances: instances.into_iter().map(|i| i.info).collect(), traces })
}

fn with_pool<T: Send>(job: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| BenchError::Config(format!("thread pool: {e}")))?;
    pool.install(job)
}
