//! Named solver pipelines and energy-vs-time traces.
//!
//! A recipe is an optional initializer followed by one or more stages, each
//! stage starting from the previous stage's labeling:
//!
//! | name          | init | stages          |
//! |---------------|------|-----------------|
//! | `bp`          | –    | BP              |
//! | `qpbo`        | –    | QPBO            |
//! | `essp`        | rand | ESSP            |
//! | `bp+essp`     | BP   | ESSP            |
//! | `rand+essp+i` | rand | ESSP, QPBO-I    |
//! | `qpbo+essp`   | QPBO | ESSP on the unlabeled variables |
//!
//! Every stage of a run reports into the same [`TraceRecorder`], so chained
//! runs share one clock and one budget.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::baselines::{self, SolverOpts};
use crate::error::{Error, Result};
use crate::essp::{self, EsspOptions};
use crate::progress::Progress;
use crate::qpbf::{Label, Labeling, Qpbf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Init {
    Random,
    Zeros,
    Bp,
    Qpbo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Stage {
    Essp,
    QpboI,
    Icm,
    Bp,
    Qpbo,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Recipe {
    pub init: Option<Init>,
    pub stages: Vec<Stage>,
}

impl Init {
    fn parse(token: &str) -> Option<Self> {
        match token {
            "rand" | "random" => Some(Init::Random),
            "zeros" => Some(Init::Zeros),
            "bp" => Some(Init::Bp),
            "qpbo" => Some(Init::Qpbo),
            _ => None,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Init::Random => "rand",
            Init::Zeros => "zeros",
            Init::Bp => "bp",
            Init::Qpbo => "qpbo",
        }
    }
}

impl Stage {
    fn parse(token: &str) -> Option<Self> {
        match token {
            "essp" => Some(Stage::Essp),
            "i" | "qpbo-i" => Some(Stage::QpboI),
            "icm" => Some(Stage::Icm),
            "bp" => Some(Stage::Bp),
            "qpbo" => Some(Stage::Qpbo),
            _ => None,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Stage::Essp => "essp",
            Stage::QpboI => "qpbo-i",
            Stage::Icm => "icm",
            Stage::Bp => "bp",
            Stage::Qpbo => "qpbo",
        }
    }

    /// Stages that ignore any incoming labeling.
    fn standalone(self) -> bool {
        matches!(self, Stage::Bp | Stage::Qpbo)
    }
}

impl Recipe {
    pub fn new(init: Option<Init>, stages: Vec<Stage>) -> Self {
        Self { init, stages }
    }
}

impl FromStr for Recipe {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownSolver(s.to_string());
        let tokens: Vec<&str> = s.split('+').map(str::trim).collect();
        if tokens.iter().any(|t| t.is_empty()) {
            return Err(unknown());
        }
        if let [only] = tokens.as_slice() {
            let stage = Stage::parse(only).ok_or_else(unknown)?;
            let init = if stage.standalone() { None } else { Some(Init::Random) };
            return Ok(Recipe::new(init, vec![stage]));
        }
        let init = Init::parse(tokens[0]).ok_or_else(unknown)?;
        let stages = tokens[1..].iter().map(|t| Stage::parse(t)).collect::<Option<Vec<_>>>().ok_or_else(unknown)?;
        if stages.iter().any(|s| s.standalone()) {
            return Err(unknown());
        }
        Ok(Recipe::new(Some(init), stages))
    }
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<&str> = self.init.iter().map(|i| i.name()).collect();
        parts.extend(self.stages.iter().map(|s| s.name()));
        // single-stage recipes print as their stage name
        if self.stages.len() == 1 && self.init.is_none_or(|i| i == Init::Random) {
            return write!(f, "{}", self.stages[0].name());
        }
        write!(f, "{}", parts.join("+"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RecipeOpts {
    pub seed: u64,
    /// Options of standalone BP.
    pub bp: SolverOpts,
    /// BP iterations when BP is only an initializer; `None` reuses
    /// `bp.max_iterations`, which makes `bp+X` start from exactly the
    /// labeling that `bp` returns.
    pub init_bp_iterations: Option<usize>,
    pub essp_permutations: usize,
    pub essp_max_iterations: usize,
    pub qpbo_i_rounds: usize,
    pub icm_sweeps: usize,
    pub time_budget: Option<Duration>,
}

impl Default for RecipeOpts {
    fn default() -> Self {
        Self {
            seed: 0,
            bp: SolverOpts::default(),
            init_bp_iterations: None,
            essp_permutations: 5,
            essp_max_iterations: 100,
            qpbo_i_rounds: 100,
            icm_sweeps: 1000,
            time_budget: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub time: f64,
    pub energy: f64,
}

/// Best-so-far energy samples stamped with a monotonic clock.
#[derive(Debug)]
pub struct TraceRecorder {
    start: Instant,
    deadline: Option<Instant>,
    best: f64,
    samples: Vec<TraceSample>,
}

impl TraceRecorder {
    pub fn start(budget: Option<Duration>) -> Self {
        let start = Instant::now();
        Self { start, deadline: budget.map(|b| start + b), best: f64::INFINITY, samples: Vec::new() }
    }

    pub fn elapsed(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }

    pub fn samples(&self) -> &[TraceSample] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<TraceSample> {
        self.samples
    }
}

impl Progress for TraceRecorder {
    fn improved(&mut self, energy: f64) {
        if energy < self.best {
            self.best = energy;
            let time = self.elapsed();
            self.samples.push(TraceSample { time, energy });
        }
    }

    fn should_stop(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub solver: String,
    pub instance: String,
    pub seed: u64,
    pub samples: Vec<TraceSample>,
    pub final_energy: f64,
    /// Final labeling as a `0`/`1` string.
    pub labeling: String,
    pub labeling_hash: String,
    /// Share of variables labeled by roof duality, for recipes that run it.
    pub labeled_fraction: Option<f64>,
    /// Seconds from start to the end of the last stage.
    pub wall_time: f64,
}

impl RunTrace {
    pub fn elapsed(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.time)
    }
}

pub fn labeling_hash(x: &Labeling) -> String {
    let digest = Sha256::digest(x.to_string().as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Mixes a master seed with a tag into an independent stream seed.
pub fn derive_seed(master: u64, tag: u64) -> u64 {
    // splitmix64 finalizer over the combined word
    let mut z = master ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0x632B_E59B_D9B3_E7D9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug)]
pub struct RecipeOutcome {
    pub labeling: Labeling,
    pub energy: f64,
    pub labeled_fraction: Option<f64>,
}

/// Runs `recipe` on `f`. `init_override` replaces the recipe's initializer
/// (restoration starts from the noisy image, for instance).
pub fn run_recipe(
    f: &Qpbf,
    recipe: &Recipe,
    opts: &RecipeOpts,
    init_override: Option<&Labeling>,
    progress: &mut dyn Progress,
) -> Result<RecipeOutcome> {
    let n = f.num_vars();
    let mut labeled_fraction = None;
    // variables certified by roof duality stay fixed in later ESSP stages
    let mut certified: Option<Labeling> = None;
    let mut current: Option<Labeling> = match (init_override, recipe.init) {
        (Some(x), _) => {
            if x.len() != n {
                return Err(Error::LengthMismatch { expected: n, got: x.len() });
            }
            let e = f.evaluate(x)?;
            progress.improved(e);
            Some(x.clone())
        }
        (None, None) => None,
        (None, Some(Init::Random)) => {
            let x = baselines::random_labeling(n, derive_seed(opts.seed, 1));
            progress.improved(f.evaluate(&x)?);
            Some(x)
        }
        (None, Some(Init::Zeros)) => {
            let x = Labeling::from_bits(&vec![false; n]);
            progress.improved(f.evaluate(&x)?);
            Some(x)
        }
        (None, Some(Init::Bp)) => {
            let bp = SolverOpts {
                max_iterations: opts.init_bp_iterations.unwrap_or(opts.bp.max_iterations),
                ..opts.bp.clone()
            };
            Some(baselines::bp_min_sum_with(f, &bp, progress)?.0)
        }
        (None, Some(Init::Qpbo)) => {
            let partial = baselines::qpbo(f);
            labeled_fraction = Some(fraction(&partial));
            let x = Labeling::from_bits(&partial.completed_with(false));
            progress.improved(f.evaluate(&x)?);
            certified = Some(partial);
            Some(x)
        }
    };

    for (k, stage) in recipe.stages.iter().enumerate() {
        let seed = derive_seed(opts.seed, 100 + k as u64);
        let next = match stage {
            Stage::Bp => baselines::bp_min_sum_with(f, &opts.bp, progress)?.0,
            Stage::Qpbo => {
                let partial = baselines::qpbo(f);
                labeled_fraction = Some(fraction(&partial));
                let x = Labeling::from_bits(&partial.completed_with(false));
                progress.improved(f.evaluate(&x)?);
                x
            }
            Stage::Essp => {
                let x = current.as_ref().expect("ESSP stage has an initial labeling");
                let eo = EsspOptions {
                    seed,
                    permutations: opts.essp_permutations,
                    max_iterations: opts.essp_max_iterations,
                    time_budget: None,
                };
                match certified.take() {
                    Some(partial) if partial.labeled_count() > 0 => {
                        let free: Vec<usize> =
                            (0..n).filter(|&u| partial.get(u) == Label::Unlabeled).collect();
                        essp::essp_refine_local_with(f, x, &free, &eo, progress)?.labeling
                    }
                    _ => essp::essp_minimize_with(f, x, &eo, progress)?.labeling,
                }
            }
            Stage::QpboI => {
                let x = current.as_ref().expect("QPBO-I stage has an initial labeling");
                let so = SolverOpts { seed, max_iterations: opts.qpbo_i_rounds, ..opts.bp.clone() };
                baselines::qpbo_improve_with(f, x, &so, progress)?.0
            }
            Stage::Icm => {
                let x = current.as_ref().expect("ICM stage has an initial labeling");
                let so = SolverOpts { seed, max_iterations: opts.icm_sweeps, ..opts.bp.clone() };
                baselines::icm_with(f, x, &so, progress)?.0
            }
        };
        current = Some(next);
    }
    let labeling = current.expect("a recipe has at least one stage");
    let energy = f.evaluate(&labeling)?;
    Ok(RecipeOutcome { labeling, energy, labeled_fraction })
}

fn fraction(x: &Labeling) -> f64 {
    if x.is_empty() {
        1.0
    } else {
        x.labeled_count() as f64 / x.len() as f64
    }
}

/// Runs a recipe under its own recorder and packages the trace.
pub fn trace_recipe(
    f: &Qpbf,
    recipe: &Recipe,
    opts: &RecipeOpts,
    instance: &str,
    init_override: Option<&Labeling>,
) -> Result<RunTrace> {
    let mut recorder = TraceRecorder::start(opts.time_budget);
    let out = run_recipe(f, recipe, opts, init_override, &mut recorder)?;
    // the final labeling is always the best one seen
    recorder.improved(out.energy);
    let recorder_end = recorder.elapsed();
    Ok(RunTrace {
        solver: recipe.to_string(),
        instance: instance.to_string(),
        seed: opts.seed,
        samples: recorder.into_samples(),
        final_energy: out.energy,
        labeling: out.labeling.to_string(),
        labeling_hash: labeling_hash(&out.labeling),
        labeled_fraction: out.labeled_fraction,
        wall_time: recorder_end,
    })
}
