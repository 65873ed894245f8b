//! Extended submodular-supermodular procedure.
//!
//! The energy is characterized as a cut function, greedily flipped to shrink
//! its negative edges, and split into a submodular part (indicator edges and
//! nonnegative variable edges) and a supermodular part (negative variable
//! edges). Each iteration replaces the supermodular part by a modular upper
//! bound that is tight at the current labeling and minimizes the resulting
//! submodular function exactly with a min cut, so the energy never goes up.

use std::time::Duration;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::CharGraph;
use crate::maxflow::{CutNet, CutSolution};
use crate::progress::{Deadline, Progress};
use crate::qpbf::{Label, Labeling, Qpbf};

/// `const + Σ weights_u·x_u`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModularFn {
    pub weights: Vec<f64>,
    pub constant: f64,
}

impl ModularFn {
    pub fn zero(n: usize) -> Self {
        Self { weights: vec![0.0; n], constant: 0.0 }
    }

    pub fn evaluate(&self, x: &[bool]) -> f64 {
        self.constant + self.weights.iter().zip(x).filter(|(_, &b)| b).map(|(w, _)| w).sum::<f64>()
    }
}

/// Node ordering that lists every node labeled 1 before every node labeled
/// 0, so that the current 1-set is a prefix of the chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    /// Random order within the 1-group and within the 0-group.
    pub fn consistent_with<R: rand::Rng>(labels: &[bool], rng: &mut R) -> Self {
        let mut ones: Vec<usize> = (0..labels.len()).filter(|&u| labels[u]).collect();
        let mut zeros: Vec<usize> = (0..labels.len()).filter(|&u| !labels[u]).collect();
        ones.shuffle(rng);
        zeros.shuffle(rng);
        ones.extend(zeros);
        Self(ones)
    }

    pub fn from_order(order: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; order.len()];
        for &u in &order {
            if u >= order.len() || seen[u] {
                return Err(Error::VariableOutOfRange { index: u, n: order.len() });
            }
            seen[u] = true;
        }
        Ok(Self(order))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Chain (greedy) modular bound of the supermodular cut term
/// `g(S) = Σ c_uv·[exactly one of u, v in S]` over negative edges:
/// `weights[π_k] = g(W_k) − g(W_{k−1})` with `W_k = {π_1, …, π_k}`.
///
/// Because `g` is supermodular, `m(S) ≥ g(S)` for every `S`, with equality
/// on each chain set `W_k`.
pub fn modular_approximation(sup: &CharGraph, pi: &Permutation) -> ModularFn {
    let n = sup.num_vars();
    assert_eq!(pi.len(), n, "permutation length mismatch");
    let mut position = vec![0usize; n];
    for (k, &u) in pi.as_slice().iter().enumerate() {
        position[u] = k;
    }
    let mut weights = vec![0.0; n];
    for (u, v, c) in sup.edges() {
        // Adding the later endpoint uncuts the edge, adding the earlier one cuts it.
        let (first, second) = if position[u] < position[v] { (u, v) } else { (v, u) };
        weights[first] += c;
        weights[second] -= c;
    }
    ModularFn { weights, constant: 0.0 }
}

#[derive(Clone, Debug)]
pub struct EsspOptions {
    pub seed: u64,
    /// Random permutations tried per iteration.
    pub permutations: usize,
    pub max_iterations: usize,
    pub time_budget: Option<Duration>,
}

impl Default for EsspOptions {
    fn default() -> Self {
        Self { seed: 0, permutations: 5, max_iterations: 100, time_budget: None }
    }
}

#[derive(Clone, Debug)]
pub struct EsspReport {
    /// Final labeling of the original (un-flipped) variables.
    pub labeling: Labeling,
    pub energy: f64,
    /// Outer iterations run, including the final non-improving one.
    pub iterations: usize,
    /// Energy of the initial labeling followed by each accepted iterate.
    pub energies: Vec<f64>,
    /// Minimum of `sub + m` for each accepted iterate; sits between that
    /// iterate's energy and the previous one.
    pub upper_bounds: Vec<f64>,
    /// The supermodular part vanished after suppression, so the single min
    /// cut is a global minimizer.
    pub certified_optimal: bool,
    pub converged: bool,
    pub suppression_flips: usize,
    pub maxflow_calls: usize,
    /// Inner solves skipped because the modular term repeated.
    pub skipped_maxflows: usize,
}

pub fn essp_minimize(f: &Qpbf, init: &Labeling, opts: &EsspOptions) -> Result<EsspReport> {
    essp_minimize_with(f, init, opts, &mut Deadline::after(opts.time_budget))
}

pub fn essp_minimize_with(
    f: &Qpbf,
    init: &Labeling,
    opts: &EsspOptions,
    progress: &mut dyn Progress,
) -> Result<EsspReport> {
    let init = complete_bits(f, init)?;
    let graph = CharGraph::characterize(f);
    let free: Vec<usize> = (0..f.num_vars()).collect();
    Ok(run(f, graph, &free, init, opts, progress))
}

/// ESSP over the variables in `free`, the rest held at their `init` labels.
pub fn essp_refine_local(f: &Qpbf, init: &Labeling, free: &[usize], opts: &EsspOptions) -> Result<EsspReport> {
    essp_refine_local_with(f, init, free, opts, &mut Deadline::after(opts.time_budget))
}

pub fn essp_refine_local_with(
    f: &Qpbf,
    init: &Labeling,
    free: &[usize],
    opts: &EsspOptions,
    progress: &mut dyn Progress,
) -> Result<EsspReport> {
    let bits = complete_bits(f, init)?;
    let mut partial = init.clone();
    for &u in free {
        if u >= f.num_vars() {
            return Err(Error::VariableOutOfRange { index: u, n: f.num_vars() });
        }
        partial.set(u, Label::Unlabeled);
    }
    if partial.labeled_count() == 0 {
        return essp_minimize_with(f, init, opts, progress);
    }
    let simplified = CharGraph::characterize(f).simplify(&partial)?;
    Ok(run(f, simplified.graph, &simplified.free, bits, opts, progress))
}

fn complete_bits(f: &Qpbf, init: &Labeling) -> Result<Vec<bool>> {
    if init.len() != f.num_vars() {
        return Err(Error::LengthMismatch { expected: f.num_vars(), got: init.len() });
    }
    init.bits()
}

/// `graph` is over `free` (local node `i` is variable `free[i]`) and carries
/// no flips yet; `full` is a complete labeling of all variables.
fn run(
    f: &Qpbf,
    mut graph: CharGraph,
    free: &[usize],
    mut full: Vec<bool>,
    opts: &EsspOptions,
    progress: &mut dyn Progress,
) -> EsspReport {
    let initial_energy = f.energy(&full);
    progress.improved(initial_energy);
    let mut report = EsspReport {
        labeling: Labeling::from_bits(&full),
        energy: initial_energy,
        iterations: 0,
        energies: vec![initial_energy],
        upper_bounds: Vec::new(),
        certified_optimal: false,
        converged: true,
        suppression_flips: 0,
        maxflow_calls: 0,
        skipped_maxflows: 0,
    };
    if free.is_empty() {
        return report;
    }

    report.suppression_flips = graph.suppress_supermodular().flips.len();
    let (sub, sup) = graph.decompose();
    let mut net = CutNet::build(&sub).expect("decomposition leaves no negative edge in the submodular part");

    // labels in graph (flipped) space, local indexing
    let mut current: Vec<bool> = free.iter().zip(graph.flip_marks()).map(|(&u, &fl)| full[u] ^ fl).collect();
    let mut current_energy = initial_energy;
    let apply = |full: &mut Vec<bool>, local: &[bool]| {
        for ((&u, &x), &fl) in free.iter().zip(local).zip(graph.flip_marks()) {
            full[u] = x ^ fl;
        }
    };

    if sup.num_edges() == 0 {
        report.certified_optimal = true;
        report.iterations = 1;
        report.maxflow_calls = 1;
        let sol = net.solve(None);
        let mut candidate = full.clone();
        apply(&mut candidate, &sol.labels);
        let e = f.energy(&candidate);
        if e < current_energy {
            full = candidate;
            current_energy = e;
            report.energies.push(e);
            report.upper_bounds.push(sol.energy);
            progress.improved(e);
        }
        report.labeling = Labeling::from_bits(&full);
        report.energy = current_energy;
        return report;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut cache: Option<(ModularFn, CutSolution)> = None;
    report.converged = false;
    for _ in 0..opts.max_iterations {
        if progress.should_stop() {
            break;
        }
        report.iterations += 1;
        let mut best: Option<(f64, Vec<bool>, f64)> = None;
        for _ in 0..opts.permutations.max(1) {
            let pi = Permutation::consistent_with(&current, &mut rng);
            let m = modular_approximation(&sup, &pi);
            let sol = match &cache {
                Some((prev_m, prev_sol)) if *prev_m == m => {
                    report.skipped_maxflows += 1;
                    prev_sol.clone()
                }
                _ => {
                    report.maxflow_calls += 1;
                    let sol = net.solve(Some(&m));
                    cache = Some((m, sol.clone()));
                    sol
                }
            };
            let mut candidate = full.clone();
            apply(&mut candidate, &sol.labels);
            let e = f.energy(&candidate);
            if best.as_ref().is_none_or(|b| e < b.0) {
                best = Some((e, sol.labels, sol.energy));
            }
        }
        let (e, labels, bound) = best.expect("at least one permutation per iteration");
        if e < current_energy {
            current = labels;
            current_energy = e;
            apply(&mut full, &current);
            report.energies.push(e);
            report.upper_bounds.push(bound);
            progress.improved(e);
        } else {
            report.converged = true;
            break;
        }
    }
    report.labeling = Labeling::from_bits(&full);
    report.energy = current_energy;
    report
}
