//! Reference solvers: random labelings, ICM, min-sum loopy BP, roof duality
//! (QPBO) and its iterated improvement variant (QPBO-I).

use std::time::Duration;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::CharGraph;
use crate::maxflow::FlowNet;
use crate::progress::{Deadline, Progress};
use crate::qpbf::{table_index, Label, Labeling, Qpbf, StdQpbf};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOpts {
    pub seed: u64,
    pub max_iterations: usize,
    /// Weight of the previous message in BP updates, in `[0, 1)`.
    pub damping: f64,
    pub time_budget: Option<Duration>,
}

impl Default for SolverOpts {
    fn default() -> Self {
        Self { seed: 0, max_iterations: 500, damping: 0.5, time_budget: None }
    }
}

impl SolverOpts {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.damping) {
            return Err(Error::InfeasibleSpec(format!("damping {} outside [0, 1)", self.damping)));
        }
        if self.time_budget.is_some_and(|b| b.is_zero()) {
            return Err(Error::InfeasibleSpec("time budget must be positive".into()));
        }
        Ok(())
    }
}

/// Fair iid bits from a seeded generator.
pub fn random_labeling(n: usize, seed: u64) -> Labeling {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bits: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
    Labeling::from_bits(&bits)
}

fn init_bits(f: &Qpbf, init: &Labeling) -> Result<Vec<bool>> {
    if init.len() != f.num_vars() {
        return Err(Error::LengthMismatch { expected: f.num_vars(), got: init.len() });
    }
    init.bits()
}

/// Iterated conditional modes: sweeps in index order, moving each variable
/// to its conditional minimizer (keeping it on ties), until a sweep changes
/// nothing. `max_iterations` caps the number of sweeps.
pub fn icm(f: &Qpbf, init: &Labeling, opts: &SolverOpts) -> Result<(Labeling, f64)> {
    icm_with(f, init, opts, &mut Deadline::after(opts.time_budget))
}

pub fn icm_with(
    f: &Qpbf,
    init: &Labeling,
    opts: &SolverOpts,
    progress: &mut dyn Progress,
) -> Result<(Labeling, f64)> {
    let mut x = init_bits(f, init)?;
    let adj = f.adjacency();
    let mut energy = f.energy(&x);
    progress.improved(energy);
    for _ in 0..opts.max_iterations {
        if progress.should_stop() {
            break;
        }
        let mut changed = false;
        for u in 0..x.len() {
            let mut local = f.unary(u);
            for &(v, t) in &adj[u] {
                local[0] += t[table_index(false, x[v])];
                local[1] += t[table_index(true, x[v])];
            }
            let cur = x[u] as usize;
            if local[1 - cur] < local[cur] {
                x[u] = !x[u];
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let e = f.energy(&x);
        if e < energy {
            energy = e;
            progress.improved(e);
        }
    }
    let energy = f.energy(&x);
    Ok((Labeling::from_bits(&x), energy))
}

/// Min-sum loopy belief propagation with synchronous damped updates.
///
/// Messages are normalized by subtracting their minimum. Each iteration
/// decodes every variable by its minimum belief (0 on ties); the
/// lowest-energy decoding seen is returned. Stops after `max_iterations`,
/// when the largest message change drops below `1e-6`, or when `progress`
/// asks to stop.
pub fn bp_min_sum(f: &Qpbf, opts: &SolverOpts) -> Result<(Labeling, f64)> {
    bp_min_sum_with(f, opts, &mut Deadline::after(opts.time_budget))
}

pub fn bp_min_sum_with(f: &Qpbf, opts: &SolverOpts, progress: &mut dyn Progress) -> Result<(Labeling, f64)> {
    opts.validate()?;
    let n = f.num_vars();
    let pairs: Vec<((usize, usize), [f64; 4])> = f.pairs().collect();
    // to_v[e]: message u → v over x_v; to_u[e]: message v → u over x_u
    let mut to_v = vec![[0.0f64; 2]; pairs.len()];
    let mut to_u = vec![[0.0f64; 2]; pairs.len()];
    let unary: Vec<[f64; 2]> = (0..n).map(|u| f.unary(u)).collect();
    let mut incoming = vec![[0.0f64; 2]; n];
    let damping = opts.damping;

    let decode = |incoming: &[[f64; 2]]| -> Vec<bool> {
        (0..n).map(|u| unary[u][1] + incoming[u][1] < unary[u][0] + incoming[u][0]).collect()
    };
    let mut best_x = decode(&incoming);
    let mut best_e = f.energy(&best_x);
    progress.improved(best_e);

    for _ in 0..opts.max_iterations {
        if progress.should_stop() {
            break;
        }
        let mut delta: f64 = 0.0;
        for (e, &((u, v), t)) in pairs.iter().enumerate() {
            let hu = [
                unary[u][0] + incoming[u][0] - to_u[e][0],
                unary[u][1] + incoming[u][1] - to_u[e][1],
            ];
            let hv = [
                unary[v][0] + incoming[v][0] - to_v[e][0],
                unary[v][1] + incoming[v][1] - to_v[e][1],
            ];
            let mut mv = [0.0; 2];
            let mut mu = [0.0; 2];
            for b in 0..2 {
                mv[b] = (hu[0] + t[b]).min(hu[1] + t[2 + b]);
            }
            for a in 0..2 {
                mu[a] = (hv[0] + t[2 * a]).min(hv[1] + t[2 * a + 1]);
            }
            for msg in [&mut mv, &mut mu] {
                let lo = msg[0].min(msg[1]);
                msg[0] -= lo;
                msg[1] -= lo;
            }
            for (old, new) in [(&mut to_v[e], mv), (&mut to_u[e], mu)] {
                for k in 0..2 {
                    let damped = damping * old[k] + (1.0 - damping) * new[k];
                    delta = delta.max((damped - old[k]).abs());
                    old[k] = damped;
                }
            }
        }
        incoming.iter_mut().for_each(|m| *m = [0.0; 2]);
        for (e, &((u, v), _)) in pairs.iter().enumerate() {
            incoming[v][0] += to_v[e][0];
            incoming[v][1] += to_v[e][1];
            incoming[u][0] += to_u[e][0];
            incoming[u][1] += to_u[e][1];
        }
        let x = decode(&incoming);
        let e = f.energy(&x);
        if e < best_e {
            best_e = e;
            best_x = x;
            progress.improved(e);
        }
        if delta < 1e-6 {
            break;
        }
    }
    Ok((Labeling::from_bits(&best_x), best_e))
}

/// Roof duality on a function in standard form.
///
/// Builds the doubled network with a node for `x_u` and one for `x̄_u`,
/// splitting every monomial in half so that each half is submodular in the
/// doubled variables, and solves one min cut. Variables whose two copies
/// disagree are labeled; the rest are [`Label::Unlabeled`].
pub fn qpbo_standard(f: &StdQpbf) -> Vec<Label> {
    let n = f.num_vars();
    let (s, t) = (2 * n, 2 * n + 1);
    let mut net = FlowNet::new(2 * n + 2, s, t);
    let y = |u: usize| u;
    let z = |u: usize| n + u;

    // coef·[node = 1]
    fn linear(net: &mut FlowNet, node: usize, coef: f64) {
        let (s, t) = (net.source(), net.sink());
        if coef > 0.0 {
            net.add_arc(s, node, coef);
        } else if coef < 0.0 {
            net.add_arc(node, t, -coef);
        }
    }
    for (u, &a) in f.linear.iter().enumerate() {
        // ½a·y_u + ½a·(1 − z_u)
        linear(&mut net, y(u), 0.5 * a);
        linear(&mut net, z(u), -0.5 * a);
    }
    for (&(u, v), &b) in &f.quad {
        let h = 0.5 * b;
        if b < 0.0 {
            // h·y_u·y_v = h·y_u + (−h)·[y_u = 1, y_v = 0]
            linear(&mut net, y(u), h);
            net.add_arc(y(v), y(u), -h);
            // h·(1 − z_u)(1 − z_v) = h·(1 − z_u) + (−h)·[z_u = 0, z_v = 1]
            linear(&mut net, z(u), -h);
            net.add_arc(z(u), z(v), -h);
        } else if b > 0.0 {
            // h·y_u·(1 − z_v) + h·(1 − z_u)·y_v
            net.add_arc(z(v), y(u), h);
            net.add_arc(z(u), y(v), h);
        }
    }
    let cut = net.max_flow();
    (0..n)
        .map(|u| {
            let (yu, zu) = (cut.sink_side[y(u)], cut.sink_side[z(u)]);
            if yu != zu {
                Label::from_bit(yu)
            } else {
                Label::Unlabeled
            }
        })
        .collect()
}

/// Roof-duality partial labeling. Every labeled variable agrees with some
/// global minimizer.
pub fn qpbo(f: &Qpbf) -> Labeling {
    Labeling::from_labels(qpbo_standard(&f.to_standard()))
}

/// QPBO-I. The first round runs roof duality on the whole function; each
/// later round holds a random half of the variables at their current labels
/// and runs it on the rest. Labeled variables are copied into the current
/// labeling whenever that does not increase the energy.
pub fn qpbo_improve(f: &Qpbf, init: &Labeling, opts: &SolverOpts) -> Result<(Labeling, f64)> {
    qpbo_improve_with(f, init, opts, &mut Deadline::after(opts.time_budget))
}

pub fn qpbo_improve_with(
    f: &Qpbf,
    init: &Labeling,
    opts: &SolverOpts,
    progress: &mut dyn Progress,
) -> Result<(Labeling, f64)> {
    let mut x = init_bits(f, init)?;
    let n = x.len();
    let mut energy = f.energy(&x);
    progress.improved(energy);
    let graph = CharGraph::characterize(f);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut order: Vec<usize> = (0..n).collect();
    for round in 0..opts.max_iterations {
        if progress.should_stop() {
            break;
        }
        let mut partial = Labeling::unlabeled(n);
        if round > 0 {
            order.shuffle(&mut rng);
            for &u in &order[..n / 2] {
                partial.set(u, Label::from_bit(x[u]));
            }
        }
        let simplified = graph.simplify(&partial)?;
        let labels = qpbo_standard(&simplified.graph.to_standard());
        let mut candidate = x.clone();
        let mut touched = false;
        for (i, l) in labels.iter().enumerate() {
            if let Some(b) = l.bit() {
                touched |= candidate[simplified.free[i]] != b;
                candidate[simplified.free[i]] = b;
            }
        }
        if !touched {
            continue;
        }
        let e = f.energy(&candidate);
        if e <= energy {
            x = candidate;
            if e < energy {
                progress.improved(e);
            }
            energy = e;
        }
    }
    Ok((Labeling::from_bits(&x), energy))
}
