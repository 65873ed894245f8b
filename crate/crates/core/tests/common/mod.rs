//! Instance generators and exhaustive oracles shared by the integration tests.
#![allow(dead_code)]

use essp_core::{CharGraph, Qpbf};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn coef(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(-5.0..5.0)
}

/// Arbitrary tables on a random subset of the pairs.
pub fn random_qpbf(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Qpbf {
    let mut f = Qpbf::new(n);
    f.add_constant(coef(rng)).unwrap();
    for u in 0..n {
        f.add_unary(u, [coef(rng), coef(rng)]).unwrap();
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(density) {
                f.add_pairwise(u, v, [coef(rng), coef(rng), coef(rng), coef(rng)]).unwrap();
            }
        }
    }
    f
}

/// Every pairwise table satisfies `θ00 + θ11 ≤ θ01 + θ10`.
pub fn random_submodular(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Qpbf {
    let mut f = Qpbf::new(n);
    for u in 0..n {
        f.add_unary(u, [coef(rng), coef(rng)]).unwrap();
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(density) {
                let (a, d) = (coef(rng), coef(rng));
                let b = coef(rng);
                let slack = rng.random_range(0.0..5.0);
                // a + d ≤ b + c
                let c = a + d - b + slack;
                f.add_pairwise(u, v, [a, b, c, d]).unwrap();
            }
        }
    }
    f
}

/// Random spanning tree: node `u > 0` attaches to a random earlier node.
pub fn random_tree(rng: &mut ChaCha8Rng, n: usize) -> Qpbf {
    let mut f = Qpbf::new(n);
    for u in 0..n {
        f.add_unary(u, [coef(rng), coef(rng)]).unwrap();
    }
    for u in 1..n {
        let p = rng.random_range(0..u);
        f.add_pairwise(p, u, [coef(rng), coef(rng), coef(rng), coef(rng)]).unwrap();
    }
    f
}

/// Random graph with arbitrary signed edges and indicator capacities.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, density: f64) -> CharGraph {
    CharGraph::characterize(&random_qpbf(rng, n, density))
}

/// Bit `i` of `code` is the label of variable `i`.
pub fn bits_of(code: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| code >> i & 1 == 1).collect()
}

pub fn all_labelings(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..1u64 << n).map(move |c| bits_of(c, n))
}

/// Energy by table lookup over every ordered variable pair, independent of
/// the library's accumulation.
pub fn oracle_energy(f: &Qpbf, x: &[bool]) -> f64 {
    let n = f.num_vars();
    let mut e = f.constant();
    for (u, &xu) in x.iter().enumerate() {
        let t = f.unary(u);
        e += if xu { t[1] } else { t[0] };
    }
    for u in 0..n {
        for v in u + 1..n {
            if let Some(t) = f.pairwise(u, v) {
                e += match (x[u], x[v]) {
                    (false, false) => t[0],
                    (false, true) => t[1],
                    (true, false) => t[2],
                    (true, true) => t[3],
                };
            }
        }
    }
    e
}

pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

/// Minimum energy and every labeling attaining it, by enumeration.
pub fn minimizers(f: &Qpbf) -> (f64, Vec<Vec<bool>>) {
    let n = f.num_vars();
    let energies: Vec<(Vec<bool>, f64)> = all_labelings(n)
        .map(|x| {
            let e = oracle_energy(f, &x);
            (x, e)
        })
        .collect();
    let min = energies.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let set = energies.into_iter().filter(|p| close(p.1, min)).map(|p| p.0).collect();
    (min, set)
}
