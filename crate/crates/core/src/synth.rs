//! Random instances with controlled connectivity `C_r`, supermodularity
//! ratio `S_r` and unary guidance `U_g`.
//!
//! All three factors are read off the normalized characterization, before
//! suppression:
//!
//! * `C_r = 2·e / n²`, with `e` the number of variable edges;
//! * `S_r = e⁻ / e`, the share of negative variable edges;
//! * `U_g = mean_u(mean(|c_uo|, |c_uō|)) / mean_uv(|c_uv|)`.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::CharGraph;
use crate::qpbf::Qpbf;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorSpec {
    pub n: usize,
    pub cr: f64,
    pub sr: f64,
    pub ug: f64,
    #[serde(default = "default_scale")]
    pub scale: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_scale() -> f64 {
    10.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Factors {
    pub cr: f64,
    pub sr: f64,
    pub ug: f64,
}

impl FactorSpec {
    pub fn new(n: usize, cr: f64, sr: f64, ug: f64, seed: u64) -> Self {
        Self { n, cr, sr, ug, scale: default_scale(), seed }
    }

    /// Number of variable edges the spec asks for.
    pub fn edge_count(&self) -> usize {
        (self.cr * (self.n * self.n) as f64 / 2.0).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InfeasibleSpec(m));
        if !(self.cr > 0.0 && self.cr <= 1.0) {
            return bad(format!("C_r = {} outside (0, 1]", self.cr));
        }
        if !(0.0..=1.0).contains(&self.sr) {
            return bad(format!("S_r = {} outside [0, 1]", self.sr));
        }
        if !(self.ug >= 0.0 && self.ug.is_finite()) {
            return bad(format!("U_g = {} must be finite and nonnegative", self.ug));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return bad(format!("scale = {} must be positive", self.scale));
        }
        let e = self.edge_count();
        let max = self.n * self.n.saturating_sub(1) / 2;
        if e == 0 {
            return bad(format!("C_r = {} gives no edges for n = {}", self.cr, self.n));
        }
        if e > max {
            return bad(format!("{e} edges requested but only {max} pairs exist for n = {}", self.n));
        }
        Ok(())
    }
}

/// Uniform on `(0, scale)`; zero is rejected so that no edge vanishes.
fn magnitude(rng: &mut ChaCha8Rng, scale: f64) -> f64 {
    loop {
        let m = rng.random::<f64>() * scale;
        if m > 0.0 {
            return m;
        }
    }
}

/// Unordered pair with linear index `k` in the row-major upper triangle.
fn pair_at(k: usize, n: usize) -> (usize, usize) {
    // row u holds n − 1 − u pairs
    let mut u = 0;
    let mut rest = k;
    while rest >= n - 1 - u {
        rest -= n - 1 - u;
        u += 1;
    }
    (u, u + 1 + rest)
}

/// Generates an instance in monomial form `Σ θ_u x_u + Σ θ_uv x_u x_v`.
///
/// `round(C_r·n²/2)` distinct pairs are drawn uniformly. Each quadratic
/// coefficient has magnitude `U(0, scale)`; `round(S_r·e)` of them, chosen
/// uniformly, are positive (a negative cut edge), the rest negative. The
/// indicator weights get random signs and `U(0, scale)` magnitudes, then one
/// global factor sets `U_g` exactly. The linear coefficients are those
/// indicator weights plus the linear share of the pairwise terms.
pub fn generate(spec: &FactorSpec) -> Result<Qpbf> {
    spec.validate()?;
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let e = spec.edge_count();
    let total = n * (n - 1) / 2;
    let mut chosen: Vec<usize> = index::sample(&mut rng, total, e).into_vec();
    chosen.sort_unstable();
    let supermodular = (spec.sr * e as f64).round() as usize;
    let mut is_sup = vec![false; e];
    for i in index::sample(&mut rng, e, supermodular) {
        is_sup[i] = true;
    }

    // c_uv = −θ_uv / 2
    let mut quad = Vec::with_capacity(e);
    let mut edge_mass = 0.0;
    for (i, &k) in chosen.iter().enumerate() {
        let (u, v) = pair_at(k, n);
        let m = magnitude(&mut rng, spec.scale);
        let theta = if is_sup[i] { m } else { -m };
        edge_mass += 0.5 * m;
        quad.push((u, v, theta));
    }
    let raw: Vec<f64> = (0..n)
        .map(|_| {
            let m = magnitude(&mut rng, spec.scale);
            if rng.random_bool(0.5) {
                m
            } else {
                -m
            }
        })
        .collect();
    // U_g = (mean|w|/2) / mean|c| with w = factor·raw
    let mean_raw = raw.iter().map(|r| r.abs()).sum::<f64>() / n as f64;
    let mean_edge = edge_mass / e as f64;
    let factor = if spec.ug == 0.0 { 0.0 } else { 2.0 * spec.ug * mean_edge / mean_raw };

    let mut linear: Vec<f64> = raw.iter().map(|r| factor * r).collect();
    let mut f = Qpbf::new(n);
    for &(u, v, theta) in &quad {
        // θ·x_u·x_v = −2c·x_u·x_v; the cut form adds c to each endpoint
        linear[u] -= 0.5 * theta;
        linear[v] -= 0.5 * theta;
        f.add_pairwise(u, v, [0.0, 0.0, 0.0, theta])?;
    }
    for (u, &a) in linear.iter().enumerate() {
        f.add_unary(u, [0.0, a])?;
    }
    Ok(f)
}

/// Factors of a function, measured on its normalized characterization.
pub fn measure_factors(f: &Qpbf) -> Factors {
    measure_graph(&CharGraph::characterize(f))
}

pub fn measure_graph(g: &CharGraph) -> Factors {
    let n = g.num_vars();
    let mut edges = 0usize;
    let mut negative = 0usize;
    let mut edge_mass = 0.0;
    for (_, _, c) in g.edges() {
        edges += 1;
        if c < 0.0 {
            negative += 1;
        }
        edge_mass += c.abs();
    }
    if edges == 0 || n == 0 {
        return Factors { cr: 0.0, sr: 0.0, ug: 0.0 };
    }
    let indicator_mass: f64 = (0..n)
        .map(|u| {
            let [co, cbar] = g.indicator(u);
            0.5 * (co.abs() + cbar.abs())
        })
        .sum();
    Factors {
        cr: 2.0 * edges as f64 / (n * n) as f64,
        sr: negative as f64 / edges as f64,
        ug: (indicator_mass / n as f64) / (edge_mass / edges as f64),
    }
}
