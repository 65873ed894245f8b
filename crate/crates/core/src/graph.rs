//! Undirected cut characterization of a QPBF.
//!
//! Variable nodes `0..n` plus two indicator terminals: `o`, which is on the
//! label-0 side of every cut, and `ō`, on the label-1 side. For a labeling
//! `x` the cut value is
//!
//! ```text
//! Σ_u c_uo·x_u + Σ_u c_uō·(1 − x_u) + Σ_uv c_uv·[x_u ≠ x_v]
//! ```
//!
//! and `cut + const` equals the source energy at the labeling obtained by
//! un-flipping every node whose `flipped` mark is set.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::qpbf::{Label, Labeling, Qpbf, StdQpbf};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Terminal {
    /// `o`, label 0.
    Zero,
    /// `ō`, label 1.
    One,
}

impl Terminal {
    fn slot(self) -> usize {
        match self {
            Terminal::Zero => 0,
            Terminal::One => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CharGraph {
    /// `[c_uo, c_uō]` per variable node.
    indicator: Vec<[f64; 2]>,
    /// Symmetric adjacency; each edge is stored under both endpoints.
    adj: Vec<BTreeMap<usize, f64>>,
    constant: f64,
    flipped: Vec<bool>,
}

/// Result of [`CharGraph::simplify`]: a graph over the still-free variables.
#[derive(Clone, Debug)]
pub struct Simplified {
    pub graph: CharGraph,
    /// `free[i]` is the node id in the source graph of local node `i`.
    pub free: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Suppression {
    /// Flipped nodes in the order they were flipped.
    pub flips: Vec<usize>,
}

impl CharGraph {
    pub fn new(n: usize) -> Self {
        Self {
            indicator: vec![[0.0; 2]; n],
            adj: vec![BTreeMap::new(); n],
            constant: 0.0,
            flipped: vec![false; n],
        }
    }

    /// Builds the characterization of `f` with nonnegative indicator edges.
    pub fn characterize(f: &Qpbf) -> Self {
        let mut g = Self::new(f.num_vars());
        for u in 0..f.num_vars() {
            let [t0, t1] = f.unary(u);
            g.constant += t0;
            g.indicator[u][0] += t1 - t0;
        }
        g.constant += f.constant();
        for ((u, v), [t00, t01, t10, t11]) in f.pairs() {
            g.constant += t00;
            g.indicator[u][0] += 0.5 * (t10 + t11 - t01 - t00);
            g.indicator[v][0] += 0.5 * (t01 + t11 - t00 - t10);
            g.add_edge(u, v, 0.5 * (t01 + t10 - t00 - t11));
        }
        g.normalize_indicators();
        g
    }

    pub fn num_vars(&self) -> usize {
        self.indicator.len()
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn add_constant(&mut self, c: f64) {
        self.constant += c;
    }

    pub fn indicator(&self, u: usize) -> [f64; 2] {
        self.indicator[u]
    }

    pub fn add_indicator(&mut self, u: usize, terminal: Terminal, capacity: f64) {
        self.indicator[u][terminal.slot()] += capacity;
    }

    pub fn is_flipped(&self, u: usize) -> bool {
        self.flipped[u]
    }

    pub fn flip_marks(&self) -> &[bool] {
        &self.flipped
    }

    /// Adds `capacity` to edge `{u, v}`; an edge whose capacity becomes
    /// exactly zero is removed.
    pub fn add_edge(&mut self, u: usize, v: usize, capacity: f64) {
        assert_ne!(u, v, "self-edge on node {u}");
        if capacity == 0.0 {
            return;
        }
        let c = self.adj[u].entry(v).or_insert(0.0);
        *c += capacity;
        let c = *c;
        if c == 0.0 {
            self.adj[u].remove(&v);
            self.adj[v].remove(&u);
        } else {
            self.adj[v].insert(u, c);
        }
    }

    pub fn edge(&self, u: usize, v: usize) -> Option<f64> {
        self.adj[u].get(&v).copied()
    }

    /// Each variable edge once, as `(u, v, c_uv)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, nb)| nb.range(u + 1..).map(move |(&v, &c)| (u, v, c)))
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.adj[u].iter().map(|(&v, &c)| (v, c))
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(|a| a.len()).max().unwrap_or(0)
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    /// Σ |c_uv| over negative variable edges.
    pub fn negative_mass(&self) -> f64 {
        self.edges().filter(|e| e.2 < 0.0).map(|e| -e.2).sum()
    }

    /// Σ c_uv over positive variable edges.
    pub fn positive_mass(&self) -> f64 {
        self.edges().filter(|e| e.2 > 0.0).map(|e| e.2).sum()
    }

    /// Cut value for node labels `x`; the constant is not included.
    pub fn cut_value(&self, x: &[bool]) -> f64 {
        assert_eq!(x.len(), self.num_vars(), "labeling length mismatch");
        let mut cut = 0.0;
        for (u, &[co, cbar]) in self.indicator.iter().enumerate() {
            cut += if x[u] { co } else { cbar };
        }
        for (u, v, c) in self.edges() {
            if x[u] != x[v] {
                cut += c;
            }
        }
        cut
    }

    pub fn cut_value_of(&self, x: &Labeling) -> Result<f64> {
        if x.len() != self.num_vars() {
            return Err(Error::LengthMismatch { expected: self.num_vars(), got: x.len() });
        }
        Ok(self.cut_value(&x.bits()?))
    }

    /// `cut_value + const`.
    pub fn energy(&self, x: &[bool]) -> f64 {
        self.cut_value(x) + self.constant
    }

    /// Maps node labels to labels of the source variables (and back; the
    /// map is an involution).
    pub fn unflip(&self, x: &[bool]) -> Vec<bool> {
        x.iter().zip(&self.flipped).map(|(&a, &f)| a ^ f).collect()
    }

    /// Rewrites every indicator pair `(c_uo, c_uō)` so that both entries are
    /// nonnegative and at most one is nonzero, moving the rest into the
    /// constant.
    pub fn normalize_indicators(&mut self) {
        for ind in &mut self.indicator {
            // c_uo·x + c_uō·(1 − x) = c_uō + (c_uo − c_uō)·x
            let net = ind[0] - ind[1];
            self.constant += ind[1];
            if net >= 0.0 {
                *ind = [net, 0.0];
            } else {
                // net·x = net + (−net)·(1 − x)
                self.constant += net;
                *ind = [0.0, -net];
            }
        }
    }

    /// Replaces node `u` by its complement: incident variable edges are
    /// negated and its indicator edges swap terminals.
    pub fn flip_variable(&mut self, u: usize) -> Result<()> {
        if u >= self.num_vars() {
            return Err(Error::VariableOutOfRange { index: u, n: self.num_vars() });
        }
        // c·[x_u ≠ x_v] = c − c·[x̄_u ≠ x_v]
        let nb = std::mem::take(&mut self.adj[u]);
        let mut flipped_nb = BTreeMap::new();
        for (v, c) in nb {
            self.constant += c;
            flipped_nb.insert(v, -c);
            self.adj[v].insert(u, -c);
        }
        self.adj[u] = flipped_nb;
        self.indicator[u].swap(0, 1);
        self.flipped[u] = !self.flipped[u];
        Ok(())
    }

    /// Moves the indicator edges of every node in `nodes` to the opposite
    /// terminal with negated capacity. The result may carry negative
    /// indicator capacities until [`normalize_indicators`] is called.
    ///
    /// [`normalize_indicators`]: CharGraph::normalize_indicators
    pub fn flip_indicator(&mut self, nodes: &[usize]) -> Result<()> {
        for &u in nodes {
            if u >= self.num_vars() {
                return Err(Error::VariableOutOfRange { index: u, n: self.num_vars() });
            }
            // a·x + b·(1 − x) = a + b − b·x − a·(1 − x)
            let [a, b] = self.indicator[u];
            self.constant += a + b;
            self.indicator[u] = [-b, -a];
        }
        Ok(())
    }

    fn mass_at(&self, u: usize) -> (f64, f64) {
        let mut neg = 0.0;
        let mut pos = 0.0;
        for &c in self.adj[u].values() {
            if c < 0.0 {
                neg -= c;
            } else {
                pos += c;
            }
        }
        (neg, pos)
    }

    /// Greedy supermodular suppression.
    ///
    /// The ratio of node `u` is `Σneg / Σall` over the absolute capacities
    /// of its variable edges (0 for isolated nodes). Nodes are ranked by
    /// descending ratio, lower id first on ties, and the first node above
    /// 0.5 is flipped; ratios of the node and its neighbours are refreshed
    /// and the ranking restarts. Each flip lowers the total negative mass by
    /// `Σneg_u − Σpos_u > 0`.
    ///
    /// In matrix terms this approximates `min_y yᵀC̄y` over flip vectors
    /// `y ∈ {−1, 1}ⁿ` (`C̄ = −C`, `C` the capacity matrix), equivalently
    /// `min_z zᵀC̄z + zᵀC̄1` with `z = (y + 1)/2`; the greedy pass is used
    /// because that problem is as hard as the original one.
    pub fn suppress_supermodular(&mut self) -> Suppression {
        let n = self.num_vars();
        let mut mass: Vec<(f64, f64)> = (0..n).map(|u| self.mass_at(u)).collect();
        let mut out = Suppression::default();
        loop {
            let mut pick: Option<(usize, f64)> = None;
            for (u, &(neg, pos)) in mass.iter().enumerate() {
                if neg > pos {
                    let ratio = neg / (neg + pos);
                    if pick.is_none_or(|(_, r)| ratio > r) {
                        pick = Some((u, ratio));
                    }
                }
            }
            let Some((u, _)) = pick else { break };
            self.flip_variable(u).expect("node id in range");
            out.flips.push(u);
            mass[u] = self.mass_at(u);
            let nb: Vec<usize> = self.adj[u].keys().copied().collect();
            for v in nb {
                mass[v] = self.mass_at(v);
            }
        }
        out
    }

    /// Splits into the nonnegative part (indicators, constant, edges with
    /// `c_uv ≥ 0`) and the negative variable edges.
    pub fn decompose(&self) -> (CharGraph, CharGraph) {
        let n = self.num_vars();
        let mut sub = CharGraph {
            indicator: self.indicator.clone(),
            adj: vec![BTreeMap::new(); n],
            constant: self.constant,
            flipped: self.flipped.clone(),
        };
        let mut sup = CharGraph::new(n);
        sup.flipped = self.flipped.clone();
        for (u, v, c) in self.edges() {
            if c >= 0.0 {
                sub.add_edge(u, v, c);
            } else {
                sup.add_edge(u, v, c);
            }
        }
        (sub, sup)
    }

    /// Removes the labeled nodes of `partial` (labels are node labels),
    /// folding their edges into indicator edges of their free neighbours or
    /// into the constant.
    pub fn simplify(&self, partial: &Labeling) -> Result<Simplified> {
        let n = self.num_vars();
        if partial.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: partial.len() });
        }
        let free: Vec<usize> = (0..n).filter(|&u| partial.get(u) == Label::Unlabeled).collect();
        let mut local = vec![usize::MAX; n];
        for (i, &u) in free.iter().enumerate() {
            local[u] = i;
        }
        let mut out = CharGraph::new(free.len());
        out.constant = self.constant;
        for (i, &u) in free.iter().enumerate() {
            out.indicator[i] = self.indicator[u];
            out.flipped[i] = self.flipped[u];
        }
        for u in 0..n {
            if let Some(b) = partial.get(u).bit() {
                let [co, cbar] = self.indicator[u];
                out.constant += if b { co } else { cbar };
            }
        }
        for (u, v, c) in self.edges() {
            match (partial.get(u).bit(), partial.get(v).bit()) {
                (None, None) => out.add_edge(local[u], local[v], c),
                (Some(a), None) => out.add_indicator(local[v], if a { Terminal::One } else { Terminal::Zero }, c),
                (None, Some(b)) => out.add_indicator(local[u], if b { Terminal::One } else { Terminal::Zero }, c),
                (Some(a), Some(b)) => {
                    if a != b {
                        out.constant += c;
                    }
                }
            }
        }
        out.normalize_indicators();
        Ok(Simplified { graph: out, free })
    }

    /// Monomial form of `cut + const` over node labels.
    pub fn to_standard(&self) -> StdQpbf {
        let mut constant = self.constant;
        let mut linear = Vec::with_capacity(self.num_vars());
        for &[co, cbar] in &self.indicator {
            constant += cbar;
            linear.push(co - cbar);
        }
        let mut quad = BTreeMap::new();
        for (u, v, c) in self.edges() {
            // c·(x_u + x_v − 2·x_u·x_v)
            linear[u] += c;
            linear[v] += c;
            quad.insert((u, v), -2.0 * c);
        }
        StdQpbf { linear, quad, constant }
    }

    /// Debug dump: `node`, `iedge`, `vedge` and `const` records.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for u in 0..self.num_vars() {
            writeln!(s, "node {u} flipped{}", self.flipped[u] as u8).unwrap();
        }
        for (u, &[co, cbar]) in self.indicator.iter().enumerate() {
            if co != 0.0 {
                writeln!(s, "iedge {u} o {co}").unwrap();
            }
            if cbar != 0.0 {
                writeln!(s, "iedge {u} ō {cbar}").unwrap();
            }
        }
        for (u, v, c) in self.edges() {
            writeln!(s, "vedge {u} {v} {c}").unwrap();
        }
        writeln!(s, "const {}", self.constant).unwrap();
        s
    }
}
