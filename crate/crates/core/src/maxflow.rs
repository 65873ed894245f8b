//! st-mincut / maxflow.
//!
//! [`FlowNet`] is an arc arena with paired reverse arcs (`a ^ 1`), solved by
//! shortest augmenting paths in phases: a BFS layers the residual graph from
//! the source, then a depth-first search with per-node arc cursors pushes a
//! blocking flow through the layers.
//!
//! [`CutNet`] wraps a [`FlowNet`] built from a submodular [`CharGraph`] and
//! keeps one pair of terminal arcs per variable so that the modular term can
//! be swapped between solves without rebuilding the variable arcs.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::essp::ModularFn;
use crate::graph::CharGraph;

/// Residual capacities at or below this are treated as saturated.
pub const EPS: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct FlowNet {
    source: usize,
    sink: usize,
    out: Vec<Vec<usize>>,
    head: Vec<usize>,
    base: Vec<f64>,
    residual: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct MaxFlow {
    pub value: f64,
    /// `true` for nodes on the sink side of the minimum cut.
    pub sink_side: Vec<bool>,
}

impl FlowNet {
    pub fn new(num_nodes: usize, source: usize, sink: usize) -> Self {
        assert!(source < num_nodes && sink < num_nodes && source != sink);
        Self { source, sink, out: vec![Vec::new(); num_nodes], head: Vec::new(), base: Vec::new(), residual: Vec::new() }
    }

    pub fn num_nodes(&self) -> usize {
        self.out.len()
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    /// Adds arcs `u → v` and `v → u` with the given capacities and returns
    /// the id of `u → v`; the reverse arc is `id ^ 1`.
    pub fn add_edge(&mut self, u: usize, v: usize, cap_uv: f64, cap_vu: f64) -> usize {
        assert!(cap_uv >= 0.0 && cap_vu >= 0.0, "capacities must be nonnegative");
        assert!(cap_uv.is_finite() && cap_vu.is_finite(), "capacities must be finite");
        let a = self.head.len();
        self.head.extend([v, u]);
        self.base.extend([cap_uv, cap_vu]);
        self.residual.extend([cap_uv, cap_vu]);
        self.out[u].push(a);
        self.out[v].push(a + 1);
        a
    }

    pub fn add_arc(&mut self, u: usize, v: usize, cap: f64) -> usize {
        self.add_edge(u, v, cap, 0.0)
    }

    /// Replaces the capacity of one arc; takes effect at the next solve.
    pub fn set_capacity(&mut self, arc: usize, cap: f64) {
        assert!(cap >= 0.0 && cap.is_finite(), "capacities must be finite and nonnegative");
        self.base[arc] = cap;
    }

    pub fn capacity(&self, arc: usize) -> f64 {
        self.base[arc]
    }

    pub fn num_arcs(&self) -> usize {
        self.head.len()
    }

    #[inline]
    fn tail(&self, a: usize) -> usize {
        self.head[a ^ 1]
    }

    /// `(tail, head)` of arc `a`.
    pub fn endpoints(&self, a: usize) -> (usize, usize) {
        (self.tail(a), self.head[a])
    }

    /// Flow currently routed through arc `a`.
    pub fn flow(&self, a: usize) -> f64 {
        self.base[a] - self.residual[a]
    }

    /// Cut value of a side assignment, from the original capacities.
    pub fn cut_value(&self, sink_side: &[bool]) -> f64 {
        let mut cut = 0.0;
        for a in 0..self.head.len() {
            if !sink_side[self.tail(a)] && sink_side[self.head[a]] {
                cut += self.base[a];
            }
        }
        cut
    }

    /// Solves from the original capacities (any previous flow is discarded).
    pub fn max_flow(&mut self) -> MaxFlow {
        self.residual.copy_from_slice(&self.base);
        let n = self.num_nodes();
        let (s, t) = (self.source, self.sink);
        let mut level = vec![usize::MAX; n];
        let mut cur = vec![0usize; n];
        let mut value = 0.0;
        loop {
            level.iter_mut().for_each(|l| *l = usize::MAX);
            level[s] = 0;
            let mut q = VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                for &a in &self.out[u] {
                    let v = self.head[a];
                    if level[v] == usize::MAX && self.residual[a] > EPS {
                        level[v] = level[u] + 1;
                        q.push_back(v);
                    }
                }
            }
            if level[t] == usize::MAX {
                break;
            }
            cur.iter_mut().for_each(|c| *c = 0);
            let mut path: Vec<usize> = Vec::new();
            let mut u = s;
            loop {
                if u == t {
                    let delta = path.iter().map(|&a| self.residual[a]).fold(f64::INFINITY, f64::min);
                    for &a in &path {
                        self.residual[a] -= delta;
                        self.residual[a ^ 1] += delta;
                    }
                    value += delta;
                    // back up to the first saturated arc
                    let k = path.iter().position(|&a| self.residual[a] <= EPS).unwrap();
                    path.truncate(k);
                    u = if k == 0 { s } else { self.head[path[k - 1]] };
                    continue;
                }
                let mut advanced = false;
                while cur[u] < self.out[u].len() {
                    let a = self.out[u][cur[u]];
                    let v = self.head[a];
                    if self.residual[a] > EPS && level[v] == level[u] + 1 {
                        path.push(a);
                        u = v;
                        advanced = true;
                        break;
                    }
                    cur[u] += 1;
                }
                if !advanced {
                    if u == s {
                        break;
                    }
                    level[u] = usize::MAX;
                    let a = path.pop().unwrap();
                    u = self.tail(a);
                    cur[u] += 1;
                }
            }
        }
        let mut sink_side = vec![false; n];
        sink_side[t] = true;
        let mut queue = VecDeque::from([t]);
        while let Some(w) = queue.pop_front() {
            for &a in &self.out[w] {
                let v = self.head[a];
                if !sink_side[v] && v != s && self.residual[a ^ 1] > EPS {
                    sink_side[v] = true;
                    queue.push_back(v);
                }
            }
        }
        MaxFlow { value, sink_side }
    }
}

/// Min-cut solution over the variables of a [`CutNet`].
#[derive(Clone, Debug, PartialEq)]
pub struct CutSolution {
    /// Node labels; `true` means the node is on the `ō` side.
    pub labels: Vec<bool>,
    /// Minimum of `cut + const` including the modular term.
    pub energy: f64,
    pub flow: f64,
}

/// Flow network for `sub(x) + m(x)` over a graph with nonnegative variable
/// edges. Source is `o`, sink is `ō`.
#[derive(Clone, Debug)]
pub struct CutNet {
    net: FlowNet,
    n: usize,
    /// `(o → u, u → ō)` arc ids per variable.
    terminal_arcs: Vec<(usize, usize)>,
    /// `c_uo − c_uō` per variable.
    linear: Vec<f64>,
    /// Graph constant plus `Σ c_uō`.
    constant: f64,
}

impl CutNet {
    pub fn build(sub: &CharGraph) -> Result<Self> {
        let n = sub.num_vars();
        let mut net = FlowNet::new(n + 2, n, n + 1);
        let mut constant = sub.constant();
        let mut linear = Vec::with_capacity(n);
        let mut terminal_arcs = Vec::with_capacity(n);
        for u in 0..n {
            let [co, cbar] = sub.indicator(u);
            constant += cbar;
            linear.push(co - cbar);
            let from_source = net.add_arc(n, u, 0.0);
            let to_sink = net.add_arc(u, n + 1, 0.0);
            terminal_arcs.push((from_source, to_sink));
        }
        for (u, v, c) in sub.edges() {
            if c < 0.0 {
                return Err(Error::NegativeEdge { u, v, capacity: c });
            }
            net.add_edge(u, v, c, c);
        }
        Ok(Self { net, n, terminal_arcs, linear, constant })
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn flow_net(&self) -> &FlowNet {
        &self.net
    }

    /// Minimizes `sub(x) + m(x)`; `None` means `m = 0`.
    pub fn solve(&mut self, m: Option<&ModularFn>) -> CutSolution {
        let mut constant = self.constant + m.map_or(0.0, |m| m.constant);
        for u in 0..self.n {
            let w = self.linear[u] + m.map_or(0.0, |m| m.weights[u]);
            let (from_source, to_sink) = self.terminal_arcs[u];
            if w >= 0.0 {
                self.net.set_capacity(from_source, w);
                self.net.set_capacity(to_sink, 0.0);
            } else {
                // w·x = w + (−w)·(1 − x)
                constant += w;
                self.net.set_capacity(from_source, 0.0);
                self.net.set_capacity(to_sink, -w);
            }
        }
        let flow = self.net.max_flow();
        CutSolution { labels: flow.sink_side[..self.n].to_vec(), energy: flow.value + constant, flow: flow.value }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Terminal;

    #[test]
    fn diamond_network() {
        // s=0, a=1, b=2, t=3
        let mut net = FlowNet::new(4, 0, 3);
        net.add_arc(0, 1, 3.0);
        net.add_arc(0, 2, 2.0);
        net.add_arc(1, 3, 2.0);
        net.add_arc(2, 3, 3.0);
        net.add_arc(1, 2, 1.0);
        let r = net.max_flow();
        assert_eq!(r.value, 5.0);
        assert_eq!(net.cut_value(&r.sink_side), 5.0);
    }

    #[test]
    fn disconnected_sink() {
        let mut net = FlowNet::new(4, 0, 3);
        net.add_arc(0, 1, 3.0);
        net.add_edge(1, 2, 1.0, 1.0);
        let r = net.max_flow();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.sink_side, vec![false, false, false, true]);
    }

    #[test]
    fn isolated_nodes_default_to_source_side() {
        let mut net = FlowNet::new(5, 0, 1);
        net.add_arc(0, 1, 2.0);
        net.add_arc(0, 2, 1.0);
        let r = net.max_flow();
        assert_eq!(r.value, 2.0);
        assert!(!r.sink_side[3] && !r.sink_side[4] && !r.sink_side[2]);
    }

    #[test]
    fn repeated_solves_start_from_scratch() {
        let mut net = FlowNet::new(3, 0, 2);
        let a = net.add_arc(0, 1, 4.0);
        net.add_arc(1, 2, 2.0);
        assert_eq!(net.max_flow().value, 2.0);
        assert_eq!(net.max_flow().value, 2.0);
        net.set_capacity(a, 1.0);
        assert_eq!(net.max_flow().value, 1.0);
        assert_eq!(net.flow(a), 1.0);
    }

    #[test]
    fn single_variable_cutnet() {
        let mut g = CharGraph::new(1);
        g.add_indicator(0, Terminal::Zero, 3.0);
        let mut net = CutNet::build(&g).unwrap();
        let s = net.solve(None);
        assert_eq!((s.labels.clone(), s.energy), (vec![false], 0.0));

        let m = ModularFn { weights: vec![-6.0], constant: 0.0 };
        let s = net.solve(Some(&m));
        assert_eq!((s.labels, s.energy), (vec![true], -3.0));
    }

    #[test]
    fn two_node_cutnet_matches_enumeration() {
        let mut g = CharGraph::new(2);
        g.add_edge(0, 1, 2.0);
        g.add_indicator(0, Terminal::Zero, 1.0);
        g.add_indicator(1, Terminal::One, 3.0);
        g.add_constant(-3.0);
        let mut net = CutNet::build(&g).unwrap();
        let s = net.solve(None);
        let best = (0..4)
            .map(|c| g.energy(&[c & 1 == 1, c & 2 == 2]))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(s.energy, best);
        assert_eq!(g.energy(&s.labels), best);
    }

    #[test]
    fn negative_edge_rejected() {
        let mut g = CharGraph::new(2);
        g.add_edge(0, 1, -1.0);
        assert!(matches!(CutNet::build(&g), Err(Error::NegativeEdge { .. })));
    }
}
