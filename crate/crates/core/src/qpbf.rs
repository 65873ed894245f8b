//! Quadratic pseudo-Boolean functions.
//!
//! A [`Qpbf`] stores a constant, one unary table `(θ⁰, θ¹)` per variable and
//! a sparse set of pairwise tables `(θ⁰⁰, θ⁰¹, θ¹⁰, θ¹¹)` keyed on the
//! ordered pair `(min(u, v), max(u, v))`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    Zero,
    One,
    Unlabeled,
}

impl Label {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Label::One
        } else {
            Label::Zero
        }
    }

    pub fn bit(self) -> Option<bool> {
        match self {
            Label::Zero => Some(false),
            Label::One => Some(true),
            Label::Unlabeled => None,
        }
    }

    pub fn is_labeled(self) -> bool {
        self != Label::Unlabeled
    }
}

/// Full or partial assignment of `{0, 1}` to variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Labeling {
    values: Vec<Label>,
}

impl Labeling {
    pub fn unlabeled(n: usize) -> Self {
        Self { values: vec![Label::Unlabeled; n] }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        Self { values: bits.iter().map(|&b| Label::from_bit(b)).collect() }
    }

    pub fn from_labels(values: Vec<Label>) -> Self {
        Self { values }
    }

    /// Parses a string of `0`, `1` and `*` (unlabeled) characters.
    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(Label::Zero),
                '1' => Ok(Label::One),
                '*' => Ok(Label::Unlabeled),
                other => Err(Error::Parse { line: 1, message: format!("bad label character {other:?}") }),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::from_labels)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, u: usize) -> Label {
        self.values[u]
    }

    pub fn set(&mut self, u: usize, label: Label) {
        self.values[u] = label;
    }

    pub fn labels(&self) -> &[Label] {
        &self.values
    }

    pub fn is_complete(&self) -> bool {
        self.values.iter().all(|l| l.is_labeled())
    }

    pub fn labeled_count(&self) -> usize {
        self.values.iter().filter(|l| l.is_labeled()).count()
    }

    /// The bits of a complete labeling.
    pub fn bits(&self) -> Result<Vec<bool>> {
        self.values
            .iter()
            .enumerate()
            .map(|(u, l)| l.bit().ok_or(Error::Incomplete(u)))
            .collect()
    }

    /// Bits with every unlabeled variable set to `fill`.
    pub fn completed_with(&self, fill: bool) -> Vec<bool> {
        self.values.iter().map(|l| l.bit().unwrap_or(fill)).collect()
    }
}

impl std::fmt::Display for Labeling {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for l in &self.values {
            let c = match l {
                Label::Zero => '0',
                Label::One => '1',
                Label::Unlabeled => '*',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// General binary energy `θ_const + Σ θ_u(x_u) + Σ θ_uv(x_u, x_v)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Qpbf {
    unary: Vec<[f64; 2]>,
    pairwise: BTreeMap<(usize, usize), [f64; 4]>,
    constant: f64,
}

/// Swaps the roles of the two endpoints of a pairwise table.
pub(crate) fn transpose(t: [f64; 4]) -> [f64; 4] {
    [t[0], t[2], t[1], t[3]]
}

#[inline]
pub(crate) fn table_index(a: bool, b: bool) -> usize {
    (a as usize) << 1 | b as usize
}

impl Qpbf {
    pub fn new(n: usize) -> Self {
        Self { unary: vec![[0.0; 2]; n], pairwise: BTreeMap::new(), constant: 0.0 }
    }

    pub fn num_vars(&self) -> usize {
        self.unary.len()
    }

    pub fn num_pairs(&self) -> usize {
        self.pairwise.len()
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn add_constant(&mut self, c: f64) -> Result<()> {
        if !c.is_finite() {
            return Err(Error::NonFinite("constant".into()));
        }
        self.constant += c;
        Ok(())
    }

    fn check_var(&self, u: usize) -> Result<()> {
        if u >= self.num_vars() {
            return Err(Error::VariableOutOfRange { index: u, n: self.num_vars() });
        }
        Ok(())
    }

    /// Adds `table` to the unary term of `u`.
    pub fn add_unary(&mut self, u: usize, table: [f64; 2]) -> Result<()> {
        self.check_var(u)?;
        if table.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite(format!("unary {u}")));
        }
        self.unary[u][0] += table[0];
        self.unary[u][1] += table[1];
        Ok(())
    }

    /// Adds `table`, indexed as `θ(x_u, x_v)`, to the pairwise term of
    /// `{u, v}`. Repeated pairs are merged by summation.
    pub fn add_pairwise(&mut self, u: usize, v: usize, table: [f64; 4]) -> Result<()> {
        self.check_var(u)?;
        self.check_var(v)?;
        if u == v {
            return Err(Error::SelfPair(u));
        }
        if table.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite(format!("pair ({u}, {v})")));
        }
        let (key, table) = if u < v { ((u, v), table) } else { ((v, u), transpose(table)) };
        let slot = self.pairwise.entry(key).or_insert([0.0; 4]);
        for (s, t) in slot.iter_mut().zip(table) {
            *s += t;
        }
        Ok(())
    }

    pub fn unary(&self, u: usize) -> [f64; 2] {
        self.unary[u]
    }

    /// Pairwise table oriented as `θ(x_u, x_v)`.
    pub fn pairwise(&self, u: usize, v: usize) -> Option<[f64; 4]> {
        if u < v {
            self.pairwise.get(&(u, v)).copied()
        } else {
            self.pairwise.get(&(v, u)).copied().map(transpose)
        }
    }

    /// Pairwise tables in key order; each key has `u < v`.
    pub fn pairs(&self) -> impl Iterator<Item = ((usize, usize), [f64; 4])> + '_ {
        self.pairwise.iter().map(|(&k, &t)| (k, t))
    }

    /// Energy of a complete labeling given as bits. Panics on length mismatch.
    pub fn energy(&self, x: &[bool]) -> f64 {
        assert_eq!(x.len(), self.num_vars(), "labeling length mismatch");
        let mut e = self.constant;
        for (t, &xu) in self.unary.iter().zip(x) {
            e += t[xu as usize];
        }
        for (&(u, v), t) in &self.pairwise {
            e += t[table_index(x[u], x[v])];
        }
        e
    }

    pub fn evaluate(&self, x: &Labeling) -> Result<f64> {
        if x.len() != self.num_vars() {
            return Err(Error::LengthMismatch { expected: self.num_vars(), got: x.len() });
        }
        Ok(self.energy(&x.bits()?))
    }

    /// Expands every table into monomials `x_u` and `x_u x_v`.
    pub fn to_standard(&self) -> StdQpbf {
        let mut constant = self.constant;
        let mut linear: Vec<f64> = self.unary.iter().map(|t| t[1] - t[0]).collect();
        constant += self.unary.iter().map(|t| t[0]).sum::<f64>();
        let mut quad = BTreeMap::new();
        for (&(u, v), t) in &self.pairwise {
            let [t00, t01, t10, t11] = *t;
            constant += t00;
            linear[u] += t10 - t00;
            linear[v] += t01 - t00;
            let q = t00 - t01 - t10 + t11;
            if q != 0.0 {
                quad.insert((u, v), q);
            }
        }
        StdQpbf { linear, quad, constant }
    }

    /// Per-variable neighbour lists with tables oriented `(self, other)`.
    pub fn adjacency(&self) -> Vec<Vec<(usize, [f64; 4])>> {
        let mut adj = vec![Vec::new(); self.num_vars()];
        for (&(u, v), &t) in &self.pairwise {
            adj[u].push((v, t));
            adj[v].push((u, transpose(t)));
        }
        adj
    }

    /// Energy after fixing some variables: the returned function is over the
    /// unlabeled variables of `partial`, listed in `free` order.
    pub fn restrict(&self, partial: &Labeling) -> Result<(Qpbf, Vec<usize>)> {
        if partial.len() != self.num_vars() {
            return Err(Error::LengthMismatch { expected: self.num_vars(), got: partial.len() });
        }
        let free: Vec<usize> = (0..self.num_vars()).filter(|&u| !partial.get(u).is_labeled()).collect();
        let mut local = vec![usize::MAX; self.num_vars()];
        for (i, &u) in free.iter().enumerate() {
            local[u] = i;
        }
        let mut out = Qpbf::new(free.len());
        out.constant = self.constant;
        for (u, t) in self.unary.iter().enumerate() {
            match partial.get(u).bit() {
                None => out.unary[local[u]] = *t,
                Some(b) => out.constant += t[b as usize],
            }
        }
        for (&(u, v), t) in &self.pairwise {
            match (partial.get(u).bit(), partial.get(v).bit()) {
                (None, None) => {
                    out.pairwise.insert((local[u], local[v]), *t);
                }
                (Some(a), None) => {
                    let i = local[v];
                    out.unary[i][0] += t[table_index(a, false)];
                    out.unary[i][1] += t[table_index(a, true)];
                }
                (None, Some(b)) => {
                    let i = local[u];
                    out.unary[i][0] += t[table_index(false, b)];
                    out.unary[i][1] += t[table_index(true, b)];
                }
                (Some(a), Some(b)) => out.constant += t[table_index(a, b)],
            }
        }
        Ok((out, free))
    }
}

/// `θ_const + Σ θ_u x_u + Σ θ_uv x_u x_v`.
#[derive(Clone, Debug, PartialEq)]
pub struct StdQpbf {
    pub linear: Vec<f64>,
    pub quad: BTreeMap<(usize, usize), f64>,
    pub constant: f64,
}

impl StdQpbf {
    pub fn num_vars(&self) -> usize {
        self.linear.len()
    }

    pub fn quad(&self, u: usize, v: usize) -> f64 {
        let key = if u < v { (u, v) } else { (v, u) };
        self.quad.get(&key).copied().unwrap_or(0.0)
    }

    pub fn energy(&self, x: &[bool]) -> f64 {
        assert_eq!(x.len(), self.num_vars(), "labeling length mismatch");
        let mut e = self.constant;
        for (a, &xu) in self.linear.iter().zip(x) {
            if xu {
                e += a;
            }
        }
        for (&(u, v), b) in &self.quad {
            if x[u] && x[v] {
                e += b;
            }
        }
        e
    }

    /// Back to table form: `(0, θ_u)` unaries and `(0, 0, 0, θ_uv)` pairs.
    pub fn to_qpbf(&self) -> Qpbf {
        let mut f = Qpbf::new(self.num_vars());
        f.constant = self.constant;
        for (u, &a) in self.linear.iter().enumerate() {
            f.unary[u] = [0.0, a];
        }
        for (&(u, v), &b) in &self.quad {
            f.pairwise.insert((u, v), [0.0, 0.0, 0.0, b]);
        }
        f
    }
}

pub const BRUTE_FORCE_MAX_VARS: usize = 25;

/// Exhaustive global minimizer.
///
/// Enumerates labelings in Gray-code order with an incremental energy; any
/// labeling whose running energy comes within round-off of the incumbent is
/// re-evaluated exactly. Ties go to the labeling with the smallest integer
/// value, reading `x_0` as the least significant bit.
pub fn brute_force_min(f: &Qpbf) -> Result<(Labeling, f64)> {
    let n = f.num_vars();
    if n > BRUTE_FORCE_MAX_VARS {
        return Err(Error::TooManyVariables { n, cap: BRUTE_FORCE_MAX_VARS });
    }
    let std = f.to_standard();
    let mut coupling = vec![0.0; n * n];
    for (&(u, v), &b) in &std.quad {
        coupling[u * n + v] = b;
        coupling[v * n + u] = b;
    }
    let scale = std.constant.abs()
        + std.linear.iter().map(|a| a.abs()).sum::<f64>()
        + std.quad.values().map(|b| b.abs()).sum::<f64>();
    let tol = 1e-9 * (1.0 + scale);

    // field[i] = E(x with x_i = 1) - E(x with x_i = 0)
    let mut field = std.linear.clone();
    let mut bits = vec![false; n];
    let mut code: u64 = 0;
    let mut running = f.energy(&bits);
    let mut best_code = 0u64;
    let mut best = running;

    for k in 1u64..(1u64 << n) {
        let i = k.trailing_zeros() as usize;
        let sign = if bits[i] {
            running -= field[i];
            -1.0
        } else {
            running += field[i];
            1.0
        };
        bits[i] = !bits[i];
        code ^= 1 << i;
        let row = &coupling[i * n..(i + 1) * n];
        for (h, c) in field.iter_mut().zip(row) {
            *h += sign * c;
        }
        if running <= best + tol {
            let exact = f.energy(&bits);
            if exact < best || (exact == best && code < best_code) {
                best = exact;
                best_code = code;
            }
            // keep the running value anchored to the exact one
            running = exact;
        }
    }
    let bits: Vec<bool> = (0..n).map(|i| best_code >> i & 1 == 1).collect();
    Ok((Labeling::from_bits(&bits), best))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluate_unary_lookup() {
        let mut f = Qpbf::new(1);
        f.add_unary(0, [2.0, 5.0]).unwrap();
        f.add_constant(1.0).unwrap();
        assert_eq!(f.evaluate(&Labeling::from_bits(&[true])).unwrap(), 6.0);
    }

    #[test]
    fn evaluate_pair_lookup() {
        let mut f = Qpbf::new(2);
        f.add_pairwise(0, 1, [0.0, 3.0, 5.0, 2.0]).unwrap();
        assert_eq!(f.evaluate(&Labeling::from_bits(&[true, false])).unwrap(), 5.0);
    }

    #[test]
    fn evaluate_rejects_bad_labelings() {
        let f = Qpbf::new(2);
        assert!(matches!(
            f.evaluate(&Labeling::from_bits(&[true])),
            Err(Error::LengthMismatch { expected: 2, got: 1 })
        ));
        let partial = Labeling::from_labels(vec![Label::One, Label::Unlabeled]);
        assert!(matches!(f.evaluate(&partial), Err(Error::Incomplete(1))));
    }

    #[test]
    fn reversed_pair_is_transposed() {
        let mut f = Qpbf::new(2);
        f.add_pairwise(1, 0, [0.0, 3.0, 5.0, 2.0]).unwrap();
        // θ(x_1 = 1, x_0 = 0) = 5
        assert_eq!(f.energy(&[false, true]), 5.0);
        assert_eq!(f.pairwise(1, 0), Some([0.0, 3.0, 5.0, 2.0]));
        assert_eq!(f.pairwise(0, 1), Some([0.0, 5.0, 3.0, 2.0]));
    }

    #[test]
    fn invalid_terms_rejected() {
        let mut f = Qpbf::new(2);
        assert!(matches!(f.add_pairwise(1, 1, [0.0; 4]), Err(Error::SelfPair(1))));
        assert!(matches!(f.add_unary(2, [0.0; 2]), Err(Error::VariableOutOfRange { .. })));
        assert!(f.add_unary(0, [f64::NAN, 0.0]).is_err());
        assert!(f.add_constant(f64::INFINITY).is_err());
    }

    #[test]
    fn standard_form_of_pair() {
        let mut f = Qpbf::new(2);
        f.add_pairwise(0, 1, [0.0, 3.0, 5.0, 2.0]).unwrap();
        let s = f.to_standard();
        assert_eq!(s.quad(0, 1), -6.0);
        assert_eq!(s.linear, vec![5.0, 3.0]);
        assert_eq!(s.constant, 0.0);
        for code in 0..4 {
            let x = [code & 1 == 1, code & 2 == 2];
            assert_eq!(s.energy(&x), f.energy(&x));
        }
    }

    #[test]
    fn standard_form_of_unary_and_constant_table() {
        let mut f = Qpbf::new(2);
        f.add_unary(0, [2.0, 5.0]).unwrap();
        let s = f.to_standard();
        assert_eq!((s.linear[0], s.constant), (3.0, 2.0));

        let mut g = Qpbf::new(2);
        g.add_pairwise(0, 1, [4.0; 4]).unwrap();
        let s = g.to_standard();
        assert_eq!(s.quad(0, 1), 0.0);
        assert_eq!(s.linear, vec![0.0, 0.0]);
        assert_eq!(s.constant, 4.0);
    }

    #[test]
    fn brute_force_nonnegative_monomial() {
        let mut s = StdQpbf { linear: vec![0.0; 2], quad: BTreeMap::new(), constant: 0.0 };
        s.quad.insert((0, 1), 1.0);
        let (x, e) = brute_force_min(&s.to_qpbf()).unwrap();
        assert_eq!(e, 0.0);
        assert_eq!(x.to_string(), "00");
    }

    #[test]
    fn brute_force_frustrated_triangle_tie_break() {
        // -x1x2 - x1x3 + x2x3
        let mut s = StdQpbf { linear: vec![0.0; 3], quad: BTreeMap::new(), constant: 0.0 };
        s.quad.insert((0, 1), -1.0);
        s.quad.insert((0, 2), -1.0);
        s.quad.insert((1, 2), 1.0);
        let f = s.to_qpbf();
        let (x, e) = brute_force_min(&f).unwrap();
        assert_eq!(e, -1.0);
        // [1,1,0] = 3 beats [1,0,1] = 5
        assert_eq!(x.to_string(), "110");
        assert_eq!(f.energy(&[true, false, true]), -1.0);
    }

    #[test]
    fn brute_force_single_variable() {
        let mut f = Qpbf::new(1);
        f.add_unary(0, [4.0, -1.5]).unwrap();
        f.add_constant(2.0).unwrap();
        assert_eq!(brute_force_min(&f).unwrap().1, 0.5);
    }

    #[test]
    fn brute_force_cap() {
        assert!(matches!(brute_force_min(&Qpbf::new(26)), Err(Error::TooManyVariables { n: 26, cap: 25 })));
        let (x, e) = brute_force_min(&Qpbf::new(0)).unwrap();
        assert!(x.is_empty());
        assert_eq!(e, 0.0);
    }

    #[test]
    fn restrict_matches_fixed_energy() {
        let mut f = Qpbf::new(3);
        f.add_unary(0, [1.0, -2.0]).unwrap();
        f.add_unary(2, [0.5, 0.25]).unwrap();
        f.add_pairwise(0, 1, [0.0, 3.0, 5.0, 2.0]).unwrap();
        f.add_pairwise(1, 2, [1.0, -1.0, 4.0, 0.0]).unwrap();
        let partial = Labeling::from_labels(vec![Label::Unlabeled, Label::One, Label::Unlabeled]);
        let (g, free) = f.restrict(&partial).unwrap();
        assert_eq!(free, vec![0, 2]);
        for code in 0..4 {
            let (a, b) = (code & 1 == 1, code & 2 == 2);
            assert_eq!(g.energy(&[a, b]), f.energy(&[a, true, b]));
        }
    }

    #[test]
    fn labeling_text_round_trip() {
        let l = Labeling::parse("01*1").unwrap();
        assert_eq!(l.to_string(), "01*1");
        assert_eq!(l.labeled_count(), 3);
        assert!(!l.is_complete());
        assert_eq!(l.completed_with(false), vec![false, true, false, true]);
        assert!(Labeling::parse("012").is_err());
    }
}
