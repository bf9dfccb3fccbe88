//! Contraction banks of the node-based and edge-based prototypical models and
//! the greedy computability decision.
//!
//! A node outside the red pair can be contracted when it has at most one
//! (node bank) or two (edge bank) distinct neighbors. [`decide`] contracts
//! such nodes, lowest index first, recording every primitive as a tensor
//! operation on numbered slots. The resulting [`ContractionPlan`] is
//! executable (see `eval::execute_contraction_plan`) and tracks edge
//! orientation exactly, so it is sound on non-symmetric data too.

mod treewidth;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::enumerate::{enumerate_basis, DataMode, EnumerationSpec, KindFilter};
use crate::error::Result;
use crate::multigraph::MultiGraphH;
use crate::par;

pub use treewidth::treewidth;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Node,
    Edge,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Node => "node",
            Model::Edge => "edge",
        })
    }
}

/// Primitive labels, numbered per bank.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Primitive {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
    C7,
    /// Assembling the output from what is left on the red pair.
    Readout,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bank {
    pub model: Model,
    pub primitives: Vec<Primitive>,
    pub neighbor_limit: usize,
}

impl Bank {
    pub fn node() -> Self {
        use Primitive::*;
        Self {
            model: Model::Node,
            primitives: vec![C1, C2, C3, C4],
            neighbor_limit: 1,
        }
    }

    pub fn edge() -> Self {
        use Primitive::*;
        Self {
            model: Model::Edge,
            primitives: vec![C1, C2, C3, C4, C5, C6, C7],
            neighbor_limit: 2,
        }
    }

    pub fn for_model(model: Model) -> Self {
        match model {
            Model::Node => Self::node(),
            Model::Edge => Self::edge(),
        }
    }
}

/// Dense operation of one step. Vectors are loops (diagonals), matrices are
/// edges `s -> d` indexed `[i_s, i_d]`, scalars are detached factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TensorOp {
    /// Elementwise product of two same-shaped inputs.
    Hadamard,
    Transpose,
    /// `y[i] = sum_k M[i,k] w[k]`, or `sum_k M[k,i] w[k]` when transposed;
    /// `w` is the optional second input, all-ones otherwise.
    MatVec { transpose: bool },
    /// `Z[i,j] = y[i]`.
    RowBroadcast,
    MatMul,
    /// Sum of a vector's entries (or `n` with no input).
    Total,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanStep {
    pub primitive: Primitive,
    /// Node the step acts on (the contracted node for eliminations).
    pub node: usize,
    pub op: TensorOp,
    pub inputs: Vec<usize>,
    pub output: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Terminal {
    /// Product of the scalar slots.
    Scalar,
    /// Diagonal vector at the red node; all-ones when `None`.
    Node(Option<usize>),
    /// Matrix `a -> b`; all-ones when `None`.
    Edge(Option<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractionPlan {
    /// Slot `i < inputs.len()` holds `X` (edge) or `diag(X)` (loop) for black
    /// edge `inputs[i]` of the decided graph.
    pub inputs: Vec<(usize, usize)>,
    pub steps: Vec<PlanStep>,
    /// Scalar slots multiplied into the output.
    pub scalars: Vec<usize>,
    pub terminal: Terminal,
}

impl ContractionPlan {
    pub fn num_slots(&self) -> usize {
        self.inputs.len() + self.steps.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub computable: bool,
    pub plan: Option<ContractionPlan>,
    /// Irreducible remainder when not computable.
    pub stuck: Option<MultiGraphH>,
}

/// Number of distinct neighbors of `v` (self-loops do not count).
pub fn neighbor_count(h: &MultiGraphH, v: usize) -> usize {
    h.neighbor_count(v)
}

struct State {
    model: Model,
    m: usize,
    alive: Vec<bool>,
    red: Option<(usize, usize)>,
    /// `(src, dst, slot)`; loops have `src == dst`.
    edges: Vec<(usize, usize, usize)>,
    inputs: Vec<(usize, usize)>,
    steps: Vec<PlanStep>,
    scalars: Vec<usize>,
}

impl State {
    fn new(h: &MultiGraphH, model: Model) -> Self {
        let inputs: Vec<(usize, usize)> = h
            .edges()
            .iter()
            .map(|&(s, d)| (s as usize, d as usize))
            .collect();
        Self {
            model,
            m: h.num_nodes(),
            alive: vec![true; h.num_nodes()],
            red: h.red(),
            edges: inputs.iter().enumerate().map(|(i, &(s, d))| (s, d, i)).collect(),
            inputs,
            steps: Vec::new(),
            scalars: Vec::new(),
        }
    }

    fn emit(&mut self, primitive: Primitive, node: usize, op: TensorOp, inputs: Vec<usize>) -> usize {
        let output = self.inputs.len() + self.steps.len();
        self.steps.push(PlanStep {
            primitive,
            node,
            op,
            inputs,
            output,
        });
        output
    }

    fn is_red(&self, v: usize) -> bool {
        matches!(self.red, Some((a, b)) if a == v || b == v)
    }

    fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(s, d, _)| match (s == v, d == v) {
                (true, false) => Some(d),
                (false, true) => Some(s),
                _ => None,
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    fn take_edges(&mut self, pred: impl Fn(usize, usize) -> bool) -> Vec<(usize, usize, usize)> {
        let (taken, kept): (Vec<_>, Vec<_>) = self.edges.iter().partition(|&&(s, d, _)| pred(s, d));
        self.edges = kept;
        taken
    }

    fn eligible(&self, v: usize) -> bool {
        if !self.alive[v] || self.is_red(v) {
            return false;
        }
        let nb = self.neighbors(v);
        match self.model {
            Model::Node => match nb.as_slice() {
                [] => true,
                [u] => {
                    self.edges
                        .iter()
                        .filter(|&&(s, d, _)| (s, d) == (v, *u) || (s, d) == (*u, v))
                        .count()
                        == 1
                }
                _ => false,
            },
            Model::Edge => nb.len() <= 2,
        }
    }

    /// C2: fold all loops at `v` into one slot.
    fn collapse_loops(&mut self, v: usize, tag: Primitive) -> Option<usize> {
        let loops = self.take_edges(|s, d| s == v && d == v);
        let mut it = loops.into_iter().map(|(_, _, slot)| slot);
        let first = it.next()?;
        let slot = it.fold(first, |acc, s| self.emit(tag, v, TensorOp::Hadamard, vec![acc, s]));
        self.edges.push((v, v, slot));
        Some(slot)
    }

    /// C6 then C5: all edges between `v` and `w` as one edge `v -> w`.
    fn orient_and_merge(&mut self, v: usize, w: usize, readout: bool) -> Option<usize> {
        let (flip, merge) = if readout {
            (Primitive::Readout, Primitive::Readout)
        } else {
            (Primitive::C6, Primitive::C5)
        };
        let between = self.take_edges(|s, d| (s, d) == (v, w) || (s, d) == (w, v));
        let mut slots = Vec::with_capacity(between.len());
        for (s, _, slot) in between {
            slots.push(if s == v {
                slot
            } else {
                self.emit(flip, v, TensorOp::Transpose, vec![slot])
            });
        }
        let mut it = slots.into_iter();
        let first = it.next()?;
        let slot = it.fold(first, |acc, s| self.emit(merge, v, TensorOp::Hadamard, vec![acc, s]));
        self.edges.push((v, w, slot));
        Some(slot)
    }

    fn remove_node(&mut self, v: usize) {
        debug_assert!(self.edges.iter().all(|&(s, d, _)| s != v && d != v));
        self.alive[v] = false;
    }

    fn contract(&mut self, v: usize) {
        match self.model {
            Model::Node => self.contract_node_bank(v),
            Model::Edge => self.contract_edge_bank(v),
        }
        self.remove_node(v);
    }

    fn contract_node_bank(&mut self, v: usize) {
        let weight = self.collapse_loops(v, Primitive::C2);
        self.take_edges(|s, d| s == v && d == v);
        match self.neighbors(v).as_slice() {
            [] => {
                let s = self.emit(Primitive::C1, v, TensorOp::Total, weight.into_iter().collect());
                self.scalars.push(s);
            }
            &[u] => {
                let (s, d, slot) = self.take_edges(|s, d| (s, d) == (v, u) || (s, d) == (u, v))[0];
                debug_assert!(s != d);
                let mut inputs = vec![slot];
                inputs.extend(weight);
                let prim = if weight.is_some() { Primitive::C4 } else { Primitive::C3 };
                // edge u -> v sums the column index: X w; edge v -> u: X^T w
                let y = self.emit(prim, v, TensorOp::MatVec { transpose: s == v }, inputs);
                self.edges.push((u, u, y));
            }
            _ => unreachable!("node bank contracts at most one neighbor"),
        }
    }

    fn contract_edge_bank(&mut self, v: usize) {
        let lp = self.collapse_loops(v, Primitive::C2);
        let nb = self.neighbors(v);
        if nb.is_empty() {
            self.take_edges(|s, d| s == v && d == v);
            let s = self.emit(Primitive::C1, v, TensorOp::Total, lp.into_iter().collect());
            self.scalars.push(s);
            return;
        }
        let mut out_slots: Vec<usize> = nb
            .iter()
            .map(|&w| self.orient_and_merge(v, w, false).expect("neighbor edge"))
            .collect();
        let last = nb.len() - 1;
        if let Some(y) = lp {
            self.take_edges(|s, d| s == v && d == v);
            let z = self.emit(Primitive::C4, v, TensorOp::RowBroadcast, vec![y]);
            out_slots[last] = self.emit(Primitive::C5, v, TensorOp::Hadamard, vec![out_slots[last], z]);
        }
        self.take_edges(|s, d| s == v || d == v);
        match nb.as_slice() {
            &[u] => {
                let y = self.emit(Primitive::C3, v, TensorOp::MatVec { transpose: true }, vec![out_slots[0]]);
                self.edges.push((u, u, y));
            }
            &[i, j] => {
                let into = self.emit(Primitive::C6, v, TensorOp::Transpose, vec![out_slots[0]]);
                let z = self.emit(Primitive::C7, v, TensorOp::MatMul, vec![into, out_slots[1]]);
                self.edges.push((i, j, z));
            }
            _ => unreachable!("edge bank contracts at most two neighbors"),
        }
    }

    fn readout(&mut self) -> Terminal {
        match self.red {
            None => Terminal::Scalar,
            Some((a, b)) if a == b => Terminal::Node(self.collapse_loops(a, Primitive::C2)),
            Some((a, b)) => {
                let edge_bank = self.model == Model::Edge;
                let tag = |p: Primitive| if edge_bank { p } else { Primitive::Readout };
                let la = self.collapse_loops(a, Primitive::C2);
                let lb = self.collapse_loops(b, Primitive::C2);
                self.take_edges(|s, d| s == d);
                let mut acc = self.orient_and_merge(a, b, !edge_bank);
                self.take_edges(|_, _| true);
                let mut merge = |st: &mut Self, z: usize| match acc {
                    None => acc = Some(z),
                    Some(prev) => acc = Some(st.emit(tag(Primitive::C5), a, TensorOp::Hadamard, vec![prev, z])),
                };
                if let Some(y) = la {
                    let z = self.emit(tag(Primitive::C4), a, TensorOp::RowBroadcast, vec![y]);
                    merge(self, z);
                }
                if let Some(y) = lb {
                    let z = self.emit(tag(Primitive::C4), b, TensorOp::RowBroadcast, vec![y]);
                    let t = self.emit(tag(Primitive::C6), b, TensorOp::Transpose, vec![z]);
                    merge(self, t);
                }
                Terminal::Edge(acc)
            }
        }
    }

    fn done(&self) -> bool {
        (0..self.m).all(|v| !self.alive[v] || self.is_red(v))
    }

    /// Remaining graph with loops and (edge bank) parallel edges collapsed and
    /// alive nodes renumbered in order.
    fn stuck_graph(&self, undirected: bool) -> MultiGraphH {
        let mut ids = vec![usize::MAX; self.m];
        let mut k = 0;
        for v in 0..self.m {
            if self.alive[v] {
                ids[v] = k;
                k += 1;
            }
        }
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(s, d, _)| {
                let (s, d) = (ids[s], ids[d]);
                if self.model == Model::Edge || undirected {
                    (s.min(d), s.max(d))
                } else {
                    (s, d)
                }
            })
            .collect();
        edges.sort_unstable();
        let mut seen_loop = vec![false; k];
        let mut out: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for (s, d) in edges {
            if s == d {
                if !seen_loop[s] {
                    seen_loop[s] = true;
                    out.push((s, d));
                }
            } else if self.model == Model::Node || out.last() != Some(&(s, d)) {
                out.push((s, d));
            }
        }
        MultiGraphH::relaxed(k, out, self.red.map(|(a, b)| (ids[a], ids[b])), undirected)
            .expect("renumbered ids are in range")
    }
}

fn run(h: &MultiGraphH, bank: &Bank) -> Verdict {
    let mut st = State::new(h, bank.model);
    while let Some(v) = (0..st.m).find(|&v| st.eligible(v)) {
        st.contract(v);
    }
    if !st.done() {
        return Verdict {
            computable: false,
            plan: None,
            stuck: Some(st.stuck_graph(h.is_undirected())),
        };
    }
    let terminal = st.readout();
    Verdict {
        computable: true,
        plan: Some(ContractionPlan {
            inputs: st.inputs,
            steps: st.steps,
            scalars: st.scalars,
            terminal,
        }),
        stuck: None,
    }
}

/// Greedy decision: contract eligible non-red nodes until none is left;
/// computable iff only the red endpoints remain (the empty graph for
/// invariant `h`).
pub fn decide(h: &MultiGraphH, bank: &Bank) -> Verdict {
    run(h, bank)
}

/// [`decide`] for graphs without a red pair: success means contracting to the
/// empty graph.
pub fn decide_invariant(h: &MultiGraphH, bank: &Bank) -> Verdict {
    debug_assert!(h.red().is_none(), "decide_invariant expects no red pair");
    run(h, bank)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub degree: usize,
    pub noncomputable: usize,
    pub relevant: usize,
    pub signatures: Vec<String>,
}

/// Non-computable simple connected basis graphs per degree: node-valued for
/// the node model, node- and edge-valued for the edge model.
pub fn noncomputable_table(model: Model, min_degree: usize, max_degree: usize) -> Result<Vec<TableRow>> {
    let kind = match model {
        Model::Node => KindFilter::Node,
        Model::Edge => KindFilter::Both,
    };
    let spec = EnumerationSpec::new(max_degree, DataMode::Simple, kind).connected(true);
    let groups = enumerate_basis(&spec)?;
    let bank = Bank::for_model(model);
    Ok(groups
        .iter()
        .enumerate()
        .skip(min_degree)
        .map(|(degree, hs)| {
            let verdicts = par::map(hs, |h| decide(h, &bank).computable);
            let signatures: Vec<String> = hs
                .iter()
                .zip(&verdicts)
                .filter(|(_, &ok)| !ok)
                .map(|(h, _)| h.to_string())
                .collect();
            TableRow {
                degree,
                noncomputable: signatures.len(),
                relevant: hs.len(),
                signatures,
            }
        })
        .collect())
}
