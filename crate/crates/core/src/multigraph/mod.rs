//! Directed (or undirected) multigraphs `H = (V, E, (a, b))` indexing the
//! polynomial basis, together with canonical labeling and the structural
//! rewrites used elsewhere in the crate.
//!
//! Nodes are `0..num_nodes`. Black edges form a multiset of ordered pairs;
//! self-loops and parallel edges are allowed. The optional red pair marks the
//! output indices: `(a, a)` is node-valued, `(a, b)` with `a != b` is
//! edge-valued, and no red pair means an invariant polynomial.

mod canon;
mod signature;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use signature::{parse_signature, to_signature};

/// Hard cap imposed by the one-letter-per-node signature grammar.
pub const MAX_NODES: usize = 26;

/// What a basis element outputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputKind {
    Invariant,
    Node,
    Edge,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiGraphH {
    num_nodes: usize,
    /// Sorted; `(min, max)`-normalized when `undirected`.
    edges: Vec<(u8, u8)>,
    red: Option<(u8, u8)>,
    undirected: bool,
}

/// Einsum-style signature of the canonical relabeling; equal iff isomorphic
/// (red pair mapped to red pair, in order).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalSignature(pub String);

impl CanonicalSignature {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CanonicalSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl MultiGraphH {
    /// Basis-element constructor: besides index checks, every node outside the
    /// red pair must touch a black edge.
    pub fn new(
        num_nodes: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        red: Option<(usize, usize)>,
        undirected: bool,
    ) -> Result<Self> {
        let h = Self::relaxed(num_nodes, edges, red, undirected)?;
        if let Some(v) = h.isolated_non_red().next() {
            return Err(Error::InvalidGraph(format!(
                "node {v} is isolated and not a red endpoint"
            )));
        }
        Ok(h)
    }

    /// Constructor for intermediate rewrite states: only checks node indices.
    pub fn relaxed(
        num_nodes: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        red: Option<(usize, usize)>,
        undirected: bool,
    ) -> Result<Self> {
        if num_nodes > MAX_NODES {
            return Err(Error::InvalidGraph(format!(
                "{num_nodes} nodes exceeds the limit of {MAX_NODES}"
            )));
        }
        let check = |v: usize| {
            if v < num_nodes {
                Ok(v as u8)
            } else {
                Err(Error::InvalidGraph(format!(
                    "node id {v} out of range for {num_nodes} nodes"
                )))
            }
        };
        let mut es = Vec::new();
        for (s, d) in edges {
            let (s, d) = (check(s)?, check(d)?);
            es.push(if undirected { (s.min(d), s.max(d)) } else { (s, d) });
        }
        es.sort_unstable();
        let red = match red {
            Some((a, b)) => Some((check(a)?, check(b)?)),
            None => None,
        };
        Ok(Self {
            num_nodes,
            edges: es,
            red,
            undirected,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn edges(&self) -> &[(u8, u8)] {
        &self.edges
    }

    pub fn red(&self) -> Option<(usize, usize)> {
        self.red.map(|(a, b)| (a as usize, b as usize))
    }

    pub fn is_undirected(&self) -> bool {
        self.undirected
    }

    /// Number of black edges counted with multiplicity.
    pub fn degree(&self) -> usize {
        self.edges.len()
    }

    pub fn output_kind(&self) -> OutputKind {
        match self.red {
            None => OutputKind::Invariant,
            Some((a, b)) if a == b => OutputKind::Node,
            Some(_) => OutputKind::Edge,
        }
    }

    pub fn is_red_endpoint(&self, v: usize) -> bool {
        matches!(self.red, Some((a, b)) if a as usize == v || b as usize == v)
    }

    pub fn touches_black(&self, v: usize) -> bool {
        self.edges
            .iter()
            .any(|&(s, d)| s as usize == v || d as usize == v)
    }

    fn isolated_non_red(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_nodes).filter(move |&v| !self.is_red_endpoint(v) && !self.touches_black(v))
    }

    pub fn self_loop_count(&self, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(s, d)| s == d && s as usize == v)
            .count()
    }

    pub fn has_self_loop(&self) -> bool {
        self.edges.iter().any(|&(s, d)| s == d)
    }

    /// Distinct nodes `u != v` sharing a black edge with `v` in either direction.
    pub fn neighbors(&self, v: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for &(s, d) in &self.edges {
            let (s, d) = (s as usize, d as usize);
            if s == v && d != v {
                out.insert(d);
            } else if d == v && s != v {
                out.insert(s);
            }
        }
        out
    }

    /// Number of distinct neighbors; self-loops are not neighbors.
    pub fn neighbor_count(&self, v: usize) -> usize {
        self.neighbors(v).len()
    }

    /// Same graph with the undirected flag changed (edges re-normalized).
    pub fn with_undirected(&self, undirected: bool) -> Self {
        Self::relaxed(
            self.num_nodes,
            self.edges.iter().map(|&(s, d)| (s as usize, d as usize)),
            self.red(),
            undirected,
        )
        .expect("indices already validated")
    }

    /// Relabel node `v` to `perm[v]`. `perm` must be a permutation of `0..num_nodes`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        debug_assert_eq!(perm.len(), self.num_nodes);
        Self::relaxed(
            self.num_nodes,
            self.edges
                .iter()
                .map(|&(s, d)| (perm[s as usize], perm[d as usize])),
            self.red().map(|(a, b)| (perm[a], perm[b])),
            self.undirected,
        )
        .expect("permutation keeps indices in range")
    }

    /// Canonical relabeling and its signature. Isomorphic inputs (respecting
    /// red order, multiplicities and direction) give identical results.
    pub fn canonicalize(&self) -> (MultiGraphH, CanonicalSignature) {
        let result = canon::search(self);
        let perm: Vec<usize> = result.labeling.iter().map(|&p| p as usize).collect();
        let g = self.relabel(&perm);
        let sig = CanonicalSignature(g.to_string());
        (g, sig)
    }

    pub fn signature(&self) -> CanonicalSignature {
        self.canonicalize().1
    }

    /// Order of the automorphism group fixing `a` and `b` pointwise and
    /// preserving the black edge multiset.
    pub fn automorphism_count(&self) -> u128 {
        canon::search(self).automorphisms
    }

    /// Reduction for simple (symmetric, binary, zero-diagonal) data: `None` if a
    /// black self-loop makes the polynomial vanish, otherwise the undirected
    /// graph with parallel edges collapsed.
    pub fn simplify_for_simple_data(&self) -> Option<MultiGraphH> {
        if self.has_self_loop() {
            return None;
        }
        let mut g = self.with_undirected(true);
        g.edges.dedup();
        Some(g)
    }

    /// Quotient by a node grouping: `blocks[v]` is the block label of node `v`.
    /// Blocks are renumbered by first appearance; multiplicities add up.
    pub fn merge_nodes(&self, blocks: &[usize]) -> Result<MultiGraphH> {
        if blocks.len() != self.num_nodes {
            return Err(Error::InvalidPartition(format!(
                "grouping has {} entries for {} nodes",
                blocks.len(),
                self.num_nodes
            )));
        }
        let mut ids: Vec<usize> = Vec::new();
        let mut map = vec![0usize; self.num_nodes];
        for (v, &b) in blocks.iter().enumerate() {
            map[v] = match ids.iter().position(|&x| x == b) {
                Some(i) => i,
                None => {
                    ids.push(b);
                    ids.len() - 1
                }
            };
        }
        Self::relaxed(
            ids.len(),
            self.edges
                .iter()
                .map(|&(s, d)| (map[s as usize], map[d as usize])),
            self.red().map(|(a, b)| (map[a], map[b])),
            self.undirected,
        )
    }

    /// Connectivity used by the feature-discovery filter.
    ///
    /// The nodes touching black edges must form a single component (the red
    /// pair never joins components). A node-valued red endpoint may be isolated,
    /// in which case the polynomial is the invariant of the black part spread
    /// over all nodes. Edge-valued red endpoints must both touch black edges.
    /// A graph without black edges is connected.
    pub fn is_connected(&self) -> bool {
        if self.edges.is_empty() {
            return true;
        }
        if !self.is_black_connected() {
            return false;
        }
        match self.red {
            Some((a, b)) if a != b => self.touches_black(a as usize) && self.touches_black(b as usize),
            _ => true,
        }
    }

    /// True iff the nodes touching black edges form at most one component.
    pub fn is_black_connected(&self) -> bool {
        let Some(&(start, _)) = self.edges.first() else {
            return true;
        };
        let m = self.num_nodes;
        let mut parent: Vec<usize> = (0..m).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(s, d) in &self.edges {
            let (rs, rd) = (find(&mut parent, s as usize), find(&mut parent, d as usize));
            parent[rs] = rd;
        }
        let root = find(&mut parent, start as usize);
        (0..m)
            .filter(|&v| self.touches_black(v))
            .all(|v| find(&mut parent, v) == root)
    }

    /// Multiplicity matrix `A[s * m + d]` counting black edges `s -> d`
    /// (both directions for undirected graphs; loops once on the diagonal).
    pub fn multiplicity_matrix(&self) -> Vec<u32> {
        let m = self.num_nodes;
        let mut a = vec![0u32; m * m];
        for &(s, d) in &self.edges {
            let (s, d) = (s as usize, d as usize);
            a[s * m + d] += 1;
            if self.undirected && s != d {
                a[d * m + s] += 1;
            }
        }
        a
    }
}

impl fmt::Display for MultiGraphH {
    /// Signature text with the current node ids (`0 -> 'a'`, ...), not canonicalized.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = |v: u8| (b'a' + v) as char;
        let terms: Vec<String> = self
            .edges
            .iter()
            .map(|&(s, d)| format!("{}{}", label(s), label(d)))
            .collect();
        write!(f, "{}->", terms.join(","))?;
        if let Some((a, b)) = self.red {
            write!(f, "{}{}", label(a), label(b))?;
        }
        Ok(())
    }
}
