//! Enumeration of non-isomorphic basis multigraphs by degree.
//!
//! Degree `k + 1` classes are produced from canonical degree `k`
//! representatives by adding one black edge in every possible placement
//! (between existing nodes, to a fresh node, or between two fresh nodes),
//! canonicalizing, and deduplicating on the signature. Every basis graph of
//! degree `k + 1` arises this way: deleting one of its edges (and any non-red
//! node left isolated) gives a degree `k` basis graph.
//!
//! With `connected_only`, augmentation is restricted to graphs whose black
//! part is connected (red endpoints may be isolated); deleting a non-bridge
//! edge or a leaf edge keeps that property, so the restricted search is still
//! complete. The final connectivity filter is [`MultiGraphH::is_connected`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multigraph::{MultiGraphH, OutputKind, MAX_NODES};
use crate::par;

pub const DEFAULT_MAX_CLASSES: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataMode {
    /// Directed multigraphs with loops and parallel edges.
    General,
    /// Undirected simple graphs (symmetric binary data with zero diagonal).
    Simple,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindFilter {
    Node,
    Edge,
    Both,
    Invariant,
}

impl KindFilter {
    fn seeds(self, undirected: bool) -> Vec<MultiGraphH> {
        let node = || MultiGraphH::new(1, [], Some((0, 0)), undirected).unwrap();
        let edge = || MultiGraphH::new(2, [], Some((0, 1)), undirected).unwrap();
        match self {
            KindFilter::Node => vec![node()],
            KindFilter::Edge => vec![edge()],
            KindFilter::Both => vec![node(), edge()],
            KindFilter::Invariant => vec![MultiGraphH::new(0, [], None, undirected).unwrap()],
        }
    }

    pub fn accepts(self, kind: OutputKind) -> bool {
        matches!(
            (self, kind),
            (KindFilter::Node, OutputKind::Node)
                | (KindFilter::Edge, OutputKind::Edge)
                | (KindFilter::Both, OutputKind::Node | OutputKind::Edge)
                | (KindFilter::Invariant, OutputKind::Invariant)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationSpec {
    pub max_degree: usize,
    pub data_mode: DataMode,
    pub output_kind: KindFilter,
    pub connected_only: bool,
    pub max_nodes: usize,
    /// Total class count above which enumeration fails instead of continuing.
    pub max_classes: usize,
}

impl EnumerationSpec {
    pub fn new(max_degree: usize, data_mode: DataMode, output_kind: KindFilter) -> Self {
        Self {
            max_degree,
            data_mode,
            output_kind,
            connected_only: false,
            max_nodes: (2 + 2 * max_degree).min(MAX_NODES),
            max_classes: DEFAULT_MAX_CLASSES,
        }
    }

    pub fn connected(mut self, connected_only: bool) -> Self {
        self.connected_only = connected_only;
        self
    }

    pub fn with_max_nodes(mut self, max_nodes: usize) -> Self {
        self.max_nodes = max_nodes;
        self
    }

    pub fn with_max_classes(mut self, max_classes: usize) -> Self {
        self.max_classes = max_classes;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.max_nodes == 0 || self.max_nodes > MAX_NODES {
            return Err(Error::InvalidGraph(format!(
                "max_nodes must be in 1..={MAX_NODES}, got {}",
                self.max_nodes
            )));
        }
        Ok(())
    }
}

/// All non-isomorphic basis graphs; entry `d` holds degree exactly `d`,
/// sorted by canonical signature.
pub fn enumerate_basis(spec: &EnumerationSpec) -> Result<Vec<Vec<MultiGraphH>>> {
    spec.validate()?;
    let undirected = spec.data_mode == DataMode::Simple;
    let mut level: BTreeMap<String, MultiGraphH> = spec
        .output_kind
        .seeds(undirected)
        .into_iter()
        .filter(|g| g.num_nodes() <= spec.max_nodes)
        .map(|g| {
            let (c, s) = g.canonicalize();
            (s.0, c)
        })
        .collect();

    let mut total = 0usize;
    let mut out = Vec::with_capacity(spec.max_degree + 1);
    for degree in 0..=spec.max_degree {
        total += level.len();
        if total > spec.max_classes {
            return Err(Error::ResourceLimit(format!(
                "more than {} classes by degree {degree}",
                spec.max_classes
            )));
        }
        let reps: Vec<MultiGraphH> = level.values().cloned().collect();
        out.push(
            reps.iter()
                .filter(|g| !spec.connected_only || g.is_connected())
                .cloned()
                .collect(),
        );
        if degree == spec.max_degree {
            break;
        }
        let children = par::map(&reps, |g| augment(g, spec));
        level = BTreeMap::new();
        for batch in children {
            for (sig, g) in batch {
                level.entry(sig).or_insert(g);
            }
        }
    }
    Ok(out)
}

/// Class counts per degree (lengths of [`enumerate_basis`] groups).
pub fn count_basis(spec: &EnumerationSpec) -> Result<Vec<usize>> {
    Ok(enumerate_basis(spec)?.iter().map(Vec::len).collect())
}

fn augment(g: &MultiGraphH, spec: &EnumerationSpec) -> Vec<(String, MultiGraphH)> {
    let m = g.num_nodes();
    let undirected = g.is_undirected();
    let simple = spec.data_mode == DataMode::Simple;
    let existing_black = g.degree() > 0;
    let mut placements: Vec<(usize, usize)> = Vec::new();
    // existing-existing
    for s in 0..m {
        for d in 0..m {
            if undirected && d < s {
                continue;
            }
            placements.push((s, d));
        }
    }
    // existing-fresh, fresh-existing
    for v in 0..m {
        placements.push((v, m));
        if !undirected {
            placements.push((m, v));
        }
    }
    placements.push((m, m));
    placements.push((m, m + 1));

    let mut out: Vec<(String, MultiGraphH)> = Vec::new();
    for (s, d) in placements {
        if simple && s == d {
            continue;
        }
        let nodes = m.max(s + 1).max(d + 1);
        if nodes > spec.max_nodes {
            continue;
        }
        if simple {
            let pair = (s.min(d) as u8, s.max(d) as u8);
            if g.edges().contains(&pair) {
                continue;
            }
        }
        if spec.connected_only && existing_black {
            let joins = (s < m && g.touches_black(s)) || (d < m && g.touches_black(d));
            if !joins {
                continue;
            }
        }
        let edges = g
            .edges()
            .iter()
            .map(|&(a, b)| (a as usize, b as usize))
            .chain(std::iter::once((s, d)));
        let child = MultiGraphH::new(nodes, edges, g.red(), undirected)
            .expect("augmentation keeps basis constraints");
        let (c, sig) = child.canonicalize();
        out.push((sig.0, c));
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out.dedup_by(|a, b| a.0 == b.0);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn counts(mode: DataMode, kind: KindFilter, d: usize, connected: bool) -> Vec<usize> {
        count_basis(&EnumerationSpec::new(d, mode, kind).connected(connected)).unwrap()
    }

    #[test]
    fn general_equivariant_small_degrees() {
        assert_eq!(counts(DataMode::General, KindFilter::Both, 2, false), vec![2, 15, 117]);
    }

    #[test]
    fn general_invariant_small_degrees() {
        assert_eq!(counts(DataMode::General, KindFilter::Invariant, 3, false), vec![1, 2, 11, 52]);
    }

    #[test]
    fn simple_node_connected_degree_three() {
        assert_eq!(counts(DataMode::Simple, KindFilter::Node, 3, true)[3], 8);
    }

    #[test]
    fn linear_basis_signatures_distinct_and_sorted() {
        let groups = enumerate_basis(&EnumerationSpec::new(1, DataMode::General, KindFilter::Both)).unwrap();
        let sigs: Vec<String> = groups[1].iter().map(|g| g.to_string()).collect();
        let mut sorted = sigs.clone();
        sorted.sort();
        assert_eq!(sigs, sorted);
        assert_eq!(sigs.iter().collect::<HashSet<_>>().len(), 15);
        // every emitted graph is already canonical
        for g in &groups[1] {
            assert_eq!(&g.canonicalize().0, g);
        }
    }

    #[test]
    fn connected_subset_of_all() {
        let all = enumerate_basis(&EnumerationSpec::new(4, DataMode::Simple, KindFilter::Both)).unwrap();
        let conn = enumerate_basis(&EnumerationSpec::new(4, DataMode::Simple, KindFilter::Both).connected(true)).unwrap();
        for d in 0..=4 {
            let set: HashSet<String> = all[d].iter().map(|g| g.to_string()).collect();
            for g in &conn[d] {
                assert!(set.contains(&g.to_string()));
                assert!(g.is_connected());
            }
        }
    }

    #[test]
    fn resource_guard_trips() {
        let spec = EnumerationSpec::new(4, DataMode::General, KindFilter::Both).with_max_classes(100);
        assert!(matches!(enumerate_basis(&spec), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn node_cap_limits_size() {
        let spec = EnumerationSpec::new(2, DataMode::General, KindFilter::Invariant).with_max_nodes(2);
        for g in enumerate_basis(&spec).unwrap().concat() {
            assert!(g.num_nodes() <= 2);
        }
    }
}
