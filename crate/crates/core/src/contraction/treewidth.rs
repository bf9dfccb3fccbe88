//! Exact treewidth by dynamic programming over elimination prefixes.
//!
//! For a set `S` of already eliminated vertices and a next vertex `v`, the
//! clique formed when eliminating `v` is `Q(S, v)`: vertices outside
//! `S + v` reachable from `v` through paths inside `S`. Then
//! `tw = min over orders of max_v |Q(S_v, v)|`, computed bottom-up over
//! subsets.

use crate::error::{Error, Result};
use crate::multigraph::MultiGraphH;

pub const MAX_TREEWIDTH_NODES: usize = 16;

/// Exact treewidth of the underlying simple undirected graph of `h` (loops,
/// directions and multiplicities ignored). `None` when it exceeds `cap`.
pub fn treewidth(h: &MultiGraphH, cap: usize) -> Result<Option<usize>> {
    let m = h.num_nodes();
    if m > MAX_TREEWIDTH_NODES {
        return Err(Error::ResourceLimit(format!(
            "treewidth search supports at most {MAX_TREEWIDTH_NODES} nodes, got {m}"
        )));
    }
    if m == 0 {
        return Ok(Some(0));
    }
    let mut adj = vec![0u32; m];
    for &(s, d) in h.edges() {
        let (s, d) = (s as usize, d as usize);
        if s != d {
            adj[s] |= 1 << d;
            adj[d] |= 1 << s;
        }
    }
    let full = (1u32 << m) - 1;
    let q = |set: u32, v: usize| -> u32 {
        // flood from v through `set`, collect boundary outside set + v
        let mut seen = 1u32 << v;
        let mut frontier = 1u32 << v;
        let mut boundary = 0u32;
        while frontier != 0 {
            let u = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let nb = adj[u] & !seen;
            seen |= nb;
            frontier |= nb & set;
            boundary |= nb & !set;
        }
        boundary.count_ones()
    };
    const INF: u8 = u8::MAX;
    let mut best = vec![INF; 1 << m];
    best[0] = 0;
    for set in 0..=full {
        let cur = best[set as usize];
        if cur == INF {
            continue;
        }
        let mut rest = full & !set;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let width = cur.max(q(set, v) as u8);
            if width as usize > cap {
                continue;
            }
            let next = (set | 1 << v) as usize;
            best[next] = best[next].min(width);
        }
    }
    Ok((best[full as usize] != INF).then(|| best[full as usize] as usize))
}
