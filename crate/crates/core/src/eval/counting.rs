//! Combinatorial oracles on binary data: homomorphism and subgraph counts, and
//! the expansion of `P_H` into `Q` over node partitions.

use std::collections::HashSet;

use super::GraphData;
use crate::error::{Error, Result};
use crate::multigraph::MultiGraphH;

/// Largest graph [`expand_p_in_q`] accepts (Bell(10) = 115975 partitions).
pub const MAX_EXPANSION_NODES: usize = 10;

fn require_binary(x: &GraphData) -> Result<()> {
    if x.is_binary() {
        Ok(())
    } else {
        Err(Error::InvalidGraph("counting oracles need binary data".into()))
    }
}

/// Maps `V(h) -> [n]` under which every (collapsed) black edge lands on a
/// nonzero entry. `h` must not have a red pair.
pub fn hom_count(h: &MultiGraphH, x: &GraphData) -> Result<u64> {
    require_binary(x)?;
    if h.red().is_some() {
        return Err(Error::InvalidGraph(format!("hom_count expects an invariant graph, got `{h}`")));
    }
    let mut edges: Vec<(usize, usize)> = h.edges().iter().map(|&(s, d)| (s as usize, d as usize)).collect();
    edges.dedup();
    let (n, m) = (x.n(), h.num_nodes());
    let mut map = vec![0usize; m];
    let mut count = 0u64;
    if m == 0 {
        return Ok(1);
    }
    if n == 0 {
        return Ok(0);
    }
    loop {
        if edges.iter().all(|&(s, d)| x.get(map[s], map[d]) != 0.0) {
            count += 1;
        }
        let mut k = m;
        loop {
            if k == 0 {
                return Ok(count);
            }
            k -= 1;
            map[k] += 1;
            if map[k] < n {
                break;
            }
            map[k] = 0;
        }
    }
}

/// Number of distinct subgraphs `(V', E')` of `x` isomorphic to `h` with the
/// red endpoints sent to `pin`. Found by enumerating injective maps and
/// deduplicating their images.
pub fn subgraph_count(h: &MultiGraphH, x: &GraphData, pin: (usize, usize)) -> Result<u64> {
    require_binary(x)?;
    let n = x.n();
    let (m, red) = (h.num_nodes(), h.red());
    if pin.0 >= n || pin.1 >= n {
        return Err(Error::Dimension(format!("pin {pin:?} out of range for n = {n}")));
    }
    let undirected = h.is_undirected();
    let mut images: HashSet<(Vec<usize>, Vec<(usize, usize)>)> = HashSet::new();
    let mut map = vec![usize::MAX; m];
    fn go(
        v: usize,
        h: &MultiGraphH,
        x: &GraphData,
        red: Option<(usize, usize)>,
        pin: (usize, usize),
        undirected: bool,
        map: &mut Vec<usize>,
        images: &mut HashSet<(Vec<usize>, Vec<(usize, usize)>)>,
    ) {
        let m = map.len();
        if v == m {
            let ok = h
                .edges()
                .iter()
                .all(|&(s, d)| x.get(map[s as usize], map[d as usize]) != 0.0);
            if ok {
                let mut nodes = map.clone();
                nodes.sort_unstable();
                let mut es: Vec<(usize, usize)> = h
                    .edges()
                    .iter()
                    .map(|&(s, d)| {
                        let (s, d) = (map[s as usize], map[d as usize]);
                        if undirected {
                            (s.min(d), s.max(d))
                        } else {
                            (s, d)
                        }
                    })
                    .collect();
                es.sort_unstable();
                images.insert((nodes, es));
            }
            return;
        }
        let forced = match red {
            Some((a, _)) if a == v => Some(pin.0),
            Some((_, b)) if b == v => Some(pin.1),
            _ => None,
        };
        for i in 0..x.n() {
            if forced.is_some_and(|f| f != i) || map[..v].contains(&i) {
                continue;
            }
            map[v] = i;
            go(v + 1, h, x, red, pin, undirected, map, images);
        }
        map[v] = usize::MAX;
    }
    if m > 0 {
        go(0, h, x, red, pin, undirected, &mut map, &mut images);
    } else {
        images.insert((vec![], vec![]));
    }
    Ok(images.len() as u64)
}

/// Quotients of `h` by every set partition of its nodes, trivial partition
/// first. `P_H = sum of Q` over the list, where a quotient merging an
/// edge-valued red pair contributes on the diagonal only.
pub fn expand_p_in_q(h: &MultiGraphH) -> Result<Vec<MultiGraphH>> {
    let m = h.num_nodes();
    if m > MAX_EXPANSION_NODES {
        return Err(Error::ResourceLimit(format!(
            "partition expansion supports at most {MAX_EXPANSION_NODES} nodes, `{h}` has {m}"
        )));
    }
    let mut out = Vec::new();
    // restricted growth strings in order of the number of blocks, descending
    let mut rgs = vec![0usize; m];
    fn go(v: usize, max: usize, rgs: &mut Vec<usize>, acc: &mut Vec<Vec<usize>>) {
        if v == rgs.len() {
            acc.push(rgs.clone());
            return;
        }
        for b in 0..=max + 1 {
            rgs[v] = b;
            go(v + 1, max.max(b), rgs, acc);
        }
    }
    let mut all = Vec::new();
    if m == 0 {
        all.push(vec![]);
    } else {
        rgs[0] = 0;
        go(1, 0, &mut rgs, &mut all);
    }
    all.sort_by_key(|r| std::cmp::Reverse(r.iter().copied().max().map_or(0, |b| b + 1)));
    for r in all {
        out.push(h.merge_nodes(&r)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{eval_naive_p, eval_naive_q, DenseTensor, DEFAULT_NAIVE_BUDGET};
    use crate::multigraph::parse_signature;

    fn pu(s: &str) -> MultiGraphH {
        parse_signature(s, true).unwrap()
    }

    #[test]
    fn hom_examples() {
        let x = GraphData::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(hom_count(&pu("ab->"), &x).unwrap(), 6);
        let tri = GraphData::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(hom_count(&pu("ab,bc,ac->"), &tri).unwrap(), 6);
        let c4 = GraphData::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert_eq!(hom_count(&pu("ab,bc,ac->"), &c4).unwrap(), 0);
    }

    #[test]
    fn pinned_single_edge() {
        let x = GraphData::from_edges(3, &[(0, 1)]).unwrap();
        let h = parse_signature("ab->ab", false).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert_eq!(subgraph_count(&h, &x, (i, j)).unwrap() as f64, x.get(i, j));
                }
            }
        }
    }

    #[test]
    fn quotient_count_instance() {
        // nodes 1..5 -> ids 0..4
        let edges = [(1, 2), (2, 1), (3, 1), (3, 2), (3, 4), (4, 2), (2, 4), (5, 3)];
        let mut vals = vec![0.0; 25];
        for (s, d) in edges {
            vals[(s - 1) * 5 + (d - 1)] = 1.0;
        }
        let x = GraphData::general(5, vals).unwrap();
        let h = parse_signature("ab,ac,ac,bc,bc,cb->aa", false).unwrap();
        let q: DenseTensor<i64> = eval_naive_q(&h, &x, DEFAULT_NAIVE_BUDGET).unwrap();
        assert_eq!(q.data, vec![0, 0, 4, 0, 0]);
        let tilde = parse_signature("ab,ac,bc,cb->aa", false).unwrap();
        assert_eq!(tilde.automorphism_count(), 2);
        assert_eq!(subgraph_count(&tilde, &x, (2, 2)).unwrap(), 2);
    }

    #[test]
    fn expansion_examples() {
        let h = pu("ab->");
        assert_eq!(expand_p_in_q(&h).unwrap().len(), 2);
        let single = pu("aa->aa");
        assert_eq!(expand_p_in_q(&single).unwrap(), vec![single.clone()]);
        let e = expand_p_in_q(&parse_signature("ij->ii", false).unwrap()).unwrap();
        assert_eq!(e[0], parse_signature("ij->ii", false).unwrap());
        assert_eq!(e[1], parse_signature("ii->ii", false).unwrap());
        assert_eq!(expand_p_in_q(&pu("ab,bc,cd->")).unwrap().len(), 15);
    }

    #[test]
    fn expansion_identity_on_small_graph() {
        let x = GraphData::from_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 2)]).unwrap();
        let h = parse_signature("ab,bc,ca->ab", false).unwrap();
        let p: DenseTensor<i64> = eval_naive_p(&h, &x, DEFAULT_NAIVE_BUDGET).unwrap();
        let mut sum = DenseTensor::filled(2, 4, 0i64);
        for g in expand_p_in_q(&h).unwrap() {
            let q: DenseTensor<i64> = eval_naive_q(&g, &x, DEFAULT_NAIVE_BUDGET).unwrap();
            let q = q.embed_diagonal();
            for (s, v) in sum.data.iter_mut().zip(&q.data) {
                *s += v;
            }
        }
        assert_eq!(sum, p);
    }
}
