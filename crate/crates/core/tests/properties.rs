use eqpoly::contraction::{decide, treewidth, Bank};
use eqpoly::eval::{
    eval_naive_p, eval_naive_q, eval_p, expand_p_in_q, hom_count, DenseTensor, GraphData, DEFAULT_NAIVE_BUDGET,
};
use eqpoly::molien::{molien_equivariant, molien_invariant};
use eqpoly::multigraph::{parse_signature, MultiGraphH};
use proptest::prelude::*;

fn graph(max_nodes: usize, max_edges: usize) -> impl Strategy<Value = MultiGraphH> {
    (1..=max_nodes, any::<bool>(), 0u8..3).prop_flat_map(move |(m, undirected, red_kind)| {
        let edges = prop::collection::vec((0..m, 0..m), 0..=max_edges);
        let red = (0..m, 0..m).prop_map(move |(a, b)| match red_kind {
            0 => None,
            1 => Some((a, a)),
            _ => (a != b).then_some((a, b)),
        });
        (edges, red).prop_map(move |(es, red)| basis_graph(m, es, red, undirected))
    })
}

/// Drop nodes that are neither red nor on a black edge, as basis graphs have none.
fn basis_graph(m: usize, es: Vec<(usize, usize)>, red: Option<(usize, usize)>, undirected: bool) -> MultiGraphH {
    let mut used = vec![false; m];
    for &(s, d) in &es {
        used[s] = true;
        used[d] = true;
    }
    if let Some((a, b)) = red {
        used[a] = true;
        used[b] = true;
    }
    let mut id = vec![usize::MAX; m];
    let mut k = 0;
    for v in 0..m {
        if used[v] {
            id[v] = k;
            k += 1;
        }
    }
    let es = es.into_iter().map(|(s, d)| (id[s], id[d]));
    MultiGraphH::new(k, es, red.map(|(a, b)| (id[a], id[b])), undirected).unwrap()
}

fn with_perm(max_nodes: usize, max_edges: usize) -> impl Strategy<Value = (MultiGraphH, Vec<usize>)> {
    graph(max_nodes, max_edges).prop_flat_map(|h| {
        let perm = Just((0..h.num_nodes()).collect::<Vec<_>>()).prop_shuffle();
        (Just(h), perm)
    })
}

fn data(n: usize, binary: bool) -> impl Strategy<Value = GraphData> {
    let entry = if binary {
        prop_oneof![Just(0.0), Just(1.0)].boxed()
    } else {
        (-1.0f64..1.0).boxed()
    };
    prop::collection::vec(entry, n * n).prop_map(move |v| GraphData::general(n, v).unwrap())
}

/// Undirected graphs are only meaningful on symmetric data.
fn symmetrized(x: &GraphData) -> GraphData {
    let n = x.n();
    let v = (0..n * n).map(|k| x.get(k / n, k % n).max(x.get(k % n, k / n))).collect();
    GraphData::general(n, v).unwrap()
}

/// Permutations of `0..m` by Heap's algorithm.
fn all_perms(m: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..m).collect();
    let mut c = vec![0; m];
    let mut out = vec![p.clone()];
    let mut i = 0;
    while i < m {
        if c[i] < i {
            p.swap(if i % 2 == 0 { 0 } else { c[i] }, i);
            out.push(p.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn signature_invariant_under_relabeling((h, perm) in with_perm(7, 10)) {
        prop_assert_eq!(h.signature(), h.relabel(&perm).signature());
    }

    #[test]
    fn canonical_text_round_trips(h in graph(6, 8)) {
        let sig = h.signature();
        let back = parse_signature(sig.as_str(), h.is_undirected()).unwrap();
        prop_assert_eq!(back.signature(), sig);
    }

    #[test]
    fn automorphisms_match_brute_force(h in graph(5, 7)) {
        let brute = all_perms(h.num_nodes())
            .into_iter()
            .filter(|p| {
                let g = h.relabel(p);
                g.edges() == h.edges() && g.red() == h.red()
            })
            .count() as u128;
        prop_assert_eq!(h.automorphism_count(), brute);
    }

    #[test]
    fn merging_keeps_degree_and_red(h in graph(6, 8), blocks in prop::collection::vec(0usize..3, 6)) {
        let g = h.merge_nodes(&blocks[..h.num_nodes()]).unwrap();
        prop_assert_eq!(g.degree(), h.degree());
        prop_assert_eq!(g.red().is_some(), h.red().is_some());
        prop_assert!(g.num_nodes() <= 3);
    }

    #[test]
    fn verdict_invariant_under_relabeling((h, perm) in with_perm(6, 8)) {
        for bank in [Bank::node(), Bank::edge()] {
            prop_assert_eq!(decide(&h, &bank).computable, decide(&h.relabel(&perm), &bank).computable);
        }
    }

    #[test]
    fn treewidth_invariant_and_bounded((h, perm) in with_perm(8, 14)) {
        let tw = treewidth(&h, 8).unwrap().unwrap();
        prop_assert_eq!(Some(tw), treewidth(&h.relabel(&perm), 8).unwrap());
        prop_assert!(tw < h.num_nodes().max(1));
    }

    #[test]
    fn planned_matches_naive(h in graph(5, 7), x in (1usize..5).prop_flat_map(|n| data(n, false))) {
        let naive: DenseTensor<f64> = eval_naive_p(&h, &x, DEFAULT_NAIVE_BUDGET).unwrap();
        let planned: DenseTensor<f64> = eval_p(&h, &x, 3).unwrap();
        prop_assert!(planned.approx_eq(&naive, 1e-9), "{} {:e}", h, planned.relative_error(&naive));
    }

    #[test]
    fn expansion_sums_to_p(h in graph(4, 5), x in (1usize..6).prop_flat_map(|n| data(n, true))) {
        let x = if h.is_undirected() { symmetrized(&x) } else { x };
        let p: DenseTensor<i64> = eval_naive_p(&h, &x, DEFAULT_NAIVE_BUDGET).unwrap();
        let mut sum = p.map(|_| 0i64);
        for g in expand_p_in_q(&h).unwrap() {
            let mut q: DenseTensor<i64> = eval_naive_q(&g, &x, DEFAULT_NAIVE_BUDGET).unwrap();
            if q.order < p.order {
                q = q.embed_diagonal();
            }
            for (s, v) in sum.data.iter_mut().zip(&q.data) {
                *s += v;
            }
        }
        prop_assert_eq!(sum, p);
    }

    #[test]
    fn hom_count_is_invariant_p(h in graph(5, 6), x in (1usize..5).prop_flat_map(|n| data(n, true))) {
        let es = h.edges().iter().map(|&(s, d)| (s as usize, d as usize)).collect();
        let h = basis_graph(h.num_nodes(), es, None, h.is_undirected());
        let p: DenseTensor<i64> = eval_naive_p(&h, &x, DEFAULT_NAIVE_BUDGET).unwrap();
        prop_assert_eq!(p.data[0] as u64, hom_count(&h, &x).unwrap());
    }
}

#[test]
fn molien_monotone_and_stable() {
    let c = 4;
    let inv: Vec<_> = (1..=2 * c + 2).map(|n| molien_invariant(n, c).coefficients).collect();
    for w in inv.windows(2) {
        assert!(w[0].iter().zip(&w[1]).all(|(a, b)| a <= b));
    }
    for n in 2 * c..inv.len() {
        assert_eq!(inv[n - 1], inv[2 * c - 1], "n = {n}");
    }
    let eq: Vec<_> = (1..=2 * c + 4).map(|n| molien_equivariant(n, c).coefficients).collect();
    for w in eq.windows(2) {
        assert!(w[0].iter().zip(&w[1]).all(|(a, b)| a <= b));
    }
}

#[test]
fn heap_permutations_are_complete() {
    let mut ps = all_perms(4);
    ps.sort();
    ps.dedup();
    assert_eq!(ps.len(), 24);
}
