//! Cross-check suites: each compares two independent computations over a
//! family of graphs and random inputs, and reports every disagreement.
//!
//! Randomness is derived from a single seed and the index of the graph being
//! checked, so reports do not depend on the number of worker threads.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::contraction::{decide, decide_invariant, treewidth, Bank};
use crate::enumerate::{enumerate_basis, DataMode, EnumerationSpec, KindFilter};
use crate::error::{Error, Result};
use crate::eval::{
    apply_permutation, conjugate_output, eval_naive_p, eval_naive_q, eval_p, execute_contraction_plan, execute_plan,
    expand_p_in_q, hom_count, plan_path, subgraph_count, DenseTensor, EinsumPlan, GraphData, Scalar, Strategy,
    DEFAULT_NAIVE_BUDGET, DEFAULT_ORDER_CAP,
};
use crate::molien::{cycle_index_series, stable_node_count, CountKind};
use crate::multigraph::{parse_signature, MultiGraphH, OutputKind};
use crate::par;

/// Relative tolerance for floating-point identities.
pub const REAL_TOLERANCE: f64 = 1e-9;

/// Disagreements kept verbatim in a report; the rest are only counted.
const MAX_EXAMPLES: usize = 10;

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub checks: u64,
    pub failures: u64,
    pub examples: Vec<String>,
    pub seconds: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Accumulates results of one graph (or one unit of work).
#[derive(Default)]
struct Tally {
    checks: u64,
    failures: u64,
    examples: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.fail(what());
        }
    }

    fn fail(&mut self, what: String) {
        self.failures += 1;
        if self.examples.len() < MAX_EXAMPLES {
            self.examples.push(what);
        }
    }

    fn absorb(&mut self, other: Tally) {
        self.checks += other.checks;
        self.failures += other.failures;
        for e in other.examples {
            if self.examples.len() < MAX_EXAMPLES {
                self.examples.push(e);
            }
        }
    }

    fn report(self, name: &str, start: Instant) -> SuiteReport {
        SuiteReport {
            name: name.to_string(),
            checks: self.checks,
            failures: self.failures,
            examples: self.examples,
            seconds: start.elapsed().as_secs_f64(),
        }
    }
}

fn merge(parts: Vec<Tally>) -> Tally {
    let mut t = Tally::default();
    for p in parts {
        t.absorb(p);
    }
    t
}

/// Independent stream for work item `index`.
pub fn item_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

pub fn random_permutation(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut g: Vec<usize> = (0..n).collect();
    g.shuffle(rng);
    g
}

/// Directed binary data with loops, each entry nonzero with probability `p`.
pub fn random_binary_general(n: usize, p: f64, rng: &mut impl Rng) -> GraphData {
    let values = (0..n * n).map(|_| if rng.gen_bool(p) { 1.0 } else { 0.0 }).collect();
    GraphData::general(n, values).expect("square data")
}

/// Simple graph, each edge present with probability `p`.
pub fn random_simple(n: usize, p: f64, rng: &mut impl Rng) -> GraphData {
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|_| rng.gen_bool(p))
        .collect();
    GraphData::from_edges(n, &edges).expect("valid edges")
}

/// Real directed data with entries uniform in `[-1, 1)`.
pub fn random_real_general(n: usize, rng: &mut impl Rng) -> GraphData {
    GraphData::general(n, (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect()).expect("square data")
}

/// Real symmetric data with zero diagonal.
pub fn random_real_symmetric(n: usize, rng: &mut impl Rng) -> GraphData {
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = rng.gen_range(-1.0..1.0);
            values[i * n + j] = v;
            values[j * n + i] = v;
        }
    }
    GraphData::general(n, values).expect("square data")
}

/// All basis graphs (node-, edge-valued and invariant) up to `max_degree`.
fn all_kinds(mode: DataMode, max_degree: usize, connected: bool) -> Result<Vec<MultiGraphH>> {
    let mut out = Vec::new();
    for kind in [KindFilter::Both, KindFilter::Invariant] {
        let spec = EnumerationSpec::new(max_degree, mode, kind).connected(connected);
        out.extend(enumerate_basis(&spec)?.into_iter().flatten());
    }
    Ok(out)
}

fn first_error(results: Vec<Result<Tally>>) -> Result<Vec<Tally>> {
    results.into_iter().collect()
}

/// General-mode enumeration counts against the cycle-index series.
pub fn molien_vs_enumeration(max_equivariant: usize, max_invariant: usize) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut t = Tally::default();
    let cases = [
        (KindFilter::Both, CountKind::Equivariant, 2u32, max_equivariant),
        (KindFilter::Invariant, CountKind::Invariant, 0u32, max_invariant),
    ];
    for (filter, kind, d, max_degree) in cases {
        let counts = crate::enumerate::count_basis(&EnumerationSpec::new(max_degree, DataMode::General, filter))?;
        let series = cycle_index_series(stable_node_count(kind, max_degree), 2, d, max_degree);
        for (degree, (c, m)) in counts.iter().zip(&series.coefficients).enumerate() {
            t.check(m == &(*c).into(), || format!("{kind:?} degree {degree}: enumerated {c}, series {m}"));
        }
    }
    Ok(t.report("molien-vs-enumeration", start))
}

/// Contraction-bank plans against the naive sum, for every computable simple
/// connected graph up to `max_degree`, on real symmetric data.
pub fn plan_vs_naive(seed: u64, max_degree: usize, trials: usize) -> Result<SuiteReport> {
    let start = Instant::now();
    let hs = all_kinds(DataMode::Simple, max_degree, true)?;
    let banks = [Bank::node(), Bank::edge()];
    let results = par::map_range(hs.len(), |idx| -> Result<Tally> {
        let h = &hs[idx];
        let mut t = Tally::default();
        let plans: Vec<_> = banks.iter().filter_map(|b| decide(h, b).plan.map(|p| (b.model, p))).collect();
        let mut rng = item_rng(seed, idx);
        for trial in 0..trials {
            let x = random_real_symmetric(3 + trial % 4, &mut rng);
            let naive: DenseTensor<f64> = eval_naive_p(h, &x, DEFAULT_NAIVE_BUDGET)?;
            for (model, plan) in &plans {
                let y: DenseTensor<f64> = execute_contraction_plan(plan, &x)?;
                t.check(y.approx_eq(&naive, REAL_TOLERANCE), || {
                    format!("{model} plan for `{h}` off by {:e}", y.relative_error(&naive))
                });
            }
            let y: DenseTensor<f64> = eval_p(h, &x, DEFAULT_ORDER_CAP)?;
            t.check(y.approx_eq(&naive, REAL_TOLERANCE), || {
                format!("einsum plan for `{h}` off by {:e}", y.relative_error(&naive))
            });
        }
        Ok(t)
    });
    Ok(merge(first_error(results)?).report("plan-vs-naive", start))
}

enum Evaluator {
    Planned(EinsumPlan),
    Naive,
}

impl Evaluator {
    fn new(h: &MultiGraphH) -> Result<Self> {
        match plan_path(h, DEFAULT_ORDER_CAP, Strategy::Greedy) {
            Ok(p) => Ok(Self::Planned(p)),
            Err(Error::NoPlan { .. }) => Ok(Self::Naive),
            Err(e) => Err(e),
        }
    }

    fn eval<T: Scalar>(&self, h: &MultiGraphH, x: &GraphData) -> Result<DenseTensor<T>> {
        match self {
            Self::Planned(p) => execute_plan(p, x),
            Self::Naive => eval_naive_p(h, x, DEFAULT_NAIVE_BUDGET),
        }
    }
}

/// `P_H(g . X) == g . P_H(X)` for every general-mode basis graph up to
/// `max_degree`; half the pairs use binary data (exact, in `i64`), half real
/// data (relative tolerance).
pub fn equivariance(seed: u64, max_degree: usize, pairs: usize) -> Result<SuiteReport> {
    let start = Instant::now();
    let hs = all_kinds(DataMode::General, max_degree, false)?;
    let results = par::map_range(hs.len(), |idx| -> Result<Tally> {
        let h = &hs[idx];
        let ev = Evaluator::new(h)?;
        let mut t = Tally::default();
        let mut rng = item_rng(seed, idx);
        for pair in 0..pairs {
            let n = 3 + pair % 3;
            let g = random_permutation(n, &mut rng);
            if pair % 2 == 0 {
                let x = random_binary_general(n, 0.5, &mut rng);
                let lhs: DenseTensor<i64> = ev.eval(h, &apply_permutation(&x, &g)?)?;
                let rhs = conjugate_output(&ev.eval::<i64>(h, &x)?, &g)?;
                t.check(lhs == rhs, || format!("`{h}` not equivariant on binary data under {g:?}"));
            } else {
                let x = random_real_general(n, &mut rng);
                let lhs: DenseTensor<f64> = ev.eval(h, &apply_permutation(&x, &g)?)?;
                let rhs = conjugate_output(&ev.eval::<f64>(h, &x)?, &g)?;
                t.check(lhs.approx_eq(&rhs, REAL_TOLERANCE), || {
                    format!("`{h}` not equivariant on real data under {g:?}")
                });
            }
        }
        Ok(t)
    });
    Ok(merge(first_error(results)?).report("equivariance", start))
}

/// Every simple graph on `n` labeled nodes.
fn all_simple_graphs(n: usize) -> Vec<GraphData> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    (0u64..1 << pairs.len())
        .map(|mask| {
            let edges: Vec<(usize, usize)> = pairs
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            GraphData::from_edges(n, &edges).expect("valid edges")
        })
        .collect()
}

fn q_vs_subgraphs(h: &MultiGraphH, x: &GraphData, t: &mut Tally) -> Result<()> {
    let q: DenseTensor<i64> = eval_naive_q(h, x, DEFAULT_NAIVE_BUDGET)?;
    let aut = h.automorphism_count();
    let n = x.n();
    let pins: Vec<((usize, usize), usize)> = match h.output_kind() {
        OutputKind::Invariant => vec![((0, 0), 0)],
        OutputKind::Node => (0..n).map(|i| ((i, i), i)).collect(),
        OutputKind::Edge => (0..n).flat_map(|i| (0..n).map(move |j| ((i, j), i * n + j))).collect(),
    };
    for (pin, flat) in pins {
        let sub = subgraph_count(h, x, pin)?;
        let expected = aut.checked_mul(sub as u128);
        t.check(expected == Some(q.data[flat] as u128), || {
            format!("`{h}` at {pin:?} on n = {n}: Q = {}, |Aut| x count = {aut} x {sub}", q.data[flat])
        });
    }
    Ok(())
}

/// Counting identities on binary data:
/// `Q_H = |Aut(H)| * subgraph_count` for simple connected `H` up to
/// `max_degree` on every simple graph with up to `exhaustive_nodes` nodes and
/// random ones up to `max_nodes`; the quotient-count example with a single
/// nonzero diagonal entry; `hom_count == P_H` for invariant `H`.
pub fn counting_identities(
    seed: u64,
    max_degree: usize,
    exhaustive_nodes: usize,
    max_nodes: usize,
    samples: usize,
) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut xs: Vec<GraphData> = (1..=exhaustive_nodes).flat_map(all_simple_graphs).collect();
    let mut rng = item_rng(seed, usize::MAX);
    for n in exhaustive_nodes + 1..=max_nodes {
        xs.extend((0..samples).map(|_| random_simple(n, 0.5, &mut rng)));
    }
    let hs = all_kinds(DataMode::Simple, max_degree, true)?;
    let results = par::map_range(hs.len(), |idx| -> Result<Tally> {
        let mut t = Tally::default();
        for x in &xs {
            q_vs_subgraphs(&hs[idx], x, &mut t)?;
        }
        Ok(t)
    });
    let mut t = merge(first_error(results)?);

    // directed instance with a known quotient count
    let arcs = [(0, 1), (1, 0), (2, 0), (2, 1), (2, 3), (3, 1), (1, 3), (4, 2)];
    let mut vals = vec![0.0; 25];
    for (s, d) in arcs {
        vals[s * 5 + d] = 1.0;
    }
    let x = GraphData::general(5, vals)?;
    let h = parse_signature("ab,ac,ac,bc,bc,cb->aa", false)?;
    let q: DenseTensor<i64> = eval_naive_q(&h, &x, DEFAULT_NAIVE_BUDGET)?;
    t.check(q.data == [0, 0, 4, 0, 0], || format!("quotient example gave {:?}", q.data));

    let inv = enumerate_basis(&EnumerationSpec::new(max_degree, DataMode::General, KindFilter::Invariant))?
        .into_iter()
        .flatten()
        .collect::<Vec<_>>();
    let results = par::map_range(inv.len(), |idx| -> Result<Tally> {
        let h = &inv[idx];
        let mut t = Tally::default();
        let mut rng = item_rng(seed, idx);
        for n in 1..=4 {
            let x = random_binary_general(n, 0.5, &mut rng);
            let hom = hom_count(h, &x)?;
            let p: DenseTensor<i64> = eval_p(h, &x, DEFAULT_ORDER_CAP)?;
            t.check(p.data[0] as u64 == hom, || format!("`{h}` on n = {n}: hom {hom}, P {}", p.data[0]));
        }
        Ok(t)
    });
    t.absorb(merge(first_error(results)?));
    Ok(t.report("counting-identities", start))
}

/// `P_H == sum of Q` over the partition expansion, for every general-mode
/// basis graph up to `max_degree`, on binary data with `n >= |V(H)|`.
pub fn change_of_basis(seed: u64, max_degree: usize, trials: usize) -> Result<SuiteReport> {
    let start = Instant::now();
    let hs = all_kinds(DataMode::General, max_degree, false)?;
    let results = par::map_range(hs.len(), |idx| -> Result<Tally> {
        let h = &hs[idx];
        let mut t = Tally::default();
        let mut rng = item_rng(seed, idx);
        let quotients = expand_p_in_q(h)?;
        let order = crate::eval::output_order(h);
        for _ in 0..trials {
            let n = h.num_nodes().max(1);
            let x = random_binary_general(n, 0.5, &mut rng);
            let p: DenseTensor<i64> = eval_p(h, &x, DEFAULT_ORDER_CAP)?;
            let mut sum = p.map(|_| 0i64);
            for g in &quotients {
                let mut q: DenseTensor<i64> = eval_naive_q(g, &x, DEFAULT_NAIVE_BUDGET)?;
                if order == 2 {
                    q = q.embed_diagonal();
                }
                for (s, v) in sum.data.iter_mut().zip(&q.data) {
                    *s = s.checked_add(*v).ok_or_else(|| Error::Overflow(g.to_string()))?;
                }
            }
            t.check(sum == p, || format!("`{h}` on n = {n}: expansion disagrees with P"));
        }
        Ok(t)
    });
    Ok(merge(first_error(results)?).report("change-of-basis", start))
}

/// Node bank computes `H` iff `tw(H) <= 1`, edge bank iff `tw(H) <= 2`, over
/// connected simple invariant `H` with bounded nodes and edges.
pub fn treewidth_equivalence(max_nodes: usize, max_edges: usize) -> Result<SuiteReport> {
    let start = Instant::now();
    let spec = EnumerationSpec::new(max_edges, DataMode::Simple, KindFilter::Invariant)
        .connected(true)
        .with_max_nodes(max_nodes);
    let hs: Vec<MultiGraphH> = enumerate_basis(&spec)?.into_iter().flatten().collect();
    let (node, edge) = (Bank::node(), Bank::edge());
    let results = par::map(&hs, |h| -> Result<Tally> {
        let mut t = Tally::default();
        let tw = treewidth(h, 2)?;
        let node_ok = decide_invariant(h, &node).computable;
        let edge_ok = decide_invariant(h, &edge).computable;
        let tw_text = tw.map_or("> 2".to_string(), |w| w.to_string());
        t.check(node_ok == tw.is_some_and(|w| w <= 1), || {
            format!("`{h}`: node bank says {node_ok}, treewidth {tw_text}")
        });
        t.check(edge_ok == tw.is_some(), || {
            format!("`{h}`: edge bank says {edge_ok}, treewidth {tw_text}")
        });
        Ok(t)
    });
    Ok(merge(first_error(results)?).report("treewidth-equivalence", start))
}

/// Every suite at the sizes the acceptance criteria call for.
pub fn run_all(seed: u64) -> Result<Vec<SuiteReport>> {
    Ok(vec![
        molien_vs_enumeration(3, 4)?,
        plan_vs_naive(seed, 4, 20)?,
        equivariance(seed, 4, 50)?,
        counting_identities(seed, 4, 5, 6, 200)?,
        change_of_basis(seed, 3, 2)?,
        treewidth_equivalence(7, 9)?,
    ])
}
