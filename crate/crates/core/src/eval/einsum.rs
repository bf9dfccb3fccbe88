//! Contraction-path planning and execution for `P_H(X) = einsum(H, X, ..., X)`.
//!
//! Each index of the einsum is a node of `H`; each black edge is an input
//! (`X` over `(s, d)`, or `diag(X)` over `v` for a loop). A step eliminates one
//! summation index: it multiplies every live tensor carrying that index and
//! sums it out. A final step multiplies what is left into the output indices.
//! The structure after eliminating a set of indices does not depend on the
//! order, which makes an exact search over subsets possible.

use serde::Serialize;

use super::{DenseTensor, GraphData, Scalar};
use crate::error::{Error, Result};
use crate::multigraph::MultiGraphH;

pub const DEFAULT_ORDER_CAP: usize = 3;

/// Nominal dimension used to compare step costs.
const NOMINAL_N: f64 = 16.0;

/// Largest number of summation indices the exhaustive search accepts.
const MAX_EXHAUSTIVE_INDICES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Greedy,
    Exhaustive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EinsumStep {
    /// Summed-out index, or `None` for the final product.
    pub eliminate: Option<usize>,
    /// Tensor ids consumed; inputs are `0..num_inputs`, step `k` makes `num_inputs + k`.
    pub inputs: Vec<usize>,
    /// Indices of the produced tensor.
    pub indices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EinsumPlan {
    pub signature: String,
    /// Indices of each input tensor, one per black edge.
    pub inputs: Vec<Vec<usize>>,
    pub steps: Vec<EinsumStep>,
    /// Output indices: `[]`, `[a]` or `[a, b]`.
    pub output: Vec<usize>,
    /// Tensor id holding the output.
    pub result: usize,
    pub peak_order: usize,
    /// Estimated multiply-adds at a nominal dimension.
    pub flops: f64,
}

fn input_indices(h: &MultiGraphH) -> Vec<Vec<usize>> {
    h.edges()
        .iter()
        .map(|&(s, d)| {
            if s == d {
                vec![s as usize]
            } else {
                vec![s as usize, d as usize]
            }
        })
        .collect()
}

fn output_indices(h: &MultiGraphH) -> Vec<usize> {
    match h.red() {
        None => vec![],
        Some((a, b)) if a == b => vec![a],
        Some((a, b)) => vec![a, b],
    }
}

/// Build the plan for a fixed elimination order.
fn build(h: &MultiGraphH, order: &[usize]) -> EinsumPlan {
    let inputs = input_indices(h);
    let output = output_indices(h);
    let mut live: Vec<(usize, Vec<usize>)> = inputs.iter().cloned().enumerate().collect();
    let mut next_id = inputs.len();
    let mut steps = Vec::new();
    let mut peak = inputs.iter().map(Vec::len).max().unwrap_or(0);
    let mut flops = 0.0;
    for &k in order {
        let (used, rest): (Vec<_>, Vec<_>) = live.into_iter().partition(|(_, ix)| ix.contains(&k));
        live = rest;
        let mut union: Vec<usize> = used.iter().flat_map(|(_, ix)| ix.iter().copied()).collect();
        union.push(k);
        union.sort_unstable();
        union.dedup();
        flops += NOMINAL_N.powi(union.len() as i32) * used.len().max(1) as f64;
        union.retain(|&i| i != k);
        peak = peak.max(union.len());
        steps.push(EinsumStep {
            eliminate: Some(k),
            inputs: used.iter().map(|(id, _)| *id).collect(),
            indices: union.clone(),
        });
        live.push((next_id, union));
        next_id += 1;
    }
    let result = match live.as_slice() {
        [(id, ix)] if *ix == output => *id,
        _ => {
            flops += NOMINAL_N.powi(output.len() as i32) * live.len().max(1) as f64;
            peak = peak.max(output.len());
            steps.push(EinsumStep {
                eliminate: None,
                inputs: live.iter().map(|(id, _)| *id).collect(),
                indices: output.clone(),
            });
            next_id
        }
    };
    EinsumPlan {
        signature: h.to_string(),
        inputs,
        steps,
        output,
        result,
        peak_order: peak,
        flops,
    }
}

fn summation_indices(h: &MultiGraphH) -> Vec<usize> {
    (0..h.num_nodes()).filter(|&v| !h.is_red_endpoint(v)).collect()
}

fn greedy_order(h: &MultiGraphH) -> Vec<usize> {
    let mut live: Vec<Vec<usize>> = input_indices(h);
    let mut remaining = summation_indices(h);
    let mut order = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let (pos, _) = remaining
            .iter()
            .enumerate()
            .map(|(pos, &k)| {
                let mut union: Vec<usize> = live
                    .iter()
                    .filter(|ix| ix.contains(&k))
                    .flat_map(|ix| ix.iter().copied())
                    .collect();
                union.push(k);
                union.sort_unstable();
                union.dedup();
                (pos, (union.len() - 1, union.len(), k))
            })
            .min_by_key(|&(_, key)| key)
            .expect("nonempty");
        let k = remaining.remove(pos);
        let (used, mut rest): (Vec<_>, Vec<_>) = live.into_iter().partition(|ix| ix.contains(&k));
        let mut union: Vec<usize> = used.into_iter().flatten().filter(|&i| i != k).collect();
        union.sort_unstable();
        union.dedup();
        rest.push(union);
        live = rest;
        order.push(k);
    }
    order
}

/// Minimum-peak elimination order by dynamic programming over eliminated sets.
fn exhaustive_order(h: &MultiGraphH) -> Result<Vec<usize>> {
    let sum = summation_indices(h);
    let s = sum.len();
    if s > MAX_EXHAUSTIVE_INDICES {
        return Err(Error::ResourceLimit(format!(
            "exhaustive planning supports at most {MAX_EXHAUSTIVE_INDICES} summation indices, `{h}` has {s}"
        )));
    }
    let m = h.num_nodes();
    let mut adj = vec![0u64; m];
    for &(a, b) in h.edges() {
        let (a, b) = (a as usize, b as usize);
        if a != b {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
    }
    // order of the tensor produced by eliminating sum[i] after the set `mask`
    let result_order = |mask: usize, i: usize| -> usize {
        let in_mask = |v: usize| sum.iter().enumerate().any(|(j, &w)| w == v && mask >> j & 1 == 1);
        let start = sum[i];
        let mut seen = 1u64 << start;
        let mut stack = vec![start];
        let mut boundary = 0u64;
        while let Some(u) = stack.pop() {
            let mut nb = adj[u] & !seen;
            seen |= nb;
            while nb != 0 {
                let w = nb.trailing_zeros() as usize;
                nb &= nb - 1;
                if in_mask(w) {
                    stack.push(w);
                } else {
                    boundary |= 1 << w;
                }
            }
        }
        boundary.count_ones() as usize
    };
    // (peak, cost, previous index) per eliminated set
    let full = (1usize << s) - 1;
    let mut best: Vec<Option<(usize, f64, usize)>> = vec![None; 1 << s];
    best[0] = Some((0, 0.0, usize::MAX));
    for mask in 0..=full {
        let Some((peak, cost, _)) = best[mask] else {
            continue;
        };
        for i in (0..s).filter(|&i| mask >> i & 1 == 0) {
            let r = result_order(mask, i);
            let cand = (peak.max(r), cost + NOMINAL_N.powi(r as i32 + 1), i);
            let next = mask | 1 << i;
            let better = match best[next] {
                None => true,
                Some((p, c, _)) => (cand.0, cand.1) < (p, c),
            };
            if better {
                best[next] = Some(cand);
            }
        }
    }
    let mut order = Vec::with_capacity(s);
    let mut mask = full;
    while mask != 0 {
        let (_, _, i) = best[mask].expect("reachable");
        order.push(sum[i]);
        mask &= !(1 << i);
    }
    order.reverse();
    Ok(order)
}

/// Contraction order with peak intermediate order at most `order_cap`.
pub fn plan_path(h: &MultiGraphH, order_cap: usize, strategy: Strategy) -> Result<EinsumPlan> {
    let order = match strategy {
        Strategy::Greedy => greedy_order(h),
        Strategy::Exhaustive => exhaustive_order(h)?,
    };
    let plan = build(h, &order);
    if plan.peak_order > order_cap {
        return Err(Error::NoPlan {
            cap: order_cap,
            signature: h.to_string(),
        });
    }
    Ok(plan)
}

struct Labeled<T> {
    indices: Vec<usize>,
    data: Vec<T>,
}

/// `out[indices] = sum over the other indices of prod inputs`.
fn contract<T: Scalar>(inputs: &[&Labeled<T>], out_indices: &[usize], n: usize, sig: &str) -> Result<Labeled<T>> {
    let mut all: Vec<usize> = out_indices.to_vec();
    for t in inputs {
        for &i in &t.indices {
            if !all.contains(&i) {
                all.push(i);
            }
        }
    }
    let pos = |i: usize| all.iter().position(|&j| j == i).expect("index present");
    let strides = |ix: &[usize]| -> Vec<(usize, usize)> {
        let mut stride = 1;
        let mut out: Vec<(usize, usize)> = ix
            .iter()
            .rev()
            .map(|&i| {
                let s = (pos(i), stride);
                stride *= n;
                s
            })
            .collect();
        out.reverse();
        out
    };
    let in_strides: Vec<Vec<(usize, usize)>> = inputs.iter().map(|t| strides(&t.indices)).collect();
    let out_strides = strides(out_indices);
    let mut out = vec![T::zero(); n.pow(out_indices.len() as u32)];
    let mut assign = vec![0usize; all.len()];
    let overflow = || Error::Overflow(sig.to_string());
    'outer: loop {
        let mut p = T::one();
        for (t, st) in inputs.iter().zip(&in_strides) {
            let flat: usize = st.iter().map(|&(k, s)| assign[k] * s).sum();
            p = p.checked_mul(t.data[flat]).ok_or_else(overflow)?;
        }
        let o: usize = out_strides.iter().map(|&(k, s)| assign[k] * s).sum();
        out[o] = out[o].checked_add(p).ok_or_else(overflow)?;
        for k in (0..all.len()).rev() {
            assign[k] += 1;
            if assign[k] < n {
                continue 'outer;
            }
            assign[k] = 0;
        }
        break;
    }
    Ok(Labeled {
        indices: out_indices.to_vec(),
        data: out,
    })
}

/// Run `plan` on `x`; the output has the shape produced by the naive oracle.
pub fn execute_plan<T: Scalar>(plan: &EinsumPlan, x: &GraphData) -> Result<DenseTensor<T>> {
    let n = x.n();
    if n == 0 {
        return Err(Error::Dimension("graph data has no nodes".into()));
    }
    let xs: Vec<T> = x.to_scalar()?;
    let diag: Vec<T> = (0..n).map(|i| xs[i * n + i]).collect();
    let mut tensors: Vec<Labeled<T>> = plan
        .inputs
        .iter()
        .map(|ix| Labeled {
            indices: ix.clone(),
            data: if ix.len() == 1 { diag.clone() } else { xs.clone() },
        })
        .collect();
    for step in &plan.steps {
        let ins: Vec<&Labeled<T>> = step.inputs.iter().map(|&i| &tensors[i]).collect();
        let t = contract(&ins, &step.indices, n, &plan.signature)?;
        tensors.push(t);
    }
    let out = &tensors[plan.result];
    debug_assert_eq!(out.indices, plan.output);
    Ok(match plan.output.len() {
        0 => DenseTensor::scalar(out.data[0]),
        k => DenseTensor {
            order: k,
            n,
            data: out.data.clone(),
        },
    })
}
