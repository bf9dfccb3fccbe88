//! Evaluation of basis polynomials on graph data.
//!
//! `P_H(X)` sums `prod_{(r,s) in E} X[j_r, j_s]` over all index assignments
//! with the red indices pinned; `Q_H` restricts the sum to pairwise-distinct
//! indices. Outputs are materialized by kind: a scalar for invariant `H`, the
//! diagonal vector for node-valued `H`, and an `n x n` matrix for edge-valued
//! `H`. Everything is generic over [`Scalar`] so binary inputs can be counted
//! exactly in `i64` with overflow detection.

mod counting;
mod einsum;
mod exec;
mod naive;

use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multigraph::{MultiGraphH, OutputKind};

pub use counting::{expand_p_in_q, hom_count, subgraph_count, MAX_EXPANSION_NODES};
pub use einsum::{execute_plan, plan_path, EinsumPlan, EinsumStep, Strategy, DEFAULT_ORDER_CAP};
pub use exec::execute_contraction_plan;
pub use naive::{eval_naive_p, eval_naive_q, DEFAULT_NAIVE_BUDGET};

/// Numeric type for tensor evaluation. Integer implementations report
/// overflow instead of wrapping.
pub trait Scalar: Copy + Debug + PartialEq + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn checked_add(self, other: Self) -> Option<Self>;
    fn checked_mul(self, other: Self) -> Option<Self>;
    fn from_count(n: usize) -> Option<Self>;
    /// Conversion of a data entry; `None` if not representable exactly.
    fn from_data(x: f64) -> Option<Self>;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn checked_add(self, other: Self) -> Option<Self> {
        Some(self + other)
    }
    fn checked_mul(self, other: Self) -> Option<Self> {
        Some(self * other)
    }
    fn from_count(n: usize) -> Option<Self> {
        Some(n as f64)
    }
    fn from_data(x: f64) -> Option<Self> {
        Some(x)
    }
}

impl Scalar for i64 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn checked_add(self, other: Self) -> Option<Self> {
        i64::checked_add(self, other)
    }
    fn checked_mul(self, other: Self) -> Option<Self> {
        i64::checked_mul(self, other)
    }
    fn from_count(n: usize) -> Option<Self> {
        i64::try_from(n).ok()
    }
    fn from_data(x: f64) -> Option<Self> {
        (x.fract() == 0.0 && x.abs() < 9.0e15).then_some(x as i64)
    }
}

/// Kind of graph data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataKind {
    /// Symmetric, binary, zero diagonal.
    Simple,
    General,
}

/// `n x n` graph data: off-diagonal entries are edge values, diagonal
/// entries node values.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphData {
    n: usize,
    values: Vec<f64>,
    kind: DataKind,
}

impl GraphData {
    pub fn general(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::Dimension(format!(
                "expected {} values for n = {n}, got {}",
                n * n,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGraph("graph data must be finite".into()));
        }
        Ok(Self {
            n,
            values,
            kind: DataKind::General,
        })
    }

    /// Validated simple graph from a dense matrix.
    pub fn simple(n: usize, values: Vec<f64>) -> Result<Self> {
        let mut g = Self::general(n, values)?;
        for i in 0..n {
            if g.get(i, i) != 0.0 {
                return Err(Error::InvalidGraph(format!("self-loop at node {i}")));
            }
            for j in 0..n {
                let v = g.get(i, j);
                if v != 0.0 && v != 1.0 {
                    return Err(Error::InvalidGraph(format!("entry ({i},{j}) = {v} is not binary")));
                }
                if v != g.get(j, i) {
                    return Err(Error::InvalidGraph(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
            }
        }
        g.kind = DataKind::Simple;
        Ok(g)
    }

    /// Simple graph from an undirected edge list.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut values = vec![0.0; n * n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge ({u},{v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at node {u}")));
            }
            if values[u * n + v] != 0.0 {
                return Err(Error::InvalidGraph(format!("duplicate edge ({u},{v})")));
            }
            values[u * n + v] = 1.0;
            values[v * n + u] = 1.0;
        }
        Self::simple(n, values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> DataKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn is_binary(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0 || v == 1.0)
    }

    /// Entries converted to `T`; fails if some entry is not representable.
    pub fn to_scalar<T: Scalar>(&self) -> Result<Vec<T>> {
        self.values
            .iter()
            .map(|&v| T::from_data(v).ok_or_else(|| Error::InvalidGraph(format!("entry {v} is not exactly representable"))))
            .collect()
    }
}

/// Dense tensor with every dimension equal to `n`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor<T> {
    pub order: usize,
    pub n: usize,
    pub data: Vec<T>,
}

impl<T: Scalar> DenseTensor<T> {
    pub fn filled(order: usize, n: usize, value: T) -> Self {
        Self {
            order,
            n,
            data: vec![value; n.pow(order as u32)],
        }
    }

    pub fn scalar(value: T) -> Self {
        Self {
            order: 0,
            n: 0,
            data: vec![value],
        }
    }

    pub fn get(&self, idx: &[usize]) -> T {
        debug_assert_eq!(idx.len(), self.order);
        let flat = idx.iter().fold(0, |acc, &i| acc * self.n + i);
        self.data[flat]
    }

    /// Node-valued vectors as diagonal matrices; matrices unchanged.
    pub fn embed_diagonal(&self) -> Self {
        match self.order {
            1 => {
                let mut out = Self::filled(2, self.n, T::zero());
                for i in 0..self.n {
                    out.data[i * self.n + i] = self.data[i];
                }
                out
            }
            _ => self.clone(),
        }
    }
}

impl DenseTensor<f64> {
    /// Max absolute difference relative to the largest magnitude (at least 1).
    pub fn relative_error(&self, other: &Self) -> f64 {
        assert_eq!(self.data.len(), other.data.len(), "shape mismatch");
        let scale = self
            .data
            .iter()
            .chain(&other.data)
            .fold(1.0f64, |m, v| m.max(v.abs()));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
            / scale
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.order == other.order && self.data.len() == other.data.len() && self.relative_error(other) <= tol
    }
}

impl<T: Scalar> DenseTensor<T> {
    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> DenseTensor<U> {
        DenseTensor {
            order: self.order,
            n: self.n,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }
}

/// Output tensor order for `h`.
pub fn output_order(h: &MultiGraphH) -> usize {
    match h.output_kind() {
        OutputKind::Invariant => 0,
        OutputKind::Node => 1,
        OutputKind::Edge => 2,
    }
}

fn check_perm(g: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if g.len() != n || g.iter().any(|&v| v >= n || std::mem::replace(&mut seen[v], true)) {
        return Err(Error::InvalidPartition(format!("not a permutation of 0..{n}: {g:?}")));
    }
    Ok(())
}

/// `(g . X)[i,j] = X[g^-1(i), g^-1(j)]`, i.e. node `v` moves to `g[v]`.
pub fn apply_permutation(x: &GraphData, g: &[usize]) -> Result<GraphData> {
    let n = x.n;
    check_perm(g, n)?;
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            values[g[i] * n + g[j]] = x.get(i, j);
        }
    }
    Ok(GraphData {
        n,
        values,
        kind: x.kind,
    })
}

/// Same action on an output tensor of order 0, 1 or 2.
pub fn conjugate_output<T: Scalar>(t: &DenseTensor<T>, g: &[usize]) -> Result<DenseTensor<T>> {
    if t.order == 0 {
        return Ok(t.clone());
    }
    let n = t.n;
    check_perm(g, n)?;
    let mut out = t.clone();
    match t.order {
        1 => {
            for i in 0..n {
                out.data[g[i]] = t.data[i];
            }
        }
        2 => {
            for i in 0..n {
                for j in 0..n {
                    out.data[g[i] * n + g[j]] = t.data[i * n + j];
                }
            }
        }
        k => return Err(Error::Dimension(format!("cannot conjugate an order-{k} tensor"))),
    }
    Ok(out)
}

/// `P_H(X)` via a planned contraction, falling back to the naive sum when no
/// plan fits under `order_cap`.
pub fn eval_p<T: Scalar>(h: &MultiGraphH, x: &GraphData, order_cap: usize) -> Result<DenseTensor<T>> {
    match plan_path(h, order_cap, Strategy::Greedy).or_else(|_| plan_path(h, order_cap, Strategy::Exhaustive)) {
        Ok(plan) => execute_plan(&plan, x),
        Err(Error::NoPlan { .. }) => eval_naive_p(h, x, DEFAULT_NAIVE_BUDGET),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multigraph::parse_signature;

    #[test]
    fn simple_validation() {
        assert!(GraphData::simple(2, vec![0.0, 1.0, 1.0, 0.0]).is_ok());
        assert!(GraphData::simple(2, vec![1.0, 0.0, 0.0, 0.0]).is_err());
        assert!(GraphData::simple(2, vec![0.0, 1.0, 0.0, 0.0]).is_err());
        assert!(GraphData::simple(2, vec![0.0, 2.0, 2.0, 0.0]).is_err());
        assert!(GraphData::from_edges(3, &[(0, 1), (1, 0)]).is_err());
        assert!(GraphData::general(2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn permutation_round_trip() {
        let x = GraphData::general(3, (0..9).map(f64::from).collect()).unwrap();
        assert_eq!(apply_permutation(&x, &[0, 1, 2]).unwrap(), x);
        let g = [2, 0, 1];
        let inv = [1, 2, 0];
        let y = apply_permutation(&apply_permutation(&x, &g).unwrap(), &inv).unwrap();
        assert_eq!(y, x);
        assert!(apply_permutation(&x, &[0, 0, 1]).is_err());
    }

    #[test]
    fn swapping_equivalent_nodes_keeps_symmetric_data() {
        // path 0-1-2: nodes 0 and 2 are interchangeable
        let x = GraphData::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(apply_permutation(&x, &[2, 1, 0]).unwrap(), x);
    }

    #[test]
    fn eval_p_uses_plan_or_fallback() {
        let x = GraphData::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
        for s in ["ij,jk->ik", "ab,ac,ad,bc,bd,cd->", "ab,ac,bc->aa"] {
            let h = parse_signature(s, false).unwrap();
            let fast: DenseTensor<i64> = eval_p(&h, &x, 2).unwrap();
            let slow: DenseTensor<i64> = eval_naive_p(&h, &x, DEFAULT_NAIVE_BUDGET).unwrap();
            assert_eq!(fast, slow, "{s}");
        }
    }

    #[test]
    fn integer_overflow_is_reported() {
        let n = 8;
        let x = GraphData::general(n, vec![1.0e6; n * n]).unwrap();
        let h = parse_signature("ab,ab,ab,ab->", false).unwrap();
        let r: Result<DenseTensor<i64>> = eval_p(&h, &x, 3);
        assert!(matches!(r, Err(Error::Overflow(_))));
    }
}
