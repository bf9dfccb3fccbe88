//! Brute-force `P_H` and `Q_H`: depth-first over node assignments, multiplying
//! each edge in once both endpoints are assigned.

use super::{output_order, DenseTensor, GraphData, Scalar};
use crate::error::{Error, Result};
use crate::multigraph::MultiGraphH;

/// Cap on `n^m` index assignments for the brute-force oracles.
pub const DEFAULT_NAIVE_BUDGET: u128 = 200_000_000;

struct Walk<'a, T> {
    h: &'a MultiGraphH,
    n: usize,
    x: Vec<T>,
    /// Edges whose later endpoint (in node order) is `v`.
    closing: Vec<Vec<(usize, usize)>>,
    assign: Vec<usize>,
    distinct: bool,
    out: DenseTensor<T>,
}

impl<T: Scalar> Walk<'_, T> {
    fn overflow(&self) -> Error {
        Error::Overflow(self.h.to_string())
    }

    fn go(&mut self, v: usize, acc: T) -> Result<()> {
        if v == self.assign.len() {
            let idx = match self.h.red() {
                None => 0,
                Some((a, b)) if a == b => self.assign[a],
                Some((a, b)) => self.assign[a] * self.n + self.assign[b],
            };
            self.out.data[idx] = self.out.data[idx].checked_add(acc).ok_or_else(|| self.overflow())?;
            return Ok(());
        }
        for i in 0..self.n {
            if self.distinct && self.assign[..v].contains(&i) {
                continue;
            }
            self.assign[v] = i;
            let mut p = acc;
            for k in 0..self.closing[v].len() {
                let (s, d) = self.closing[v][k];
                let e = self.x[self.assign[s] * self.n + self.assign[d]];
                p = p.checked_mul(e).ok_or_else(|| self.overflow())?;
            }
            if p == T::zero() {
                continue;
            }
            self.go(v + 1, p)?;
        }
        Ok(())
    }
}

fn eval<T: Scalar>(h: &MultiGraphH, x: &GraphData, budget: u128, distinct: bool) -> Result<DenseTensor<T>> {
    let (n, m) = (x.n(), h.num_nodes());
    let work = (n as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if work > budget {
        return Err(Error::Budget(format!(
            "{n}^{m} assignments for `{h}` exceed the budget of {budget}"
        )));
    }
    let mut closing = vec![Vec::new(); m];
    for &(s, d) in h.edges() {
        let (s, d) = (s as usize, d as usize);
        closing[s.max(d)].push((s, d));
    }
    let order = output_order(h);
    let mut walk = Walk {
        h,
        n,
        x: x.to_scalar()?,
        closing,
        assign: vec![0; m],
        distinct,
        out: DenseTensor::filled(order, n, T::zero()),
    };
    if order == 0 {
        walk.out = DenseTensor::scalar(T::zero());
    }
    walk.go(0, T::one())?;
    Ok(walk.out)
}

/// `P_H(X)` by summing over all `n^m` assignments.
pub fn eval_naive_p<T: Scalar>(h: &MultiGraphH, x: &GraphData, budget: u128) -> Result<DenseTensor<T>> {
    eval(h, x, budget, false)
}

/// `Q_H(X)`: only pairwise-distinct assignments. Zero when `m > n`.
pub fn eval_naive_q<T: Scalar>(h: &MultiGraphH, x: &GraphData, budget: u128) -> Result<DenseTensor<T>> {
    eval(h, x, budget, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multigraph::parse_signature;

    fn p(s: &str) -> MultiGraphH {
        parse_signature(s, false).unwrap()
    }

    #[test]
    fn constant_is_all_ones() {
        let x = GraphData::general(3, vec![0.5; 9]).unwrap();
        let y: DenseTensor<f64> = eval_naive_p(&p("->ii"), &x, DEFAULT_NAIVE_BUDGET).unwrap();
        assert_eq!(y.data, vec![1.0; 3]);
    }

    #[test]
    fn degree_vector_of_path() {
        let x = GraphData::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let h = parse_signature("ij->ii", true).unwrap();
        let y: DenseTensor<i64> = eval_naive_p(&h, &x, DEFAULT_NAIVE_BUDGET).unwrap();
        let rows: Vec<i64> = (0..3).map(|i| (0..3).map(|j| x.get(i, j) as i64).sum()).collect();
        assert_eq!(y.data, rows);
        assert_eq!(y.data, vec![1, 2, 1]);
    }

    #[test]
    fn four_edge_polynomial_on_complete_directed_graph() {
        let n = 3;
        let vals: Vec<f64> = (0..n * n).map(|k| if k / n == k % n { 0.0 } else { 1.0 }).collect();
        let x = GraphData::general(n, vals).unwrap();
        let y: DenseTensor<i64> = eval_naive_p(&p("il,ik,ij,kj->jj"), &x, DEFAULT_NAIVE_BUDGET).unwrap();
        // direct formula: sum_{i,k,l} X_il X_ik X_ij X_kj
        let xv = |a: usize, b: usize| x.get(a, b) as i64;
        for j in 0..n {
            let mut s = 0;
            for i in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        s += xv(i, l) * xv(i, k) * xv(i, j) * xv(k, j);
                    }
                }
            }
            assert_eq!(y.data[j], s);
        }
        assert_eq!(y.data, vec![4; 3]);
    }

    #[test]
    fn q_vanishes_when_too_many_nodes() {
        let x = GraphData::general(2, vec![1.0; 4]).unwrap();
        let y: DenseTensor<f64> = eval_naive_q(&p("ab,bc->aa"), &x, DEFAULT_NAIVE_BUDGET).unwrap();
        assert_eq!(y.data, vec![0.0; 2]);
    }

    #[test]
    fn q_degree_on_triangle() {
        let x = GraphData::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let h = parse_signature("ij->ii", true).unwrap();
        let y: DenseTensor<i64> = eval_naive_q(&h, &x, DEFAULT_NAIVE_BUDGET).unwrap();
        assert_eq!(y.data, vec![2, 2, 2]);
    }

    #[test]
    fn budget_enforced() {
        let x = GraphData::general(10, vec![0.0; 100]).unwrap();
        let r: Result<DenseTensor<f64>> = eval_naive_p(&p("ab,cd,ef->"), &x, 1000);
        assert!(matches!(r, Err(Error::Budget(_))));
    }
}
