//! Exact basis counts from weighted cycle indices.
//!
//! The number of degree-`c` polynomials `R^{n^k} -> R^{n^d}` that commute with
//! node permutations is the coefficient of `x^c` in
//!
//! ```text
//! 1/n! * sum_sigma m_1(sigma)^d * prod_{orbits O of sigma on [n]^k} 1/(1 - x^|O|)
//! ```
//!
//! Conjugacy classes are integer partitions, so the sum runs over partitions
//! weighted by class size. A tuple of cycles with lengths `j_1..j_k` splits
//! into `prod j_t / lcm(j)` orbits of length `lcm(j)`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::par;

/// Truncated power series with exact non-negative integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerSeries {
    pub coefficients: Vec<BigUint>,
    pub order: usize,
}

impl PowerSeries {
    fn zero(order: usize) -> Self {
        Self {
            coefficients: vec![BigUint::zero(); order + 1],
            order,
        }
    }

    fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coefficients[0] = BigUint::one();
        s
    }

    /// Multiply in place by `(1 - x^len)^(-exp)`.
    fn mul_geometric_power(&mut self, len: usize, exp: u64) {
        if exp == 0 || len > self.order {
            return;
        }
        // coefficient of x^(len*i) in (1 - x^len)^(-exp) is C(exp + i - 1, i)
        let steps = self.order / len;
        let mut factor = Vec::with_capacity(steps + 1);
        let mut c = BigUint::one();
        factor.push(c.clone());
        for i in 1..=steps as u64 {
            c = c * BigUint::from(exp + i - 1) / BigUint::from(i);
            factor.push(c.clone());
        }
        let mut next = vec![BigUint::zero(); self.order + 1];
        for (p, a) in self.coefficients.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (i, f) in factor.iter().enumerate() {
                let q = p + i * len;
                if q > self.order {
                    break;
                }
                next[q] += a * f;
            }
        }
        self.coefficients = next;
    }

    /// Coefficients as `u64`, if all fit.
    pub fn to_u64(&self) -> Option<Vec<u64>> {
        self.coefficients.iter().map(|c| u64::try_from(c).ok()).collect()
    }
}

/// Cycle type of a permutation: `m[t]` counts cycles of length `t + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    pub m: Vec<usize>,
}

impl Partition {
    pub fn size(&self) -> usize {
        self.m.iter().enumerate().map(|(t, &c)| (t + 1) * c).sum()
    }

    /// Centralizer order `prod_t t^{m_t} m_t!`.
    pub fn centralizer(&self) -> BigUint {
        let mut z = BigUint::one();
        for (t, &c) in self.m.iter().enumerate() {
            for i in 1..=c {
                z *= BigUint::from((t + 1) * i);
            }
        }
        z
    }

    /// (cycle length, count) pairs with nonzero count.
    fn cycles(&self) -> Vec<(usize, usize)> {
        self.m
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(t, &c)| (t + 1, c))
            .collect()
    }
}

/// All partitions of `n`, each exactly once.
pub fn partitions(n: usize) -> Vec<Partition> {
    fn go(rest: usize, max: usize, m: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition { m: m.clone() });
            return;
        }
        for part in (1..=max.min(rest)).rev() {
            m[part - 1] += 1;
            go(rest - part, part, m, out);
            m[part - 1] -= 1;
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut vec![0; n], &mut out);
    out
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// Generating function for polynomials `R^{n^k} -> R^{n^d}` equivariant
/// under `S_n`, truncated at `order`. `k >= 1`.
pub fn cycle_index_series(n: usize, k: u32, d: u32, order: usize) -> PowerSeries {
    assert!(k >= 1, "input tensor order must be positive");
    assert!(n >= 1, "node count must be positive");
    let parts = partitions(n);
    let n_fact = factorial(n);
    let terms = par::map(&parts, |p| partition_term(p, &n_fact, k, d, order));
    let mut total = PowerSeries::zero(order);
    for t in terms {
        for (acc, c) in total.coefficients.iter_mut().zip(t.coefficients) {
            *acc += c;
        }
    }
    for c in &mut total.coefficients {
        let (q, r) = c.div_rem(&n_fact);
        assert!(r.is_zero(), "cycle index sum is not integral");
        *c = q;
    }
    total
}

/// `|class| * m_1^d * prod_orbits 1/(1 - x^len)` for one partition.
fn partition_term(p: &Partition, n_fact: &BigUint, k: u32, d: u32, order: usize) -> PowerSeries {
    let fixed = p.m.first().copied().unwrap_or(0);
    let weight = BigUint::from(fixed).pow(d);
    if weight.is_zero() {
        return PowerSeries::zero(order);
    }
    let scale = n_fact / p.centralizer() * weight;

    // exponent per orbit length, summed over all k-tuples of cycle lengths
    let cycles = p.cycles();
    let mut exps: Vec<u64> = vec![0; order + 1];
    let mut idx = vec![0usize; k as usize];
    loop {
        let mut len = 1usize;
        let mut count = 1u64;
        for &i in &idx {
            let (j, c) = cycles[i];
            len = len.lcm(&j);
            count *= (c * j) as u64;
        }
        if len <= order {
            exps[len] += count / len as u64;
        }
        // next tuple
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                let mut s = PowerSeries::one(order);
                for (len, &e) in exps.iter().enumerate().skip(1) {
                    s.mul_geometric_power(len, e);
                }
                for c in &mut s.coefficients {
                    *c *= &scale;
                }
                return s;
            }
            idx[pos] += 1;
            if idx[pos] < cycles.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Degree-by-degree counts of invariant polynomials on `n`-node graph data.
pub fn molien_invariant(n: usize, order: usize) -> PowerSeries {
    cycle_index_series(n, 2, 0, order)
}

/// Degree-by-degree counts of equivariant polynomials `R^{n^2} -> R^{n^2}`.
pub fn molien_equivariant(n: usize, order: usize) -> PowerSeries {
    cycle_index_series(n, 2, 2, order)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountKind {
    Invariant,
    Equivariant,
}

/// Node count at which every coefficient up to `order` has stabilized.
pub fn stable_node_count(kind: CountKind, order: usize) -> usize {
    match kind {
        CountKind::Invariant => (2 * order).max(1),
        CountKind::Equivariant => 2 * (order + 1),
    }
}

/// Counts in the large-`n` limit.
pub fn asymptotic_counts(kind: CountKind, order: usize) -> PowerSeries {
    let n = stable_node_count(kind, order);
    match kind {
        CountKind::Invariant => molien_invariant(n, order),
        CountKind::Equivariant => molien_equivariant(n, order),
    }
}
