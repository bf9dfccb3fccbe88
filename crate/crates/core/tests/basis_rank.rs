//! Linear independence of the degree <= 2 equivariant basis, checked by the
//! rank of its evaluation matrix over random integer inputs, modulo a prime.

use eqpoly::enumerate::{enumerate_basis, DataMode, EnumerationSpec, KindFilter};
use eqpoly::eval::{eval_p, DenseTensor, GraphData};
use eqpoly::molien::cycle_index_series;
use eqpoly::verify::item_rng;
use num_traits::ToPrimitive;
use rand::Rng;

const P: i64 = 1_000_000_007;

fn rank_mod_p(mut rows: Vec<Vec<i64>>, cols: usize) -> usize {
    let inv = |a: i64| {
        let (mut r, mut b, mut e) = (1i64, a, P - 2);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % P;
            }
            b = b * b % P;
            e >>= 1;
        }
        r
    };
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let f = inv(rows[rank][c]);
        for v in rows[rank].iter_mut() {
            *v = *v * f % P;
        }
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[c] != 0 {
                let m = row[c];
                for (v, p) in row.iter_mut().zip(&pivot) {
                    *v = (*v - m * p % P + P) % P;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank of the map from basis coefficients to outputs on `samples` random
/// `n`-node inputs.
fn evaluation_rank(n: usize, samples: usize) -> (usize, usize) {
    let spec = EnumerationSpec::new(2, DataMode::General, KindFilter::Both);
    let basis: Vec<_> = enumerate_basis(&spec).unwrap().into_iter().flatten().collect();
    let mut rng = item_rng(11, n);
    let mut rows = Vec::new();
    for _ in 0..samples {
        let x = GraphData::general(n, (0..n * n).map(|_| rng.gen_range(-50..=50) as f64).collect()).unwrap();
        let cols: Vec<DenseTensor<i64>> = basis
            .iter()
            .map(|h| eval_p::<i64>(h, &x, 3).unwrap().embed_diagonal())
            .collect();
        for k in 0..n * n {
            rows.push(cols.iter().map(|t| t.data[k].rem_euclid(P)).collect());
        }
    }
    (rank_mod_p(rows, basis.len()), basis.len())
}

fn dimension(n: usize) -> usize {
    cycle_index_series(n, 2, 2, 2)
        .coefficients
        .iter()
        .map(|c| c.to_usize().unwrap())
        .sum()
}

#[test]
fn full_rank_once_nodes_suffice() {
    let (rank, size) = evaluation_rank(6, 40);
    assert_eq!(size, 2 + 15 + 117);
    assert_eq!(rank, size);
    assert_eq!(dimension(6), size);
}

#[test]
fn rank_on_four_nodes_is_the_equivariant_dimension() {
    // Graphs with more than four nodes are linearly dependent on four-node
    // inputs, so the rank drops to the dimension of the polynomial space.
    let (rank, size) = evaluation_rank(4, 200);
    let dim = dimension(4);
    assert!(dim < size);
    assert_eq!(rank, dim);
}

#[test]
fn rank_of_small_matrices() {
    assert_eq!(rank_mod_p(vec![vec![1, 2], vec![2, 4]], 2), 1);
    assert_eq!(rank_mod_p(vec![vec![1, 2], vec![3, 4], vec![5, 6]], 2), 2);
    assert_eq!(rank_mod_p(vec![], 3), 0);
}
