//! Canonical labeling by individualization and refinement.
//!
//! Vertex colors start from label-independent invariants (red role, self-loop
//! count, in/out degree) and are refined by neighbor color multisets until
//! stable. Non-discrete colorings branch on every vertex of the first
//! non-singleton cell. Each discrete leaf is a labeling; the canonical one has
//! the lexicographically smallest sorted edge list. Leaves reaching that
//! minimum differ by automorphisms, so counting them gives `|Aut|`.

use super::MultiGraphH;

pub(crate) struct CanonResult {
    /// `labeling[v]` is the canonical position of node `v`.
    pub labeling: Vec<u8>,
    pub automorphisms: u128,
}

struct Search<'a> {
    h: &'a MultiGraphH,
    m: usize,
    adj: Vec<u32>,
    best: Option<(Vec<(u8, u8)>, Vec<u8>)>,
    ties: u128,
}

pub(crate) fn search(h: &MultiGraphH) -> CanonResult {
    let m = h.num_nodes();
    if m == 0 {
        return CanonResult {
            labeling: Vec::new(),
            automorphisms: 1,
        };
    }
    let mut s = Search {
        h,
        m,
        adj: h.multiplicity_matrix(),
        best: None,
        ties: 0,
    };
    let colors = s.initial_colors();
    s.descend(colors);
    let (_, labeling) = s.best.expect("at least one leaf");
    CanonResult {
        labeling,
        automorphisms: s.ties,
    }
}

/// Replace keys by their dense rank; returns the number of distinct keys.
fn rank<K: Ord + Clone>(keys: &[K], out: &mut [u32]) -> usize {
    let mut sorted: Vec<K> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    for (o, k) in out.iter_mut().zip(keys) {
        *o = sorted.binary_search(k).expect("key present") as u32;
    }
    sorted.len()
}

impl Search<'_> {
    fn initial_colors(&self) -> Vec<u32> {
        let m = self.m;
        let red = self.h.red();
        let keys: Vec<(u8, u32, u32, u32)> = (0..m)
            .map(|v| {
                let role = match red {
                    Some((a, _)) if a == v => 0,
                    Some((_, b)) if b == v => 1,
                    _ => 2,
                };
                let loops = self.adj[v * m + v];
                let out: u32 = (0..m).filter(|&u| u != v).map(|u| self.adj[v * m + u]).sum();
                let inn: u32 = (0..m).filter(|&u| u != v).map(|u| self.adj[u * m + v]).sum();
                (role, loops, out, inn)
            })
            .collect();
        let mut colors = vec![0; m];
        rank(&keys, &mut colors);
        colors
    }

    /// Refine until the number of cells stops growing.
    fn refine(&self, colors: &mut [u32]) -> usize {
        let m = self.m;
        let mut cells = {
            let mut c: Vec<u32> = colors.to_vec();
            c.sort_unstable();
            c.dedup();
            c.len()
        };
        loop {
            if cells == m {
                return cells;
            }
            let keys: Vec<(u32, Vec<(u32, u32, u32)>)> = (0..m)
                .map(|v| {
                    let mut nb: Vec<(u32, u32, u32)> = (0..m)
                        .filter(|&u| u != v)
                        .filter_map(|u| {
                            let (o, i) = (self.adj[v * m + u], self.adj[u * m + v]);
                            (o + i > 0).then_some((colors[u], o, i))
                        })
                        .collect();
                    nb.sort_unstable();
                    (colors[v], nb)
                })
                .collect();
            let next = rank(&keys, colors);
            if next == cells {
                return cells;
            }
            cells = next;
        }
    }

    fn descend(&mut self, mut colors: Vec<u32>) {
        let cells = self.refine(&mut colors);
        if cells == self.m {
            self.leaf(&colors);
            return;
        }
        let mut counts = vec![0usize; self.m];
        for &c in &colors {
            counts[c as usize] += 1;
        }
        let target = counts.iter().position(|&n| n > 1).expect("non-discrete") as u32;
        let members: Vec<usize> = (0..self.m).filter(|&v| colors[v] == target).collect();
        for v in members {
            let next: Vec<u32> = colors
                .iter()
                .enumerate()
                .map(|(w, &c)| 2 * c + u32::from(c == target && w != v))
                .collect();
            self.descend(next);
        }
    }

    fn leaf(&mut self, colors: &[u32]) {
        let mut dense = vec![0u32; self.m];
        rank(colors, &mut dense);
        let colors = &dense;
        let undirected = self.h.is_undirected();
        let mut enc: Vec<(u8, u8)> = self
            .h
            .edges()
            .iter()
            .map(|&(s, d)| {
                let (s, d) = (colors[s as usize] as u8, colors[d as usize] as u8);
                if undirected {
                    (s.min(d), s.max(d))
                } else {
                    (s, d)
                }
            })
            .collect();
        enc.sort_unstable();
        match &self.best {
            Some((b, _)) if *b < enc => {}
            Some((b, _)) if *b == enc => self.ties += 1,
            _ => {
                let labeling = colors.iter().map(|&c| c as u8).collect();
                self.best = Some((enc, labeling));
                self.ties = 1;
            }
        }
    }
}
