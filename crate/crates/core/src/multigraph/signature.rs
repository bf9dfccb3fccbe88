//! Einsum-style text form: `il,ik,ij,kj->jj`.
//!
//! Each input term is two lowercase labels (source then target). The output
//! side is either empty (invariant) or two labels naming the red pair. A graph
//! with no black edges is written `->xy`, `->xx`, or `->` for the empty
//! invariant graph. Labels get node ids in order of first appearance.

use super::{MultiGraphH, MAX_NODES};
use crate::error::{Error, Result};

pub fn parse_signature(text: &str, undirected: bool) -> Result<MultiGraphH> {
    let fail = |reason: &str| Error::Signature {
        text: text.to_string(),
        reason: reason.to_string(),
    };
    let (lhs, rhs) = text.split_once("->").ok_or_else(|| fail("missing `->`"))?;
    if rhs.contains("->") {
        return Err(fail("more than one `->`"));
    }

    let mut labels: Vec<u8> = Vec::new();
    let mut id_of = |c: u8| -> Result<usize> {
        if !c.is_ascii_lowercase() {
            return Err(fail(&format!("label `{}` is not in [a-z]", c as char)));
        }
        Ok(match labels.iter().position(|&l| l == c) {
            Some(i) => i,
            None => {
                labels.push(c);
                labels.len() - 1
            }
        })
    };

    let mut edges = Vec::new();
    if !lhs.is_empty() {
        for term in lhs.split(',') {
            let b = term.as_bytes();
            if b.len() != 2 {
                return Err(fail(&format!("term `{term}` must have exactly two labels")));
            }
            edges.push((id_of(b[0])?, id_of(b[1])?));
        }
    }

    let red = match rhs.as_bytes() {
        [] => None,
        [a, b] => Some((id_of(*a)?, id_of(*b)?)),
        _ => return Err(fail("output must be empty or two labels")),
    };
    if labels.len() > MAX_NODES {
        return Err(fail("too many labels"));
    }
    MultiGraphH::relaxed(labels.len(), edges, red, undirected)
}

/// Canonical signature text of `h`.
pub fn to_signature(h: &MultiGraphH) -> String {
    h.signature().0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multigraph::OutputKind;

    #[test]
    fn parses_directed_examples() {
        let h = parse_signature("il,ik,ij,kj->jj", false).unwrap();
        assert_eq!(h.num_nodes(), 4);
        assert_eq!(h.degree(), 4);
        assert_eq!(h.output_kind(), OutputKind::Node);
        // i=0, l=1, k=2, j=3
        assert_eq!(h.red(), Some((3, 3)));
        assert_eq!(h.edges(), &[(0, 1), (0, 2), (0, 3), (2, 3)]);

        let e = parse_signature("il,ik,ij,kj->ij", false).unwrap();
        assert_eq!(e.edges(), h.edges());
        assert_eq!(e.red(), Some((0, 3)));
    }

    #[test]
    fn parses_constant_and_invariant_forms() {
        let c = parse_signature("->ii", false).unwrap();
        assert_eq!((c.num_nodes(), c.degree(), c.red()), (1, 0, Some((0, 0))));
        let e = parse_signature("->ij", false).unwrap();
        assert_eq!((e.num_nodes(), e.red()), (2, Some((0, 1))));
        let empty = parse_signature("->", false).unwrap();
        assert_eq!((empty.num_nodes(), empty.red()), (0, None));
        let inv = parse_signature("ij,jk->", false).unwrap();
        assert_eq!(inv.output_kind(), OutputKind::Invariant);
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["ij", "ijk->ii", "i->ii", "ij->i", "ij->ijk", ",ij->ii", "iJ->ii", "ij->->ii", "ij,->ii"] {
            assert!(parse_signature(bad, false).is_err(), "{bad}");
        }
    }

    #[test]
    fn round_trip_through_canonical_text() {
        for s in ["->ij", "->ii", "ij,jk,ik->ii", "il,ik,ij,kj->ij", "aa,ab,ba->"] {
            let h = parse_signature(s, false).unwrap();
            let t = to_signature(&h);
            let back = parse_signature(&t, false).unwrap();
            assert_eq!(to_signature(&back), t);
            assert_eq!(back.canonicalize().0, h.canonicalize().0);
        }
        assert_eq!(to_signature(&parse_signature("->ij", false).unwrap()), "->ab");
    }
}
