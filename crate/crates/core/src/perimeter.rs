//! Perimeter of the polycube behind an edge-labeled tree, by pattern class.
//!
//! Start from the perimeter `2dn - 2(n-1)` that ignores shared empty cells
//! and subtract one for every pair of tree edges meeting at a vertex (each
//! such pair spans a plane whose corner cell is shared). The pattern classes
//! adjust that count where the repeated label breaks the picture.

use crate::math::DegreeSequence;
use crate::trees::{classify, EdgeLabeledTree, PatternClass};
use crate::error::Result;

fn halve(x: i64, what: &str) -> i64 {
    assert!(x % 2 == 0, "formula misuse in {what}: {x} is odd");
    x / 2
}

/// Perimeter of `n` cells in `d` dimensions if no empty neighbour were shared.
pub fn t_star(n: usize, d: usize) -> i64 {
    let (n, d) = (n as i64, d as i64);
    2 * d * n - 2 * (n - 1)
}

/// Perimeter of a polycube proper in `n - 1` dimensions with adjacency
/// degree sequence `delta`.
pub fn t1(delta: &DegreeSequence) -> i64 {
    let n = delta.n() as i64;
    (2 * n - 1) * (n - 1) - halve(delta.sum_squares(), "t1")
}

/// Default perimeter in `n - 2` dimensions (no error pattern). Meaningful for `n >= 4`.
pub fn t2(delta: &DegreeSequence) -> i64 {
    debug_assert!(delta.n() >= 4);
    let n = delta.n() as i64;
    (2 * n * n - 5 * n + 1) - halve(delta.sum_squares(), "t2")
}

/// Two adjacent edges with the same label, pointing the same way: one fewer
/// shared corner.
pub fn t_xx(delta: &DegreeSequence) -> i64 {
    t2(delta) + 1
}

/// The quadrilateral case; `end_a`, `end_b` are the tree degrees of the two
/// cells joined by the edge missing from the spanning tree.
pub fn t_xyx(delta: &DegreeSequence, end_a: usize, end_b: usize) -> i64 {
    t2(delta) - (end_a as i64 - 1) - (end_b as i64 - 1)
}

pub fn t_xyzx(delta: &DegreeSequence) -> i64 {
    t2(delta) - 1
}

/// How the two equally-labeled edges point when the path through both of
/// them is walked from one end to the other.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    /// Both steps go the same way along the shared axis.
    Aligned,
    /// The steps cancel.
    Opposed,
}

/// Perimeter of the polycube given by a merged-label tree whose repeated
/// edges have the given relative orientation, or `None` when that
/// orientation makes two cells collide.
pub fn predict_merged(tree: &EdgeLabeledTree, orientation: Orientation) -> Result<Option<i64>> {
    let delta = tree.degree_sequence();
    let class = classify(tree)?;
    Ok(match (class, orientation) {
        (PatternClass::Xx, Orientation::Aligned) => Some(t_xx(&delta)),
        (PatternClass::Xx, Orientation::Opposed) => None,
        (PatternClass::Xyx { end_degrees: (a, b) }, Orientation::Opposed) => Some(t_xyx(&delta, a, b)),
        (PatternClass::Xyzx, Orientation::Opposed) => Some(t_xyzx(&delta)),
        _ => Some(t2(&delta)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(d: &[usize]) -> DegreeSequence {
        DegreeSequence::new(d.to_vec()).unwrap()
    }

    #[test]
    fn star_values() {
        assert_eq!(t_star(4, 3), 18);
        assert_eq!(t_star(1, 5), 10);
        assert_eq!(t_star(2, 1), 2);
    }

    #[test]
    fn t1_values() {
        assert_eq!(t1(&seq(&[1, 1, 1, 3])), 15);
        assert_eq!(t1(&seq(&[1, 2, 2, 1])), 16);
        assert_eq!(t1(&seq(&[1, 1])), 2);
    }

    #[test]
    fn n_minus_two_values() {
        let path = seq(&[1, 2, 2, 1]);
        let star = seq(&[1, 1, 1, 3]);
        assert_eq!(t2(&path), 8);
        assert_eq!(t2(&star), 7);
        assert_eq!(t_xx(&path), 9);
        assert_eq!(t_xx(&star), 8);
        assert_eq!(t_xyx(&path, 1, 1), 8);
        let p5 = seq(&[1, 1, 2, 2, 2]);
        assert_eq!(t_xyx(&p5, 1, 2), t2(&p5) - 1);
        assert_eq!(t_xyzx(&p5), t2(&p5) - 1);
    }

    #[test]
    fn t2_is_star_minus_corners() {
        for n in 4..12 {
            for delta in crate::math::degree_sequences(n).unwrap() {
                let corners: i64 = delta.degrees().iter().map(|&d| (d * (d - 1) / 2) as i64).sum();
                assert_eq!(t2(&delta), t_star(n, n - 2) - corners);
                assert_eq!(t1(&delta), t_star(n, n - 1) - corners);
            }
        }
    }

    #[test]
    fn prediction_by_orientation() {
        let xx = EdgeLabeledTree::from_triples(4, &[(0, 1, 0), (1, 2, 0), (2, 3, 1)]).unwrap();
        assert_eq!(predict_merged(&xx, Orientation::Aligned).unwrap(), Some(9));
        assert_eq!(predict_merged(&xx, Orientation::Opposed).unwrap(), None);
        let square = EdgeLabeledTree::from_triples(4, &[(0, 1, 0), (1, 2, 1), (2, 3, 0)]).unwrap();
        assert_eq!(predict_merged(&square, Orientation::Opposed).unwrap(), Some(8));
        assert_eq!(predict_merged(&square, Orientation::Aligned).unwrap(), Some(8));
    }
}
