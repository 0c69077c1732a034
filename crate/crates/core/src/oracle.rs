//! Exhaustive reference counts over the whole code space.
//!
//! Every code is decoded, merged and classified directly, so the totals here
//! share nothing with the closed forms in [`crate::patterns`] beyond the
//! decoder itself.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::math::DegreeSequence;
use crate::trees::{classify, code_count, codes, decode, merge_top_label, repeated_path, PatternClass, PrueferCode};

/// Weighted pattern census for one degree sequence.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DeltaCensus {
    /// Distinct-label trees (one per code).
    pub trees: u64,
    pub xx: u64,
    /// Indexed by code class 1..=5 (slot 0 unused).
    pub xx_classes: [u64; 6],
    pub xyx: u64,
    /// Keyed by the path end degrees `(d0, d)`.
    pub xyx_slices: BTreeMap<(usize, usize), u64>,
    /// Codes whose repeated path is labeled `0, 1, n-2`, by `(class, d0, d)`,
    /// scaled by the label choices `(n-2)(n-3)`.
    pub xyx_code_classes: BTreeMap<(u8, usize, usize), u64>,
    pub xyzx: u64,
    /// Codes whose repeated path is labeled `0, 2, 1, n-2`, by class 1..=16,
    /// scaled by `(n-2)(n-3)(n-4)`.
    pub xyzx_code_classes: [u64; 17],
    pub free: u64,
}

/// Census for all degree sequences at one `n`, together with consistency
/// counters for the code-class lists.
#[derive(Clone, Debug, Default)]
pub struct MergedCensus {
    pub n: usize,
    pub by_delta: BTreeMap<DegreeSequence, DeltaCensus>,
    /// Codes where the `xx` class list and the tree disagree.
    pub xx_class_conflicts: u64,
    /// Codes with repeated path `0, 1, n-2` that no `xyx` class covers, or the reverse.
    pub xyx_class_conflicts: u64,
    pub xyzx_class_conflicts: u64,
}

/// `xx` code class: the repeated edges `0` and `n - 2` share a vertex.
pub fn xx_code_class(code: &PrueferCode) -> Option<u8> {
    let n = code.n();
    let c = code.entries();
    let (top, other) = (n - 2, n - 1);
    match c.iter().position(|&x| x == 0) {
        None if c.first() == Some(&top) => Some(1),
        None if c.first() == Some(&other) => Some(2),
        None => None,
        Some(0) => Some(3),
        Some(j) if c[j - 1] == top => Some(4),
        Some(j) if c[j - 1] == other => Some(5),
        Some(_) => None,
    }
}

/// `xyx` code class for the repeated path labeled `0, 1, n - 2`.
pub fn xyx_code_class(code: &PrueferCode) -> Option<u8> {
    let n = code.n();
    let c = code.entries();
    let (top, other) = (n - 2, n - 1);
    let first = |x: usize| c.iter().position(|&y| y == x);
    match first(0) {
        None => {
            if c.len() < 2 || c[0] != 1 {
                return None;
            }
            match c[1] {
                x if x == top => Some(1),
                x if x == other => Some(2),
                1 => Some(3),
                _ => None,
            }
        }
        Some(j) => {
            if j == 0 || c[j - 1] != 1 {
                return None;
            }
            let f1 = first(1).expect("c[j-1] is 1");
            if f1 == 0 {
                return Some(if j == 1 { 4 } else { 5 });
            }
            let direct = f1 == j - 1;
            match (c[f1 - 1], direct) {
                (x, true) if x == top => Some(6),
                (x, true) if x == other => Some(7),
                (x, false) if x == top => Some(8),
                (x, false) if x == other => Some(9),
                _ => None,
            }
        }
    }
}

/// `xyzx` code class for the repeated path labeled `0, 2, 1, n - 2`.
pub fn xyzx_code_class(code: &PrueferCode) -> Option<u8> {
    let n = code.n();
    let c = code.entries();
    let (top, other) = (n - 2, n - 1);
    let first = |x: usize| c.iter().position(|&y| y == x);
    match first(0) {
        None => {
            if c.len() < 3 || c[0] != 1 || c[1] != 2 {
                return None;
            }
            match c[2] {
                x if x == top => Some(1),
                x if x == other => Some(2),
                1 => Some(3),
                2 => Some(4),
                _ => None,
            }
        }
        Some(j) => {
            if j == 0 || c[j - 1] != 2 {
                return None;
            }
            let f2 = first(2).expect("c[j-1] is 2");
            if f2 == 0 || c[f2 - 1] != 1 {
                return None;
            }
            let f1 = first(1).expect("c[f2-1] is 1");
            let sub = match (f1 + 1 == f2, f2 + 1 == j) {
                (true, true) => 0,
                (false, true) => 1,
                (true, false) => 2,
                (false, false) => 3,
            };
            if f1 == 0 {
                Some(5 + sub)
            } else if c[f1 - 1] == top {
                Some(9 + sub)
            } else if c[f1 - 1] == other {
                Some(13 + sub)
            } else {
                None
            }
        }
    }
}

/// Decodes and classifies every code for trees on `n` vertices.
pub fn merged_census(n: usize) -> Result<MergedCensus> {
    let mut census = MergedCensus { n, ..Default::default() };
    let top = n - 2;
    let weight = (n - 2) as u64;
    let xyx_scale = weight * (n as u64).saturating_sub(3);
    let xyzx_scale = xyx_scale * (n as u64).saturating_sub(4);
    for code in codes(n, 0..code_count(n))? {
        let tree = decode(&code)?;
        let entry = census.by_delta.entry(tree.degree_sequence()).or_default();
        entry.trees += 1;
        let merged = merge_top_label(&tree)?;
        let class = classify(&merged)?;
        // merged edges are sorted by original label, so edge index = label
        let path_labels = repeated_path(&merged)?.edges;

        let xx_class = xx_code_class(&code);
        if xx_class.is_some() != (class == PatternClass::Xx) {
            census.xx_class_conflicts += 1;
        }
        match class {
            PatternClass::Xx => {
                entry.xx += weight;
                if let Some(k) = xx_class {
                    entry.xx_classes[k as usize] += weight;
                }
            }
            PatternClass::Xyx { end_degrees } => {
                entry.xyx += weight;
                *entry.xyx_slices.entry(end_degrees).or_default() += weight;
            }
            PatternClass::Xyzx => entry.xyzx += weight,
            PatternClass::Free { .. } => entry.free += weight,
        }

        let xyx_class = if n >= 5 { xyx_code_class(&code) } else { None };
        if xyx_class.is_some() != (path_labels == [0, 1, top]) {
            census.xyx_class_conflicts += 1;
        }
        if let (Some(k), PatternClass::Xyx { end_degrees: (d0, d) }) = (xyx_class, class) {
            *entry.xyx_code_classes.entry((k, d0, d)).or_default() += xyx_scale;
        }

        let xyzx_class = if n >= 6 { xyzx_code_class(&code) } else { None };
        if n >= 6 && xyzx_class.is_some() != (path_labels == [0, 2, 1, top]) {
            census.xyzx_class_conflicts += 1;
        }
        if let Some(k) = xyzx_class {
            entry.xyzx_code_classes[k as usize] += xyzx_scale;
        }
    }
    Ok(census)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn census_at_five() {
        let census = merged_census(5).unwrap();
        let total: u64 = census.by_delta.values().map(|c| c.xx + c.xyx + c.xyzx + c.free).sum();
        assert_eq!(total, 3 * 25);
        assert_eq!(census.by_delta.values().map(|c| c.trees).sum::<u64>(), 25);
        assert_eq!(census.xx_class_conflicts, 0);
        assert_eq!(census.xyx_class_conflicts, 0);
    }

    #[test]
    fn class_examples() {
        let code = |e: Vec<usize>| PrueferCode::new(e.len() + 3, e).unwrap();
        assert_eq!(xx_code_class(&code(vec![4, 1, 1])), Some(1));
        assert_eq!(xx_code_class(&code(vec![1, 4, 0])), Some(4));
        assert_eq!(xx_code_class(&code(vec![1, 2, 3])), None);
        assert_eq!(xyx_code_class(&code(vec![1, 0, 3])), Some(4));
        assert_eq!(xyx_code_class(&code(vec![4, 1, 0])), Some(6));
        assert_eq!(xyzx_code_class(&code(vec![1, 2, 0])), Some(5));
        assert_eq!(xyzx_code_class(&code(vec![1, 2, 4])), Some(1));
    }
}
