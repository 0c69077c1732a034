//! Edge-labeled trees and their Prüfer-like code.
//!
//! A proper polycube in `n - 1` dimensions is an edge-labeled tree (labels
//! are axes). In `n - 2` dimensions one label is used twice; such trees are
//! handled here in "merged" mode, where label `0` occurs on two edges.
//!
//! Trees are vertex-anonymous: vertex numbers are an artifact of storage and
//! two trees are the same when their [`EdgeLabeledTree::canonical_form`]s agree.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::math::{exact_div, multinomial, BigCount, DegreeSequence};

/// Largest `n` for which [`all_merged_trees`] runs by default.
pub const MERGED_TREE_LIMIT: usize = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LabeledEdge {
    pub a: usize,
    pub b: usize,
    pub label: usize,
}

impl LabeledEdge {
    fn other(&self, x: usize) -> usize {
        if self.a == x {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LabelMode {
    /// Labels are `0..=n-2`, each once.
    Distinct,
    /// Labels are `{0, 0, 1, ..., n-3}`.
    Merged,
}

#[derive(Clone, Debug)]
pub struct EdgeLabeledTree {
    n: usize,
    edges: Vec<LabeledEdge>,
    mode: LabelMode,
}

impl PartialEq for EdgeLabeledTree {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.canonical_form() == other.canonical_form()
    }
}

impl Eq for EdgeLabeledTree {}

impl EdgeLabeledTree {
    /// Checks connectivity, acyclicity and that the labels fit one of the two
    /// [`LabelMode`]s.
    pub fn new(n: usize, edges: Vec<LabeledEdge>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("a tree needs at least 2 vertices, got {n}")));
        }
        if edges.len() != n - 1 {
            return Err(Error::InvalidInput(format!(
                "a tree on {n} vertices has {} edges, got {}",
                n - 1,
                edges.len()
            )));
        }
        if let Some(e) = edges.iter().find(|e| e.a >= n || e.b >= n || e.a == e.b) {
            return Err(Error::InvalidInput(format!("bad edge {e:?} for n = {n}")));
        }
        let mut dsu: Vec<usize> = (0..n).collect();
        fn find(dsu: &mut [usize], mut x: usize) -> usize {
            while dsu[x] != x {
                dsu[x] = dsu[dsu[x]];
                x = dsu[x];
            }
            x
        }
        for e in &edges {
            let (ra, rb) = (find(&mut dsu, e.a), find(&mut dsu, e.b));
            if ra == rb {
                return Err(Error::InvalidInput("edges contain a cycle".into()));
            }
            dsu[ra] = rb;
        }
        let mut labels: Vec<usize> = edges.iter().map(|e| e.label).collect();
        labels.sort_unstable();
        let distinct = labels.iter().enumerate().all(|(k, &l)| l == k);
        let merged = n >= 3 && labels[0] == 0 && labels[1] == 0 && labels[2..].iter().enumerate().all(|(k, &l)| l == k + 1);
        let mode = if distinct {
            LabelMode::Distinct
        } else if merged {
            LabelMode::Merged
        } else {
            return Err(Error::InvalidInput(format!("label multiset {labels:?} fits neither labeling mode")));
        };
        Ok(Self { n, edges, mode })
    }

    /// Convenience constructor from `(a, b, label)` triples.
    pub fn from_triples(n: usize, triples: &[(usize, usize, usize)]) -> Result<Self> {
        Self::new(n, triples.iter().map(|&(a, b, label)| LabeledEdge { a, b, label }).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[LabeledEdge] {
        &self.edges
    }

    pub fn mode(&self) -> LabelMode {
        self.mode
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for e in &self.edges {
            deg[e.a] += 1;
            deg[e.b] += 1;
        }
        deg
    }

    pub fn degree_sequence(&self) -> DegreeSequence {
        DegreeSequence::new(self.degrees()).expect("a tree has a valid degree sequence")
    }

    /// Per vertex, the sorted list of incident labels; the list of those,
    /// sorted. For distinct labels this determines the tree up to vertex
    /// renumbering.
    pub fn canonical_form(&self) -> Vec<Vec<usize>> {
        let mut incident = vec![Vec::new(); self.n];
        for e in &self.edges {
            incident[e.a].push(e.label);
            incident[e.b].push(e.label);
        }
        for v in &mut incident {
            v.sort_unstable();
        }
        incident.sort();
        incident
    }

    /// Adjacency lists of `(neighbour, edge index)`.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.n];
        for (k, e) in self.edges.iter().enumerate() {
            adj[e.a].push((e.b, k));
            adj[e.b].push((e.a, k));
        }
        adj
    }

    fn edge_with_label(&self, label: usize) -> Option<&LabeledEdge> {
        self.edges.iter().find(|e| e.label == label)
    }
}

/// The code of an edge-labeled tree on `n` vertices: `n - 3` entries from `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrueferCode {
    n: usize,
    entries: Vec<usize>,
}

impl PrueferCode {
    pub fn new(n: usize, entries: Vec<usize>) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidInput(format!("codes need n >= 3, got {n}")));
        }
        if entries.len() != n - 3 {
            return Err(Error::InvalidInput(format!(
                "code for n = {n} has length {}, got {}",
                n - 3,
                entries.len()
            )));
        }
        if let Some(&x) = entries.iter().find(|&&x| x >= n) {
            return Err(Error::InvalidInput(format!("code entry {x} outside 0..{n}")));
        }
        Ok(Self { n, entries })
    }

    /// The `index`-th code in base-`n` odometer order (first entry most significant).
    pub fn from_index(n: usize, mut index: u64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidInput(format!("codes need n >= 3, got {n}")));
        }
        let mut entries = vec![0; n - 3];
        for slot in entries.iter_mut().rev() {
            *slot = (index % n as u64) as usize;
            index /= n as u64;
        }
        if index != 0 {
            return Err(Error::InvalidInput(format!("code index out of range for n = {n}")));
        }
        Ok(Self { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    /// `S = (n - 2, C)`.
    pub fn s_sequence(&self) -> Vec<usize> {
        let mut s = Vec::with_capacity(self.n - 2);
        s.push(self.n - 2);
        s.extend_from_slice(&self.entries);
        s
    }
}

/// Number of codes for trees on `n` vertices, `n^(n-3)`.
pub fn code_count(n: usize) -> u64 {
    (n as u64).pow(n.saturating_sub(3) as u32)
}

/// Codes with odometer index in `range`. Disjoint ranges cover disjoint sets
/// of trees, so the code space can be split for parallel oracle runs.
pub fn codes(n: usize, range: std::ops::Range<u64>) -> Result<impl Iterator<Item = PrueferCode>> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("codes need n >= 3, got {n}")));
    }
    let end = range.end.min(code_count(n));
    Ok((range.start..end).map(move |k| PrueferCode::from_index(n, k).expect("in range")))
}

/// The tree with edge `n - 2` subdivided by an extra vertex `v`, rooted at `v`.
struct Subdivided {
    /// `n + 1` vertices; `v` is index `n`.
    parent: Vec<Option<(usize, usize)>>,
    /// Leaf edges of the original tree other than `n - 2`, ascending.
    leaf_edges: Vec<(usize, usize)>,
}

impl Subdivided {
    fn build(tree: &EdgeLabeledTree) -> Self {
        let n = tree.n;
        let adj = tree.adjacency();
        let deg = tree.degrees();
        let top = n - 2;
        let mut leaf_edges: Vec<(usize, usize)> = tree
            .edges
            .iter()
            .filter(|e| e.label != top)
            .filter_map(|e| {
                if deg[e.a] == 1 {
                    Some((e.label, e.a))
                } else if deg[e.b] == 1 {
                    Some((e.label, e.b))
                } else {
                    None
                }
            })
            .collect();
        leaf_edges.sort_unstable();
        let split = *tree.edge_with_label(top).expect("distinct labels contain n-2");
        // Which endpoint of edge n-2 lies on the side of the smallest leaf edge?
        let target = leaf_edges[0].1;
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([split.a]);
        seen[split.a] = true;
        seen[split.b] = true;
        let mut a_side = false;
        while let Some(x) = queue.pop_front() {
            if x == target {
                a_side = true;
                break;
            }
            for &(y, _) in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        let (inherits, fresh) = if a_side { (split.a, split.b) } else { (split.b, split.a) };
        let v = n;
        let mut parent = vec![None; n + 1];
        parent[inherits] = Some((v, top));
        parent[fresh] = Some((v, n - 1));
        let mut queue = VecDeque::from([inherits, fresh]);
        let mut visited = vec![false; n + 1];
        visited[v] = true;
        visited[inherits] = true;
        visited[fresh] = true;
        while let Some(x) = queue.pop_front() {
            for &(y, k) in &adj[x] {
                if tree.edges[k].label == top || visited[y] {
                    continue;
                }
                visited[y] = true;
                parent[y] = Some((x, tree.edges[k].label));
                queue.push_back(y);
            }
        }
        Self { parent, leaf_edges }
    }

    fn s_sequence(&self, n: usize) -> Vec<usize> {
        let mut in_s = vec![false; n];
        let mut s = Vec::with_capacity(n - 2);
        for &(_, leaf) in &self.leaf_edges {
            let (mut x, _) = self.parent[leaf].expect("leaf has a parent");
            let mut walked = Vec::new();
            loop {
                let (up, label) = self.parent[x].expect("path reaches v");
                walked.push(label);
                if label >= n - 2 || in_s[label] {
                    break;
                }
                x = up;
            }
            for &label in walked.iter().rev() {
                in_s[label] = true;
                s.push(label);
            }
        }
        s
    }
}

/// Forward construction of the code. Needs distinct labels and `n >= 3`.
pub fn encode(tree: &EdgeLabeledTree) -> Result<PrueferCode> {
    if tree.mode != LabelMode::Distinct {
        return Err(Error::InvalidInput("encode needs distinct labels 0..=n-2".into()));
    }
    if tree.n < 3 {
        return Err(Error::InvalidInput(format!("encode needs n >= 3, got {}", tree.n)));
    }
    let s = Subdivided::build(tree).s_sequence(tree.n);
    debug_assert_eq!(s.len(), tree.n - 2);
    debug_assert_eq!(s[0], tree.n - 2);
    PrueferCode::new(tree.n, s[1..].to_vec())
}

/// Reverse construction: rebuilds the tree from its code.
pub fn decode(code: &PrueferCode) -> Result<EdgeLabeledTree> {
    let n = code.n;
    let s = code.s_sequence();
    let mut in_s = vec![false; n];
    for &x in &s {
        in_s[x] = true;
    }
    let leaves: Vec<usize> = (0..n - 1).filter(|&l| !in_s[l]).collect();

    // cut S before every entry that is n-2, n-1 or a repeat
    let mut segments: Vec<Vec<usize>> = Vec::new();
    let mut seen = vec![false; n];
    for &x in &s {
        if x >= n - 2 || seen[x] {
            segments.push(Vec::new());
        }
        seen[x] = true;
        segments.last_mut().expect("S starts with n-2").push(x);
    }
    if segments.len() != leaves.len() {
        return Err(Error::InvalidInput(format!(
            "code {:?} splits into {} paths but has {} leaf labels",
            code.entries,
            segments.len(),
            leaves.len()
        )));
    }

    // vertex 0 is v; edge n-1 is (v, 1), edge n-2 is (v, 2)
    let mut far = vec![usize::MAX; n];
    far[n - 1] = 1;
    far[n - 2] = 2;
    let mut next_vertex = 3;
    let mut edges: Vec<LabeledEdge> = Vec::with_capacity(n);
    for (segment, &leaf) in segments.iter().zip(&leaves) {
        let mut anchor = far[segment[0]];
        if anchor == usize::MAX {
            return Err(Error::InvalidInput(format!("code {:?} is malformed", code.entries)));
        }
        for &label in segment[1..].iter().chain(std::iter::once(&leaf)) {
            let w = next_vertex;
            next_vertex += 1;
            edges.push(LabeledEdge { a: anchor, b: w, label });
            far[label] = w;
            anchor = w;
        }
    }
    // drop v and merge n-1 / n-2 into a single edge n-2
    edges.push(LabeledEdge {
        a: far[n - 1],
        b: far[n - 2],
        label: n - 2,
    });
    for e in &mut edges {
        e.a -= 1;
        e.b -= 1;
    }
    EdgeLabeledTree::new(n, edges)
}

/// Edge-labeled trees with degree sequence `delta`:
/// `(1/n) (alpha_1, ..., alpha_{n-1})! (delta_1 - 1, ..., delta_n - 1)!`.
pub fn count_trees(delta: &DegreeSequence) -> Result<BigCount> {
    let census = delta.census();
    let arrangements: Vec<i64> = delta.degrees().iter().map(|&d| d as i64 - 1).collect();
    let numerator = multinomial(census.alphas()) * multinomial(&arrangements);
    exact_div(&numerator, &BigCount::from(delta.n()), "edge-labeled tree count")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexMultiplicity {
    pub vertex: usize,
    pub degree: usize,
    /// Label of the first edge on the way from the vertex to the subdividing vertex.
    pub path_label: usize,
    /// How often `path_label` occurs in `S`.
    pub occurrences: usize,
}

/// For every vertex, the label of its edge towards the subdividing vertex and
/// how often that label occurs in `S = (n - 2, C)`; the count is always
/// `degree - 1`.
pub fn degree_label_multiplicity(tree: &EdgeLabeledTree) -> Result<Vec<VertexMultiplicity>> {
    if tree.mode != LabelMode::Distinct || tree.n < 3 {
        return Err(Error::InvalidInput("needs a distinct-label tree with n >= 3".into()));
    }
    let sub = Subdivided::build(tree);
    let s = sub.s_sequence(tree.n);
    let mut occurrences = vec![0; tree.n];
    for &x in &s {
        occurrences[x] += 1;
    }
    let deg = tree.degrees();
    Ok((0..tree.n)
        .map(|vertex| {
            let (_, path_label) = sub.parent[vertex].expect("every original vertex has a parent");
            VertexMultiplicity {
                vertex,
                degree: deg[vertex],
                path_label,
                occurrences: occurrences[path_label],
            }
        })
        .collect())
}

/// Where the two equally-labeled edges of a merged tree sit relative to each other.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PatternClass {
    /// The two edges share a vertex.
    Xx,
    /// One edge between them; the degrees of the two outer path ends, in the
    /// order the repeated edges appear in the edge list.
    Xyx { end_degrees: (usize, usize) },
    /// Two edges between them.
    Xyzx,
    /// Three or more edges between them.
    Free { gap: usize },
}

impl PatternClass {
    pub fn gap(&self) -> usize {
        match self {
            PatternClass::Xx => 0,
            PatternClass::Xyx { .. } => 1,
            PatternClass::Xyzx => 2,
            PatternClass::Free { gap } => *gap,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PatternClass::Xx => "xx",
            PatternClass::Xyx { .. } => "xyx",
            PatternClass::Xyzx => "xyzx",
            PatternClass::Free { .. } => "free",
        }
    }
}

/// The path joining the two equally-labeled edges of a merged tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepeatedPath {
    /// Vertices from the outer end of the first repeated edge to the outer
    /// end of the second; `gap + 4` of them.
    pub vertices: Vec<usize>,
    /// Edge indices along `vertices`; the first and last are the repeated edges.
    pub edges: Vec<usize>,
}

impl RepeatedPath {
    pub fn gap(&self) -> usize {
        self.edges.len() - 2
    }
}

/// Finds the repeated label and the path through both of its edges.
pub fn repeated_path(tree: &EdgeLabeledTree) -> Result<RepeatedPath> {
    let mut pair = None;
    'outer: for (i, e) in tree.edges.iter().enumerate() {
        for (j, f) in tree.edges.iter().enumerate().skip(i + 1) {
            if e.label == f.label {
                pair = Some((i, j));
                break 'outer;
            }
        }
    }
    let (first, second) = pair.ok_or_else(|| Error::InvalidInput("no repeated label".into()))?;
    let adj = tree.adjacency();
    let e1 = tree.edges[first];
    let e2 = tree.edges[second];
    // BFS from both ends of the first edge without crossing it
    let n = tree.n;
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([e1.a, e1.b]);
    seen[e1.a] = true;
    seen[e1.b] = true;
    while let Some(x) = queue.pop_front() {
        for &(y, k) in &adj[x] {
            if k == first || seen[y] {
                continue;
            }
            seen[y] = true;
            prev[y] = Some((x, k));
            queue.push_back(y);
        }
    }
    let depth = |mut x: usize| {
        let mut d = 0;
        while let Some((p, _)) = prev[x] {
            x = p;
            d += 1;
        }
        d
    };
    let (near, outer) = if depth(e2.a) <= depth(e2.b) { (e2.a, e2.b) } else { (e2.b, e2.a) };
    let mut vertices = vec![outer, near];
    let mut edges = vec![second];
    let mut x = near;
    while let Some((p, k)) = prev[x] {
        vertices.push(p);
        edges.push(k);
        x = p;
    }
    // x is now an endpoint of the first edge
    vertices.push(e1.other(x));
    edges.push(first);
    vertices.reverse();
    edges.reverse();
    Ok(RepeatedPath { vertices, edges })
}

/// Classifies a merged tree by the gap between its two equally-labeled edges.
pub fn classify(tree: &EdgeLabeledTree) -> Result<PatternClass> {
    if tree.mode != LabelMode::Merged {
        return Err(Error::InvalidInput("classify needs a merged-label tree".into()));
    }
    let path = repeated_path(tree)?;
    Ok(match path.gap() {
        0 => PatternClass::Xx,
        1 => {
            let deg = tree.degrees();
            let ends = (deg[path.vertices[0]], deg[*path.vertices.last().expect("non-empty")]);
            PatternClass::Xyx { end_degrees: ends }
        }
        2 => PatternClass::Xyzx,
        gap => PatternClass::Free { gap },
    })
}

/// Turns a distinct-label tree into a merged one by giving edge `n - 2` the
/// label `0`. Edges are ordered by original label, so the original `0` edge
/// comes first and the relabeled one last.
pub fn merge_top_label(tree: &EdgeLabeledTree) -> Result<EdgeLabeledTree> {
    if tree.mode != LabelMode::Distinct || tree.n < 3 {
        return Err(Error::InvalidInput("merging needs a distinct-label tree with n >= 3".into()));
    }
    let top = tree.n - 2;
    let mut edges = tree.edges.clone();
    edges.sort_by_key(|e| e.label);
    if let Some(last) = edges.last_mut() {
        debug_assert_eq!(last.label, top);
        last.label = 0;
    }
    EdgeLabeledTree::new(tree.n, edges)
}

/// The merged-label census: every distinct-label tree with label `n - 2`
/// merged into label `0`, each with weight `n - 2` (for the `n - 2` equivalent
/// choices of the label to merge into). Total weight `(n - 2) n^(n-3)`.
pub fn all_merged_trees(n: usize) -> Result<impl Iterator<Item = (EdgeLabeledTree, u64)>> {
    all_merged_trees_bounded(n, MERGED_TREE_LIMIT)
}

pub fn all_merged_trees_bounded(n: usize, limit: usize) -> Result<impl Iterator<Item = (EdgeLabeledTree, u64)>> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("merged trees need n >= 3, got {n}")));
    }
    if n > limit {
        return Err(Error::BudgetExceeded {
            estimate: code_count(n) as u128,
            budget: code_count(limit) as u128,
        });
    }
    let weight = (n - 2) as u64;
    Ok(codes(n, 0..code_count(n))?.map(move |code| {
        let tree = decode(&code).expect("every code decodes");
        (merge_top_label(&tree).expect("distinct tree merges"), weight)
    }))
}
