use std::collections::{BTreeMap, VecDeque};

use num_bigint::BigInt;

use proper_polycubes::math::{degree_sequences, DegreeSequence};
use proper_polycubes::oracle::merged_census;
use proper_polycubes::patterns::{count_free, count_xx, count_xyx_total, count_xyzx};
use proper_polycubes::trees::count_trees;

/// For every vertex-labelled tree (ordinary Pruefer sequences), count the
/// unordered edge pairs by the number of edges strictly between them.
/// Returns, per sorted degree sequence, sums for gaps 0, 1, 2 and beyond.
fn edge_pair_gaps(n: usize) -> BTreeMap<Vec<usize>, [u64; 4]> {
    let mut out: BTreeMap<Vec<usize>, [u64; 4]> = BTreeMap::new();
    let len = n - 2;
    for mut k in 0..(n as u64).pow(len as u32) {
        let seq: Vec<usize> = (0..len)
            .map(|_| {
                let s = (k % n as u64) as usize;
                k /= n as u64;
                s
            })
            .collect();
        let edges = pruefer_edges(n, &seq);
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let dist: Vec<Vec<usize>> = (0..n).map(|s| bfs(&adj, s)).collect();
        let mut tally = [0u64; 4];
        for x in 0..edges.len() {
            for y in x + 1..edges.len() {
                let (a, b) = edges[x];
                let (c, d) = edges[y];
                // vertices closest across the two edges
                let gap = dist[a][c].min(dist[a][d]).min(dist[b][c]).min(dist[b][d]);
                tally[gap.min(3)] += 1;
            }
        }
        let mut deg: Vec<usize> = adj.iter().map(|v| v.len()).collect();
        deg.sort_unstable();
        let e = out.entry(deg).or_default();
        for g in 0..4 {
            e[g] += tally[g];
        }
    }
    out
}

fn pruefer_edges(n: usize, seq: &[usize]) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
        edges.push((leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

fn bfs(adj: &[Vec<usize>], s: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[s] = 0;
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Merged trees per class: each vertex-labelled tree stands for 1/n
/// edge-labelled shapes, and each edge pair for 2 (n-3)! of the (n-1)!/2
/// label placements, scaled to the (n-2) T total.
fn scaled(pairs: u64, n: usize) -> BigInt {
    let num = BigInt::from(pairs) * 2u32;
    let den = BigInt::from(n * (n - 1));
    assert_eq!(&num % &den, BigInt::from(0), "pair count not divisible");
    num / den
}

#[test]
fn formulas_match_edge_pair_oracle() {
    for n in 6..=8 {
        let gaps = edge_pair_gaps(n);
        for delta in degree_sequences(n).unwrap() {
            let g = gaps[delta.degrees()];
            assert_eq!(count_xx(&delta).unwrap(), scaled(g[0], n), "xx {delta}");
            assert_eq!(count_xyx_total(&delta).unwrap(), scaled(g[1], n), "xyx {delta}");
            assert_eq!(count_xyzx(&delta).unwrap(), scaled(g[2], n), "xyzx {delta}");
            assert_eq!(count_free(&delta).unwrap(), scaled(g[3], n), "free {delta}");
        }
    }
}

#[test]
fn classes_add_up_to_all_merged_trees() {
    for n in 6..=10 {
        for delta in degree_sequences(n).unwrap() {
            let sum = count_xx(&delta).unwrap()
                + count_xyx_total(&delta).unwrap()
                + count_xyzx(&delta).unwrap()
                + count_free(&delta).unwrap();
            assert_eq!(sum, count_trees(&delta).unwrap() * (n - 2), "{delta}");
        }
    }
}

#[test]
fn merged_census_agrees_with_formulas() {
    for n in 6..=7 {
        let census = merged_census(n).unwrap();
        assert_eq!(census.by_delta.len(), degree_sequences(n).unwrap().count());
        for (delta, c) in &census.by_delta {
            assert_eq!(count_xx(delta).unwrap(), BigInt::from(c.xx), "{delta}");
            assert_eq!(count_xyx_total(delta).unwrap(), BigInt::from(c.xyx), "{delta}");
            assert_eq!(count_xyzx(delta).unwrap(), BigInt::from(c.xyzx), "{delta}");
            assert_eq!(count_free(delta).unwrap(), BigInt::from(c.free), "{delta}");
        }
    }
}

#[test]
fn path_on_six_vertices() {
    // 5 edges: 4 adjacent pairs, 3 at gap one, 2 at gap two, 1 beyond
    let delta = DegreeSequence::new(vec![1, 1, 2, 2, 2, 2]).unwrap();
    assert_eq!(count_trees(&delta).unwrap(), BigInt::from(60));
    assert_eq!(count_xx(&delta).unwrap(), BigInt::from(96));
    assert_eq!(count_xyx_total(&delta).unwrap(), BigInt::from(72));
    assert_eq!(count_xyzx(&delta).unwrap(), BigInt::from(48));
    assert_eq!(count_free(&delta).unwrap(), BigInt::from(24));
}
