//! Reference computations for the integration tests. They use only edge
//! queries on single-round digraphs, never the library's products or
//! analysis routines.

#![allow(dead_code)]

use clocksync::graph::{Digraph, DynamicGraph, NodeId};

pub fn round(dg: &DynamicGraph, t: usize) -> Digraph {
    dg.digraph(t).expect("schedule defined").into_owned()
}

/// `reach[i][j]`: a temporal path from `i` to `j` using rounds `s..=t`
/// (identity when `t < s`).
pub fn temporal_reach(graphs: &[Digraph], n: usize, s: usize, t: usize) -> Vec<Vec<bool>> {
    (0..n)
        .map(|i| {
            let mut seen = vec![false; n];
            seen[i] = true;
            for r in s..=t {
                let g = &graphs[r - 1];
                let mut next = seen.clone();
                for (a, &on) in seen.iter().enumerate() {
                    if on {
                        for (b, slot) in next.iter_mut().enumerate() {
                            if g.has_edge(NodeId(a), NodeId(b)) {
                                *slot = true;
                            }
                        }
                    }
                }
                seen = next;
            }
            seen
        })
        .collect()
}

/// Rounds `1..=upto` of a schedule.
pub fn rounds(dg: &DynamicGraph, upto: usize) -> Vec<Digraph> {
    (1..=upto).map(|t| round(dg, t)).collect()
}

/// Least `d` such that `i` reaches everyone in every window of length `d`
/// starting at `1..=starts`, searched up to `cap`. `None` if some start
/// needs more than `cap` rounds.
pub fn brute_eccentricity(dg: &DynamicGraph, i: usize, starts: usize, cap: usize) -> Option<usize> {
    let graphs = rounds(dg, starts + cap);
    let mut worst = 0;
    for s in 1..=starts {
        worst = worst.max(spread_time(&graphs, i, s, cap)?);
    }
    Some(worst)
}

/// Rounds until a message flooded from `i` at round `s` has reached every
/// node, at most `cap`.
pub fn spread_time(graphs: &[Digraph], i: usize, s: usize, cap: usize) -> Option<usize> {
    let n = graphs[0].node_count();
    let mut seen = vec![false; n];
    seen[i] = true;
    for len in 1..=cap {
        let g = &graphs[s + len - 2];
        let mut next = seen.clone();
        for a in (0..n).filter(|&a| seen[a]) {
            for (b, slot) in next.iter_mut().enumerate() {
                if g.has_edge(NodeId(a), NodeId(b)) {
                    *slot = true;
                }
            }
        }
        seen = next;
        if seen.iter().all(|&x| x) {
            return Some(len);
        }
    }
    None
}

/// Dynamic diameter by brute force when it is known to be at most `cap`.
pub fn brute_diameter_capped(dg: &DynamicGraph, cap: usize) -> Option<usize> {
    let (starts, _) = exact_limits(dg);
    (0..dg.node_count())
        .map(|i| brute_eccentricity(dg, i, starts, cap))
        .try_fold(0, |acc, e| e.map(|e| acc.max(e)))
}

/// Window starts and search cap that make brute force exact on a
/// prefix/cycle schedule.
pub fn exact_limits(dg: &DynamicGraph) -> (usize, usize) {
    let (p, l) = dg.period().expect("prefix/cycle schedule");
    (p + l, p + (dg.node_count() + 1) * l)
}

/// Dynamic diameter by brute force; `None` when some node has infinite
/// eccentricity.
pub fn brute_diameter(dg: &DynamicGraph) -> Option<usize> {
    let (starts, cap) = exact_limits(dg);
    (0..dg.node_count())
        .map(|i| brute_eccentricity(dg, i, starts, cap))
        .try_fold(0, |acc, e| e.map(|e| acc.max(e)))
}

/// Nodes that reach everyone from every start within the exact cap.
pub fn brute_kernel(dg: &DynamicGraph) -> Vec<usize> {
    let n = dg.node_count();
    let (starts, cap) = exact_limits(dg);
    let graphs = rounds(dg, starts + cap);
    (0..n)
        .filter(|&k| {
            (1..=starts).all(|s| {
                temporal_reach(&graphs, n, s, s + cap - 1)[k]
                    .iter()
                    .all(|&x| x)
            })
        })
        .collect()
}

/// Single-digraph rootedness by search from every node.
pub fn brute_rooted(g: &Digraph) -> bool {
    let n = g.node_count();
    let graphs = vec![g.clone(); n];
    temporal_reach(&graphs, n, 1, n)
        .iter()
        .any(|row| row.iter().all(|&x| x))
}

/// Fixed-period clocks, stepped directly from the definition.
pub fn naive_fixed(graphs: &[Digraph], init: &[u64], modulus: u64) -> Vec<Vec<u64>> {
    let n = init.len();
    let mut out = vec![init.iter().map(|c| c % modulus).collect::<Vec<_>>()];
    for g in graphs {
        let prev = out.last().unwrap().clone();
        let next = (0..n)
            .map(|i| {
                let m = (0..n)
                    .filter(|&j| g.has_edge(NodeId(j), NodeId(i)))
                    .map(|j| prev[j])
                    .min()
                    .unwrap();
                (m + 1) % modulus
            })
            .collect();
        out.push(next);
    }
    out
}

/// Adaptive-period clocks from the definition: clock from the old factor,
/// then max factor, then growth on mod-`P` disagreement.
pub fn naive_sap(
    graphs: &[Digraph],
    init: &[(u64, u64)],
    p: u64,
    g: impl Fn(u64) -> u64,
) -> Vec<Vec<(u64, u64)>> {
    let n = init.len();
    let mut out = vec![init
        .iter()
        .map(|&(c, m)| (c % (p * m), m))
        .collect::<Vec<_>>()];
    for gr in graphs {
        let prev = out.last().unwrap().clone();
        let next = (0..n)
            .map(|i| {
                let ins: Vec<(u64, u64)> = (0..n)
                    .filter(|&j| gr.has_edge(NodeId(j), NodeId(i)))
                    .map(|j| prev[j])
                    .collect();
                let min_c = ins.iter().map(|x| x.0).min().unwrap();
                let clock = (min_c + 1) % (p * prev[i].1);
                let mut m = ins.iter().map(|x| x.1).max().unwrap();
                if ins.iter().any(|x| x.0 % p != ins[0].0 % p) {
                    m = g(m);
                }
                (clock, m)
            })
            .collect();
        out.push(next);
    }
    out
}
