//! Slow, independent reference implementations used to check the library.
//! Nothing here calls into the algorithms under test.

#![allow(dead_code)]

use std::collections::{BTreeMap, VecDeque};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use snapnet::{DirectedGraph, RngStream};

pub type Q = Ratio<i64>;

/// Random simple digraph on `n` nodes with edge probability `p`.
pub fn random_digraph(n: usize, p: f64, rng: &mut RngStream) -> DirectedGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.uniform() < p {
                edges.push((u, v));
            }
        }
    }
    DirectedGraph::from_edges(n, edges).unwrap()
}

pub fn active_edges(g: &DirectedGraph) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for u in 0..g.node_count() {
        if !g.is_active(u) {
            continue;
        }
        for v in 0..g.node_count() {
            if g.is_active(v) && g.has_edge(u, v) {
                out.push((u, v));
            }
        }
    }
    out
}

/// Maximum matching size by trying every injective tail-to-head assignment.
pub fn brute_matching_size(g: &DirectedGraph) -> usize {
    let n = g.node_count();
    let edges = active_edges(g);
    let mut by_tail = vec![Vec::new(); n];
    for (u, v) in edges {
        by_tail[u].push(v);
    }
    fn go(t: usize, by_tail: &[Vec<usize>], used: &mut Vec<bool>) -> usize {
        if t == by_tail.len() {
            return 0;
        }
        let mut best = go(t + 1, by_tail, used);
        for &v in &by_tail[t] {
            if !used[v] {
                used[v] = true;
                best = best.max(1 + go(t + 1, by_tail, used));
                used[v] = false;
            }
        }
        best
    }
    go(0, &by_tail, &mut vec![false; n])
}

pub fn brute_structural_nd(g: &DirectedGraph) -> usize {
    let n = (0..g.node_count()).filter(|&u| g.is_active(u)).count();
    (n - brute_matching_size(g)).max(1)
}

/// Rank over the rationals by plain Gaussian elimination on big fractions.
pub fn rational_rank(rows: &[Vec<BigRational>]) -> usize {
    let mut a: Vec<Vec<BigRational>> = rows.to_vec();
    let r = a.len();
    let c = a.first().map_or(0, |x| x.len());
    let mut rank = 0;
    for col in 0..c {
        let Some(p) = (rank..r).find(|&i| !a[i][col].is_zero()) else { continue };
        a.swap(p, rank);
        for i in 0..r {
            if i != rank && !a[i][col].is_zero() {
                let f = &a[i][col] / &a[rank][col];
                for k in col..c {
                    let sub = &f * &a[rank][k];
                    a[i][k] -= sub;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn big(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn int_rank(rows: &[Vec<i64>]) -> usize {
    let q: Vec<Vec<BigRational>> = rows.iter().map(|r| r.iter().map(|&x| big(x)).collect()).collect();
    rational_rank(&q)
}

/// Dense adjacency with `A[j][i] = 1` iff `i -> j`, over active nodes in id order.
pub fn adjacency(g: &DirectedGraph) -> Vec<Vec<i64>> {
    let nodes: Vec<usize> = (0..g.node_count()).filter(|&u| g.is_active(u)).collect();
    nodes
        .iter()
        .map(|&j| nodes.iter().map(|&i| i64::from(g.has_edge(i, j))).collect())
        .collect()
}

/// Rank of `[B, AB, ..., A^{n-1}B]` over the rationals. `b` is given by
/// columns, each of length `n`.
pub fn kalman_rank(a: &[Vec<i64>], b_cols: &[Vec<BigRational>]) -> usize {
    let n = a.len();
    let mut cols: Vec<Vec<BigRational>> = Vec::new();
    for b in b_cols {
        let mut v = b.clone();
        for _ in 0..n {
            cols.push(v.clone());
            let mut next = vec![BigRational::zero(); n];
            for (j, row) in a.iter().enumerate() {
                for (i, &x) in row.iter().enumerate() {
                    if x != 0 {
                        next[j] += big(x) * &v[i];
                    }
                }
            }
            v = next;
        }
    }
    // Rows of the Kalman matrix.
    let rows: Vec<Vec<BigRational>> = (0..n).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect();
    rational_rank(&rows)
}

/// Shortest-path betweenness by enumerating every shortest path explicitly.
pub fn brute_betweenness(g: &DirectedGraph) -> (Vec<Q>, BTreeMap<(usize, usize), Q>) {
    let n = g.node_count();
    let edges = active_edges(g);
    let mut node = vec![Q::zero(); n];
    let mut edge: BTreeMap<(usize, usize), Q> = edges.iter().map(|&e| (e, Q::zero())).collect();
    for s in 0..n {
        for t in 0..n {
            if s == t || !g.is_active(s) || !g.is_active(t) {
                continue;
            }
            let mut paths = Vec::new();
            let mut best = usize::MAX;
            let mut stack = vec![s];
            all_paths(g, t, &mut stack, &mut vec![false; n], &mut paths, &mut best);
            let shortest: Vec<&Vec<usize>> = paths.iter().filter(|p| p.len() == best).collect();
            if shortest.is_empty() {
                continue;
            }
            let w = Q::new(1, shortest.len() as i64);
            for p in shortest {
                for &v in &p[1..p.len() - 1] {
                    node[v] += w;
                }
                for e in p.windows(2) {
                    *edge.get_mut(&(e[0], e[1])).unwrap() += w;
                }
            }
        }
    }
    (node, edge)
}

fn all_paths(
    g: &DirectedGraph,
    t: usize,
    stack: &mut Vec<usize>,
    seen: &mut Vec<bool>,
    out: &mut Vec<Vec<usize>>,
    best: &mut usize,
) {
    let u = *stack.last().unwrap();
    if stack.len() > *best {
        return;
    }
    if u == t {
        *best = (*best).min(stack.len());
        out.push(stack.clone());
        return;
    }
    seen[u] = true;
    for v in 0..g.node_count() {
        if g.is_active(v) && !seen[v] && g.has_edge(u, v) {
            stack.push(v);
            all_paths(g, t, stack, seen, out, best);
            stack.pop();
        }
    }
    seen[u] = false;
}

/// Weak connectivity of a node subset, by BFS over the undirected relation.
pub fn weakly_connected(g: &DirectedGraph, set: &[usize]) -> bool {
    let mut seen = vec![false; set.len()];
    let mut q = VecDeque::from([0]);
    seen[0] = true;
    while let Some(a) = q.pop_front() {
        for b in 0..set.len() {
            if !seen[b] && (g.has_edge(set[a], set[b]) || g.has_edge(set[b], set[a])) {
                seen[b] = true;
                q.push_back(b);
            }
        }
    }
    seen.iter().all(|&x| x)
}

/// Isomorphism-class key of the induced subgraph on four nodes: the
/// lexicographically largest adjacency string over all orderings.
pub fn brute_class_key(g: &DirectedGraph, set: &[usize; 4]) -> String {
    let mut best = String::new();
    let mut perm = [0usize, 1, 2, 3];
    permutations(&mut perm, 0, &mut |p| {
        let mut s = String::with_capacity(16);
        for a in 0..4 {
            for b in 0..4 {
                s.push(if g.has_edge(set[p[a]], set[p[b]]) { '1' } else { '0' });
            }
        }
        if s > best {
            best = s;
        }
    });
    best
}

fn permutations(p: &mut [usize; 4], k: usize, f: &mut impl FnMut(&[usize; 4])) {
    if k == 4 {
        f(p);
        return;
    }
    for i in k..4 {
        p.swap(k, i);
        permutations(p, k + 1, f);
        p.swap(k, i);
    }
}

/// Class key -> count over every connected induced 4-subset.
pub fn brute_motif_census(g: &DirectedGraph) -> BTreeMap<String, u64> {
    let nodes: Vec<usize> = (0..g.node_count()).filter(|&u| g.is_active(u)).collect();
    let mut out = BTreeMap::new();
    let k = nodes.len();
    for a in 0..k {
        for b in a + 1..k {
            for c in b + 1..k {
                for d in c + 1..k {
                    let set = [nodes[a], nodes[b], nodes[c], nodes[d]];
                    if weakly_connected(g, &set) {
                        *out.entry(brute_class_key(g, &set)).or_insert(0) += 1;
                    }
                }
            }
        }
    }
    out
}

/// Expected structural N_D of a chain of `n` nodes after removing `k` nodes
/// uniformly at random: one driver per surviving fragment, floored at one.
/// Computed by counting over fragment structure rather than simulation.
pub fn chain_expected_nd(n: usize, k: usize) -> f64 {
    // A surviving node starts a fragment iff it is node 1 or its left
    // neighbour was removed. With m = n - k survivors,
    // E[#fragments] = P(node 1 survives) + (n-1) P(i-1 removed, i survives).
    let m = n - k;
    if m == 0 {
        return 0.0;
    }
    let total = binom(n, k);
    let first = binom(n - 1, k) / total;
    let inner = if k >= 1 && n >= 2 { binom(n - 2, k - 1) / total } else { 0.0 };
    let fragments = first + (n - 1) as f64 * inner;
    // Floor at one only matters when no fragment survives, which needs m = 0.
    fragments.max(1.0)
}

fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut r = 1.0f64;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// Exhaustive version of `chain_expected_nd` for small `n`: averages the
/// fragment count over every removal set.
pub fn chain_expected_nd_exhaustive(n: usize, k: usize) -> f64 {
    let mut total = 0.0;
    let mut sets = 0.0;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let mut fragments = 0;
        let mut prev_alive = false;
        for i in 0..n {
            let alive = mask & (1 << i) == 0;
            if alive && !prev_alive {
                fragments += 1;
            }
            prev_alive = alive;
        }
        total += fragments.max(1) as f64;
        sets += 1.0;
    }
    total / sets
}

pub fn one() -> BigRational {
    BigRational::one()
}
