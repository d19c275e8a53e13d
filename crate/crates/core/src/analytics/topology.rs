use std::collections::VecDeque;

use rayon::prelude::*;
use serde::Serialize;

use crate::graph::{DirectedGraph, NodeId};

/// Which degree is correlated across edge endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AssortativityDegree {
    /// In-degree plus out-degree of the directed graph.
    Total,
    /// Number of distinct neighbours in the undirected projection.
    Projected,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Conventions {
    pub path_length: &'static str,
    pub clustering: &'static str,
    pub assortativity: &'static str,
}

/// `None` marks a quantity that is undefined on the given graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopologyReport {
    pub average_path_length: Option<f64>,
    pub reachable_pairs: u64,
    pub clustering_coefficient: Option<f64>,
    pub assortativity: Option<f64>,
    pub conventions: Conventions,
}

/// Sum of directed shortest-path lengths and number of reachable ordered
/// pairs `(s, t)`, `s != t`.
pub fn path_length_totals(g: &DirectedGraph) -> (u64, u64) {
    let n = g.node_count();
    let sources: Vec<NodeId> = g.active_nodes().collect();
    sources
        .par_chunks(64)
        .map(|chunk| {
            let mut dist = vec![u32::MAX; n];
            let mut seen = Vec::with_capacity(n);
            let mut queue = VecDeque::with_capacity(n);
            let (mut sum, mut pairs) = (0u64, 0u64);
            for &s in chunk {
                for &v in &seen {
                    dist[v] = u32::MAX;
                }
                seen.clear();
                dist[s] = 0;
                seen.push(s);
                queue.push_back(s);
                while let Some(v) = queue.pop_front() {
                    let d = dist[v];
                    if v != s {
                        sum += d as u64;
                        pairs += 1;
                    }
                    for &w in g.successors(v) {
                        if dist[w] == u32::MAX {
                            dist[w] = d + 1;
                            seen.push(w);
                            queue.push_back(w);
                        }
                    }
                }
            }
            (sum, pairs)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
}

/// Mean directed distance over reachable ordered pairs.
pub fn average_path_length(g: &DirectedGraph) -> Option<f64> {
    let (sum, pairs) = path_length_totals(g);
    (pairs > 0).then(|| sum as f64 / pairs as f64)
}

const BITSET_LIMIT: usize = 20_000;

fn triangles_per_node(nbrs: &[Vec<NodeId>], active: &[NodeId]) -> Vec<u64> {
    let n = nbrs.len();
    let mut tri = vec![0u64; n];
    if n <= BITSET_LIMIT {
        let words = n.div_ceil(64);
        let mut bits = vec![0u64; n * words];
        for &v in active {
            for &u in &nbrs[v] {
                bits[v * words + u / 64] |= 1 << (u % 64);
            }
        }
        for &v in active {
            let rv = &bits[v * words..(v + 1) * words];
            let mut links = 0u64;
            for &u in &nbrs[v] {
                let ru = &bits[u * words..(u + 1) * words];
                links += rv.iter().zip(ru).map(|(a, b)| (a & b).count_ones() as u64).sum::<u64>();
            }
            tri[v] = links / 2;
        }
    } else {
        let mut mark = vec![false; n];
        for &v in active {
            for &u in &nbrs[v] {
                mark[u] = true;
            }
            let mut links = 0u64;
            for &u in &nbrs[v] {
                links += nbrs[u].iter().filter(|&&w| mark[w]).count() as u64;
            }
            for &u in &nbrs[v] {
                mark[u] = false;
            }
            tri[v] = links / 2;
        }
    }
    tri
}

/// Mean local clustering coefficient of the undirected projection. Nodes with
/// fewer than two neighbours contribute zero; `None` when no node has two.
pub fn clustering_coefficient(g: &DirectedGraph) -> Option<f64> {
    let nbrs = g.undirected_neighbors();
    let active: Vec<NodeId> = g.active_nodes().collect();
    if active.is_empty() || active.iter().all(|&v| nbrs[v].len() < 2) {
        return None;
    }
    let tri = triangles_per_node(&nbrs, &active);
    let total: f64 = active
        .iter()
        .map(|&v| {
            let k = nbrs[v].len() as f64;
            if k < 2.0 {
                0.0
            } else {
                2.0 * tri[v] as f64 / (k * (k - 1.0))
            }
        })
        .sum();
    Some(total / active.len() as f64)
}

/// Pearson correlation of endpoint degrees over the edges of the undirected
/// projection, each edge counted in both orientations.
pub fn assortativity(g: &DirectedGraph, degree: AssortativityDegree) -> Option<f64> {
    let nbrs = g.undirected_neighbors();
    let deg = |v: NodeId| -> f64 {
        match degree {
            AssortativityDegree::Total => (g.in_degree(v) + g.out_degree(v)) as f64,
            AssortativityDegree::Projected => nbrs[v].len() as f64,
        }
    };
    let (mut m, mut s_prod, mut s_sum, mut s_sq) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for v in g.active_nodes() {
        for &u in &nbrs[v] {
            if u > v {
                let (a, b) = (deg(v), deg(u));
                m += 1.0;
                s_prod += a * b;
                s_sum += 0.5 * (a + b);
                s_sq += 0.5 * (a * a + b * b);
            }
        }
    }
    if m == 0.0 {
        return None;
    }
    let mean = s_sum / m;
    let num = s_prod / m - mean * mean;
    let den = s_sq / m - mean * mean;
    if den.abs() <= 1e-12 * (s_sq / m).max(1.0) {
        return None;
    }
    Some(num / den)
}

pub fn topology_report(g: &DirectedGraph) -> TopologyReport {
    let (sum, pairs) = path_length_totals(g);
    TopologyReport {
        average_path_length: (pairs > 0).then(|| sum as f64 / pairs as f64),
        reachable_pairs: pairs,
        clustering_coefficient: clustering_coefficient(g),
        assortativity: assortativity(g, AssortativityDegree::Total),
        conventions: Conventions {
            path_length: "mean directed distance over reachable ordered pairs",
            clustering: "mean local clustering of the undirected projection",
            assortativity: "pearson correlation of total degree over undirected projection edges",
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gen_chain;

    #[test]
    fn chain_path_length_closed_form() {
        for n in 2..40 {
            let g = gen_chain(n).unwrap();
            let (sum, pairs) = path_length_totals(&g);
            // (n+1)/3 exactly: sum = n(n-1)(n+1)/6 over n(n-1)/2 pairs.
            assert_eq!(3 * sum, (n as u64 + 1) * pairs);
        }
    }

    #[test]
    fn triangle_and_star() {
        let tri = DirectedGraph::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(clustering_coefficient(&tri), Some(1.0));
        let star = DirectedGraph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(clustering_coefficient(&star), Some(0.0));
        assert_eq!(clustering_coefficient(&DirectedGraph::from_edges(2, [(0, 1)]).unwrap()), None);
        assert!(assortativity(&star, AssortativityDegree::Total).unwrap() < 0.0);
    }

    #[test]
    fn regular_graph_has_undefined_assortativity() {
        let cycle = DirectedGraph::from_edges(5, (0..5).map(|i| (i, (i + 1) % 5))).unwrap();
        assert_eq!(assortativity(&cycle, AssortativityDegree::Total), None);
        assert_eq!(assortativity(&DirectedGraph::new(3), AssortativityDegree::Total), None);
        let r = topology_report(&cycle);
        assert_eq!(r.assortativity, None);
        assert_eq!(r.average_path_length, Some(2.5));
    }

    #[test]
    fn empty_graph_report() {
        let r = topology_report(&DirectedGraph::new(3));
        assert_eq!(r.average_path_length, None);
        assert_eq!(r.clustering_coefficient, None);
    }
}
