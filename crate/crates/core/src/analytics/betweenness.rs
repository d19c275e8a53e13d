//! Exact shortest-path betweenness for directed, unweighted graphs.
//!
//! One breadth-first search per active source, followed by dependency
//! accumulation in reverse BFS order (Brandes). Every ordered pair `(s, t)` of
//! distinct active nodes with `t` reachable from `s` spreads one unit over its
//! shortest paths; a node scores the share of paths passing through its
//! interior and an edge scores the share of paths using it. Scores are not
//! normalised.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::Serialize;

use crate::graph::{DirectedGraph, Edge, NodeId};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetweennessScores {
    /// Indexed by node id; inactive nodes score 0.
    pub nodes: Vec<f64>,
    /// One entry per active edge, in `DirectedGraph::edges` order.
    pub edges: Vec<(Edge, f64)>,
}

impl BetweennessScores {
    /// Nodes ordered by decreasing score (ties by id), at most `k` of them.
    pub fn top_nodes(&self, k: usize) -> Vec<(NodeId, f64)> {
        let mut v: Vec<(NodeId, f64)> = self.nodes.iter().copied().enumerate().collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        v.truncate(k);
        v
    }

    pub fn top_edges(&self, k: usize) -> Vec<(Edge, f64)> {
        let mut v = self.edges.clone();
        v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        v.truncate(k);
        v
    }
}

/// Sources per work unit. Fixed so that the floating-point reduction order, and
/// therefore every bit of the result, does not depend on the thread count.
const CHUNK: usize = 64;

struct Csr {
    offsets: Vec<usize>,
}

impl Csr {
    fn new(g: &DirectedGraph) -> Self {
        let mut offsets = Vec::with_capacity(g.node_count() + 1);
        let mut acc = 0;
        for u in 0..g.node_count() {
            offsets.push(acc);
            acc += g.out_degree(u);
        }
        offsets.push(acc);
        Csr { offsets }
    }
}

struct Workspace {
    dist: Vec<i64>,
    sigma: Vec<f64>,
    delta: Vec<f64>,
    preds: Vec<Vec<(NodeId, usize)>>,
    order: Vec<NodeId>,
    queue: VecDeque<NodeId>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Workspace {
            dist: vec![-1; n],
            sigma: vec![0.0; n],
            delta: vec![0.0; n],
            preds: vec![Vec::new(); n],
            order: Vec::with_capacity(n),
            queue: VecDeque::with_capacity(n),
        }
    }

    fn single_source(&mut self, g: &DirectedGraph, csr: &Csr, s: NodeId, node_acc: &mut [f64], edge_acc: &mut [f64]) {
        for &v in &self.order {
            self.dist[v] = -1;
            self.sigma[v] = 0.0;
            self.delta[v] = 0.0;
            self.preds[v].clear();
        }
        self.order.clear();
        self.dist[s] = 0;
        self.sigma[s] = 1.0;
        self.queue.push_back(s);
        while let Some(v) = self.queue.pop_front() {
            self.order.push(v);
            let dv = self.dist[v];
            for (k, &w) in g.successors(v).iter().enumerate() {
                if self.dist[w] < 0 {
                    self.dist[w] = dv + 1;
                    self.queue.push_back(w);
                }
                if self.dist[w] == dv + 1 {
                    self.sigma[w] += self.sigma[v];
                    self.preds[w].push((v, csr.offsets[v] + k));
                }
            }
        }
        for &w in self.order.iter().rev() {
            let coeff = (1.0 + self.delta[w]) / self.sigma[w];
            for &(v, e) in &self.preds[w] {
                let share = self.sigma[v] * coeff;
                edge_acc[e] += share;
                self.delta[v] += share;
            }
            if w != s {
                node_acc[w] += self.delta[w];
            }
        }
    }
}

/// Node and edge betweenness in one pass.
pub fn betweenness(g: &DirectedGraph) -> BetweennessScores {
    let n = g.node_count();
    let csr = Csr::new(g);
    let m = csr.offsets[n];
    let sources: Vec<NodeId> = g.active_nodes().collect();
    let partials: Vec<(Vec<f64>, Vec<f64>)> = sources
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut ws = Workspace::new(n);
            let mut node_acc = vec![0.0; n];
            let mut edge_acc = vec![0.0; m];
            for &s in chunk {
                ws.single_source(g, &csr, s, &mut node_acc, &mut edge_acc);
            }
            (node_acc, edge_acc)
        })
        .collect();
    let mut nodes = vec![0.0; n];
    let mut edge_scores = vec![0.0; m];
    for (na, ea) in partials {
        nodes.iter_mut().zip(na).for_each(|(a, b)| *a += b);
        edge_scores.iter_mut().zip(ea).for_each(|(a, b)| *a += b);
    }
    let edges = g.edges().zip(edge_scores).collect();
    BetweennessScores { nodes, edges }
}

pub fn node_betweenness(g: &DirectedGraph) -> Vec<f64> {
    betweenness(g).nodes
}

pub fn edge_betweenness(g: &DirectedGraph) -> Vec<(Edge, f64)> {
    betweenness(g).edges
}
