//! Maximum matching of the bipartite tail/head split of a directed graph.
//!
//! Each active node appears once as a tail and once as a head; every active
//! edge `u -> v` joins tail `u` to head `v`. A matched edge set has no two
//! edges sharing a tail and no two sharing a head. Computed with
//! Hopcroft-Karp phases: a BFS layering from all free tails, then
//! vertex-disjoint shortest augmenting paths found by an iterative DFS.

use std::collections::VecDeque;

use serde::Serialize;

use crate::graph::{DirectedGraph, Edge, NodeId};

const NONE: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Matching {
    /// Matched edges sorted by tail.
    pub edges: Vec<Edge>,
}

impl Matching {
    pub fn size(&self) -> usize {
        self.edges.len()
    }

    /// Active nodes that are not the head of any matched edge. These are the
    /// driver nodes of the minimum-input configuration.
    pub fn unmatched_heads(&self, g: &DirectedGraph) -> Vec<NodeId> {
        let mut matched = vec![false; g.node_count()];
        for &(_, v) in &self.edges {
            matched[v] = true;
        }
        g.active_nodes().filter(|&v| !matched[v]).collect()
    }
}

pub fn maximum_matching(g: &DirectedGraph) -> Matching {
    let n = g.node_count();
    let tails: Vec<NodeId> = g.active_nodes().filter(|&u| g.out_degree(u) > 0).collect();
    let mut match_tail = vec![NONE; n];
    let mut match_head = vec![NONE; n];

    // Greedy warm start.
    for &u in &tails {
        if let Some(&v) = g.successors(u).iter().find(|&&v| match_head[v] == NONE) {
            match_tail[u] = v;
            match_head[v] = u;
        }
    }

    let mut dist = vec![usize::MAX; n];
    let mut cursor = vec![0usize; n];
    let mut queue = VecDeque::new();
    let mut stack: Vec<NodeId> = Vec::new();
    loop {
        queue.clear();
        for &u in &tails {
            if match_tail[u] == NONE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in g.successors(u) {
                let w = match_head[v];
                if w == NONE {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }

        for &u in &tails {
            cursor[u] = 0;
        }
        for &root in &tails {
            if match_tail[root] != NONE {
                continue;
            }
            stack.clear();
            stack.push(root);
            while let Some(&x) = stack.last() {
                let succ = g.successors(x);
                if cursor[x] >= succ.len() {
                    // Dead end: drop x from this phase.
                    dist[x] = usize::MAX;
                    stack.pop();
                    if let Some(&parent) = stack.last() {
                        cursor[parent] += 1;
                    }
                    continue;
                }
                let v = succ[cursor[x]];
                let w = match_head[v];
                if w == NONE {
                    // Augment along the stack; each level re-matches to the
                    // head its cursor points at.
                    for &t in &stack {
                        let h = g.successors(t)[cursor[t]];
                        match_tail[t] = h;
                        match_head[h] = t;
                    }
                    break;
                } else if dist[w] != usize::MAX && dist[w] == dist[x] + 1 {
                    stack.push(w);
                } else {
                    cursor[x] += 1;
                }
            }
        }
    }

    let edges = (0..n)
        .filter(|&u| match_tail[u] != NONE)
        .map(|u| (u, match_tail[u]))
        .collect();
    Matching { edges }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gen_chain;

    fn is_matching(g: &DirectedGraph, m: &Matching) -> bool {
        let mut tails = std::collections::HashSet::new();
        let mut heads = std::collections::HashSet::new();
        m.edges
            .iter()
            .all(|&(u, v)| g.has_edge(u, v) && tails.insert(u) && heads.insert(v))
    }

    #[test]
    fn small_cases() {
        let chain = gen_chain(5).unwrap();
        let m = maximum_matching(&chain);
        assert_eq!(m.size(), 4);
        assert_eq!(m.unmatched_heads(&chain), vec![0]);

        assert_eq!(maximum_matching(&DirectedGraph::new(4)).size(), 0);

        let cycle = DirectedGraph::from_edges(4, (0..4).map(|i| (i, (i + 1) % 4))).unwrap();
        let m = maximum_matching(&cycle);
        assert_eq!(m.size(), 4);
        assert!(m.unmatched_heads(&cycle).is_empty());
    }

    #[test]
    fn stars_match_once() {
        let out_star = DirectedGraph::from_edges(5, (1..5).map(|v| (0, v))).unwrap();
        assert_eq!(maximum_matching(&out_star).size(), 1);
        let in_star = DirectedGraph::from_edges(5, (1..5).map(|v| (v, 0))).unwrap();
        assert_eq!(maximum_matching(&in_star).size(), 1);
    }

    #[test]
    fn augmenting_path_is_found() {
        // Greedy picks 0->1 first; the optimum needs 0->2, 1->... 3->1.
        let g = DirectedGraph::from_edges(4, [(0, 1), (0, 2), (3, 1)]).unwrap();
        let m = maximum_matching(&g);
        assert_eq!(m.size(), 2);
        assert!(is_matching(&g, &m));
    }

    #[test]
    fn long_chain_does_not_recurse() {
        let g = gen_chain(200_000).unwrap();
        assert_eq!(maximum_matching(&g).size(), 199_999);
    }
}
