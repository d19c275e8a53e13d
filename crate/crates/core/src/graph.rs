//! Directed simple graph with removal masking.
//!
//! Node ids are 0-based here; file formats and reports shift them to 1-based.
//! Removing a node deactivates it rather than compacting the id space, so the
//! identities of the surviving nodes never change during an attack.

use crate::error::{Error, Result};

pub type NodeId = usize;

/// A directed edge `(tail, head)`, i.e. `tail -> head`.
pub type Edge = (NodeId, NodeId);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    out_adj: Vec<Vec<NodeId>>,
    in_adj: Vec<Vec<NodeId>>,
    active: Vec<bool>,
    active_count: usize,
    edge_count: usize,
}

impl DirectedGraph {
    /// Edgeless graph on `n` active nodes.
    pub fn new(n: usize) -> Self {
        DirectedGraph {
            out_adj: vec![Vec::new(); n],
            in_adj: vec![Vec::new(); n],
            active: vec![true; n],
            active_count: n,
            edge_count: 0,
        }
    }

    /// Builds a graph from per-node successor lists. Lists are sorted and
    /// deduplicated; the number of merged duplicates is returned alongside.
    pub fn from_successors(mut out_adj: Vec<Vec<NodeId>>) -> Result<(Self, usize)> {
        let n = out_adj.len();
        let mut duplicates = 0;
        let mut in_deg = vec![0usize; n];
        for (u, row) in out_adj.iter_mut().enumerate() {
            row.sort_unstable();
            let before = row.len();
            row.dedup();
            duplicates += before - row.len();
            for &v in row.iter() {
                if v >= n {
                    return Err(Error::invalid(format!("node id {v} out of range (n = {n})")));
                }
                if v == u {
                    return Err(Error::invalid(format!("self-loop on node {u}")));
                }
                in_deg[v] += 1;
            }
        }
        let mut in_adj: Vec<Vec<NodeId>> = in_deg.iter().map(|&d| Vec::with_capacity(d)).collect();
        // Visiting tails in increasing order keeps every in-list sorted.
        for (u, row) in out_adj.iter().enumerate() {
            for &v in row {
                in_adj[v].push(u);
            }
        }
        let edge_count = out_adj.iter().map(Vec::len).sum();
        Ok((
            DirectedGraph {
                out_adj,
                in_adj,
                active: vec![true; n],
                active_count: n,
                edge_count,
            },
            duplicates,
        ))
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut rows = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n {
                return Err(Error::invalid(format!("node id {u} out of range (n = {n})")));
            }
            rows[u].push(v);
        }
        Ok(Self::from_successors(rows)?.0)
    }

    /// Original node count, including deactivated nodes.
    pub fn node_count(&self) -> usize {
        self.active.len()
    }

    pub fn active_node_count(&self) -> usize {
        self.active_count
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_active(&self, u: NodeId) -> bool {
        self.active.get(u).copied().unwrap_or(false)
    }

    pub fn active_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.active.iter().enumerate().filter(|(_, &a)| a).map(|(u, _)| u)
    }

    /// Sorted successors of `u`.
    pub fn successors(&self, u: NodeId) -> &[NodeId] {
        &self.out_adj[u]
    }

    /// Sorted predecessors of `u`.
    pub fn predecessors(&self, u: NodeId) -> &[NodeId] {
        &self.in_adj[u]
    }

    pub fn out_degree(&self, u: NodeId) -> usize {
        self.out_adj[u].len()
    }

    pub fn in_degree(&self, u: NodeId) -> usize {
        self.in_adj[u].len()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        u < self.node_count() && self.out_adj[u].binary_search(&v).is_ok()
    }

    /// All edges in lexicographic `(tail, head)` order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.out_adj
            .iter()
            .enumerate()
            .flat_map(|(u, row)| row.iter().map(move |&v| (u, v)))
    }

    fn check_node(&self, u: NodeId) -> Result<()> {
        if u >= self.node_count() {
            return Err(Error::invalid(format!(
                "node id {u} out of range (n = {})",
                self.node_count()
            )));
        }
        Ok(())
    }

    /// Inserts `u -> v`. Returns `false` when the edge was already present.
    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> Result<bool> {
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Err(Error::invalid(format!("self-loop on node {u}")));
        }
        if !self.active[u] || !self.active[v] {
            return Err(Error::invalid(format!("edge ({u}, {v}) touches an inactive node")));
        }
        match self.out_adj[u].binary_search(&v) {
            Ok(_) => Ok(false),
            Err(pos) => {
                self.out_adj[u].insert(pos, v);
                let pos = self.in_adj[v].binary_search(&u).unwrap_err();
                self.in_adj[v].insert(pos, u);
                self.edge_count += 1;
                Ok(true)
            }
        }
    }

    /// Deletes `u -> v`, returning whether it was present.
    pub fn remove_edge(&mut self, u: NodeId, v: NodeId) -> Result<bool> {
        self.check_node(u)?;
        self.check_node(v)?;
        match self.out_adj[u].binary_search(&v) {
            Ok(pos) => {
                self.out_adj[u].remove(pos);
                let pos = self.in_adj[v]
                    .binary_search(&u)
                    .expect("in/out adjacency out of sync");
                self.in_adj[v].remove(pos);
                self.edge_count -= 1;
                Ok(true)
            }
            Err(_) => Ok(false),
        }
    }

    /// Deactivates `u` and drops its incident edges. Returns how many edges went.
    pub fn remove_node(&mut self, u: NodeId) -> Result<usize> {
        self.check_node(u)?;
        if !self.active[u] {
            return Err(Error::invalid(format!("node {u} is already removed")));
        }
        let outs = std::mem::take(&mut self.out_adj[u]);
        let ins = std::mem::take(&mut self.in_adj[u]);
        for &v in &outs {
            let pos = self.in_adj[v].binary_search(&u).expect("in/out adjacency out of sync");
            self.in_adj[v].remove(pos);
        }
        for &w in &ins {
            let pos = self.out_adj[w].binary_search(&u).expect("in/out adjacency out of sync");
            self.out_adj[w].remove(pos);
        }
        let removed = outs.len() + ins.len();
        self.edge_count -= removed;
        self.active[u] = false;
        self.active_count -= 1;
        Ok(removed)
    }

    /// Full scan of the structural invariants. Used by tests and after parsing.
    pub fn check_consistency(&self) -> Result<()> {
        let n = self.node_count();
        let mut total = 0;
        for u in 0..n {
            let row = &self.out_adj[u];
            if !self.active[u] && (!row.is_empty() || !self.in_adj[u].is_empty()) {
                return Err(Error::invalid(format!("inactive node {u} still has edges")));
            }
            for w in row.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::invalid(format!("successors of {u} not strictly sorted")));
                }
            }
            for &v in row {
                if v == u {
                    return Err(Error::invalid(format!("self-loop on {u}")));
                }
                if !self.active[v] {
                    return Err(Error::invalid(format!("edge ({u}, {v}) to inactive node")));
                }
                if self.in_adj[v].binary_search(&u).is_err() {
                    return Err(Error::invalid(format!("edge ({u}, {v}) missing from in-list")));
                }
            }
            total += row.len();
        }
        let in_total: usize = self.in_adj.iter().map(Vec::len).sum();
        if total != in_total || total != self.edge_count {
            return Err(Error::invalid(format!(
                "edge count mismatch: out {total}, in {in_total}, cached {}",
                self.edge_count
            )));
        }
        if self.active.iter().filter(|&&a| a).count() != self.active_count {
            return Err(Error::invalid("active count mismatch"));
        }
        Ok(())
    }

    /// Undirected projection restricted to active nodes: sorted, deduplicated
    /// neighbour lists.
    pub fn undirected_neighbors(&self) -> Vec<Vec<NodeId>> {
        (0..self.node_count())
            .map(|u| {
                let (a, b) = (&self.out_adj[u], &self.in_adj[u]);
                let mut merged = Vec::with_capacity(a.len() + b.len());
                let (mut i, mut j) = (0, 0);
                while i < a.len() || j < b.len() {
                    let next = match (a.get(i), b.get(j)) {
                        (Some(&x), Some(&y)) if x == y => {
                            i += 1;
                            j += 1;
                            x
                        }
                        (Some(&x), Some(&y)) if x < y => {
                            i += 1;
                            x
                        }
                        (Some(_), Some(&y)) => {
                            j += 1;
                            y
                        }
                        (Some(&x), None) => {
                            i += 1;
                            x
                        }
                        (None, Some(&y)) => {
                            j += 1;
                            y
                        }
                        (None, None) => unreachable!(),
                    };
                    merged.push(next);
                }
                merged
            })
            .collect()
    }
}
