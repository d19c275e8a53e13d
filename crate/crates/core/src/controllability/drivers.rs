use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::matching::maximum_matching;
use super::rank::{invmod, mulmod, rational_rank, IntMatrix, PRIMES};
use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeId};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ControlKind {
    Structural,
    State,
}

impl ControlKind {
    pub fn name(self) -> &'static str {
        match self {
            ControlKind::Structural => "structural",
            ControlKind::State => "state",
        }
    }
}

impl fmt::Display for ControlKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ControlKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "structural" => Ok(ControlKind::Structural),
            "state" => Ok(ControlKind::State),
            other => Err(Error::invalid(format!("unknown controllability kind {other:?}"))),
        }
    }
}

/// How the state-controllability driver count is derived from the adjacency
/// matrix `A` (`A[j][i] = 1` iff `i -> j`).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum StateMode {
    /// `n - rank(A)`: the geometric multiplicity of eigenvalue 0.
    #[default]
    #[serde(rename = "zero")]
    ZeroEigenvalue,
    /// Largest `n - rank(lambda I - A)` over `lambda` in {-1, 0, 1}.
    #[serde(rename = "sweep")]
    IntegerSweep,
    /// Smallest number of inputs for which a generic input matrix passes the
    /// Kalman rank test, i.e. the largest geometric multiplicity over all
    /// eigenvalues, including irrational and complex ones.
    #[serde(rename = "exact")]
    Exact,
}

impl StateMode {
    pub fn name(self) -> &'static str {
        match self {
            StateMode::ZeroEigenvalue => "zero",
            StateMode::IntegerSweep => "sweep",
            StateMode::Exact => "exact",
        }
    }
}

impl FromStr for StateMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(StateMode::ZeroEigenvalue),
            "sweep" => Ok(StateMode::IntegerSweep),
            "exact" => Ok(StateMode::Exact),
            other => Err(Error::invalid(format!("unknown state mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriverCount {
    pub kind: ControlKind,
    #[serde(rename = "N")]
    pub active_nodes: usize,
    #[serde(rename = "N_D")]
    pub drivers: usize,
    #[serde(rename = "n_D")]
    pub density: f64,
}

impl DriverCount {
    fn new(kind: ControlKind, active_nodes: usize, deficiency: usize) -> Self {
        let drivers = deficiency.max(1);
        DriverCount { kind, active_nodes, drivers, density: drivers as f64 / active_nodes as f64 }
    }
}

fn require_nodes(g: &DirectedGraph) -> Result<usize> {
    match g.active_node_count() {
        0 => Err(Error::invalid("graph has no active nodes")),
        n => Ok(n),
    }
}

/// `N_D = max(1, N - |E*|)` by the minimum inputs theorem.
pub fn structural_driver_count(g: &DirectedGraph) -> Result<DriverCount> {
    let n = require_nodes(g)?;
    let m = maximum_matching(g).size();
    Ok(DriverCount::new(ControlKind::Structural, n, n - m))
}

/// Driver nodes of one minimum structural input set: the unmatched heads, or
/// a single node when the matching is perfect.
pub fn structural_driver_nodes(g: &DirectedGraph) -> Result<Vec<NodeId>> {
    require_nodes(g)?;
    let mut heads = maximum_matching(g).unmatched_heads(g);
    if heads.is_empty() {
        heads.extend(g.active_nodes().next());
    }
    Ok(heads)
}

/// Active nodes in id order and the position of each node in that order.
fn active_index(g: &DirectedGraph) -> (Vec<NodeId>, Vec<usize>) {
    let nodes: Vec<NodeId> = g.active_nodes().collect();
    let mut pos = vec![usize::MAX; g.node_count()];
    for (k, &u) in nodes.iter().enumerate() {
        pos[u] = k;
    }
    (nodes, pos)
}

/// Adjacency matrix of the active subgraph, rows and columns in node-id order.
pub fn adjacency_matrix(g: &DirectedGraph) -> IntMatrix {
    let (nodes, pos) = active_index(g);
    let mut a = IntMatrix::zeros(nodes.len(), nodes.len());
    for (i, &u) in nodes.iter().enumerate() {
        for &v in g.successors(u) {
            a.set(pos[v], i, 1);
        }
    }
    a
}

pub fn state_driver_count(g: &DirectedGraph, mode: StateMode) -> Result<DriverCount> {
    let n = require_nodes(g)?;
    let a = adjacency_matrix(g);
    let deficiency = match mode {
        StateMode::ZeroEigenvalue => n - rational_rank(&a),
        StateMode::IntegerSweep => sweep_deficiency(&a),
        StateMode::Exact => exact_input_count(g, &a),
    };
    Ok(DriverCount::new(ControlKind::State, n, deficiency))
}

pub fn driver_count(g: &DirectedGraph, kind: ControlKind, mode: StateMode) -> Result<DriverCount> {
    match kind {
        ControlKind::Structural => structural_driver_count(g),
        ControlKind::State => state_driver_count(g, mode),
    }
}

fn sweep_deficiency(a: &IntMatrix) -> usize {
    [-1, 0, 1].into_iter().map(|l| a.rows() - rational_rank(&a.shifted(l))).max().unwrap_or(0)
}

const PLACEMENT_STREAM: u64 = 0x5EED_D21E;

fn exact_input_count(g: &DirectedGraph, a: &IntMatrix) -> usize {
    let n = a.rows();
    let mut rng = RngStream::new(PLACEMENT_STREAM);
    let mut m = sweep_deficiency(a).max(1);
    loop {
        let mut k = Krylov::new(g, PRIMES[0]);
        for _ in 0..m {
            let b: Vec<u64> = (0..n).map(|_| k.random_weight(&mut rng)).collect();
            k.add(b);
        }
        if k.dim() == n || m >= n {
            return m;
        }
        m += 1;
    }
}

/// Controllable subspace modulo `p`: the span of `A^k b` over all added input
/// vectors `b`, kept in reduced echelon form.
#[derive(Clone)]
struct Krylov<'g> {
    g: &'g DirectedGraph,
    nodes: Vec<NodeId>,
    pos: Vec<usize>,
    p: u64,
    basis: Vec<Option<Vec<u64>>>,
    dim: usize,
}

impl<'g> Krylov<'g> {
    fn new(g: &'g DirectedGraph, p: u64) -> Self {
        let (nodes, pos) = active_index(g);
        let n = nodes.len();
        Krylov { g, nodes, pos, p, basis: vec![None; n], dim: 0 }
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn random_weight(&self, rng: &mut RngStream) -> u64 {
        1 + rng.below(self.p as usize - 1) as u64
    }

    /// `(A v)_j = sum of v_i over predecessors i of j`.
    fn apply(&self, v: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; v.len()];
        for (i, &u) in self.nodes.iter().enumerate() {
            if v[i] == 0 {
                continue;
            }
            for &w in self.g.successors(u) {
                let j = self.pos[w];
                out[j] = (out[j] + v[i]) % self.p;
            }
        }
        out
    }

    /// Reduces `v` against the basis; inserts it if independent.
    fn insert(&mut self, mut v: Vec<u64>) -> bool {
        let p = self.p;
        for c in 0..v.len() {
            if v[c] == 0 {
                continue;
            }
            match &self.basis[c] {
                Some(row) => {
                    let f = v[c];
                    for (x, &r) in v.iter_mut().zip(row).skip(c) {
                        *x = (*x + p - mulmod(f, r, p)) % p;
                    }
                }
                None => {
                    let inv = invmod(v[c], p);
                    for x in v.iter_mut().skip(c) {
                        *x = mulmod(*x, inv, p);
                    }
                    self.basis[c] = Some(v);
                    self.dim += 1;
                    return true;
                }
            }
        }
        false
    }

    /// Adds the Krylov chain of `b`. The span before the call is A-invariant,
    /// so the chain can stop at its first dependent vector.
    fn add(&mut self, b: Vec<u64>) -> usize {
        let before = self.dim;
        let mut v = b;
        while self.dim < self.nodes.len() {
            let next = self.apply(&v);
            if !self.insert(v) {
                break;
            }
            v = next;
        }
        self.dim - before
    }

    fn input_vector(&self, input: &[(NodeId, u64)]) -> Vec<u64> {
        let mut b = vec![0u64; self.nodes.len()];
        for &(u, w) in input {
            b[self.pos[u]] = w;
        }
        b
    }
}

/// One external input signal: the nodes it drives and the weight on each.
pub type Input = Vec<(NodeId, u64)>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatePlacement {
    pub count: DriverCount,
    pub mode: StateMode,
    /// `count.drivers` inputs; weights are residues modulo the placement prime.
    pub inputs: Vec<Input>,
    /// Whether the inputs make the system controllable over GF(p), which for
    /// generic weights coincides with controllability over the rationals.
    pub controllable: bool,
}

impl StatePlacement {
    /// Distinct nodes receiving some input.
    pub fn driver_nodes(&self) -> Vec<NodeId> {
        let mut v: Vec<NodeId> = self.inputs.iter().flatten().map(|&(u, _)| u).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Places `N_D` inputs for state controllability. Inputs start on single
/// nodes chosen greedily by controllable-subspace growth; if that falls short,
/// nodes are attached to existing inputs, and as a last resort every input
/// drives every node. Cost is roughly `N_D * N` Krylov evaluations, so this is
/// meant for small graphs.
pub fn state_driver_placement(g: &DirectedGraph, mode: StateMode) -> Result<StatePlacement> {
    let count = state_driver_count(g, mode)?;
    let n = count.active_nodes;
    let p = PRIMES[0];
    let mut rng = RngStream::new(PLACEMENT_STREAM).derive(1);
    let base = Krylov::new(g, p);
    let nodes = base.nodes.clone();

    let evaluate = |inputs: &[Input]| -> usize {
        let mut k = base.clone();
        for input in inputs {
            let b = k.input_vector(input);
            k.add(b);
        }
        k.dim()
    };

    let mut inputs: Vec<Input> = Vec::with_capacity(count.drivers);
    let mut dim = 0;
    for _ in 0..count.drivers {
        let mut best: Option<(usize, NodeId)> = None;
        for &u in &nodes {
            if inputs.iter().any(|i| i[0].0 == u) {
                continue;
            }
            inputs.push(vec![(u, 1)]);
            let d = evaluate(&inputs);
            inputs.pop();
            if best.is_none_or(|(bd, _)| d > bd) {
                best = Some((d, u));
            }
        }
        let (d, u) = best.expect("at least one free node per input");
        inputs.push(vec![(u, 1)]);
        dim = d;
    }

    let mut improved = dim < n;
    while improved && dim < n {
        improved = false;
        for k in 0..inputs.len() {
            for &u in &nodes {
                if inputs[k].iter().any(|&(v, _)| v == u) {
                    continue;
                }
                let w = base.random_weight(&mut rng);
                inputs[k].push((u, w));
                let d = evaluate(&inputs);
                if d > dim {
                    dim = d;
                    improved = true;
                } else {
                    inputs[k].pop();
                }
            }
        }
    }

    if dim < n {
        for input in inputs.iter_mut() {
            *input = nodes.iter().map(|&u| (u, base.random_weight(&mut rng))).collect();
        }
        dim = evaluate(&inputs);
    }
    for input in inputs.iter_mut() {
        input.sort_unstable();
    }

    Ok(StatePlacement { count, mode, inputs, controllable: dim == n })
}
