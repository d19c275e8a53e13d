//! Adaptive attacks and robustness curves.
//!
//! An attack removes one node or edge at a time. Targeted strategies rescore
//! the current graph before every removal; ties among maximal scores are
//! broken uniformly at random. At each evaluation fraction of the original
//! pool the driver density `n_D = N_D / N` of the current graph is recorded.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::betweenness;
use crate::controllability::{driver_count, ControlKind, DriverCount, StateMode};
use crate::error::{Error, Result};
use crate::generators::GenerationSpec;
use crate::graph::{DirectedGraph, Edge, NodeId};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AttackStrategy {
    /// Node with the largest betweenness.
    #[serde(rename = "ta-nb")]
    TaNb,
    /// Node with the largest degree.
    #[serde(rename = "ta-nd")]
    TaNd,
    /// Uniformly random node.
    #[serde(rename = "ra-n")]
    RaN,
    /// Edge with the largest betweenness.
    #[serde(rename = "ta-e")]
    TaE,
    /// Uniformly random edge.
    #[serde(rename = "ra-e")]
    RaE,
}

impl AttackStrategy {
    pub const ALL: [AttackStrategy; 5] =
        [AttackStrategy::TaNb, AttackStrategy::TaNd, AttackStrategy::RaN, AttackStrategy::TaE, AttackStrategy::RaE];

    pub fn name(self) -> &'static str {
        match self {
            AttackStrategy::TaNb => "ta-nb",
            AttackStrategy::TaNd => "ta-nd",
            AttackStrategy::RaN => "ra-n",
            AttackStrategy::TaE => "ta-e",
            AttackStrategy::RaE => "ra-e",
        }
    }

    pub fn removes_nodes(self) -> bool {
        matches!(self, AttackStrategy::TaNb | AttackStrategy::TaNd | AttackStrategy::RaN)
    }

    pub fn is_targeted(self) -> bool {
        !matches!(self, AttackStrategy::RaN | AttackStrategy::RaE)
    }
}

impl fmt::Display for AttackStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AttackStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AttackStrategy::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown attack strategy {s:?}")))
    }
}

/// Degree scored by the degree-targeted attack.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttackDegree {
    #[default]
    Out,
    Total,
}

impl FromStr for AttackDegree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "out" => Ok(AttackDegree::Out),
            "total" => Ok(AttackDegree::Total),
            other => Err(Error::invalid(format!("unknown attack degree {other:?}"))),
        }
    }
}

impl AttackDegree {
    pub fn name(self) -> &'static str {
        match self {
            AttackDegree::Out => "out",
            AttackDegree::Total => "total",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Node(NodeId),
    Edge(Edge),
}

/// Scores within this relative distance of the maximum count as tied, so that
/// floating-point noise in betweenness does not decide between equal nodes.
const TIE_TOLERANCE: f64 = 1e-9;

fn pick_max<T: Copy>(scored: impl Iterator<Item = (T, f64)>, rng: &mut RngStream) -> Option<T> {
    let scored: Vec<(T, f64)> = scored.collect();
    let best = scored.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    let cut = best - TIE_TOLERANCE * best.abs().max(1.0);
    let ties: Vec<T> = scored.into_iter().filter(|s| s.1 >= cut).map(|s| s.0).collect();
    match ties.len() {
        0 => None,
        1 => Some(ties[0]),
        k => Some(ties[rng.below(k)]),
    }
}

/// Chooses the next node or edge to remove from the current graph.
pub fn select_target(
    g: &DirectedGraph,
    strategy: AttackStrategy,
    degree: AttackDegree,
    rng: &mut RngStream,
) -> Result<Target> {
    let empty = || Error::EmptyPool(format!("{strategy} has nothing left to remove"));
    match strategy {
        AttackStrategy::TaNb => {
            let scores = betweenness::node_betweenness(g);
            pick_max(g.active_nodes().map(|u| (u, scores[u])), rng).map(Target::Node).ok_or_else(empty)
        }
        AttackStrategy::TaNd => {
            let deg = |u: NodeId| match degree {
                AttackDegree::Out => g.out_degree(u),
                AttackDegree::Total => g.out_degree(u) + g.in_degree(u),
            };
            pick_max(g.active_nodes().map(|u| (u, deg(u) as f64)), rng).map(Target::Node).ok_or_else(empty)
        }
        AttackStrategy::RaN => {
            let nodes: Vec<NodeId> = g.active_nodes().collect();
            if nodes.is_empty() {
                return Err(empty());
            }
            Ok(Target::Node(nodes[rng.below(nodes.len())]))
        }
        AttackStrategy::TaE => {
            let scores = betweenness::edge_betweenness(g);
            pick_max(scores.into_iter(), rng).map(Target::Edge).ok_or_else(empty)
        }
        AttackStrategy::RaE => {
            let m = g.edge_count();
            if m == 0 {
                return Err(empty());
            }
            let e = g.edges().nth(rng.below(m)).expect("index below edge count");
            Ok(Target::Edge(e))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackPlan {
    pub strategy: AttackStrategy,
    pub kind: ControlKind,
    #[serde(default)]
    pub state_mode: StateMode,
    /// Evaluation points as fractions of the original pool; `None` selects
    /// [`default_fractions`].
    pub fractions: Option<Vec<f64>>,
    pub runs: usize,
    pub seed: u64,
    #[serde(default)]
    pub degree: AttackDegree,
}

impl AttackPlan {
    pub fn new(strategy: AttackStrategy, kind: ControlKind, runs: usize, seed: u64) -> Self {
        AttackPlan {
            strategy,
            kind,
            state_mode: StateMode::default(),
            fractions: None,
            runs,
            seed,
            degree: AttackDegree::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::invalid("runs must be at least 1"));
        }
        if let Some(f) = &self.fractions {
            check_fractions(f)?;
        }
        Ok(())
    }

    /// Fractions for a graph with `n` nodes and the given pool size.
    pub fn fractions_for(&self, n: usize, pool: usize) -> Vec<f64> {
        self.fractions.clone().unwrap_or_else(|| default_fractions(n, pool))
    }

    fn pool(&self, g: &DirectedGraph) -> usize {
        if self.strategy.removes_nodes() {
            g.active_node_count()
        } else {
            g.edge_count()
        }
    }
}

pub fn check_fractions(f: &[f64]) -> Result<()> {
    if f.is_empty() {
        return Err(Error::invalid("evaluation grid is empty"));
    }
    for &x in f {
        if !(0.0..1.0).contains(&x) {
            return Err(Error::invalid(format!("evaluation fraction {x} outside [0, 1)")));
        }
    }
    if f.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("evaluation fractions must be strictly increasing"));
    }
    Ok(())
}

/// Every removal while the graph has at most 200 nodes, otherwise every 1%.
pub fn default_fractions(n: usize, pool: usize) -> Vec<f64> {
    if n <= 200 {
        (0..pool.max(1)).map(|k| k as f64 / pool.max(1) as f64).collect()
    } else {
        (0..100).map(|k| k as f64 / 100.0).collect()
    }
}

/// `(fraction, driver count)` at each evaluation point.
pub type AttackTrace = Vec<(f64, DriverCount)>;

/// Runs one attack on a copy of `g` with the run's own stream.
pub fn run_attack(g: &DirectedGraph, plan: &AttackPlan, run_index: u64) -> Result<AttackTrace> {
    let fractions = plan.fractions_for(g.active_node_count(), plan.pool(g));
    let mut rng = RngStream::new(plan.seed).derive(run_index);
    run_attack_observed(g, plan, &fractions, &mut rng, |_, _, _| {})
}

/// Like [`run_attack`] with an explicit grid and stream. `observe` sees the
/// step index, the graph the target was chosen on, and the target, just
/// before each removal.
pub fn run_attack_observed(
    g: &DirectedGraph,
    plan: &AttackPlan,
    fractions: &[f64],
    rng: &mut RngStream,
    mut observe: impl FnMut(usize, &DirectedGraph, Target),
) -> Result<AttackTrace> {
    check_fractions(fractions)?;
    if g.active_node_count() == 0 {
        return Err(Error::invalid("cannot attack a graph without active nodes"));
    }
    let pool = plan.pool(g);
    // Keep at least one node so that n_D stays defined.
    let cap = if plan.strategy.removes_nodes() { pool - 1 } else { pool };
    let mut g = g.clone();
    let mut removed = 0;
    let mut trace = Vec::with_capacity(fractions.len());
    for &f in fractions {
        let k = ((f * pool as f64).round() as usize).min(cap);
        while removed < k {
            let t = select_target(&g, plan.strategy, plan.degree, rng)?;
            observe(removed, &g, t);
            match t {
                Target::Node(u) => {
                    g.remove_node(u)?;
                }
                Target::Edge((u, v)) => {
                    g.remove_edge(u, v)?;
                }
            }
            removed += 1;
        }
        trace.push((f, driver_count(&g, plan.kind, plan.state_mode)?));
    }
    Ok(trace)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub fraction: f64,
    pub mean_nd: f64,
    pub std_nd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RobustnessCurve {
    pub points: Vec<CurvePoint>,
    pub runs: usize,
    pub plan: AttackPlan,
    /// The generation spec with any calibrated parameters filled in.
    pub spec: GenerationSpec,
}

impl RobustnessCurve {
    /// `fraction,mean_nd,std_nd,runs` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("fraction,mean_nd,std_nd,runs\n");
        for p in &self.points {
            s.push_str(&format!("{},{},{},{}\n", p.fraction, p.mean_nd, p.std_nd, self.runs));
        }
        s
    }
}

/// Label of the generation sub-stream of a sweep.
pub const SWEEP_GRAPH_STREAM: u64 = 0x6EA7;

/// Generates one graph per run (or reuses the graph of a deterministic model),
/// attacks each, and aggregates the pointwise mean and sample standard
/// deviation of `n_D`. Run `r` draws its graph from
/// `RngStream::new(spec.seed).derive(SWEEP_GRAPH_STREAM).derive(r)` and its
/// attack from `RngStream::new(plan.seed).derive(r)`.
pub fn run_sweep(spec: &GenerationSpec, plan: &AttackPlan) -> Result<RobustnessCurve> {
    plan.validate()?;
    let resolved = spec.resolve()?;
    let shared = if resolved.model.is_stochastic() {
        None
    } else {
        Some(resolved.build(&mut RngStream::new(spec.seed))?)
    };
    let graph_for = |r: usize| -> Result<DirectedGraph> {
        match &shared {
            Some(g) => Ok(g.clone()),
            None => resolved.build(&mut RngStream::new(spec.seed).derive(SWEEP_GRAPH_STREAM).derive(r as u64)),
        }
    };
    let first = graph_for(0)?;
    let fractions = plan.fractions_for(first.active_node_count(), plan.pool(&first));
    let traces: Vec<Vec<f64>> = (0..plan.runs)
        .into_par_iter()
        .map(|r| -> Result<Vec<f64>> {
            let g = if r == 0 { first.clone() } else { graph_for(r)? };
            let mut rng = RngStream::new(plan.seed).derive(r as u64);
            let trace = run_attack_observed(&g, plan, &fractions, &mut rng, |_, _, _| {})?;
            Ok(trace.into_iter().map(|(_, d)| d.density).collect())
        })
        .collect::<Result<_>>()?;
    Ok(RobustnessCurve { points: aggregate(&fractions, &traces), runs: plan.runs, plan: plan.clone(), spec: resolved })
}

fn aggregate(fractions: &[f64], traces: &[Vec<f64>]) -> Vec<CurvePoint> {
    let runs = traces.len() as f64;
    fractions
        .iter()
        .enumerate()
        .map(|(i, &fraction)| {
            let mean = traces.iter().map(|t| t[i]).sum::<f64>() / runs;
            let std_nd = if traces.len() < 2 {
                0.0
            } else {
                (traces.iter().map(|t| (t[i] - mean).powi(2)).sum::<f64>() / (runs - 1.0)).sqrt()
            };
            CurvePoint { fraction, mean_nd: mean, std_nd }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_chain, ModelKind};

    fn plan(strategy: AttackStrategy) -> AttackPlan {
        AttackPlan::new(strategy, ControlKind::Structural, 1, 7)
    }

    #[test]
    fn star_hub_is_the_degree_target() {
        let star = DirectedGraph::from_edges(6, (1..6).map(|v| (0, v))).unwrap();
        let mut rng = RngStream::new(0);
        for _ in 0..10 {
            assert_eq!(select_target(&star, AttackStrategy::TaNd, AttackDegree::Out, &mut rng).unwrap(), Target::Node(0));
        }
    }

    #[test]
    fn chain_betweenness_target_is_central() {
        let chain = gen_chain(5).unwrap();
        let mut rng = RngStream::new(1);
        assert_eq!(select_target(&chain, AttackStrategy::TaNb, AttackDegree::Out, &mut rng).unwrap(), Target::Node(2));
        // Even length: the two middle nodes tie.
        let chain = gen_chain(6).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..50 {
            if let Target::Node(u) = select_target(&chain, AttackStrategy::TaNb, AttackDegree::Out, &mut rng).unwrap() {
                seen.insert(u);
            }
        }
        assert_eq!(seen.into_iter().collect::<Vec<_>>(), vec![2, 3]);
    }

    #[test]
    fn empty_pools_error() {
        let g = DirectedGraph::new(3);
        let mut rng = RngStream::new(0);
        for s in [AttackStrategy::TaE, AttackStrategy::RaE] {
            let e = select_target(&g, s, AttackDegree::Out, &mut rng).unwrap_err();
            assert_eq!(e.kind(), "empty-pool");
        }
    }

    #[test]
    fn fractions_are_checked() {
        let g = gen_chain(10).unwrap();
        let mut p = plan(AttackStrategy::RaN);
        p.fractions = Some(vec![0.0, 1.0]);
        assert!(run_attack(&g, &p, 0).is_err());
        p.fractions = Some(vec![0.5, 0.2]);
        assert!(run_attack(&g, &p, 0).is_err());
        p.fractions = Some(vec![0.0]);
        let t = run_attack(&g, &p, 0).unwrap();
        assert_eq!(t[0].1.drivers, 1);
    }

    #[test]
    fn interior_removal_on_chain() {
        let g = gen_chain(100).unwrap();
        let mut p = plan(AttackStrategy::RaN);
        p.fractions = Some(vec![0.0, 0.01]);
        let mut rng = RngStream::new(3);
        let mut victim = None;
        let t = run_attack_observed(&g, &p, &p.fractions.clone().unwrap(), &mut rng, |_, _, t| victim = Some(t)).unwrap();
        let Some(Target::Node(u)) = victim else { panic!() };
        let expected = if u == 0 || u == 99 { 1.0 / 99.0 } else { 2.0 / 99.0 };
        assert_eq!(t[1].1.density, expected);
    }

    #[test]
    fn edge_removal_on_chain_splits_it() {
        let g = gen_chain(10).unwrap();
        let mut p = plan(AttackStrategy::TaE);
        p.fractions = Some(vec![0.0, 0.1]);
        let t = run_attack(&g, &p, 0).unwrap();
        assert_eq!(t[1].1.drivers, 2);
    }

    #[test]
    fn default_grid() {
        assert_eq!(default_fractions(4, 4), vec![0.0, 0.25, 0.5, 0.75]);
        let big = default_fractions(1000, 1000);
        assert_eq!(big.len(), 100);
        assert_eq!(big[1], 0.01);
    }

    #[test]
    fn single_run_has_zero_spread() {
        let spec = {
            let mut s = GenerationSpec::new(ModelKind::SnapbackMultiplex, 30);
            s.q = Some(0.1);
            s.seed = 5;
            s
        };
        let c = run_sweep(&spec, &plan(AttackStrategy::RaN)).unwrap();
        assert_eq!(c.points.len(), 30);
        assert!(c.points.iter().all(|p| p.std_nd == 0.0));
        assert!(c.to_csv().starts_with("fraction,mean_nd,std_nd,runs\n0,"));
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in AttackStrategy::ALL {
            assert_eq!(s.name().parse::<AttackStrategy>().unwrap(), s);
        }
        assert!("ta-x".parse::<AttackStrategy>().is_err());
    }
}
