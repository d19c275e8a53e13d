//! Network generators: backbone chains, q-snapback layers and multiplexes,
//! multiplex congruence networks and a directed scale-free baseline, plus the
//! average-degree tuning used to put different families on an equal footing.
//!
//! All public functions take 1-based parameters (`n`, layer indices, remainders)
//! exactly as the models are usually stated, and return graphs with 0-based
//! node ids: model node `i` is graph node `i - 1`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeId};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Chain,
    SnapbackLayer,
    SnapbackMultiplex,
    Mcn,
    ScaleFree,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Chain => "chain",
            ModelKind::SnapbackLayer => "snapback-layer",
            ModelKind::SnapbackMultiplex => "snapback-multiplex",
            ModelKind::Mcn => "mcn",
            ModelKind::ScaleFree => "scale-free",
        }
    }

    /// Whether generating this model consumes random draws.
    pub fn is_stochastic(self) -> bool {
        matches!(
            self,
            ModelKind::SnapbackLayer | ModelKind::SnapbackMultiplex | ModelKind::ScaleFree
        )
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "chain" => ModelKind::Chain,
            "snapback-layer" | "layer" => ModelKind::SnapbackLayer,
            "snapback-multiplex" | "snapback" | "qsn" => ModelKind::SnapbackMultiplex,
            "mcn" => ModelKind::Mcn,
            "scale-free" | "sf" => ModelKind::ScaleFree,
            other => return Err(Error::invalid(format!("unknown model {other:?}"))),
        })
    }
}

/// How the average degree of a graph is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegreeConvention {
    /// `2E / N`: mean of in-degree plus out-degree.
    #[default]
    Total,
    /// `E / N`: mean out-degree, i.e. edges per node.
    Out,
}

impl DegreeConvention {
    fn edges_per_unit(self) -> f64 {
        match self {
            DegreeConvention::Total => 0.5,
            DegreeConvention::Out => 1.0,
        }
    }

    /// Edge count whose average degree is closest to `target` on `n` nodes.
    pub fn edges_for(self, target: f64, n: usize) -> usize {
        (target * n as f64 * self.edges_per_unit()).round().max(0.0) as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            DegreeConvention::Total => "total",
            DegreeConvention::Out => "out",
        }
    }
}

impl FromStr for DegreeConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "total" | "2e/n" => Ok(DegreeConvention::Total),
            "out" | "e/n" => Ok(DegreeConvention::Out),
            other => Err(Error::invalid(format!("unknown degree convention {other:?}"))),
        }
    }
}

/// Average degree over the active nodes of `g`.
pub fn average_degree(g: &DirectedGraph, convention: DegreeConvention) -> f64 {
    let n = g.active_node_count();
    if n == 0 {
        return 0.0;
    }
    g.edge_count() as f64 / (n as f64 * convention.edges_per_unit())
}

/// Everything needed to regenerate a graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationSpec {
    pub model: ModelKind,
    pub n: usize,
    /// Snapback probability. May be left unset when a target degree is given.
    pub q: Option<f64>,
    /// Snapback layers; `None` means every layer `1..=n-1`.
    pub layers: Option<Vec<usize>>,
    /// MCN remainders.
    pub remainders: Vec<usize>,
    pub target_avg_degree: Option<f64>,
    pub convention: DegreeConvention,
    /// Let modulus 1 act as an MCN source (node 1 then links to every node
    /// for remainder 0).
    pub mcn_unit_modulus: bool,
    pub seed: u64,
}

impl GenerationSpec {
    pub fn new(model: ModelKind, n: usize) -> Self {
        GenerationSpec {
            model,
            n,
            q: None,
            layers: None,
            remainders: vec![0],
            target_avg_degree: None,
            convention: DegreeConvention::Total,
            mcn_unit_modulus: false,
            seed: 0,
        }
    }

    pub fn layer_list(&self) -> Vec<usize> {
        match &self.layers {
            Some(l) => l.clone(),
            None => (1..self.n).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::invalid(format!("n must be at least 2, got {}", self.n)));
        }
        if let Some(q) = self.q {
            check_probability(q)?;
        }
        if let Some(layers) = &self.layers {
            check_layers(self.n, layers)?;
        }
        for &r in &self.remainders {
            if r >= self.n {
                return Err(Error::invalid(format!("remainder {r} must be below n = {}", self.n)));
            }
        }
        if let Some(t) = self.target_avg_degree {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::invalid(format!("target average degree must be positive, got {t}")));
            }
        }
        match self.model {
            ModelKind::SnapbackLayer => {
                if self.layers.as_ref().is_none_or(|l| l.len() != 1) {
                    return Err(Error::invalid("snapback-layer needs exactly one layer"));
                }
            }
            ModelKind::SnapbackMultiplex | ModelKind::Mcn => {}
            ModelKind::ScaleFree => {
                if self.target_avg_degree.is_none() {
                    return Err(Error::invalid("scale-free needs a target average degree"));
                }
            }
            ModelKind::Chain => {}
        }
        if matches!(self.model, ModelKind::SnapbackLayer | ModelKind::SnapbackMultiplex)
            && self.q.is_none()
            && self.target_avg_degree.is_none()
        {
            return Err(Error::invalid("snapback models need q or a target average degree"));
        }
        Ok(())
    }

    /// Fills in `q` for snapback models that only carry a target degree, by
    /// calibration on a stream derived from the spec's seed.
    pub fn resolve(&self) -> Result<GenerationSpec> {
        self.validate()?;
        let mut out = self.clone();
        if matches!(self.model, ModelKind::SnapbackLayer | ModelKind::SnapbackMultiplex) && self.q.is_none() {
            let target = self.target_avg_degree.expect("validated");
            let rng = RngStream::new(self.seed).derive(CALIBRATION_STREAM);
            let cal = calibrate_q(self.n, &self.layer_list(), target, self.convention, DEFAULT_CALIBRATION_SEEDS, &rng)?;
            out.q = Some(cal.q);
        }
        Ok(out)
    }

    /// Generates with an explicit stream. Snapback models must have `q` resolved.
    pub fn build(&self, rng: &mut RngStream) -> Result<DirectedGraph> {
        self.validate()?;
        match self.model {
            ModelKind::Chain => gen_chain(self.n),
            ModelKind::SnapbackLayer | ModelKind::SnapbackMultiplex => {
                let q = self
                    .q
                    .ok_or_else(|| Error::invalid("q is unresolved; call resolve() first"))?;
                if self.model == ModelKind::SnapbackLayer {
                    gen_snapback_layer(self.n, self.layer_list()[0], q, rng)
                } else {
                    gen_snapback_multiplex(self.n, q, &self.layer_list(), rng)
                }
            }
            ModelKind::Mcn => gen_mcn(self.n, &self.remainders, self.mcn_unit_modulus),
            ModelKind::ScaleFree => {
                let target = self.target_avg_degree.expect("validated");
                gen_scale_free(self.n, target, self.convention, rng)
            }
        }
    }

    /// Resolves and generates from the spec's own seed.
    pub fn generate(&self) -> Result<DirectedGraph> {
        let resolved = self.resolve()?;
        let mut rng = RngStream::new(self.seed);
        resolved.build(&mut rng)
    }
}

/// Label of the stream reserved for q calibration.
pub const CALIBRATION_STREAM: u64 = 0xCA1B;
/// Monte Carlo seeds per calibration.
pub const DEFAULT_CALIBRATION_SEEDS: usize = 20;

fn check_probability(q: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::invalid(format!("q must lie in [0, 1], got {q}")));
    }
    Ok(())
}

fn check_layers(n: usize, layers: &[usize]) -> Result<()> {
    if layers.is_empty() {
        return Err(Error::invalid("layer set is empty"));
    }
    for &r in layers {
        if r == 0 || r >= n {
            return Err(Error::invalid(format!("layer {r} outside 1..={}", n - 1)));
        }
    }
    Ok(())
}

fn chain_rows(n: usize) -> Vec<Vec<NodeId>> {
    (0..n).map(|u| if u + 1 < n { vec![u + 1] } else { Vec::new() }).collect()
}

/// Directed chain `1 -> 2 -> ... -> n`.
pub fn gen_chain(n: usize) -> Result<DirectedGraph> {
    if n < 2 {
        return Err(Error::invalid(format!("chain needs n >= 2, got {n}")));
    }
    Ok(DirectedGraph::from_successors(chain_rows(n))?.0)
}

/// Visits every snapback candidate of the given layers in generation order,
/// handing out one uniform draw per candidate.
///
/// Order: layers as given; within a layer, source `i` ascending and then
/// multiple `k` ascending, candidate `(i, i - k*r)` for every `i - k*r >= 1`.
/// Arguments of `visit` are 0-based.
pub(crate) fn for_each_candidate(
    n: usize,
    layers: &[usize],
    rng: &mut RngStream,
    mut visit: impl FnMut(NodeId, NodeId, f64),
) {
    for &r in layers {
        for i in (r + 1)..=n {
            let mut j = i - r;
            loop {
                let u = rng.uniform();
                visit(i - 1, j - 1, u);
                if j <= r {
                    break;
                }
                j -= r;
            }
        }
    }
}

fn snapback_graph(n: usize, q: f64, layers: &[usize], rng: &mut RngStream) -> Result<DirectedGraph> {
    let mut rows = chain_rows(n);
    for_each_candidate(n, layers, rng, |i, j, u| {
        if u < q {
            rows[i].push(j);
        }
    });
    Ok(DirectedGraph::from_successors(rows)?.0)
}

/// Single layer `G_r(q, n)`: the chain plus each snapback candidate
/// `(i, i - k*r)` kept independently with probability `q`.
pub fn gen_snapback_layer(n: usize, r: usize, q: f64, rng: &mut RngStream) -> Result<DirectedGraph> {
    if n < 2 {
        return Err(Error::invalid(format!("n must be at least 2, got {n}")));
    }
    check_layers(n, &[r])?;
    check_probability(q)?;
    snapback_graph(n, q, &[r], rng)
}

/// Union of independently drawn layers; repeated edges collapse to one.
///
/// Drawing the layers in the given order from one stream produces exactly the
/// union of [`gen_snapback_layer`] calls made in that order on the same stream.
pub fn gen_snapback_multiplex(n: usize, q: f64, layers: &[usize], rng: &mut RngStream) -> Result<DirectedGraph> {
    if n < 2 {
        return Err(Error::invalid(format!("n must be at least 2, got {n}")));
    }
    check_layers(n, layers)?;
    check_probability(q)?;
    snapback_graph(n, q, layers, rng)
}

/// Multiplex congruence network: edge `i -> j` for `i < j <= n` with
/// `j mod i = r`, over every remainder `r` in the set. Sources need `i > r`;
/// modulus 1 is skipped unless `unit_modulus` is set.
pub fn gen_mcn(n: usize, remainders: &[usize], unit_modulus: bool) -> Result<DirectedGraph> {
    if n < 2 {
        return Err(Error::invalid(format!("n must be at least 2, got {n}")));
    }
    let mut rows: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    let first_modulus = if unit_modulus { 1 } else { 2 };
    for &r in remainders {
        if r >= n {
            return Err(Error::invalid(format!("remainder {r} must be below n = {n}")));
        }
        for i in first_modulus.max(r + 1)..=n {
            let mut j = if r == 0 { 2 * i } else { i + r };
            while j <= n {
                rows[i - 1].push(j - 1);
                j += i;
            }
        }
    }
    Ok(DirectedGraph::from_successors(rows)?.0)
}

/// Directed preferential-attachment growth tuned to a target average degree.
///
/// Node `t` (0-based) links to `min(m, t)` distinct earlier nodes, each chosen
/// with probability proportional to in-degree plus one, where `m` is the target
/// edge count divided by `n`, rounded. The result is then passed through
/// [`tune_average_degree`].
pub fn gen_scale_free(n: usize, target: f64, convention: DegreeConvention, rng: &mut RngStream) -> Result<DirectedGraph> {
    if n < 2 {
        return Err(Error::invalid(format!("n must be at least 2, got {n}")));
    }
    if !(target.is_finite() && target > 0.0) {
        return Err(Error::invalid(format!("target average degree must be positive, got {target}")));
    }
    let want = convention.edges_for(target, n);
    let max_edges = n * (n - 1);
    if want == 0 || want > max_edges {
        return Err(Error::invalid(format!(
            "target average degree {target} is not achievable on {n} nodes"
        )));
    }
    let m = ((want as f64 / n as f64).round() as usize).clamp(1, n - 1);
    let mut rows: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    // One entry per node for the unit offset plus one per received edge.
    let mut bag: Vec<NodeId> = Vec::with_capacity(n + m * n);
    let mut chosen: Vec<NodeId> = Vec::with_capacity(m);
    for t in 0..n {
        chosen.clear();
        if t <= m {
            chosen.extend(0..t);
        } else {
            while chosen.len() < m {
                let v = bag[rng.below(bag.len())];
                if !chosen.contains(&v) {
                    chosen.push(v);
                }
            }
        }
        for &v in &chosen {
            rows[t].push(v);
            bag.push(v);
        }
        bag.push(t);
    }
    let mut g = DirectedGraph::from_successors(rows)?.0;
    tune_average_degree(&mut g, target, convention, false, rng)?;
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TuneOutcome {
    pub added: usize,
    pub removed: usize,
}

/// Adds uniformly random absent edges, or deletes uniformly random present
/// edges, until the edge count is the one closest to `target`. With
/// `keep_backbone`, chain edges `(i, i+1)` are never deleted.
pub fn tune_average_degree(
    g: &mut DirectedGraph,
    target: f64,
    convention: DegreeConvention,
    keep_backbone: bool,
    rng: &mut RngStream,
) -> Result<TuneOutcome> {
    let nodes: Vec<NodeId> = g.active_nodes().collect();
    let n = nodes.len();
    if !(target.is_finite() && target >= 0.0) {
        return Err(Error::invalid(format!("target average degree must be non-negative, got {target}")));
    }
    let want = convention.edges_for(target, n);
    let max_edges = n * n.saturating_sub(1);
    if want > max_edges {
        return Err(Error::invalid(format!(
            "target average degree {target} exceeds the densest simple graph on {n} nodes"
        )));
    }
    let have = g.edge_count();
    let mut outcome = TuneOutcome::default();
    if want > have {
        let need = want - have;
        if 4 * want <= max_edges {
            // Sparse regime: rejection sampling over ordered pairs.
            while outcome.added < need {
                let u = nodes[rng.below(n)];
                let v = nodes[rng.below(n)];
                if u != v && g.add_edge(u, v)? {
                    outcome.added += 1;
                }
            }
        } else {
            let mut absent: Vec<(NodeId, NodeId)> = Vec::with_capacity(max_edges - have);
            for &u in &nodes {
                for &v in &nodes {
                    if u != v && !g.has_edge(u, v) {
                        absent.push((u, v));
                    }
                }
            }
            for k in 0..need {
                let pick = k + rng.below(absent.len() - k);
                absent.swap(k, pick);
                let (u, v) = absent[k];
                g.add_edge(u, v)?;
                outcome.added += 1;
            }
        }
    } else if have > want {
        let need = have - want;
        let mut pool: Vec<(NodeId, NodeId)> = g
            .edges()
            .filter(|&(u, v)| !(keep_backbone && v == u + 1))
            .collect();
        if pool.len() < need {
            return Err(Error::invalid(format!(
                "cannot delete {need} edges: only {} are removable",
                pool.len()
            )));
        }
        for k in 0..need {
            let pick = k + rng.below(pool.len() - k);
            pool.swap(k, pick);
            let (u, v) = pool[k];
            g.remove_edge(u, v)?;
            outcome.removed += 1;
        }
    }
    Ok(outcome)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibratedQ {
    pub q: f64,
    /// Monte Carlo mean average degree at `q`.
    pub mean_avg_degree: f64,
}

/// Per-seed sorted minimum draw of every distinct snapback pair. An edge is
/// present at probability `q` exactly when its minimum draw is below `q`, so
/// these sorted lists give the edge count of every seed's graph at any `q`.
fn candidate_minima(n: usize, layers: &[usize], rng: &mut RngStream) -> Vec<f64> {
    // Triangular index over pairs (i, j), j < i, 0-based.
    let idx = |i: usize, j: usize| i * (i - 1) / 2 + j;
    let mut minima = vec![f64::INFINITY; n * (n - 1) / 2];
    for_each_candidate(n, layers, rng, |i, j, u| {
        let slot = &mut minima[idx(i, j)];
        if u < *slot {
            *slot = u;
        }
    });
    let mut present: Vec<f64> = minima.into_iter().filter(|m| m.is_finite()).collect();
    present.sort_unstable_by(|a, b| a.partial_cmp(b).expect("draws are finite"));
    present
}

/// Finds `q` whose Monte Carlo mean average degree (over `seeds` graphs drawn
/// from streams derived from `rng`) is within 1% of `target`, by bisection.
///
/// Every probe reuses the same draws, so the mean is monotone in `q`. Graphs
/// built with [`gen_snapback_multiplex`] on `rng.derive(s)` for `s < seeds`
/// and the returned `q` have exactly the reported mean.
pub fn calibrate_q(
    n: usize,
    layers: &[usize],
    target: f64,
    convention: DegreeConvention,
    seeds: usize,
    rng: &RngStream,
) -> Result<CalibratedQ> {
    if n < 2 {
        return Err(Error::invalid(format!("n must be at least 2, got {n}")));
    }
    check_layers(n, layers)?;
    if seeds == 0 {
        return Err(Error::invalid("calibration needs at least one seed"));
    }
    let per_unit = n as f64 * convention.edges_per_unit();
    let chain_edges = (n - 1) as f64;
    let samples: Vec<Vec<f64>> = (0..seeds)
        .map(|s| candidate_minima(n, layers, &mut rng.derive(s as u64)))
        .collect();
    let pairs = samples[0].len() as f64;
    let degree_at = |q: f64| -> f64 {
        let total: usize = samples.iter().map(|m| m.partition_point(|&x| x < q)).sum();
        (chain_edges + total as f64 / seeds as f64) / per_unit
    };
    let low = chain_edges / per_unit;
    let high = (chain_edges + pairs) / per_unit;
    let eps = 1e-9 * high.max(1.0);
    if !(target.is_finite()) || target < low - eps || target > high + eps {
        return Err(Error::invalid(format!(
            "target average degree {target} outside achievable range [{low}, {high}]"
        )));
    }
    if (target - low).abs() <= eps {
        return Ok(CalibratedQ { q: 0.0, mean_avg_degree: low });
    }
    if (target - high).abs() <= eps {
        return Ok(CalibratedQ { q: 1.0, mean_avg_degree: degree_at(1.0) });
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut q = 0.5;
    for _ in 0..200 {
        q = 0.5 * (lo + hi);
        let d = degree_at(q);
        if (d - target).abs() <= 0.01 * target {
            break;
        }
        if d < target {
            lo = q;
        } else {
            hi = q;
        }
    }
    Ok(CalibratedQ { q, mean_avg_degree: degree_at(q) })
}

/// Parses `all`, or a comma-separated list of integers and `a-b` ranges.
pub fn parse_int_set(s: &str) -> Result<Option<Vec<usize>>> {
    let s = s.trim();
    if s == "all" {
        return Ok(None);
    }
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bad = || Error::invalid(format!("bad integer set element {part:?}"));
        if let Some((a, b)) = part.split_once('-') {
            let a: usize = a.trim().parse().map_err(|_| bad())?;
            let b: usize = b.trim().parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(Some(out))
}

/// Inverse of [`parse_int_set`], compressing runs into ranges.
pub fn format_int_set(set: Option<&[usize]>) -> String {
    let Some(set) = set else {
        return "all".to_string();
    };
    let mut parts = Vec::new();
    let mut i = 0;
    while i < set.len() {
        let mut j = i;
        while j + 1 < set.len() && set[j + 1] == set[j] + 1 {
            j += 1;
        }
        if j > i {
            parts.push(format!("{}-{}", set[i], set[j]));
        } else {
            parts.push(set[i].to_string());
        }
        i = j + 1;
    }
    parts.join(",")
}
