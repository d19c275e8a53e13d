//! Preconfigured experiment bundles, one per figure.
//!
//! Each bundle writes one CSV per curve into an output directory together
//! with `manifest.json`, which records every generation spec, attack plan,
//! seed and convention needed to regenerate the files.
//!
//! | bundle | content | default | `large` |
//! |---|---|---|---|
//! | fig5 | single-layer out-degree distributions, r in {1,2,3,5,10,100,200,500,1000} | N = 2000 | N = 10^4 |
//! | fig6 | multiplex out-degree distribution | N = 2000 | N = 10^4 |
//! | fig7 | multiplex distributions for q in {0.001,0.01,0.1,0.5,1} | N = 2000 | N = 10^4 |
//! | fig8 | 4-node motif census for q in {0.1, 0.3} | N = 200 | N = 1000 |
//! | fig9 | TA_NB and RA_N curves, 3 models, both kinds | N = 100 | N = 1000 |
//! | fig10 | TA_ND and RA_N curves, 3 models, both kinds | N = 100 | N = 1000 |
//! | fig11 | TA_E and RA_E curves, 3 models, both kinds | N = 100 | N = 1000 |

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::analytics::{degree_histogram, DegreeHistogram, DegreeProfile, Direction};
use crate::attacks::{run_sweep, AttackPlan, AttackStrategy, RobustnessCurve};
use crate::controllability::{ControlKind, StateMode};
use crate::error::{Error, Result};
use crate::generators::{DegreeConvention, GenerationSpec, ModelKind};
use crate::motifs::motif_census;
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
    Fig10,
    Fig11,
}

impl Figure {
    pub const ALL: [Figure; 7] =
        [Figure::Fig5, Figure::Fig6, Figure::Fig7, Figure::Fig8, Figure::Fig9, Figure::Fig10, Figure::Fig11];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
            Figure::Fig7 => "fig7",
            Figure::Fig8 => "fig8",
            Figure::Fig9 => "fig9",
            Figure::Fig10 => "fig10",
            Figure::Fig11 => "fig11",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown figure {s:?}; expected one of fig5..fig11")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReproduceOptions {
    pub large: bool,
    pub seed: u64,
    /// Overrides the run count of every curve.
    pub runs: Option<usize>,
    pub state_mode: StateMode,
}

impl ReproduceOptions {
    pub fn new(seed: u64) -> Self {
        ReproduceOptions { large: false, seed, runs: None, state_mode: StateMode::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Artifact {
    pub file: String,
    pub description: String,
    pub specs: Vec<GenerationSpec>,
    pub plan: Option<AttackPlan>,
    pub runs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Conventions {
    pub average_degree: &'static str,
    pub driver_density: &'static str,
    pub state_mode: &'static str,
    pub fractions: &'static str,
    pub motif_semantics: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub figure: Figure,
    pub options: ReproduceOptions,
    pub conventions: Conventions,
    pub artifacts: Vec<Artifact>,
}

fn conventions(opts: &ReproduceOptions) -> Conventions {
    Conventions {
        average_degree: "robustness bundles target <k> = E/N; distribution bundles report raw counts",
        driver_density: "n_D = N_D / current active node count",
        state_mode: opts.state_mode.name(),
        fractions: "of the original node (p_N) or edge (p_E) count",
        motif_semantics: "induced, weakly connected 4-node subgraphs",
    }
}

/// The three compared families at the given size: q-snapback multiplex,
/// MCN and scale-free. The snapback and scale-free models are tuned to the
/// MCN's average degree; the MCN uses remainder 1, whose `i -> i+1` links form
/// the backbone chain `2 -> 3 -> ... -> n`.
pub fn robustness_models(n: usize, seed: u64) -> Vec<(&'static str, GenerationSpec)> {
    let (qsn_k, other_k) = if n >= 1000 { (6.055, 6.06) } else { (3.78, 3.82) };
    let mut qsn = GenerationSpec::new(ModelKind::SnapbackMultiplex, n);
    qsn.target_avg_degree = Some(qsn_k);
    qsn.convention = DegreeConvention::Out;
    qsn.seed = seed;
    let mut mcn = GenerationSpec::new(ModelKind::Mcn, n);
    mcn.remainders = vec![1];
    mcn.seed = seed;
    let mut sf = GenerationSpec::new(ModelKind::ScaleFree, n);
    sf.target_avg_degree = Some(other_k);
    sf.convention = DegreeConvention::Out;
    sf.seed = seed;
    vec![("qsn", qsn), ("mcn", mcn), ("sf", sf)]
}

/// Runs per curve: random node attacks average 100 runs, everything else 30.
pub fn default_runs(strategy: AttackStrategy) -> usize {
    match strategy {
        AttackStrategy::RaN => 100,
        _ => 30,
    }
}

fn distribution_runs(opts: &ReproduceOptions) -> usize {
    opts.runs.unwrap_or(50)
}

/// Mean out-degree histogram over `runs` graphs drawn from `spec`, run `r`
/// using `RngStream::new(spec.seed).derive(r)`.
pub fn mean_out_histogram(spec: &GenerationSpec, runs: usize) -> Result<DegreeHistogram> {
    let spec = spec.resolve()?;
    let hists: Vec<DegreeHistogram> = (0..runs)
        .into_par_iter()
        .map(|r| {
            let g = spec.build(&mut RngStream::new(spec.seed).derive(r as u64))?;
            Ok(degree_histogram(&g, Direction::Out))
        })
        .collect::<Result<_>>()?;
    Ok(DegreeHistogram::average(&hists))
}

fn distribution_csv(empirical: &DegreeHistogram, analytic: &[(&str, DegreeProfile)]) -> String {
    let rounded: Vec<_> = analytic.iter().map(|(_, p)| p.rounded_out_histogram()).collect();
    let mut degrees: Vec<usize> = empirical.counts.keys().copied().collect();
    for h in &rounded {
        degrees.extend(h.keys().copied());
    }
    degrees.sort_unstable();
    degrees.dedup();
    let mut s = String::from("degree,empirical");
    for (name, _) in analytic {
        s.push(',');
        s.push_str(name);
    }
    s.push('\n');
    for d in degrees {
        s.push_str(&format!("{d},{}", empirical.counts.get(&d).copied().unwrap_or(0.0)));
        for h in &rounded {
            s.push_str(&format!(",{}", h.get(&d).copied().unwrap_or(0)));
        }
        s.push('\n');
    }
    s
}

fn write(dir: &Path, file: &str, content: &str) -> Result<()> {
    fs::write(dir.join(file), content)?;
    Ok(())
}

fn distribution_size(opts: &ReproduceOptions) -> usize {
    if opts.large {
        10_000
    } else {
        2000
    }
}

fn fig5(opts: &ReproduceOptions, dir: &Path) -> Result<Vec<Artifact>> {
    let n = distribution_size(opts);
    let runs = distribution_runs(opts);
    let mut out = Vec::new();
    for r in [1, 2, 3, 5, 10, 100, 200, 500, 1000] {
        let mut spec = GenerationSpec::new(ModelKind::SnapbackLayer, n);
        spec.q = Some(0.1);
        spec.layers = Some(vec![r]);
        spec.seed = opts.seed;
        let emp = mean_out_histogram(&spec, runs)?;
        let analytic = DegreeProfile::layer(n, r, 0.1)?;
        let file = format!("fig5_layer{r}.csv");
        write(dir, &file, &distribution_csv(&emp, &[("analytic", analytic)]))?;
        out.push(Artifact {
            file,
            description: format!("out-degree distribution of layer r = {r}, mean over runs, with rounded expected degrees"),
            specs: vec![spec],
            plan: None,
            runs,
        });
    }
    Ok(out)
}

fn multiplex_distribution(opts: &ReproduceOptions, dir: &Path, q: f64, file: String) -> Result<Artifact> {
    let n = distribution_size(opts);
    let runs = distribution_runs(opts);
    let mut spec = GenerationSpec::new(ModelKind::SnapbackMultiplex, n);
    spec.q = Some(q);
    spec.seed = opts.seed;
    let emp = mean_out_histogram(&spec, runs)?;
    let layers = spec.layer_list();
    let linear = DegreeProfile::multiplex(n, q, &layers, false)?;
    let exact = DegreeProfile::multiplex(n, q, &layers, true)?;
    write(dir, &file, &distribution_csv(&emp, &[("analytic_linear", linear), ("analytic_exact", exact)]))?;
    Ok(Artifact {
        file,
        description: format!("multiplex out-degree distribution at q = {q}, mean over runs, with rounded expected degrees"),
        specs: vec![spec],
        plan: None,
        runs,
    })
}

fn fig8(opts: &ReproduceOptions, dir: &Path) -> Result<Vec<Artifact>> {
    let n = if opts.large { 1000 } else { 200 };
    let mut out = Vec::new();
    for q in [0.1, 0.3] {
        let mut spec = GenerationSpec::new(ModelKind::SnapbackMultiplex, n);
        spec.q = Some(q);
        spec.seed = opts.seed;
        let census = motif_census(&spec.generate()?);
        let file = format!("fig8_q{q}.csv");
        write(dir, &file, &census.to_csv())?;
        out.push(Artifact {
            file,
            description: format!("4-node motif census of one multiplex graph at q = {q}"),
            specs: vec![spec],
            plan: None,
            runs: 1,
        });
    }
    Ok(out)
}

fn robustness(
    fig: Figure,
    strategies: [AttackStrategy; 2],
    opts: &ReproduceOptions,
    dir: &Path,
) -> Result<Vec<Artifact>> {
    let n = if opts.large { 1000 } else { 100 };
    let mut out = Vec::new();
    for (label, spec) in robustness_models(n, opts.seed) {
        for kind in [ControlKind::State, ControlKind::Structural] {
            for strategy in strategies {
                let runs = opts.runs.unwrap_or_else(|| default_runs(strategy));
                let mut plan = AttackPlan::new(strategy, kind, runs, opts.seed);
                plan.state_mode = opts.state_mode;
                let curve: RobustnessCurve = run_sweep(&spec, &plan)?;
                let file = format!("{fig}_{label}_{strategy}_{kind}.csv");
                write(dir, &file, &curve.to_csv())?;
                out.push(Artifact {
                    file,
                    description: format!("{label} under {strategy}, {kind} controllability"),
                    specs: vec![curve.spec.clone()],
                    plan: Some(plan),
                    runs,
                });
            }
        }
    }
    Ok(out)
}

/// Runs the bundle for `figure`, writing its CSVs and `manifest.json` into
/// `dir` (created if missing).
pub fn reproduce(figure: Figure, opts: &ReproduceOptions, dir: &Path) -> Result<Manifest> {
    fs::create_dir_all(dir)?;
    let artifacts = match figure {
        Figure::Fig5 => fig5(opts, dir)?,
        Figure::Fig6 => vec![multiplex_distribution(opts, dir, 0.1, "fig6_multiplex.csv".into())?],
        Figure::Fig7 => [0.001, 0.01, 0.1, 0.5, 1.0]
            .into_iter()
            .map(|q| multiplex_distribution(opts, dir, q, format!("fig7_q{q}.csv")))
            .collect::<Result<_>>()?,
        Figure::Fig8 => fig8(opts, dir)?,
        Figure::Fig9 => robustness(figure, [AttackStrategy::TaNb, AttackStrategy::RaN], opts, dir)?,
        Figure::Fig10 => robustness(figure, [AttackStrategy::TaNd, AttackStrategy::RaN], opts, dir)?,
        Figure::Fig11 => robustness(figure, [AttackStrategy::TaE, AttackStrategy::RaE], opts, dir)?,
    };
    let manifest = Manifest { figure, options: opts.clone(), conventions: conventions(opts), artifacts };
    let mut json = serde_json::to_string_pretty(&manifest)?;
    json.push('\n');
    write(dir, "manifest.json", &json)?;
    Ok(manifest)
}
