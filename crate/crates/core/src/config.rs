//! Plain-text experiment configuration.
//!
//! One `key = value` pair per line; blank lines and lines starting with `#`
//! are ignored. Keys match the CLI flag names. Attack keys are only allowed
//! when `strategy` is present.
//!
//! ```text
//! # robustness run
//! model = snapback-multiplex
//! n = 100
//! target-k = 3.8
//! seed = 1
//! strategy = ra-n
//! ctrl = structural
//! runs = 30
//! attack-seed = 2
//! ```

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::attacks::{check_fractions, AttackDegree, AttackPlan, AttackStrategy};
use crate::controllability::{ControlKind, StateMode};
use crate::error::{Error, Result};
use crate::generators::{format_int_set, parse_int_set, DegreeConvention, GenerationSpec, ModelKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub generation: GenerationSpec,
    pub plan: Option<AttackPlan>,
    pub output: Option<String>,
    pub verbosity: u8,
}

const GENERATION_KEYS: [&str; 9] =
    ["model", "n", "q", "layers", "remainders", "target-k", "convention", "mcn-unit-modulus", "seed"];
const PLAN_KEYS: [&str; 7] = ["strategy", "ctrl", "state-mode", "runs", "grid", "attack-seed", "degree"];
const OTHER_KEYS: [&str; 2] = ["output", "verbosity"];

fn parse_value<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Parse { line, message: format!("bad value {value:?} for {key}") })
}

fn parse_with<T>(value: &str, line: usize, f: impl FnOnce(&str) -> Result<T>) -> Result<T> {
    f(value).map_err(|e| match e {
        Error::InvalidArgument(message) => Error::Parse { line, message },
        other => other,
    })
}

/// `default` or a comma-separated list of fractions.
pub fn parse_grid(s: &str) -> Result<Option<Vec<f64>>> {
    let s = s.trim();
    if s == "default" {
        return Ok(None);
    }
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| Error::invalid(format!("bad grid value {x:?}"))))
        .collect::<Result<_>>()?;
    check_fractions(&v)?;
    Ok(Some(v))
}

pub fn format_grid(grid: Option<&[f64]>) -> String {
    match grid {
        None => "default".to_string(),
        Some(v) => v.iter().map(f64::to_string).collect::<Vec<_>>().join(","),
    }
}

impl ExperimentConfig {
    pub fn new(generation: GenerationSpec) -> Self {
        ExperimentConfig { generation, plan: None, output: None, verbosity: 0 }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: BTreeMap<&str, (&str, usize)> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let (k, v) = t
                .split_once('=')
                .ok_or_else(|| Error::Parse { line, message: format!("expected key = value, got {t:?}") })?;
            let (k, v) = (k.trim(), v.trim());
            if !GENERATION_KEYS.contains(&k) && !PLAN_KEYS.contains(&k) && !OTHER_KEYS.contains(&k) {
                return Err(Error::Parse { line, message: format!("unknown key {k:?}") });
            }
            if entries.insert(k, (v, line)).is_some() {
                return Err(Error::Parse { line, message: format!("duplicate key {k:?}") });
            }
        }

        let (model, line) = entries
            .get("model")
            .copied()
            .ok_or_else(|| Error::Parse { line: 0, message: "missing key \"model\"".into() })?;
        let model: ModelKind = parse_with(model, line, str::parse)?;
        let (n, line) =
            entries.get("n").copied().ok_or_else(|| Error::Parse { line: 0, message: "missing key \"n\"".into() })?;
        let mut g = GenerationSpec::new(model, parse_value("n", n, line)?);
        for (&k, &(v, line)) in &entries {
            match k {
                "q" => g.q = Some(parse_value(k, v, line)?),
                "layers" => g.layers = parse_with(v, line, parse_int_set)?,
                "remainders" => {
                    g.remainders = parse_with(v, line, parse_int_set)?
                        .ok_or_else(|| Error::Parse { line, message: "remainders cannot be \"all\"".into() })?
                }
                "target-k" => g.target_avg_degree = Some(parse_value(k, v, line)?),
                "convention" => g.convention = parse_with(v, line, str::parse::<DegreeConvention>)?,
                "mcn-unit-modulus" => g.mcn_unit_modulus = parse_value(k, v, line)?,
                "seed" => g.seed = parse_value(k, v, line)?,
                _ => {}
            }
        }

        let plan = match entries.get("strategy") {
            None => {
                if let Some((k, (_, line))) = entries.iter().find(|(k, _)| PLAN_KEYS.contains(k)) {
                    return Err(Error::Parse { line: *line, message: format!("{k} given without strategy") });
                }
                None
            }
            Some(&(s, line)) => {
                let strategy: AttackStrategy = parse_with(s, line, str::parse)?;
                let mut p = AttackPlan::new(strategy, ControlKind::Structural, 1, 0);
                for (&k, &(v, line)) in &entries {
                    match k {
                        "ctrl" => p.kind = parse_with(v, line, str::parse::<ControlKind>)?,
                        "state-mode" => p.state_mode = parse_with(v, line, str::parse::<StateMode>)?,
                        "runs" => p.runs = parse_value(k, v, line)?,
                        "grid" => p.fractions = parse_with(v, line, parse_grid)?,
                        "attack-seed" => p.seed = parse_value(k, v, line)?,
                        "degree" => p.degree = parse_with(v, line, str::parse::<AttackDegree>)?,
                        _ => {}
                    }
                }
                Some(p)
            }
        };

        let output = entries.get("output").map(|(v, _)| v.to_string());
        let verbosity = match entries.get("verbosity") {
            Some(&(v, line)) => parse_value("verbosity", v, line)?,
            None => 0,
        };
        Ok(ExperimentConfig { generation: g, plan, output, verbosity })
    }

    pub fn to_text(&self) -> String {
        let g = &self.generation;
        let mut lines = vec![format!("model = {}", g.model.name()), format!("n = {}", g.n)];
        if let Some(q) = g.q {
            lines.push(format!("q = {q}"));
        }
        lines.push(format!("layers = {}", format_int_set(g.layers.as_deref())));
        let mut rem = g.remainders.clone();
        rem.sort_unstable();
        rem.dedup();
        lines.push(format!("remainders = {}", format_int_set(Some(&rem))));
        if let Some(t) = g.target_avg_degree {
            lines.push(format!("target-k = {t}"));
        }
        lines.push(format!("convention = {}", g.convention.name()));
        lines.push(format!("mcn-unit-modulus = {}", g.mcn_unit_modulus));
        lines.push(format!("seed = {}", g.seed));
        if let Some(p) = &self.plan {
            lines.push(format!("strategy = {}", p.strategy.name()));
            lines.push(format!("ctrl = {}", p.kind.name()));
            lines.push(format!("state-mode = {}", p.state_mode.name()));
            lines.push(format!("runs = {}", p.runs));
            lines.push(format!("grid = {}", format_grid(p.fractions.as_deref())));
            lines.push(format!("attack-seed = {}", p.seed));
            lines.push(format!("degree = {}", p.degree.name()));
        }
        if let Some(o) = &self.output {
            lines.push(format!("output = {o}"));
        }
        lines.push(format!("verbosity = {}", self.verbosity));
        let mut s = lines.join("\n");
        s.push('\n');
        s
    }
}
