use std::collections::BTreeMap;
use std::str::FromStr;

use serde::Serialize;

use crate::error::Error;
use crate::graph::DirectedGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Out,
    In,
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "out" => Ok(Direction::Out),
            "in" => Ok(Direction::In),
            other => Err(Error::invalid(format!("unknown direction {other:?}"))),
        }
    }
}

/// Degree frequencies over active nodes. Frequencies are real so that
/// histograms from several runs can be averaged.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DegreeHistogram {
    pub counts: BTreeMap<usize, f64>,
}

impl DegreeHistogram {
    pub fn total(&self) -> f64 {
        self.counts.values().sum()
    }

    pub fn mean(&self) -> f64 {
        let total = self.total();
        if total == 0.0 {
            return 0.0;
        }
        self.counts.iter().map(|(&d, &c)| d as f64 * c).sum::<f64>() / total
    }

    pub fn variance(&self) -> f64 {
        let total = self.total();
        if total == 0.0 {
            return 0.0;
        }
        let m = self.mean();
        self.counts
            .iter()
            .map(|(&d, &c)| c * (d as f64 - m).powi(2))
            .sum::<f64>()
            / total
    }

    /// Pointwise mean of several histograms.
    pub fn average(hists: &[DegreeHistogram]) -> DegreeHistogram {
        let mut counts = BTreeMap::new();
        if hists.is_empty() {
            return DegreeHistogram { counts };
        }
        for h in hists {
            for (&d, &c) in &h.counts {
                *counts.entry(d).or_insert(0.0) += c;
            }
        }
        let k = hists.len() as f64;
        for c in counts.values_mut() {
            *c /= k;
        }
        DegreeHistogram { counts }
    }

    /// `degree,count` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("degree,count\n");
        for (d, c) in &self.counts {
            s.push_str(&format!("{d},{c}\n"));
        }
        s
    }
}

pub fn degree_histogram(g: &DirectedGraph, direction: Direction) -> DegreeHistogram {
    let mut counts = BTreeMap::new();
    for u in g.active_nodes() {
        let d = match direction {
            Direction::Out => g.out_degree(u),
            Direction::In => g.in_degree(u),
        };
        *counts.entry(d).or_insert(0.0) += 1.0;
    }
    DegreeHistogram { counts }
}
