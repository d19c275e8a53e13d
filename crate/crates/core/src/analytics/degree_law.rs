//! Closed-form expected degrees of q-snapback layers and multiplexes.
//!
//! Node indices here are 1-based (`1..=n`), matching the model definition.

use serde::Serialize;

use crate::error::{Error, Result};

fn check(i: usize, n: usize, q: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::invalid(format!("n must be at least 2, got {n}")));
    }
    if i == 0 || i > n {
        return Err(Error::invalid(format!("node {i} outside 1..={n}")));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::invalid(format!("q must lie in [0, 1], got {q}")));
    }
    Ok(())
}

fn check_layer(r: usize, n: usize) -> Result<()> {
    if r == 0 || r >= n {
        return Err(Error::invalid(format!("layer {r} outside 1..={}", n - 1)));
    }
    Ok(())
}

/// Expected out-degree of node `i` on layer `r`.
pub fn layer_out_degree(i: usize, r: usize, q: f64, n: usize) -> Result<f64> {
    check(i, n, q)?;
    check_layer(r, n)?;
    let snap = ((i - 1) / r) as f64 * q;
    Ok(if i <= r {
        1.0
    } else if i < n {
        1.0 + snap
    } else {
        snap
    })
}

/// Expected in-degree of node `i` on layer `r`.
pub fn layer_in_degree(i: usize, r: usize, q: f64, n: usize) -> Result<f64> {
    check(i, n, q)?;
    check_layer(r, n)?;
    Ok(if i == 1 {
        ((n - 1) / r) as f64 * q
    } else if i <= n - r {
        1.0 + ((n - i) / r) as f64 * q
    } else {
        1.0
    })
}

/// Number of layers in `layers` that offer `(i, j)`, `j < i`, as a snapback
/// candidate, i.e. layers dividing `i - j`.
pub fn candidate_layers(i: usize, j: usize, layers: &[usize]) -> usize {
    let d = i - j;
    layers.iter().filter(|&&r| r != 0 && d % r == 0).count()
}

/// Multiplex expected degree in both readings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MultiplexDegree {
    /// Linear form: backbone plus `q` for every pair offered by at least one
    /// layer.
    pub linear: f64,
    /// Exact expectation when each offering layer flips its own coin:
    /// backbone plus `1 - (1-q)^c` for a pair offered by `c` layers.
    pub exact: f64,
}

fn validate_layers(layers: &[usize], n: usize) -> Result<()> {
    if layers.is_empty() {
        return Err(Error::invalid("layer set is empty"));
    }
    layers.iter().try_for_each(|&r| check_layer(r, n))
}

/// `offers[d]` = number of layers dividing distance `d`, for `d < n`.
fn layer_offers(n: usize, layers: &[usize]) -> Vec<usize> {
    let mut offers = vec![0usize; n];
    for &r in layers {
        for d in (r..n).step_by(r) {
            offers[d] += 1;
        }
    }
    offers
}

fn accumulate(distances: impl Iterator<Item = usize>, q: f64, offers: &[usize]) -> (f64, f64) {
    let (mut linear, mut exact) = (0.0, 0.0);
    for d in distances {
        let c = offers[d];
        if c > 0 {
            linear += q;
            exact += 1.0 - (1.0 - q).powi(c as i32);
        }
    }
    (linear, exact)
}

fn out_degree_with(i: usize, q: f64, n: usize, offers: &[usize]) -> MultiplexDegree {
    let backbone = if i < n { 1.0 } else { 0.0 };
    let (linear, exact) = accumulate((1..i).map(|j| i - j), q, offers);
    MultiplexDegree {
        linear: backbone + linear,
        exact: backbone + exact,
    }
}

fn in_degree_with(i: usize, q: f64, n: usize, offers: &[usize]) -> MultiplexDegree {
    let backbone = if i > 1 { 1.0 } else { 0.0 };
    let (linear, exact) = accumulate((i + 1..=n).map(|j| j - i), q, offers);
    MultiplexDegree {
        linear: backbone + linear,
        exact: backbone + exact,
    }
}

/// Expected out-degree of node `i` in the multiplex over `layers`.
pub fn multiplex_out_degree(i: usize, q: f64, n: usize, layers: &[usize]) -> Result<MultiplexDegree> {
    check(i, n, q)?;
    validate_layers(layers, n)?;
    Ok(out_degree_with(i, q, n, &layer_offers(n, layers)))
}

/// Expected in-degree of node `i` in the multiplex over `layers`.
pub fn multiplex_in_degree(i: usize, q: f64, n: usize, layers: &[usize]) -> Result<MultiplexDegree> {
    check(i, n, q)?;
    validate_layers(layers, n)?;
    Ok(in_degree_with(i, q, n, &layer_offers(n, layers)))
}

/// Number of positive divisors of `m`, by trial division up to `sqrt(m)`.
pub fn divisor_count(m: usize) -> usize {
    assert!(m > 0, "divisor count of zero");
    let mut rest = m;
    let mut count = 1;
    let mut p = 2;
    while p * p <= rest {
        let mut e = 0;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        count *= e + 1;
        p += 1;
    }
    if rest > 1 {
        count *= 2;
    }
    count
}

/// Probability that snapback `(i, j)` survives into the full multiplex (all
/// layers): `1 - (1-q)^d(i-j)` with `d` the divisor count.
pub fn edge_existence_probability(i: usize, j: usize, q: f64) -> Result<f64> {
    if j == 0 || j >= i {
        return Err(Error::invalid(format!("need 1 <= j < i, got i = {i}, j = {j}")));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::invalid(format!("q must lie in [0, 1], got {q}")));
    }
    Ok(1.0 - (1.0 - q).powi(divisor_count(i - j) as i32))
}

/// Expected per-node degrees of a configuration, plus the rounded histogram
/// obtained by bucketing each expectation to the nearest integer.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeProfile {
    pub expected_out: Vec<f64>,
    pub expected_in: Vec<f64>,
}

impl DegreeProfile {
    pub fn layer(n: usize, r: usize, q: f64) -> Result<Self> {
        let expected_out = (1..=n).map(|i| layer_out_degree(i, r, q, n)).collect::<Result<_>>()?;
        let expected_in = (1..=n).map(|i| layer_in_degree(i, r, q, n)).collect::<Result<_>>()?;
        Ok(DegreeProfile { expected_out, expected_in })
    }

    /// Multiplex profile; `exact` picks the per-layer-coin expectation over the
    /// linear form.
    pub fn multiplex(n: usize, q: f64, layers: &[usize], exact: bool) -> Result<Self> {
        check(1, n, q)?;
        validate_layers(layers, n)?;
        let offers = layer_offers(n, layers);
        let pick = |d: MultiplexDegree| if exact { d.exact } else { d.linear };
        Ok(DegreeProfile {
            expected_out: (1..=n).map(|i| pick(out_degree_with(i, q, n, &offers))).collect(),
            expected_in: (1..=n).map(|i| pick(in_degree_with(i, q, n, &offers))).collect(),
        })
    }

    /// `(degree, node count)` after rounding each expected out-degree.
    pub fn rounded_out_histogram(&self) -> std::collections::BTreeMap<usize, usize> {
        let mut h = std::collections::BTreeMap::new();
        for &d in &self.expected_out {
            *h.entry(d.round() as usize).or_insert(0) += 1;
        }
        h
    }
}
