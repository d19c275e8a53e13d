//! Census of weakly connected induced 4-node subgraphs.
//!
//! A 4-node digraph is encoded in 12 bits, one per ordered pair `(a, b)`,
//! `a != b`: bit `3a + (b - [b > a])` is set iff `a -> b`. The class id is the
//! smallest code over all 24 relabellings. Connected 4-sets are enumerated
//! once each with the ESU scheme: a set is grown from its smallest node, and a
//! node joins the extension only if it is larger than the root and not already
//! adjacent to the current set.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::OnceLock;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeId};

pub type ClassId = u16;

pub const CHAIN_LABEL: &str = "chain-A";
pub const LOOP_LABEL: &str = "loop-D";

const CODES: usize = 1 << 12;

#[inline]
fn bit(a: usize, b: usize) -> usize {
    3 * a + if b > a { b - 1 } else { b }
}

/// 12-bit code of the digraph on `0..4` with the given edges.
pub fn encode(edges: &[(usize, usize)]) -> Result<u16> {
    let mut code = 0u16;
    for &(a, b) in edges {
        if a >= 4 || b >= 4 || a == b {
            return Err(Error::invalid(format!("({a}, {b}) is not an edge of a 4-node digraph")));
        }
        code |= 1 << bit(a, b);
    }
    Ok(code)
}

fn permute(code: u16, p: &[usize; 4]) -> u16 {
    let mut out = 0u16;
    for a in 0..4 {
        for b in 0..4 {
            if a != b && code & (1 << bit(a, b)) != 0 {
                out |= 1 << bit(p[a], p[b]);
            }
        }
    }
    out
}

fn connected(code: u16) -> bool {
    let mut reach = 1u8;
    for _ in 0..3 {
        for a in 0..4 {
            for b in 0..4 {
                if a != b && code & (1 << bit(a, b)) != 0 && (reach >> a | reach >> b) & 1 == 1 {
                    reach |= 1 << a | 1 << b;
                }
            }
        }
    }
    reach == 0b1111
}

fn permutations() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    if (1u8 << a | 1 << b | 1 << c | 1 << d) == 0b1111 {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// Class id for every code; `u16::MAX` marks disconnected codes.
fn table() -> &'static [u16; CODES] {
    static TABLE: OnceLock<Box<[u16; CODES]>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let perms = permutations();
        let mut t = Box::new([u16::MAX; CODES]);
        for code in 0..CODES as u16 {
            if connected(code) {
                t[code as usize] = perms.iter().map(|p| permute(code, p)).min().expect("24 permutations");
            }
        }
        t
    })
}

pub fn canonical_class(code: u16) -> Result<ClassId> {
    if code as usize >= CODES {
        return Err(Error::invalid(format!("code {code} has more than 12 bits")));
    }
    match table()[code as usize] {
        u16::MAX => Err(Error::invalid(format!("code {code:#05x} is not weakly connected"))),
        c => Ok(c),
    }
}

/// Class of the directed path `0 -> 1 -> 2 -> 3`.
pub fn chain_class() -> ClassId {
    canonical_class(encode(&[(0, 1), (1, 2), (2, 3)]).expect("valid")).expect("connected")
}

/// Class of the directed cycle `0 -> 1 -> 2 -> 3 -> 0`.
pub fn loop_class() -> ClassId {
    canonical_class(encode(&[(0, 1), (1, 2), (2, 3), (3, 0)]).expect("valid")).expect("connected")
}

/// Number of distinct connected classes (199 for 4-node digraphs).
pub fn class_count() -> usize {
    let mut ids: Vec<u16> = table().iter().copied().filter(|&c| c != u16::MAX).collect();
    ids.sort_unstable();
    ids.dedup();
    ids.len()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MotifCensus {
    pub counts: BTreeMap<ClassId, u64>,
    pub named_classes: BTreeMap<String, ClassId>,
    pub total_enumerated: u64,
}

impl MotifCensus {
    pub fn count(&self, class: ClassId) -> u64 {
        self.counts.get(&class).copied().unwrap_or(0)
    }

    pub fn label(&self, class: ClassId) -> &str {
        self.named_classes.iter().find(|(_, &c)| c == class).map_or("", |(l, _)| l.as_str())
    }

    /// `(class, count)` by decreasing count, ties by class id.
    pub fn ranked(&self) -> Vec<(ClassId, u64)> {
        let mut v: Vec<(ClassId, u64)> = self.counts.iter().map(|(&c, &n)| (c, n)).collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        v
    }

    /// `class_id,count,named_label` rows by decreasing count.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("class_id,count,named_label\n");
        for (c, n) in self.ranked() {
            s.push_str(&format!("{c},{n},{}\n", self.label(c)));
        }
        s
    }
}

/// Out-adjacency lookup: a bit matrix when it fits in `BITSET_LIMIT` nodes,
/// otherwise binary search in the sorted successor lists.
enum Lookup<'g> {
    Bits { words: usize, bits: Vec<u64> },
    Lists(&'g DirectedGraph),
}

const BITSET_LIMIT: usize = 20_000;

impl<'g> Lookup<'g> {
    fn new(g: &'g DirectedGraph) -> Self {
        let n = g.node_count();
        if n > BITSET_LIMIT {
            return Lookup::Lists(g);
        }
        let words = n.div_ceil(64);
        let mut bits = vec![0u64; n * words];
        for u in g.active_nodes() {
            for &v in g.successors(u) {
                bits[u * words + v / 64] |= 1 << (v % 64);
            }
        }
        Lookup::Bits { words, bits }
    }

    #[inline]
    fn has(&self, u: NodeId, v: NodeId) -> bool {
        match self {
            Lookup::Bits { words, bits } => bits[u * words + v / 64] >> (v % 64) & 1 == 1,
            Lookup::Lists(g) => g.has_edge(u, v),
        }
    }

    fn code(&self, s: &[NodeId; 4]) -> u16 {
        let mut code = 0u16;
        for a in 0..4 {
            for b in 0..4 {
                if a != b && self.has(s[a], s[b]) {
                    code |= 1 << bit(a, b);
                }
            }
        }
        code
    }
}

/// Undirected adjacency for the exclusive-neighbourhood test.
enum Near<'a> {
    Bits { words: usize, bits: Vec<u64> },
    Lists(&'a [Vec<NodeId>]),
}

impl<'a> Near<'a> {
    fn new(nbrs: &'a [Vec<NodeId>]) -> Self {
        let n = nbrs.len();
        if n > BITSET_LIMIT {
            return Near::Lists(nbrs);
        }
        let words = n.div_ceil(64);
        let mut bits = vec![0u64; n * words];
        for (u, list) in nbrs.iter().enumerate() {
            for &v in list {
                bits[u * words + v / 64] |= 1 << (v % 64);
            }
        }
        Near::Bits { words, bits }
    }

    #[inline]
    fn adjacent(&self, u: NodeId, v: NodeId) -> bool {
        match self {
            Near::Bits { words, bits } => bits[u * words + v / 64] >> (v % 64) & 1 == 1,
            Near::Lists(nbrs) => nbrs[u].binary_search(&v).is_ok(),
        }
    }
}

struct Esu<'a> {
    nbrs: &'a [Vec<NodeId>],
    near: &'a Near<'a>,
    lookup: &'a Lookup<'a>,
    table: &'a [u16; CODES],
    counts: Vec<u64>,
    stop: &'a AtomicBool,
    deadline: Option<Instant>,
}

impl Esu<'_> {
    /// Extension candidates are larger than the root, outside the set and
    /// not adjacent to it. Nodes already in `ext` are adjacent to the set,
    /// so they are excluded without a separate membership test.
    fn extend(&mut self, set: &mut [NodeId; 4], len: usize, ext: &mut Vec<NodeId>) {
        let root = set[0];
        while let Some(w) = ext.pop() {
            if len == 1 && self.expired() {
                return;
            }
            set[len] = w;
            if len == 3 {
                self.counts[self.table[self.lookup.code(set) as usize] as usize] += 1;
                continue;
            }
            let mut next = ext.clone();
            for &u in &self.nbrs[w] {
                if u > root && !set[..len].contains(&u) && !set[..len].iter().any(|&s| self.near.adjacent(s, u)) {
                    next.push(u);
                }
            }
            self.extend(set, len + 1, &mut next);
        }
    }

    fn expired(&self) -> bool {
        if self.stop.load(Ordering::Relaxed) {
            return true;
        }
        if self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.stop.store(true, Ordering::Relaxed);
            return true;
        }
        false
    }

    fn root(&mut self, v: NodeId) {
        if self.expired() {
            return;
        }
        let mut ext: Vec<NodeId> = self.nbrs[v].iter().copied().filter(|&u| u > v).collect();
        let mut set = [v, 0, 0, 0];
        self.extend(&mut set, 1, &mut ext);
    }
}

fn census_inner(g: &DirectedGraph, deadline: Option<Instant>) -> (MotifCensus, bool) {
    let nbrs = g.undirected_neighbors();
    let lookup = Lookup::new(g);
    let near = Near::new(&nbrs);
    let table = table();
    let stop = AtomicBool::new(false);
    let roots: Vec<NodeId> = g.active_nodes().collect();
    let per_chunk: Vec<Vec<u64>> = roots
        .par_chunks(16)
        .map(|chunk| {
            let mut esu =
                Esu { nbrs: &nbrs, near: &near, lookup: &lookup, table, counts: vec![0; CODES], stop: &stop, deadline };
            for &v in chunk {
                esu.root(v);
            }
            esu.counts
        })
        .collect();
    let mut totals = vec![0u64; CODES];
    for c in per_chunk {
        totals.iter_mut().zip(c).for_each(|(a, b)| *a += b);
    }
    let counts: BTreeMap<ClassId, u64> =
        totals.iter().enumerate().filter(|(_, &n)| n > 0).map(|(c, &n)| (c as ClassId, n)).collect();
    let total_enumerated = counts.values().sum();
    let named_classes =
        BTreeMap::from([(CHAIN_LABEL.to_string(), chain_class()), (LOOP_LABEL.to_string(), loop_class())]);
    (MotifCensus { counts, named_classes, total_enumerated }, stop.load(Ordering::Relaxed))
}

pub fn motif_census(g: &DirectedGraph) -> MotifCensus {
    census_inner(g, None).0
}

/// Census that gives up once `deadline` passes. Returns the counts gathered
/// so far and whether the enumeration finished.
pub fn motif_census_until(g: &DirectedGraph, deadline: Instant) -> (MotifCensus, bool) {
    let (c, stopped) = census_inner(g, Some(deadline));
    (c, !stopped)
}
