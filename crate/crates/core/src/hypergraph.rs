//! Uniform hypergraphs and the random greedy independent-set process.
//!
//! The K_{2,2}-free process is the greedy process on the 4-uniform hypergraph
//! whose vertices are the pairs of `K_{n,n}` and whose edges are the copies of
//! `K_{2,2}`. This module builds that hypergraph, measures the degree
//! parameters the greedy-process theorem asks for, runs the generic process,
//! and couples it with [`ProcessState`] step for step.
//!
//! Text format: a header line `N r E`, then `E` lines of `r` ascending vertex
//! indices separated by single spaces.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::Pair;
use crate::process::{ChoiceStream, Chooser, ProcessState, Step};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    vertex_count: usize,
    rank: usize,
    edges: Vec<Vec<u32>>,
}

impl Hypergraph {
    /// Validates and stores an `r`-uniform hypergraph. Each edge is sorted.
    pub fn new(vertex_count: usize, rank: usize, edges: Vec<Vec<u32>>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidHypergraph("rank must be positive".into()));
        }
        if vertex_count > u32::MAX as usize {
            return Err(Error::InvalidHypergraph("too many vertices".into()));
        }
        let mut edges = edges;
        for (i, e) in edges.iter_mut().enumerate() {
            if e.len() != rank {
                return Err(Error::InvalidHypergraph(format!(
                    "edge {i} has {} vertices, expected {rank}",
                    e.len()
                )));
            }
            e.sort_unstable();
            if e.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidHypergraph(format!("edge {i} repeats a vertex")));
            }
            if e.iter().any(|&v| v as usize >= vertex_count) {
                return Err(Error::InvalidHypergraph(format!("edge {i} has a vertex out of range")));
            }
        }
        let mut sorted: Vec<&Vec<u32>> = edges.iter().collect();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidHypergraph("duplicate edge".into()));
        }
        Ok(Hypergraph {
            vertex_count,
            rank,
            edges,
        })
    }

    /// The hypergraph of `K_{2,2}` copies in `K_{n,n}`.
    ///
    /// Vertex `x · n + y` is the pair `(x, y)`; edges are listed by
    /// `x < x′`, then `y < y′`.
    pub fn k22(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::SideTooSmall { n, min: 2 });
        }
        let v = |x: usize, y: usize| (x * n + y) as u32;
        let mut edges = Vec::with_capacity((n * (n - 1) / 2).pow(2));
        for x in 0..n {
            for x2 in x + 1..n {
                for y in 0..n {
                    for y2 in y + 1..n {
                        edges.push(vec![v(x, y), v(x, y2), v(x2, y), v(x2, y2)]);
                    }
                }
            }
        }
        Ok(Hypergraph {
            vertex_count: n * n,
            rank: 4,
            edges,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn edges(&self) -> &[Vec<u32>] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<u64> {
        let mut d = vec![0u64; self.vertex_count];
        for e in &self.edges {
            for &v in e {
                d[v as usize] += 1;
            }
        }
        d
    }

    /// True iff no edge lies entirely inside the marked vertex set.
    pub fn is_independent(&self, members: &[bool]) -> bool {
        !self
            .edges
            .iter()
            .any(|e| e.iter().all(|&v| members[v as usize]))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{} {} {}", self.vertex_count, self.rank, self.edges.len()).unwrap();
        for e in &self.edges {
            let line: Vec<String> = e.iter().map(u32::to_string).collect();
            writeln!(s, "{}", line.join(" ")).unwrap();
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let body = text.strip_suffix('\n').unwrap_or(text);
        let mut lines = body.split('\n').enumerate().map(|(i, l)| (i + 1, l));
        let ints = |line: usize, l: &str| -> Result<Vec<usize>> {
            l.split(' ')
                .map(|t| {
                    t.parse::<usize>().map_err(|_| Error::Parse {
                        line,
                        msg: format!("invalid integer {t:?}"),
                    })
                })
                .collect()
        };
        let (hl, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header \"N r E\"".into(),
        })?;
        let head = ints(hl, header)?;
        let [nv, rank, count] = head[..] else {
            return Err(Error::Parse {
                line: hl,
                msg: "header must be \"N r E\"".into(),
            });
        };
        let mut edges = Vec::with_capacity(count);
        for (line, l) in lines {
            let e = ints(line, l)?;
            if e.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Parse {
                    line,
                    msg: "edge vertices must be strictly ascending".into(),
                });
            }
            edges.push(e.into_iter().map(|v| v as u32).collect());
        }
        if edges.len() != count {
            return Err(Error::Parse {
                line: edges.len() + 1,
                msg: format!("expected {count} edges, found {}", edges.len()),
            });
        }
        Hypergraph::new(nv, rank, edges)
    }
}

/// Degree parameters of a hypergraph, computed by exact enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeProfile {
    pub vertex_count: usize,
    pub rank: usize,
    pub d_min: u64,
    pub d_max: u64,
    /// `ℓ ↦ Δ_ℓ`, the largest number of edges containing an `ℓ`-set.
    pub delta: BTreeMap<usize, u64>,
    /// `b ↦ Γ_b`, the largest b-codegree; only `b = r − 1` is computed.
    pub gamma: BTreeMap<usize, u64>,
}

fn max_run<K: Ord>(mut keys: Vec<K>) -> u64 {
    keys.sort_unstable();
    let mut best = 0u64;
    let mut i = 0;
    while i < keys.len() {
        let mut j = i + 1;
        while j < keys.len() && keys[j] == keys[i] {
            j += 1;
        }
        best = best.max((j - i) as u64);
        i = j;
    }
    best
}

/// Calls `f` with every `size`-subset of `items` (in lexicographic order).
fn for_each_subset(items: &[u32], size: usize, buf: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
    fn rec(items: &[u32], start: usize, size: usize, buf: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
        if buf.len() == size {
            f(buf);
            return;
        }
        let need = size - buf.len();
        for i in start..=items.len() - need {
            buf.push(items[i]);
            rec(items, i + 1, size, buf, f);
            buf.pop();
        }
    }
    buf.clear();
    if size <= items.len() {
        rec(items, 0, size, buf, f);
    }
}

/// Subset keys packed into a `u128` when they fit, else kept as vectors.
enum KeyCodec {
    Packed(u32),
    Wide,
}

impl KeyCodec {
    fn for_subsets(vertex_count: usize, size: usize) -> Self {
        let width = usize::BITS - vertex_count.saturating_sub(1).leading_zeros();
        let width = width.max(1);
        if (width as usize) * size <= 128 {
            KeyCodec::Packed(width)
        } else {
            KeyCodec::Wide
        }
    }

    fn pack(width: u32, s: &[u32]) -> u128 {
        s.iter().fold(0u128, |acc, &v| (acc << width) | v as u128)
    }
}

fn delta_of(h: &Hypergraph, size: usize) -> u64 {
    let mut buf = Vec::with_capacity(size);
    match KeyCodec::for_subsets(h.vertex_count, size) {
        KeyCodec::Packed(w) => {
            let mut keys = Vec::with_capacity(h.edges.len());
            for e in &h.edges {
                for_each_subset(e, size, &mut buf, &mut |s| keys.push(KeyCodec::pack(w, s)));
            }
            max_run(keys)
        }
        KeyCodec::Wide => {
            let mut keys = Vec::new();
            for e in &h.edges {
                for_each_subset(e, size, &mut buf, &mut |s| keys.push(s.to_vec()));
            }
            max_run(keys)
        }
    }
}

/// `Γ_{r−1}`: edges sharing `r − 1` vertices differ in one vertex each, so
/// group edges by their `(r−1)`-subsets and count each pair of leftovers.
fn top_codegree(h: &Hypergraph) -> u64 {
    let size = h.rank - 1;
    let mut groups: Vec<(u128, Vec<u32>, u32)> = Vec::new();
    let codec = KeyCodec::for_subsets(h.vertex_count, size);
    let mut rest = Vec::with_capacity(size);
    for e in &h.edges {
        for (skip, &w) in e.iter().enumerate() {
            rest.clear();
            rest.extend(e.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v));
            match codec {
                KeyCodec::Packed(width) => groups.push((KeyCodec::pack(width, &rest), Vec::new(), w)),
                KeyCodec::Wide => groups.push((0, rest.clone(), w)),
            }
        }
    }
    groups.sort_unstable();
    let mut pair_keys = Vec::new();
    let mut i = 0;
    while i < groups.len() {
        let mut j = i + 1;
        while j < groups.len() && groups[j].0 == groups[i].0 && groups[j].1 == groups[i].1 {
            j += 1;
        }
        for a in i..j {
            for b in a + 1..j {
                let (v, w) = (groups[a].2, groups[b].2);
                pair_keys.push(((v.min(w) as u64) << 32) | v.max(w) as u64);
            }
        }
        i = j;
    }
    max_run(pair_keys)
}

pub fn degree_profile(h: &Hypergraph) -> DegreeProfile {
    let degs = h.degrees();
    let mut delta = BTreeMap::new();
    for l in 2..h.rank {
        delta.insert(l, delta_of(h, l));
    }
    let mut gamma = BTreeMap::new();
    if h.rank >= 2 {
        gamma.insert(h.rank - 1, top_codegree(h));
    }
    DegreeProfile {
        vertex_count: h.vertex_count,
        rank: h.rank,
        d_min: degs.iter().copied().min().unwrap_or(0),
        d_max: degs.iter().copied().max().unwrap_or(0),
        delta,
        gamma,
    }
}

/// One inequality: `value < bound`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Check<T> {
    pub value: T,
    pub bound: T,
    pub holds: bool,
}

impl<T: Real> Check<T> {
    fn less_than(value: T, bound: T) -> Self {
        Check {
            value,
            bound,
            holds: value < bound,
        }
    }
}

/// Which hypotheses of the greedy independent-set theorem a hypergraph meets.
#[derive(Clone, Debug, PartialEq)]
pub struct BbConditions<T> {
    pub epsilon: T,
    pub regular: bool,
    /// `N^ε < D`.
    pub degree_large: Check<T>,
    /// `Δ_ℓ < D^{(r−ℓ)/(r−1) − ε}` for `ℓ = 2..r−1`.
    pub delta: Vec<(usize, Check<T>)>,
    /// `Γ_{r−1} < D^{1−ε}`.
    pub gamma: Check<T>,
}

impl<T: Real> BbConditions<T> {
    pub fn all_hold(&self) -> bool {
        self.regular
            && self.degree_large.holds
            && self.delta.iter().all(|(_, c)| c.holds)
            && self.gamma.holds
    }
}

/// Evaluates the hypotheses. For irregular hypergraphs `D` is the minimum
/// degree and `regular` is reported false.
pub fn check_bb_conditions<T: Real>(profile: &DegreeProfile, eps: T) -> BbConditions<T> {
    let d = T::from_count(profile.d_min);
    let nv = T::from_count(profile.vertex_count as u64);
    let r = T::from_count(profile.rank as u64);
    let delta = profile
        .delta
        .iter()
        .map(|(&l, &v)| {
            let exp = (r - T::from_count(l as u64)) / (r - T::one()) - eps;
            (l, Check::less_than(T::from_count(v), d.powf(exp)))
        })
        .collect();
    let gamma_value = profile
        .gamma
        .get(&(profile.rank.saturating_sub(1)))
        .copied()
        .unwrap_or(0);
    BbConditions {
        epsilon: eps,
        regular: profile.d_min == profile.d_max,
        degree_large: Check::less_than(nv.powf(eps), d),
        delta,
        gamma: Check::less_than(T::from_count(gamma_value), d.powf(T::one() - eps)),
    }
}

/// The guaranteed order of growth `N · (ln N / D)^{1/(r−1)}` of the greedy
/// independent set.
pub fn greedy_scale<T: Real>(vertex_count: usize, degree: u64, rank: usize) -> T {
    let nv = T::from_count(vertex_count as u64);
    let d = T::from_count(degree);
    let r1 = T::from_count(rank as u64 - 1);
    nv * (nv.ln() / d).powf(T::one() / r1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum VertexStatus {
    Live,
    Selected,
    Deleted,
}

/// State of the random greedy independent-set process.
///
/// Live vertices sit in an indexed array. On each selection the chosen vertex
/// is swap-removed first, then every vertex deleted by a singleton edge, in
/// ascending order.
#[derive(Clone, Debug)]
pub struct GreedyState {
    incidence: Vec<Vec<u32>>,
    current: Vec<Vec<u32>>,
    edge_alive: Vec<bool>,
    status: Vec<VertexStatus>,
    live: Vec<u32>,
    slot: Vec<u32>,
    independent: Vec<u32>,
    singletons: Vec<u32>,
    deleted: Vec<u32>,
}

impl GreedyState {
    pub fn new(h: &Hypergraph) -> Self {
        let nv = h.vertex_count;
        let mut incidence = vec![Vec::new(); nv];
        for (i, e) in h.edges.iter().enumerate() {
            for &v in e {
                incidence[v as usize].push(i as u32);
            }
        }
        let mut st = GreedyState {
            incidence,
            current: h.edges.clone(),
            edge_alive: vec![true; h.edges.len()],
            status: vec![VertexStatus::Live; nv],
            live: (0..nv as u32).collect(),
            slot: (0..nv as u32).collect(),
            independent: Vec::new(),
            singletons: Vec::new(),
            deleted: Vec::new(),
        };
        // Rank-1 edges forbid their vertex from the start.
        let initial: Vec<u32> = (0..st.current.len() as u32)
            .filter(|&e| st.current[e as usize].len() == 1)
            .collect();
        st.singletons = initial;
        st.delete_singletons();
        st
    }

    /// Live vertices in sampling-array order.
    pub fn live(&self) -> &[u32] {
        &self.live
    }

    pub fn independent_set(&self) -> &[u32] {
        &self.independent
    }

    /// Vertices deleted by the most recent selection, ascending.
    pub fn last_deleted(&self) -> &[u32] {
        &self.deleted
    }

    pub fn is_finished(&self) -> bool {
        self.live.is_empty()
    }

    fn remove_live(&mut self, v: u32) {
        let pos = self.slot[v as usize] as usize;
        let last = self.live.pop().expect("live list non-empty");
        if pos < self.live.len() {
            self.live[pos] = last;
            self.slot[last as usize] = pos as u32;
        }
        self.slot[v as usize] = u32::MAX;
    }

    /// Selects a live vertex and applies the three update rules.
    pub fn select(&mut self, v: u32) {
        assert_eq!(self.status[v as usize], VertexStatus::Live, "vertex {v} is not live");
        // Rule 2.
        self.remove_live(v);
        self.status[v as usize] = VertexStatus::Selected;
        self.independent.push(v);
        // Rule 1: shrink every edge through v; queue fresh singletons.
        self.singletons.clear();
        for &e in &self.incidence[v as usize] {
            let e = e as usize;
            if !self.edge_alive[e] {
                continue;
            }
            let cur = &mut self.current[e];
            cur.retain(|&w| w != v);
            if cur.len() == 1 {
                self.singletons.push(e as u32);
            }
        }
        self.delete_singletons();
    }

    /// Rule 3, run as a work queue within the current step.
    fn delete_singletons(&mut self) {
        self.deleted.clear();
        let mut queue = std::mem::take(&mut self.singletons);
        while let Some(e) = queue.pop() {
            let e = e as usize;
            if !self.edge_alive[e] || self.current[e].len() != 1 {
                continue;
            }
            let w = self.current[e][0];
            if self.status[w as usize] == VertexStatus::Live {
                self.status[w as usize] = VertexStatus::Deleted;
                self.deleted.push(w);
            }
            // Every edge through a deleted vertex is removed.
            for &e2 in &self.incidence[w as usize] {
                self.edge_alive[e2 as usize] = false;
            }
        }
        self.singletons = queue;
        self.deleted.sort_unstable();
        let deleted = std::mem::take(&mut self.deleted);
        for &w in &deleted {
            self.remove_live(w);
        }
        self.deleted = deleted;
    }

    /// Selects a uniform live vertex; `None` once no live vertex remains.
    pub fn step_with<C: Chooser>(&mut self, chooser: &mut C) -> Option<u32> {
        if self.live.is_empty() {
            return None;
        }
        let v = self.live[chooser.choose(self.live.len())];
        self.select(v);
        Some(v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreedyOutcome {
    /// Final independent set, in selection order.
    pub independent: Vec<u32>,
    /// Number of vertices deleted at each step.
    pub deletions: Vec<usize>,
}

impl GreedyOutcome {
    pub fn size(&self) -> usize {
        self.independent.len()
    }

    /// Ratio of `|I|` to `N · (ln N / D)^{1/(r−1)}`.
    pub fn scale_ratio<T: Real>(&self, h: &Hypergraph) -> T {
        let d = h.degrees().into_iter().max().unwrap_or(0);
        T::from_count(self.size() as u64) / greedy_scale::<T>(h.vertex_count(), d, h.rank())
    }
}

pub fn greedy_independent_run_with<C: Chooser>(h: &Hypergraph, chooser: &mut C) -> GreedyOutcome {
    let mut st = GreedyState::new(h);
    let mut deletions = Vec::new();
    while st.step_with(chooser).is_some() {
        deletions.push(st.last_deleted().len());
    }
    GreedyOutcome {
        independent: st.independent,
        deletions,
    }
}

pub fn greedy_independent_run(h: &Hypergraph, seed: u64) -> GreedyOutcome {
    greedy_independent_run_with(h, &mut ChoiceStream::new(seed))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equivalence {
    pub identical: bool,
    pub steps: u64,
    /// First step (1-based) where the engines disagreed.
    pub first_divergence: Option<u64>,
}

/// Runs the greedy process on `H_{K_{2,2}}(n)` and the specialized engine on
/// identical choice streams and compares the selections and candidate arrays
/// after every step. `max_steps = None` runs both to completion.
pub fn equivalence_check(n: usize, seed: u64, max_steps: Option<u64>) -> Result<Equivalence> {
    let h = Hypergraph::k22(n)?;
    let mut greedy = GreedyState::new(&h);
    let mut process = ProcessState::new(n, seed)?;
    let mut greedy_stream = ChoiceStream::new(seed);
    let mut process_stream = ChoiceStream::new(seed);
    let mut steps = 0u64;
    let same_candidates = |p: &ProcessState, g: &GreedyState| {
        p.pairs()
            .open_pairs()
            .map(|q| (q.x * n + q.y) as u32)
            .eq(g.live().iter().copied())
    };
    if !same_candidates(&process, &greedy) {
        return Ok(Equivalence {
            identical: false,
            steps,
            first_divergence: Some(0),
        });
    }
    loop {
        if max_steps.is_some_and(|b| steps >= b) {
            break;
        }
        let a = process.step_with(&mut process_stream);
        let b = greedy
            .step_with(&mut greedy_stream)
            .map(|v| Pair::new(v as usize / n, v as usize % n));
        let agree = match (a, b) {
            (Step::Terminated, None) => break,
            (Step::Chosen(p), Some(q)) => p == q && same_candidates(&process, &greedy),
            _ => false,
        };
        steps += 1;
        if !agree {
            return Ok(Equivalence {
                identical: false,
                steps,
                first_divergence: Some(steps),
            });
        }
    }
    Ok(Equivalence {
        identical: true,
        steps,
        first_divergence: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::ScriptedChooser;

    fn choose2(n: usize) -> usize {
        n * (n - 1) / 2
    }

    /// Δ_ℓ by scanning every ℓ-set of vertices.
    fn brute_delta(h: &Hypergraph, l: usize) -> u64 {
        let nv = h.vertex_count();
        let mut best = 0;
        let all: Vec<u32> = (0..nv as u32).collect();
        let mut buf = Vec::new();
        for_each_subset(&all, l, &mut buf, &mut |s| {
            let c = h
                .edges()
                .iter()
                .filter(|e| s.iter().all(|v| e.contains(v)))
                .count() as u64;
            best = best.max(c);
        });
        best
    }

    /// Γ_b by scanning every ordered pair of edges.
    fn brute_gamma(h: &Hypergraph, b: usize) -> u64 {
        let mut counts: BTreeMap<(u32, u32), u64> = BTreeMap::new();
        for e in h.edges() {
            for f in h.edges() {
                let common = e.iter().filter(|v| f.contains(v)).count();
                if common != b || e == f {
                    continue;
                }
                for &v in e.iter().filter(|v| !f.contains(v)) {
                    for &w in f.iter().filter(|w| !e.contains(w)) {
                        if v != w {
                            *counts.entry((v, w)).or_default() += 1;
                        }
                    }
                }
            }
        }
        counts.values().copied().max().unwrap_or(0)
    }

    #[test]
    fn k22_hypergraph_examples() {
        let h2 = Hypergraph::k22(2).unwrap();
        assert_eq!((h2.vertex_count(), h2.edges().len()), (4, 1));
        let h3 = Hypergraph::k22(3).unwrap();
        assert_eq!((h3.vertex_count(), h3.edges().len()), (9, 9));
        assert!(h3.degrees().iter().all(|&d| d == 4));
        assert!(Hypergraph::k22(4).unwrap().degrees().iter().all(|&d| d == 9));
        assert!(matches!(Hypergraph::k22(1), Err(Error::SideTooSmall { .. })));
        for n in 2..=8 {
            let h = Hypergraph::k22(n).unwrap();
            assert_eq!(h.edges().len(), choose2(n) * choose2(n));
            assert!(h.degrees().iter().all(|&d| d == ((n - 1) * (n - 1)) as u64));
        }
    }

    #[test]
    fn profile_matches_brute_force() {
        for n in [3, 4, 5] {
            let h = Hypergraph::k22(n).unwrap();
            let p = degree_profile(&h);
            assert_eq!(p.delta[&2], brute_delta(&h, 2));
            assert_eq!(p.delta[&3], brute_delta(&h, 3));
            assert_eq!(p.gamma[&3], brute_gamma(&h, 3));
        }
        let p3 = degree_profile(&Hypergraph::k22(3).unwrap());
        assert_eq!((p3.delta[&2], p3.delta[&3], p3.gamma[&3]), (2, 1, 0));
        let p5 = degree_profile(&Hypergraph::k22(5).unwrap());
        assert_eq!((p5.delta[&2], p5.delta[&3], p5.gamma[&3]), (4, 1, 0));
        let single = Hypergraph::new(4, 4, vec![vec![0, 1, 2, 3]]).unwrap();
        let ps = degree_profile(&single);
        assert_eq!((ps.d_max, ps.delta[&2], ps.delta[&3], ps.gamma[&3]), (1, 1, 1, 0));
    }

    #[test]
    fn gamma_counts_edges_differing_in_one_vertex() {
        // {0,1,2} and {0,1,3} share two vertices; {2,3} has 2-codegree 1,
        // and adding {0,2,4}... irrelevant to b = 2 for pair {2,3}.
        let h = Hypergraph::new(5, 3, vec![vec![0, 1, 2], vec![0, 1, 3], vec![1, 2, 3], vec![0, 2, 4]]).unwrap();
        assert_eq!(degree_profile(&h).gamma[&2], brute_gamma(&h, 2));
    }

    #[test]
    fn bb_conditions_examples() {
        let p50 = degree_profile(&Hypergraph::k22(50).unwrap());
        assert_eq!(p50.delta[&2], 49);
        let c = check_bb_conditions(&p50, 0.1f64);
        assert!(c.all_hold(), "{c:?}");

        let p3 = degree_profile(&Hypergraph::k22(3).unwrap());
        let c = check_bb_conditions(&p3, 0.3f64);
        assert!(c.degree_large.holds);
        assert!((c.degree_large.value - 9f64.powf(0.3)).abs() < 1e-12);
        assert!((c.degree_large.value - 1.933).abs() < 1e-3);

        let irregular = Hypergraph::new(5, 3, vec![vec![0, 1, 2], vec![0, 3, 4]]).unwrap();
        let c = check_bb_conditions(&degree_profile(&irregular), 0.1f32);
        assert!(!c.regular);
        assert!(!c.all_hold());
    }

    #[test]
    fn greedy_examples() {
        let empty = Hypergraph::new(5, 4, vec![]).unwrap();
        let out = greedy_independent_run(&empty, 9);
        let mut set = out.independent.clone();
        set.sort_unstable();
        assert_eq!(set, vec![0, 1, 2, 3, 4]);

        let single = Hypergraph::new(4, 4, vec![vec![0, 1, 2, 3]]).unwrap();
        let h2 = Hypergraph::k22(2).unwrap();
        assert_eq!(single, h2);
        // Every order: 4 · 3 · 2 choices, then the last vertex is deleted.
        for a in 0..4 {
            for b in 0..3 {
                for c in 0..2 {
                    let mut ch = ScriptedChooser::new(vec![a, b, c]);
                    let out = greedy_independent_run_with(&single, &mut ch);
                    assert_eq!(out.size(), 3);
                    assert_eq!(ch.lens, vec![4, 3, 2]);
                    assert_eq!(out.deletions, vec![0, 0, 1]);
                }
            }
        }
    }

    #[test]
    fn greedy_result_is_maximal_independent() {
        for seed in 0..20 {
            for n in 2..=5 {
                let h = Hypergraph::k22(n).unwrap();
                let out = greedy_independent_run(&h, seed);
                let mut members = vec![false; h.vertex_count()];
                for &v in &out.independent {
                    members[v as usize] = true;
                }
                assert!(h.is_independent(&members));
                for v in 0..h.vertex_count() {
                    if !members[v] {
                        members[v] = true;
                        assert!(!h.is_independent(&members), "seed {seed} n {n}: {v} addable");
                        members[v] = false;
                    }
                }
                assert!(out.scale_ratio::<f64>(&h) > 0.0);
            }
        }
    }

    #[test]
    fn equivalence_examples() {
        for seed in 0..50 {
            for n in 2..=4 {
                let eq = equivalence_check(n, seed, None).unwrap();
                assert!(eq.identical, "n {n} seed {seed}: {eq:?}");
            }
        }
        let eq = equivalence_check(2, 1, None).unwrap();
        assert_eq!(eq.steps, 3);
        assert_eq!(equivalence_check(6, 1, Some(5)).unwrap().steps, 5);
    }

    #[test]
    fn text_format_round_trip() {
        let h = Hypergraph::k22(3).unwrap();
        let text = h.to_text();
        assert!(text.starts_with("9 4 9\n0 1 3 4\n"));
        assert_eq!(Hypergraph::parse_text(&text).unwrap(), h);
        assert!(matches!(Hypergraph::parse_text("4 4 1\n0 2 1 3\n"), Err(Error::Parse { line: 2, .. })));
        assert!(Hypergraph::parse_text("4 4 2\n0 1 2 3\n0 1 2 3\n").is_err());
        assert!(matches!(Hypergraph::parse_text("4 4 2\n0 1 2 3\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn new_rejects_malformed_edges() {
        assert!(Hypergraph::new(4, 3, vec![vec![0, 1]]).is_err());
        assert!(Hypergraph::new(4, 2, vec![vec![1, 1]]).is_err());
        assert!(Hypergraph::new(4, 2, vec![vec![1, 4]]).is_err());
        assert!(Hypergraph::new(4, 2, vec![vec![1, 2], vec![2, 1]]).is_err());
    }
}
