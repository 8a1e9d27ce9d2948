//! The bipartite K_{2,2}-free process on `K_{n,n}`.
//!
//! Every pair `(u, v)` carries a closure counter: the number of length-3
//! paths `u – y′ – x′ – v` in the current graph. A non-edge is open iff its
//! counter is zero. Choosing a pair increments the counters of every pair
//! whose first path it completes, so closure tracking costs `O(Δ²)` per step.
//!
//! Open pairs live in an indexed array with a position map: uniform sampling
//! and removal are both `O(1)`. The removal order is fixed: the chosen pair is
//! swap-removed first, then the newly closed pairs in ascending
//! `x · n + y` order. The generic hypergraph engine follows the same contract,
//! which is what lets the two be coupled step for step.

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Pair};
use crate::scalar::Real;

const NOT_OPEN: u32 = u32::MAX;

/// Largest side size whose `n²` pair indices fit a `u32`.
pub const MAX_SIDE: usize = 65_535;

/// Derives an independent 64-bit seed for stream `index` of `seed`.
///
/// SplitMix64: add `(index + 1) · 0x9E3779B97F4A7C15`, then apply its
/// finalizer. The finalizer is a bijection on `u64`, so distinct indices give
/// distinct seeds.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Source of uniform indices into a candidate list.
pub trait Chooser {
    /// Returns a uniform index in `0..len`. `len` is never zero.
    fn choose(&mut self, len: usize) -> usize;
}

/// Seeded ChaCha8 stream producing unbiased indices by rejection sampling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChoiceStream {
    rng: ChaCha8Rng,
    seed: u64,
}

impl ChoiceStream {
    /// Identifier recorded in every output artifact.
    pub const ALGORITHM: &'static str = "chacha8";

    pub fn new(seed: u64) -> Self {
        ChoiceStream {
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
}

impl Chooser for ChoiceStream {
    fn choose(&mut self, len: usize) -> usize {
        debug_assert!(len > 0);
        let bound = len as u64;
        // 2^64 mod bound; values below it would over-represent small residues.
        let reject_below = bound.wrapping_neg() % bound;
        loop {
            let v = self.rng.next_u64();
            if v >= reject_below {
                return (v % bound) as usize;
            }
        }
    }
}

/// Replays a fixed list of indices; used for exhaustive enumeration.
#[derive(Clone, Debug, Default)]
pub struct ScriptedChooser {
    script: Vec<usize>,
    pos: usize,
    /// Candidate-list length observed at each call.
    pub lens: Vec<usize>,
}

impl ScriptedChooser {
    pub fn new(script: Vec<usize>) -> Self {
        ScriptedChooser {
            script,
            pos: 0,
            lens: Vec::new(),
        }
    }
}

impl Chooser for ScriptedChooser {
    /// Past the end of the script it keeps choosing index 0.
    fn choose(&mut self, len: usize) -> usize {
        self.lens.push(len);
        let c = self.script.get(self.pos).copied().unwrap_or(0);
        self.pos += 1;
        assert!(c < len, "scripted index {c} out of range {len}");
        c
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum PairState {
    Open,
    Closed,
    Chosen,
}

/// Per-pair states, closure counters and the sampling array of open pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairStore {
    n: usize,
    state: Vec<PairState>,
    closure: Vec<u32>,
    open: Vec<u32>,
    slot: Vec<u32>,
    closed_count: usize,
    chosen_count: usize,
}

impl PairStore {
    /// All `n²` pairs open, listed in lexicographic `(x, y)` order.
    pub fn new(n: usize) -> Self {
        let nn = n * n;
        PairStore {
            n,
            state: vec![PairState::Open; nn],
            closure: vec![0; nn],
            open: (0..nn as u32).collect(),
            slot: (0..nn as u32).collect(),
            closed_count: 0,
            chosen_count: 0,
        }
    }

    #[inline]
    pub fn index(&self, p: Pair) -> usize {
        p.x * self.n + p.y
    }

    #[inline]
    pub fn pair(&self, idx: usize) -> Pair {
        Pair::new(idx / self.n, idx % self.n)
    }

    #[inline]
    pub fn state(&self, p: Pair) -> PairState {
        self.state[self.index(p)]
    }

    /// Number of length-3 paths joining the endpoints of `p`.
    #[inline]
    pub fn closure(&self, p: Pair) -> u32 {
        self.closure[self.index(p)]
    }

    #[inline]
    pub fn is_open(&self, p: Pair) -> bool {
        self.state(p) == PairState::Open
    }

    #[inline]
    pub fn open_count(&self) -> usize {
        self.open.len()
    }

    pub fn closed_count(&self) -> usize {
        self.closed_count
    }

    pub fn chosen_count(&self) -> usize {
        self.chosen_count
    }

    /// The pair at position `i` of the sampling array.
    #[inline]
    pub fn open_at(&self, i: usize) -> Pair {
        self.pair(self.open[i] as usize)
    }

    /// Open pairs in sampling-array order.
    pub fn open_pairs(&self) -> impl Iterator<Item = Pair> + '_ {
        self.open.iter().map(|&i| self.pair(i as usize))
    }

    fn remove_open(&mut self, idx: usize) {
        let pos = self.slot[idx] as usize;
        debug_assert_ne!(pos as u32, NOT_OPEN);
        let last = self.open.pop().expect("open list non-empty");
        if pos < self.open.len() {
            self.open[pos] = last;
            self.slot[last as usize] = pos as u32;
        }
        self.slot[idx] = NOT_OPEN;
    }
}

/// How long [`ProcessState::run`] keeps stepping.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopRule {
    /// Until no open pair remains.
    Completion,
    /// Until termination or `i` reaches the budget.
    MaxSteps(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    Chosen(Pair),
    Terminated,
}

/// `i_max = ⌊ε′ n^{4/3} (ln n)^{1/3}⌋`.
pub fn step_budget<T: Real>(n: usize, eps_prime: T) -> u64 {
    let nf = T::from_count(n as u64);
    let v = eps_prime * nf.powf(T::lit(4.0 / 3.0)) * nf.ln().cbrt();
    v.floor().to_u64().unwrap_or(0)
}

/// One run of the process: graph, pair states, rng and history.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProcessState {
    graph: BipartiteGraph,
    pairs: PairStore,
    stream: ChoiceStream,
    history: Vec<Pair>,
    last_closed: Vec<Pair>,
    touched: Vec<u32>,
}

impl ProcessState {
    pub fn new(n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::SideTooSmall { n, min: 1 });
        }
        if n > MAX_SIDE {
            return Err(Error::InvalidArgument(format!(
                "side size {n} exceeds the supported maximum {MAX_SIDE}"
            )));
        }
        Ok(ProcessState {
            graph: BipartiteGraph::new(n),
            pairs: PairStore::new(n),
            stream: ChoiceStream::new(seed),
            history: Vec::new(),
            last_closed: Vec::new(),
            touched: Vec::new(),
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    #[inline]
    pub fn graph(&self) -> &BipartiteGraph {
        &self.graph
    }

    #[inline]
    pub fn pairs(&self) -> &PairStore {
        &self.pairs
    }

    /// Step counter `i` (equals the edge count).
    #[inline]
    pub fn steps(&self) -> u64 {
        self.history.len() as u64
    }

    #[inline]
    pub fn open_count(&self) -> usize {
        self.pairs.open_count()
    }

    pub fn history(&self) -> &[Pair] {
        &self.history
    }

    pub fn seed(&self) -> u64 {
        self.stream.seed()
    }

    pub fn rng_algorithm(&self) -> &'static str {
        ChoiceStream::ALGORITHM
    }

    pub fn is_terminated(&self) -> bool {
        self.pairs.open_count() == 0
    }

    /// Pairs closed by the most recent choice, ascending.
    pub fn last_closed(&self) -> &[Pair] {
        &self.last_closed
    }

    pub fn into_graph(self) -> BipartiteGraph {
        self.graph
    }

    /// Adds the open pair `p = (x, y)` and returns the pairs it closed.
    ///
    /// New length-3 paths through `p` come in three roles:
    /// `x – y – x′ – v`, `u – y – x – v`, and `u – y′ – x – y`.
    /// Every enumerated pair's counter is incremented; the ones that go from
    /// zero while open are newly closed.
    pub fn choose(&mut self, p: Pair) -> Result<&[Pair]> {
        let n = self.n();
        if p.x >= n || p.y >= n {
            return Err(Error::OutOfRange { x: p.x, y: p.y, n });
        }
        let idx = self.pairs.index(p);
        if self.pairs.state[idx] != PairState::Open {
            return Err(Error::NotOpen { x: p.x, y: p.y });
        }
        self.pairs.remove_open(idx);
        self.pairs.state[idx] = PairState::Chosen;
        self.pairs.chosen_count += 1;

        let (x, y) = (p.x, p.y);
        self.touched.clear();
        let g = &self.graph;
        let pairs = &mut self.pairs;
        let touched = &mut self.touched;
        let mut bump = |u: usize, v: usize| {
            let i = u * n + v;
            let c = &mut pairs.closure[i];
            if *c == 0 && pairs.state[i] == PairState::Open {
                pairs.state[i] = PairState::Closed;
                touched.push(i as u32);
            }
            *c = c.checked_add(1).expect("closure counter overflow");
        };
        // Role 1: u = x, path x – y – x′ – v.
        for &x2 in g.neighbors_y(y) {
            for &v in g.neighbors_x(x2 as usize) {
                if v as usize != y {
                    bump(x, v as usize);
                }
            }
        }
        // Role 2: path u – y – x – v.
        for &u in g.neighbors_y(y) {
            for &v in g.neighbors_x(x) {
                bump(u as usize, v as usize);
            }
        }
        // Role 3: v = y, path u – y′ – x – y.
        for &y2 in g.neighbors_x(x) {
            for &u in g.neighbors_y(y2 as usize) {
                if u as usize != x {
                    bump(u as usize, y);
                }
            }
        }

        self.touched.sort_unstable();
        self.last_closed.clear();
        for &i in &self.touched {
            self.pairs.remove_open(i as usize);
            self.last_closed.push(self.pairs.pair(i as usize));
        }
        self.pairs.closed_count += self.touched.len();
        self.graph.insert_unchecked(x, y);
        self.history.push(p);
        Ok(&self.last_closed)
    }

    /// One step driven by the state's own stream.
    pub fn step(&mut self) -> Step {
        let len = self.pairs.open_count();
        if len == 0 {
            self.last_closed.clear();
            return Step::Terminated;
        }
        let i = self.stream.choose(len);
        self.choose_at(i)
    }

    /// One step drawing the uniform index from `chooser`.
    pub fn step_with<C: Chooser>(&mut self, chooser: &mut C) -> Step {
        let len = self.pairs.open_count();
        if len == 0 {
            self.last_closed.clear();
            return Step::Terminated;
        }
        self.choose_at(chooser.choose(len))
    }

    fn choose_at(&mut self, i: usize) -> Step {
        let p = self.pairs.open_at(i);
        self.choose(p).expect("sampled pair is open");
        Step::Chosen(p)
    }

    /// Steps until the stop rule fires; returns the final step count.
    pub fn run(&mut self, stop: StopRule) -> u64 {
        loop {
            if let StopRule::MaxSteps(b) = stop {
                if self.steps() >= b {
                    break;
                }
            }
            if self.step() == Step::Terminated {
                break;
            }
        }
        self.steps()
    }

    /// `d₂(e)` by neighbor-restricted enumeration.
    ///
    /// Counts `K_{2,2}` copies `{u, x′} × {v, y′}` through the open pair
    /// `e = (u, v)` whose other three pairs are two edges and one open pair.
    pub fn d2_exact(&self, e: Pair) -> Result<u64> {
        self.check_open(e)?;
        let (u, v) = (e.x, e.y);
        let g = &self.graph;
        let open = |a: usize, b: usize| self.pairs.state[a * self.n() + b] == PairState::Open;
        let mut count = 0u64;
        // Edges (u, y′), (x′, y′); open (x′, v).
        for &y2 in g.neighbors_x(u) {
            for &x2 in g.neighbors_y(y2 as usize) {
                if x2 as usize != u && open(x2 as usize, v) {
                    count += 1;
                }
            }
        }
        // Edges (x′, v), (x′, y′); open (u, y′).
        for &x2 in g.neighbors_y(v) {
            for &y2 in g.neighbors_x(x2 as usize) {
                if y2 as usize != v && open(u, y2 as usize) {
                    count += 1;
                }
            }
        }
        // Edges (u, y′), (x′, v); open (x′, y′).
        for &y2 in g.neighbors_x(u) {
            for &x2 in g.neighbors_y(v) {
                if open(x2 as usize, y2 as usize) {
                    count += 1;
                }
            }
        }
        Ok(count)
    }

    /// `d₂(e)` by scanning every `x′ ≠ u`, `y′ ≠ v`.
    pub fn d2_reference(&self, e: Pair) -> Result<u64> {
        self.check_open(e)?;
        let n = self.n();
        let mut count = 0u64;
        for x2 in (0..n).filter(|&a| a != e.x) {
            for y2 in (0..n).filter(|&b| b != e.y) {
                let others = [Pair::new(e.x, y2), Pair::new(x2, e.y), Pair::new(x2, y2)];
                let chosen = others
                    .iter()
                    .filter(|&&p| self.pairs.state(p) == PairState::Chosen)
                    .count();
                let open = others.iter().filter(|&&p| self.pairs.is_open(p)).count();
                if chosen == 2 && open == 1 {
                    count += 1;
                }
            }
        }
        Ok(count)
    }

    fn check_open(&self, e: Pair) -> Result<()> {
        let n = self.n();
        if e.x >= n || e.y >= n {
            return Err(Error::OutOfRange { x: e.x, y: e.y, n });
        }
        if !self.pairs.is_open(e) {
            return Err(Error::NotOpen { x: e.x, y: e.y });
        }
        Ok(())
    }
}
