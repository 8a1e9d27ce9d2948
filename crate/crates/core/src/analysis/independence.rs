//! Bipartite independence number: the largest `t` with `A ⊆ X`, `B ⊆ Y`,
//! `|A| = |B| = t` and no edge between `A` and `B`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{iter_bits, BipartiteGraph};

pub const DEFAULT_EXACT_LIMIT: usize = 32;

/// The exact search packs each side into one `u64`.
pub const EXACT_MAX_SIDE: usize = 64;

/// Restarts of the heuristic used as the exact search's lower bound.
const EXACT_SEED_RESTARTS: usize = 8;

/// An edgeless rectangle `A × B` with `|A| = |B|`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndependentRectangle {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

impl IndependentRectangle {
    pub fn side(&self) -> usize {
        self.a.len().min(self.b.len())
    }

    pub fn is_independent_in(&self, g: &BipartiteGraph) -> bool {
        self.a.iter().all(|&x| x < g.n()) && self.b.iter().all(|&y| y < g.n()) && g.rect_edge_count(&self.a, &self.b) == 0
    }

    fn balanced(mut a: Vec<usize>, mut b: Vec<usize>) -> Self {
        let t = a.len().min(b.len());
        a.sort_unstable();
        b.sort_unstable();
        a.truncate(t);
        b.truncate(t);
        IndependentRectangle { a, b }
    }
}

/// Exact `β(g)`; rejects `n > limit`.
pub fn bip_independence_exact(g: &BipartiteGraph, limit: usize) -> Result<usize> {
    bip_independence_exact_witness(g, limit).map(|w| w.side())
}

/// Exact `β(g)` with a witnessing rectangle.
///
/// Decides "is there an edgeless `t × t` rectangle" for `t` descending from
/// the matching upper bound `n − ⌈μ/2⌉` down to one above a heuristic lower
/// bound. Each decision is a branch-and-bound over `A`, keeping the common
/// non-neighborhood `C` of `A` and the candidate set `P`.
pub fn bip_independence_exact_witness(g: &BipartiteGraph, limit: usize) -> Result<IndependentRectangle> {
    let n = g.n();
    if n > limit {
        return Err(Error::ExactLimit { n, limit });
    }
    if n > EXACT_MAX_SIDE {
        return Err(Error::InvalidArgument(format!(
            "exact search supports n <= {EXACT_MAX_SIDE}; use the heuristic for n = {n}"
        )));
    }
    let search = BicliqueSearch::new(g);
    let lower = bip_independence_heuristic(g, EXACT_SEED_RESTARTS, 0);
    let mu = search.greedy_matching(search.full, search.full);
    let upper = n - mu.div_ceil(2);
    for t in (lower.side() + 1..=upper).rev() {
        if let Some((a, c)) = search.decide(t) {
            let a: Vec<usize> = iter_bits(&[a]).collect();
            let b: Vec<usize> = iter_bits(&[c]).collect();
            return Ok(IndependentRectangle::balanced(a, b));
        }
    }
    Ok(lower)
}

/// Balanced biclique search in the bipartite complement.
struct BicliqueSearch {
    /// Y-side non-neighbors of each `x`.
    non_x: Vec<u64>,
    /// X-side non-neighbors of each `y`.
    non_y: Vec<u64>,
    /// Adjacency rows of each `x`, for matchings.
    adj_x: Vec<u64>,
    full: u64,
}

impl BicliqueSearch {
    fn new(g: &BipartiteGraph) -> Self {
        let n = g.n();
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let adj_x: Vec<u64> = (0..n).map(|x| g.row_x(x).first().copied().unwrap_or(0)).collect();
        let non_x = adj_x.iter().map(|&r| !r & full).collect();
        let non_y = (0..n).map(|y| !g.row_y(y).first().copied().unwrap_or(0) & full).collect();
        BicliqueSearch { non_x, non_y, adj_x, full }
    }

    /// Size of a greedy matching of the graph restricted to `p × c`.
    fn greedy_matching(&self, p: u64, c: u64) -> usize {
        let mut free = c;
        let mut size = 0;
        for x in iter_bits(&[p]) {
            let avail = self.adj_x[x] & free;
            if avail != 0 {
                free &= !(avail & avail.wrapping_neg());
                size += 1;
            }
        }
        size
    }

    /// Some `(A, C)` with `|A| = t`, `|C| ≥ t` and `A × C` edgeless.
    fn decide(&self, t: usize) -> Option<(u64, u64)> {
        if t == 0 {
            return Some((0, 0));
        }
        self.extend(t, 0, 0, self.full, self.full)
    }

    fn extend(&self, t: usize, a: u64, k: usize, mut c: u64, mut p: u64) -> Option<(u64, u64)> {
        loop {
            let p2 = iter_bits(&[p])
                .filter(|&x| (c & self.non_x[x]).count_ones() as usize >= t)
                .fold(0u64, |m, x| m | 1 << x);
            let c2 = iter_bits(&[c])
                .filter(|&y| k + (self.non_y[y] & p2).count_ones() as usize >= t)
                .fold(0u64, |m, y| m | 1 << y);
            let stable = p2 == p && c2 == c;
            p = p2;
            c = c2;
            if stable {
                break;
            }
        }
        let (pc, cc) = (p.count_ones() as usize, c.count_ones() as usize);
        if cc < t {
            return None;
        }
        if k == t {
            return Some((a, c));
        }
        let need = t - k;
        if pc < need {
            return None;
        }
        // Every matching edge inside P × C needs an endpoint left out.
        if self.greedy_matching(p, c) > (pc - need) + (cc - t) {
            return None;
        }
        let x = iter_bits(&[p])
            .max_by_key(|&x| ((c & self.non_x[x]).count_ones(), std::cmp::Reverse(x)))
            .expect("P is nonempty");
        let bit = 1u64 << x;
        self.extend(t, a | bit, k + 1, c & self.non_x[x], p & !bit)
            .or_else(|| self.extend(t, a, k, c, p & !bit))
    }
}

/// Lower bound on `β(g)`: best of `restarts` randomized balanced greedy
/// constructions, each followed by swap-based local search.
pub fn bip_independence_heuristic(g: &BipartiteGraph, restarts: usize, seed: u64) -> IndependentRectangle {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.n();
    let mut xs: Vec<usize> = (0..n).collect();
    let mut ys: Vec<usize> = (0..n).collect();
    let mut best = IndependentRectangle::default();
    for _ in 0..restarts.max(1) {
        xs.shuffle(&mut rng);
        ys.shuffle(&mut rng);
        let mut s = GreedyRectangle::new(g);
        s.fill(&xs, &ys);
        s.improve(&xs, &ys);
        if s.side() > best.side() {
            best = s.witness();
            if best.side() == n {
                break;
            }
        }
    }
    best
}

struct GreedyRectangle<'g> {
    g: &'g BipartiteGraph,
    in_a: Vec<bool>,
    in_b: Vec<bool>,
    /// `|N(x) ∩ B|`
    to_b: Vec<u32>,
    /// `|N(y) ∩ A|`
    to_a: Vec<u32>,
    a: usize,
    b: usize,
}

impl<'g> GreedyRectangle<'g> {
    fn new(g: &'g BipartiteGraph) -> Self {
        let n = g.n();
        GreedyRectangle {
            g,
            in_a: vec![false; n],
            in_b: vec![false; n],
            to_b: vec![0; n],
            to_a: vec![0; n],
            a: 0,
            b: 0,
        }
    }

    fn side(&self) -> usize {
        self.a.min(self.b)
    }

    fn witness(&self) -> IndependentRectangle {
        let n = self.g.n();
        IndependentRectangle::balanced(
            (0..n).filter(|&x| self.in_a[x]).collect(),
            (0..n).filter(|&y| self.in_b[y]).collect(),
        )
    }

    fn add_x(&mut self, x: usize) {
        debug_assert!(!self.in_a[x] && self.to_b[x] == 0);
        self.in_a[x] = true;
        self.a += 1;
        for &y in self.g.neighbors_x(x) {
            self.to_a[y as usize] += 1;
        }
    }

    fn add_y(&mut self, y: usize) {
        debug_assert!(!self.in_b[y] && self.to_a[y] == 0);
        self.in_b[y] = true;
        self.b += 1;
        for &x in self.g.neighbors_y(y) {
            self.to_b[x as usize] += 1;
        }
    }

    fn remove_x(&mut self, x: usize) {
        self.in_a[x] = false;
        self.a -= 1;
        for &y in self.g.neighbors_x(x) {
            self.to_a[y as usize] -= 1;
        }
    }

    fn remove_y(&mut self, y: usize) {
        self.in_b[y] = false;
        self.b -= 1;
        for &x in self.g.neighbors_y(y) {
            self.to_b[x as usize] -= 1;
        }
    }

    /// Adds admissible vertices in the given orders, always growing the
    /// smaller side when it can.
    fn fill(&mut self, xs: &[usize], ys: &[usize]) {
        let (mut ix, mut iy) = (0, 0);
        loop {
            // Blocked vertices stay blocked while the sides only grow.
            while ix < xs.len() && (self.in_a[xs[ix]] || self.to_b[xs[ix]] > 0) {
                ix += 1;
            }
            while iy < ys.len() && (self.in_b[ys[iy]] || self.to_a[ys[iy]] > 0) {
                iy += 1;
            }
            let grow_x = match (ix < xs.len(), iy < ys.len()) {
                (false, false) => break,
                (true, false) => true,
                (false, true) => false,
                (true, true) => self.a <= self.b,
            };
            if grow_x {
                self.add_x(xs[ix]);
            } else {
                self.add_y(ys[iy]);
            }
        }
    }

    /// Removes one vertex from the larger side when that frees enough
    /// vertices on the smaller side; accepts moves that raise
    /// `(min side, total size)` lexicographically.
    fn improve(&mut self, xs: &[usize], ys: &[usize]) {
        let n = self.g.n();
        let mut freed = vec![0u32; n];
        loop {
            let before = (self.side(), self.a + self.b);
            let grow_a = self.a < self.b;
            freed.iter_mut().for_each(|f| *f = 0);
            // Candidates blocked by exactly one vertex of the larger side.
            if grow_a {
                for x in 0..n {
                    if !self.in_a[x] && self.to_b[x] == 1 {
                        let y = self.g.neighbors_x(x).iter().find(|&&y| self.in_b[y as usize]).expect("one blocker");
                        freed[*y as usize] += 1;
                    }
                }
            } else {
                for y in 0..n {
                    if !self.in_b[y] && self.to_a[y] == 1 {
                        let x = self.g.neighbors_y(y).iter().find(|&&x| self.in_a[x as usize]).expect("one blocker");
                        freed[*x as usize] += 1;
                    }
                }
            }
            let Some((v, &gain)) = freed.iter().enumerate().max_by_key(|&(v, &f)| (f, std::cmp::Reverse(v))) else {
                break;
            };
            let gain = gain as usize;
            let after = if grow_a {
                ((self.a + gain).min(self.b - 1), self.a + self.b + gain - 1)
            } else {
                ((self.b + gain).min(self.a - 1), self.a + self.b + gain - 1)
            };
            if gain == 0 || after <= before {
                break;
            }
            // Add the freed vertices before refilling, or `v` could return.
            if grow_a {
                self.remove_y(v);
                for &x in self.g.neighbors_y(v) {
                    if !self.in_a[x as usize] && self.to_b[x as usize] == 0 {
                        self.add_x(x as usize);
                    }
                }
            } else {
                self.remove_x(v);
                for &y in self.g.neighbors_x(v) {
                    if !self.in_b[y as usize] && self.to_a[y as usize] == 0 {
                        self.add_y(y as usize);
                    }
                }
            }
            self.fill(xs, ys);
        }
    }
}
