//! Degree and density audits of a final graph.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::curves;
use crate::graph::BipartiteGraph;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DegreeAudit<T> {
    pub max_degree: usize,
    /// `n^{1/3 + 3ε³}`
    pub bound: T,
    /// `max_degree / n^{1/3}`
    pub cube_root_ratio: T,
    pub pass: bool,
}

pub fn audit_degrees<T: Real>(g: &BipartiteGraph, eps: T) -> DegreeAudit<T> {
    let max_degree = g.max_degree();
    let n = g.n();
    let bound = curves::degree_ceiling(n, eps);
    let md = T::from_count(max_degree as u64);
    let root = T::from_count(n as u64).cbrt();
    DegreeAudit {
        max_degree,
        bound,
        cube_root_ratio: if root > T::zero() { md / root } else { T::zero() },
        pass: md <= bound,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityAudit<T> {
    /// Largest `e(A, B) − bound(a, b)` found; `> 0` is a violation.
    pub best_score: T,
    pub best_a: Vec<usize>,
    pub best_b: Vec<usize>,
    pub best_edges: u64,
    pub best_bound: T,
    pub restarts: usize,
    pub violation_found: bool,
}

/// Searches for `A ⊆ X`, `B ⊆ Y`, both nonempty, with
/// `e(A, B) > 2ε^{-3} max{a + b, a b n^{−2/3 + 3ε³}}`.
///
/// Steepest-ascent single-vertex toggles from `restarts` starting points
/// (the first is the closed neighborhood of a maximum-degree vertex, the rest
/// random). A nonpositive score means no violation was found at this effort.
pub fn audit_density<T: Real>(g: &BipartiteGraph, eps: T, restarts: usize, seed: u64) -> DensityAudit<T> {
    let n = g.n();
    if n == 0 {
        return DensityAudit {
            best_score: T::neg_infinity(),
            best_a: Vec::new(),
            best_b: Vec::new(),
            best_edges: 0,
            best_bound: T::zero(),
            restarts: 0,
            violation_found: false,
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<Search<T>> = None;
    for r in 0..restarts.max(1) {
        let mut s = Search::new(g, eps);
        if r == 0 {
            s.seed_with_star();
        } else {
            let a = rng.random_range(1..=n);
            let b = rng.random_range(1..=n);
            let mut xs: Vec<usize> = (0..n).collect();
            let mut ys: Vec<usize> = (0..n).collect();
            xs.shuffle(&mut rng);
            ys.shuffle(&mut rng);
            xs[..a].iter().for_each(|&x| s.toggle_x(x));
            ys[..b].iter().for_each(|&y| s.toggle_y(y));
        }
        s.climb();
        if best.as_ref().is_none_or(|b| s.score() > b.score()) {
            best = Some(s);
        }
    }
    let s = best.expect("at least one restart");
    let score = s.score();
    DensityAudit {
        best_score: score,
        best_a: (0..n).filter(|&x| s.in_a[x]).collect(),
        best_b: (0..n).filter(|&y| s.in_b[y]).collect(),
        best_edges: s.edges,
        best_bound: s.bound(s.a, s.b),
        restarts: restarts.max(1),
        violation_found: score > T::zero(),
    }
}

struct Search<'g, T> {
    g: &'g BipartiteGraph,
    eps: T,
    in_a: Vec<bool>,
    in_b: Vec<bool>,
    /// `|N(x) ∩ B|` for every `x`.
    to_b: Vec<u64>,
    /// `|N(y) ∩ A|` for every `y`.
    to_a: Vec<u64>,
    a: usize,
    b: usize,
    edges: u64,
}

impl<'g, T: Real> Search<'g, T> {
    fn new(g: &'g BipartiteGraph, eps: T) -> Self {
        let n = g.n();
        Search {
            g,
            eps,
            in_a: vec![false; n],
            in_b: vec![false; n],
            to_b: vec![0; n],
            to_a: vec![0; n],
            a: 0,
            b: 0,
            edges: 0,
        }
    }

    fn bound(&self, a: usize, b: usize) -> T {
        curves::density_ceiling(self.g.n(), a, b, self.eps)
    }

    fn value(&self, edges: u64, a: usize, b: usize) -> T {
        if a == 0 || b == 0 {
            return T::neg_infinity();
        }
        T::from_count(edges) - self.bound(a, b)
    }

    fn score(&self) -> T {
        self.value(self.edges, self.a, self.b)
    }

    fn seed_with_star(&mut self) {
        let n = self.g.n();
        let x = (0..n).max_by_key(|&x| (self.g.degree_x(x), std::cmp::Reverse(x))).unwrap_or(0);
        self.toggle_x(x);
        let nbrs: Vec<usize> = self.g.neighbors_x(x).iter().map(|&y| y as usize).collect();
        if nbrs.is_empty() {
            self.toggle_y(0);
        }
        nbrs.into_iter().for_each(|y| self.toggle_y(y));
    }

    fn toggle_x(&mut self, x: usize) {
        let sign_in = !self.in_a[x];
        self.in_a[x] = sign_in;
        if sign_in {
            self.a += 1;
            self.edges += self.to_b[x];
        } else {
            self.a -= 1;
            self.edges -= self.to_b[x];
        }
        for &y in self.g.neighbors_x(x) {
            let c = &mut self.to_a[y as usize];
            if sign_in { *c += 1 } else { *c -= 1 }
        }
    }

    fn toggle_y(&mut self, y: usize) {
        let sign_in = !self.in_b[y];
        self.in_b[y] = sign_in;
        if sign_in {
            self.b += 1;
            self.edges += self.to_a[y];
        } else {
            self.b -= 1;
            self.edges -= self.to_a[y];
        }
        for &x in self.g.neighbors_y(y) {
            let c = &mut self.to_b[x as usize];
            if sign_in { *c += 1 } else { *c -= 1 }
        }
    }

    /// Applies the best improving toggle until none improves the score.
    fn climb(&mut self) {
        let n = self.g.n();
        let max_moves = 4 * n + 16;
        for _ in 0..max_moves {
            let current = self.score();
            let mut best: Option<(T, bool, usize)> = None;
            for v in 0..n {
                let (e, a) = if self.in_a[v] {
                    (self.edges - self.to_b[v], self.a - 1)
                } else {
                    (self.edges + self.to_b[v], self.a + 1)
                };
                let s = self.value(e, a, self.b);
                if s > current && best.is_none_or(|(bs, _, _)| s > bs) {
                    best = Some((s, true, v));
                }
                let (e, b) = if self.in_b[v] {
                    (self.edges - self.to_a[v], self.b - 1)
                } else {
                    (self.edges + self.to_a[v], self.b + 1)
                };
                let s = self.value(e, self.a, b);
                if s > current && best.is_none_or(|(bs, _, _)| s > bs) {
                    best = Some((s, false, v));
                }
            }
            match best {
                Some((_, true, v)) => self.toggle_x(v),
                Some((_, false, v)) => self.toggle_y(v),
                None => break,
            }
        }
    }
}
