//! Tracked rectangles `I = I_X × I_Y` of side `α`.
//!
//! Each rectangle keeps a live count `Q_I` of open pairs inside it and the
//! accumulator `A_I` of one-step drops larger than `n^{2/3 − 12ε³}`.

use rand::Rng;
use serde::Serialize;

use super::curves::{self, RectangleSide};
use crate::graph::{BipartiteGraph, Pair};
use crate::process::{PairState, ProcessState};

#[derive(Clone, Debug)]
pub struct TrackedRectangle {
    xs: Vec<usize>,
    ys: Vec<usize>,
    member_x: Vec<bool>,
    member_y: Vec<bool>,
    q: u64,
    a: u64,
    received_edge: bool,
    min_ratio: f64,
    max_tilde_deviation: f64,
}

impl TrackedRectangle {
    /// A rectangle over the given sides, with every pair open.
    pub fn new(n: usize, mut xs: Vec<usize>, mut ys: Vec<usize>) -> Self {
        xs.sort_unstable();
        ys.sort_unstable();
        let mut member_x = vec![false; n];
        let mut member_y = vec![false; n];
        xs.iter().for_each(|&x| member_x[x] = true);
        ys.iter().for_each(|&y| member_y[y] = true);
        let q = (xs.len() * ys.len()) as u64;
        TrackedRectangle {
            xs,
            ys,
            member_x,
            member_y,
            q,
            a: 0,
            received_edge: false,
            min_ratio: f64::INFINITY,
            max_tilde_deviation: 0.0,
        }
    }

    pub fn xs(&self) -> &[usize] {
        &self.xs
    }

    pub fn ys(&self) -> &[usize] {
        &self.ys
    }

    #[inline]
    pub fn contains(&self, p: Pair) -> bool {
        self.member_x[p.x] && self.member_y[p.y]
    }

    /// `Q_I`: open pairs inside the rectangle.
    pub fn open_inside(&self) -> u64 {
        self.q
    }

    /// `A_I`: accumulated large one-step drops.
    pub fn large_steps(&self) -> u64 {
        self.a
    }

    pub fn received_edge(&self) -> bool {
        self.received_edge
    }

    /// Recounts `Q_I` from the pair states.
    pub fn recount(&self, state: &ProcessState) -> u64 {
        let pairs = state.pairs();
        self.xs
            .iter()
            .flat_map(|&x| self.ys.iter().map(move |&y| Pair::new(x, y)))
            .filter(|&p| pairs.state(p) == PairState::Open)
            .count() as u64
    }

    fn apply(&mut self, chosen: Pair, closed: &[Pair], threshold: f64) {
        let hit = self.contains(chosen);
        self.received_edge |= hit;
        let delta = u64::from(hit) + closed.iter().filter(|&&p| self.contains(p)).count() as u64;
        self.q -= delta;
        if delta as f64 > threshold {
            self.a += delta;
        }
    }

    /// Counts of the vertices with many neighbors inside the rectangle.
    pub fn heavy_vertices(&self, g: &BipartiteGraph, eps: f64) -> HeavyVertices {
        let n = g.n();
        let nf = n as f64;
        let e3 = eps.powi(3);
        let cutoff = nf.powf(1.0 / 3.0 - 16.0 * e3);
        // Level 1 on the Y side: vertices with many neighbors in I_X.
        let heavy_y: Vec<bool> = (0..n)
            .map(|y| {
                let k = g.neighbors_y(y).iter().filter(|&&x| self.member_x[x as usize]).count();
                k as f64 >= cutoff
            })
            .collect();
        let heavy_x: Vec<bool> = (0..n)
            .map(|x| {
                let k = g.neighbors_x(x).iter().filter(|&&y| self.member_y[y as usize]).count();
                k as f64 >= cutoff
            })
            .collect();
        let second_x = (0..n)
            .filter(|&x| {
                let k = g.neighbors_x(x).iter().filter(|&&y| heavy_y[y as usize]).count();
                k as f64 >= cutoff
            })
            .count();
        let second_y = (0..n)
            .filter(|&y| {
                let k = g.neighbors_y(y).iter().filter(|&&x| heavy_x[x as usize]).count();
                k as f64 >= cutoff
            })
            .count();
        HeavyVertices {
            cutoff,
            first_level: (
                heavy_y.iter().filter(|&&h| h).count(),
                heavy_x.iter().filter(|&&h| h).count(),
            ),
            first_level_bound: nf.powf(1.0 / 3.0 + 17.0 * e3),
            second_level: (second_x, second_y),
            second_level_bound: nf.powf(34.0 * e3),
        }
    }
}

/// Optional diagnostic: vertices with at least `n^{1/3 − 16ε³}` neighbors in
/// `I_X` (resp. `I_Y`), and vertices with that many neighbors in those sets.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HeavyVertices {
    pub cutoff: f64,
    /// (heavy for `I_X`, heavy for `I_Y`)
    pub first_level: (usize, usize),
    pub first_level_bound: f64,
    pub second_level: (usize, usize),
    pub second_level_bound: f64,
}

/// Per-rectangle outcome of a run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RectangleOutcome {
    pub received_edge: bool,
    pub final_open: u64,
    pub large_steps: u64,
    /// Minimum over observations of `Q_I / (α² q(t))`.
    pub min_ratio: f64,
    /// Maximum over observations of `|Q_I + A_I − α² q(t)| / f(t)`.
    pub max_tilde_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RectangleReport {
    pub alpha: usize,
    pub alpha_unclamped: usize,
    pub clamped: bool,
    pub threshold: f64,
    pub large_step_budget: f64,
    pub rectangles: Vec<RectangleOutcome>,
    /// Fraction of rectangles that received a chosen edge (1 when none are tracked).
    pub coverage: f64,
    pub max_large_steps: u64,
    pub large_steps_within_budget: bool,
}

/// All tracked rectangles of one run.
#[derive(Clone, Debug)]
pub struct RectangleTracker {
    n: usize,
    eps: f64,
    side: RectangleSide,
    threshold: f64,
    rects: Vec<TrackedRectangle>,
}

impl RectangleTracker {
    /// Samples `k` rectangles of side `α` uniformly from `rng`.
    pub fn sample<R: Rng + ?Sized>(n: usize, k: usize, eps: f64, rng: &mut R) -> Self {
        let side = curves::rectangle_side(n, eps);
        let rects = (0..k)
            .map(|_| {
                let xs = rand::seq::index::sample(rng, n, side.alpha).into_vec();
                let ys = rand::seq::index::sample(rng, n, side.alpha).into_vec();
                TrackedRectangle::new(n, xs, ys)
            })
            .collect();
        Self::with_rectangles(n, eps, rects)
    }

    pub fn with_rectangles(n: usize, eps: f64, rects: Vec<TrackedRectangle>) -> Self {
        RectangleTracker {
            n,
            eps,
            side: curves::rectangle_side(n, eps),
            threshold: curves::large_step_threshold(n, eps),
            rects,
        }
    }

    pub fn side(&self) -> RectangleSide {
        self.side
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn rectangles(&self) -> &[TrackedRectangle] {
        &self.rects
    }

    /// Applies one step: the chosen pair and the pairs it closed.
    pub fn on_step(&mut self, chosen: Pair, closed: &[Pair]) {
        let threshold = self.threshold;
        for r in &mut self.rects {
            r.apply(chosen, closed, threshold);
        }
    }

    /// Records the ratios at scaled time `t`; returns
    /// `(min Q_I / (α² q), max A_I)` over rectangles, NaN and 0 when none.
    pub fn observe(&mut self, t: f64) -> (f64, u64) {
        let pred = curves::predicted_curves(self.n, t, self.eps);
        let mut min_ratio = f64::NAN;
        let mut max_a = 0;
        for r in &mut self.rects {
            let area = (r.xs.len() * r.ys.len()) as f64;
            let ratio = r.q as f64 / (area * pred.q);
            let dev = ((r.q + r.a) as f64 - area * pred.q).abs() / pred.envelope;
            r.min_ratio = r.min_ratio.min(ratio);
            r.max_tilde_deviation = r.max_tilde_deviation.max(dev);
            min_ratio = if min_ratio.is_nan() { ratio } else { min_ratio.min(ratio) };
            max_a = max_a.max(r.a);
        }
        (min_ratio, max_a)
    }

    pub fn report(&self) -> RectangleReport {
        let budget = curves::large_step_budget(self.n, self.eps);
        let rectangles: Vec<RectangleOutcome> = self
            .rects
            .iter()
            .map(|r| RectangleOutcome {
                received_edge: r.received_edge,
                final_open: r.q,
                large_steps: r.a,
                min_ratio: r.min_ratio,
                max_tilde_deviation: r.max_tilde_deviation,
            })
            .collect();
        let covered = rectangles.iter().filter(|r| r.received_edge).count();
        let coverage = if rectangles.is_empty() {
            1.0
        } else {
            covered as f64 / rectangles.len() as f64
        };
        let max_large_steps = rectangles.iter().map(|r| r.large_steps).max().unwrap_or(0);
        RectangleReport {
            alpha: self.side.alpha,
            alpha_unclamped: self.side.unclamped,
            clamped: self.side.clamped,
            threshold: self.threshold,
            large_step_budget: budget,
            rectangles,
            coverage,
            max_large_steps,
            large_steps_within_budget: max_large_steps as f64 <= budget,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::Step;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn drive(n: usize, seed: u64, k: usize, eps: f64) -> (ProcessState, RectangleTracker) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xABCD);
        let mut tracker = RectangleTracker::sample(n, k, eps, &mut rng);
        let mut state = ProcessState::new(n, seed).unwrap();
        while let Step::Chosen(p) = state.step() {
            tracker.on_step(p, state.last_closed());
            for r in tracker.rectangles() {
                assert_eq!(r.open_inside(), r.recount(&state));
            }
        }
        (state, tracker)
    }

    #[test]
    fn starts_full() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let tracker = RectangleTracker::sample(50, 3, 0.5, &mut rng);
        let alpha = tracker.side().alpha;
        for r in tracker.rectangles() {
            assert_eq!(r.xs().len(), alpha);
            assert_eq!(r.ys().len(), alpha);
            assert_eq!(r.open_inside(), (alpha * alpha) as u64);
            assert!(r.xs().windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn live_count_matches_recount() {
        for seed in 0..20 {
            for n in [3, 7, 12, 16] {
                drive(n, seed, 4, 0.5);
            }
        }
    }

    #[test]
    fn full_rectangle_at_n2_receives_an_edge() {
        for seed in 0..50 {
            let (state, tracker) = drive(2, seed, 1, 0.1);
            assert_eq!(tracker.side().alpha, 2);
            assert_eq!(state.steps(), 3);
            let rep = tracker.report();
            assert!(rep.rectangles[0].received_edge);
            assert_eq!(rep.coverage, 1.0);
        }
    }

    #[test]
    fn accumulator_is_bounded_by_area() {
        for seed in 0..10 {
            let (_, tracker) = drive(40, seed, 5, 0.3);
            let area = (tracker.side().alpha * tracker.side().alpha) as u64;
            for r in tracker.rectangles() {
                assert!(r.large_steps() <= area);
                assert_eq!(r.open_inside(), 0);
            }
        }
    }

    #[test]
    fn threshold_gates_the_accumulator() {
        // A threshold below 1 makes every nonzero drop count.
        let n = 6;
        let rect = TrackedRectangle::new(n, (0..n).collect(), (0..n).collect());
        let mut tracker = RectangleTracker::with_rectangles(n, 0.5, vec![rect]);
        tracker.threshold = 0.5;
        let mut state = ProcessState::new(n, 3).unwrap();
        let mut total = 0;
        while let Step::Chosen(p) = state.step() {
            total += 1 + state.last_closed().len() as u64;
            tracker.on_step(p, state.last_closed());
        }
        assert_eq!(tracker.rectangles()[0].large_steps(), total);
        assert_eq!(total, (n * n) as u64);
    }

    #[test]
    fn empty_tracking_is_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut tracker = RectangleTracker::sample(10, 0, 0.1, &mut rng);
        let (ratio, a) = tracker.observe(0.5);
        assert!(ratio.is_nan());
        assert_eq!(a, 0);
        assert_eq!(tracker.report().coverage, 1.0);
    }

    #[test]
    fn observe_at_time_zero_gives_unit_ratio() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut tracker = RectangleTracker::sample(30, 2, 0.3, &mut rng);
        let (ratio, a) = tracker.observe(0.0);
        assert_eq!(ratio, 1.0);
        assert_eq!(a, 0);
    }

    #[test]
    fn heavy_vertex_counts_on_a_complete_graph() {
        let n = 8;
        let g = BipartiteGraph::complete(n);
        let rect = TrackedRectangle::new(n, vec![0, 1, 2], vec![3, 4, 5]);
        let h = rect.heavy_vertices(&g, 0.1);
        // Every vertex sees 3 rectangle vertices, above 8^{1/3 − 0.016} ≈ 1.93.
        assert_eq!(h.first_level, (n, n));
        assert_eq!(h.second_level, (n, n));
    }
}
