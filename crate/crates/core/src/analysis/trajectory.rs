//! Instrumented runs: the process plus periodic records against the
//! predicted curves.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::curves;
use super::fmt_sig9;
use super::rectangles::{RectangleReport, RectangleTracker};
use crate::error::Result;
use crate::process::{mix_seed, ProcessState, Step, StopRule};

/// Stream index for the instrumentation rng (d₂ samples, rectangles).
const INSTRUMENT_STREAM: u64 = 1 << 63;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecordConfig {
    pub stop: StopRule,
    /// Steps between records; `None` means `⌈n^{2/3}⌉`.
    pub cadence: Option<u64>,
    pub d2_samples: usize,
    pub rects: usize,
    pub epsilon: f64,
}

impl Default for RecordConfig {
    fn default() -> Self {
        RecordConfig {
            stop: StopRule::Completion,
            cadence: None,
            d2_samples: 64,
            rects: 0,
            epsilon: super::DEFAULT_EPSILON,
        }
    }
}

/// `⌈n^{2/3}⌉`, at least 1.
pub fn default_cadence(n: usize) -> u64 {
    ((n as f64).powf(2.0 / 3.0).ceil() as u64).max(1)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Record {
    pub step: u64,
    pub t: f64,
    pub open: u64,
    pub open_pred: f64,
    /// Mean `d₂` over the sampled open pairs; NaN when none are open.
    pub d2_mean: f64,
    pub d2_pred: f64,
    pub max_degree: usize,
    /// Minimum of `Q_I / (α² q)` over rectangles; NaN when none are tracked.
    pub qi_min_ratio: f64,
    pub ai_max: u64,
    pub envelope: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub n: usize,
    pub records: Vec<Record>,
}

impl Trajectory {
    pub const CSV_HEADER: &'static str =
        "step,t,open,open_pred,d2_mean,d2_pred,maxdeg,qI_min_ratio,aI_max,f_env";

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.records.len() + 1));
        out.push_str(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.step,
                fmt_sig9(r.t),
                r.open,
                fmt_sig9(r.open_pred),
                fmt_sig9(r.d2_mean),
                fmt_sig9(r.d2_pred),
                r.max_degree,
                fmt_sig9(r.qi_min_ratio),
                r.ai_max,
                fmt_sig9(r.envelope),
            )
            .expect("writing to a String");
        }
        out
    }

    /// `max |open / open_pred − 1|` over records with `t ≤ t_cap`.
    pub fn max_open_deviation(&self, t_cap: f64) -> f64 {
        self.records
            .iter()
            .filter(|r| r.t <= t_cap)
            .map(|r| (r.open as f64 / r.open_pred - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Result of an instrumented run.
#[derive(Clone, Debug)]
pub struct Simulation {
    pub state: ProcessState,
    pub trajectory: Trajectory,
    pub rectangles: RectangleReport,
}

/// Runs the process from `seed`, recording at step 0, every `cadence` steps
/// and at the final step.
pub fn simulate(n: usize, seed: u64, cfg: &RecordConfig) -> Result<Simulation> {
    let mut state = ProcessState::new(n, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, INSTRUMENT_STREAM));
    let mut tracker = RectangleTracker::sample(n, cfg.rects, cfg.epsilon, &mut rng);
    let cadence = cfg.cadence.unwrap_or_else(|| default_cadence(n)).max(1);
    let mut records = Vec::new();
    let mut max_degree = 0;
    let mut record = |state: &ProcessState, tracker: &mut RectangleTracker, rng: &mut ChaCha8Rng, max_degree| {
        let t: f64 = curves::scaled_time(state.steps(), n);
        let pred = curves::predicted_curves(n, t, cfg.epsilon);
        let (qi_min_ratio, ai_max) = tracker.observe(t);
        records.push(Record {
            step: state.steps(),
            t,
            open: state.open_count() as u64,
            open_pred: pred.open,
            d2_mean: sample_d2(state, cfg.d2_samples, rng),
            d2_pred: pred.d2,
            max_degree,
            qi_min_ratio,
            ai_max,
            envelope: pred.envelope,
        });
    };

    record(&state, &mut tracker, &mut rng, max_degree);
    let mut last_recorded = 0;
    loop {
        if let StopRule::MaxSteps(b) = cfg.stop {
            if state.steps() >= b {
                break;
            }
        }
        match state.step() {
            Step::Terminated => break,
            Step::Chosen(p) => {
                tracker.on_step(p, state.last_closed());
                let g = state.graph();
                max_degree = max_degree.max(g.degree_x(p.x)).max(g.degree_y(p.y));
                if state.steps() % cadence == 0 {
                    record(&state, &mut tracker, &mut rng, max_degree);
                    last_recorded = state.steps();
                }
            }
        }
    }
    if last_recorded != state.steps() {
        record(&state, &mut tracker, &mut rng, max_degree);
    }

    Ok(Simulation {
        trajectory: Trajectory { n, records },
        rectangles: tracker.report(),
        state,
    })
}

/// Mean exact `d₂` over up to `k` distinct uniformly sampled open pairs.
fn sample_d2(state: &ProcessState, k: usize, rng: &mut ChaCha8Rng) -> f64 {
    let open = state.open_count();
    let k = k.min(open);
    if k == 0 {
        return f64::NAN;
    }
    let pairs = state.pairs();
    let total: u64 = rand::seq::index::sample(rng, open, k)
        .into_iter()
        .map(|i| state.d2_exact(pairs.open_at(i)).expect("sampled pair is open"))
        .sum();
    total as f64 / k as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_record_matches_time_zero_prediction() {
        let sim = simulate(20, 4, &RecordConfig::default()).unwrap();
        let r0 = sim.trajectory.records[0];
        assert_eq!(r0.step, 0);
        assert_eq!(r0.t, 0.0);
        assert_eq!(r0.open, 400);
        assert_eq!(r0.open_pred, 400.0);
        assert_eq!(r0.d2_mean, 0.0);
        assert_eq!(r0.d2_pred, 0.0);
    }

    #[test]
    fn records_follow_the_cadence_and_end_at_termination() {
        let n = 30;
        let sim = simulate(n, 11, &RecordConfig::default()).unwrap();
        let recs = &sim.trajectory.records;
        let cadence = default_cadence(n);
        assert_eq!(cadence, 10);
        assert!(sim.state.is_terminated());
        assert_eq!(recs.last().unwrap().step, sim.state.steps());
        assert_eq!(recs.last().unwrap().open, 0);
        assert!(recs.last().unwrap().d2_mean.is_nan());
        for w in recs.windows(2) {
            assert!(w[0].t < w[1].t);
            assert!(w[0].open >= w[1].open);
            assert!(w[0].max_degree <= w[1].max_degree);
        }
        for r in &recs[..recs.len() - 1] {
            assert_eq!(r.step % cadence, 0);
        }
        assert_eq!(recs.last().unwrap().max_degree, sim.state.graph().max_degree());
    }

    #[test]
    fn max_steps_stops_early() {
        let cfg = RecordConfig {
            stop: StopRule::MaxSteps(25),
            cadence: Some(7),
            ..RecordConfig::default()
        };
        let sim = simulate(40, 2, &cfg).unwrap();
        let steps: Vec<u64> = sim.trajectory.records.iter().map(|r| r.step).collect();
        assert_eq!(steps, vec![0, 7, 14, 21, 25]);
    }

    #[test]
    fn sampled_d2_equals_the_full_mean_when_all_pairs_are_sampled() {
        let n = 12;
        let mut state = ProcessState::new(n, 5).unwrap();
        state.run(StopRule::MaxSteps(15));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let got = sample_d2(&state, usize::MAX, &mut rng);
        let all: Vec<u64> = state.pairs().open_pairs().map(|p| state.d2_exact(p).unwrap()).collect();
        let want = all.iter().sum::<u64>() as f64 / all.len() as f64;
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn csv_layout() {
        let cfg = RecordConfig { rects: 2, ..RecordConfig::default() };
        let sim = simulate(8, 1, &cfg).unwrap();
        let csv = sim.trajectory.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), Trajectory::CSV_HEADER);
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first.len(), 10);
        assert_eq!(&first[..5], &["0", "0", "64", "64", "0"]);
        assert_eq!(first[7], "1");
        assert_eq!(csv.lines().count(), sim.trajectory.records.len() + 1);
    }

    #[test]
    fn deterministic_given_seed() {
        let cfg = RecordConfig { rects: 3, ..RecordConfig::default() };
        let a = simulate(25, 9, &cfg).unwrap();
        let b = simulate(25, 9, &cfg).unwrap();
        assert_eq!(a.trajectory.to_csv(), b.trajectory.to_csv());
        assert_eq!(format!("{:?}", a.rectangles), format!("{:?}", b.rectangles));
        assert_eq!(a.state.history(), b.state.history());
        // Instrumentation draws from its own stream: the run is unchanged by it.
        let mut plain = ProcessState::new(25, 9).unwrap();
        plain.run(StopRule::Completion);
        assert_eq!(plain.history(), a.state.history());
    }

    #[test]
    fn open_deviation_uses_the_time_cap() {
        let sim = simulate(16, 0, &RecordConfig::default()).unwrap();
        assert_eq!(sim.trajectory.max_open_deviation(0.0), 0.0);
        assert!(sim.trajectory.max_open_deviation(f64::INFINITY) >= sim.trajectory.max_open_deviation(1.0));
    }
}
