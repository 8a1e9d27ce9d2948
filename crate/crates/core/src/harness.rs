//! Reproducible experiment driver.
//!
//! Replication `r` of a run seeded with `s` uses seed [`replication_seed`]`(s, r)`.
//! Replications run on a bounded rayon pool and are merged by index, so every
//! artifact is byte-identical for any worker count. Floats in artifacts carry
//! 9 significant digits.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::audit::{audit_degrees, audit_density, DegreeAudit, DensityAudit};
use crate::analysis::certificate::{self, BetaFlag, Certificate, CertifyOptions};
use crate::analysis::fit::{fit_exponent, FitResult};
use crate::analysis::rectangles::RectangleReport;
use crate::analysis::trajectory::{simulate, RecordConfig, Trajectory};
use crate::analysis::{to_stable_json, DEFAULT_EPSILON};
use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;
use crate::process::{mix_seed, step_budget, ChoiceStream, StopRule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StopMode {
    Completion,
    /// Stop at `⌊ε′ n^{4/3} (ln n)^{1/3}⌋` steps.
    Imax,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    pub seed: u64,
    pub reps: usize,
    pub stop: StopMode,
    /// `ε′` of the step budget.
    pub imax_eps: f64,
    /// Analysis exponent `ε`.
    pub eps: f64,
    pub rects: usize,
    pub d2_samples: usize,
    /// Steps between trajectory records; `None` means `⌈n^{2/3}⌉`.
    pub cadence: Option<u64>,
    pub out: PathBuf,
    pub exact_limit: usize,
    /// Heuristic restarts when `n > exact_limit`.
    pub restarts: usize,
    /// Worker threads; `None` uses rayon's default.
    pub threads: Option<usize>,
    /// Largest `t` entering `max |Q / openPred − 1|`.
    pub t_cap: f64,
    pub write_trajectories: bool,
    pub write_graphs: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 64,
            seed: 0,
            reps: 1,
            stop: StopMode::Completion,
            imax_eps: 0.3,
            eps: DEFAULT_EPSILON,
            rects: 10,
            d2_samples: 64,
            cadence: None,
            out: PathBuf::from("out"),
            exact_limit: crate::analysis::independence::DEFAULT_EXACT_LIMIT,
            restarts: 200,
            threads: None,
            t_cap: 1.5,
            write_trajectories: true,
            write_graphs: true,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.reps == 0 {
            return bad("replications must be at least 1".into());
        }
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if !(self.eps > 0.0 && self.eps <= 0.5) {
            return bad(format!("eps must lie in (0, 0.5], got {}", self.eps));
        }
        if !(self.imax_eps > 0.0 && self.imax_eps.is_finite()) {
            return bad(format!("imax-eps must be positive, got {}", self.imax_eps));
        }
        if self.cadence == Some(0) {
            return bad("cadence must be at least 1".into());
        }
        if self.threads == Some(0) {
            return bad("threads must be at least 1".into());
        }
        if self.t_cap.is_nan() {
            return bad("t-cap must be a number".into());
        }
        Ok(())
    }

    pub fn stop_rule(&self) -> StopRule {
        match self.stop {
            StopMode::Completion => StopRule::Completion,
            StopMode::Imax => StopRule::MaxSteps(step_budget(self.n, self.imax_eps)),
        }
    }

    fn record_config(&self) -> RecordConfig {
        RecordConfig {
            stop: self.stop_rule(),
            cadence: self.cadence,
            d2_samples: self.d2_samples,
            rects: self.rects,
            epsilon: self.eps,
        }
    }

    fn certify_options(&self) -> CertifyOptions {
        CertifyOptions {
            exact_limit: self.exact_limit,
            restarts: self.restarts,
            epsilon: self.eps,
        }
    }
}

/// Seed of replication `r`.
pub fn replication_seed(seed: u64, r: usize) -> u64 {
    mix_seed(seed, r as u64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReplicationSummary {
    pub index: usize,
    pub seed: u64,
    pub steps: u64,
    pub terminated: bool,
    pub m: u64,
    pub max_degree: usize,
    pub beta: usize,
    pub beta_flag: BetaFlag,
    pub rect_coverage: f64,
    pub max_open_deviation: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Aggregate {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl Aggregate {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        let (mut sum, mut count) = (0.0, 0usize);
        let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            sum += v;
            count += 1;
            min = min.min(v);
            max = max.max(v);
        }
        if count == 0 {
            return Aggregate { mean: f64::NAN, min: f64::NAN, max: f64::NAN };
        }
        Aggregate {
            mean: sum / count as f64,
            min,
            max,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Aggregates {
    pub m: Aggregate,
    pub max_degree: Aggregate,
    pub beta: Aggregate,
    pub rect_coverage: Aggregate,
    pub max_open_deviation: Aggregate,
}

impl Aggregates {
    pub fn of(reps: &[ReplicationSummary]) -> Self {
        Aggregates {
            m: Aggregate::of(reps.iter().map(|r| r.m as f64)),
            max_degree: Aggregate::of(reps.iter().map(|r| r.max_degree as f64)),
            beta: Aggregate::of(reps.iter().map(|r| r.beta as f64)),
            rect_coverage: Aggregate::of(reps.iter().map(|r| r.rect_coverage)),
            max_open_deviation: Aggregate::of(reps.iter().map(|r| r.max_open_deviation)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub tool_version: String,
    pub rng_algo: String,
    pub n: usize,
    pub seed: u64,
    pub reps: usize,
    pub stop: StopMode,
    pub step_budget: Option<u64>,
    pub epsilon: f64,
    pub imax_eps: f64,
    pub rects: usize,
    pub d2_samples: usize,
    pub cadence: u64,
    pub t_cap: f64,
    pub exact_limit: usize,
    pub restarts: usize,
    pub replications: Vec<ReplicationSummary>,
    pub aggregates: Aggregates,
}

impl RunSummary {
    pub fn to_json(&self) -> Result<String> {
        Ok(to_stable_json(self)?)
    }
}

/// Everything one replication produced.
#[derive(Clone, Debug)]
pub struct Replication {
    pub summary: ReplicationSummary,
    pub trajectory: Trajectory,
    pub rectangles: RectangleReport,
    pub graph: BipartiteGraph,
}

pub fn run_replication(cfg: &RunConfig, index: usize) -> Result<Replication> {
    let seed = replication_seed(cfg.seed, index);
    let sim = simulate(cfg.n, seed, &cfg.record_config())?;
    let graph = sim.state.graph();
    let terminated = sim.state.is_terminated();
    if !graph.is_k22_free() {
        return Err(Error::NotK22Free);
    }
    let (beta, beta_flag) = certificate::independence_number(graph, seed, &cfg.certify_options())?;
    let summary = ReplicationSummary {
        index,
        seed,
        steps: sim.state.steps(),
        terminated,
        m: graph.edge_count(),
        max_degree: graph.max_degree(),
        beta,
        beta_flag,
        rect_coverage: sim.rectangles.coverage,
        max_open_deviation: sim.trajectory.max_open_deviation(cfg.t_cap),
    };
    Ok(Replication {
        summary,
        trajectory: sim.trajectory,
        rectangles: sim.rectangles,
        graph: sim.state.into_graph(),
    })
}

fn worker_pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))
}

/// All replications of `cfg`, in index order.
pub fn run_replications(cfg: &RunConfig) -> Result<Vec<Replication>> {
    cfg.validate()?;
    worker_pool(cfg.threads)?.install(|| {
        (0..cfg.reps)
            .into_par_iter()
            .map(|r| run_replication(cfg, r))
            .collect()
    })
}

pub fn summarize(cfg: &RunConfig, reps: &[Replication]) -> RunSummary {
    let replications: Vec<ReplicationSummary> = reps.iter().map(|r| r.summary.clone()).collect();
    RunSummary {
        tool_version: crate::TOOL_VERSION.to_string(),
        rng_algo: ChoiceStream::ALGORITHM.to_string(),
        n: cfg.n,
        seed: cfg.seed,
        reps: cfg.reps,
        stop: cfg.stop,
        step_budget: match cfg.stop_rule() {
            StopRule::MaxSteps(b) => Some(b),
            StopRule::Completion => None,
        },
        epsilon: cfg.eps,
        imax_eps: cfg.imax_eps,
        rects: cfg.rects,
        d2_samples: cfg.d2_samples,
        cadence: cfg.cadence.unwrap_or_else(|| crate::analysis::trajectory::default_cadence(cfg.n)),
        t_cap: cfg.t_cap,
        exact_limit: cfg.exact_limit,
        restarts: cfg.restarts,
        aggregates: Aggregates::of(&replications),
        replications,
    }
}

pub const SUMMARY_FILE: &str = "summary.json";
pub const PLOT_SCRIPT_FILE: &str = "plot_trajectories.py";

pub fn trajectory_file(index: usize) -> String {
    format!("rep_{index:04}_trajectory.csv")
}

pub fn graph_file(index: usize) -> String {
    format!("rep_{index:04}_graph.txt")
}

pub fn rectangles_file(index: usize) -> String {
    format!("rep_{index:04}_rectangles.json")
}

/// Runs every replication and writes the artifacts into `cfg.out`.
pub fn cmd_run(cfg: &RunConfig) -> Result<RunSummary> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.out)?;
    let reps = run_replications(cfg)?;
    for rep in &reps {
        let i = rep.summary.index;
        if cfg.write_trajectories {
            fs::write(cfg.out.join(trajectory_file(i)), rep.trajectory.to_csv())?;
            let rects = to_stable_json(&rep.rectangles)?;
            fs::write(cfg.out.join(rectangles_file(i)), rects)?;
        }
        if cfg.write_graphs {
            let comment = format!("seed={} algo={} n={}", rep.summary.seed, ChoiceStream::ALGORITHM, cfg.n);
            let mut buf = Vec::new();
            rep.graph.write_text(&mut buf, Some(&comment))?;
            fs::write(cfg.out.join(graph_file(i)), buf)?;
        }
    }
    if cfg.write_trajectories {
        fs::write(cfg.out.join(PLOT_SCRIPT_FILE), PLOT_SCRIPT)?;
    }
    let summary = summarize(cfg, &reps);
    fs::write(cfg.out.join(SUMMARY_FILE), summary.to_json()?)?;
    Ok(summary)
}

const PLOT_SCRIPT: &str = r#"#!/usr/bin/env python3
"""Plot measured against predicted trajectories for every replication here."""
import csv
import glob
import sys

import matplotlib.pyplot as plt

fig, (ax_open, ax_d2) = plt.subplots(1, 2, figsize=(11, 4))
for path in sorted(glob.glob("rep_*_trajectory.csv")):
    with open(path) as f:
        rows = list(csv.DictReader(f))
    t = [float(r["t"]) for r in rows]
    ax_open.plot(t, [float(r["open"]) / float(r["open_pred"]) for r in rows], lw=0.8)
    d2 = [(float(r["t"]), float(r["d2_mean"]) / float(r["d2_pred"])) for r in rows
          if float(r["d2_pred"]) > 0 and r["d2_mean"] != "nan"]
    ax_d2.plot([p[0] for p in d2], [p[1] for p in d2], lw=0.8)
ax_open.set(xlabel="t", ylabel="open / open_pred")
ax_d2.set(xlabel="t", ylabel="d2_mean / d2_pred")
fig.tight_layout()
fig.savefig(sys.argv[1] if len(sys.argv) > 1 else "trajectories.png", dpi=150)
"#;

/// Where sweep points come from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum SweepSource {
    Simulate,
    /// Both series forced to `n^exponent`; exercises the fitting path.
    Synthetic { exponent: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub n: usize,
    pub seed: u64,
    pub m: f64,
    pub beta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub tool_version: String,
    pub n_list: Vec<usize>,
    pub reps: usize,
    pub source: SweepSource,
    /// β comes from the heuristic, so its fit describes a lower bound.
    pub beta_is_lower_bound: bool,
    pub points: Vec<SweepPoint>,
    pub edge_fit: FitResult<f64>,
    pub beta_fit: FitResult<f64>,
    /// Per-n summaries of the simulated runs.
    pub runs: Vec<RunSummary>,
}

impl SweepReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(to_stable_json(self)?)
    }
}

pub const SWEEP_FILE: &str = "sweep.json";

/// Runs `template` at every `n` (into `out/n_<n>/`), fits `M` and the
/// heuristic `β` against `n`, and writes `out/sweep.json`.
pub fn cmd_sweep(n_list: &[usize], template: &RunConfig, source: SweepSource) -> Result<SweepReport> {
    if n_list.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "a sweep needs at least 2 values of n, got {}",
            n_list.len()
        )));
    }
    template.validate()?;
    let mut points = Vec::new();
    let mut runs = Vec::new();
    for &n in n_list {
        let cfg = RunConfig {
            n,
            out: template.out.join(format!("n_{n}")),
            exact_limit: 0,
            ..template.clone()
        };
        match source {
            SweepSource::Synthetic { exponent } => {
                cfg.validate()?;
                let v = (n as f64).powf(exponent);
                points.extend((0..cfg.reps).map(|r| SweepPoint {
                    n,
                    seed: replication_seed(cfg.seed, r),
                    m: v,
                    beta: v,
                }));
            }
            SweepSource::Simulate => {
                let summary = cmd_run(&cfg)?;
                points.extend(summary.replications.iter().map(|r| SweepPoint {
                    n,
                    seed: r.seed,
                    m: r.m as f64,
                    beta: r.beta as f64,
                }));
                runs.push(summary);
            }
        }
    }
    let edge_fit = fit_exponent(&points.iter().map(|p| (p.n as f64, p.m)).collect::<Vec<_>>())?;
    let beta_fit = fit_exponent(&points.iter().map(|p| (p.n as f64, p.beta)).collect::<Vec<_>>())?;
    let report = SweepReport {
        tool_version: crate::TOOL_VERSION.to_string(),
        n_list: n_list.to_vec(),
        reps: template.reps,
        source,
        beta_is_lower_bound: true,
        points,
        edge_fit,
        beta_fit,
        runs,
    };
    fs::create_dir_all(&template.out)?;
    fs::write(template.out.join(SWEEP_FILE), report.to_json()?)?;
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditReport {
    pub n: usize,
    pub m: u64,
    pub k22_free: bool,
    pub degree: DegreeAudit<f64>,
    pub density: DensityAudit<f64>,
    /// `k22_free` and the degree audit passed.
    pub pass: bool,
}

/// Audits a stored graph: `K_{2,2}`-freeness, degrees and density.
pub fn cmd_audit(path: &Path, eps: f64, restarts: usize, seed: u64) -> Result<AuditReport> {
    let g = BipartiteGraph::read_file(path)?;
    Ok(audit_graph(&g, eps, restarts, seed))
}

pub fn audit_graph(g: &BipartiteGraph, eps: f64, restarts: usize, seed: u64) -> AuditReport {
    let k22_free = g.is_k22_free();
    let degree = audit_degrees(g, eps);
    let density = audit_density(g, eps, restarts, seed);
    AuditReport {
        n: g.n(),
        m: g.edge_count(),
        k22_free,
        pass: k22_free && degree.pass,
        degree,
        density,
    }
}

pub fn cmd_certify(n: usize, seed: u64, opts: &CertifyOptions) -> Result<Certificate> {
    certificate::certify(n, seed, opts)
}
