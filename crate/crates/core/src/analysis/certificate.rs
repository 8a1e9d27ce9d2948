//! Ramsey lower-bound certificates.
//!
//! A `K_{2,2}`-free graph on `K_{n,n}` with independence number `β` shows
//! `b(2, β + 1) > n`. The claim is only written when `β` is exact.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::independence::{bip_independence_exact, bip_independence_heuristic};
use super::round_sig;
use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Pair};
use crate::process::{ProcessState, StopRule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BetaFlag {
    Exact,
    /// A lower bound from the heuristic search.
    Heuristic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub n: usize,
    pub seed: u64,
    pub rng_algo: String,
    pub m: u64,
    pub edges: Vec<[usize; 2]>,
    pub k22_free: bool,
    pub beta: usize,
    pub beta_flag: BetaFlag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claim: Option<String>,
    pub epsilon: f64,
    pub tool_version: String,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertifyOptions {
    pub exact_limit: usize,
    /// Restarts for the heuristic when `n > exact_limit`.
    pub restarts: usize,
    /// Recorded in the certificate; does not affect the result.
    pub epsilon: f64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            exact_limit: super::independence::DEFAULT_EXACT_LIMIT,
            restarts: 200,
            epsilon: super::DEFAULT_EPSILON,
        }
    }
}

/// `"b(2,t) > n"`.
pub fn claim_text(beta: usize, n: usize) -> String {
    format!("b(2,{}) > {}", beta + 1, n)
}

/// `β` of `g`: exact when `n ≤ exact_limit`, otherwise a heuristic lower
/// bound seeded by `seed`.
pub fn independence_number(g: &BipartiteGraph, seed: u64, opts: &CertifyOptions) -> Result<(usize, BetaFlag)> {
    if g.n() <= opts.exact_limit {
        Ok((bip_independence_exact(g, opts.exact_limit)?, BetaFlag::Exact))
    } else {
        Ok((bip_independence_heuristic(g, opts.restarts, seed).side(), BetaFlag::Heuristic))
    }
}

/// Builds the certificate of a completed run.
pub fn make_certificate(state: &ProcessState, opts: &CertifyOptions) -> Result<Certificate> {
    if !state.is_terminated() {
        return Err(Error::InvalidArgument(
            "certificates need a run to completion".into(),
        ));
    }
    let g = state.graph();
    if !g.is_k22_free() {
        return Err(Error::NotK22Free);
    }
    let (beta, beta_flag) = independence_number(g, state.seed(), opts)?;
    Ok(Certificate {
        n: g.n(),
        seed: state.seed(),
        rng_algo: state.rng_algorithm().to_string(),
        m: g.edge_count(),
        edges: g.edges().map(|p| [p.x, p.y]).collect(),
        k22_free: true,
        beta,
        beta_flag,
        claim: (beta_flag == BetaFlag::Exact).then(|| claim_text(beta, g.n())),
        epsilon: round_sig(opts.epsilon, 9),
        tool_version: crate::TOOL_VERSION.to_string(),
    })
}

/// Runs the process to completion and certifies the result.
pub fn certify(n: usize, seed: u64, opts: &CertifyOptions) -> Result<Certificate> {
    let mut state = ProcessState::new(n, seed)?;
    state.run(StopRule::Completion);
    make_certificate(&state, opts)
}

impl Certificate {
    pub fn to_json(&self) -> Result<String> {
        Ok(super::to_stable_json(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn graph(&self) -> Result<BipartiteGraph> {
        BipartiteGraph::from_edges(self.n, self.edges.iter().map(|&[x, y]| Pair::new(x, y)))
    }
}

/// Outcome of re-checking a certificate from its edge list alone.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verification {
    pub k22_free: bool,
    pub beta: usize,
    pub beta_flag: BetaFlag,
    pub mismatches: Vec<String>,
}

impl Verification {
    pub fn is_consistent(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Recomputes every derived field of `cert` and lists the disagreements.
/// With `regenerate`, also replays the run from `(n, seed)` and compares the
/// edge lists.
pub fn verify_certificate(cert: &Certificate, opts: &CertifyOptions, regenerate: bool) -> Result<Verification> {
    let g = cert.graph()?;
    let k22_free = g.is_k22_free();
    let (beta, beta_flag) = independence_number(&g, cert.seed, opts)?;
    let mut mismatches = Vec::new();
    let mut check = |field: &str, ok: bool, detail: String| {
        if !ok {
            mismatches.push(format!("{field}: {detail}"));
        }
    };
    check("m", cert.m == g.edge_count(), format!("{} listed, {} edges", cert.m, g.edge_count()));
    check("k22_free", cert.k22_free == k22_free, format!("recorded {}, found {k22_free}", cert.k22_free));
    check("beta_flag", cert.beta_flag == beta_flag, format!("recorded {:?}, found {beta_flag:?}", cert.beta_flag));
    check("beta", cert.beta == beta, format!("recorded {}, found {beta}", cert.beta));
    let expected_claim = (beta_flag == BetaFlag::Exact && k22_free).then(|| claim_text(beta, cert.n));
    check("claim", cert.claim == expected_claim, format!("recorded {:?}, expected {expected_claim:?}", cert.claim));
    check("rng_algo", cert.rng_algo == crate::ChoiceStream::ALGORITHM, format!("unknown algorithm {}", cert.rng_algo));
    if regenerate {
        let mut state = ProcessState::new(cert.n, cert.seed)?;
        state.run(StopRule::Completion);
        let replay: Vec<[usize; 2]> = state.graph().edges().map(|p| [p.x, p.y]).collect();
        check("edges", replay == cert.edges, "differ from a replay of (n, seed)".into());
    }
    Ok(Verification {
        k22_free,
        beta,
        beta_flag,
        mismatches,
    })
}
