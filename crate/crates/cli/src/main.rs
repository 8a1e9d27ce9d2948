//! `k22free`: run, sweep, audit and certify the bipartite K_{2,2}-free process.
//!
//! Exit codes: 0 success or audit pass, 1 audit or verification failure,
//! 2 usage error, 3 I/O or parse error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use k22_core::analysis::certificate::{verify_certificate, Certificate, CertifyOptions};
use k22_core::analysis::independence::DEFAULT_EXACT_LIMIT;
use k22_core::analysis::to_stable_json;
use k22_core::analysis::DEFAULT_EPSILON;
use k22_core::harness::{self, RunConfig, StopMode, SweepSource};
use k22_core::Error;

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "k22free", version, about = "Simulator and analysis toolkit for the K_{2,2}-free process on K_{n,n}")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run replications and write trajectories, graphs and a summary.
    Run(RunArgs),
    /// Run several side sizes and fit scaling exponents.
    Sweep(SweepArgs),
    /// Audit a stored graph file.
    Audit(AuditArgs),
    /// Run to completion and emit a Ramsey lower-bound certificate.
    Certify(CertifyArgs),
    /// Re-check a certificate file from scratch.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Stop {
    Completion,
    Imax,
}

/// Run options. Any flag given overrides the `--config` file.
#[derive(Args, Debug)]
struct RunFlags {
    /// JSON file with any subset of the run options.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of replications.
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long, value_enum)]
    stop: Option<Stop>,
    /// Coefficient of the step budget for `--stop imax`.
    #[arg(long = "imax-eps")]
    imax_eps: Option<f64>,
    /// Analysis exponent, in (0, 0.5].
    #[arg(long)]
    eps: Option<f64>,
    /// Tracked rectangles per replication.
    #[arg(long)]
    rects: Option<usize>,
    #[arg(long = "d2-samples")]
    d2_samples: Option<usize>,
    /// Steps between trajectory records (default ceil(n^{2/3})).
    #[arg(long)]
    cadence: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Largest n for the exact independence number.
    #[arg(long = "exact-limit")]
    exact_limit: Option<usize>,
    /// Restarts of the heuristic independence search.
    #[arg(long)]
    restarts: Option<usize>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Largest t entering the open-count deviation.
    #[arg(long = "t-cap")]
    t_cap: Option<f64>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    flags: RunFlags,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Comma-separated side sizes.
    #[arg(long = "n-list", value_delimiter = ',', required = true)]
    n_list: Vec<usize>,
    /// Skip simulation and use values n^EXPONENT (checks the fitting path).
    #[arg(long)]
    synthetic: Option<f64>,
    #[command(flatten)]
    flags: RunFlags,
}

#[derive(Args, Debug)]
struct AuditArgs {
    /// Graph file in the "n m" / "x y" text format.
    file: PathBuf,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    eps: f64,
    /// Restarts of the density falsifier.
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct CertifyArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "exact-limit", default_value_t = DEFAULT_EXACT_LIMIT)]
    exact_limit: usize,
    #[arg(long, default_value_t = 200)]
    restarts: usize,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    eps: f64,
    /// Write the certificate here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    file: PathBuf,
    #[arg(long = "exact-limit", default_value_t = DEFAULT_EXACT_LIMIT)]
    exact_limit: usize,
    #[arg(long, default_value_t = 200)]
    restarts: usize,
    /// Also replay the run from (n, seed) and compare edge lists.
    #[arg(long)]
    replay: bool,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidArgument(_) | Error::ExactLimit { .. } | Error::SideTooSmall { .. } => EXIT_USAGE,
            Error::NotK22Free => EXIT_FAIL,
            _ => EXIT_IO,
        };
        Failure { code, message: e.to_string() }
    }
}

fn with_path(path: &Path) -> impl Fn(Error) -> Failure + '_ {
    move |e| {
        let f = Failure::from(e);
        Failure { message: format!("{}: {}", path.display(), f.message), ..f }
    }
}

fn load_config(flags: &RunFlags) -> Result<RunConfig, Failure> {
    let mut cfg = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| with_path(path)(e.into()))?;
            serde_json::from_str::<RunConfig>(&text).map_err(|e| with_path(path)(e.into()))?
        }
        None => RunConfig::default(),
    };
    macro_rules! set {
        ($($field:ident),*) => { $( if let Some(v) = flags.$field.clone() { cfg.$field = v; } )* };
    }
    set!(n, seed, reps, imax_eps, eps, rects, d2_samples, out, exact_limit, restarts, t_cap);
    if let Some(c) = flags.cadence {
        cfg.cadence = Some(c);
    }
    if let Some(t) = flags.threads {
        cfg.threads = Some(t);
    }
    if let Some(s) = flags.stop {
        cfg.stop = match s {
            Stop::Completion => StopMode::Completion,
            Stop::Imax => StopMode::Imax,
        };
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(args: RunArgs) -> Result<u8, Failure> {
    let cfg = load_config(&args.flags)?;
    let summary = harness::cmd_run(&cfg)?;
    let a = &summary.aggregates;
    println!(
        "n={} reps={} M mean={} [{}, {}] maxdeg max={} beta mean={} coverage min={}",
        summary.n, summary.reps, a.m.mean, a.m.min, a.m.max, a.max_degree.max, a.beta.mean, a.rect_coverage.min
    );
    println!("wrote {}", cfg.out.join(harness::SUMMARY_FILE).display());
    Ok(0)
}

fn sweep(args: SweepArgs) -> Result<u8, Failure> {
    let cfg = load_config(&args.flags)?;
    if args.n_list.len() < 2 {
        return Err(Failure::usage("--n-list needs at least 2 values"));
    }
    let source = match args.synthetic {
        Some(exponent) => SweepSource::Synthetic { exponent },
        None => SweepSource::Simulate,
    };
    let report = harness::cmd_sweep(&args.n_list, &cfg, source)?;
    println!(
        "M slope={:.6} (residual {:.3e}); beta lower-bound slope={:.6} (residual {:.3e})",
        report.edge_fit.slope, report.edge_fit.residual_norm, report.beta_fit.slope, report.beta_fit.residual_norm
    );
    println!("wrote {}", cfg.out.join(harness::SWEEP_FILE).display());
    Ok(0)
}

fn audit(args: AuditArgs) -> Result<u8, Failure> {
    if args.eps.is_nan() || args.eps <= 0.0 {
        return Err(Failure::usage("--eps must be positive"));
    }
    let report = harness::cmd_audit(&args.file, args.eps, args.restarts, args.seed).map_err(with_path(&args.file))?;
    print!("{}", to_stable_json(&report).map_err(Error::from)?);
    if report.density.violation_found {
        eprintln!("density: violation found (score {})", report.density.best_score);
    } else {
        eprintln!("density: no violation found at effort {}", report.density.restarts);
    }
    if report.pass {
        Ok(0)
    } else {
        eprintln!(
            "audit failed: k22_free={} degree_pass={}",
            report.k22_free, report.degree.pass
        );
        Ok(EXIT_FAIL)
    }
}

fn certify(args: CertifyArgs) -> Result<u8, Failure> {
    let opts = CertifyOptions { exact_limit: args.exact_limit, restarts: args.restarts, epsilon: args.eps };
    let cert = harness::cmd_certify(args.n, args.seed, &opts)?;
    let json = cert.to_json()?;
    match &args.out {
        Some(path) => std::fs::write(path, json).map_err(|e| with_path(path)(e.into()))?,
        None => print!("{json}"),
    }
    if let Some(claim) = &cert.claim {
        eprintln!("{claim}");
    } else {
        eprintln!("beta >= {} (heuristic lower bound; no claim)", cert.beta);
    }
    Ok(0)
}

fn verify(args: VerifyArgs) -> Result<u8, Failure> {
    let cert = Certificate::read_file(&args.file).map_err(with_path(&args.file))?;
    let opts = CertifyOptions { exact_limit: args.exact_limit, restarts: args.restarts, epsilon: cert.epsilon };
    let v = verify_certificate(&cert, &opts, args.replay)?;
    print!("{}", to_stable_json(&v).map_err(Error::from)?);
    if v.is_consistent() && v.k22_free {
        Ok(0)
    } else {
        for m in &v.mismatches {
            eprintln!("mismatch: {m}");
        }
        Ok(EXIT_FAIL)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Sweep(a) => sweep(a),
        Command::Audit(a) => audit(a),
        Command::Certify(a) => certify(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
