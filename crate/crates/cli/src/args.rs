use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

const EXIT_CODES: &str = "Exit codes:
  0  every check passed
  1  at least one inequality violated
  2  no violation, but Monte-Carlo noise left some record inconclusive
  3  usage, configuration or input parse error
  4  I/O error
  5  size guard, precondition or numerical failure

Environment:
  OPSPACE_THREADS  maximum number of worker threads";

#[derive(Parser, Debug)]
#[command(name = "opspace", version, about = "Operator-space norms and seeded verification of their inequalities", after_help = EXIT_CODES)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run one verification suite, or all of them, and write JSON reports.
    #[command(
        after_help = "Suites: prop11, lemma14, theorem0k, khintchine, lemma32, lemma42, prop48, prop49, all.\n\
Writes <suite>.json per check, summary.txt and manifest.json into --out.\n\
Flags given explicitly override the per-suite defaults (or the --quick sizes)."
    )]
    Verify(VerifyArgs),
    /// Alpha norms and the bracket norm of a family read from a JSON file.
    #[command(after_help = "Input format:\n\
  {\"n\": 2, \"k\": 1, \"d\": 2,\n   \"entries\": {\"1\": [[1,0],[0,0],[0,0],[0,0]], \"2\": [[0,0],[0,0],[1,0],[0,0]]}}\n\
Entry keys are 1-based multi-indices \"j1,...,jk\"; each value lists the d*d entries\n\
in row-major order as [re, im] pairs. Missing keys are zero matrices.")]
    Norm(NormArgs),
    /// Convergence table of a computed constant against its limit, as CSV.
    #[command(after_help = "CSV columns:\n\
  depth  truncation depth of the Fock space\n\
  value  computed value at that depth\n\
  limit  theoretical limit\n\
  gap    limit - value\n\
Targets:\n\
  cuntz         c(n, depth) = 1/2 ||sum_i (s_i + s_i*)^2||^(1/2), limit (1 + sqrt n)/2\n\
  semicircular  tau(x_1^2) for x_1 = (s_1 + s_1*)/2, limit 1/4")]
    Converge(ConvergeArgs),
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Suite name or `all`.
    pub suite: String,
    /// Number of generators, letters or factors.
    #[arg(long)]
    pub n: Option<usize>,
    /// Tensor degree.
    #[arg(long)]
    pub k: Option<usize>,
    /// Coefficient matrix size.
    #[arg(long)]
    pub d: Option<usize>,
    /// Word-length radius of the free group ball.
    #[arg(long)]
    pub radius: Option<usize>,
    /// Fock space truncation depth.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Number of random trials.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Base seed; each trial derives its own stream from it.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Relative margin below which a record counts as a violation.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Monte-Carlo samples per integral.
    #[arg(long = "mc-samples")]
    pub mc_samples: Option<usize>,
    /// Reduced sizes for a fast run.
    #[arg(long)]
    pub quick: bool,
    /// Record wall-clock time in the reports; output is then no longer reproducible.
    #[arg(long)]
    pub timing: bool,
    /// Output directory.
    #[arg(long, default_value = "reports")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct NormArgs {
    /// JSON family file.
    pub input: PathBuf,
    /// Comma-separated 1-based members of a single mask, e.g. `1,3`; empty string for the empty mask.
    #[arg(long)]
    pub alpha: Option<String>,
    /// Cross-check the bracket norm against the assembled operator.
    #[arg(long)]
    pub assemble: bool,
    /// Also bracket the dual norm with primal-dual certificates.
    #[arg(long)]
    pub dual: bool,
    /// Write the result as JSON to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Cuntz,
    Semicircular,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::Cuntz => "cuntz",
            Target::Semicircular => "semicircular",
        }
    }
}

#[derive(Args, Debug)]
pub struct ConvergeArgs {
    pub target: Target,
    #[arg(long)]
    pub n: usize,
    /// Inclusive depth range `a..b`, or a single depth.
    #[arg(long)]
    pub depths: String,
    /// Write the CSV here instead of standard output; a manifest is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
