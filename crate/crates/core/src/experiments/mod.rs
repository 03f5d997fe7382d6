//! Seeded multi-run experiment protocols producing TSV result tables.
//!
//! Every run draws from its own generator, `ChaCha8` seeded with
//! `master_seed + run_index` and switched to a stream that identifies the
//! dataset and seeding method, so results do not depend on worker count or
//! on which other methods or grids were requested.

mod benchmark;
mod screenplay;
mod synthetic;
mod table;
mod verify;

pub use benchmark::{run_benchmark, BenchmarkConfig, BenchmarkReport, MethodSummary};
pub use screenplay::{run_screenplay, MovieOutcome, ScreenplayConfig, ScreenplayInput, ScreenplayReport};
pub use synthetic::{run_synthetic, GridOutcome, MethodOutcome, SyntheticConfig, SyntheticReport};
pub use table::{Cell, ResultTable};
pub use verify::{run_dpp_diag, run_verify, DiagConfig, DiagReport, VerifyConfig, VerifyReport};

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::clustering::{init_dpp, init_kdpp, init_kmeanspp, init_random, init_sequential, SeedMethod, SeedSet};
use crate::dpp::DppSampler;
use crate::error::{Error, Result};
use crate::kernels::{median_sigma, GramMatrix};

/// Crate version echoed into every table header.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunProtocol {
    pub runs: usize,
    pub master_seed: u64,
    /// Worker threads; results are identical for any value.
    pub jobs: usize,
}

impl Default for RunProtocol {
    fn default() -> Self {
        Self { runs: 50, master_seed: 0, jobs: 1 }
    }
}

impl RunProtocol {
    fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::InvalidArgument("runs must be at least 1".into()));
        }
        Ok(())
    }

    fn echo(&self, t: &mut ResultTable) {
        t.echo("runs", self.runs);
        t.echo("master_seed", self.master_seed);
        t.echo("seed_rule", "chacha8(master_seed + run_index), stream per dataset and method");
    }

    /// Runs `f(run_index)` for every run on a pool of `jobs` threads and
    /// returns the results in run order.
    fn map_runs<R, F>(&self, f: F) -> Result<Vec<R>>
    where
        R: Send,
        F: Fn(usize) -> Result<R> + Sync + Send,
    {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs.max(1))
            .build()
            .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
        pool.install(|| (0..self.runs).into_par_iter().map(f).collect())
    }
}

/// Generator for run `run_index` on stream `stream`.
pub fn run_rng(master_seed: u64, run_index: usize, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed.wrapping_add(run_index as u64));
    rng.set_stream(stream);
    rng
}

fn method_stream(method: SeedMethod) -> u64 {
    SeedMethod::ALL.iter().position(|&m| m == method).expect("listed method") as u64 + 1
}

/// How the RBF bandwidth is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SigmaRule {
    /// `1 / (2 · median squared pairwise distance)`.
    Median,
    /// `1 / (2 · separation²)` from the synthetic generator's spacing.
    Separation,
    Fixed(f64),
}

impl SigmaRule {
    pub fn resolve(&self, points: &[Vec<f64>], separation: Option<f64>) -> Result<f64> {
        match *self {
            SigmaRule::Median => median_sigma(points),
            SigmaRule::Separation => separation
                .map(|s| 1.0 / (2.0 * s * s))
                .ok_or_else(|| Error::InvalidArgument("the separation rule needs synthetic grid data".into())),
            SigmaRule::Fixed(s) if s > 0.0 && s.is_finite() => Ok(s),
            SigmaRule::Fixed(s) => Err(Error::InvalidArgument(format!("sigma must be positive, got {s}"))),
        }
    }
}

impl fmt::Display for SigmaRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SigmaRule::Median => f.write_str("median"),
            SigmaRule::Separation => f.write_str("separation"),
            SigmaRule::Fixed(s) => write!(f, "{s}"),
        }
    }
}

impl FromStr for SigmaRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "median" => Ok(SigmaRule::Median),
            "separation" => Ok(SigmaRule::Separation),
            _ => {
                let v: f64 = s
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("sigma `{s}` is not median, separation or a number")))?;
                SigmaRule::Fixed(v).resolve(&[], None).map(SigmaRule::Fixed)
            }
        }
    }
}

fn needs_gram(methods: &[SeedMethod]) -> bool {
    methods.iter().any(|m| matches!(m, SeedMethod::Dpp | SeedMethod::DppK | SeedMethod::Sequential))
}

fn check_methods(methods: &[SeedMethod]) -> Result<()> {
    if methods.is_empty() {
        return Err(Error::InvalidArgument("method set must be nonempty".into()));
    }
    Ok(())
}

fn method_list(methods: &[SeedMethod]) -> String {
    methods.iter().map(|m| m.name()).collect::<Vec<_>>().join(",")
}

/// Draws the initial centers for one run.
fn draw_seeds<D>(
    method: SeedMethod,
    n: usize,
    k: usize,
    dist2: D,
    gram: Option<(&GramMatrix<f64>, &DppSampler<f64>)>,
    rng: &mut ChaCha8Rng,
) -> Result<SeedSet>
where
    D: Fn(usize, usize) -> f64,
{
    let need = || Error::InvalidArgument(format!("method {method} needs a Gram matrix"));
    match method {
        SeedMethod::Rand => init_random(n, k, rng),
        SeedMethod::PlusPlus => init_kmeanspp(dist2, n, k, rng),
        SeedMethod::Dpp => init_dpp(gram.ok_or_else(need)?.1, rng),
        SeedMethod::DppK => init_kdpp(gram.ok_or_else(need)?.1, k, rng),
        SeedMethod::Sequential => init_sequential(gram.ok_or_else(need)?.0, k, rng),
    }
}
