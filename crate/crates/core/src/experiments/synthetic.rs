use super::{check_methods, draw_seeds, method_list, method_stream, needs_gram, run_rng, ResultTable, RunProtocol, SigmaRule};
use crate::clustering::{lloyd_vector, SeedMethod, DEFAULT_MAX_ITER};
use crate::datasets::{synth_gaussian_grid, GridSpec};
use crate::dpp::{DppSampler, DENSE_EIGEN_MAX};
use crate::error::{Error, Result};
use crate::kernels::{rbf_gram, sq_euclidean};
use crate::metrics::{median, missed_clusters, pearson, summarize, RunSummary};

/// Stream reserved for generating the grid data itself.
const DATA_STREAM: u64 = 1 << 32;

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticConfig {
    pub grids: Vec<usize>,
    pub separation: f64,
    pub variance: f64,
    pub points_per: usize,
    pub methods: Vec<SeedMethod>,
    pub sigma: SigmaRule,
    pub max_iter: usize,
    pub protocol: RunProtocol,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            grids: vec![2, 3, 4, 5, 6, 10],
            separation: 10.0,
            variance: 1.0,
            points_per: 100,
            methods: vec![SeedMethod::Rand, SeedMethod::PlusPlus, SeedMethod::Dpp, SeedMethod::DppK],
            sigma: SigmaRule::Separation,
            max_iter: DEFAULT_MAX_ITER,
            protocol: RunProtocol::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MethodOutcome {
    pub method: SeedMethod,
    /// Missed clusters per run, in run order.
    pub missed: Vec<usize>,
    pub median_missed: f64,
    /// k used by each run (inferred for dpp, k_t otherwise).
    pub k: RunSummary<f64>,
    pub cost: RunSummary<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridOutcome {
    pub grid_side: usize,
    pub k_true: usize,
    pub n_points: usize,
    pub sigma: Option<f64>,
    pub methods: Vec<MethodOutcome>,
    /// Methods that could not run on this grid, with the reason.
    pub skipped: Vec<(SeedMethod, String)>,
}

impl GridOutcome {
    pub fn method(&self, m: SeedMethod) -> Option<&MethodOutcome> {
        self.methods.iter().find(|o| o.method == m)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticReport {
    pub config: SyntheticConfig,
    pub grids: Vec<GridOutcome>,
    /// Correlation of the dpp mean inferred k with k_t across grids.
    pub k_correlation: Option<f64>,
}

impl SyntheticReport {
    pub fn grid(&self, grid_side: usize) -> Option<&GridOutcome> {
        self.grids.iter().find(|g| g.grid_side == grid_side)
    }

    pub fn median_missed(&self, grid_side: usize, m: SeedMethod) -> Option<f64> {
        self.grid(grid_side)?.method(m).map(|o| o.median_missed)
    }

    pub fn dpp_mean_k(&self, grid_side: usize) -> Option<f64> {
        self.grid(grid_side)?.method(SeedMethod::Dpp).map(|o| o.k.mean)
    }

    pub fn to_table(&self) -> ResultTable {
        let c = &self.config;
        let mut t = ResultTable::new(
            "synthetic",
            &["grid_side", "k_true", "n", "sigma", "method", "median_missed", "k_mean", "k_std", "cost_mean", "cost_std"],
        );
        t.echo("family", "synthetic");
        t.echo("grids", c.grids.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(","));
        t.echo("separation", c.separation);
        t.echo("variance", c.variance);
        t.echo("points_per", c.points_per);
        t.echo("methods", method_list(&c.methods));
        t.echo("sigma_rule", c.sigma);
        t.echo("max_iter", c.max_iter);
        c.protocol.echo(&mut t);
        match self.k_correlation {
            Some(r) => t.note(format!("pearson(dpp mean k, k_true) = {r:.6}")),
            None => t.note("pearson(dpp mean k, k_true) = NA (needs dpp on at least two grids)"),
        }
        for m in &c.methods {
            let total: f64 = self.grids.iter().filter_map(|g| g.method(*m)).map(|o| o.median_missed).sum();
            t.note(format!("total median missed {m} = {total}"));
        }
        for g in &self.grids {
            for (m, why) in &g.skipped {
                t.note(format!("grid {} method {m} skipped: {why}", g.grid_side));
            }
            for o in &g.methods {
                t.push(vec![
                    g.grid_side.into(),
                    g.k_true.into(),
                    g.n_points.into(),
                    g.sigma.into(),
                    o.method.name().into(),
                    o.median_missed.into(),
                    o.k.mean.into(),
                    o.k.std.into(),
                    o.cost.mean.into(),
                    o.cost.std.into(),
                ]);
            }
        }
        t
    }
}

struct RunResult {
    missed: usize,
    k: usize,
    cost: f64,
}

pub fn run_synthetic(cfg: &SyntheticConfig) -> Result<SyntheticReport> {
    cfg.protocol.validate()?;
    check_methods(&cfg.methods)?;
    if cfg.grids.is_empty() {
        return Err(Error::InvalidArgument("at least one grid size is required".into()));
    }
    let mut grids = Vec::with_capacity(cfg.grids.len());
    for &side in &cfg.grids {
        grids.push(run_grid(cfg, side)?);
    }
    let (ks, kt): (Vec<f64>, Vec<f64>) = grids
        .iter()
        .filter_map(|g| g.method(SeedMethod::Dpp).map(|o| (o.k.mean, g.k_true as f64)))
        .unzip();
    let k_correlation = if ks.len() >= 2 { pearson(&ks, &kt).ok() } else { None };
    Ok(SyntheticReport { config: cfg.clone(), grids, k_correlation })
}

fn run_grid(cfg: &SyntheticConfig, side: usize) -> Result<GridOutcome> {
    let spec = GridSpec { grid_side: side, separation: cfg.separation, variance: cfg.variance, points_per: cfg.points_per };
    let data = synth_gaussian_grid::<f64, _>(&spec, &mut run_rng(cfg.protocol.master_seed, 0, DATA_STREAM + side as u64))?;
    let points = data.vectors().expect("synthetic data is vector data");
    let centers = data.true_centers.as_deref().expect("synthetic data has centers");
    let n = points.len();
    let k_true = spec.k_true();

    let mut skipped = Vec::new();
    let mut sigma = None;
    let gram = if needs_gram(&cfg.methods) && n > DENSE_EIGEN_MAX {
        let why = format!("{n} points exceed the dense eigendecomposition limit of {DENSE_EIGEN_MAX}");
        for m in cfg.methods.iter().filter(|m| needs_gram(&[**m])) {
            skipped.push((*m, why.clone()));
        }
        None
    } else if needs_gram(&cfg.methods) {
        let s = cfg.sigma.resolve(points, Some(cfg.separation))?;
        sigma = Some(s);
        let g = rbf_gram(points, s)?;
        let sampler = DppSampler::new(&g)?;
        Some((g, sampler))
    } else {
        None
    };

    let dist2 = |i: usize, j: usize| sq_euclidean(&points[i], &points[j]);
    let mut methods = Vec::new();
    for &method in &cfg.methods {
        if skipped.iter().any(|(m, _)| *m == method) {
            continue;
        }
        let stream = ((side as u64) << 8) | method_stream(method);
        let runs = cfg.protocol.map_runs(|r| {
            let mut rng = run_rng(cfg.protocol.master_seed, r, stream);
            let seeds = draw_seeds(method, n, k_true, dist2, gram.as_ref().map(|(g, s)| (g, s)), &mut rng)?;
            let fit = lloyd_vector(points, &seeds, cfg.max_iter)?;
            let centroids = fit.centroids().expect("vector mode has centroids");
            Ok(RunResult { missed: missed_clusters(centroids, centers)?, k: seeds.inferred_k(), cost: fit.cost })
        })?;
        let missed: Vec<usize> = runs.iter().map(|r| r.missed).collect();
        let as_f64: Vec<f64> = missed.iter().map(|&m| m as f64).collect();
        methods.push(MethodOutcome {
            method,
            median_missed: median(&as_f64)?,
            missed,
            k: summarize(&runs.iter().map(|r| r.k as f64).collect::<Vec<_>>(), "k")?,
            cost: summarize(&runs.iter().map(|r| r.cost).collect::<Vec<_>>(), "cost")?,
        });
    }
    Ok(GridOutcome { grid_side: side, k_true, n_points: n, sigma, methods, skipped })
}
