use super::{check_methods, draw_seeds, method_list, method_stream, needs_gram, run_rng, ResultTable, RunProtocol, SigmaRule};
use crate::clustering::{lloyd_vector, SeedMethod, DEFAULT_MAX_ITER};
use crate::datasets::LabeledDataset;
use crate::dpp::DppSampler;
use crate::error::{Error, Result};
use crate::kernels::{rbf_gram, sq_euclidean};
use crate::metrics::{f1_macro, summarize, Matching, RunSummary};

#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkConfig {
    /// Overrides the gold class count.
    pub k: Option<usize>,
    pub methods: Vec<SeedMethod>,
    pub sigma: SigmaRule,
    pub matching: Matching,
    pub max_iter: usize,
    pub protocol: RunProtocol,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            k: None,
            methods: vec![SeedMethod::PlusPlus, SeedMethod::Dpp, SeedMethod::DppK],
            sigma: SigmaRule::Median,
            matching: Matching::BestMatch,
            max_iter: DEFAULT_MAX_ITER,
            protocol: RunProtocol::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MethodSummary {
    pub method: SeedMethod,
    pub k: RunSummary<f64>,
    /// Absent for auto-k seeding and for unlabeled data.
    pub f1: Option<RunSummary<f64>>,
    pub cost: RunSummary<f64>,
    pub cost_per_point: RunSummary<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkReport {
    pub config: BenchmarkConfig,
    pub dataset: String,
    pub n_points: usize,
    pub dropped_rows: usize,
    pub k_used: Option<usize>,
    pub sigma: Option<f64>,
    pub methods: Vec<MethodSummary>,
}

impl BenchmarkReport {
    pub fn method(&self, m: SeedMethod) -> Option<&MethodSummary> {
        self.methods.iter().find(|s| s.method == m)
    }

    pub fn to_table(&self) -> ResultTable {
        let c = &self.config;
        let mut t = ResultTable::new(
            "benchmark",
            &["dataset", "method", "k_mean", "k_std", "f1_mean", "f1_std", "cost_mean", "cost_std", "cost_per_point_mean", "cost_per_point_std"],
        );
        t.echo("family", "benchmark");
        t.echo("dataset", &self.dataset);
        t.echo("n", self.n_points);
        t.echo("dropped_rows", self.dropped_rows);
        t.echo("k", self.k_used.map_or("NA".to_string(), |k| k.to_string()));
        t.echo("methods", method_list(&c.methods));
        t.echo("sigma_rule", c.sigma);
        t.echo("sigma", self.sigma.map_or("NA".to_string(), |s| format!("{s:.6}")));
        t.echo("matching", c.matching);
        t.echo("max_iter", c.max_iter);
        c.protocol.echo(&mut t);
        for s in &self.methods {
            t.push(vec![
                self.dataset.as_str().into(),
                s.method.name().into(),
                s.k.mean.into(),
                s.k.std.into(),
                s.f1.as_ref().map(|f| f.mean).into(),
                s.f1.as_ref().map(|f| f.std).into(),
                s.cost.mean.into(),
                s.cost.std.into(),
                s.cost_per_point.mean.into(),
                s.cost_per_point.std.into(),
            ]);
        }
        t
    }
}

pub fn run_benchmark(data: &LabeledDataset<f64>, cfg: &BenchmarkConfig) -> Result<BenchmarkReport> {
    cfg.protocol.validate()?;
    check_methods(&cfg.methods)?;
    let points = data
        .vectors()
        .ok_or_else(|| Error::InvalidArgument("benchmark family needs vector data".into()))?;
    let n = points.len();
    let k_used = cfg.k.or_else(|| data.gold_k());
    if let Some(k) = k_used {
        if k == 0 || k > n {
            return Err(Error::InvalidArgument(format!("k = {k} must lie in 1..={n}")));
        }
    }
    let fixed_k = || {
        k_used.ok_or_else(|| Error::InvalidArgument("no k given and the dataset has no gold labels".into()))
    };

    let (sigma, gram) = if needs_gram(&cfg.methods) {
        let s = cfg.sigma.resolve(points, None)?;
        let g = rbf_gram(points, s)?;
        let sampler = DppSampler::new(&g)?;
        (Some(s), Some((g, sampler)))
    } else {
        (None, None)
    };
    let dist2 = |i: usize, j: usize| sq_euclidean(&points[i], &points[j]);

    let mut methods = Vec::new();
    for &method in &cfg.methods {
        let k = if method.needs_k() { fixed_k()? } else { 0 };
        let score_f1 = method.needs_k() && data.gold_labels.is_some();
        let stream = method_stream(method);
        let runs = cfg.protocol.map_runs(|r| {
            let mut rng = run_rng(cfg.protocol.master_seed, r, stream);
            let seeds = draw_seeds(method, n, k, dist2, gram.as_ref().map(|(g, s)| (g, s)), &mut rng)?;
            let fit = lloyd_vector(points, &seeds, cfg.max_iter)?;
            let f1 = if score_f1 { Some(f1_macro(&fit.assignments, data.require_gold()?, cfg.matching)?) } else { None };
            Ok((seeds.inferred_k() as f64, f1, fit.cost, fit.cost_per_point()))
        })?;
        let col = |f: fn(&(f64, Option<f64>, f64, f64)) -> f64| runs.iter().map(f).collect::<Vec<f64>>();
        let f1 = if score_f1 {
            Some(summarize(&runs.iter().map(|r| r.1.expect("scored")).collect::<Vec<_>>(), "f1")?)
        } else {
            None
        };
        methods.push(MethodSummary {
            method,
            k: summarize(&col(|r| r.0), "k")?,
            f1,
            cost: summarize(&col(|r| r.2), "cost")?,
            cost_per_point: summarize(&col(|r| r.3), "cost_per_point")?,
        });
    }
    Ok(BenchmarkReport {
        config: cfg.clone(),
        dataset: data.name.clone(),
        n_points: n,
        dropped_rows: data.dropped_rows,
        k_used,
        sigma,
        methods,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::{parse_delimited, DelimitedOptions};

    fn blobs() -> LabeledDataset<f64> {
        let mut text = String::new();
        for (c, (x, y)) in [(0.0, 0.0), (20.0, 0.0), (0.0, 20.0)].iter().enumerate() {
            for i in 0..6 {
                text.push_str(&format!("{},{},c{c}\n", x + (i % 3) as f64 * 0.3, y + (i / 3) as f64 * 0.4));
            }
        }
        let opts = DelimitedOptions { label_column: Some(2), ..DelimitedOptions::default() };
        parse_delimited(&text, &opts).unwrap()
    }

    fn cfg(runs: usize) -> BenchmarkConfig {
        BenchmarkConfig { protocol: RunProtocol { runs, master_seed: 1, jobs: 1 }, ..BenchmarkConfig::default() }
    }

    #[test]
    fn separated_blobs_score_perfectly_with_dppk() {
        let r = run_benchmark(&blobs(), &cfg(5)).unwrap();
        assert_eq!(r.k_used, Some(3));
        let dppk = r.method(SeedMethod::DppK).unwrap();
        assert_eq!(dppk.f1.as_ref().unwrap().mean, 1.0);
        assert!(r.method(SeedMethod::Dpp).unwrap().f1.is_none());
        let tsv = r.to_table().to_tsv();
        assert!(tsv.contains("\tdpp\t"));
        assert!(tsv.contains("# sigma_rule=median"));
    }

    #[test]
    fn k_equal_n_gives_zero_cost() {
        let mut c = cfg(2);
        c.k = Some(18);
        c.sigma = SigmaRule::Fixed(5.0);
        c.methods = vec![SeedMethod::DppK];
        let r = run_benchmark(&blobs(), &c).unwrap();
        assert_eq!(r.method(SeedMethod::DppK).unwrap().cost.mean, 0.0);
    }

    #[test]
    fn unlabeled_data_needs_k() {
        let mut d = blobs();
        d.gold_labels = None;
        let mut c = cfg(2);
        c.methods = vec![SeedMethod::PlusPlus];
        assert!(run_benchmark(&d, &c).is_err());
        c.methods = vec![SeedMethod::Dpp];
        assert!(run_benchmark(&d, &c).is_ok());
        c.k = Some(19);
        assert!(run_benchmark(&d, &c).is_err());
    }
}
