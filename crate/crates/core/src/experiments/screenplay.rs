use super::{check_methods, draw_seeds, method_list, method_stream, run_rng, Cell, ResultTable, RunProtocol};
use crate::clustering::{lloyd_kernel, SeedMethod, DEFAULT_MAX_ITER};
use crate::datasets::ParsedScreenplay;
use crate::dpp::DppSampler;
use crate::error::{Error, Result};
use crate::kernels::word_ngram_gram;
use crate::metrics::{f1_macro, heuristic_k, pearson, summarize, Heuristic, Matching, RunSummary};

#[derive(Clone, Debug, PartialEq)]
pub struct ScreenplayInput {
    pub name: String,
    /// Parsed headings, with gold clusters attached when a sidecar exists.
    pub parsed: ParsedScreenplay,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScreenplayConfig {
    /// Longest word n-gram in the heading kernel.
    pub ngram: usize,
    /// Methods scored by F1 at the gold k; auto-k is always reported.
    pub methods: Vec<SeedMethod>,
    pub matching: Matching,
    pub max_iter: usize,
    pub protocol: RunProtocol,
}

impl Default for ScreenplayConfig {
    fn default() -> Self {
        Self {
            ngram: 2,
            methods: vec![SeedMethod::Rand, SeedMethod::PlusPlus, SeedMethod::DppK],
            matching: Matching::BestMatch,
            max_iter: DEFAULT_MAX_ITER,
            protocol: RunProtocol::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MovieOutcome {
    pub name: String,
    pub n_scenes: usize,
    pub rejected_headings: usize,
    pub gold_k: Option<usize>,
    pub log_k: f64,
    pub sqrt_k: f64,
    pub dpp_k: RunSummary<f64>,
    /// Macro-F1 per method at the gold k; empty without gold clusters.
    pub f1: Vec<(SeedMethod, RunSummary<f64>)>,
}

impl MovieOutcome {
    pub fn f1(&self, m: SeedMethod) -> Option<&RunSummary<f64>> {
        self.f1.iter().find(|(x, _)| *x == m).map(|(_, s)| s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScreenplayReport {
    pub config: ScreenplayConfig,
    pub movies: Vec<MovieOutcome>,
    /// Correlation with gold k of n, log n, sqrt n and the dpp mean k,
    /// when at least two screenplays carry gold clusters.
    pub correlations: Option<[Option<f64>; 4]>,
    pub notes: Vec<String>,
}

impl ScreenplayReport {
    pub fn to_table(&self) -> ResultTable {
        let c = &self.config;
        let mut columns = vec!["screenplay", "n", "gold_k", "log_n", "sqrt_n", "dpp_k_mean", "dpp_k_std"];
        let f1_cols: Vec<String> = c
            .methods
            .iter()
            .flat_map(|m| [format!("f1_{m}_mean"), format!("f1_{m}_std")])
            .collect();
        columns.extend(f1_cols.iter().map(String::as_str));
        let mut t = ResultTable::new("screenplay", &columns);
        t.echo("family", "screenplay");
        t.echo("screenplays", self.movies.iter().map(|m| m.name.as_str()).collect::<Vec<_>>().join(","));
        t.echo("ngram", c.ngram);
        t.echo("methods", method_list(&c.methods));
        t.echo("matching", c.matching);
        t.echo("max_iter", c.max_iter);
        c.protocol.echo(&mut t);
        for n in &self.notes {
            t.note(n.clone());
        }
        for m in &self.movies {
            let mut row: Vec<Cell> = vec![
                m.name.as_str().into(),
                m.n_scenes.into(),
                m.gold_k.into(),
                m.log_k.into(),
                m.sqrt_k.into(),
                m.dpp_k.mean.into(),
                m.dpp_k.std.into(),
            ];
            for method in &c.methods {
                let s = m.f1(*method);
                row.push(s.map(|s| s.mean).into());
                row.push(s.map(|s| s.std).into());
            }
            t.push(row);
        }
        if let Some([n, log, sqrt, dpp]) = self.correlations {
            let mut row: Vec<Cell> =
                vec!["correlation_with_gold_k".into(), n.into(), Cell::Real(1.0), log.into(), sqrt.into(), dpp.into(), Cell::Missing];
            row.extend(std::iter::repeat_n(Cell::Missing, 2 * c.methods.len()));
            t.push(row);
        }
        t
    }
}

pub fn run_screenplay(inputs: &[ScreenplayInput], cfg: &ScreenplayConfig) -> Result<ScreenplayReport> {
    cfg.protocol.validate()?;
    check_methods(&cfg.methods)?;
    if inputs.is_empty() {
        return Err(Error::InvalidArgument("no screenplays given".into()));
    }
    let mut notes = Vec::new();
    let mut movies = Vec::with_capacity(inputs.len());
    for (idx, input) in inputs.iter().enumerate() {
        movies.push(run_movie(idx, input, cfg, &mut notes)?);
    }

    let with_gold: Vec<&MovieOutcome> = movies.iter().filter(|m| m.gold_k.is_some()).collect();
    let correlations = (with_gold.len() >= 2).then(|| {
        let gold: Vec<f64> = with_gold.iter().map(|m| m.gold_k.expect("filtered") as f64).collect();
        let corr = |xs: Vec<f64>| pearson(&xs, &gold).ok();
        [
            corr(with_gold.iter().map(|m| m.n_scenes as f64).collect()),
            corr(with_gold.iter().map(|m| m.log_k).collect()),
            corr(with_gold.iter().map(|m| m.sqrt_k).collect()),
            corr(with_gold.iter().map(|m| m.dpp_k.mean).collect()),
        ]
    });
    if correlations.is_none() {
        notes.push("correlation row omitted: fewer than two screenplays with gold clusters".into());
    }
    Ok(ScreenplayReport { config: cfg.clone(), movies, correlations, notes })
}

fn run_movie(idx: usize, input: &ScreenplayInput, cfg: &ScreenplayConfig, notes: &mut Vec<String>) -> Result<MovieOutcome> {
    let scenes = &input.parsed.scenes;
    if scenes.len() < 2 {
        return Err(Error::Degenerate(format!(
            "screenplay `{}` has {} scene headings; at least 2 are needed",
            input.name,
            scenes.len()
        )));
    }
    if !input.parsed.rejected.is_empty() {
        notes.push(format!("{}: {} heading(s) rejected", input.name, input.parsed.rejected.len()));
    }
    let n = scenes.len();
    let texts: Vec<Vec<String>> = scenes.iter().map(|s| s.location_tokens.clone()).collect();
    let gram = word_ngram_gram::<f64, _>(&texts, cfg.ngram)?;
    let sampler = DppSampler::new(&gram)?;
    let gold: Option<Vec<usize>> = scenes.iter().map(|s| s.gold_cluster).collect();
    let gold_k = gold.as_ref().map(|g| {
        let mut u = g.clone();
        u.sort_unstable();
        u.dedup();
        u.len()
    });
    let dist2 = |i: usize, j: usize| gram.sq_distance(i, j);
    let base = (idx as u64) << 8;

    let dpp_k = cfg.protocol.map_runs(|r| {
        let mut rng = run_rng(cfg.protocol.master_seed, r, base | method_stream(SeedMethod::Dpp));
        let seeds = draw_seeds(SeedMethod::Dpp, n, 0, dist2, Some((&gram, &sampler)), &mut rng)?;
        Ok(seeds.inferred_k() as f64)
    })?;

    let mut f1 = Vec::new();
    match (&gold, gold_k) {
        (Some(gold), Some(k)) => {
            for &method in cfg.methods.iter().filter(|m| m.needs_k()) {
                let scores = cfg.protocol.map_runs(|r| {
                    let mut rng = run_rng(cfg.protocol.master_seed, r, base | method_stream(method));
                    let seeds = draw_seeds(method, n, k, dist2, Some((&gram, &sampler)), &mut rng)?;
                    let fit = lloyd_kernel(&gram, &seeds, cfg.max_iter)?;
                    f1_macro(&fit.assignments, gold, cfg.matching)
                })?;
                f1.push((method, summarize(&scores, "f1")?));
            }
        }
        _ => notes.push(format!("{}: no gold clusters, F1 rows omitted", input.name)),
    }

    Ok(MovieOutcome {
        name: input.name.clone(),
        n_scenes: n,
        rejected_headings: input.parsed.rejected.len(),
        gold_k,
        log_k: heuristic_k(n, Heuristic::Log),
        sqrt_k: heuristic_k(n, Heuristic::Sqrt),
        dpp_k: summarize(&dpp_k, "dpp_k")?,
        f1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::parse_screenplay;

    fn input(name: &str, text: &str, gold: Option<&[usize]>) -> ScreenplayInput {
        let mut parsed = parse_screenplay(text);
        if let Some(g) = gold {
            parsed.attach_gold(g).unwrap();
        }
        ScreenplayInput { name: name.into(), parsed }
    }

    fn cfg() -> ScreenplayConfig {
        ScreenplayConfig { protocol: RunProtocol { runs: 10, master_seed: 2, jobs: 1 }, ..ScreenplayConfig::default() }
    }

    #[test]
    fn disjoint_groups_are_recovered() {
        let text = "INT. RED BARN - DAY\nEXT. BLUE LAKE - NIGHT\nINT. RED BARN - NIGHT\nEXT. BLUE LAKE\n";
        let r = run_screenplay(&[input("toy", text, Some(&[0, 1, 0, 1]))], &cfg()).unwrap();
        let m = &r.movies[0];
        assert_eq!(m.gold_k, Some(2));
        assert_eq!(m.f1(SeedMethod::DppK).unwrap().mean, 1.0);
        assert!(r.correlations.is_none());
        assert!(r.to_table().to_tsv().contains("correlation row omitted"));
    }

    #[test]
    fn without_gold_only_k_is_reported() {
        let text = "INT. A\nINT. B\nINT. C\n";
        let r = run_screenplay(&[input("nogold", text, None)], &cfg()).unwrap();
        assert!(r.movies[0].f1.is_empty());
        assert!(r.notes.iter().any(|n| n.contains("F1 rows omitted")));
        let tsv = r.to_table().to_tsv();
        assert!(tsv.lines().last().unwrap().ends_with("NA\tNA"));
    }

    #[test]
    fn correlation_row_across_screenplays() {
        let a = input("a", "INT. A\nINT. B\nINT. A\n", Some(&[0, 1, 0]));
        let b = input("b", "INT. A\nINT. B\nINT. C\nINT. D\nINT. E\n", Some(&[0, 1, 2, 3, 4]));
        let c = input("c", "INT. A\nINT. A\n", Some(&[0, 0]));
        let r = run_screenplay(&[a, b, c], &cfg()).unwrap();
        let [n, _, _, dpp] = r.correlations.unwrap();
        assert!(n.unwrap() > 0.9);
        assert!(dpp.unwrap() > 0.9);
        assert!(r.to_table().to_tsv().contains("correlation_with_gold_k"));
    }

    #[test]
    fn too_few_headings_is_an_error() {
        assert!(run_screenplay(&[input("one", "INT. A\n", None)], &cfg()).is_err());
    }
}
