use super::{ResultTable, SigmaRule};
use crate::dpp::{counterexample_bound, scan_counterexample, CounterexampleConfig, CounterexampleReport, DppSampler};
use crate::error::Result;
use crate::kernels::rbf_gram;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyConfig {
    pub sigma: f64,
    /// Half-separation D of the four-point configuration.
    pub big_d: f64,
    pub eps_grid: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { sigma: 1.0, big_d: 2.0, eps_grid: 1000 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub config: VerifyConfig,
    /// `sqrt(ln 6 / (4 sigma))`, which D must exceed.
    pub bound: f64,
    pub rows: Vec<CounterexampleReport<f64>>,
}

impl VerifyReport {
    /// Grid points where the farther candidate is preferred.
    pub fn witnesses(&self) -> impl Iterator<Item = &CounterexampleReport<f64>> {
        self.rows.iter().filter(|r| r.far_preferred)
    }

    /// Grid points where an inequality holds but one it implies does not.
    pub fn chain_violations(&self) -> usize {
        self.rows.iter().filter(|r| !r.chain_consistent()).count()
    }

    pub fn all_finite(&self) -> bool {
        self.rows.iter().all(CounterexampleReport::all_finite)
    }

    pub fn to_table(&self) -> ResultTable {
        let mut t = ResultTable::new(
            "verify",
            &["epsilon", "p_far", "p_mid", "far_preferred", "near_term_gap", "merge_tail_terms", "bound_far_term", "drop_cross_term"],
        );
        t.echo("family", "verify");
        t.echo("sigma", self.config.sigma);
        t.echo("bigd", self.config.big_d);
        t.echo("eps_grid", self.config.eps_grid);
        t.echo("bound", format!("{:.6}", self.bound));
        let first = self.witnesses().next().map(|r| r.epsilon);
        t.note(format!("witnesses = {} of {}", self.witnesses().count(), self.rows.len()));
        t.note(format!("first_witness_epsilon = {}", first.map_or("NA".into(), |e| format!("{e:.6}"))));
        t.note(format!("chain_violations = {}", self.chain_violations()));
        t.note(format!("all_finite = {}", self.all_finite()));
        for r in &self.rows {
            t.push(vec![
                r.epsilon.into(),
                r.p_far.into(),
                r.p_mid.into(),
                r.far_preferred.into(),
                r.near_term_gap.into(),
                r.merge_tail_terms.into(),
                r.bound_far_term.into(),
                r.drop_cross_term.into(),
            ]);
        }
        t
    }
}

/// Scans the counterexample configuration over an epsilon grid in (0, D).
pub fn run_verify(cfg: &VerifyConfig) -> Result<VerifyReport> {
    CounterexampleConfig { half_separation: cfg.big_d, sigma: cfg.sigma, epsilon: cfg.big_d / 2.0 }.validate()?;
    Ok(VerifyReport {
        config: *cfg,
        bound: counterexample_bound(cfg.sigma),
        rows: scan_counterexample(cfg.big_d, cfg.sigma, cfg.eps_grid)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagConfig {
    pub sigma: SigmaRule,
}

impl Default for DiagConfig {
    fn default() -> Self {
        Self { sigma: SigmaRule::Median }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagReport {
    pub config: DiagConfig,
    pub dataset: String,
    pub sigma: f64,
    /// Descending, clamped at zero.
    pub eigenvalues: Vec<f64>,
    pub expected_size: f64,
    pub size_std: f64,
    pub rank: usize,
}

impl DiagReport {
    pub fn to_table(&self) -> ResultTable {
        let mut t = ResultTable::new("dpp-diag", &["index", "eigenvalue", "inclusion_prob"]);
        t.echo("family", "dpp-diag");
        t.echo("dataset", &self.dataset);
        t.echo("n", self.eigenvalues.len());
        t.echo("sigma_rule", self.config.sigma);
        t.echo("sigma", format!("{:.6}", self.sigma));
        t.note(format!("expected_size = {:.6}", self.expected_size));
        t.note(format!("size_std = {:.6}", self.size_std));
        t.note(format!("rank = {}", self.rank));
        t.note(format!("trace = {:.6}", self.eigenvalues.iter().sum::<f64>()));
        for (i, &l) in self.eigenvalues.iter().enumerate() {
            t.push(vec![i.into(), l.into(), (l / (1.0 + l)).into()]);
        }
        t
    }
}

/// Eigen-spectrum and expected DPP sample size of the RBF Gram of `points`.
pub fn run_dpp_diag(name: &str, points: &[Vec<f64>], cfg: &DiagConfig) -> Result<DiagReport> {
    let sigma = cfg.sigma.resolve(points, None)?;
    let sampler = DppSampler::new(&rbf_gram(points, sigma)?)?;
    Ok(DiagReport {
        config: *cfg,
        dataset: name.to_string(),
        sigma,
        eigenvalues: sampler.eigenvalues().to_vec(),
        expected_size: sampler.expected_size(),
        size_std: sampler.size_variance().sqrt(),
        rank: sampler.rank(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn default_scan_finds_a_witness_and_no_violations() {
        let r = run_verify(&VerifyConfig::default()).unwrap();
        assert_eq!(r.rows.len(), 1000);
        assert!(r.witnesses().count() > 0);
        assert_eq!(r.chain_violations(), 0);
        assert!(r.all_finite());
        let tsv = r.to_table().to_tsv();
        assert!(tsv.contains("# chain_violations = 0"));
    }

    #[test]
    fn precondition_names_the_bound() {
        let err = run_verify(&VerifyConfig { big_d: 0.5, ..VerifyConfig::default() }).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
        assert!(err.to_string().contains("0.669"), "{err}");
    }

    #[test]
    fn diag_counts_duplicate_points_once() {
        let pts = vec![vec![0.0], vec![0.0], vec![1.0]];
        let r = run_dpp_diag("toy", &pts, &DiagConfig { sigma: SigmaRule::Fixed(1e6) }).unwrap();
        assert_eq!(r.rank, 2);
        assert!((r.expected_size - (2.0 / 3.0 + 0.5)).abs() < 1e-9);
        assert_eq!(r.to_table().rows.len(), 3);
    }
}
