use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use dppkm::clustering::SeedMethod;
use dppkm::datasets::{
    load_delimited, parse_gold_sidecar, parse_screenplay_with, DelimitedOptions, HeadingRules, LabeledDataset,
    DEFAULT_TIME_TAGS,
};
use dppkm::dpp::{sequential_sample, DppSampler};
use dppkm::experiments::{
    run_benchmark, run_dpp_diag, run_rng, run_screenplay, run_synthetic, run_verify, BenchmarkConfig, DiagConfig,
    ResultTable, RunProtocol, ScreenplayConfig, ScreenplayInput, SigmaRule, SyntheticConfig, VerifyConfig, VERSION,
};
use dppkm::kernels::rbf_gram;
use dppkm::metrics::Matching;
use dppkm::Error;

/// DPP-based k-means seeding experiments.
///
/// Every command writes a TSV table whose `#` header echoes the resolved
/// configuration. Exit status: 0 success, 1 runtime error, 2 usage error.
#[derive(Parser, Debug)]
#[command(name = "dppkm", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Missed clusters and auto-k on Gaussian grids.
    Synth(SynthArgs),
    /// F1 and k-means cost on a delimited benchmark dataset.
    Bench(BenchArgs),
    /// Scene-location clustering of screenplay headings.
    Screenplay(ScreenplayArgs),
    /// Scan the four-point configuration where the DPP prefers the farther point.
    Verify(VerifyArgs),
    /// Draw one sample from a DPP over a dataset and print the chosen indices.
    Sample(SampleArgs),
    /// Eigen-spectrum and expected DPP sample size of a dataset's RBF Gram.
    DppDiag(DiagArgs),
}

#[derive(Args, Debug)]
struct Protocol {
    /// Number of seeded runs.
    #[arg(long, default_value_t = 50)]
    runs: usize,
    /// Master seed; run r uses master + r.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads. Output does not depend on this.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    jobs: u32,
}

impl Protocol {
    fn resolve(&self) -> RunProtocol {
        RunProtocol { runs: self.runs, master_seed: self.seed, jobs: self.jobs as usize }
    }
}

#[derive(Args, Debug)]
struct Output {
    /// Write the table here instead of standard output.
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DataArgs {
    /// Delimited numeric data file.
    #[arg(long)]
    data: PathBuf,
    /// Zero-based column holding the class label.
    #[arg(long)]
    label_col: Option<usize>,
    /// Field delimiter, a single character (use `tab` for tabs).
    #[arg(long, default_value = ",", value_parser = parse_delimiter)]
    delimiter: u8,
    /// Treat the first row as a header.
    #[arg(long)]
    header: bool,
    /// z-score every feature column before clustering.
    #[arg(long)]
    standardize: bool,
}

impl DataArgs {
    fn load(&self) -> Result<LabeledDataset<f64>> {
        let opts = DelimitedOptions {
            delimiter: self.delimiter,
            label_column: self.label_col,
            has_header: self.header,
            standardize: self.standardize,
        };
        load_delimited(&self.data, &opts).with_context(|| format!("reading {}", self.data.display()))
    }

    fn echo(&self, t: &mut ResultTable) {
        t.echo("data", self.data.display());
        t.echo("label_col", self.label_col.map_or("none".to_string(), |c| c.to_string()));
        t.echo("delimiter", format!("{:?}", self.delimiter as char));
        t.echo("header", self.header);
        t.echo("standardize", self.standardize);
    }
}

fn parse_delimiter(s: &str) -> Result<u8, String> {
    match s {
        "tab" | "\\t" | "\t" => Ok(b'\t'),
        _ if s.len() == 1 && s.is_ascii() => Ok(s.as_bytes()[0]),
        _ => Err(format!("delimiter must be one ASCII character, got `{s}`")),
    }
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// Grid sides; each gives side² true clusters.
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6,10")]
    grids: Vec<usize>,
    /// Spacing between neighbouring grid centers.
    #[arg(long, default_value_t = 10.0)]
    sep: f64,
    /// Per-coordinate variance of each Gaussian.
    #[arg(long, default_value_t = 1.0)]
    var: f64,
    /// Points drawn per Gaussian.
    #[arg(long, default_value_t = 100)]
    points: usize,
    /// Seeding methods: rand, pp, dpp, dppk, seq.
    #[arg(long, value_delimiter = ',', default_value = "rand,pp,dpp,dppk")]
    methods: Vec<SeedMethod>,
    /// RBF bandwidth: `median`, `separation` (1 / (2 sep²)) or a number.
    #[arg(long, default_value = "separation")]
    sigma: SigmaRule,
    /// Lloyd iteration cap.
    #[arg(long, default_value_t = 300)]
    max_iter: usize,
    #[command(flatten)]
    protocol: Protocol,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Number of clusters; defaults to the number of gold classes.
    #[arg(long)]
    k: Option<usize>,
    /// Seeding methods: rand, pp, dpp, dppk, seq.
    #[arg(long, value_delimiter = ',', default_value = "pp,dpp,dppk")]
    methods: Vec<SeedMethod>,
    /// RBF bandwidth: `median` or a number.
    #[arg(long, default_value = "median")]
    sigma: SigmaRule,
    /// Cluster-to-class matching for F1: `best` or `hungarian`.
    #[arg(long, default_value = "best")]
    matching: Matching,
    /// Lloyd iteration cap.
    #[arg(long, default_value_t = 300)]
    max_iter: usize,
    #[command(flatten)]
    protocol: Protocol,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct ScreenplayArgs {
    /// Screenplay text file; repeat for several.
    #[arg(long, required = true)]
    input: Vec<PathBuf>,
    /// Gold sidecar (`scene<TAB>cluster`); give none or one per --input, in the same order.
    #[arg(long)]
    gold: Vec<PathBuf>,
    /// Longest contiguous word n-gram in the heading kernel.
    #[arg(long, default_value_t = 2)]
    ngram: usize,
    /// Time-of-day tags stripped from the end of headings.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_TIME_TAGS.map(String::from))]
    time_tags: Vec<String>,
    /// Methods scored by F1 at the gold k: rand, pp, dppk, seq.
    #[arg(long, value_delimiter = ',', default_value = "rand,pp,dppk")]
    methods: Vec<SeedMethod>,
    /// Cluster-to-class matching for F1: `best` or `hungarian`.
    #[arg(long, default_value = "best")]
    matching: Matching,
    /// Lloyd iteration cap.
    #[arg(long, default_value_t = 300)]
    max_iter: usize,
    #[command(flatten)]
    protocol: Protocol,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// RBF bandwidth of the configuration.
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Half-separation D of the outer pair; must exceed sqrt(ln 6 / (4 sigma)).
    #[arg(long, default_value_t = 2.0)]
    bigd: f64,
    /// Number of epsilon values scanned in (0, D).
    #[arg(long, default_value_t = 1000)]
    eps_grid: usize,
    #[command(flatten)]
    out: Output,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SampleMode {
    Dpp,
    Kdpp,
    Sequential,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Sampler to use.
    #[arg(long, value_enum, default_value_t = SampleMode::Dpp)]
    mode: SampleMode,
    /// Sample size for kdpp and sequential.
    #[arg(long)]
    k: Option<usize>,
    /// RBF bandwidth: `median` or a number.
    #[arg(long, default_value = "median")]
    sigma: SigmaRule,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct DiagArgs {
    #[command(flatten)]
    data: DataArgs,
    /// RBF bandwidth: `median` or a number.
    #[arg(long, default_value = "median")]
    sigma: SigmaRule,
    #[command(flatten)]
    out: Output,
}

/// Bad flag values found after parsing; reported with exit status 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn emit(table: &ResultTable, out: &Output) -> Result<()> {
    let text = table.to_tsv();
    match &out.output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn synth(a: &SynthArgs) -> Result<()> {
    let cfg = SyntheticConfig {
        grids: a.grids.clone(),
        separation: a.sep,
        variance: a.var,
        points_per: a.points,
        methods: a.methods.clone(),
        sigma: a.sigma,
        max_iter: a.max_iter,
        protocol: a.protocol.resolve(),
    };
    emit(&run_synthetic(&cfg)?.to_table(), &a.out)
}

fn bench(a: &BenchArgs) -> Result<()> {
    if a.k == Some(0) {
        return Err(usage("--k must be at least 1"));
    }
    let data = a.data.load()?;
    let cfg = BenchmarkConfig {
        k: a.k,
        methods: a.methods.clone(),
        sigma: a.sigma,
        matching: a.matching,
        max_iter: a.max_iter,
        protocol: a.protocol.resolve(),
    };
    let mut t = run_benchmark(&data, &cfg)?.to_table();
    a.data.echo(&mut t);
    emit(&t, &a.out)
}

fn screenplay(a: &ScreenplayArgs) -> Result<()> {
    if !a.gold.is_empty() && a.gold.len() != a.input.len() {
        return Err(usage(format!("got {} --gold files for {} --input files; give none or one each", a.gold.len(), a.input.len())));
    }
    let rules = HeadingRules::with_time_tags(&a.time_tags);
    let mut inputs = Vec::with_capacity(a.input.len());
    for (i, path) in a.input.iter().enumerate() {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut parsed = parse_screenplay_with(&text, &rules);
        if let Some(gold_path) = a.gold.get(i) {
            let gold_text = fs::read_to_string(gold_path).with_context(|| format!("reading {}", gold_path.display()))?;
            let gold = parse_gold_sidecar(&gold_text, parsed.scenes.len())
                .with_context(|| format!("gold sidecar {}", gold_path.display()))?;
            parsed.attach_gold(&gold)?;
        }
        inputs.push(ScreenplayInput { name: stem(path), parsed });
    }
    let cfg = ScreenplayConfig {
        ngram: a.ngram,
        methods: a.methods.clone(),
        matching: a.matching,
        max_iter: a.max_iter,
        protocol: a.protocol.resolve(),
    };
    let mut t = run_screenplay(&inputs, &cfg)?.to_table();
    t.echo("time_tags", a.time_tags.join(","));
    emit(&t, &a.out)
}

fn verify(a: &VerifyArgs) -> Result<()> {
    if a.eps_grid == 0 {
        return Err(usage("--eps-grid must be at least 1"));
    }
    let cfg = VerifyConfig { sigma: a.sigma, big_d: a.bigd, eps_grid: a.eps_grid };
    emit(&run_verify(&cfg)?.to_table(), &a.out)
}

fn sample(a: &SampleArgs) -> Result<()> {
    let k = match (a.mode, a.k) {
        (SampleMode::Dpp, _) => None,
        (_, Some(0)) => return Err(usage("--k must be at least 1")),
        (_, Some(k)) => Some(k),
        (mode, None) => return Err(usage(format!("--k is required for --mode {mode:?}").to_lowercase())),
    };
    let data = a.data.load()?;
    let points = data.vectors().context("sample needs vector data")?;
    let sigma = a.sigma.resolve(points, None)?;
    let gram = rbf_gram(points, sigma)?;
    let mut rng = run_rng(a.seed, 0, 0);
    let drawn = match (a.mode, k) {
        (SampleMode::Sequential, Some(k)) => sequential_sample(&gram, k, &mut rng)?,
        (SampleMode::Kdpp, Some(k)) => DppSampler::new(&gram)?.sample_k(k, &mut rng)?,
        _ => DppSampler::new(&gram)?.sample(&mut rng),
    };
    let mut t = ResultTable::new("sample", &["position", "index"]);
    t.echo("family", "sample");
    a.data.echo(&mut t);
    t.echo("n", points.len());
    t.echo("mode", format!("{:?}", a.mode).to_lowercase());
    t.echo("k", k.map_or("NA".to_string(), |k| k.to_string()));
    t.echo("sigma_rule", a.sigma);
    t.echo("sigma", format!("{sigma:.6}"));
    t.echo("seed", a.seed);
    t.note(format!("size = {}", drawn.len()));
    t.note(format!("indices = {}", drawn.indices().iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")));
    for (pos, &i) in drawn.order().iter().enumerate() {
        t.push(vec![pos.into(), i.into()]);
    }
    emit(&t, &a.out)
}

fn dpp_diag(a: &DiagArgs) -> Result<()> {
    let data = a.data.load()?;
    let points = data.vectors().context("dpp-diag needs vector data")?;
    let mut t = run_dpp_diag(&data.name, points, &DiagConfig { sigma: a.sigma })?.to_table();
    a.data.echo(&mut t);
    emit(&t, &a.out)
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<Usage>().is_some() {
        return 2;
    }
    match e.downcast_ref::<Error>() {
        Some(Error::InvalidArgument(_) | Error::Precondition(_)) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Synth(a) => synth(a),
        Command::Bench(a) => bench(a),
        Command::Screenplay(a) => screenplay(a),
        Command::Verify(a) => verify(a),
        Command::Sample(a) => sample(a),
        Command::DppDiag(a) => dpp_diag(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dppkm {VERSION}: error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use clap::CommandFactory;

    use super::*;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn delimiters() {
        assert_eq!(parse_delimiter(",").unwrap(), b',');
        assert_eq!(parse_delimiter("tab").unwrap(), b'\t');
        assert!(parse_delimiter(";;").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&usage("bad")), 2);
        assert_eq!(exit_code(&Error::Precondition("D".into()).into()), 2);
        assert_eq!(exit_code(&anyhow::Error::from(Error::Degenerate("x".into())).context("reading")), 1);
        assert_eq!(exit_code(&anyhow::anyhow!("other")), 1);
    }

    #[test]
    fn defaults_resolve() {
        let cli = Cli::try_parse_from(["dppkm", "synth"]).unwrap();
        let Command::Synth(a) = cli.command else { panic!("synth") };
        assert_eq!(a.grids, [2, 3, 4, 5, 6, 10]);
        assert_eq!(a.methods, [SeedMethod::Rand, SeedMethod::PlusPlus, SeedMethod::Dpp, SeedMethod::DppK]);
        assert_eq!(a.protocol.resolve(), RunProtocol::default());
    }
}
