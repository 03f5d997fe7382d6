use std::path::PathBuf;

use dppkm::datasets::{load_delimited, parse_gold_sidecar, parse_screenplay, DelimitedOptions, ParsedScreenplay};
use dppkm::experiments::{run_screenplay, RunProtocol, ScreenplayConfig, ScreenplayInput};

fn path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn screenplay(stem: &str) -> ParsedScreenplay {
    let mut parsed = parse_screenplay(&std::fs::read_to_string(path(&format!("{stem}.txt"))).unwrap());
    let gold_text = std::fs::read_to_string(path(&format!("{stem}.gold.tsv"))).unwrap();
    let gold = parse_gold_sidecar(&gold_text, parsed.scenes.len()).unwrap();
    parsed.attach_gold(&gold).unwrap();
    parsed
}

#[test]
fn iris_shape() {
    let opts = DelimitedOptions { label_column: Some(4), ..DelimitedOptions::default() };
    let d = load_delimited::<f64>(&path("iris.data"), &opts).unwrap();
    assert_eq!(d.len(), 150);
    assert_eq!(d.vectors().unwrap()[0].len(), 4);
    assert_eq!(d.gold_k(), Some(3));
    assert_eq!(d.label_names, ["Iris-setosa", "Iris-versicolor", "Iris-virginica"]);
}

#[test]
fn long_screenplay_has_137_boundaries() {
    let p = screenplay("many_scenes");
    assert_eq!(p.scenes.len(), 137);
    assert!(p.scenes.iter().all(|s| !s.location_tokens.is_empty()));
    let mut gold: Vec<usize> = p.scenes.iter().map(|s| s.gold_cluster.unwrap()).collect();
    gold.sort_unstable();
    gold.dedup();
    assert_eq!(gold.len(), 35);
    // prose mentioning INT mid-sentence is not a heading
    assert!(p.scenes.iter().all(|s| !s.raw_heading.starts_with("He ")));
}

#[test]
fn gold_clusters_agree_with_locations() {
    for stem in ["two_locations", "identical_headings", "many_scenes"] {
        let p = screenplay(stem);
        for a in &p.scenes {
            for b in &p.scenes {
                assert_eq!(
                    a.location_tokens == b.location_tokens,
                    a.gold_cluster == b.gold_cluster,
                    "{stem}: {:?} vs {:?}",
                    a.raw_heading,
                    b.raw_heading
                );
            }
        }
    }
}

#[test]
fn long_screenplay_recovered_at_gold_k() {
    let input = ScreenplayInput { name: "many_scenes".into(), parsed: screenplay("many_scenes") };
    let cfg = ScreenplayConfig { protocol: RunProtocol { runs: 4, master_seed: 11, jobs: 2 }, ..ScreenplayConfig::default() };
    let r = run_screenplay(&[input], &cfg).unwrap();
    let m = &r.movies[0];
    assert_eq!(m.gold_k, Some(35));
    assert!(m.dpp_k.mean > 10.0 && m.dpp_k.mean < 60.0, "{}", m.dpp_k.mean);
    assert!(m.f1(dppkm::clustering::SeedMethod::DppK).unwrap().mean > 0.9);
}
