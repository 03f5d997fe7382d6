use std::sync::LazyLock;

use regex::Regex;

use super::{Features, LabeledDataset};
use crate::error::{Error, Result};

pub const DEFAULT_TIME_TAGS: [&str; 9] =
    ["DAY", "NIGHT", "MORNING", "EVENING", "AFTERNOON", "DUSK", "DAWN", "LATER", "CONTINUOUS"];

// Optional scene number, then an interior/exterior marker. Combined forms
// come first so `INT./EXT.` is not read as `INT.` followed by `/EXT.`.
static MARKER: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?i)^\s*(?:\d+[A-Z]?[.)]?\s+)?(?P<marker>INT\.?\s*/\s*EXT\.?|EXT\.?\s*/\s*INT\.?|I\s*/\s*E\.?|INT\.|EXT\.|INT|EXT)(?P<rest>.*)$",
    )
    .expect("marker regex")
});

/// Time-of-day tags stripped from the end of headings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeadingRules {
    pub time_tags: Vec<String>,
}

impl Default for HeadingRules {
    fn default() -> Self {
        Self { time_tags: DEFAULT_TIME_TAGS.iter().map(|t| t.to_string()).collect() }
    }
}

impl HeadingRules {
    pub fn with_time_tags<I: IntoIterator<Item = S>, S: AsRef<str>>(tags: I) -> Self {
        Self { time_tags: tags.into_iter().map(|t| t.as_ref().trim().to_uppercase()).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SceneBoundary {
    pub scene_index: usize,
    /// 1-based line in the source text.
    pub line: usize,
    pub raw_heading: String,
    pub location_tokens: Vec<String>,
    pub gold_cluster: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RejectedHeading {
    pub line: usize,
    pub raw_heading: String,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParsedScreenplay {
    pub scenes: Vec<SceneBoundary>,
    pub rejected: Vec<RejectedHeading>,
}

impl ParsedScreenplay {
    /// Attaches gold cluster ids read from a sidecar.
    pub fn attach_gold(&mut self, gold: &[usize]) -> Result<()> {
        if gold.len() != self.scenes.len() {
            return Err(Error::DimensionMismatch {
                what: "gold scene clusters".into(),
                expected: self.scenes.len(),
                found: gold.len(),
            });
        }
        for (s, &g) in self.scenes.iter_mut().zip(gold) {
            s.gold_cluster = Some(g);
        }
        Ok(())
    }

    pub fn into_dataset<T>(self, name: &str) -> LabeledDataset<T> {
        let gold: Option<Vec<usize>> = self.scenes.iter().map(|s| s.gold_cluster).collect();
        LabeledDataset {
            name: name.to_string(),
            label_names: gold.as_ref().map_or_else(Vec::new, |g| {
                let k = g.iter().max().map_or(0, |m| m + 1);
                (0..k).map(|c| c.to_string()).collect()
            }),
            gold_labels: gold,
            features: Features::Tokens(self.scenes.into_iter().map(|s| s.location_tokens).collect()),
            true_centers: None,
            dropped_rows: 0,
        }
    }
}

fn is_marker_line(line: &str) -> Option<regex::Captures<'_>> {
    let caps = MARKER.captures(line)?;
    let marker = &caps["marker"];
    let rest = &caps["rest"];
    // bare INT / EXT must be followed by a separator, not glued to a word
    let glued = !marker.ends_with('.') && rest.starts_with(|c: char| c.is_alphanumeric());
    (!glued).then_some(caps)
}

/// Finds scene headings in document order.
pub fn parse_screenplay(text: &str) -> ParsedScreenplay {
    parse_screenplay_with(text, &HeadingRules::default())
}

pub fn parse_screenplay_with(text: &str, rules: &HeadingRules) -> ParsedScreenplay {
    let mut parsed = ParsedScreenplay::default();
    for (i, line) in text.lines().enumerate() {
        if is_marker_line(line).is_none() {
            continue;
        }
        let raw = line.trim().to_string();
        match normalize_heading_with(&raw, rules) {
            Ok(tokens) => parsed.scenes.push(SceneBoundary {
                scene_index: parsed.scenes.len(),
                line: i + 1,
                raw_heading: raw,
                location_tokens: tokens,
                gold_cluster: None,
            }),
            Err(e) => parsed.rejected.push(RejectedHeading { line: i + 1, raw_heading: raw, reason: e.to_string() }),
        }
    }
    parsed
}

/// Location tokens of a heading with the marker and trailing time tags removed.
pub fn normalize_heading(raw: &str) -> Result<Vec<String>> {
    normalize_heading_with(raw, &HeadingRules::default())
}

pub fn normalize_heading_with(raw: &str, rules: &HeadingRules) -> Result<Vec<String>> {
    let body = match is_marker_line(raw) {
        Some(caps) => caps.name("rest").map_or("", |m| m.as_str()),
        None => raw,
    };
    let upper = body.to_uppercase();
    let mut tokens: Vec<String> = upper
        .split(|c: char| c.is_whitespace() || c == '/' || c == '-' || c == '\u{2013}' || c == '\u{2014}')
        .map(|t| t.trim_matches(|c: char| !c.is_alphanumeric()).to_string())
        .filter(|t| !t.is_empty())
        .collect();
    while tokens.last().is_some_and(|t| rules.time_tags.contains(t)) {
        tokens.pop();
    }
    if tokens.is_empty() {
        return Err(Error::Degenerate(format!("heading `{}` has no location tokens", raw.trim())));
    }
    Ok(tokens)
}

/// Reads `scene_index<TAB>cluster_id` lines. Every scene in `0..n_scenes`
/// must appear exactly once.
pub fn parse_gold_sidecar(text: &str, n_scenes: usize) -> Result<Vec<usize>> {
    let mut gold = vec![None; n_scenes];
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split('\t');
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::Parse { line: line_no, message: "expected scene_index<TAB>cluster_id".into() });
        };
        let parse = |s: &str, what: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse { line: line_no, message: format!("{what} `{s}` is not a non-negative integer") })
        };
        let (scene, cluster) = (parse(a, "scene index")?, parse(b, "cluster id")?);
        let slot = gold.get_mut(scene).ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("unknown scene index {scene} (screenplay has {n_scenes} scenes)"),
        })?;
        if slot.replace(cluster).is_some() {
            return Err(Error::Parse { line: line_no, message: format!("scene index {scene} listed twice") });
        }
    }
    gold.iter()
        .enumerate()
        .map(|(s, g)| g.ok_or_else(|| Error::Parse { line: 0, message: format!("no gold cluster for scene {s}") }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_heading("INT. HOUSES OF HEALING - NIGHT").unwrap(), toks(&["HOUSES", "OF", "HEALING"]));
        assert_eq!(
            normalize_heading("EXT. PELENNOR FIELDS/MINAS TIRITH - DAY").unwrap(),
            toks(&["PELENNOR", "FIELDS", "MINAS", "TIRITH"])
        );
        assert_eq!(normalize_heading("INT. X").unwrap(), toks(&["X"]));
    }

    #[test]
    fn normalize_handles_combined_markers_and_case() {
        assert_eq!(normalize_heading("int./ext. car - moving - dusk").unwrap(), toks(&["CAR", "MOVING"]));
        assert_eq!(normalize_heading("I/E DOCKS").unwrap(), toks(&["DOCKS"]));
        assert_eq!(normalize_heading("12 EXT DOCKS -- LATER").unwrap(), toks(&["DOCKS"]));
        assert_eq!(normalize_heading("INT. ROOM (CONTINUOUS)").unwrap(), toks(&["ROOM"]));
    }

    #[test]
    fn only_trailing_tags_are_removed() {
        assert_eq!(normalize_heading("EXT. DAY CARE CENTER - NIGHT").unwrap(), toks(&["DAY", "CARE", "CENTER"]));
    }

    #[test]
    fn heading_with_only_tags_is_degenerate() {
        assert!(matches!(normalize_heading("INT. - NIGHT"), Err(Error::Degenerate(_))));
        assert!(normalize_heading("EXT.").is_err());
    }

    #[test]
    fn custom_time_tags() {
        let rules = HeadingRules::with_time_tags(["noon"]);
        assert_eq!(normalize_heading_with("INT. HALL - NOON", &rules).unwrap(), toks(&["HALL"]));
        assert_eq!(normalize_heading_with("INT. HALL - NIGHT", &rules).unwrap(), toks(&["HALL", "NIGHT"]));
    }

    #[test]
    fn parse_finds_boundaries_in_order() {
        let text = "FADE IN:\n\nINT. HOUSES OF HEALING - NIGHT\n\nHe walks INT the room.\nINTERIOR monologue.\n  3 EXT. DOCKS - DAY\nINT. - NIGHT\ni/e car\n";
        let p = parse_screenplay(text);
        let heads: Vec<&str> = p.scenes.iter().map(|s| s.raw_heading.as_str()).collect();
        assert_eq!(heads, vec!["INT. HOUSES OF HEALING - NIGHT", "3 EXT. DOCKS - DAY", "i/e car"]);
        assert_eq!(p.scenes.iter().map(|s| s.scene_index).collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(p.scenes[1].line, 7);
        assert_eq!(p.rejected.len(), 1);
        assert_eq!(p.rejected[0].line, 8);
    }

    #[test]
    fn no_headings_is_empty_not_an_error() {
        assert!(parse_screenplay("just prose\n").scenes.is_empty());
    }

    #[test]
    fn round_trip_preserves_count_and_order() {
        let headings = ["INT. A - DAY", "EXT. B", "INT./EXT. C D - NIGHT", "I/E E"];
        let text = headings.iter().map(|h| format!("{h}\n\nSome action.\n")).collect::<String>();
        let p = parse_screenplay(&text);
        assert_eq!(p.scenes.len(), headings.len());
        for (s, h) in p.scenes.iter().zip(headings) {
            assert_eq!(s.raw_heading, h);
            assert_eq!(s.location_tokens, normalize_heading(h).unwrap());
        }
    }

    #[test]
    fn gold_sidecar_rules() {
        assert_eq!(parse_gold_sidecar("# scene\tcluster\n0\t1\n2\t0\n1\t1\n", 3).unwrap(), vec![1, 1, 0]);
        assert!(matches!(parse_gold_sidecar("0\t1\n3\t0\n", 3), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_gold_sidecar("0\t1\n0\t0\n", 2), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_gold_sidecar("0\t1\n", 2), Err(Error::Parse { .. })));
        assert!(parse_gold_sidecar("0 1\n", 1).is_err());
    }

    #[test]
    fn dataset_from_parsed() {
        let mut p = parse_screenplay("INT. A\nEXT. B\n");
        p.attach_gold(&[0, 1]).unwrap();
        let d: LabeledDataset<f64> = p.into_dataset("fixture");
        assert_eq!(d.tokens().unwrap(), &[toks(&["A"]), toks(&["B"])]);
        assert_eq!(d.gold_k(), Some(2));
    }
}
