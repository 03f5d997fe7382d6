//! Synthetic Gaussian grids, delimited numeric files and screenplay headings.

mod delimited;
mod screenplay;
mod synth;

pub use delimited::{load_delimited, parse_delimited, DelimitedOptions};
pub use screenplay::{
    normalize_heading, normalize_heading_with, parse_gold_sidecar, parse_screenplay, parse_screenplay_with, HeadingRules, ParsedScreenplay, RejectedHeading,
    SceneBoundary, DEFAULT_TIME_TAGS,
};
pub use synth::{synth_gaussian_grid, write_synthetic_tsv, GridSpec};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Features<T> {
    Vectors(Vec<Vec<T>>),
    Tokens(Vec<Vec<String>>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset<T> {
    pub name: String,
    pub features: Features<T>,
    pub gold_labels: Option<Vec<usize>>,
    /// Original label strings, indexed by dense label id.
    pub label_names: Vec<String>,
    /// Generating centers; synthetic data only.
    pub true_centers: Option<Vec<Vec<T>>>,
    /// Rows skipped while loading because of missing values.
    pub dropped_rows: usize,
}

impl<T> LabeledDataset<T> {
    pub fn len(&self) -> usize {
        match &self.features {
            Features::Vectors(v) => v.len(),
            Features::Tokens(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn vectors(&self) -> Option<&[Vec<T>]> {
        match &self.features {
            Features::Vectors(v) => Some(v),
            Features::Tokens(_) => None,
        }
    }

    pub fn tokens(&self) -> Option<&[Vec<String>]> {
        match &self.features {
            Features::Tokens(t) => Some(t),
            Features::Vectors(_) => None,
        }
    }

    /// Gold labels, or an error naming the dataset when it has none.
    pub fn require_gold(&self) -> Result<&[usize]> {
        self.gold_labels
            .as_deref()
            .ok_or_else(|| Error::MissingLabels(self.name.clone()))
    }

    /// Number of distinct gold classes.
    pub fn gold_k(&self) -> Option<usize> {
        self.gold_labels.as_ref().map(|g| {
            let mut seen: Vec<usize> = g.clone();
            seen.sort_unstable();
            seen.dedup();
            seen.len()
        })
    }
}
