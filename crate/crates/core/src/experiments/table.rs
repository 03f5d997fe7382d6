use std::fmt::{self, Display};
use std::io::{self, Write};

use super::VERSION;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
    Flag(bool),
    Missing,
}

impl Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Real(v) if v.is_nan() => f.write_str("NA"),
            Cell::Real(v) => write!(f, "{v:.6}"),
            Cell::Text(s) => f.write_str(&sanitize(s)),
            Cell::Flag(b) => write!(f, "{b}"),
            Cell::Missing => f.write_str("NA"),
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Flag(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Missing, Into::into)
    }
}

fn sanitize(s: &str) -> String {
    s.replace(['\t', '\n', '\r'], " ")
}

/// A TSV table with a `#`-prefixed provenance header.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultTable {
    pub name: String,
    pub provenance: Vec<(String, String)>,
    pub notes: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl ResultTable {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            provenance: Vec::new(),
            notes: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn echo(&mut self, key: &str, value: impl Display) {
        self.provenance.push((key.to_string(), value.to_string()));
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn write_tsv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "# dppkm {VERSION} {}", self.name)?;
        for (k, v) in &self.provenance {
            writeln!(out, "# {k}={}", sanitize(v))?;
        }
        for n in &self.notes {
            writeln!(out, "# {}", sanitize(n))?;
        }
        writeln!(out, "{}", self.columns.join("\t"))?;
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::to_string).collect();
            writeln!(out, "{}", line.join("\t"))?;
        }
        Ok(())
    }

    pub fn to_tsv(&self) -> String {
        let mut buf = Vec::new();
        self.write_tsv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("tsv is utf-8")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_header_and_rows() {
        let mut t = ResultTable::new("demo", &["name", "value", "ok", "gap"]);
        t.echo("master_seed", 7);
        t.note("pearson=0.99");
        t.push(vec!["a\tb".into(), 0.5.into(), true.into(), Option::<f64>::None.into()]);
        t.push(vec!["c".into(), Cell::Int(3), false.into(), f64::NAN.into()]);
        let tsv = t.to_tsv();
        let expected = format!(
            "# dppkm {VERSION} demo\n# master_seed=7\n# pearson=0.99\nname\tvalue\tok\tgap\na b\t0.500000\ttrue\tNA\nc\t3\tfalse\tNA\n"
        );
        assert_eq!(tsv, expected);
        assert_eq!(t.column("ok"), Some(2));
    }

    #[test]
    #[should_panic(expected = "row width")]
    fn ragged_rows_are_a_bug() {
        ResultTable::new("x", &["a"]).push(vec![]);
    }
}
