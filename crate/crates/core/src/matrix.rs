//! Confusion matrices over (source label, target label) pairs.
//!
//! Rows are source labels, columns target labels. Besides the label
//! universe every matrix has a `None` row/column for the empty side of
//! additions and deletions and a trailing `Other` row/column that collects
//! labels outside the universe.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::BufRead;

use crate::classify::{Scheme, NONE_LABEL, UPOS_TAGS};
use crate::error::{Error, Result};

pub const OTHER_LABEL: &str = "Other";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    scheme: Scheme,
    labels: Vec<String>,
    // row-major, (labels.len() + 2)^2 cells: universe, None, Other
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    /// An all-zero matrix. Labels spelled `None` or `Other` and duplicates are ignored.
    pub fn new(scheme: Scheme, labels: &[impl AsRef<str>]) -> Self {
        let mut seen = HashSet::new();
        let labels: Vec<String> = labels
            .iter()
            .map(|l| l.as_ref().to_string())
            .filter(|l| l != NONE_LABEL && l != OTHER_LABEL && seen.insert(l.clone()))
            .collect();
        let side = labels.len() + 2;
        ConfusionMatrix {
            scheme,
            labels,
            counts: vec![0; side * side],
        }
    }

    /// Empty matrix with the canonical UPOS universe.
    pub fn upos() -> Self {
        ConfusionMatrix::new(Scheme::Upos, &UPOS_TAGS)
    }

    pub fn scheme(&self) -> &Scheme {
        &self.scheme
    }

    /// The label universe, without `None` and `Other`.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Every row/column name in order: universe, `None`, `Other`.
    pub fn axis(&self) -> Vec<&str> {
        self.labels
            .iter()
            .map(String::as_str)
            .chain([NONE_LABEL, OTHER_LABEL])
            .collect()
    }

    fn side(&self) -> usize {
        self.labels.len() + 2
    }

    fn none_index(&self) -> usize {
        self.labels.len()
    }

    fn other_index(&self) -> usize {
        self.labels.len() + 1
    }

    /// Axis position of a label; `None` is the empty side, unknown labels map to `Other`.
    pub fn index_of(&self, label: Option<&str>) -> usize {
        match label {
            None => self.none_index(),
            Some(NONE_LABEL) => self.none_index(),
            Some(l) => self
                .labels
                .iter()
                .position(|x| x == l)
                .unwrap_or(self.other_index()),
        }
    }

    pub fn add(&mut self, source: Option<&str>, target: Option<&str>, n: u64) {
        let (i, j) = (self.index_of(source), self.index_of(target));
        let side = self.side();
        self.counts[i * side + j] += n;
    }

    pub fn increment(&mut self, source: Option<&str>, target: Option<&str>) {
        self.add(source, target, 1);
    }

    /// Count of a cell; labels outside the universe read the `Other` bucket.
    pub fn get(&self, source: Option<&str>, target: Option<&str>) -> u64 {
        self.cell(self.index_of(source), self.index_of(target))
    }

    /// Count by axis positions (see [`ConfusionMatrix::axis`]).
    pub fn cell(&self, row: usize, col: usize) -> u64 {
        self.counts[row * self.side() + col]
    }

    pub fn row(&self, row: usize) -> &[u64] {
        let side = self.side();
        &self.counts[row * side..(row + 1) * side]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Rows as nested vectors in axis order.
    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.side()).map(|i| self.row(i).to_vec()).collect()
    }

    /// Cellwise sum. Both matrices must share scheme and label universe.
    pub fn merge(&self, other: &ConfusionMatrix) -> Result<ConfusionMatrix> {
        if self.scheme != other.scheme {
            return Err(Error::MixedSchemes(
                self.scheme.to_string(),
                other.scheme.to_string(),
            ));
        }
        if self.labels != other.labels {
            return Err(Error::UniverseMismatch);
        }
        let counts = self
            .counts
            .iter()
            .zip(&other.counts)
            .map(|(a, b)| a + b)
            .collect();
        Ok(ConfusionMatrix {
            scheme: self.scheme.clone(),
            labels: self.labels.clone(),
            counts,
        })
    }

    /// TSV with an empty top-left cell, target labels across and source labels down.
    pub fn to_tsv(&self) -> String {
        let axis = self.axis();
        let mut out = String::new();
        for label in &axis {
            out.push('\t');
            out.push_str(label);
        }
        out.push('\n');
        for (i, label) in axis.iter().enumerate() {
            out.push_str(label);
            for c in self.row(i) {
                let _ = write!(out, "\t{c}");
            }
            out.push('\n');
        }
        out
    }

    /// Reads the TSV layout written by [`ConfusionMatrix::to_tsv`].
    ///
    /// The file need not be square or carry `None`/`Other` rows; the universe
    /// is the header labels followed by any row labels missing from the header.
    pub fn read_tsv<R: BufRead>(reader: R, scheme: Scheme) -> Result<ConfusionMatrix> {
        let mut header: Option<Vec<String>> = None;
        let mut rows: Vec<(String, Vec<u64>)> = Vec::new();
        let mut seen_rows = HashSet::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let line_no = i + 1;
            let line = line.trim_end_matches(['\r', '\n']);
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cells: Vec<&str> = line.split('\t').map(str::trim).collect();
            let malformed = |reason: String| Error::MalformedMatrix {
                line: line_no,
                reason,
            };
            match &header {
                None => {
                    let cols: Vec<String> = cells[1..].iter().map(|s| s.to_string()).collect();
                    let mut uniq = HashSet::new();
                    if let Some(dup) = cols.iter().find(|c| !uniq.insert(c.as_str())) {
                        return Err(malformed(format!("duplicate column {dup:?}")));
                    }
                    header = Some(cols);
                }
                Some(cols) => {
                    if cells.len() != cols.len() + 1 {
                        return Err(malformed(format!(
                            "expected {} cells, found {}",
                            cols.len() + 1,
                            cells.len()
                        )));
                    }
                    let label = cells[0].to_string();
                    if !seen_rows.insert(label.clone()) {
                        return Err(malformed(format!("duplicate row {label:?}")));
                    }
                    let values = cells[1..]
                        .iter()
                        .map(|c| {
                            c.parse::<u64>()
                                .map_err(|_| malformed(format!("bad count {c:?}")))
                        })
                        .collect::<Result<Vec<u64>>>()?;
                    rows.push((label, values));
                }
            }
        }
        let cols = header.ok_or(Error::MalformedMatrix {
            line: 0,
            reason: "missing header".into(),
        })?;
        let universe: Vec<&str> = cols
            .iter()
            .map(String::as_str)
            .chain(rows.iter().map(|(l, _)| l.as_str()))
            .collect();
        let mut m = ConfusionMatrix::new(scheme, &universe);
        for (label, values) in &rows {
            for (col, &v) in cols.iter().zip(values) {
                if v > 0 {
                    m.add(Some(label), Some(col), v);
                }
            }
        }
        Ok(m)
    }

    pub fn from_tsv_str(text: &str, scheme: Scheme) -> Result<ConfusionMatrix> {
        ConfusionMatrix::read_tsv(text.as_bytes(), scheme)
    }
}
