//! Corpus statistics over classified edits and confusion matrices.

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;

use serde::Serialize;

use crate::classify::{
    classify, label_of, prepare_sentence, ClassifiedEdit, EditKind, Scheme, NONE_LABEL, UPOS_TAGS,
};
use crate::corpus::CorpusBundle;
use crate::error::{Error, Result};
use crate::matrix::{ConfusionMatrix, OTHER_LABEL};

/// Edits of the given kinds, minus any whose labels are excluded.
fn counted<'a>(
    edits: &'a [ClassifiedEdit],
    kinds: &'a [EditKind],
    exclude: &'a BTreeSet<String>,
) -> impl Iterator<Item = (Option<&'a str>, Option<&'a str>)> + 'a {
    edits.iter().filter_map(move |e| {
        let t = e.se_type.as_ref()?;
        if !kinds.contains(&t.kind) {
            return None;
        }
        let excluded = |l: &Option<String>| l.as_ref().is_some_and(|l| exclude.contains(l));
        if excluded(&t.source) || excluded(&t.target) {
            return None;
        }
        Some((t.source.as_deref(), t.target.as_deref()))
    })
}

fn check_schemes(scheme: &Scheme, edits: &[ClassifiedEdit]) -> Result<()> {
    match edits.iter().find(|e| e.scheme != *scheme) {
        Some(e) => Err(Error::MixedSchemes(scheme.to_string(), e.scheme.to_string())),
        None => Ok(()),
    }
}

/// Default label universe: canonical UPOS order, or the sorted observed labels.
fn default_universe<'a>(scheme: &Scheme, observed: impl Iterator<Item = &'a str>) -> Vec<String> {
    match scheme {
        Scheme::Upos => UPOS_TAGS.iter().map(|s| s.to_string()).collect(),
        _ => observed
            .filter(|l| *l != NONE_LABEL && *l != OTHER_LABEL)
            .map(str::to_string)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
    }
}

/// Tallies classified edits into a matrix, one count per selected edit.
///
/// Scheme-inapplicable edits are skipped.
pub fn build_matrix(
    scheme: &Scheme,
    edits: &[ClassifiedEdit],
    kinds: &[EditKind],
    exclude: &BTreeSet<String>,
) -> Result<ConfusionMatrix> {
    check_schemes(scheme, edits)?;
    let universe = default_universe(
        scheme,
        counted(edits, kinds, exclude).flat_map(|(s, t)| s.into_iter().chain(t)),
    );
    let mut m = ConfusionMatrix::new(scheme.clone(), &universe);
    for (s, t) in counted(edits, kinds, exclude) {
        m.increment(s, t);
    }
    Ok(m)
}

/// Like [`build_matrix`] but with a caller-chosen universe, so shards line up.
pub fn build_matrix_with_universe(
    scheme: &Scheme,
    universe: &[impl AsRef<str>],
    edits: &[ClassifiedEdit],
    kinds: &[EditKind],
    exclude: &BTreeSet<String>,
) -> Result<ConfusionMatrix> {
    check_schemes(scheme, edits)?;
    let mut m = ConfusionMatrix::new(scheme.clone(), universe);
    for (s, t) in counted(edits, kinds, exclude) {
        m.increment(s, t);
    }
    Ok(m)
}

/// Re-indexes a matrix onto another universe; labels missing from it move to `Other`.
pub fn with_universe(m: &ConfusionMatrix, universe: &[impl AsRef<str>]) -> ConfusionMatrix {
    let mut out = ConfusionMatrix::new(m.scheme().clone(), universe);
    let axis = m.axis();
    let none = m.labels().len();
    for (i, src) in axis.iter().enumerate() {
        for (j, tgt) in axis.iter().enumerate() {
            let n = m.cell(i, j);
            if n > 0 {
                let s = (i != none).then_some(*src);
                let t = (j != none).then_some(*tgt);
                out.add(s, t, n);
            }
        }
    }
    out
}

type Cell = (Option<String>, Option<String>);

fn levels_cells(
    index: usize,
    m2: &crate::edits::EditedSentence,
    src: &crate::conllu::ParsedSentence,
    cor: &crate::conllu::ParsedSentence,
    scheme: &Scheme,
    annotator: u32,
    kinds: &[EditKind],
) -> Result<Vec<Cell>> {
    let prepared = prepare_sentence(index, m2, src, cor, annotator)?;
    let mut cells = Vec::new();
    let mut covered = vec![false; src.len()];
    for (edit, &span) in prepared.edits.iter().zip(&prepared.target_spans) {
        covered[edit.start..edit.end].iter_mut().for_each(|c| *c = true);
        let c = classify(edit, src, cor, span, scheme).map_err(|e| match e {
            Error::FormMismatch { .. } => Error::AlignmentError {
                sentence: index,
                reason: e.to_string(),
            },
            other => other,
        })?;
        if let Some(t) = c.se_type {
            if kinds.contains(&t.kind) {
                cells.push((t.source, t.target));
            }
        }
    }
    for (tok, _) in src.tokens.iter().zip(&covered).filter(|(_, &c)| !c) {
        if let Some(l) = label_of(tok, scheme) {
            cells.push((Some(l.clone()), Some(l)));
        }
    }
    Ok(cells)
}

fn cells_matrix(scheme: &Scheme, mut cells: Vec<Cell>, exclude: &BTreeSet<String>) -> ConfusionMatrix {
    let excluded = |l: &Option<String>| l.as_ref().is_some_and(|l| exclude.contains(l));
    cells.retain(|(s, t)| !excluded(s) && !excluded(t));
    let universe = default_universe(
        scheme,
        cells
            .iter()
            .flat_map(|(s, t)| s.iter().chain(t.iter()).map(String::as_str)),
    );
    let mut m = ConfusionMatrix::new(scheme.clone(), &universe);
    for (s, t) in &cells {
        m.increment(s.as_deref(), t.as_deref());
    }
    m
}

/// Matrix of one bundle where every source token outside the merged edit
/// spans also counts once on the diagonal.
pub fn levels_matrix(
    bundle: &CorpusBundle,
    scheme: &Scheme,
    annotator: u32,
    kinds: &[EditKind],
    exclude: &BTreeSet<String>,
) -> Result<ConfusionMatrix> {
    let mut cells = Vec::new();
    for (i, (m2, (src, cor))) in bundle.sentences().enumerate() {
        cells.extend(levels_cells(i, m2, src, cor, scheme, annotator, kinds)?);
    }
    Ok(cells_matrix(scheme, cells, exclude))
}

/// Like [`levels_matrix`] but skips sentences that fail, returning their errors.
pub fn levels_matrix_lenient(
    bundle: &CorpusBundle,
    scheme: &Scheme,
    annotator: u32,
    kinds: &[EditKind],
    exclude: &BTreeSet<String>,
) -> (ConfusionMatrix, Vec<Error>) {
    let mut cells = Vec::new();
    let mut errors = Vec::new();
    for (i, (m2, (src, cor))) in bundle.sentences().enumerate() {
        match levels_cells(i, m2, src, cor, scheme, annotator, kinds) {
            Ok(c) => cells.extend(c),
            Err(e) => errors.push(e),
        }
    }
    (cells_matrix(scheme, cells, exclude), errors)
}

/// Share of each label's row that stayed on the diagonal.
///
/// Only universe labels are reported; `None` and `Other` rows and rows with
/// no counts are omitted.
pub fn unchanged_fraction(m: &ConfusionMatrix) -> Vec<(String, f64)> {
    m.labels()
        .iter()
        .enumerate()
        .filter_map(|(i, label)| {
            let total: u64 = m.row(i).iter().sum();
            (total > 0).then(|| (label.clone(), m.cell(i, i) as f64 / total as f64))
        })
        .collect()
}

/// Syntactic errors per source label: off-diagonal row sums, deletions included.
///
/// Rows cover the universe and `Other`; additions (the `None` row) have no
/// source label and are left out.
pub fn se_counts(m: &ConfusionMatrix) -> Vec<(String, u64)> {
    let axis = m.axis();
    let none = m.labels().len();
    axis.iter()
        .enumerate()
        .filter(|(i, _)| *i != none)
        .map(|(i, label)| {
            let row: u64 = m.row(i).iter().sum();
            (label.to_string(), row - m.cell(i, i))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecallRow {
    pub label: String,
    pub system: u64,
    pub gold: u64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecallBound {
    pub rows: Vec<RecallRow>,
    pub system_total: u64,
    pub gold_total: u64,
    pub overall: f64,
}

/// Upper bound on recall per source label: system SEs over gold SEs.
///
/// Labels without gold SEs are omitted, and the overall ratio sums over the
/// reported labels only. Ratios above 1 are returned as is.
pub fn recall_bound(system: &ConfusionMatrix, gold: &ConfusionMatrix) -> Result<RecallBound> {
    if system.scheme() != gold.scheme() {
        return Err(Error::MixedSchemes(
            system.scheme().to_string(),
            gold.scheme().to_string(),
        ));
    }
    let sys: BTreeMap<String, u64> = se_counts(system).into_iter().collect();
    let rows: Vec<RecallRow> = se_counts(gold)
        .into_iter()
        .filter(|(_, g)| *g > 0)
        .map(|(label, g)| {
            let s = sys.get(&label).copied().unwrap_or(0);
            RecallRow {
                ratio: s as f64 / g as f64,
                label,
                system: s,
                gold: g,
            }
        })
        .collect();
    let system_total: u64 = rows.iter().map(|r| r.system).sum();
    let gold_total: u64 = rows.iter().map(|r| r.gold).sum();
    let overall = if gold_total > 0 {
        system_total as f64 / gold_total as f64
    } else {
        f64::NAN
    };
    Ok(RecallBound {
        rows,
        system_total,
        gold_total,
        overall,
    })
}

/// Pearson's chi-squared over the non-empty rows and columns of a table,
/// with the numbers of such rows and columns.
pub fn chi_squared(table: &[Vec<u64>]) -> (f64, usize, usize) {
    let cols = table.iter().map(Vec::len).max().unwrap_or(0);
    let row_sums: Vec<f64> = table.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let col_sums: Vec<f64> = (0..cols)
        .map(|j| table.iter().map(|r| r.get(j).copied().unwrap_or(0)).sum::<u64>() as f64)
        .collect();
    let n: f64 = row_sums.iter().sum();
    let r = row_sums.iter().filter(|&&s| s > 0.0).count();
    let c = col_sums.iter().filter(|&&s| s > 0.0).count();
    if n == 0.0 {
        return (0.0, r, c);
    }
    let mut chi2 = 0.0;
    for (row, &rs) in table.iter().zip(&row_sums) {
        if rs == 0.0 {
            continue;
        }
        for (j, &cs) in col_sums.iter().enumerate() {
            if cs == 0.0 {
                continue;
            }
            let expected = rs * cs / n;
            let diff = row.get(j).copied().unwrap_or(0) as f64 - expected;
            chi2 += diff * diff / expected;
        }
    }
    (chi2, r, c)
}

/// Cramér's V of a contingency table, ignoring empty rows and columns.
pub fn cramers_v_table(table: &[Vec<u64>]) -> Result<f64> {
    let (chi2, r, c) = chi_squared(table);
    if r < 2 || c < 2 {
        return Err(Error::DegenerateTable { rows: r, cols: c });
    }
    let n: u64 = table.iter().flatten().sum();
    let k = (r.min(c) - 1) as f64;
    Ok((chi2 / (n as f64 * k)).sqrt().clamp(0.0, 1.0))
}

pub fn cramers_v(m: &ConfusionMatrix) -> Result<f64> {
    cramers_v_table(&m.to_rows())
}

/// Cross-tabulation of the SE types two schemes assign to the same edits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Contingency {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl Contingency {
    pub fn cramers_v(&self) -> Result<f64> {
        cramers_v_table(&self.counts)
    }
}

/// Pairs edits by (sentence, edit) index and counts type co-occurrences.
/// Edits that are scheme-inapplicable on either side are skipped.
pub fn scheme_contingency(a: &[ClassifiedEdit], b: &[ClassifiedEdit]) -> Contingency {
    let key = |e: &ClassifiedEdit| (e.sentence_index, e.edit_index);
    let b_types: BTreeMap<_, String> = b
        .iter()
        .filter_map(|e| Some((key(e), e.se_type.as_ref()?.to_string())))
        .collect();
    let mut pairs: BTreeMap<(String, String), u64> = BTreeMap::new();
    for e in a {
        if let (Some(t), Some(u)) = (&e.se_type, b_types.get(&key(e))) {
            *pairs.entry((t.to_string(), u.clone())).or_default() += 1;
        }
    }
    let rows: Vec<String> = pairs.keys().map(|(r, _)| r.clone()).collect::<BTreeSet<_>>().into_iter().collect();
    let cols: Vec<String> = pairs.keys().map(|(_, c)| c.clone()).collect::<BTreeSet<_>>().into_iter().collect();
    let counts = rows
        .iter()
        .map(|r| {
            cols.iter()
                .map(|c| pairs.get(&(r.clone(), c.clone())).copied().unwrap_or(0))
                .collect()
        })
        .collect();
    Contingency { rows, cols, counts }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Correlation {
    pub r: f64,
    /// Mean absolute difference between the aligned values.
    pub mean_abs_diff: f64,
    pub n: usize,
}

/// Product-moment correlation of two label-indexed vectors.
///
/// The vectors are aligned on the union of their labels, missing entries
/// counting as zero.
pub fn pearson(a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>) -> Result<Correlation> {
    let labels: BTreeSet<&String> = a.keys().chain(b.keys()).collect();
    let n = labels.len();
    if n < 2 {
        return Err(Error::ZeroVariance(format!("{n} label(s), need at least 2")));
    }
    let x: Vec<f64> = labels.iter().map(|l| a.get(*l).copied().unwrap_or(0.0)).collect();
    let y: Vec<f64> = labels.iter().map(|l| b.get(*l).copied().unwrap_or(0.0)).collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (mx, my) = (mean(&x), mean(&y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (xi, yi) in x.iter().zip(&y) {
        let (dx, dy) = (xi - mx, yi - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance("constant vector".into()));
    }
    let mean_abs_diff = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).sum::<f64>() / n as f64;
    Ok(Correlation {
        r: (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0),
        mean_abs_diff,
        n,
    })
}

/// What an SE type's frequency is divided by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Normalization {
    /// Tokens carrying the source label (the full row, diagonal included).
    PerToken,
    /// SEs with the source label (the off-diagonal row sum).
    PerSe,
}

/// Relative frequency of every off-diagonal type `source->target`, keyed by type.
pub fn type_frequencies(m: &ConfusionMatrix, norm: Normalization) -> BTreeMap<String, f64> {
    let axis = m.axis();
    let none = m.labels().len();
    let mut out = BTreeMap::new();
    for (i, src) in axis.iter().enumerate() {
        if i == none {
            continue;
        }
        let row_total: u64 = m.row(i).iter().sum();
        let denom = match norm {
            Normalization::PerToken => row_total,
            Normalization::PerSe => row_total - m.cell(i, i),
        };
        if denom == 0 {
            continue;
        }
        for (j, tgt) in axis.iter().enumerate() {
            if j != i {
                out.insert(format!("{src}->{tgt}"), m.cell(i, j) as f64 / denom as f64);
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistributionComparison {
    pub per_token: Correlation,
    pub per_se: Correlation,
}

/// Compares two type distributions (e.g. automatic vs manual parses) under
/// both normalizations.
pub fn compare_distributions(
    a: &ConfusionMatrix,
    b: &ConfusionMatrix,
) -> Result<DistributionComparison> {
    Ok(DistributionComparison {
        per_token: pearson(
            &type_frequencies(a, Normalization::PerToken),
            &type_frequencies(b, Normalization::PerToken),
        )?,
        per_se: pearson(
            &type_frequencies(a, Normalization::PerSe),
            &type_frequencies(b, Normalization::PerSe),
        )?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Entropy {
    /// Shannon entropy in nats.
    pub nats: f64,
    /// exp(nats): the number of equally likely types with the same entropy.
    pub effective: f64,
}

/// Entropy of a count distribution and its effective number of types.
///
/// Both are accumulated over distinct count values, with the effective
/// number taken as the product of `(N/c)^(m*c/N)`; this equals exp(H) and
/// is exact for uniform distributions.
pub fn entropy_effective(counts: impl IntoIterator<Item = u64>) -> Result<Entropy> {
    let mut groups: BTreeMap<u64, u64> = BTreeMap::new();
    for c in counts.into_iter().filter(|&c| c > 0) {
        *groups.entry(c).or_default() += 1;
    }
    let total: u64 = groups.iter().map(|(c, m)| c * m).sum();
    if total == 0 {
        return Err(Error::EmptyDistribution);
    }
    let n = total as f64;
    let mut nats = 0.0;
    let mut effective = 1.0;
    for (&c, &m) in &groups {
        let weight = (c * m) as f64 / n;
        let inv_p = n / c as f64;
        nats += weight * inv_p.ln();
        effective *= inv_p.powf(weight);
    }
    Ok(Entropy { nats, effective })
}

/// SE types among syntactic-error edits, e.g. `{"ADJ->ADV": 3}`.
pub fn se_type_counts<'a>(edits: impl IntoIterator<Item = &'a ClassifiedEdit>) -> BTreeMap<String, u64> {
    let mut out = BTreeMap::new();
    for e in edits {
        if let Some(t) = e.se_type.as_ref().filter(|t| t.is_syntactic_error()) {
            *out.entry(t.to_string()).or_default() += 1;
        }
    }
    out
}

/// SE type -> external type -> count.
pub type JointCounts = BTreeMap<String, BTreeMap<String, u64>>;

/// Joint counts of SE types and external (M2) types over syntactic errors.
pub fn joint_counts(edits: &[ClassifiedEdit]) -> JointCounts {
    let mut out = JointCounts::new();
    for e in edits {
        let (Some(t), Some(ext)) = (&e.se_type, &e.external_type) else {
            continue;
        };
        if t.is_syntactic_error() {
            *out.entry(t.to_string())
                .or_default()
                .entry(ext.clone())
                .or_default() += 1;
        }
    }
    out
}

/// Reads a joint table: external types across, SE types down.
pub fn read_joint_table<R: BufRead>(reader: R) -> Result<JointCounts> {
    let mut header: Option<Vec<String>> = None;
    let mut out = JointCounts::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cells: Vec<&str> = line.split('\t').map(str::trim).collect();
        let malformed = |reason: String| Error::MalformedMatrix { line: i + 1, reason };
        match &header {
            None => header = Some(cells[1..].iter().map(|s| s.to_string()).collect()),
            Some(cols) => {
                if cells.len() != cols.len() + 1 {
                    return Err(malformed(format!(
                        "expected {} cells, found {}",
                        cols.len() + 1,
                        cells.len()
                    )));
                }
                let row = out.entry(cells[0].to_string()).or_default();
                for (col, cell) in cols.iter().zip(&cells[1..]) {
                    let v: u64 = cell
                        .parse()
                        .map_err(|_| malformed(format!("bad count {cell:?}")))?;
                    if v > 0 {
                        *row.entry(col.clone()).or_default() += v;
                    }
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapRow {
    pub se_type: String,
    pub total: u64,
    /// Most frequent external type (lexicographically first on ties).
    pub argmax: String,
    pub max_frac: f64,
    pub top3_frac: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaxonomyOverlap {
    /// Rows with at least `min_count` instances, by descending `max_frac`.
    pub rows: Vec<OverlapRow>,
    pub min_count: u64,
    /// Unweighted means over the reported rows.
    pub mean_max_frac: Option<f64>,
    pub mean_top3_frac: Option<f64>,
    /// Means weighted by row totals (share of all reported instances).
    pub weighted_max_frac: Option<f64>,
    pub weighted_top3_frac: Option<f64>,
}

/// How concentrated each SE type is within the external taxonomy.
pub fn taxonomy_overlap(joint: &JointCounts, min_count: u64) -> TaxonomyOverlap {
    let mut rows = Vec::new();
    let (mut top1_sum, mut top3_sum, mut grand) = (0u64, 0u64, 0u64);
    for (se_type, externals) in joint {
        let mut sorted: Vec<(&String, u64)> = externals
            .iter()
            .map(|(k, &v)| (k, v))
            .filter(|(_, v)| *v > 0)
            .collect();
        let total: u64 = sorted.iter().map(|(_, v)| v).sum();
        if total == 0 || total < min_count {
            continue;
        }
        sorted.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        let top1 = sorted[0].1;
        let top3: u64 = sorted.iter().take(3).map(|(_, v)| v).sum();
        top1_sum += top1;
        top3_sum += top3;
        grand += total;
        rows.push(OverlapRow {
            se_type: se_type.clone(),
            total,
            argmax: sorted[0].0.clone(),
            max_frac: top1 as f64 / total as f64,
            top3_frac: top3 as f64 / total as f64,
        });
    }
    rows.sort_by(|a, b| {
        b.max_frac
            .total_cmp(&a.max_frac)
            .then_with(|| b.total.cmp(&a.total))
            .then_with(|| a.se_type.cmp(&b.se_type))
    });
    let k = rows.len() as f64;
    let mean = |f: fn(&OverlapRow) -> f64| (!rows.is_empty()).then(|| rows.iter().map(f).sum::<f64>() / k);
    TaxonomyOverlap {
        mean_max_frac: mean(|r| r.max_frac),
        mean_top3_frac: mean(|r| r.top3_frac),
        weighted_max_frac: (grand > 0).then(|| top1_sum as f64 / grand as f64),
        weighted_top3_frac: (grand > 0).then(|| top3_sum as f64 / grand as f64),
        rows,
        min_count,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelsRow {
    pub label: String,
    /// One entry per level; `None` where the label never occurs at that level.
    pub fractions: Vec<Option<f64>>,
    /// Mean over the sorting levels (NaN if the label is absent from all of them).
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelsTable {
    pub levels: Vec<String>,
    pub rows: Vec<LevelsRow>,
}

fn is_native(tag: &str) -> bool {
    tag.eq_ignore_ascii_case("n") || tag.eq_ignore_ascii_case("native")
}

/// Unchanged fractions per label and level.
///
/// Matrices sharing a tag are merged. Rows are sorted by ascending mean over
/// the learner levels (every level except one tagged `N`/`Native`; all levels
/// if that leaves none).
pub fn levels_table(columns: &[(String, ConfusionMatrix)]) -> Result<LevelsTable> {
    let mut levels: Vec<String> = Vec::new();
    let mut merged: Vec<ConfusionMatrix> = Vec::new();
    for (tag, m) in columns {
        match levels.iter().position(|l| l == tag) {
            Some(i) => {
                let universe = union_universe([&merged[i], m]);
                merged[i] = with_universe(&merged[i], &universe).merge(&with_universe(m, &universe))?;
            }
            None => {
                levels.push(tag.clone());
                merged.push(m.clone());
            }
        }
    }

    let fractions: Vec<BTreeMap<String, f64>> = merged
        .iter()
        .map(|m| unchanged_fraction(m).into_iter().collect())
        .collect();
    let mut labels: Vec<String> = Vec::new();
    for m in &merged {
        for (l, _) in unchanged_fraction(m) {
            if !labels.contains(&l) {
                labels.push(l);
            }
        }
    }
    let sort_cols: Vec<usize> = {
        let learners: Vec<usize> = (0..levels.len()).filter(|&i| !is_native(&levels[i])).collect();
        if learners.is_empty() {
            (0..levels.len()).collect()
        } else {
            learners
        }
    };
    let mut rows: Vec<LevelsRow> = labels
        .into_iter()
        .map(|label| {
            let fr: Vec<Option<f64>> = fractions.iter().map(|f| f.get(&label).copied()).collect();
            let vals: Vec<f64> = sort_cols.iter().filter_map(|&i| fr[i]).collect();
            let mean = if vals.is_empty() {
                f64::NAN
            } else {
                vals.iter().sum::<f64>() / vals.len() as f64
            };
            LevelsRow {
                label,
                fractions: fr,
                mean,
            }
        })
        .collect();
    rows.sort_by(|a, b| match (a.mean.is_nan(), b.mean.is_nan()) {
        (false, false) => a.mean.total_cmp(&b.mean),
        (x, y) => x.cmp(&y),
    });
    Ok(LevelsTable { levels, rows })
}

/// Labels of several matrices in first-seen order.
pub fn union_universe<'a>(ms: impl IntoIterator<Item = &'a ConfusionMatrix>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for m in ms {
        for l in m.labels() {
            if !out.contains(l) {
                out.push(l.clone());
            }
        }
    }
    out
}

/// Builds a levels-mode matrix per bundle and tabulates them by level tag.
pub fn levels_table_from_bundles(
    bundles: &[CorpusBundle],
    scheme: &Scheme,
    annotator: u32,
    kinds: &[EditKind],
    exclude: &BTreeSet<String>,
) -> Result<LevelsTable> {
    let mut columns = Vec::new();
    for (i, b) in bundles.iter().enumerate() {
        let tag = b.level_tag.clone().ok_or(Error::MissingLevelTag(i))?;
        columns.push((tag, levels_matrix(b, scheme, annotator, kinds, exclude)?));
    }
    if !matches!(scheme, Scheme::Upos) {
        let universe = {
            let mut all: Vec<String> = union_universe(columns.iter().map(|(_, m)| m));
            all.sort();
            all
        };
        for (_, m) in columns.iter_mut() {
            *m = with_universe(m, &universe);
        }
    }
    levels_table(&columns)
}
