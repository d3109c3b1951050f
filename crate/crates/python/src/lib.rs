use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ::synerr::stats;
use ::synerr::{CorpusBundle, EditKind, Error};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io(io) => PyIOError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn scheme(s: &str) -> PyResult<::synerr::Scheme> {
    s.parse().map_err(py_err)
}

fn open(path: &PathBuf) -> PyResult<BufReader<File>> {
    Ok(BufReader::new(File::open(path)?))
}

/// One CoNLL-U token.
#[pyclass(frozen, get_all, skip_from_py_object, module = "synerr")]
#[derive(Clone)]
pub struct Token {
    id: usize,
    form: String,
    lemma: String,
    upos: String,
    xpos: String,
    feats: BTreeMap<String, String>,
    head: usize,
    deprel: String,
}

#[pymethods]
impl Token {
    fn __repr__(&self) -> String {
        format!("Token({}, {:?}, {}, head={}, {})", self.id, self.form, self.upos, self.head, self.deprel)
    }
}

impl From<&::synerr::Token> for Token {
    fn from(t: &::synerr::Token) -> Self {
        Token {
            id: t.id,
            form: t.form.clone(),
            lemma: t.lemma.clone(),
            upos: t.upos.clone(),
            xpos: t.xpos.clone(),
            feats: t.feats.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
            head: t.head,
            deprel: t.deprel.clone(),
        }
    }
}

/// A dependency-parsed sentence.
#[pyclass(frozen, module = "synerr")]
pub struct Sentence(::synerr::ParsedSentence);

#[pymethods]
impl Sentence {
    #[getter]
    fn tokens(&self) -> Vec<Token> {
        self.0.tokens.iter().map(Token::from).collect()
    }

    #[getter]
    fn forms(&self) -> Vec<String> {
        self.0.forms().into_iter().map(str::to_string).collect()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    /// Depth of a token; the root has depth 1.
    fn depth(&self, id: usize) -> PyResult<usize> {
        self.0.depth(id).map_err(py_err)
    }

    fn depths(&self) -> PyResult<Vec<usize>> {
        self.0.depths().map_err(py_err)
    }

    /// Tree violations as messages; empty for a well-formed tree.
    fn validate(&self) -> Vec<String> {
        self.0.validate().iter().map(ToString::to_string).collect()
    }

    fn is_valid(&self) -> bool {
        self.0.is_valid()
    }

    fn to_conllu(&self) -> String {
        self.0.to_conllu()
    }

    fn __repr__(&self) -> String {
        format!("Sentence({:?})", self.0.forms().join(" "))
    }
}

/// A token-span edit: replace `source[start:end]` with `replacement`.
#[pyclass(frozen, get_all, from_py_object, module = "synerr")]
#[derive(Clone)]
pub struct Edit {
    start: usize,
    end: usize,
    replacement: Vec<String>,
    external_type: Option<String>,
    annotator: u32,
}

#[pymethods]
impl Edit {
    #[new]
    #[pyo3(signature = (start, end, replacement, external_type=None, annotator=0))]
    fn new(start: usize, end: usize, replacement: Vec<String>, external_type: Option<String>, annotator: u32) -> Self {
        Edit {
            start,
            end,
            replacement,
            external_type,
            annotator,
        }
    }

    fn __repr__(&self) -> String {
        format!("Edit({}, {}, {:?}, {:?})", self.start, self.end, self.replacement, self.external_type)
    }

    fn __eq__(&self, other: &Edit) -> bool {
        self.to_core() == other.to_core()
    }
}

impl Edit {
    fn to_core(&self) -> ::synerr::Edit {
        ::synerr::Edit {
            start: self.start,
            end: self.end,
            replacement: self.replacement.clone(),
            external_type: self.external_type.clone(),
            annotator: self.annotator,
        }
    }
}

impl From<::synerr::Edit> for Edit {
    fn from(e: ::synerr::Edit) -> Self {
        Edit {
            start: e.start,
            end: e.end,
            replacement: e.replacement,
            external_type: e.external_type,
            annotator: e.annotator,
        }
    }
}

fn core_edits(edits: &[Edit]) -> Vec<::synerr::Edit> {
    edits.iter().map(Edit::to_core).collect()
}

/// An edit with its syntactic error type.
#[pyclass(frozen, from_py_object, module = "synerr")]
#[derive(Clone)]
pub struct ClassifiedEdit(::synerr::ClassifiedEdit);

#[pymethods]
impl ClassifiedEdit {
    #[getter]
    fn sentence(&self) -> usize {
        self.0.sentence_index
    }

    #[getter]
    fn edit(&self) -> usize {
        self.0.edit_index
    }

    #[getter]
    fn scheme(&self) -> String {
        self.0.scheme.to_string()
    }

    /// "Addition", "Deletion" or "Replacement".
    #[getter]
    fn kind(&self) -> &'static str {
        self.0.kind.as_str()
    }

    /// (source, target) labels, None for an empty side; None when the scheme does not apply.
    #[getter]
    fn se_type(&self) -> Option<(Option<String>, Option<String>)> {
        self.0.se_type.as_ref().map(|t| (t.source.clone(), t.target.clone()))
    }

    #[getter]
    fn source_rep(&self) -> Option<usize> {
        self.0.source_rep
    }

    #[getter]
    fn target_rep(&self) -> Option<usize> {
        self.0.target_rep
    }

    #[getter]
    fn external_type(&self) -> Option<String> {
        self.0.external_type.clone()
    }

    fn is_syntactic_error(&self) -> bool {
        self.0.is_syntactic_error()
    }

    fn to_report_line(&self) -> String {
        self.0.to_report_line()
    }

    fn __repr__(&self) -> String {
        format!("ClassifiedEdit({})", self.0.to_report_line())
    }
}

/// Source-by-target counts of syntactic error types.
#[pyclass(skip_from_py_object, module = "synerr")]
#[derive(Clone)]
pub struct ConfusionMatrix(::synerr::ConfusionMatrix);

#[pymethods]
impl ConfusionMatrix {
    #[new]
    #[pyo3(signature = (labels=None, scheme="upos"))]
    fn new(labels: Option<Vec<String>>, scheme: &str) -> PyResult<Self> {
        let scheme = self::scheme(scheme)?;
        Ok(ConfusionMatrix(match labels {
            Some(labels) => ::synerr::ConfusionMatrix::new(scheme, &labels),
            None => ::synerr::ConfusionMatrix::new(scheme, &::synerr::UPOS_TAGS),
        }))
    }

    #[staticmethod]
    #[pyo3(signature = (text, scheme="upos"))]
    fn from_tsv(text: &str, scheme: &str) -> PyResult<Self> {
        ::synerr::ConfusionMatrix::from_tsv_str(text, self::scheme(scheme)?)
            .map(ConfusionMatrix)
            .map_err(py_err)
    }

    #[staticmethod]
    #[pyo3(signature = (path, scheme="upos"))]
    fn read_tsv(path: PathBuf, scheme: &str) -> PyResult<Self> {
        ::synerr::ConfusionMatrix::read_tsv(open(&path)?, self::scheme(scheme)?)
            .map(ConfusionMatrix)
            .map_err(py_err)
    }

    fn to_tsv(&self) -> String {
        self.0.to_tsv()
    }

    /// Axis labels: the universe, then "None" and "Other".
    #[getter]
    fn labels(&self) -> Vec<String> {
        self.0.axis().into_iter().map(str::to_string).collect()
    }

    #[getter]
    fn scheme(&self) -> String {
        self.0.scheme().to_string()
    }

    fn get(&self, source: Option<&str>, target: Option<&str>) -> u64 {
        self.0.get(source, target)
    }

    #[pyo3(signature = (source, target, n=1))]
    fn add(&mut self, source: Option<&str>, target: Option<&str>, n: u64) {
        self.0.add(source, target, n)
    }

    fn total(&self) -> u64 {
        self.0.total()
    }

    fn to_rows(&self) -> Vec<Vec<u64>> {
        self.0.to_rows()
    }

    fn merge(&self, other: &ConfusionMatrix) -> PyResult<ConfusionMatrix> {
        self.0.merge(&other.0).map(ConfusionMatrix).map_err(py_err)
    }

    fn __add__(&self, other: &ConfusionMatrix) -> PyResult<ConfusionMatrix> {
        self.merge(other)
    }

    fn __eq__(&self, other: &ConfusionMatrix) -> bool {
        self.0 == other.0
    }

    /// Per source label, the share of its occurrences left unchanged.
    fn unchanged_fraction(&self) -> Vec<(String, f64)> {
        stats::unchanged_fraction(&self.0)
    }

    /// Off-diagonal row sums per source label.
    fn se_counts(&self) -> Vec<(String, u64)> {
        stats::se_counts(&self.0)
    }

    fn cramers_v(&self) -> PyResult<f64> {
        stats::cramers_v(&self.0).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("ConfusionMatrix({}, total={})", self.0.scheme(), self.0.total())
    }
}

#[pyfunction]
fn parse_conllu(text: &str) -> PyResult<Vec<Sentence>> {
    Ok(::synerr::parse_conllu(text).map_err(py_err)?.into_iter().map(Sentence).collect())
}

#[pyfunction]
fn read_conllu(path: PathBuf) -> PyResult<Vec<Sentence>> {
    Ok(::synerr::read_conllu(open(&path)?).map_err(py_err)?.into_iter().map(Sentence).collect())
}

fn m2_pairs(sentences: Vec<::synerr::EditedSentence>) -> Vec<(Vec<String>, Vec<Edit>)> {
    sentences
        .into_iter()
        .map(|s| (s.source_tokens, s.edits.into_iter().map(Edit::from).collect()))
        .collect()
}

/// M2 text as a list of (source tokens, edits) pairs.
#[pyfunction]
fn parse_m2(text: &str) -> PyResult<Vec<(Vec<String>, Vec<Edit>)>> {
    ::synerr::parse_m2(text).map(m2_pairs).map_err(py_err)
}

#[pyfunction]
fn read_m2(path: PathBuf) -> PyResult<Vec<(Vec<String>, Vec<Edit>)>> {
    ::synerr::read_m2(open(&path)?).map(m2_pairs).map_err(py_err)
}

#[pyfunction]
fn merge_overlapping(edits: Vec<Edit>, source: Vec<String>) -> Vec<Edit> {
    ::synerr::merge_overlapping(&core_edits(&edits), &source)
        .into_iter()
        .map(Edit::from)
        .collect()
}

/// Applies sorted, disjoint edits; returns the corrected tokens and each edit's target span.
#[pyfunction]
fn apply_edits(source: Vec<String>, edits: Vec<Edit>) -> PyResult<(Vec<String>, ::synerr::edits::SpanMap)> {
    ::synerr::apply_edits(&source, &core_edits(&edits)).map_err(py_err)
}

/// 1-based id of the shallowest token in `sentence[start:end]`, or None for an empty span.
#[pyfunction]
fn representative(start: usize, end: usize, sentence: &Sentence) -> PyResult<Option<usize>> {
    ::synerr::representative(start, end, &sentence.0).map_err(py_err)
}

fn classified(bundle: CorpusBundle, scheme: &str, annotator: u32) -> PyResult<Vec<ClassifiedEdit>> {
    let edits = ::synerr::classify_corpus(&bundle, &self::scheme(scheme)?, annotator).map_err(py_err)?;
    Ok(edits.into_iter().map(ClassifiedEdit).collect())
}

/// Classifies every edit of a corpus given as M2 and two CoNLL-U files.
#[pyfunction]
#[pyo3(signature = (m2, src_conllu, cor_conllu, scheme="upos", annotator=0))]
fn classify_corpus(
    m2: PathBuf,
    src_conllu: PathBuf,
    cor_conllu: PathBuf,
    scheme: &str,
    annotator: u32,
) -> PyResult<Vec<ClassifiedEdit>> {
    classified(CorpusBundle::load(&m2, &src_conllu, &cor_conllu).map_err(py_err)?, scheme, annotator)
}

/// Like `classify_corpus`, with the three inputs given as strings.
#[pyfunction]
#[pyo3(signature = (m2, src_conllu, cor_conllu, scheme="upos", annotator=0))]
fn classify_texts(
    m2: &str,
    src_conllu: &str,
    cor_conllu: &str,
    scheme: &str,
    annotator: u32,
) -> PyResult<Vec<ClassifiedEdit>> {
    classified(CorpusBundle::from_strs(m2, src_conllu, cor_conllu).map_err(py_err)?, scheme, annotator)
}

/// Tallies classified edits; `kinds` picks from "add", "del", "rep".
#[pyfunction]
#[pyo3(signature = (edits, scheme="upos", kinds=None, exclude_labels=None))]
fn build_matrix(
    edits: Vec<ClassifiedEdit>,
    scheme: &str,
    kinds: Option<Vec<String>>,
    exclude_labels: Option<BTreeSet<String>>,
) -> PyResult<ConfusionMatrix> {
    let kinds = match kinds {
        Some(k) => k.iter().map(|s| s.parse::<EditKind>()).collect::<Result<Vec<_>, _>>().map_err(PyValueError::new_err)?,
        None => vec![EditKind::Addition, EditKind::Deletion, EditKind::Replacement],
    };
    let edits: Vec<_> = edits.into_iter().map(|e| e.0).collect();
    stats::build_matrix(&self::scheme(scheme)?, &edits, &kinds, &exclude_labels.unwrap_or_default())
        .map(ConfusionMatrix)
        .map_err(py_err)
}

/// Recall bound per source label as a dict with "rows", "system_total", "gold_total", "overall".
#[pyfunction]
fn recall_bound<'py>(py: Python<'py>, system: &ConfusionMatrix, gold: &ConfusionMatrix) -> PyResult<Bound<'py, PyDict>> {
    let b = stats::recall_bound(&system.0, &gold.0).map_err(py_err)?;
    let rows: Vec<(String, u64, u64, f64)> = b.rows.into_iter().map(|r| (r.label, r.system, r.gold, r.ratio)).collect();
    let d = PyDict::new(py);
    d.set_item("rows", rows)?;
    d.set_item("system_total", b.system_total)?;
    d.set_item("gold_total", b.gold_total)?;
    d.set_item("overall", b.overall)?;
    Ok(d)
}

/// (entropy in nats, effective number of types).
#[pyfunction]
fn entropy_effective(counts: Vec<u64>) -> PyResult<(f64, f64)> {
    let e = stats::entropy_effective(counts).map_err(py_err)?;
    Ok((e.nats, e.effective))
}

/// (r, mean absolute difference, n) over the labels of `a`.
#[pyfunction]
fn pearson(a: BTreeMap<String, f64>, b: BTreeMap<String, f64>) -> PyResult<(f64, f64, usize)> {
    let c = stats::pearson(&a, &b).map_err(py_err)?;
    Ok((c.r, c.mean_abs_diff, c.n))
}

#[pyfunction]
fn cramers_v_table(table: Vec<Vec<u64>>) -> PyResult<f64> {
    stats::cramers_v_table(&table).map_err(py_err)
}

/// Overlap of SE types with an external taxonomy, from joint counts `{se_type: {external: n}}`.
#[pyfunction]
#[pyo3(signature = (joint, min_count=30))]
fn taxonomy_overlap<'py>(
    py: Python<'py>,
    joint: BTreeMap<String, BTreeMap<String, u64>>,
    min_count: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let t = stats::taxonomy_overlap(&joint, min_count);
    let rows: Vec<(String, u64, String, f64, f64)> = t
        .rows
        .into_iter()
        .map(|r| (r.se_type, r.total, r.argmax, r.max_frac, r.top3_frac))
        .collect();
    let d = PyDict::new(py);
    d.set_item("rows", rows)?;
    d.set_item("mean_max_frac", t.mean_max_frac)?;
    d.set_item("mean_top3_frac", t.mean_top3_frac)?;
    d.set_item("weighted_max_frac", t.weighted_max_frac)?;
    d.set_item("weighted_top3_frac", t.weighted_top3_frac)?;
    Ok(d)
}

#[pymodule(name = "synerr")]
mod synerr_py {
    #[pymodule_export]
    use super::{
        apply_edits, build_matrix, classify_corpus, classify_texts, cramers_v_table, entropy_effective,
        merge_overlapping, parse_conllu, parse_m2, pearson, read_conllu, read_m2, recall_bound,
        representative, taxonomy_overlap, ClassifiedEdit, ConfusionMatrix, Edit, Sentence, Token,
    };
}
