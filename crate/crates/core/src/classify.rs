//! Syntactic error classification.
//!
//! Each side of an edit is summarized by a representative token: the span
//! token closest to the sentence root, leftmost among equally shallow ones.
//! The edit's type is the ordered pair of the two representatives' labels
//! under a [`Scheme`]; it is a syntactic error when the labels differ.
//! Empty source spans are additions and empty target spans are deletions.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::conllu::{ParsedSentence, Token};
use crate::corpus::CorpusBundle;
use crate::edits::{apply_edits, merge_overlapping, Edit, EditedSentence};
use crate::error::{Error, Result};

/// The closed UD part-of-speech inventory in the order used for reports.
pub const UPOS_TAGS: [&str; 17] = [
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM", "PART", "PRON", "PROPN",
    "PUNCT", "SCONJ", "SYM", "VERB", "X",
];

/// Literal used for an absent label (the empty side of an addition or deletion).
pub const NONE_LABEL: &str = "None";

/// Which token annotation a syntactic error type is built from.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Scheme {
    Upos,
    Deprel,
    /// A morphological feature, optionally restricted to one UPOS.
    Feature {
        name: String,
        pos_filter: Option<String>,
    },
}

impl Scheme {
    pub fn feature(name: &str, pos_filter: Option<&str>) -> Scheme {
        Scheme::Feature {
            name: name.to_string(),
            pos_filter: pos_filter.map(str::to_uppercase),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Upos => f.write_str("UPOS"),
            Scheme::Deprel => f.write_str("DEPREL"),
            Scheme::Feature {
                name,
                pos_filter: None,
            } => write!(f, "FEATURE:{name}"),
            Scheme::Feature {
                name,
                pos_filter: Some(pos),
            } => write!(f, "FEATURE:{name}:{pos}"),
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let head = parts.next().unwrap_or_default().to_ascii_lowercase();
        let rest: Vec<&str> = parts.collect();
        match (head.as_str(), rest.as_slice()) {
            ("upos", []) => Ok(Scheme::Upos),
            ("deprel", []) => Ok(Scheme::Deprel),
            ("feature", [name]) if !name.is_empty() => Ok(Scheme::feature(name, None)),
            ("feature", [name, pos]) if !name.is_empty() && !pos.is_empty() => {
                Ok(Scheme::feature(name, Some(pos)))
            }
            _ => Err(Error::InvalidScheme(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum EditKind {
    Addition,
    Deletion,
    Replacement,
}

impl EditKind {
    pub fn from_spans(source_len: usize, target_len: usize) -> EditKind {
        match (source_len, target_len) {
            (0, _) => EditKind::Addition,
            (_, 0) => EditKind::Deletion,
            _ => EditKind::Replacement,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EditKind::Addition => "Addition",
            EditKind::Deletion => "Deletion",
            EditKind::Replacement => "Replacement",
        }
    }

    /// Swaps additions and deletions, as when source and target trade places.
    pub fn reversed(self) -> EditKind {
        match self {
            EditKind::Addition => EditKind::Deletion,
            EditKind::Deletion => EditKind::Addition,
            EditKind::Replacement => EditKind::Replacement,
        }
    }
}

impl fmt::Display for EditKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EditKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "addition" | "add" => Ok(EditKind::Addition),
            "deletion" | "del" => Ok(EditKind::Deletion),
            "replacement" | "rep" => Ok(EditKind::Replacement),
            _ => Err(format!("unknown edit kind {s:?}")),
        }
    }
}

/// Ordered label pair; `None` stands for the empty side of an edit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SeType {
    pub source: Option<String>,
    pub target: Option<String>,
    pub kind: EditKind,
}

impl SeType {
    pub fn is_syntactic_error(&self) -> bool {
        self.source != self.target
    }

    pub fn reversed(&self) -> SeType {
        SeType {
            source: self.target.clone(),
            target: self.source.clone(),
            kind: self.kind.reversed(),
        }
    }

    pub fn source_str(&self) -> &str {
        self.source.as_deref().unwrap_or(NONE_LABEL)
    }

    pub fn target_str(&self) -> &str {
        self.target.as_deref().unwrap_or(NONE_LABEL)
    }
}

impl fmt::Display for SeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.source_str(), self.target_str())
    }
}

/// Representative token of one edit side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Representative {
    pub id: usize,
    /// Another span token shared the minimal depth.
    pub tied: bool,
}

/// Picks the span token of minimal depth in the whole sentence, leftmost on ties.
///
/// `start..end` are 0-based token offsets; the returned id is 1-based.
pub fn representative(start: usize, end: usize, sentence: &ParsedSentence) -> Result<Option<usize>> {
    Ok(representative_detail(start, end, sentence)?.map(|r| r.id))
}

pub fn representative_detail(
    start: usize,
    end: usize,
    sentence: &ParsedSentence,
) -> Result<Option<Representative>> {
    if start > end || end > sentence.len() {
        return Err(Error::SpanOutOfBounds {
            sentence: 0,
            start,
            end,
            len: sentence.len(),
        });
    }
    let mut best: Option<(usize, Representative)> = None;
    for id in start + 1..=end {
        let depth = sentence.depth(id)?;
        best = match best {
            Some((d, mut rep)) if d <= depth => {
                rep.tied |= d == depth;
                Some((d, rep))
            }
            _ => Some((depth, Representative { id, tied: false })),
        };
    }
    Ok(best.map(|(_, rep)| rep))
}

/// The label a token carries under `scheme`.
pub fn label_of(token: &Token, scheme: &Scheme) -> Option<String> {
    match scheme {
        Scheme::Upos => Some(token.upos.clone()),
        Scheme::Deprel => Some(token.deprel.clone()),
        Scheme::Feature { name, pos_filter } => {
            if pos_filter.as_deref().is_some_and(|pos| pos != token.upos) {
                return None;
            }
            token.feats.get(name).map(str::to_string)
        }
    }
}

/// Outcome of classifying one edit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub kind: EditKind,
    /// `None` when the scheme does not apply to this edit (feature schemes only).
    pub se_type: Option<SeType>,
    pub source_rep: Option<Representative>,
    pub target_rep: Option<Representative>,
}

/// Classifies one edit given both parses and the edit's span in the corrected sentence.
pub fn classify(
    edit: &Edit,
    src: &ParsedSentence,
    tgt: &ParsedSentence,
    tgt_span: (usize, usize),
    scheme: &Scheme,
) -> Result<Classification> {
    let (t_start, t_end) = tgt_span;
    if t_start > t_end || t_end > tgt.len() {
        return Err(Error::SpanOutOfBounds {
            sentence: 0,
            start: t_start,
            end: t_end,
            len: tgt.len(),
        });
    }
    let found: Vec<&str> = tgt.tokens[t_start..t_end]
        .iter()
        .map(|t| t.form.as_str())
        .collect();
    if found != edit.replacement {
        return Err(Error::FormMismatch {
            start: t_start,
            end: t_end,
            expected: edit.replacement.clone(),
            found: found.into_iter().map(str::to_string).collect(),
        });
    }

    let source_rep = representative_detail(edit.start, edit.end, src)?;
    let target_rep = representative_detail(t_start, t_end, tgt)?;
    let kind = EditKind::from_spans(edit.source_len(), t_end - t_start);
    let src_tok = source_rep.and_then(|r| src.token(r.id));
    let tgt_tok = target_rep.and_then(|r| tgt.token(r.id));

    let se_type = match scheme {
        Scheme::Feature { .. } => match (src_tok, tgt_tok) {
            (Some(s), Some(t)) if s.upos == t.upos => {
                match (label_of(s, scheme), label_of(t, scheme)) {
                    (Some(a), Some(b)) => Some(SeType {
                        source: Some(a),
                        target: Some(b),
                        kind,
                    }),
                    _ => None,
                }
            }
            _ => None,
        },
        _ => Some(SeType {
            source: src_tok.and_then(|t| label_of(t, scheme)),
            target: tgt_tok.and_then(|t| label_of(t, scheme)),
            kind,
        }),
    };

    Ok(Classification {
        kind,
        se_type,
        source_rep,
        target_rep,
    })
}

/// A classified edit located in its corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassifiedEdit {
    pub sentence_index: usize,
    pub edit_index: usize,
    pub scheme: Scheme,
    pub kind: EditKind,
    pub se_type: Option<SeType>,
    pub source_rep: Option<usize>,
    pub target_rep: Option<usize>,
    pub source_tied: bool,
    pub target_tied: bool,
    pub external_type: Option<String>,
}

impl ClassifiedEdit {
    pub fn is_syntactic_error(&self) -> bool {
        self.se_type.as_ref().is_some_and(SeType::is_syntactic_error)
    }

    /// The per-edit report columns.
    pub fn report_fields(&self) -> [String; 9] {
        let opt = |v: Option<usize>| v.map_or_else(|| "_".to_string(), |v| v.to_string());
        let (src, tgt) = match &self.se_type {
            Some(t) => (t.source_str().to_string(), t.target_str().to_string()),
            None => ("_".to_string(), "_".to_string()),
        };
        [
            self.sentence_index.to_string(),
            self.edit_index.to_string(),
            self.kind.to_string(),
            self.scheme.to_string(),
            src,
            tgt,
            opt(self.source_rep),
            opt(self.target_rep),
            self.external_type.clone().unwrap_or_else(|| "_".to_string()),
        ]
    }

    pub fn to_report_line(&self) -> String {
        self.report_fields().join("\t")
    }

    /// Parses a line produced by [`ClassifiedEdit::to_report_line`].
    ///
    /// Tie flags are not part of the report and come back as `false`.
    pub fn from_report_line(line: &str) -> std::result::Result<ClassifiedEdit, String> {
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 9 {
            return Err(format!("expected 9 columns, found {}", cols.len()));
        }
        let index = |s: &str| s.parse::<usize>().map_err(|_| format!("bad index {s:?}"));
        let rep = |s: &str| -> std::result::Result<Option<usize>, String> {
            if s == "_" {
                Ok(None)
            } else {
                index(s).map(Some)
            }
        };
        let label = |s: &str| (s != NONE_LABEL).then(|| s.to_string());
        let kind: EditKind = cols[2].parse()?;
        let scheme: Scheme = cols[3].parse().map_err(|e: Error| e.to_string())?;
        let se_type = if cols[4] == "_" && cols[5] == "_" {
            None
        } else {
            Some(SeType {
                source: label(cols[4]),
                target: label(cols[5]),
                kind,
            })
        };
        Ok(ClassifiedEdit {
            sentence_index: index(cols[0])?,
            edit_index: index(cols[1])?,
            scheme,
            kind,
            se_type,
            source_rep: rep(cols[6])?,
            target_rep: rep(cols[7])?,
            source_tied: false,
            target_tied: false,
            external_type: (cols[8] != "_").then(|| cols[8].to_string()),
        })
    }
}

/// One sentence after annotator selection, merging and alignment checks.
#[derive(Debug, Clone)]
pub struct PreparedSentence {
    pub edits: Vec<Edit>,
    pub target_spans: Vec<(usize, usize)>,
}

/// Selects the annotator, merges overlapping edits, and checks that both
/// parses agree with the M2 tokens and the corrected token sequence.
pub fn prepare_sentence(
    index: usize,
    sentence: &EditedSentence,
    src: &ParsedSentence,
    cor: &ParsedSentence,
    annotator: u32,
) -> Result<PreparedSentence> {
    if src.forms() != sentence.source_tokens {
        return Err(Error::AlignmentError {
            sentence: index,
            reason: "source parse forms differ from the M2 sentence".into(),
        });
    }
    let selected = sentence.select_annotator(annotator);
    let edits = merge_overlapping(&selected.edits, &selected.source_tokens);
    let (corrected, target_spans) = apply_edits(&selected.source_tokens, &edits)?;
    if cor.forms() != corrected {
        return Err(Error::AlignmentError {
            sentence: index,
            reason: format!(
                "corrected parse {:?} differs from the edited sentence {:?}",
                cor.forms().join(" "),
                corrected.join(" ")
            ),
        });
    }
    Ok(PreparedSentence {
        edits,
        target_spans,
    })
}

pub fn classify_sentence(
    index: usize,
    sentence: &EditedSentence,
    src: &ParsedSentence,
    cor: &ParsedSentence,
    scheme: &Scheme,
    annotator: u32,
) -> Result<Vec<ClassifiedEdit>> {
    let prepared = prepare_sentence(index, sentence, src, cor, annotator)?;
    prepared
        .edits
        .iter()
        .zip(&prepared.target_spans)
        .enumerate()
        .map(|(edit_index, (edit, &span))| {
            let c = classify(edit, src, cor, span, scheme).map_err(|e| match e {
                Error::FormMismatch { .. } => Error::AlignmentError {
                    sentence: index,
                    reason: e.to_string(),
                },
                other => other,
            })?;
            Ok(ClassifiedEdit {
                sentence_index: index,
                edit_index,
                scheme: scheme.clone(),
                kind: c.kind,
                se_type: c.se_type,
                source_rep: c.source_rep.map(|r| r.id),
                target_rep: c.target_rep.map(|r| r.id),
                source_tied: c.source_rep.is_some_and(|r| r.tied),
                target_tied: c.target_rep.is_some_and(|r| r.tied),
                external_type: edit.external_type.clone(),
            })
        })
        .collect()
}

/// Classifies every sentence of a bundle, stopping at the first failure.
pub fn classify_corpus(
    bundle: &CorpusBundle,
    scheme: &Scheme,
    annotator: u32,
) -> Result<Vec<ClassifiedEdit>> {
    let mut out = Vec::new();
    for (i, (m2, (src, cor))) in bundle.sentences().enumerate() {
        out.extend(classify_sentence(i, m2, src, cor, scheme, annotator)?);
    }
    Ok(out)
}

/// Like [`classify_corpus`] but keeps going past misaligned sentences,
/// returning their errors alongside the edits that could be classified.
pub fn classify_corpus_lenient(
    bundle: &CorpusBundle,
    scheme: &Scheme,
    annotator: u32,
) -> (Vec<ClassifiedEdit>, Vec<Error>) {
    let mut out = Vec::new();
    let mut errors = Vec::new();
    for (i, (m2, (src, cor))) in bundle.sentences().enumerate() {
        match classify_sentence(i, m2, src, cor, scheme, annotator) {
            Ok(edits) => out.extend(edits),
            Err(e) => errors.push(e),
        }
    }
    (out, errors)
}

/// Share of non-empty edit sides whose representative was chosen by the
/// leftmost tie-break.
pub fn tie_rate(edits: &[ClassifiedEdit]) -> Option<f64> {
    let mut sides = 0usize;
    let mut ties = 0usize;
    for e in edits {
        for (rep, tied) in [(e.source_rep, e.source_tied), (e.target_rep, e.target_tied)] {
            if rep.is_some() {
                sides += 1;
                ties += usize::from(tied);
            }
        }
    }
    (sides > 0).then(|| ties as f64 / sides as f64)
}
