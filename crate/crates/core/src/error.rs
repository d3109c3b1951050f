use std::io;

use crate::edits::Edit;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("malformed CoNLL-U line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },

    #[error("cycle detected while walking heads from token {id}")]
    CycleDetected { id: usize },

    #[error("token {id} is not part of the sentence (length {len})")]
    InvalidTokenId { id: usize, len: usize },

    #[error("token {id} points to a head that does not exist ({head})")]
    DanglingHead { id: usize, head: usize },

    #[error("malformed M2 annotation on line {line}: {reason}")]
    MalformedAnnotation { line: usize, reason: String },

    #[error("edit {start}..{end} of sentence {sentence} exceeds sentence length {len}")]
    SpanOutOfBounds {
        sentence: usize,
        start: usize,
        end: usize,
        len: usize,
    },

    #[error("edits must be sorted and non-overlapping, found {first:?} before {second:?}")]
    OverlappingEdits { first: Box<Edit>, second: Box<Edit> },

    #[error("corrected span {start}..{end} has forms {found:?}, expected {expected:?}")]
    FormMismatch {
        start: usize,
        end: usize,
        expected: Vec<String>,
        found: Vec<String>,
    },

    #[error("sentence {sentence} is misaligned: {reason}")]
    AlignmentError { sentence: usize, reason: String },

    #[error("corpus parts differ in length: {m2} M2 sentences, {source_parses} source parses, {corrected_parses} corrected parses")]
    BundleLengthMismatch {
        m2: usize,
        source_parses: usize,
        corrected_parses: usize,
    },

    #[error("cannot combine data from schemes {0} and {1}")]
    MixedSchemes(String, String),

    #[error("matrices have different label universes")]
    UniverseMismatch,

    #[error("contingency table needs at least two non-empty rows and columns, got {rows}x{cols}")]
    DegenerateTable { rows: usize, cols: usize },

    #[error("correlation undefined: {0}")]
    ZeroVariance(String),

    #[error("distribution has no mass")]
    EmptyDistribution,

    #[error("corpus bundle {0} has no level tag")]
    MissingLevelTag(usize),

    #[error("malformed matrix line {line}: {reason}")]
    MalformedMatrix { line: usize, reason: String },

    #[error("invalid scheme {0:?}, expected upos, deprel or feature:<Name>[:<UPOS>]")]
    InvalidScheme(String),
}
