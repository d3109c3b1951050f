//! Syntactic error types for grammatical error correction.
//!
//! Edits from M2 files are aligned with Universal Dependencies parses of the
//! source and corrected sentences and typed by the labels of their
//! representative tokens. The [`stats`] module turns the typed edits into
//! confusion matrices and corpus statistics.

pub mod classify;
pub mod cli;
pub mod conllu;
pub mod corpus;
pub mod edits;
pub mod error;
pub mod matrix;
pub mod stats;

pub use classify::{
    classify, classify_corpus, classify_corpus_lenient, representative, ClassifiedEdit, EditKind,
    Scheme, SeType, NONE_LABEL, UPOS_TAGS,
};
pub use conllu::{parse_conllu, read_conllu, write_conllu, Features, ParsedSentence, Token};
pub use corpus::CorpusBundle;
pub use edits::{apply_edits, merge_overlapping, parse_m2, read_m2, Edit, EditedSentence};
pub use error::{Error, Result};
pub use matrix::{ConfusionMatrix, OTHER_LABEL};
