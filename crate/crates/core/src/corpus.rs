use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use crate::conllu::{read_conllu, ParsedSentence};
use crate::edits::{read_m2, EditedSentence};
use crate::error::{Error, Result};

/// M2 edits with the parses of their source and corrected sentences,
/// aligned by position.
#[derive(Debug, Clone, Default)]
pub struct CorpusBundle {
    pub m2: Vec<EditedSentence>,
    pub source_parses: Vec<ParsedSentence>,
    pub corrected_parses: Vec<ParsedSentence>,
    /// Proficiency level, e.g. "A", "B", "C" or "N".
    pub level_tag: Option<String>,
}

impl CorpusBundle {
    pub fn new(
        m2: Vec<EditedSentence>,
        source_parses: Vec<ParsedSentence>,
        corrected_parses: Vec<ParsedSentence>,
    ) -> Result<Self> {
        if m2.len() != source_parses.len() || m2.len() != corrected_parses.len() {
            return Err(Error::BundleLengthMismatch {
                m2: m2.len(),
                source_parses: source_parses.len(),
                corrected_parses: corrected_parses.len(),
            });
        }
        Ok(CorpusBundle {
            m2,
            source_parses,
            corrected_parses,
            level_tag: None,
        })
    }

    pub fn with_level(mut self, tag: impl Into<String>) -> Self {
        self.level_tag = Some(tag.into());
        self
    }

    pub fn from_strs(m2: &str, source: &str, corrected: &str) -> Result<Self> {
        CorpusBundle::new(
            read_m2(m2.as_bytes())?,
            read_conllu(source.as_bytes())?,
            read_conllu(corrected.as_bytes())?,
        )
    }

    pub fn load(m2: &Path, source: &Path, corrected: &Path) -> Result<Self> {
        CorpusBundle::new(
            read_m2(BufReader::new(File::open(m2)?))?,
            read_conllu(BufReader::new(File::open(source)?))?,
            read_conllu(BufReader::new(File::open(corrected)?))?,
        )
    }

    pub fn len(&self) -> usize {
        self.m2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m2.is_empty()
    }

    pub fn sentences(
        &self,
    ) -> impl Iterator<Item = (&EditedSentence, (&ParsedSentence, &ParsedSentence))> {
        self.m2
            .iter()
            .zip(self.source_parses.iter().zip(&self.corrected_parses))
    }
}
