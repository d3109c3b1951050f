//! M2 edit files and the span arithmetic needed to build corrected sentences.

use std::io::BufRead;

use serde::Serialize;

use crate::error::{Error, Result};

/// A correction of the source tokens `start..end` (0-based, end exclusive).
///
/// `start == end` is a pure insertion before source token `start`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Edit {
    pub start: usize,
    pub end: usize,
    pub replacement: Vec<String>,
    /// The M2 type field, e.g. `R:VERB:SVA` or a NUCLE category.
    pub external_type: Option<String>,
    pub annotator: u32,
}

impl Edit {
    pub fn new(start: usize, end: usize, replacement: &[&str]) -> Self {
        Edit {
            start,
            end,
            replacement: replacement.iter().map(|s| s.to_string()).collect(),
            external_type: None,
            annotator: 0,
        }
    }

    pub fn with_type(mut self, external_type: &str) -> Self {
        self.external_type = Some(external_type.to_string());
        self
    }

    pub fn is_insertion(&self) -> bool {
        self.start == self.end
    }

    pub fn source_len(&self) -> usize {
        self.end - self.start
    }

    /// Whether two edits touch the same source material.
    ///
    /// Two spans collide when they share a token. An insertion at `p` collides
    /// with a non-empty span `[s, e)` when `s <= p <= e`, and with another
    /// insertion only at the same offset.
    pub fn collides_with(&self, other: &Edit) -> bool {
        match (self.is_insertion(), other.is_insertion()) {
            (false, false) => self.start < other.end && other.start < self.end,
            (true, true) => self.start == other.start,
            (true, false) => other.start <= self.start && self.start <= other.end,
            (false, true) => self.start <= other.start && other.start <= self.end,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EditedSentence {
    pub source_tokens: Vec<String>,
    /// Edits of every annotator, in file order.
    pub edits: Vec<Edit>,
}

impl EditedSentence {
    /// Keeps only the edits of one annotator.
    pub fn select_annotator(&self, annotator: u32) -> EditedSentence {
        EditedSentence {
            source_tokens: self.source_tokens.clone(),
            edits: self
                .edits
                .iter()
                .filter(|e| e.annotator == annotator)
                .cloned()
                .collect(),
        }
    }

    /// Annotator ids present in this sentence, ascending.
    pub fn annotators(&self) -> Vec<u32> {
        let mut ids: Vec<u32> = self.edits.iter().map(|e| e.annotator).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }
}

/// Location of each edit's replacement inside the corrected token sequence.
pub type SpanMap = Vec<(usize, usize)>;

const NOOP_TYPE: &str = "noop";

fn parse_annotation(line: &str, line_no: usize, sentence: usize, len: usize) -> Result<Option<Edit>> {
    let malformed = |reason: &str| Error::MalformedAnnotation {
        line: line_no,
        reason: reason.to_string(),
    };
    let fields: Vec<&str> = line.split("|||").collect();
    if fields.len() < 6 {
        return Err(malformed("expected 6 |||-separated fields"));
    }
    let mut span = fields[0]
        .strip_prefix("A ")
        .ok_or_else(|| malformed("annotation must start with 'A '"))?
        .split_whitespace();
    let (start, end) = match (span.next(), span.next(), span.next()) {
        (Some(s), Some(e), None) => (
            s.parse::<i64>().map_err(|_| malformed("non-integer start offset"))?,
            e.parse::<i64>().map_err(|_| malformed("non-integer end offset"))?,
        ),
        _ => return Err(malformed("span must be two offsets")),
    };
    let annotator: u32 = fields[5]
        .trim()
        .parse()
        .map_err(|_| malformed("non-integer annotator id"))?;
    let kind = fields[1];
    if kind == NOOP_TYPE || (start == -1 && end == -1) {
        return Ok(None);
    }
    if start < 0 || end < start || end as usize > len {
        return Err(Error::SpanOutOfBounds {
            sentence,
            start: start.max(0) as usize,
            end: end.max(0) as usize,
            len,
        });
    }
    let correction = fields[2].trim();
    let replacement: Vec<String> = if correction == "-NONE-" {
        Vec::new()
    } else {
        correction
            .split(' ')
            .filter(|t| !t.is_empty())
            .map(str::to_string)
            .collect()
    };
    let (start, end) = (start as usize, end as usize);
    if start == end && replacement.is_empty() {
        return Ok(None);
    }
    Ok(Some(Edit {
        start,
        end,
        replacement,
        external_type: Some(kind.to_string()),
        annotator,
    }))
}

/// Reads `S`/`A` blocks. Noop edits (type `noop` or span `-1 -1`) and empty
/// insertions are dropped.
pub fn read_m2<R: BufRead>(reader: R) -> Result<Vec<EditedSentence>> {
    let mut sentences: Vec<EditedSentence> = Vec::new();
    let mut open = false;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = i + 1;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            open = false;
            continue;
        }
        if line == "S" || line.starts_with("S ") {
            sentences.push(EditedSentence {
                source_tokens: line[1..].split_whitespace().map(str::to_string).collect(),
                edits: Vec::new(),
            });
            open = true;
        } else if line.starts_with('A') {
            if !open {
                return Err(Error::MalformedAnnotation {
                    line: line_no,
                    reason: "annotation outside of a sentence block".into(),
                });
            }
            let index = sentences.len() - 1;
            let sentence = &mut sentences[index];
            if let Some(edit) =
                parse_annotation(line, line_no, index, sentence.source_tokens.len())?
            {
                sentence.edits.push(edit);
            }
        } else {
            return Err(Error::MalformedAnnotation {
                line: line_no,
                reason: "line is neither S nor A".into(),
            });
        }
    }
    Ok(sentences)
}

pub fn parse_m2(text: &str) -> Result<Vec<EditedSentence>> {
    read_m2(text.as_bytes())
}

/// Merges colliding edits into non-overlapping ones, sorted by `(start, end)`.
///
/// A merged edit covers the union of its constituents' spans. Its replacement
/// walks that interval left to right: at each offset it emits insertions at
/// that offset (input order), then replacements of spans starting there,
/// then the source token itself unless some constituent span claims it.
/// The merged type is that of the widest constituent, leftmost on ties.
pub fn merge_overlapping(edits: &[Edit], source: &[String]) -> Vec<Edit> {
    let mut sorted: Vec<&Edit> = edits.iter().collect();
    sorted.sort_by_key(|e| (e.start, e.end));

    let mut groups: Vec<Vec<&Edit>> = Vec::new();
    for edit in sorted {
        match groups.last_mut() {
            Some(group) if group.iter().any(|g| g.collides_with(edit)) || covers(group, edit) => {
                group.push(edit)
            }
            _ => groups.push(vec![edit]),
        }
    }

    groups
        .into_iter()
        .map(|group| {
            if group.len() == 1 {
                group[0].clone()
            } else {
                splice_group(&group, source)
            }
        })
        .collect()
}

// A sorted edit that falls inside the running covering interval also joins the
// group even if it does not collide with any single member directly.
fn covers(group: &[&Edit], edit: &Edit) -> bool {
    let start = group[0].start;
    let end = group.iter().map(|e| e.end).max().unwrap();
    let probe = Edit {
        start,
        end,
        replacement: Vec::new(),
        external_type: None,
        annotator: 0,
    };
    probe.collides_with(edit)
}

fn splice_group(group: &[&Edit], source: &[String]) -> Edit {
    let start = group.iter().map(|e| e.start).min().unwrap();
    let end = group.iter().map(|e| e.end).max().unwrap();

    let mut replacement = Vec::new();
    for pos in start..=end {
        for e in group.iter().filter(|e| e.is_insertion() && e.start == pos) {
            replacement.extend(e.replacement.iter().cloned());
        }
        for e in group.iter().filter(|e| !e.is_insertion() && e.start == pos) {
            replacement.extend(e.replacement.iter().cloned());
        }
        if pos < end && !group.iter().any(|e| e.start <= pos && pos < e.end) {
            if let Some(tok) = source.get(pos) {
                replacement.push(tok.clone());
            }
        }
    }

    let widest = group
        .iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| {
            a.source_len()
                .cmp(&b.source_len())
                .then_with(|| b.start.cmp(&a.start))
                .then_with(|| ib.cmp(ia))
        })
        .map(|(_, e)| *e)
        .unwrap();

    Edit {
        start,
        end,
        replacement,
        external_type: widest.external_type.clone(),
        annotator: group[0].annotator,
    }
}

/// Applies sorted, non-overlapping edits to the source tokens.
///
/// Returns the corrected tokens and, for each edit, where its replacement
/// landed in them.
pub fn apply_edits(source: &[String], edits: &[Edit]) -> Result<(Vec<String>, SpanMap)> {
    for pair in edits.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if (a.start, a.end) > (b.start, b.end) || a.collides_with(b) {
            return Err(Error::OverlappingEdits {
                first: Box::new(a.clone()),
                second: Box::new(b.clone()),
            });
        }
    }
    if let Some(e) = edits.iter().find(|e| e.end > source.len() || e.start > e.end) {
        return Err(Error::SpanOutOfBounds {
            sentence: 0,
            start: e.start,
            end: e.end,
            len: source.len(),
        });
    }

    let mut corrected = Vec::with_capacity(source.len());
    let mut map = Vec::with_capacity(edits.len());
    let mut cursor = 0;
    for e in edits {
        corrected.extend(source[cursor..e.start].iter().cloned());
        let t_start = corrected.len();
        corrected.extend(e.replacement.iter().cloned());
        map.push((t_start, corrected.len()));
        cursor = e.end;
    }
    corrected.extend(source[cursor..].iter().cloned());
    Ok((corrected, map))
}
