//! Reading and writing CoNLL-U, plus the dependency-tree queries the
//! classifier needs (token depth and well-formedness checks).
//!
//! Multiword-token range lines (`1-2`) and empty nodes (`3.1`) are skipped
//! on read, so every retained token keeps the integer id it had in the file.

use std::fmt;
use std::io::BufRead;

use serde::Serialize;

use crate::error::{Error, Result};

/// Morphological features of a token, kept sorted case-insensitively by name.
///
/// Values are stored verbatim, so multi-valued features such as
/// `Gender=Masc,Fem` compare as the raw string `"Masc,Fem"`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Features(Vec<(String, String)>);

impl Features {
    pub fn new() -> Self {
        Features(Vec::new())
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.0
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_str())
    }

    /// Sets a feature, replacing any previous value with the same name.
    pub fn insert(&mut self, name: impl Into<String>, value: impl Into<String>) {
        let name = name.into();
        let value = value.into();
        if let Some(slot) = self.0.iter_mut().find(|(n, _)| *n == name) {
            slot.1 = value;
            return;
        }
        let pos = self
            .0
            .iter()
            .position(|(n, _)| feature_order(n, &name) == std::cmp::Ordering::Greater)
            .unwrap_or(self.0.len());
        self.0.insert(pos, (name, value));
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(n, v)| (n.as_str(), v.as_str()))
    }

    fn parse(field: &str) -> std::result::Result<Self, String> {
        let mut feats = Features::new();
        if field == "_" {
            return Ok(feats);
        }
        for item in field.split('|') {
            match item.split_once('=') {
                Some((name, value)) if !name.is_empty() && !value.is_empty() => {
                    feats.insert(name, value)
                }
                _ => return Err(format!("bad feature {item:?}")),
            }
        }
        Ok(feats)
    }
}

fn feature_order(a: &str, b: &str) -> std::cmp::Ordering {
    a.to_lowercase()
        .cmp(&b.to_lowercase())
        .then_with(|| a.cmp(b))
}

impl fmt::Display for Features {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("_");
        }
        for (i, (name, value)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            write!(f, "{name}={value}")?;
        }
        Ok(())
    }
}

/// One syntactic word of a CoNLL-U sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Token {
    /// 1-based position in the sentence.
    pub id: usize,
    pub form: String,
    pub lemma: String,
    pub upos: String,
    pub xpos: String,
    pub feats: Features,
    /// Id of the governing token, 0 for the sentence root.
    pub head: usize,
    pub deprel: String,
    pub deps: String,
    pub misc: String,
}

impl Token {
    /// A token with only the fields the classifier looks at filled in.
    pub fn new(id: usize, form: &str, upos: &str, head: usize, deprel: &str) -> Self {
        Token {
            id,
            form: form.to_string(),
            lemma: "_".to_string(),
            upos: upos.to_string(),
            xpos: "_".to_string(),
            feats: Features::new(),
            head,
            deprel: deprel.to_string(),
            deps: "_".to_string(),
            misc: "_".to_string(),
        }
    }

    fn parse(line: &str, line_no: usize) -> Result<Option<Token>> {
        let malformed = |reason: String| Error::MalformedLine {
            line: line_no,
            reason,
        };
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(malformed(format!("expected 10 columns, found {}", cols.len())));
        }
        if cols[0].contains('-') || cols[0].contains('.') {
            return Ok(None);
        }
        let id: usize = cols[0]
            .parse()
            .map_err(|_| malformed(format!("non-integer ID {:?}", cols[0])))?;
        if id == 0 {
            return Err(malformed("ID must be at least 1".into()));
        }
        let head: usize = cols[6]
            .parse()
            .map_err(|_| malformed(format!("non-integer HEAD {:?}", cols[6])))?;
        let feats = Features::parse(cols[5]).map_err(malformed)?;
        let upos = if cols[3].chars().any(|c| c.is_lowercase()) {
            cols[3].to_uppercase()
        } else {
            cols[3].to_string()
        };
        Ok(Some(Token {
            id,
            form: cols[1].to_string(),
            lemma: cols[2].to_string(),
            upos,
            xpos: cols[4].to_string(),
            feats,
            head,
            deprel: cols[7].to_string(),
            deps: cols[8].to_string(),
            misc: cols[9].to_string(),
        }))
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.id,
            self.form,
            self.lemma,
            self.upos,
            self.xpos,
            self.feats,
            self.head,
            self.deprel,
            self.deps,
            self.misc
        )
    }
}

/// Structural problems reported by [`ParsedSentence::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum TreeViolation {
    NoRoot,
    MultipleRoots(Vec<usize>),
    DanglingHead(usize),
    /// Ids on one cycle, ascending.
    Cycle(Vec<usize>),
}

impl fmt::Display for TreeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeViolation::NoRoot => f.write_str("no token is attached to the root"),
            TreeViolation::MultipleRoots(ids) => write!(f, "multiple roots: {ids:?}"),
            TreeViolation::DanglingHead(id) => write!(f, "token {id} has a dangling head"),
            TreeViolation::Cycle(ids) => write!(f, "cycle through tokens {ids:?}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ParsedSentence {
    pub tokens: Vec<Token>,
    /// Raw comment lines including the leading `#`.
    pub comments: Vec<String>,
}

impl ParsedSentence {
    pub fn new(tokens: Vec<Token>) -> Self {
        ParsedSentence {
            tokens,
            comments: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Token by 1-based id.
    pub fn token(&self, id: usize) -> Option<&Token> {
        id.checked_sub(1).and_then(|i| self.tokens.get(i))
    }

    pub fn forms(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.form.as_str()).collect()
    }

    /// Number of head hops from `id` to the virtual root; the root token has depth 1.
    pub fn depth(&self, id: usize) -> Result<usize> {
        let len = self.len();
        if id == 0 || id > len {
            return Err(Error::InvalidTokenId { id, len });
        }
        let mut current = id;
        let mut hops = 0;
        while current != 0 {
            hops += 1;
            if hops > len {
                return Err(Error::CycleDetected { id });
            }
            let head = self.tokens[current - 1].head;
            if head > len {
                return Err(Error::DanglingHead { id: current, head });
            }
            current = head;
        }
        Ok(hops)
    }

    /// Depths of all tokens, indexed by `id - 1`.
    pub fn depths(&self) -> Result<Vec<usize>> {
        let len = self.len();
        let mut memo = vec![0usize; len];
        for start in 1..=len {
            let mut path = Vec::new();
            let mut current = start;
            let mut base = 0;
            while current != 0 {
                if memo[current - 1] != 0 {
                    base = memo[current - 1];
                    break;
                }
                if path.len() > len {
                    return Err(Error::CycleDetected { id: start });
                }
                path.push(current);
                let head = self.tokens[current - 1].head;
                if head > len {
                    return Err(Error::DanglingHead { id: current, head });
                }
                current = head;
            }
            for (offset, id) in path.iter().rev().enumerate() {
                memo[id - 1] = base + offset + 1;
            }
        }
        Ok(memo)
    }

    /// Checks the single-root, no-dangling-head and acyclicity constraints.
    pub fn validate(&self) -> Vec<TreeViolation> {
        let len = self.len();
        let mut violations = Vec::new();

        let roots: Vec<usize> = self
            .tokens
            .iter()
            .filter(|t| t.head == 0)
            .map(|t| t.id)
            .collect();
        match roots.len() {
            0 => violations.push(TreeViolation::NoRoot),
            1 => {}
            _ => violations.push(TreeViolation::MultipleRoots(roots)),
        }

        for t in &self.tokens {
            if t.head > len {
                violations.push(TreeViolation::DanglingHead(t.id));
            }
        }

        // 0 = unseen, 1 = on the current walk, 2 = finished
        let mut state = vec![0u8; len + 1];
        for start in 1..=len {
            if state[start] != 0 {
                continue;
            }
            let mut path = Vec::new();
            let mut current = start;
            while current != 0 && current <= len && state[current] == 0 {
                state[current] = 1;
                path.push(current);
                current = self.tokens[current - 1].head;
            }
            if current != 0 && current <= len && state[current] == 1 {
                let at = path.iter().position(|&id| id == current).unwrap();
                let mut cycle = path[at..].to_vec();
                cycle.sort_unstable();
                violations.push(TreeViolation::Cycle(cycle));
            }
            for id in path {
                state[id] = 2;
            }
        }
        violations
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Serializes comments and token lines followed by the blank separator line.
    pub fn to_conllu(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            out.push_str(c);
            out.push('\n');
        }
        for t in &self.tokens {
            out.push_str(&t.to_string());
            out.push('\n');
        }
        out.push('\n');
        out
    }
}

/// Streaming sentence reader over any buffered source.
pub struct Sentences<R> {
    lines: std::io::Lines<R>,
    line_no: usize,
    done: bool,
}

impl<R: BufRead> Sentences<R> {
    pub fn new(reader: R) -> Self {
        Sentences {
            lines: reader.lines(),
            line_no: 0,
            done: false,
        }
    }

    fn next_sentence(&mut self) -> Result<Option<ParsedSentence>> {
        let mut sentence = ParsedSentence::default();
        loop {
            let line = match self.lines.next() {
                Some(line) => line?,
                None => {
                    self.done = true;
                    return Ok((!sentence.is_empty()).then_some(sentence));
                }
            };
            self.line_no += 1;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            if line.trim().is_empty() {
                if sentence.is_empty() {
                    // comments without tokens do not make a sentence
                    sentence.comments.clear();
                    continue;
                }
                return Ok(Some(sentence));
            }
            if line.starts_with('#') {
                sentence.comments.push(line.to_string());
                continue;
            }
            if let Some(token) = Token::parse(line, self.line_no)? {
                if token.id != sentence.len() + 1 {
                    return Err(Error::MalformedLine {
                        line: self.line_no,
                        reason: format!(
                            "token id {} out of sequence, expected {}",
                            token.id,
                            sentence.len() + 1
                        ),
                    });
                }
                sentence.tokens.push(token);
            }
        }
    }
}

impl<R: BufRead> Iterator for Sentences<R> {
    type Item = Result<ParsedSentence>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.next_sentence() {
            Ok(Some(s)) => Some(Ok(s)),
            Ok(None) => None,
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

pub fn read_conllu<R: BufRead>(reader: R) -> Result<Vec<ParsedSentence>> {
    Sentences::new(reader).collect()
}

pub fn parse_conllu(text: &str) -> Result<Vec<ParsedSentence>> {
    read_conllu(text.as_bytes())
}

pub fn write_conllu(sentences: &[ParsedSentence]) -> String {
    sentences.iter().map(ParsedSentence::to_conllu).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> ParsedSentence {
        ParsedSentence::new(vec![
            Token::new(1, "a", "NOUN", 0, "root"),
            Token::new(2, "b", "NOUN", 1, "nmod"),
            Token::new(3, "c", "NOUN", 2, "nmod"),
        ])
    }

    #[test]
    fn reads_one_sentence() {
        let text = "# text = I like cake\n\
                    1\tI\tI\tPRON\tPRP\tCase=Nom|Number=Sing\t2\tnsubj\t_\t_\n\
                    2\tlike\tlike\tVERB\tVBP\t_\t0\troot\t_\t_\n\
                    3\tcake\tcake\tNOUN\tNN\tNumber=Sing\t2\tobj\t_\tSpaceAfter=No\n\n";
        let sents = parse_conllu(text).unwrap();
        assert_eq!(sents.len(), 1);
        assert_eq!(sents[0].len(), 3);
        assert_eq!(sents[0].comments, vec!["# text = I like cake"]);
        assert_eq!(sents[0].tokens[0].feats.get("Case"), Some("Nom"));
        assert_eq!(sents[0].tokens[2].misc, "SpaceAfter=No");
    }

    #[test]
    fn skips_range_and_empty_nodes() {
        let text = "1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n\
                    1\tdo\tdo\tAUX\t_\t_\t3\taux\t_\t_\n\
                    2\tn't\tnot\tPART\t_\t_\t3\tadvmod\t_\t_\n\
                    3\tgo\tgo\tVERB\t_\t_\t0\troot\t_\t_\n\
                    3.1\tgone\t_\t_\t_\t_\t_\t_\t_\t_\n";
        let sents = parse_conllu(text).unwrap();
        assert_eq!(sents[0].forms(), vec!["do", "n't", "go"]);
        assert_eq!(sents[0].tokens[2].id, 3);
    }

    #[test]
    fn malformed_lines() {
        let err = parse_conllu("1\tI\tI\tPRON\n").unwrap_err();
        assert!(matches!(err, Error::MalformedLine { line: 1, .. }));
        let err = parse_conllu("1\tI\tI\tPRON\t_\t_\tx\tnsubj\t_\t_\n").unwrap_err();
        assert!(matches!(err, Error::MalformedLine { line: 1, .. }));
        let text = "1\ta\t_\tX\t_\t_\t0\troot\t_\t_\n\n\nx\ta\t_\tX\t_\t_\t0\troot\t_\t_\n";
        assert!(matches!(
            parse_conllu(text).unwrap_err(),
            Error::MalformedLine { line: 4, .. }
        ));
    }

    #[test]
    fn blank_and_comment_only_blocks_are_skipped() {
        let text = "\n\n# orphan comment\n\n1\ta\t_\tX\t_\t_\t0\troot\t_\t_\n\n\n";
        let sents = parse_conllu(text).unwrap();
        assert_eq!(sents.len(), 1);
        assert!(sents[0].comments.is_empty());
    }

    #[test]
    fn crlf_input() {
        let text = "# c\r\n1\ta\t_\tX\t_\t_\t0\troot\t_\t_\r\n\r\n";
        let sents = parse_conllu(text).unwrap();
        assert_eq!(sents[0].comments, vec!["# c"]);
        assert_eq!(sents[0].tokens[0].misc, "_");
    }

    #[test]
    fn lowercase_upos_is_uppercased() {
        let sents = parse_conllu("1\ta\t_\tnoun\t_\t_\t0\troot\t_\t_\n").unwrap();
        assert_eq!(sents[0].tokens[0].upos, "NOUN");
    }

    #[test]
    fn features_sort_case_insensitively() {
        let f = Features::parse("number=Sing|Case=Nom|Gender=Masc,Fem").unwrap();
        assert_eq!(f.to_string(), "Case=Nom|Gender=Masc,Fem|number=Sing");
        assert_eq!(f.get("Gender"), Some("Masc,Fem"));
        assert!(Features::parse("Case").is_err());
        assert_eq!(Features::parse("_").unwrap().to_string(), "_");
    }

    #[test]
    fn depth_of_root_and_chain() {
        let s = chain();
        assert_eq!(s.depth(1).unwrap(), 1);
        assert_eq!(s.depth(3).unwrap(), 3);
        assert_eq!(s.depths().unwrap(), vec![1, 2, 3]);
        assert!(matches!(s.depth(4), Err(Error::InvalidTokenId { .. })));
    }

    #[test]
    fn depth_detects_cycles() {
        let s = ParsedSentence::new(vec![
            Token::new(1, "a", "X", 2, "dep"),
            Token::new(2, "b", "X", 1, "dep"),
        ]);
        assert!(matches!(s.depth(1), Err(Error::CycleDetected { id: 1 })));
        assert!(matches!(s.depths(), Err(Error::CycleDetected { .. })));
    }

    #[test]
    fn validate_reports_violations() {
        assert!(chain().validate().is_empty());

        let two_roots = ParsedSentence::new(vec![
            Token::new(1, "a", "X", 0, "root"),
            Token::new(2, "b", "X", 0, "root"),
        ]);
        assert_eq!(
            two_roots.validate(),
            vec![TreeViolation::MultipleRoots(vec![1, 2])]
        );

        let cycle = ParsedSentence::new(vec![
            Token::new(1, "a", "X", 2, "dep"),
            Token::new(2, "b", "X", 1, "dep"),
        ]);
        assert_eq!(
            cycle.validate(),
            vec![TreeViolation::NoRoot, TreeViolation::Cycle(vec![1, 2])]
        );

        let dangling = ParsedSentence::new(vec![
            Token::new(1, "a", "X", 0, "root"),
            Token::new(2, "b", "X", 9, "dep"),
        ]);
        assert_eq!(dangling.validate(), vec![TreeViolation::DanglingHead(2)]);

        let self_loop = ParsedSentence::new(vec![
            Token::new(1, "a", "X", 0, "root"),
            Token::new(2, "b", "X", 2, "dep"),
            Token::new(3, "c", "X", 2, "dep"),
        ]);
        assert_eq!(self_loop.validate(), vec![TreeViolation::Cycle(vec![2])]);
    }
}
