#![allow(dead_code)]

use std::collections::VecDeque;
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use synerr::{Edit, ParsedSentence, Token};

pub const POS: [&str; 6] = ["NOUN", "VERB", "ADJ", "DET", "ADP", "PRON"];
pub const RELS: [&str; 5] = ["nsubj", "obj", "amod", "det", "case"];

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(rel)
}

/// Builds a tree from an attachment order: `order[0]` is the root and
/// `order[k]` hangs off `order[parents[k] % k]`.
pub fn tree_from_order(order: &[usize], parents: &[usize], labels: &[usize]) -> ParsedSentence {
    let n = order.len();
    let mut head = vec![0; n + 1];
    for k in 1..n {
        head[order[k]] = order[parents[k] % k];
    }
    let tokens = (1..=n)
        .map(|id| {
            let l = labels.get(id - 1).copied().unwrap_or(id);
            Token::new(
                id,
                &format!("w{id}"),
                POS[l % POS.len()],
                head[id],
                if head[id] == 0 { "root" } else { RELS[l % RELS.len()] },
            )
        })
        .collect();
    ParsedSentence::new(tokens)
}

pub fn random_tree<R: Rng>(rng: &mut R, max_len: usize) -> ParsedSentence {
    let n = rng.gen_range(1..=max_len);
    let mut order: Vec<usize> = (1..=n).collect();
    order.shuffle(rng);
    let parents: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n.max(1))).collect();
    let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..30)).collect();
    tree_from_order(&order, &parents, &labels)
}

/// Depths by breadth-first search from the root over child lists.
pub fn bfs_depths(s: &ParsedSentence) -> Vec<usize> {
    let n = s.tokens.len();
    let mut children = vec![Vec::new(); n + 1];
    for t in &s.tokens {
        children[t.head].push(t.id);
    }
    let mut depth = vec![0; n + 1];
    let mut queue: VecDeque<usize> = children[0].iter().copied().collect();
    for &r in &children[0] {
        depth[r] = 1;
    }
    while let Some(v) = queue.pop_front() {
        for &c in &children[v] {
            depth[c] = depth[v] + 1;
            queue.push_back(c);
        }
    }
    depth[1..].to_vec()
}

/// Brute force: scan every span token, keep the strictly shallower one.
pub fn representative_oracle(start: usize, end: usize, s: &ParsedSentence) -> Option<usize> {
    let depths = bfs_depths(s);
    let mut best: Option<(usize, usize)> = None;
    for id in start + 1..=end {
        let d = depths[id - 1];
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, id));
        }
    }
    best.map(|(_, id)| id)
}

pub fn words(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// Random edits over a source of `n` tokens; insertions always insert something.
pub fn random_edits<R: Rng>(rng: &mut R, n: usize, max_edits: usize) -> Vec<Edit> {
    let k = rng.gen_range(0..=max_edits);
    (0..k)
        .map(|i| {
            let start = rng.gen_range(0..=n);
            let end = rng.gen_range(start..=n.min(start + 3));
            let min_len = usize::from(start == end);
            let len = rng.gen_range(min_len..=2);
            let rep: Vec<String> = (0..len).map(|j| format!("r{i}_{j}")).collect();
            let refs: Vec<&str> = rep.iter().map(String::as_str).collect();
            Edit::new(start, end, &refs)
        })
        .collect()
}

/// Collision rule written out case by case.
pub fn collide(a: &Edit, b: &Edit) -> bool {
    match (a.start == a.end, b.start == b.end) {
        (true, true) => a.start == b.start,
        (true, false) => b.start <= a.start && a.start <= b.end,
        (false, true) => a.start <= b.start && b.start <= a.end,
        (false, false) => a.start < b.end && b.start < a.end,
    }
}

/// Applies sorted, disjoint edits by splicing from the rightmost one leftwards.
pub fn splice_right_to_left(source: &[String], edits: &[Edit]) -> Vec<String> {
    let mut out = source.to_vec();
    for e in edits.iter().rev() {
        out.splice(e.start..e.end, e.replacement.iter().cloned());
    }
    out
}

pub fn assert_close(actual: f64, expected: f64, tol: f64, what: &str) {
    assert!(
        (actual - expected).abs() <= tol,
        "{what}: got {actual}, expected {expected} (tolerance {tol})"
    );
}
