mod common;

use std::fs;

use proptest::prelude::*;
use synerr::conllu::TreeViolation;
use synerr::{parse_conllu, write_conllu, Error, ParsedSentence, Token};

use common::{bfs_depths, fixture, tree_from_order};

#[test]
fn fixture_round_trips_byte_for_byte() {
    for name in ["corpus/source.conllu", "corpus/corrected.conllu"] {
        let text = fs::read_to_string(fixture(name)).unwrap();
        let sentences = parse_conllu(&text).unwrap();
        assert_eq!(sentences.len(), 20);
        assert_eq!(write_conllu(&sentences), text, "{name}");
        assert!(sentences.iter().all(ParsedSentence::is_valid));
    }
}

#[test]
fn multiword_and_empty_nodes_are_skipped() {
    let text = "# text = don't\n1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n1\tdo\tdo\tAUX\t_\t_\t0\troot\t_\t_\n\
                2\tn't\tnot\tPART\t_\tPolarity=Neg\t1\tadvmod\t_\t_\n1.1\tx\t_\t_\t_\t_\t_\t_\t_\t_\n\n";
    let s = &parse_conllu(text).unwrap()[0];
    assert_eq!(s.forms(), vec!["do", "n't"]);
    assert_eq!(s.tokens[1].feats.get("Polarity"), Some("Neg"));
}

#[test]
fn malformed_lines_report_their_line_number() {
    let err = parse_conllu("1\ta\ta\tX\t_\t_\t0\troot\t_\t_\n2\tb\tb\tX\n\n").unwrap_err();
    assert!(matches!(err, Error::MalformedLine { line: 2, .. }), "{err}");
    let err = parse_conllu("1\ta\ta\tX\t_\t_\tzero\troot\t_\t_\n\n").unwrap_err();
    assert!(matches!(err, Error::MalformedLine { line: 1, .. }));
}

#[test]
fn tree_violations() {
    let s = |heads: &[usize]| {
        ParsedSentence::new(
            heads
                .iter()
                .enumerate()
                .map(|(i, &h)| Token::new(i + 1, "w", "X", h, "dep"))
                .collect(),
        )
    };
    assert!(s(&[0, 1, 2]).validate().is_empty());
    assert_eq!(s(&[2, 1, 0]).validate(), vec![TreeViolation::Cycle(vec![1, 2])]);
    assert!(s(&[0, 0]).validate().contains(&TreeViolation::MultipleRoots(vec![1, 2])));
    assert!(s(&[0, 7]).validate().contains(&TreeViolation::DanglingHead(2)));
    assert!(matches!(s(&[2, 1, 0]).depth(1), Err(Error::CycleDetected { .. })));
    assert!(matches!(s(&[0]).depth(2), Err(Error::InvalidTokenId { id: 2, len: 1 })));
}

fn tree_strategy() -> impl Strategy<Value = ParsedSentence> {
    (1usize..=20).prop_flat_map(|n| {
        (
            Just((1..=n).collect::<Vec<_>>()).prop_shuffle(),
            prop::collection::vec(any::<usize>(), n),
            prop::collection::vec(0usize..30, n),
        )
            .prop_map(|(order, parents, labels)| tree_from_order(&order, &parents, &labels))
    })
}

proptest! {
    #[test]
    fn depths_match_breadth_first_search(s in tree_strategy()) {
        prop_assert!(s.is_valid());
        let depths = s.depths().unwrap();
        prop_assert_eq!(&depths, &bfs_depths(&s));
        for id in 1..=s.len() {
            prop_assert_eq!(s.depth(id).unwrap(), depths[id - 1]);
        }
    }

    #[test]
    fn write_then_read_is_identity(s in tree_strategy()) {
        let back = parse_conllu(&write_conllu(std::slice::from_ref(&s))).unwrap();
        prop_assert_eq!(back, vec![s]);
    }

    #[test]
    fn redirecting_the_root_creates_a_cycle(s in tree_strategy(), pick in any::<usize>()) {
        prop_assume!(s.len() >= 2);
        let mut tokens = s.tokens.clone();
        let root = tokens.iter().position(|t| t.head == 0).unwrap();
        let mut target = pick % s.len();
        if target == root {
            target = (target + 1) % s.len();
        }
        tokens[root].head = target + 1;
        let broken = ParsedSentence::new(tokens);
        let v = broken.validate();
        prop_assert!(v.contains(&TreeViolation::NoRoot), "{:?}", v);
        prop_assert!(v.iter().any(|x| matches!(x, TreeViolation::Cycle(_))), "{:?}", v);
    }
}
