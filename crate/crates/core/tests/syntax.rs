use std::path::PathBuf;

use dglsc::oracle::SyntaxGen;
use dglsc::syntax::{parse, parse_formula, parse_game, parse_term, Category, Node};
use proptest::prelude::*;

fn data(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name);
    std::fs::read_to_string(p).unwrap()
}

fn lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'))
}

#[test]
fn malformed_formulas_are_rejected_with_a_location() {
    let corpus = data("bad_formulas.txt");
    let mut n = 0;
    for line in lines(&corpus) {
        let e = parse_formula(line).expect_err(line);
        assert!(e.to_string().contains("column"), "{line}: {e}");
        n += 1;
    }
    assert!(n >= 20);
}

#[test]
fn golden_printing() {
    let golden = data("print.golden");
    for line in lines(&golden) {
        let (input, want) = line.split_once(" => ").unwrap();
        let f = parse_formula(input).unwrap_or_else(|e| panic!("{input}: {e}"));
        assert_eq!(f.to_string(), want, "{input}");
        assert_eq!(parse_formula(want).unwrap(), f, "{want}");
    }
}

#[test]
fn category_dispatch() {
    assert!(matches!(parse("x + 1", Category::Term), Ok(Node::Term(_))));
    assert!(matches!(parse("x:=1; ?true", Category::Game), Ok(Node::Game(_))));
    assert!(matches!(parse("x >= 1", Category::Formula), Ok(Node::Formula(_))));
    assert!(parse("x >= 1", Category::Term).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn formulas_round_trip(seed in any::<u64>(), depth in 0usize..=5) {
        let f = SyntaxGen::new(seed).formula(depth);
        let printed = f.to_string();
        prop_assert_eq!(parse_formula(&printed).unwrap(), f.clone(), "{}", printed);
        prop_assert_eq!(parse_formula(&printed).unwrap().to_string(), printed);
    }

    #[test]
    fn games_round_trip(seed in any::<u64>(), depth in 0usize..=5) {
        let g = SyntaxGen::new(seed).game(depth);
        prop_assert_eq!(parse_game(&g.to_string()).unwrap(), g);
    }

    #[test]
    fn terms_round_trip(seed in any::<u64>(), depth in 0usize..=8) {
        let t = SyntaxGen::new(seed).term(depth);
        prop_assert_eq!(parse_term(&t.to_string()).unwrap(), t);
    }

    // Printing is insensitive to extra whitespace and redundant parentheses.
    #[test]
    fn reparse_of_padded_text(seed in any::<u64>()) {
        let f = SyntaxGen::new(seed).formula(3);
        let padded = format!("  ( {} )  ", f.to_string().replace(' ', "  "));
        prop_assert_eq!(parse_formula(&padded).unwrap(), f);
    }

    #[test]
    fn parser_never_panics(text in "[-a-z0-9<>\\[\\]()!&|=:;*^'?{}+ ,]{0,40}") {
        let _ = parse_formula(&text);
        let _ = parse_game(&text);
    }
}

#[test]
fn deep_formulas_round_trip() {
    for seed in 0..200u64 {
        let f = SyntaxGen::new(seed).formula(8);
        assert_eq!(parse_formula(&f.to_string()).unwrap(), f, "seed {seed}");
    }
}
