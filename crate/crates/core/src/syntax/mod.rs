//! Abstract syntax, parser and printer for terms, games and formulas.

pub mod ast;
pub mod lexer;
pub(crate) mod parser;
pub mod printer;

use std::fmt;

pub use ast::{Formula, Game, Term};
pub use parser::{parse, parse_formula, parse_game, parse_sequent, parse_term};
pub use printer::{print_formula, print_game, print_term};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Term,
    Game,
    Formula,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Term => "term",
            Category::Game => "game",
            Category::Formula => "formula",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Term(Term),
    Game(Game),
    Formula(Formula),
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Term(t) => t.fmt(f),
            Node::Game(g) => g.fmt(f),
            Node::Formula(p) => p.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {col}: {message}{}", expected_suffix(.expected))]
pub struct SyntaxError {
    pub line: usize,
    pub col: usize,
    pub message: String,
    pub expected: Vec<String>,
}

fn expected_suffix(expected: &[String]) -> String {
    if expected.is_empty() {
        String::new()
    } else {
        format!(" (expected {})", expected.join(", "))
    }
}

impl SyntaxError {
    pub fn new(line: usize, col: usize, message: &str, expected: Vec<String>) -> SyntaxError {
        SyntaxError {
            line,
            col,
            message: message.to_string(),
            expected,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at {0}")]
    Syntax(#[from] SyntaxError),
    #[error("input is a {found}, not a {requested}")]
    UnboundCategory { requested: Category, found: Category },
}
