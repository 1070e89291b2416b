use num_bigint::BigInt;

use super::SyntaxError;
use crate::Rational;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Number(Rational),
    Prime,
    Assign,
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Lt,
    Gt,
    Ge,
    Le,
    Eq,
    Neq,
    Bang,
    Amp,
    Pipe,
    Arrow,
    Equiv,
    Turnstile,
    Choice,
    Semi,
    Dual,
    Question,
    Comma,
    Dot,
    Colon,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Number(n) => format!("number `{n}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.symbol()),
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            Tok::Ident(_) => "identifier",
            Tok::Number(_) => "number",
            Tok::Prime => "'",
            Tok::Assign => ":=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Lt => "<",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::Le => "<=",
            Tok::Eq => "=",
            Tok::Neq => "!=",
            Tok::Bang => "!",
            Tok::Amp => "&",
            Tok::Pipe => "|",
            Tok::Arrow => "->",
            Tok::Equiv => "<->",
            Tok::Turnstile => "==>",
            Tok::Choice => "++",
            Tok::Semi => ";",
            Tok::Dual => "^d",
            Tok::Question => "?",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::Colon => ":",
            Tok::Eof => "end of input",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic()
}

pub fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let (mut line, mut col) = (1usize, 1usize);

    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let start_col = col;
        let peek = |k: usize| chars.get(i + k).copied();
        let (tok, len) = if is_ident_start(c) {
            let mut j = i;
            while j < chars.len() && is_ident_continue(chars[j]) {
                j += 1;
            }
            (Tok::Ident(chars[i..j].iter().collect()), j - i)
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let numer: BigInt = chars[i..j].iter().collect::<String>().parse().unwrap();
            if j + 1 < chars.len() && chars[j] == '/' && chars[j + 1].is_ascii_digit() {
                let mut k = j + 1;
                while k < chars.len() && chars[k].is_ascii_digit() {
                    k += 1;
                }
                let denom: BigInt = chars[j + 1..k].iter().collect::<String>().parse().unwrap();
                if denom == BigInt::from(0) {
                    return Err(SyntaxError::new(line, start_col, "zero denominator", vec![]));
                }
                (Tok::Number(Rational::new(numer, denom)), k - i)
            } else {
                (Tok::Number(Rational::from_integer(numer)), j - i)
            }
        } else {
            match (c, peek(1), peek(2)) {
                ('<', Some('-'), Some('>')) => (Tok::Equiv, 3),
                ('=', Some('='), Some('>')) => (Tok::Turnstile, 3),
                ('<', Some('='), _) => (Tok::Le, 2),
                ('>', Some('='), _) => (Tok::Ge, 2),
                ('!', Some('='), _) => (Tok::Neq, 2),
                ('-', Some('>'), _) => (Tok::Arrow, 2),
                (':', Some('='), _) => (Tok::Assign, 2),
                ('+', Some('+'), _) => (Tok::Choice, 2),
                ('^', Some('d'), next) if !next.is_some_and(is_ident_continue) => (Tok::Dual, 2),
                ('<', ..) => (Tok::Lt, 1),
                ('>', ..) => (Tok::Gt, 1),
                ('=', ..) => (Tok::Eq, 1),
                ('!', ..) => (Tok::Bang, 1),
                ('\'', ..) => (Tok::Prime, 1),
                ('+', ..) => (Tok::Plus, 1),
                ('-', ..) => (Tok::Minus, 1),
                ('*', ..) => (Tok::Star, 1),
                ('(', ..) => (Tok::LParen, 1),
                (')', ..) => (Tok::RParen, 1),
                ('{', ..) => (Tok::LBrace, 1),
                ('}', ..) => (Tok::RBrace, 1),
                ('[', ..) => (Tok::LBracket, 1),
                (']', ..) => (Tok::RBracket, 1),
                ('&', ..) => (Tok::Amp, 1),
                ('|', ..) => (Tok::Pipe, 1),
                (';', ..) => (Tok::Semi, 1),
                ('?', ..) => (Tok::Question, 1),
                (',', ..) => (Tok::Comma, 1),
                ('.', ..) => (Tok::Dot, 1),
                (':', ..) => (Tok::Colon, 1),
                _ => {
                    return Err(SyntaxError::new(
                        line,
                        start_col,
                        &format!("unexpected character `{c}`"),
                        vec![],
                    ))
                }
            }
        };
        out.push(Token {
            tok,
            line,
            col: start_col,
        });
        i += len;
        col += len;
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn greedy_operators() {
        assert_eq!(
            toks("<-> <= < ==> -> ++ + ^d"),
            vec![
                Tok::Equiv,
                Tok::Le,
                Tok::Lt,
                Tok::Turnstile,
                Tok::Arrow,
                Tok::Choice,
                Tok::Plus,
                Tok::Dual,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn rationals_and_primes() {
        let t = toks("x' = 3/6");
        assert_eq!(t[0], Tok::Ident("x".into()));
        assert_eq!(t[1], Tok::Prime);
        assert_eq!(t[3], Tok::Number(Rational::new(1.into(), 2.into())));
    }

    #[test]
    fn positions_are_one_based() {
        let t = tokenize("a\n  b").unwrap();
        assert_eq!((t[1].line, t[1].col), (2, 3));
    }

    #[test]
    fn bad_character() {
        let e = tokenize("x @ y").unwrap_err();
        assert_eq!((e.line, e.col), (1, 3));
        assert!(tokenize("1/0").is_err());
    }
}
