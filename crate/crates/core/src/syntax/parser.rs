use super::ast::{Formula, Game, Term};
use super::lexer::{tokenize, Tok, Token};
use super::{Category, Node, ParseError, SyntaxError};

pub const KEYWORDS: &[&str] = &["true", "false", "forall", "exists"];

pub(crate) type PResult<T> = Result<T, SyntaxError>;

/// Recursive-descent parser over a token stream. Shared by the formula,
/// model-file and proof-script front ends.
pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    pub fn new(text: &str) -> Result<Parser, SyntaxError> {
        Ok(Parser {
            toks: tokenize(text)?,
            pos: 0,
        })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub fn token(&self) -> &Token {
        &self.toks[self.pos]
    }

    pub fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn at(&self, t: &Tok) -> bool {
        self.peek() == t
    }

    pub fn at_ident(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == word)
    }

    pub fn eat(&mut self, t: &Tok) -> bool {
        if self.at(t) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn error(&self, message: &str, expected: &[&str]) -> SyntaxError {
        let t = self.token();
        SyntaxError::new(
            t.line,
            t.col,
            &format!("{message}, found {}", t.tok.describe()),
            expected.iter().map(|s| s.to_string()).collect(),
        )
    }

    pub fn expect(&mut self, t: &Tok) -> PResult<()> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.error("unexpected token", &[t.symbol()]))
        }
    }

    pub fn expect_eof(&self) -> PResult<()> {
        if self.at(&Tok::Eof) {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input", &["end of input"]))
        }
    }

    pub fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.error("expected a variable", &["identifier"])),
        }
    }

    /// Any identifier including keywords; used by the line-oriented file
    /// formats for their own keywords.
    pub fn word(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.error("expected a word", &["identifier"])),
        }
    }

    // ---- terms ----

    pub fn term(&mut self) -> PResult<Term> {
        let mut lhs = self.product()?;
        loop {
            if self.eat(&Tok::Plus) {
                let rhs = self.product()?;
                lhs = Term::add(lhs, rhs);
            } else if self.eat(&Tok::Minus) {
                let rhs = self.product()?;
                lhs = Term::sub(lhs, rhs);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn starts_factor(t: &Tok) -> bool {
        matches!(t, Tok::Ident(_) | Tok::Number(_) | Tok::LParen | Tok::Minus)
    }

    fn product(&mut self) -> PResult<Term> {
        let mut lhs = self.unary_term()?;
        // A `*` not followed by an operand is the repetition operator.
        while self.at(&Tok::Star) && Self::starts_factor(self.peek_at(1)) {
            self.bump();
            let rhs = self.unary_term()?;
            lhs = Term::mul(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary_term(&mut self) -> PResult<Term> {
        if self.eat(&Tok::Minus) {
            if let Tok::Number(n) = self.peek().clone() {
                self.bump();
                return Ok(Term::Const(-n));
            }
            return Ok(Term::neg(self.unary_term()?));
        }
        match self.peek().clone() {
            Tok::Number(n) => {
                self.bump();
                Ok(Term::Const(n))
            }
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                if self.at(&Tok::Prime) {
                    return Err(self.error("primed variable outside an ODE", &[]));
                }
                Ok(Term::Var(s))
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(&Tok::RParen)?;
                Ok(t)
            }
            _ => Err(self.error(
                "expected a term",
                &["identifier", "number", "(", "-"],
            )),
        }
    }

    // ---- games ----

    pub fn game(&mut self) -> PResult<Game> {
        let lhs = self.seq_game()?;
        if self.eat(&Tok::Choice) {
            let rhs = self.game()?;
            return Ok(Game::choice(lhs, rhs));
        }
        Ok(lhs)
    }

    fn seq_game(&mut self) -> PResult<Game> {
        let lhs = self.postfix_game()?;
        if self.eat(&Tok::Semi) {
            let rhs = self.seq_game()?;
            return Ok(Game::seq(lhs, rhs));
        }
        Ok(lhs)
    }

    fn postfix_game(&mut self) -> PResult<Game> {
        let mut g = self.primary_game()?;
        loop {
            if self.eat(&Tok::Star) {
                g = Game::repeat(g);
            } else if self.eat(&Tok::Dual) {
                g = Game::dual(g);
            } else {
                return Ok(g);
            }
        }
    }

    fn primary_game(&mut self) -> PResult<Game> {
        match self.peek().clone() {
            Tok::Question => {
                self.bump();
                let q = self.unary_formula()?;
                Ok(Game::test(q))
            }
            Tok::LBrace => {
                self.bump();
                let var = self.ident()?;
                self.expect(&Tok::Prime)?;
                self.expect(&Tok::Eq)?;
                let rhs = self.term()?;
                let constraint = if self.eat(&Tok::Amp) {
                    let at = self.token().clone();
                    let q = self.formula()?;
                    if !q.is_modal_free() {
                        return Err(SyntaxError::new(
                            at.line,
                            at.col,
                            "evolution domain constraint must not contain modalities",
                            vec![],
                        ));
                    }
                    q
                } else {
                    Formula::True
                };
                self.expect(&Tok::RBrace)?;
                Ok(Game::ode(&var, rhs, constraint))
            }
            Tok::LParen => {
                self.bump();
                let g = self.game()?;
                self.expect(&Tok::RParen)?;
                Ok(g)
            }
            Tok::Ident(_) => {
                let var = self.ident()?;
                self.expect(&Tok::Assign)?;
                let e = self.term()?;
                Ok(Game::Assign(var, e))
            }
            _ => Err(self.error("expected a game", &["identifier", "{", "?", "("])),
        }
    }

    // ---- formulas ----

    pub fn formula(&mut self) -> PResult<Formula> {
        let lhs = self.implies_formula()?;
        if self.eat(&Tok::Equiv) {
            let rhs = self.formula()?;
            return Ok(Formula::equiv(lhs, rhs));
        }
        Ok(lhs)
    }

    fn implies_formula(&mut self) -> PResult<Formula> {
        let lhs = self.or_formula()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.implies_formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or_formula(&mut self) -> PResult<Formula> {
        let lhs = self.and_formula()?;
        if self.eat(&Tok::Pipe) {
            let rhs = self.or_formula()?;
            return Ok(Formula::or(lhs, rhs));
        }
        Ok(lhs)
    }

    fn and_formula(&mut self) -> PResult<Formula> {
        let lhs = self.unary_formula()?;
        if self.eat(&Tok::Amp) {
            let rhs = self.and_formula()?;
            return Ok(Formula::and(lhs, rhs));
        }
        Ok(lhs)
    }

    pub fn unary_formula(&mut self) -> PResult<Formula> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary_formula()?))
            }
            Tok::Ident(s) if s == "forall" || s == "exists" => {
                self.bump();
                let x = self.ident()?;
                let body = self.unary_formula()?;
                Ok(if s == "forall" {
                    Formula::forall(&x, body)
                } else {
                    Formula::exists(&x, body)
                })
            }
            Tok::Lt => {
                self.bump();
                let g = self.game()?;
                self.expect(&Tok::Gt)?;
                let (p, q) = self.goals(true)?;
                Ok(Formula::angel(g, p, q))
            }
            Tok::LBracket => {
                self.bump();
                let g = self.game()?;
                self.expect(&Tok::RBracket)?;
                let (p, q) = self.goals(false)?;
                Ok(Formula::demon(g, p, q))
            }
            _ => self.atom_formula(),
        }
    }

    /// `(P, Q)` or a single goal, desugared per player.
    fn goals(&mut self, angel: bool) -> PResult<(Formula, Formula)> {
        if self.at(&Tok::LParen) {
            let save = self.pos;
            let pair = (|| {
                self.bump();
                let p = self.formula()?;
                self.expect(&Tok::Comma)?;
                let q = self.formula()?;
                self.expect(&Tok::RParen)?;
                Ok((p, q))
            })();
            match pair {
                Ok(pq) => return Ok(pq),
                Err(pair_err) => {
                    let pair_pos = self.pos;
                    self.pos = save;
                    match self.unary_formula() {
                        Ok(g) => return Ok(single_goal(angel, g)),
                        Err(e) => {
                            return Err(if pair_pos > self.pos { pair_err } else { e });
                        }
                    }
                }
            }
        }
        let g = self.unary_formula()?;
        Ok(single_goal(angel, g))
    }

    fn atom_formula(&mut self) -> PResult<Formula> {
        if self.at_ident("true") {
            self.bump();
            return Ok(Formula::True);
        }
        if self.at_ident("false") {
            self.bump();
            return Ok(Formula::False);
        }
        if self.at(&Tok::LParen) {
            let save = self.pos;
            match self.comparison() {
                Ok(f) => return Ok(f),
                Err(cmp_err) => {
                    let cmp_pos = self.pos;
                    self.pos = save;
                    self.bump();
                    let inner = self.formula().and_then(|f| {
                        self.expect(&Tok::RParen)?;
                        Ok(f)
                    });
                    return match inner {
                        Ok(f) => Ok(f),
                        Err(e) => Err(if cmp_pos > self.pos { cmp_err } else { e }),
                    };
                }
            }
        }
        if matches!(self.peek(), Tok::Ident(_) | Tok::Number(_) | Tok::Minus) {
            return self.comparison();
        }
        Err(self.error(
            "expected a formula",
            &["true", "false", "!", "<", "[", "(", "forall", "exists", "term"],
        ))
    }

    fn comparison(&mut self) -> PResult<Formula> {
        let l = self.term()?;
        let op = self.peek().clone();
        let r = match op {
            Tok::Ge | Tok::Le | Tok::Gt | Tok::Lt | Tok::Eq | Tok::Neq => {
                self.bump();
                self.term()?
            }
            _ => {
                return Err(self.error(
                    "expected a comparison",
                    &[">=", "<=", ">", "<", "=", "!="],
                ))
            }
        };
        Ok(match op {
            Tok::Ge => Formula::geq(l, r),
            Tok::Le => Formula::geq(r, l),
            Tok::Gt => Formula::not(Formula::geq(r, l)),
            Tok::Lt => Formula::not(Formula::geq(l, r)),
            Tok::Eq => Formula::eq(l, r),
            Tok::Neq => Formula::not(Formula::eq(l, r)),
            _ => unreachable!(),
        })
    }
}

fn single_goal(angel: bool, g: Formula) -> (Formula, Formula) {
    if angel {
        let ng = Formula::not(g.clone());
        (g, ng)
    } else {
        (Formula::not(g.clone()), g)
    }
}

fn parse_exact(text: &str, category: Category) -> Result<Node, SyntaxError> {
    let mut p = Parser::new(text)?;
    let node = match category {
        Category::Term => Node::Term(p.term()?),
        Category::Game => Node::Game(p.game()?),
        Category::Formula => Node::Formula(p.formula()?),
    };
    p.expect_eof()?;
    Ok(node)
}

/// Parses `text` starting from the start symbol of `category`.
pub fn parse(text: &str, category: Category) -> Result<Node, ParseError> {
    match parse_exact(text, category) {
        Ok(node) => Ok(node),
        Err(err) => {
            for other in [Category::Formula, Category::Game, Category::Term] {
                if other != category && parse_exact(text, other).is_ok() {
                    return Err(ParseError::UnboundCategory {
                        requested: category,
                        found: other,
                    });
                }
            }
            Err(ParseError::Syntax(err))
        }
    }
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    match parse(text, Category::Term)? {
        Node::Term(t) => Ok(t),
        _ => unreachable!(),
    }
}

pub fn parse_game(text: &str) -> Result<Game, ParseError> {
    match parse(text, Category::Game)? {
        Node::Game(g) => Ok(g),
        _ => unreachable!(),
    }
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    match parse(text, Category::Formula)? {
        Node::Formula(f) => Ok(f),
        _ => unreachable!(),
    }
}

/// Parses `A, B ==> C, D` into antecedent and succedent lists; either side
/// may be empty.
pub fn parse_sequent(text: &str) -> Result<(Vec<Formula>, Vec<Formula>), SyntaxError> {
    let mut p = Parser::new(text)?;
    let list = |p: &mut Parser, stop: &Tok| -> PResult<Vec<Formula>> {
        let mut out = Vec::new();
        if p.at(stop) {
            return Ok(out);
        }
        out.push(p.formula()?);
        while p.eat(&Tok::Comma) {
            out.push(p.formula()?);
        }
        Ok(out)
    };
    let ante = list(&mut p, &Tok::Turnstile)?;
    p.expect(&Tok::Turnstile)?;
    let succ = list(&mut p, &Tok::Eof)?;
    p.expect_eof()?;
    Ok((ante, succ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn g(s: &str) -> Game {
        parse_game(s).unwrap()
    }

    #[test]
    fn sequents() {
        let (a, s) = parse_sequent("o=0, t=0 ==> <x:=1>(true, false)").unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(s, vec![f("<x:=1>(true, false)")]);
        let (a, s) = parse_sequent("==>").unwrap();
        assert!(a.is_empty() && s.is_empty());
        assert!(parse_sequent("x>=1").is_err());
    }

    #[test]
    fn juice_formula() {
        let parsed = f("<{t'=1}; {o'=1}^d>(o=3, t=5)");
        let expected = Formula::angel(
            Game::seq(
                Game::ode("t", Term::int(1), Formula::True),
                Game::dual(Game::ode("o", Term::int(1), Formula::True)),
            ),
            Formula::eq(Term::var("o"), Term::int(3)),
            Formula::eq(Term::var("t"), Term::int(5)),
        );
        assert_eq!(parsed, expected);
    }

    #[test]
    fn smallest_game() {
        assert_eq!(g("?true"), Game::test(Formula::True));
    }

    #[test]
    fn game_precedence() {
        assert_eq!(
            g("a:=1; b:=2 ++ c:=3"),
            Game::choice(
                Game::seq(Game::assign("a", Term::int(1)), Game::assign("b", Term::int(2))),
                Game::assign("c", Term::int(3))
            )
        );
        assert_eq!(
            g("a:=1 ++ b:=2 ++ c:=3"),
            Game::choice(
                Game::assign("a", Term::int(1)),
                Game::choice(Game::assign("b", Term::int(2)), Game::assign("c", Term::int(3)))
            )
        );
        assert_eq!(
            g("(?true)*^d"),
            Game::dual(Game::repeat(Game::test(Formula::True)))
        );
        assert_eq!(
            g("x:=y*"),
            Game::repeat(Game::assign("x", Term::var("y")))
        );
        assert_eq!(
            g("x:=y*z"),
            Game::assign("x", Term::mul(Term::var("y"), Term::var("z")))
        );
    }

    #[test]
    fn formula_precedence() {
        let a = Formula::geq(Term::var("a"), Term::int(0));
        let b = Formula::geq(Term::var("b"), Term::int(0));
        let c = Formula::geq(Term::var("c"), Term::int(0));
        assert_eq!(
            f("a>=0 | b>=0 & c>=0"),
            Formula::or(a.clone(), Formula::and(b.clone(), c.clone()))
        );
        assert_eq!(
            f("a>=0 -> b>=0 -> c>=0"),
            Formula::implies(a.clone(), Formula::implies(b.clone(), c.clone()))
        );
        assert_eq!(
            f("!a>=0 & b>=0"),
            Formula::and(Formula::not(a.clone()), b.clone())
        );
        assert_eq!(
            f("a>=0 <-> b>=0"),
            Formula::equiv(a.clone(), b.clone())
        );
    }

    #[test]
    fn comparisons_desugar() {
        let x = Term::var("x");
        let one = Term::int(1);
        assert_eq!(f("x <= 1"), Formula::geq(one.clone(), x.clone()));
        assert_eq!(f("x < 1"), Formula::not(Formula::geq(x.clone(), one.clone())));
        assert_eq!(f("x > 1"), Formula::not(Formula::geq(one.clone(), x.clone())));
        assert_eq!(f("x != 1"), Formula::not(Formula::eq(x.clone(), one.clone())));
    }

    #[test]
    fn single_goal_sugar() {
        let p = Formula::geq(Term::var("x"), Term::int(1));
        assert_eq!(
            f("<x:=1>x>=1"),
            Formula::angel_single(Game::assign("x", Term::int(1)), p.clone())
        );
        assert_eq!(
            f("[x:=1](x>=1)"),
            Formula::demon_single(Game::assign("x", Term::int(1)), p.clone())
        );
        assert_eq!(
            f("<x:=1>(x+1)*2 >= 1"),
            Formula::angel_single(
                Game::assign("x", Term::int(1)),
                Formula::geq(
                    Term::mul(Term::add(Term::var("x"), Term::int(1)), Term::int(2)),
                    Term::int(1)
                )
            )
        );
    }

    #[test]
    fn negative_constants() {
        assert_eq!(parse_term("-3").unwrap(), Term::int(-3));
        assert_eq!(parse_term("-(3)").unwrap(), Term::neg(Term::int(3)));
        assert_eq!(
            parse_term("x - -1/2").unwrap(),
            Term::sub(
                Term::var("x"),
                Term::Const(crate::Rational::new((-1).into(), 2.into()))
            )
        );
    }

    #[test]
    fn parenthesized_comparison_vs_formula() {
        assert_eq!(
            f("(x+1) >= 2"),
            Formula::geq(Term::add(Term::var("x"), Term::int(1)), Term::int(2))
        );
        assert_eq!(f("(x >= 2)"), Formula::geq(Term::var("x"), Term::int(2)));
    }

    #[test]
    fn errors_carry_position() {
        let Err(ParseError::Syntax(e)) = parse_formula("<x:=1(x>=1)") else {
            panic!("expected a syntax error");
        };
        assert_eq!(e.line, 1);
        assert!(e.col > 1);
    }

    #[test]
    fn wrong_category() {
        assert!(matches!(
            parse("x := 1", Category::Formula),
            Err(ParseError::UnboundCategory {
                found: Category::Game,
                ..
            })
        ));
        assert!(matches!(
            parse("x + 1", Category::Game),
            Err(ParseError::UnboundCategory {
                found: Category::Term,
                ..
            })
        ));
    }

    #[test]
    fn ode_with_modal_constraint_rejected() {
        assert!(parse_game("{x'=1 & <x:=1>x>=0}").is_err());
        assert_eq!(
            g("{x'=x & x <= 8}"),
            Game::ode(
                "x",
                Term::var("x"),
                Formula::geq(Term::int(8), Term::var("x"))
            )
        );
    }
}
