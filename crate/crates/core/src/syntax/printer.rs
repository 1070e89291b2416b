//! Canonical concrete syntax. Output re-parses to the identical AST.

use num_traits::Signed;

use super::ast::{Formula, Game, Term};

// term levels
const T_SUM: u8 = 0;
const T_PROD: u8 = 1;
const T_UNARY: u8 = 2;

fn term_at(t: &Term, level: u8, out: &mut String) {
    let own = match t {
        Term::Add(..) | Term::Sub(..) => T_SUM,
        Term::Mul(..) => T_PROD,
        Term::Var(_) | Term::Const(_) | Term::Neg(_) => T_UNARY,
    };
    let paren = own < level;
    if paren {
        out.push('(');
    }
    match t {
        Term::Var(x) => out.push_str(x),
        Term::Const(c) => out.push_str(&c.to_string()),
        Term::Add(l, r) => {
            term_at(l, T_SUM, out);
            out.push_str(" + ");
            term_at(r, T_PROD, out);
        }
        Term::Sub(l, r) => {
            term_at(l, T_SUM, out);
            out.push_str(" - ");
            term_at(r, T_PROD, out);
        }
        Term::Mul(l, r) => {
            term_at(l, T_PROD, out);
            out.push('*');
            term_at(r, T_UNARY, out);
        }
        Term::Neg(inner) => {
            out.push('-');
            match inner.as_ref() {
                // `-3` would read back as a negative literal
                Term::Const(c) if !c.is_negative() => {
                    out.push('(');
                    out.push_str(&c.to_string());
                    out.push(')');
                }
                _ => term_at(inner, T_UNARY, out),
            }
        }
    }
    if paren {
        out.push(')');
    }
}

pub fn print_term(t: &Term) -> String {
    let mut s = String::new();
    term_at(t, T_SUM, &mut s);
    s
}

// game levels
const G_CHOICE: u8 = 0;
const G_SEQ: u8 = 1;
const G_POSTFIX: u8 = 2;

fn game_at(g: &Game, level: u8, out: &mut String) {
    let own = match g {
        Game::Choice(..) => G_CHOICE,
        Game::Seq(..) => G_SEQ,
        Game::Dual(_) | Game::Repeat(_) | Game::Assign(..) | Game::Test(_) | Game::Ode { .. } => {
            G_POSTFIX
        }
    };
    let paren = own < level;
    if paren {
        out.push('(');
    }
    match g {
        Game::Assign(x, e) => {
            out.push_str(x);
            out.push_str(":=");
            term_at(e, T_SUM, out);
        }
        Game::Ode {
            var,
            rhs,
            constraint,
        } => {
            out.push('{');
            out.push_str(var);
            out.push_str("'=");
            term_at(rhs, T_SUM, out);
            if **constraint != Formula::True {
                out.push_str(" & ");
                formula_at(constraint, F_EQUIV, out);
            }
            out.push('}');
        }
        Game::Test(q) => {
            out.push('?');
            formula_at(q, F_UNARY, out);
        }
        Game::Choice(l, r) => {
            game_at(l, G_SEQ, out);
            out.push_str(" ++ ");
            game_at(r, G_CHOICE, out);
        }
        Game::Seq(l, r) => {
            game_at(l, G_POSTFIX, out);
            out.push_str("; ");
            game_at(r, G_SEQ, out);
        }
        Game::Dual(inner) => {
            postfix_operand(inner, out);
            out.push_str("^d");
        }
        Game::Repeat(inner) => {
            postfix_operand(inner, out);
            out.push('*');
        }
    }
    if paren {
        out.push(')');
    }
}

// Assignments and tests end in an open term or formula.
fn postfix_operand(g: &Game, out: &mut String) {
    if matches!(g, Game::Assign(..) | Game::Test(_)) {
        out.push('(');
        game_at(g, G_CHOICE, out);
        out.push(')');
    } else {
        game_at(g, G_POSTFIX, out);
    }
}

pub fn print_game(g: &Game) -> String {
    let mut s = String::new();
    game_at(g, G_CHOICE, &mut s);
    s
}

// formula levels
const F_EQUIV: u8 = 0;
const F_IMPLIES: u8 = 1;
const F_OR: u8 = 2;
const F_AND: u8 = 3;
const F_UNARY: u8 = 4;

enum View<'a> {
    Equiv(&'a Formula, &'a Formula),
    Implies(&'a Formula, &'a Formula),
    Or(&'a Formula, &'a Formula),
    And(&'a Formula, &'a Formula),
    Cmp(&'a Term, &'static str, &'a Term),
    Not(&'a Formula),
    Other,
}

fn view(f: &Formula) -> View<'_> {
    if let Some((p, q)) = f.as_equiv() {
        return View::Equiv(p, q);
    }
    if let Some((a, b)) = f.as_eq() {
        return View::Cmp(a, "=", b);
    }
    if let Some((p, q)) = f.as_implies() {
        // `!(!P & !Q)` is both `P | Q` and `!P -> Q`; pick whichever reads
        // without a double negation.
        if p.as_or().is_some() || p.as_implies().is_some() || !matches!(p, Formula::Not(_)) {
            return View::Implies(p, q);
        }
    }
    if let Some((p, q)) = f.as_or() {
        return View::Or(p, q);
    }
    match f {
        Formula::And(p, q) => View::And(p, q),
        Formula::Geq(a, b) => View::Cmp(a, ">=", b),
        Formula::Not(inner) => {
            if let Some((a, b)) = inner.as_eq() {
                return View::Cmp(a, "!=", b);
            }
            if let Formula::Geq(a, b) = inner.as_ref() {
                return View::Cmp(a, "<", b);
            }
            View::Not(inner)
        }
        _ => View::Other,
    }
}

fn formula_at(f: &Formula, level: u8, out: &mut String) {
    let v = view(f);
    let own = match v {
        View::Equiv(..) => F_EQUIV,
        View::Implies(..) => F_IMPLIES,
        View::Or(..) => F_OR,
        View::And(..) => F_AND,
        _ => F_UNARY,
    };
    let paren = own < level;
    if paren {
        out.push('(');
    }
    match v {
        View::Equiv(p, q) => binary(p, " <-> ", q, F_IMPLIES, F_EQUIV, out),
        View::Implies(p, q) => binary(p, " -> ", q, F_OR, F_IMPLIES, out),
        View::Or(p, q) => binary(p, " | ", q, F_AND, F_OR, out),
        View::And(p, q) => binary(p, " & ", q, F_UNARY, F_AND, out),
        View::Cmp(a, op, b) => {
            term_at(a, T_SUM, out);
            out.push(' ');
            out.push_str(op);
            out.push(' ');
            term_at(b, T_SUM, out);
        }
        View::Not(p) => {
            out.push('!');
            formula_at(p, F_UNARY, out);
        }
        View::Other => match f {
            Formula::True => out.push_str("true"),
            Formula::False => out.push_str("false"),
            Formula::Forall(x, p) | Formula::Exists(x, p) => {
                out.push_str(if matches!(f, Formula::Forall(..)) {
                    "forall "
                } else {
                    "exists "
                });
                out.push_str(x);
                out.push(' ');
                formula_at(p, F_UNARY, out);
            }
            Formula::Angel(g, p, q) => {
                out.push('<');
                game_at(g, G_CHOICE, out);
                out.push('>');
                if matches!(q.as_ref(), Formula::Not(inner) if inner == p) {
                    formula_at(p, F_UNARY, out);
                } else {
                    goal_pair(p, q, out);
                }
            }
            Formula::Demon(g, p, q) => {
                out.push('[');
                game_at(g, G_CHOICE, out);
                out.push(']');
                if matches!(p.as_ref(), Formula::Not(inner) if inner == q) {
                    formula_at(q, F_UNARY, out);
                } else {
                    goal_pair(p, q, out);
                }
            }
            _ => unreachable!(),
        },
    }
    if paren {
        out.push(')');
    }
}

fn binary(p: &Formula, op: &str, q: &Formula, lp: u8, lq: u8, out: &mut String) {
    formula_at(p, lp, out);
    out.push_str(op);
    formula_at(q, lq, out);
}

fn goal_pair(p: &Formula, q: &Formula, out: &mut String) {
    out.push('(');
    formula_at(p, F_EQUIV, out);
    out.push_str(", ");
    formula_at(q, F_EQUIV, out);
    out.push(')');
}

pub fn print_formula(f: &Formula) -> String {
    let mut s = String::new();
    formula_at(f, F_EQUIV, &mut s);
    s
}

#[cfg(test)]
mod tests {
    use super::super::{parse_formula, parse_game, parse_term};
    use super::*;

    fn rt_formula(s: &str) -> String {
        print_formula(&parse_formula(s).unwrap())
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(
            rt_formula("<{t'=1};{o'=1}^d>(o=3,t=5)"),
            "<{t'=1}; {o'=1}^d>(o = 3, t = 5)"
        );
        assert_eq!(print_game(&parse_game("(?true)*^d").unwrap()), "(?true)*^d");
        assert_eq!(rt_formula("[x:=1 ++ x:=0]x>=1"), "[x:=1 ++ x:=0]x >= 1");
        assert_eq!(rt_formula("!(a>=1 & b>=1)"), "!(a >= 1 & b >= 1)");
        assert_eq!(rt_formula("a>=1 | b>=1 -> c>=1"), "a >= 1 | b >= 1 -> c >= 1");
        assert_eq!(rt_formula("(a>=1 -> b>=1) -> c>=1"), "(a >= 1 -> b >= 1) -> c >= 1");
    }

    #[test]
    fn terms() {
        for s in ["x - (y - z)", "x - y - z", "-(3)", "-3", "--3", "x*(y + 1)", "-x*y", "-(x*y)", "x - -1/2"] {
            let t = parse_term(s).unwrap();
            assert_eq!(print_term(&t), s);
            assert_eq!(parse_term(&print_term(&t)).unwrap(), t);
        }
    }

    #[test]
    fn postfix_on_open_games() {
        let g = Game::repeat(Game::assign("x", Term::var("y")));
        assert_eq!(print_game(&g), "(x:=y)*");
        let g = Game::seq(Game::choice(Game::test(Formula::True), Game::test(Formula::False)), Game::test(Formula::True));
        assert_eq!(print_game(&g), "(?true ++ ?false); ?true");
        assert_eq!(parse_game(&print_game(&g)).unwrap(), g);
    }
}
