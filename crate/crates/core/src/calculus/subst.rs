use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::KernelError;
use crate::syntax::{Formula, Game, Term};
use crate::Rational;

/// `f` with `e` for the free occurrences of `x`. Refuses, rather than
/// renames, when a binder would capture a variable of `e` or when a game
/// writes `x` or a variable of `e`.
pub fn subst_formula(f: &Formula, x: &str, e: &Term) -> Result<Formula, KernelError> {
    if !f.free_vars().contains(x) {
        return Ok(f.clone());
    }
    let fv = e.free_vars();
    Ok(match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Geq(l, r) => Formula::geq(l.substitute(x, e), r.substitute(x, e)),
        Formula::Not(p) => Formula::not(subst_formula(p, x, e)?),
        Formula::And(p, q) => Formula::and(subst_formula(p, x, e)?, subst_formula(q, x, e)?),
        Formula::Forall(y, p) | Formula::Exists(y, p) => {
            if fv.contains(y) {
                return Err(clash(x, e, &format!("quantifier over {y}")));
            }
            let p = subst_formula(p, x, e)?;
            if matches!(f, Formula::Forall(..)) {
                Formula::forall(y, p)
            } else {
                Formula::exists(y, p)
            }
        }
        Formula::Angel(g, p, q) | Formula::Demon(g, p, q) => {
            let bound = g.bound_vars();
            if bound.contains(x) || bound.iter().any(|b| fv.contains(b)) {
                return Err(clash(x, e, &format!("game {g}")));
            }
            let (g, p, q) = (subst_game(g, x, e)?, subst_formula(p, x, e)?, subst_formula(q, x, e)?);
            if matches!(f, Formula::Angel(..)) {
                Formula::angel(g, p, q)
            } else {
                Formula::demon(g, p, q)
            }
        }
    })
}

fn clash(x: &str, e: &Term, what: &str) -> KernelError {
    KernelError::SideConditionFailed(format!("substituting {e} for {x} clashes with the {what}"))
}

/// Only called once the game is known not to write `x` or any variable
/// of `e`.
fn subst_game(g: &Game, x: &str, e: &Term) -> Result<Game, KernelError> {
    Ok(match g {
        Game::Assign(y, t) => Game::assign(y, t.substitute(x, e)),
        Game::Ode { var, rhs, constraint } => {
            Game::ode(var, rhs.substitute(x, e), subst_formula(constraint, x, e)?)
        }
        Game::Test(q) => Game::test(subst_formula(q, x, e)?),
        Game::Choice(a, b) => Game::choice(subst_game(a, x, e)?, subst_game(b, x, e)?),
        Game::Seq(a, b) => Game::seq(subst_game(a, x, e)?, subst_game(b, x, e)?),
        Game::Dual(a) => Game::dual(subst_game(a, x, e)?),
        Game::Repeat(a) => Game::repeat(subst_game(a, x, e)?),
    })
}

/// Polynomial normal form: sorted monomial -> nonzero coefficient.
pub type Poly = BTreeMap<Vec<String>, Rational>;

pub fn normalize(t: &Term) -> Poly {
    fn add_into(acc: &mut Poly, p: Poly, sign: &Rational) {
        for (m, c) in p {
            let entry = acc.entry(m).or_insert_with(Rational::zero);
            *entry += c * sign;
        }
        acc.retain(|_, c| !c.is_zero());
    }
    match t {
        Term::Var(x) => Poly::from([(vec![x.clone()], Rational::one())]),
        Term::Const(c) => {
            let mut p = Poly::new();
            if !c.is_zero() {
                p.insert(vec![], c.clone());
            }
            p
        }
        Term::Add(a, b) | Term::Sub(a, b) => {
            let mut acc = normalize(a);
            let sign = if matches!(t, Term::Add(..)) {
                Rational::one()
            } else {
                -Rational::one()
            };
            add_into(&mut acc, normalize(b), &sign);
            acc
        }
        Term::Neg(a) => {
            let mut acc = Poly::new();
            add_into(&mut acc, normalize(a), &-Rational::one());
            acc
        }
        Term::Mul(a, b) => {
            let (pa, pb) = (normalize(a), normalize(b));
            let mut acc = Poly::new();
            for (ma, ca) in &pa {
                for (mb, cb) in &pb {
                    let mut m = ma.clone();
                    m.extend(mb.iter().cloned());
                    m.sort();
                    add_into(&mut acc, Poly::from([(m, ca * cb)]), &Rational::one());
                }
            }
            acc
        }
    }
}

/// The value of a variable-free term.
pub fn constant_value(t: &Term) -> Option<Rational> {
    let p = normalize(t);
    match p.len() {
        0 => Some(Rational::zero()),
        1 => p.get(&Vec::new()).cloned(),
        _ => None,
    }
}
