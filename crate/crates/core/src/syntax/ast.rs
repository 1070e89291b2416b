use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;

use crate::Rational;

/// Arithmetic terms over exact rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Const(Rational),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    Neg(Box<Term>),
}

/// Hybrid games.
///
/// `Ode` carries a single evolving variable with an autonomous right-hand
/// side; the evolution domain constraint defaults to `true`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Game {
    Assign(String, Term),
    Ode {
        var: String,
        rhs: Term,
        constraint: Box<Formula>,
    },
    Test(Box<Formula>),
    Choice(Box<Game>, Box<Game>),
    Seq(Box<Game>, Box<Game>),
    Dual(Box<Game>),
    Repeat(Box<Game>),
}

/// Core formulas. Disjunction, implication, equivalence, equality and the
/// strict orders are sugar over this core:
///
/// * `P | Q`   is `!(!P & !Q)`
/// * `P -> Q`  is `!(P & !Q)`
/// * `P <-> Q` is `(P -> Q) & (Q -> P)`
/// * `e = f`   is `e >= f & f >= e`
/// * `e < f`   is `!(e >= f)`, `e > f` is `!(f >= e)`, `e <= f` is `f >= e`
/// * `e != f`  is `!(e = f)`
/// * `<a>P`    is `<a>(P, !P)` and `[a]Q` is `[a](!Q, Q)`
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Geq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
    /// `<g>(angel goal, demon goal)`
    Angel(Box<Game>, Box<Formula>, Box<Formula>),
    /// `[g](angel goal, demon goal)`
    Demon(Box<Game>, Box<Formula>, Box<Formula>),
}

#[allow(clippy::should_implement_trait)]
impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn int(value: i64) -> Term {
        Term::Const(Rational::from_integer(value.into()))
    }

    pub fn add(l: Term, r: Term) -> Term {
        Term::Add(Box::new(l), Box::new(r))
    }

    pub fn sub(l: Term, r: Term) -> Term {
        Term::Sub(Box::new(l), Box::new(r))
    }

    pub fn mul(l: Term, r: Term) -> Term {
        Term::Mul(Box::new(l), Box::new(r))
    }

    pub fn neg(t: Term) -> Term {
        Term::Neg(Box::new(t))
    }

    pub fn free_vars_into(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Const(_) => {}
            Term::Add(l, r) | Term::Sub(l, r) | Term::Mul(l, r) => {
                l.free_vars_into(out);
                r.free_vars_into(out);
            }
            Term::Neg(t) => t.free_vars_into(out),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.free_vars_into(&mut out);
        out
    }

    pub fn mentions(&self, var: &str) -> bool {
        match self {
            Term::Var(x) => x == var,
            Term::Const(_) => false,
            Term::Add(l, r) | Term::Sub(l, r) | Term::Mul(l, r) => {
                l.mentions(var) || r.mentions(var)
            }
            Term::Neg(t) => t.mentions(var),
        }
    }

    /// Replaces every occurrence of `var` by `by`. Terms have no binders.
    pub fn substitute(&self, var: &str, by: &Term) -> Term {
        match self {
            Term::Var(x) if x == var => by.clone(),
            Term::Var(_) | Term::Const(_) => self.clone(),
            Term::Add(l, r) => Term::add(l.substitute(var, by), r.substitute(var, by)),
            Term::Sub(l, r) => Term::sub(l.substitute(var, by), r.substitute(var, by)),
            Term::Mul(l, r) => Term::mul(l.substitute(var, by), r.substitute(var, by)),
            Term::Neg(t) => Term::neg(t.substitute(var, by)),
        }
    }

    pub fn is_zero_const(&self) -> bool {
        matches!(self, Term::Const(c) if c.is_zero())
    }
}

impl Game {
    pub fn assign(var: &str, e: Term) -> Game {
        Game::Assign(var.to_string(), e)
    }

    pub fn ode(var: &str, rhs: Term, constraint: Formula) -> Game {
        Game::Ode {
            var: var.to_string(),
            rhs,
            constraint: Box::new(constraint),
        }
    }

    pub fn test(q: Formula) -> Game {
        Game::Test(Box::new(q))
    }

    pub fn choice(l: Game, r: Game) -> Game {
        Game::Choice(Box::new(l), Box::new(r))
    }

    pub fn seq(l: Game, r: Game) -> Game {
        Game::Seq(Box::new(l), Box::new(r))
    }

    pub fn dual(g: Game) -> Game {
        Game::Dual(Box::new(g))
    }

    pub fn repeat(g: Game) -> Game {
        Game::Repeat(Box::new(g))
    }

    /// Variables the game may write.
    pub fn bound_vars_into(&self, out: &mut BTreeSet<String>) {
        match self {
            Game::Assign(x, _) | Game::Ode { var: x, .. } => {
                out.insert(x.clone());
            }
            Game::Test(_) => {}
            Game::Choice(l, r) | Game::Seq(l, r) => {
                l.bound_vars_into(out);
                r.bound_vars_into(out);
            }
            Game::Dual(g) | Game::Repeat(g) => g.bound_vars_into(out),
        }
    }

    pub fn bound_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.bound_vars_into(&mut out);
        out
    }

    /// Variables read anywhere inside the game (terms, tests, constraints).
    pub fn free_vars_into(&self, out: &mut BTreeSet<String>) {
        match self {
            Game::Assign(_, e) => e.free_vars_into(out),
            Game::Ode {
                var,
                rhs,
                constraint,
            } => {
                out.insert(var.clone());
                rhs.free_vars_into(out);
                constraint.free_vars_into(out);
            }
            Game::Test(q) => q.free_vars_into(out),
            Game::Choice(l, r) | Game::Seq(l, r) => {
                l.free_vars_into(out);
                r.free_vars_into(out);
            }
            Game::Dual(g) | Game::Repeat(g) => g.free_vars_into(out),
        }
    }

    pub fn contains_dual(&self) -> bool {
        match self {
            Game::Dual(_) => true,
            Game::Assign(..) | Game::Ode { .. } | Game::Test(_) => false,
            Game::Choice(l, r) | Game::Seq(l, r) => l.contains_dual() || r.contains_dual(),
            Game::Repeat(g) => g.contains_dual(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Game::Assign(..) | Game::Ode { .. } | Game::Test(_) => 1,
            Game::Choice(l, r) | Game::Seq(l, r) => 1 + l.size() + r.size(),
            Game::Dual(g) | Game::Repeat(g) => 1 + g.size(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Game::Assign(..) | Game::Ode { .. } | Game::Test(_) => 0,
            Game::Choice(l, r) | Game::Seq(l, r) => 1 + l.depth().max(r.depth()),
            Game::Dual(g) | Game::Repeat(g) => 1 + g.depth(),
        }
    }
}

#[allow(clippy::should_implement_trait)]
impl Formula {
    pub fn not(p: Formula) -> Formula {
        Formula::Not(Box::new(p))
    }

    pub fn and(p: Formula, q: Formula) -> Formula {
        Formula::And(Box::new(p), Box::new(q))
    }

    pub fn or(p: Formula, q: Formula) -> Formula {
        Formula::not(Formula::and(Formula::not(p), Formula::not(q)))
    }

    pub fn implies(p: Formula, q: Formula) -> Formula {
        Formula::not(Formula::and(p, Formula::not(q)))
    }

    pub fn equiv(p: Formula, q: Formula) -> Formula {
        Formula::and(
            Formula::implies(p.clone(), q.clone()),
            Formula::implies(q, p),
        )
    }

    pub fn geq(l: Term, r: Term) -> Formula {
        Formula::Geq(l, r)
    }

    pub fn eq(l: Term, r: Term) -> Formula {
        Formula::and(Formula::Geq(l.clone(), r.clone()), Formula::Geq(r, l))
    }

    pub fn forall(x: &str, p: Formula) -> Formula {
        Formula::Forall(x.to_string(), Box::new(p))
    }

    pub fn exists(x: &str, p: Formula) -> Formula {
        Formula::Exists(x.to_string(), Box::new(p))
    }

    pub fn angel(g: Game, p: Formula, q: Formula) -> Formula {
        Formula::Angel(Box::new(g), Box::new(p), Box::new(q))
    }

    pub fn demon(g: Game, p: Formula, q: Formula) -> Formula {
        Formula::Demon(Box::new(g), Box::new(p), Box::new(q))
    }

    /// `<g>P`, i.e. `<g>(P, !P)`.
    pub fn angel_single(g: Game, p: Formula) -> Formula {
        let np = Formula::not(p.clone());
        Formula::angel(g, p, np)
    }

    /// `[g]Q`, i.e. `[g](!Q, Q)`.
    pub fn demon_single(g: Game, q: Formula) -> Formula {
        let nq = Formula::not(q.clone());
        Formula::demon(g, nq, q)
    }

    /// Right-nested disjunction of the given formulas; `false` when empty.
    pub fn disjunction(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut items: Vec<Formula> = items.into_iter().collect();
        let Some(mut acc) = items.pop() else {
            return Formula::False;
        };
        while let Some(f) = items.pop() {
            acc = Formula::or(f, acc);
        }
        acc
    }

    /// Right-nested conjunction of the given formulas; `true` when empty.
    pub fn conjunction(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut items: Vec<Formula> = items.into_iter().collect();
        let Some(mut acc) = items.pop() else {
            return Formula::True;
        };
        while let Some(f) = items.pop() {
            acc = Formula::and(f, acc);
        }
        acc
    }

    /// Matches the disjunction sugar `!(!P & !Q)`.
    pub fn as_or(&self) -> Option<(&Formula, &Formula)> {
        if let Formula::Not(inner) = self {
            if let Formula::And(l, r) = inner.as_ref() {
                if let (Formula::Not(p), Formula::Not(q)) = (l.as_ref(), r.as_ref()) {
                    return Some((p, q));
                }
            }
        }
        None
    }

    /// Matches the implication sugar `!(P & !Q)`.
    pub fn as_implies(&self) -> Option<(&Formula, &Formula)> {
        if let Formula::Not(inner) = self {
            if let Formula::And(l, r) = inner.as_ref() {
                if let Formula::Not(q) = r.as_ref() {
                    return Some((l, q));
                }
            }
        }
        None
    }

    /// Matches the equivalence sugar `(P -> Q) & (Q -> P)`.
    pub fn as_equiv(&self) -> Option<(&Formula, &Formula)> {
        if let Formula::And(l, r) = self {
            if let (Some((p1, q1)), Some((q2, p2))) = (l.as_implies(), r.as_implies()) {
                if p1 == p2 && q1 == q2 {
                    return Some((p1, q1));
                }
            }
        }
        None
    }

    /// Matches the equality sugar `e >= f & f >= e`.
    pub fn as_eq(&self) -> Option<(&Term, &Term)> {
        if let Formula::And(l, r) = self {
            if let (Formula::Geq(a, b), Formula::Geq(c, d)) = (l.as_ref(), r.as_ref()) {
                if a == d && b == c {
                    return Some((a, b));
                }
            }
        }
        None
    }

    pub fn free_vars_into(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Geq(l, r) => {
                l.free_vars_into(out);
                r.free_vars_into(out);
            }
            Formula::Not(p) => p.free_vars_into(out),
            Formula::And(p, q) => {
                p.free_vars_into(out);
                q.free_vars_into(out);
            }
            Formula::Forall(x, p) | Formula::Exists(x, p) => {
                let mut inner = BTreeSet::new();
                p.free_vars_into(&mut inner);
                inner.remove(x);
                out.extend(inner);
            }
            // Over-approximation: goal variables count as free even when the
            // game must overwrite them.
            Formula::Angel(g, p, q) | Formula::Demon(g, p, q) => {
                g.free_vars_into(out);
                p.free_vars_into(out);
                q.free_vars_into(out);
            }
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.free_vars_into(&mut out);
        out
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_vars_into(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Forall(x, p) | Formula::Exists(x, p) => {
                out.insert(x.clone());
                p.all_vars_into(out);
            }
            Formula::Angel(g, p, q) | Formula::Demon(g, p, q) => {
                g.bound_vars_into(out);
                g.free_vars_into(out);
                p.all_vars_into(out);
                q.all_vars_into(out);
            }
            Formula::Not(p) => p.all_vars_into(out),
            Formula::And(p, q) => {
                p.all_vars_into(out);
                q.all_vars_into(out);
            }
            _ => self.free_vars_into(out),
        }
    }

    pub fn is_modal_free(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Geq(..) => true,
            Formula::Not(p) | Formula::Forall(_, p) | Formula::Exists(_, p) => p.is_modal_free(),
            Formula::And(p, q) => p.is_modal_free() && q.is_modal_free(),
            Formula::Angel(..) | Formula::Demon(..) => false,
        }
    }

    pub fn is_first_order_free(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Geq(..) => true,
            Formula::Not(p) => p.is_first_order_free(),
            Formula::And(p, q) => p.is_first_order_free() && q.is_first_order_free(),
            Formula::Forall(..) | Formula::Exists(..) => false,
            Formula::Angel(..) | Formula::Demon(..) => false,
        }
    }

    /// Number of immediate formula children addressable by proof paths.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::True | Formula::False | Formula::Geq(..) => vec![],
            Formula::Not(p) | Formula::Forall(_, p) | Formula::Exists(_, p) => vec![p],
            Formula::And(p, q) | Formula::Angel(_, p, q) | Formula::Demon(_, p, q) => vec![p, q],
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::printer::print_term(self))
    }
}

impl fmt::Display for Game {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::printer::print_game(self))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::printer::print_formula(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sugar_views_round_trip() {
        let p = Formula::geq(Term::var("x"), Term::int(1));
        let q = Formula::True;
        let or = Formula::or(p.clone(), q.clone());
        assert_eq!(or.as_or(), Some((&p, &q)));
        let imp = Formula::implies(p.clone(), q.clone());
        assert_eq!(imp.as_implies(), Some((&p, &q)));
        let eqv = Formula::equiv(p.clone(), q.clone());
        assert_eq!(eqv.as_equiv(), Some((&p, &q)));
        let eq = Formula::eq(Term::var("x"), Term::int(3));
        assert_eq!(eq.as_eq(), Some((&Term::var("x"), &Term::int(3))));
    }

    #[test]
    fn bound_and_free_vars() {
        let g = Game::seq(
            Game::assign("x", Term::add(Term::var("y"), Term::int(1))),
            Game::dual(Game::ode("t", Term::int(1), Formula::True)),
        );
        assert_eq!(
            g.bound_vars().into_iter().collect::<Vec<_>>(),
            vec!["t".to_string(), "x".to_string()]
        );
        let f = Formula::forall("y", Formula::geq(Term::var("y"), Term::var("z")));
        assert_eq!(f.free_vars().into_iter().collect::<Vec<_>>(), vec!["z"]);
    }

    #[test]
    fn disjunction_nests_right() {
        let a = Formula::True;
        let b = Formula::False;
        let c = Formula::geq(Term::var("x"), Term::int(0));
        let d = Formula::disjunction([a.clone(), b.clone(), c.clone()]);
        assert_eq!(d, Formula::or(a, Formula::or(b, c)));
        assert_eq!(Formula::disjunction([]), Formula::False);
    }
}
