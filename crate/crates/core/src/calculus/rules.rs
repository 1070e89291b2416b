use std::collections::BTreeMap;
use std::fmt;

use super::leaves::{leaf_arith, leaf_model, taut};
use super::sequent::{Position, Sequent, Side};
use super::subst::{constant_value, normalize, subst_formula};
use super::KernelError;
use crate::model::Model;
use crate::syntax::{Category, Formula, Game, Term};
use crate::transform::systematize;

/// The axioms of the calculus, all used as directed equivalences.
pub const AXIOMS: [&str; 15] = [
    "assignA", "assignD", "contA", "contD", "testA", "testD", "choiceA", "choiceD", "seqA", "seqD", "dualA",
    "dualD", "iterA", "iterD", "det",
];

/// Derived equivalences, used like axioms.
pub const DERIVED_EQUIVALENCES: [&str; 5] = ["andAD", "iterAD", "id", "reA", "reD"];

/// Derived implications, closing a goal that is an instance.
pub const DERIVED_IMPLICATIONS: [&str; 2] = ["impAD", "spA"];

/// Rules whose premises are validities in the empty context.
pub const GLOBAL_RULES: [&str; 5] = ["FP", "M1", "M2", "FP2", "ind"];

pub const PROP_RULES: [&str; 11] = [
    "andR", "andL", "orR", "orL", "impR", "impL", "notR", "notL", "weakenL", "weakenR", "taut",
];

pub const FOL_RULES: [&str; 4] = ["existsR", "forallL", "forallR", "existsL"];

pub const LEAF_RULES: [&str; 2] = ["leafModel", "leafArith"];

/// Every rule name the kernel knows.
pub fn all_rules() -> impl Iterator<Item = &'static str> {
    AXIOMS
        .iter()
        .chain(DERIVED_EQUIVALENCES.iter())
        .chain(DERIVED_IMPLICATIONS.iter())
        .chain(GLOBAL_RULES.iter())
        .chain(PROP_RULES.iter())
        .chain(FOL_RULES.iter())
        .chain(LEAF_RULES.iter())
        .chain(["cut"].iter())
        .copied()
}

/// A metavariable binding.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Inst {
    Formula(Formula),
    Term(Term),
    Game(Game),
}

impl fmt::Display for Inst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Inst::Formula(p) => p.fmt(f),
            Inst::Term(t) => t.fmt(f),
            Inst::Game(g) => g.fmt(f),
        }
    }
}

/// Category a metavariable name is read as: `alpha`/`beta` are games,
/// `to` and capitalized names are formulas, other lowercase names terms.
pub fn key_category(key: &str) -> Category {
    match key {
        "alpha" | "beta" => Category::Game,
        "to" => Category::Formula,
        _ if key.starts_with(|c: char| c.is_ascii_lowercase()) => Category::Term,
        _ => Category::Formula,
    }
}

pub type Insts = BTreeMap<String, Inst>;

/// One node of a proof tree.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProofStep {
    pub id: String,
    pub rule: String,
    /// Rewrite right-to-left; the left side comes from the `to` binding.
    pub reverse: bool,
    pub position: Option<Position>,
    pub inst: Insts,
    pub premises: Vec<ProofStep>,
    /// Sequent this step is recorded to conclude, checked when present.
    pub expect: Option<Sequent>,
}

impl ProofStep {
    pub fn new(id: &str, rule: &str) -> ProofStep {
        ProofStep {
            id: id.to_string(),
            rule: rule.to_string(),
            ..ProofStep::default()
        }
    }

    pub fn at(mut self, pos: Position) -> ProofStep {
        self.position = Some(pos);
        self
    }

    pub fn with(mut self, key: &str, value: Inst) -> ProofStep {
        self.inst.insert(key.to_string(), value);
        self
    }

    pub fn reversed(mut self) -> ProofStep {
        self.reverse = true;
        self
    }

    pub fn premises(mut self, premises: Vec<ProofStep>) -> ProofStep {
        self.premises = premises;
        self
    }

    pub fn expecting(mut self, s: Sequent) -> ProofStep {
        self.expect = Some(s);
        self
    }
}

fn get<'i>(inst: &'i Insts, key: &str) -> Result<&'i Inst, KernelError> {
    inst.get(key).ok_or_else(|| KernelError::MissingInstantiation(key.to_string()))
}

fn bad_inst(key: &str, category: &str) -> KernelError {
    KernelError::BadInstantiation {
        key: key.to_string(),
        category: category.to_string(),
    }
}

fn inst_formula<'i>(inst: &'i Insts, key: &str) -> Result<&'i Formula, KernelError> {
    match get(inst, key)? {
        Inst::Formula(f) => Ok(f),
        _ => Err(bad_inst(key, "formula")),
    }
}

fn inst_term<'i>(inst: &'i Insts, key: &str) -> Result<&'i Term, KernelError> {
    match get(inst, key)? {
        Inst::Term(t) => Ok(t),
        _ => Err(bad_inst(key, "term")),
    }
}

fn inst_var<'i>(inst: &'i Insts, key: &str) -> Result<&'i str, KernelError> {
    match get(inst, key)? {
        Inst::Term(Term::Var(x)) => Ok(x),
        _ => Err(bad_inst(key, "variable")),
    }
}

fn inst_game<'i>(inst: &'i Insts, key: &str) -> Result<&'i Game, KernelError> {
    match get(inst, key)? {
        Inst::Game(g) => Ok(g),
        _ => Err(bad_inst(key, "game")),
    }
}

fn mismatch(expected: &str, found: &Formula) -> KernelError {
    KernelError::RedexMismatch {
        expected: expected.to_string(),
        found: found.to_string(),
    }
}

/// `<g>P`, i.e. `<g>(P, !P)`.
pub(crate) fn single_angel(f: &Formula) -> Option<(&Game, &Formula)> {
    match f {
        Formula::Angel(g, p, q) if matches!(q.as_ref(), Formula::Not(n) if n == p) => Some((g, p)),
        _ => None,
    }
}

/// `[g]Q`, i.e. `[g](!Q, Q)`.
pub(crate) fn single_demon(f: &Formula) -> Option<(&Game, &Formula)> {
    match f {
        Formula::Demon(g, p, q) if matches!(p.as_ref(), Formula::Not(n) if n == q) => Some((g, q)),
        _ => None,
    }
}

fn as_and(f: &Formula) -> Option<(&Formula, &Formula)> {
    match f {
        Formula::And(p, q) => Some((p, q)),
        _ => None,
    }
}

fn geq_zero(t: &str) -> Formula {
    Formula::geq(Term::var(t), Term::int(0))
}

fn loop_unfold(a: &Game) -> Game {
    Game::seq(a.clone(), Game::repeat(a.clone()))
}

/// Checks the side conditions of the solution axioms and returns
/// `(x, time variable, solution term)`.
fn ode_solution<'f>(
    redex: &Formula,
    g: &'f Game,
    inst: &Insts,
) -> Result<(&'f str, String, Term), KernelError> {
    let Game::Ode { var, rhs, constraint } = g else {
        unreachable!("caller matched an ode")
    };
    if **constraint != Formula::True {
        return Err(KernelError::SideConditionFailed(format!(
            "evolution domain constraint {constraint} is not true"
        )));
    }
    let c = constant_value(rhs)
        .ok_or_else(|| KernelError::SideConditionFailed(format!("right-hand side {rhs} is not a constant")))?;
    let t = inst_var(inst, "time")?.to_string();
    let mut used = std::collections::BTreeSet::new();
    redex.all_vars_into(&mut used);
    if t == *var || used.contains(&t) {
        return Err(KernelError::SideConditionFailed(format!("time variable {t} is not fresh")));
    }
    let sol = inst_term(inst, "sol")?.clone();
    let want = Term::add(Term::var(var), Term::mul(Term::Const(c), Term::var(&t)));
    if normalize(&sol) != normalize(&want) {
        return Err(KernelError::SideConditionFailed(format!(
            "{sol} does not solve {var}'={rhs} with {var} at time 0"
        )));
    }
    Ok((var, t, sol))
}

/// Left-to-right instance of an axiom or derived equivalence at `f`.
pub fn rewrite(rule: &str, f: &Formula, inst: &Insts) -> Result<Formula, KernelError> {
    use Formula as F;
    match rule {
        "assignA" | "assignD" => match f {
            F::Angel(g, p, _) if rule == "assignA" => match g.as_ref() {
                Game::Assign(x, e) => subst_formula(p, x, e),
                _ => Err(mismatch("<x:=e>(P, Q)", f)),
            },
            F::Demon(g, _, q) if rule == "assignD" => match g.as_ref() {
                Game::Assign(x, e) => subst_formula(q, x, e),
                _ => Err(mismatch("[x:=e](P, Q)", f)),
            },
            _ => Err(mismatch(if rule == "assignA" { "<x:=e>(P, Q)" } else { "[x:=e](P, Q)" }, f)),
        },
        "contA" => match f {
            F::Angel(g, p, q) if matches!(g.as_ref(), Game::Ode { .. }) => {
                let (x, t, sol) = ode_solution(f, g, inst)?;
                let body = F::angel(Game::assign(x, sol), (**p).clone(), (**q).clone());
                Ok(F::exists(&t, F::and(geq_zero(&t), body)))
            }
            _ => Err(mismatch("<{x'=c}>(P, Q)", f)),
        },
        "contD" => match f {
            F::Demon(g, p, q) if matches!(g.as_ref(), Game::Ode { .. }) => {
                let (x, t, sol) = ode_solution(f, g, inst)?;
                let all = F::demon(Game::assign(x, sol.clone()), (**p).clone(), (**q).clone());
                let some = F::angel(
                    Game::assign(x, sol),
                    F::and((**p).clone(), (**q).clone()),
                    (**q).clone(),
                );
                Ok(F::or(
                    F::forall(&t, F::implies(geq_zero(&t), all)),
                    F::exists(&t, F::and(geq_zero(&t), some)),
                ))
            }
            _ => Err(mismatch("[{x'=c}](P, Q)", f)),
        },
        "testA" => match f {
            F::Angel(g, p, _) => match g.as_ref() {
                Game::Test(r) => Ok(F::and((**r).clone(), (**p).clone())),
                _ => Err(mismatch("<?R>(P, Q)", f)),
            },
            _ => Err(mismatch("<?R>(P, Q)", f)),
        },
        "testD" => match f {
            F::Demon(g, _, q) => match g.as_ref() {
                Game::Test(r) => Ok(F::or(F::not((**r).clone()), (**q).clone())),
                _ => Err(mismatch("[?R](P, Q)", f)),
            },
            _ => Err(mismatch("[?R](P, Q)", f)),
        },
        "choiceA" => match f {
            F::Angel(g, p, q) => match g.as_ref() {
                Game::Choice(a, b) => Ok(F::or(
                    F::angel((**a).clone(), (**p).clone(), (**q).clone()),
                    F::angel((**b).clone(), (**p).clone(), (**q).clone()),
                )),
                _ => Err(mismatch("<a ++ b>(P, Q)", f)),
            },
            _ => Err(mismatch("<a ++ b>(P, Q)", f)),
        },
        "choiceD" => match f {
            F::Demon(g, p, q) => match g.as_ref() {
                Game::Choice(a, b) => {
                    let d = |h: &Game| F::demon(h.clone(), (**p).clone(), (**q).clone());
                    let an = |h: &Game| F::angel(h.clone(), (**p).clone(), (**q).clone());
                    Ok(F::disjunction([
                        F::and(d(a), d(b)),
                        F::and(d(a), an(a)),
                        F::and(d(b), an(b)),
                    ]))
                }
                _ => Err(mismatch("[a ++ b](P, Q)", f)),
            },
            _ => Err(mismatch("[a ++ b](P, Q)", f)),
        },
        "seqA" | "seqD" => {
            let (g, p, q, angel) = match f {
                F::Angel(g, p, q) if rule == "seqA" => (g, p, q, true),
                F::Demon(g, p, q) if rule == "seqD" => (g, p, q, false),
                _ => return Err(mismatch(if rule == "seqA" { "<a; b>(P, Q)" } else { "[a; b](P, Q)" }, f)),
            };
            match g.as_ref() {
                Game::Seq(a, b) => {
                    let pa = F::angel((**b).clone(), (**p).clone(), (**q).clone());
                    let pd = F::demon((**b).clone(), (**p).clone(), (**q).clone());
                    Ok(if angel {
                        F::angel((**a).clone(), pa, pd)
                    } else {
                        F::demon((**a).clone(), pa, pd)
                    })
                }
                _ => Err(mismatch(if angel { "<a; b>(P, Q)" } else { "[a; b](P, Q)" }, f)),
            }
        }
        "dualA" => match f {
            F::Angel(g, p, q) => match g.as_ref() {
                Game::Dual(a) => Ok(F::demon((**a).clone(), (**q).clone(), (**p).clone())),
                _ => Err(mismatch("<a^d>(P, Q)", f)),
            },
            _ => Err(mismatch("<a^d>(P, Q)", f)),
        },
        "dualD" => match f {
            F::Demon(g, p, q) => match g.as_ref() {
                Game::Dual(a) => Ok(F::angel((**a).clone(), (**q).clone(), (**p).clone())),
                _ => Err(mismatch("[a^d](P, Q)", f)),
            },
            _ => Err(mismatch("[a^d](P, Q)", f)),
        },
        "iterA" => match f {
            F::Angel(g, p, q) => match g.as_ref() {
                Game::Repeat(a) => Ok(F::or(
                    (**p).clone(),
                    F::angel(loop_unfold(a), (**p).clone(), (**q).clone()),
                )),
                _ => Err(mismatch("<a*>(P, Q)", f)),
            },
            _ => Err(mismatch("<a*>(P, Q)", f)),
        },
        "iterD" => match f {
            F::Demon(g, p, q) => match g.as_ref() {
                Game::Repeat(a) => {
                    let (p, q) = ((**p).clone(), (**q).clone());
                    let u = loop_unfold(a);
                    Ok(F::disjunction([
                        F::and(p.clone(), q.clone()),
                        F::and(F::angel(u.clone(), p.clone(), q.clone()), F::demon(u.clone(), p, q.clone())),
                        F::and(q.clone(), F::demon_single(u, q)),
                    ]))
                }
                _ => Err(mismatch("[a*](P, Q)", f)),
            },
            _ => Err(mismatch("[a*](P, Q)", f)),
        },
        "det" => match f {
            F::Not(inner) => match single_angel(inner) {
                Some((g, p)) => Ok(F::demon_single(g.clone(), F::not(p.clone()))),
                None => Err(mismatch("!<a>P", f)),
            },
            _ => Err(mismatch("!<a>P", f)),
        },
        "andAD" => {
            let pat = "<a>(P, Q) & [a](P, Q)";
            match as_and(f) {
                Some((F::Angel(g, p, q), F::Demon(g2, p2, q2))) if g == g2 && p == p2 && q == q2 => Ok(
                    F::angel_single(systematize(g), F::and((**p).clone(), (**q).clone())),
                ),
                _ => Err(mismatch(pat, f)),
            }
        }
        "iterAD" => {
            let pat = "<a*>(P, Q) & [a*](P, Q)";
            match as_and(f) {
                Some((F::Angel(g, p, q), F::Demon(g2, p2, q2))) if g == g2 && p == p2 && q == q2 => {
                    let Game::Repeat(a) = g.as_ref() else {
                        return Err(mismatch(pat, f));
                    };
                    let u = loop_unfold(a);
                    Ok(F::or(
                        F::and((**p).clone(), (**q).clone()),
                        F::and(
                            F::angel(u.clone(), (**p).clone(), (**q).clone()),
                            F::demon(u, (**p).clone(), (**q).clone()),
                        ),
                    ))
                }
                _ => Err(mismatch(pat, f)),
            }
        }
        "id" => {
            let pat = "<a^-d>(P & Q)";
            let (h, pq) = single_angel(f).ok_or_else(|| mismatch(pat, f))?;
            let (p, q) = as_and(pq).ok_or_else(|| mismatch(pat, f))?;
            let alpha = inst_game(inst, "alpha")?;
            if systematize(alpha) != *h {
                return Err(KernelError::SideConditionFailed(format!(
                    "{h} is not the systematization of {alpha}"
                )));
            }
            Ok(F::or(
                f.clone(),
                F::and(F::angel_single(alpha.clone(), p.clone()), F::demon_single(alpha.clone(), q.clone())),
            ))
        }
        "reA" | "reD" => {
            let pat = if rule == "reA" {
                "<a^-d><b^-d>(P & Q) | <a>(<b^-d>(P & Q) | <b>P)"
            } else {
                "<a^-d><b^-d>(P & Q) | [a](<b^-d>(P & Q) | [b]Q)"
            };
            let err = || mismatch(pat, f);
            let (l, r) = f.as_or().ok_or_else(err)?;
            let (sa, inner) = single_angel(l).ok_or_else(err)?;
            let (sb, pq) = single_angel(inner).ok_or_else(err)?;
            let (p, q) = as_and(pq).ok_or_else(err)?;
            let (a, body) = if rule == "reA" {
                single_angel(r).ok_or_else(err)?
            } else {
                single_demon(r).ok_or_else(err)?
            };
            let (b1, b2) = body.as_or().ok_or_else(err)?;
            if b1 != inner {
                return Err(err());
            }
            let (b, goal) = if rule == "reA" {
                single_angel(b2).ok_or_else(err)?
            } else {
                single_demon(b2).ok_or_else(err)?
            };
            let want = if rule == "reA" { p } else { q };
            if goal != want || systematize(a) != *sa || systematize(b) != *sb {
                return Err(err());
            }
            Ok(F::or(
                l.clone(),
                if rule == "reA" {
                    F::angel_single(a.clone(), F::angel_single(b.clone(), p.clone()))
                } else {
                    F::demon_single(a.clone(), F::demon_single(b.clone(), q.clone()))
                },
            ))
        }
        _ => Err(KernelError::UnknownRule(rule.to_string())),
    }
}

/// Whether `f` is an instance of a derived implication.
fn check_implication(rule: &str, f: &Formula) -> Result<(), KernelError> {
    let pat = match rule {
        "impAD" => "<a>P & [a]Q -> <a^-d>(P & Q)",
        _ => "<a>(<b^-d>(P & Q) | <b>P) & !<a><b>P -> <a^-d><b^-d>(P & Q)",
    };
    let err = || mismatch(pat, f);
    let (lhs, rhs) = f.as_implies().ok_or_else(err)?;
    let (l1, l2) = as_and(lhs).ok_or_else(err)?;
    let ok = if rule == "impAD" {
        let (a, p) = single_angel(l1).ok_or_else(err)?;
        let (a2, q) = single_demon(l2).ok_or_else(err)?;
        a == a2 && *rhs == Formula::angel_single(systematize(a), Formula::and(p.clone(), q.clone()))
    } else {
        let (a, body) = single_angel(l1).ok_or_else(err)?;
        let (b1, b2) = body.as_or().ok_or_else(err)?;
        let (sb, pq) = single_angel(b1).ok_or_else(err)?;
        let (b, p) = single_angel(b2).ok_or_else(err)?;
        let Formula::Not(neg) = l2 else { return Err(err()) };
        let (p0, _) = as_and(pq).ok_or_else(err)?;
        *sb == systematize(b)
            && p0 == p
            && **neg == Formula::angel_single(a.clone(), Formula::angel_single(b.clone(), p.clone()))
            && *rhs == Formula::angel_single(systematize(a), b1.clone())
    };
    if ok {
        Ok(())
    } else {
        Err(err())
    }
}

/// Premises of a rule whose premises hold in the empty context.
fn global_premises(rule: &str, f: &Formula) -> Result<Vec<Formula>, KernelError> {
    use Formula as F;
    let pat = match rule {
        "FP" => "<a*>(P, Q) -> R1 | R2",
        "M1" | "M2" => "<a>(P1, Q1) -> <a>(P2, Q2)",
        "FP2" => "<a*>(P, Q) & [a*](P, Q) -> R",
        _ => "Q -> [a*](P, Q)",
    };
    let err = || mismatch(pat, f);
    let (lhs, rhs) = f.as_implies().ok_or_else(err)?;
    match rule {
        "FP" => {
            let F::Angel(g, p, q) = lhs else { return Err(err()) };
            let Game::Repeat(a) = g.as_ref() else { return Err(err()) };
            let (r1, r2) = rhs.as_or().ok_or_else(err)?;
            Ok(vec![
                F::implies(F::or((**p).clone(), F::angel_single((**a).clone(), r1.clone())), r1.clone()),
                F::implies(
                    F::or(
                        F::and((**p).clone(), (**q).clone()),
                        F::and(
                            F::angel((**a).clone(), r2.clone(), r2.clone()),
                            F::demon((**a).clone(), r2.clone(), r2.clone()),
                        ),
                    ),
                    r2.clone(),
                ),
            ])
        }
        "M1" | "M2" => match (lhs, rhs) {
            (F::Angel(a, p1, q1), F::Angel(a2, p2, q2)) if a == a2 => {
                let first = F::implies((**p1).clone(), (**p2).clone());
                let second = if rule == "M1" {
                    F::implies((**q1).clone(), (**q2).clone())
                } else {
                    F::implies(F::and((**p1).clone(), (**q1).clone()), F::False)
                };
                Ok(vec![first, second])
            }
            _ => Err(err()),
        },
        "FP2" => match as_and(lhs) {
            Some((F::Angel(g, p, q), F::Demon(g2, p2, q2))) if g == g2 && p == p2 && q == q2 => {
                let Game::Repeat(a) = g.as_ref() else { return Err(err()) };
                Ok(vec![F::implies(
                    F::or(
                        F::and((**p).clone(), (**q).clone()),
                        F::and(
                            F::angel((**a).clone(), rhs.clone(), rhs.clone()),
                            F::demon((**a).clone(), rhs.clone(), rhs.clone()),
                        ),
                    ),
                    rhs.clone(),
                )])
            }
            _ => Err(err()),
        },
        _ => match rhs {
            F::Demon(g, _, q) if **q == *lhs => {
                let Game::Repeat(a) = g.as_ref() else { return Err(err()) };
                Ok(vec![F::implies(lhs.clone(), F::demon_single((**a).clone(), lhs.clone()))])
            }
            _ => Err(err()),
        },
    }
}

fn need_position(step: &ProofStep) -> Result<&Position, KernelError> {
    step.position
        .as_ref()
        .ok_or_else(|| KernelError::BadPosition(format!("rule {} needs a position", step.rule)))
}

/// Position of a top-level formula on the given side.
fn top_level(s: &Sequent, step: &ProofStep, side: Side) -> Result<usize, KernelError> {
    let pos = need_position(step)?;
    let name = match side {
        Side::Left => "an antecedent",
        Side::Right => "a succedent",
    };
    if pos.side != side || !pos.is_top() {
        return Err(KernelError::BadPosition(format!(
            "rule {} applies to {name} formula, not {pos}",
            step.rule
        )));
    }
    if pos.index >= s.side(side).len() {
        return Err(KernelError::BadPosition(format!("no formula at {pos}")));
    }
    Ok(pos.index)
}

fn fresh_in(s: &Sequent, skip: (Side, usize), y: &str) -> bool {
    let clash = |side: Side, v: &Vec<Formula>| {
        v.iter()
            .enumerate()
            .any(|(i, f)| (side, i) != skip && f.free_vars().contains(y))
    };
    !clash(Side::Left, &s.antecedent) && !clash(Side::Right, &s.succedent)
}

/// Premise sequents of `step` applied to `s`. Leaves return no premises
/// when discharged.
pub fn apply_rule(s: &Sequent, step: &ProofStep, model: Option<&Model>) -> Result<Vec<Sequent>, KernelError> {
    use Formula as F;
    let rule = step.rule.as_str();
    if AXIOMS.contains(&rule) || DERIVED_EQUIVALENCES.contains(&rule) {
        let pos = need_position(step)?;
        let redex = s
            .at(pos)
            .ok_or_else(|| KernelError::BadPosition(format!("no subformula at {pos}")))?;
        let out = if step.reverse {
            let to = inst_formula(&step.inst, "to")?;
            let forward = rewrite(rule, to, &step.inst)?;
            if forward != *redex {
                return Err(KernelError::RedexMismatch {
                    expected: forward.to_string(),
                    found: redex.to_string(),
                });
            }
            to.clone()
        } else {
            rewrite(rule, redex, &step.inst)?
        };
        return Ok(vec![s.replace(pos, out).expect("position exists")]);
    }
    if DERIVED_IMPLICATIONS.contains(&rule) {
        let i = top_level(s, step, Side::Right)?;
        check_implication(rule, &s.succedent[i])?;
        return Ok(vec![]);
    }
    if GLOBAL_RULES.contains(&rule) {
        let i = top_level(s, step, Side::Right)?;
        let premises = global_premises(rule, &s.succedent[i])?;
        return Ok(premises.into_iter().map(Sequent::goal).collect());
    }
    let top = |side| top_level(s, step, side);
    let mut out = s.clone();
    match rule {
        "cut" => {
            let c = inst_formula(&step.inst, "C")?;
            let mut left = s.clone();
            left.succedent.push(c.clone());
            let mut right = s.clone();
            right.antecedent.push(c.clone());
            Ok(vec![left, right])
        }
        "andR" | "orL" => {
            let side = if rule == "andR" { Side::Right } else { Side::Left };
            let i = top(side)?;
            let f = &s.side(side)[i];
            let (a, b) = if rule == "andR" { as_and(f) } else { f.as_or() }
                .ok_or_else(|| mismatch(if rule == "andR" { "P & Q" } else { "P | Q" }, f))?;
            let mut first = s.clone();
            first.side_mut(side)[i] = a.clone();
            let mut second = s.clone();
            second.side_mut(side)[i] = b.clone();
            Ok(vec![first, second])
        }
        "andL" | "orR" => {
            let side = if rule == "andL" { Side::Left } else { Side::Right };
            let i = top(side)?;
            let f = &s.side(side)[i];
            let (a, b) = if rule == "andL" { as_and(f) } else { f.as_or() }
                .ok_or_else(|| mismatch(if rule == "andL" { "P & Q" } else { "P | Q" }, f))?;
            out.side_mut(side)[i] = a.clone();
            out.side_mut(side).insert(i + 1, b.clone());
            Ok(vec![out])
        }
        "impR" => {
            let i = top(Side::Right)?;
            let (a, b) = s.succedent[i]
                .as_implies()
                .ok_or_else(|| mismatch("P -> Q", &s.succedent[i]))?;
            out.succedent[i] = b.clone();
            out.antecedent.push(a.clone());
            Ok(vec![out])
        }
        "impL" => {
            let i = top(Side::Left)?;
            let (a, b) = s.antecedent[i]
                .as_implies()
                .ok_or_else(|| mismatch("P -> Q", &s.antecedent[i]))?;
            let mut first = s.clone();
            first.antecedent.remove(i);
            first.succedent.push(a.clone());
            out.antecedent[i] = b.clone();
            Ok(vec![first, out])
        }
        "notR" | "notL" => {
            let (side, other) = if rule == "notR" {
                (Side::Right, Side::Left)
            } else {
                (Side::Left, Side::Right)
            };
            let i = top(side)?;
            let F::Not(a) = &s.side(side)[i] else {
                return Err(mismatch("!P", &s.side(side)[i]));
            };
            out.side_mut(side).remove(i);
            out.side_mut(other).push((**a).clone());
            Ok(vec![out])
        }
        "weakenL" | "weakenR" => {
            let side = if rule == "weakenL" { Side::Left } else { Side::Right };
            let i = top(side)?;
            out.side_mut(side).remove(i);
            Ok(vec![out])
        }
        "existsR" | "forallL" => {
            let side = if rule == "existsR" { Side::Right } else { Side::Left };
            let i = top(side)?;
            let f = &s.side(side)[i];
            let (x, body) = match (f, rule) {
                (F::Exists(x, p), "existsR") | (F::Forall(x, p), "forallL") => (x, p),
                _ => return Err(mismatch(if rule == "existsR" { "exists x P" } else { "forall x P" }, f)),
            };
            let e = inst_term(&step.inst, "e")?;
            out.side_mut(side)[i] = subst_formula(body, x, e)?;
            Ok(vec![out])
        }
        "forallR" | "existsL" => {
            let side = if rule == "forallR" { Side::Right } else { Side::Left };
            let i = top(side)?;
            let f = &s.side(side)[i];
            let (x, body) = match (f, rule) {
                (F::Forall(x, p), "forallR") | (F::Exists(x, p), "existsL") => (x, p),
                _ => return Err(mismatch(if rule == "forallR" { "forall x P" } else { "exists x P" }, f)),
            };
            let y = match step.inst.get("y") {
                Some(_) => inst_var(&step.inst, "y")?.to_string(),
                None => x.clone(),
            };
            if !fresh_in(s, (side, i), &y) || (y != *x && body.free_vars().contains(&y)) {
                return Err(KernelError::SideConditionFailed(format!("{y} is not fresh")));
            }
            out.side_mut(side)[i] = subst_formula(body, x, &Term::var(&y))?;
            Ok(vec![out])
        }
        "taut" => taut(s).map(|_| vec![]).map_err(KernelError::LeafFailed),
        "leafArith" => leaf_arith(s, model).map(|_| vec![]).map_err(KernelError::LeafFailed),
        "leafModel" => leaf_model(s, model).map(|_| vec![]).map_err(KernelError::LeafFailed),
        _ => Err(KernelError::UnknownRule(rule.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_term};

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn rw(rule: &str, s: &str) -> Result<Formula, KernelError> {
        rewrite(rule, &f(s), &Insts::new())
    }

    #[test]
    fn axiom_shapes() {
        assert_eq!(rw("testA", "<?x>=1>(y>=1, y>=2)").unwrap(), f("x>=1 & y>=1"));
        assert_eq!(rw("testD", "[?x>=1](y>=1, y>=2)").unwrap(), f("!x>=1 | y>=2"));
        assert_eq!(rw("dualA", "<(x:=1)^d>(y>=1, y>=2)").unwrap(), f("[x:=1](y>=2, y>=1)"));
        assert_eq!(rw("dualD", "[(x:=1)^d](y>=1, y>=2)").unwrap(), f("<x:=1>(y>=2, y>=1)"));
        assert_eq!(rw("assignA", "<x:=x+1>(x>=1, x>=2)").unwrap(), f("x+1>=1"));
        assert_eq!(rw("assignD", "[x:=x+1](x>=1, x>=2)").unwrap(), f("x+1>=2"));
        assert_eq!(
            rw("choiceA", "<x:=1 ++ ?true>(P>=0, Q>=0)").unwrap(),
            f("<x:=1>(P>=0, Q>=0) | <?true>(P>=0, Q>=0)")
        );
        assert_eq!(
            rw("seqD", "[x:=1; ?true](P>=0, Q>=0)").unwrap(),
            f("[x:=1](<?true>(P>=0, Q>=0), [?true](P>=0, Q>=0))")
        );
        assert_eq!(
            rw("iterA", "<(x:=1)*>(P>=0, Q>=0)").unwrap(),
            f("P>=0 | <x:=1; (x:=1)*>(P>=0, Q>=0)")
        );
        assert_eq!(rw("det", "!<x:=1>x>=1").unwrap(), f("[x:=1]!x>=1"));
        assert!(matches!(rw("testA", "<x:=1>(true, true)"), Err(KernelError::RedexMismatch { .. })));
        assert!(matches!(rw("nope", "true"), Err(KernelError::UnknownRule(_))));
    }

    #[test]
    fn ode_side_conditions() {
        let mut inst = Insts::new();
        inst.insert("time".into(), Inst::Term(Term::var("s")));
        inst.insert("sol".into(), Inst::Term(parse_term("t+s").unwrap()));
        let out = rewrite("contA", &f("<{t'=1}>(t>=5, o>=3)"), &inst).unwrap();
        assert_eq!(out, f("exists s (s>=0 & <t:=t+s>(t>=5, o>=3))"));
        inst.insert("sol".into(), Inst::Term(parse_term("t+2*s").unwrap()));
        assert!(matches!(
            rewrite("contA", &f("<{t'=1}>(t>=5, o>=3)"), &inst),
            Err(KernelError::SideConditionFailed(_))
        ));
        inst.insert("time".into(), Inst::Term(Term::var("o")));
        inst.insert("sol".into(), Inst::Term(parse_term("t+o").unwrap()));
        assert!(rewrite("contA", &f("<{t'=1}>(t>=5, o>=3)"), &inst).is_err());
        inst.insert("time".into(), Inst::Term(Term::var("s")));
        inst.insert("sol".into(), Inst::Term(parse_term("t+s").unwrap()));
        assert!(rewrite("contA", &f("<{t'=t}>(t>=5, o>=3)"), &inst).is_err());
        assert!(rewrite("contA", &f("<{t'=1 & t<=4}>(t>=5, o>=3)"), &inst).is_err());
    }

    #[test]
    fn sequent_rules() {
        let s = Sequent::parse("a>=0 & b>=0 ==> c>=0 | d>=0").unwrap();
        let out = apply_rule(&s, &ProofStep::new("s", "andL").at("L0".parse().unwrap()), None).unwrap();
        assert_eq!(out, vec![Sequent::parse("a>=0, b>=0 ==> c>=0 | d>=0").unwrap()]);
        let out = apply_rule(&s, &ProofStep::new("s", "orR").at("R0".parse().unwrap()), None).unwrap();
        assert_eq!(out, vec![Sequent::parse("a>=0 & b>=0 ==> c>=0, d>=0").unwrap()]);
        let bad = apply_rule(&s, &ProofStep::new("s", "andL").at("R0".parse().unwrap()), None);
        assert!(matches!(bad, Err(KernelError::BadPosition(_))));
        let cut = ProofStep::new("s", "cut").with("C", Inst::Formula(f("e>=0")));
        assert_eq!(apply_rule(&s, &cut, None).unwrap().len(), 2);
    }

    #[test]
    fn quantifier_rules() {
        let s = Sequent::parse("x>=0 ==> forall y y>=y").unwrap();
        let ok = ProofStep::new("s", "forallR").at("R0".parse().unwrap());
        assert_eq!(apply_rule(&s, &ok, None).unwrap(), vec![Sequent::parse("x>=0 ==> y>=y").unwrap()]);
        let bad = ok.clone().with("y", Inst::Term(Term::var("x")));
        assert!(matches!(apply_rule(&s, &bad, None), Err(KernelError::SideConditionFailed(_))));
        let s = Sequent::parse("==> exists s (s>=0 & s+1>=3)").unwrap();
        let step = ProofStep::new("s", "existsR")
            .at("R0".parse().unwrap())
            .with("e", Inst::Term(Term::int(2)));
        assert_eq!(apply_rule(&s, &step, None).unwrap(), vec![Sequent::parse("==> 2>=0 & 2+1>=3").unwrap()]);
    }

    #[test]
    fn global_rule_premises() {
        let s = Sequent::goal(f("<(x:=x+1)*>(x>=1, x>=2) -> x>=0 | x>=3"));
        let out = apply_rule(&s, &ProofStep::new("s", "FP").at("R0".parse().unwrap()), None).unwrap();
        assert_eq!(
            out,
            vec![
                Sequent::goal(f("x>=1 | <x:=x+1>x>=0 -> x>=0")),
                Sequent::goal(f("x>=1 & x>=2 | <x:=x+1>(x>=3, x>=3) & [x:=x+1](x>=3, x>=3) -> x>=3")),
            ]
        );
        let m = Sequent::goal(f("<x:=1>(a>=0, b>=0) -> <x:=1>(c>=0, d>=0)"));
        let out = apply_rule(&m, &ProofStep::new("s", "M2").at("R0".parse().unwrap()), None).unwrap();
        assert_eq!(out[1], Sequent::goal(f("a>=0 & b>=0 -> false")));
    }

    #[test]
    fn reverse_rewrites_check_the_target() {
        let s = Sequent::goal(f("[x:=1](b>=0, a>=0)"));
        let step = ProofStep::new("s", "dualA")
            .reversed()
            .at("R0".parse().unwrap())
            .with("to", Inst::Formula(f("<(x:=1)^d>(a>=0, b>=0)")));
        assert_eq!(apply_rule(&s, &step, None).unwrap(), vec![Sequent::goal(f("<(x:=1)^d>(a>=0, b>=0)"))]);
        let wrong = step.with("to", Inst::Formula(f("<(x:=1)^d>(b>=0, a>=0)")));
        assert!(apply_rule(&s, &wrong, None).is_err());
    }

    #[test]
    fn rule_names_are_unique() {
        let names: Vec<_> = all_rules().collect();
        let set: std::collections::BTreeSet<_> = names.iter().collect();
        assert_eq!(names.len(), set.len());
    }
}
