use std::collections::HashMap;

use super::sequent::Sequent;
use super::subst::{constant_value, subst_formula};
use crate::model::Model;
use crate::semantics::SemContext;
use crate::syntax::{Formula, Term};

pub const MAX_TAUT_ATOMS: usize = 16;

/// Propositional skeleton with atoms replaced by indices.
enum Prop {
    Const(bool),
    Atom(usize),
    Not(Box<Prop>),
    And(Box<Prop>, Box<Prop>),
}

impl Prop {
    fn eval(&self, valuation: u32) -> bool {
        match self {
            Prop::Const(b) => *b,
            Prop::Atom(i) => valuation >> i & 1 == 1,
            Prop::Not(p) => !p.eval(valuation),
            Prop::And(p, q) => p.eval(valuation) && q.eval(valuation),
        }
    }
}

fn skeleton<'f>(f: &'f Formula, atoms: &mut Vec<&'f Formula>, index: &mut HashMap<&'f Formula, usize>) -> Prop {
    match f {
        Formula::True => Prop::Const(true),
        Formula::False => Prop::Const(false),
        Formula::Not(p) => Prop::Not(Box::new(skeleton(p, atoms, index))),
        Formula::And(p, q) => Prop::And(Box::new(skeleton(p, atoms, index)), Box::new(skeleton(q, atoms, index))),
        _ => Prop::Atom(*index.entry(f).or_insert_with(|| {
            atoms.push(f);
            atoms.len() - 1
        })),
    }
}

/// Propositional validity of the sequent, with every non-connective
/// subformula an opaque atom.
pub fn taut(s: &Sequent) -> Result<(), String> {
    let f = s.as_formula();
    let mut atoms = Vec::new();
    let prop = skeleton(&f, &mut atoms, &mut HashMap::new());
    if atoms.len() > MAX_TAUT_ATOMS {
        return Err(format!("{} atoms exceed the cap of {MAX_TAUT_ATOMS}", atoms.len()));
    }
    match (0..(1u32 << atoms.len())).find(|v| !prop.eval(*v)) {
        None => Ok(()),
        Some(v) => {
            let witness: Vec<String> = atoms
                .iter()
                .enumerate()
                .map(|(i, a)| format!("{a}={}", v >> i & 1 == 1))
                .collect();
            Err(format!("not a tautology; falsified by {}", witness.join(", ")))
        }
    }
}

fn eval_ground(f: &Formula, model: Option<&Model>) -> Option<bool> {
    match f {
        Formula::True => Some(true),
        Formula::False => Some(false),
        Formula::Geq(l, r) => Some(constant_value(l)? >= constant_value(r)?),
        Formula::Not(p) => eval_ground(p, model).map(|b| !b),
        Formula::And(p, q) => {
            let (a, b) = (eval_ground(p, model), eval_ground(q, model));
            match (a, b) {
                (Some(false), _) | (_, Some(false)) => Some(false),
                (Some(true), Some(true)) => Some(true),
                _ => None,
            }
        }
        Formula::Forall(x, p) | Formula::Exists(x, p) => {
            let space = &model?.space;
            let v = space.var_index(x)?;
            let mut results = space.vars()[v].domain.iter().map(|c| {
                let inst = subst_formula(p, x, &Term::Const(c.clone())).ok()?;
                eval_ground(&inst, model)
            });
            if matches!(f, Formula::Forall(..)) {
                results.try_fold(true, |acc, b| Some(acc && b?))
            } else {
                results.try_fold(false, |acc, b| Some(acc || b?))
            }
        }
        Formula::Angel(..) | Formula::Demon(..) => None,
    }
}

/// Closes a sequent by exact rational evaluation once the antecedent's
/// `x = c` facts are substituted. Quantifiers are expanded over a model
/// variable's domain, so they need a model.
pub fn leaf_arith(s: &Sequent, model: Option<&Model>) -> Result<(), String> {
    let mut facts: Vec<(String, Term)> = Vec::new();
    for f in &s.antecedent {
        if let Some((l, r)) = f.as_eq() {
            let pair = match (l, r) {
                (Term::Var(x), t) | (t, Term::Var(x)) if t.free_vars().is_empty() => Some((x.clone(), t.clone())),
                _ => None,
            };
            if let Some((x, t)) = pair {
                if !facts.iter().any(|(y, _)| *y == x) {
                    facts.push((x, t));
                }
            }
        }
    }
    let ground = |f: &Formula| -> Option<bool> {
        let mut g = f.clone();
        for (x, t) in &facts {
            g = subst_formula(&g, x, t).ok()?;
        }
        eval_ground(&g, model)
    };
    if s.antecedent.iter().any(|f| ground(f) == Some(false)) || s.succedent.iter().any(|f| ground(f) == Some(true)) {
        Ok(())
    } else {
        Err(format!("no ground arithmetic fact decides `{s}`"))
    }
}

/// Closes a sequent whose formula holds in every state of the model.
pub fn leaf_model(s: &Sequent, model: Option<&Model>) -> Result<(), String> {
    let model = model.ok_or("leafModel needs a model")?;
    let truth = SemContext::new(model)
        .truth_set(&s.as_formula())
        .map_err(|e| e.to_string())?;
    if truth.is_full() {
        Ok(())
    } else {
        let bad = truth.complement().iter().next().expect("nonempty complement");
        Err(format!("fails in state {}", model.space.describe_state(bad)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_space_spec;

    fn seq(s: &str) -> Sequent {
        Sequent::parse(s).unwrap()
    }

    #[test]
    fn tautologies() {
        assert!(taut(&seq("a>=0 ==> a>=0")).is_ok());
        assert!(taut(&seq("==> a>=0 | !a>=0")).is_ok());
        assert!(taut(&seq("<x:=1>(p>=0, q>=0) ==> <x:=1>(p>=0, q>=0) & true")).is_ok());
        assert!(taut(&seq("==> a>=0")).is_err());
        assert!(taut(&seq("false ==>")).is_ok());
        let many: Vec<String> = (0..17).map(|i| format!("x>={i}")).collect();
        let big = seq(&format!("==> {}", many.join(" | ")));
        assert!(taut(&big).unwrap_err().contains("cap"));
    }

    #[test]
    fn arithmetic_leaves() {
        assert!(leaf_arith(&seq("o=0, t=0 ==> 3>=0 & t+5=5 & o+3=3"), None).is_ok());
        assert!(leaf_arith(&seq("o=0, t=0 ==> t+5=6"), None).is_err());
        assert!(leaf_arith(&seq("==> 1/2+1/2=1"), None).is_ok());
        assert!(leaf_arith(&seq("2>=3 ==> x>=0"), None).is_ok());
        assert!(leaf_arith(&seq("==> forall x x+1>=x"), None).is_err());
        let m = parse_space_spec("x in {0..3}").unwrap();
        assert!(leaf_arith(&seq("==> forall x x+1>=x"), Some(&m)).is_ok());
        assert!(leaf_arith(&seq("==> exists x x=2"), Some(&m)).is_ok());
        assert!(leaf_arith(&seq("==> exists x x=7"), Some(&m)).is_err());
    }

    #[test]
    fn model_leaves() {
        let m = parse_space_spec("x mod 3").unwrap();
        assert!(leaf_model(&seq("==> <x:=x+1>(true, true)"), Some(&m)).is_ok());
        assert!(leaf_model(&seq("==> x>=1"), Some(&m)).unwrap_err().contains("x=0"));
        assert!(leaf_model(&seq("==> true"), None).is_err());
    }
}
