//! Model-level soundness checks for every kernel axiom and rule.
//!
//! Equivalences are checked by comparing truth sets of both sides, where
//! the right side is produced by the kernel itself. Global rules are
//! checked on instances whose premises hold by construction.

use rand::Rng;

use super::check::check_proof;
use super::rules::{apply_rule, Inst, ProofStep};
use super::script::ProofScript;
use super::sequent::{Position, Sequent};
use crate::model::{parse_space_spec, ArithMode, Model, StateSet};
use crate::oracle::{characteristic_formula, CaseResult, Gen, GenConfig};
use crate::semantics::SemContext;
use crate::syntax::{Formula, Game, Term};
use crate::transform::systematize;

/// Rule names accepted by the soundness checker: the axioms, the four
/// primitive rules, then the derived rules.
pub const RULES: [&str; 28] = [
    "assignA", "assignD", "contA", "contD", "testA", "testD", "choiceA", "choiceD", "seqA", "seqD", "dualA",
    "dualD", "iterA", "iterD", "det", "FP", "M1", "M2", "cut", "andAD", "iterAD", "FP2", "ind", "impAD", "spA",
    "id", "reA", "reD",
];

/// The axioms and primitive rules of the calculus proper.
pub const PRIMITIVE: [&str; 19] = [
    "assignA", "assignD", "contA", "contD", "testA", "testD", "choiceA", "choiceD", "seqA", "seqD", "dualA",
    "dualD", "iterA", "iterD", "det", "FP", "M1", "M2", "cut",
];

fn salt(rule: &str) -> u64 {
    rule.bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

/// Model with variables `x, y, t` modulo `m`, unit Euler steps and a
/// horizon of `m - 1`, in which `t` ranges over exactly the flow's times.
pub fn ode_model(m: u64) -> Model {
    parse_space_spec(&format!("x mod {m}; y mod {m}; t mod {m}; euler step=1 horizon={}", m - 1))
        .expect("well-formed space")
}

fn ode_modulus(model: &Model) -> u64 {
    match model.space.mode() {
        ArithMode::Modular(m) => m.clamp(2, 4),
        ArithMode::Strict => 3,
    }
}

struct Ctx<'m> {
    model: &'m Model,
    gen: Gen,
}

impl<'m> Ctx<'m> {
    fn sem(&self) -> SemContext<'m> {
        SemContext::new(self.model)
    }

    fn n(&self) -> usize {
        self.model.space.size()
    }

    fn truth(&self, f: &Formula) -> Result<StateSet, String> {
        self.sem().truth_set(f).map_err(|e| e.to_string())
    }

    fn set(&mut self) -> StateSet {
        let n = self.n();
        self.gen.set(n)
    }

    fn sparse_set(&mut self) -> StateSet {
        let (a, b) = (self.set(), self.set());
        a.intersection(&b)
    }

    fn formula(&self, s: &StateSet) -> Formula {
        characteristic_formula(&self.model.space, s)
    }

    fn goal(&mut self) -> Formula {
        let s = self.set();
        self.formula(&s)
    }

    fn game(&mut self, max_depth: usize) -> Game {
        let d = self.gen.rng().gen_range(0..=max_depth);
        self.gen.game(d)
    }

    fn angel(&self, g: &Game, x: &StateSet, y: &StateSet) -> Result<StateSet, String> {
        self.sem().angel_region(g, x, y).map_err(|e| e.to_string())
    }

    fn demon(&self, g: &Game, x: &StateSet, y: &StateSet) -> Result<StateSet, String> {
        self.sem().demon_region(g, x, y).map_err(|e| e.to_string())
    }
}

fn root() -> Position {
    Position::right(0, &[])
}

fn one_premise(s: &Sequent, step: &ProofStep, model: &Model) -> Result<Formula, String> {
    let out = apply_rule(s, step, Some(model)).map_err(|e| format!("kernel: {e}"))?;
    match out.as_slice() {
        [p] if p.antecedent.is_empty() && p.succedent.len() == 1 => Ok(p.succedent[0].clone()),
        _ => Err(format!("kernel returned {} premises", out.len())),
    }
}

/// Left side of an equivalence plus the bindings its rewrite needs.
fn equivalence_instance(rule: &str, c: &mut Ctx<'_>) -> (Formula, Vec<(&'static str, Inst)>) {
    use Formula as F;
    let (p, q) = (c.goal(), c.goal());
    let mut inst = Vec::new();
    let lhs = match rule {
        "assignA" | "assignD" => {
            let (x, _) = c.gen.var();
            let e = c.gen.term(1);
            let g = Game::assign(&x, e);
            if rule == "assignA" {
                F::angel(g, p, q)
            } else {
                F::demon(g, p, q)
            }
        }
        "testA" | "testD" => {
            let g = Game::test(c.gen.prop_formula(2));
            if rule == "testA" {
                F::angel(g, p, q)
            } else {
                F::demon(g, p, q)
            }
        }
        "choiceA" | "choiceD" | "seqA" | "seqD" => {
            let (a, b) = (c.game(2), c.game(2));
            let g = if rule.starts_with("choice") {
                Game::choice(a, b)
            } else {
                Game::seq(a, b)
            };
            if rule.ends_with('A') {
                F::angel(g, p, q)
            } else {
                F::demon(g, p, q)
            }
        }
        "dualA" | "dualD" | "iterA" | "iterD" => {
            let a = c.game(2);
            let g = if rule.starts_with("dual") {
                Game::dual(a)
            } else {
                Game::repeat(a)
            };
            if rule.ends_with('A') {
                F::angel(g, p, q)
            } else {
                F::demon(g, p, q)
            }
        }
        "det" => F::not(F::angel_single(c.game(3), p)),
        "andAD" | "iterAD" => {
            let mut a = c.game(2);
            if rule == "iterAD" {
                a = Game::repeat(a);
            }
            F::and(F::angel(a.clone(), p.clone(), q.clone()), F::demon(a, p, q))
        }
        "id" => {
            let a = c.game(3);
            inst.push(("alpha", Inst::Game(a.clone())));
            F::angel_single(systematize(&a), F::and(p, q))
        }
        "reA" | "reD" => {
            let (a, b) = (c.game(2), c.game(2));
            let coal = F::angel_single(systematize(&b), F::and(p.clone(), q.clone()));
            let left = F::angel_single(systematize(&a), coal.clone());
            let right = if rule == "reA" {
                F::angel_single(a, F::or(coal, F::angel_single(b, p)))
            } else {
                F::demon_single(a, F::or(coal, F::demon_single(b, q)))
            };
            F::or(left, right)
        }
        _ => unreachable!("not an equivalence: {rule}"),
    };
    (lhs, inst)
}

/// Checks `lhs <-> rhs` semantically, and that the two-rewrite script
/// proving it is accepted.
fn check_equivalence(rule: &str, lhs: Formula, inst: Vec<(&'static str, Inst)>, model: &Model) -> Result<String, String> {
    let mut step = ProofStep::new("a", rule).at(root());
    for (k, v) in inst {
        step = step.with(k, v);
    }
    let rhs = one_premise(&Sequent::goal(lhs.clone()), &step, model)?;
    let sem = SemContext::new(model);
    let l = sem.truth_set(&lhs).map_err(|e| e.to_string())?;
    let r = sem.truth_set(&rhs).map_err(|e| e.to_string())?;
    if l != r {
        return Err(format!("lhs `{lhs}` = {}, rhs `{rhs}` = {}", l.to_hex(), r.to_hex()));
    }
    let mut first = step.clone();
    first.id = "a".into();
    first.position = Some(Position::right(0, &[0, 0, 0]));
    let mut second = step;
    second.id = "b".into();
    second.position = Some(Position::right(0, &[1, 0, 1, 0]));
    let script = ProofScript {
        goal: Sequent::goal(Formula::equiv(lhs, rhs)),
        root: first.premises(vec![second.premises(vec![ProofStep::new("c", "taut")])]),
        model_ref: None,
    };
    match check_proof(&script, Some(model)) {
        v if v.is_accepted() => Ok(format!("truth set {}", l.to_hex())),
        v => Err(format!("equivalence script {v}")),
    }
}

/// Random formula over `x` and `y` only.
fn xy_formula(c: &mut Ctx<'_>, m: u64) -> Formula {
    let picks: Vec<Formula> = (0..m * m)
        .filter(|_| c.gen.rng().gen_bool(0.4))
        .map(|k| {
            Formula::and(
                Formula::eq(Term::var("x"), Term::int((k / m) as i64)),
                Formula::eq(Term::var("y"), Term::int((k % m) as i64)),
            )
        })
        .collect();
    Formula::disjunction(picks)
}

fn check_ode(rule: &str, seed: u64, given: &Model) -> Result<String, String> {
    let m = ode_modulus(given);
    let model = ode_model(m);
    let mut c = Ctx {
        model: &model,
        gen: Gen::new(seed ^ salt(rule), GenConfig::for_space(&model.space, true)),
    };
    let v = if c.gen.rng().gen_bool(0.5) { "x" } else { "y" };
    let rate = c.gen.rng().gen_range(0..m) as i64;
    let (p, q) = (xy_formula(&mut c, m), xy_formula(&mut c, m));
    let g = Game::ode(v, Term::int(rate), Formula::True);
    let lhs = if rule == "contA" {
        Formula::angel(g, p, q)
    } else {
        Formula::demon(g, p, q)
    };
    let sol = Term::add(Term::var(v), Term::mul(Term::int(rate), Term::var("t")));
    let inst = vec![("time", Inst::Term(Term::var("t"))), ("sol", Inst::Term(sol))];
    check_equivalence(rule, lhs, inst, &model).map(|d| format!("[{}] {d}", model.space))
}

/// Iterates `z := z | f(z)` to a pre-fixpoint.
fn pre_fixpoint(mut z: StateSet, mut f: impl FnMut(&StateSet) -> Result<StateSet, String>) -> Result<StateSet, String> {
    loop {
        let next = z.union(&f(&z)?);
        if next == z {
            return Ok(z);
        }
        z = next;
    }
}

/// Iterates `z := z & f(z)` to a post-fixpoint.
fn post_fixpoint(mut z: StateSet, mut f: impl FnMut(&StateSet) -> Result<StateSet, String>) -> Result<StateSet, String> {
    loop {
        let next = z.intersection(&f(&z)?);
        if next == z {
            return Ok(z);
        }
        z = next;
    }
}

/// Builds a conclusion whose premises hold by construction, checks that
/// the kernel's premises are indeed valid, then that the conclusion is.
fn check_global(rule: &str, c: &mut Ctx<'_>) -> Result<String, String> {
    use Formula as F;
    let a = c.game(2);
    let (p, q) = (c.set(), c.set());
    let (pf, qf) = (c.formula(&p), c.formula(&q));
    let conclusion = match rule {
        "FP" | "FP2" => {
            let z0 = c.sparse_set();
            let r2 = pre_fixpoint(z0, |z| {
                Ok(p.intersection(&q)
                    .union(&c.angel(&a, z, z)?.intersection(&c.demon(&a, z, z)?)))
            })?;
            let r2f = c.formula(&r2);
            if rule == "FP" {
                let z0 = c.sparse_set();
                let r1 = pre_fixpoint(z0, |z| Ok(p.union(&c.angel(&a, z, &z.complement())?)))?;
                F::implies(F::angel(Game::repeat(a), pf, qf), F::or(c.formula(&r1), r2f))
            } else {
                let r = Game::repeat(a);
                F::implies(F::and(F::angel(r.clone(), pf.clone(), qf.clone()), F::demon(r, pf, qf)), r2f)
            }
        }
        "ind" => {
            let z0 = c.set();
            let inv = post_fixpoint(z0, |z| c.demon(&a, &z.complement(), z))?;
            let invf = c.formula(&inv);
            F::implies(invf.clone(), F::demon(Game::repeat(a), pf, invf))
        }
        "M1" => {
            let (p2, q2) = (p.union(&c.set()), q.union(&c.set()));
            F::implies(F::angel(a.clone(), pf, qf), F::angel(a, c.formula(&p2), c.formula(&q2)))
        }
        "M2" => {
            let p2 = p.union(&c.set());
            let q1 = c.set().difference(&p);
            let q2 = c.set();
            F::implies(
                F::angel(a.clone(), pf, c.formula(&q1)),
                F::angel(a, c.formula(&p2), c.formula(&q2)),
            )
        }
        _ => unreachable!(),
    };
    let s = Sequent::goal(conclusion.clone());
    let premises = apply_rule(&s, &ProofStep::new("a", rule).at(root()), Some(c.model)).map_err(|e| format!("kernel: {e}"))?;
    for prem in &premises {
        if !c.truth(&prem.as_formula())?.is_full() {
            return Err(format!("constructed premise `{prem}` is not valid"));
        }
    }
    let t = c.truth(&conclusion)?;
    if t.is_full() {
        Ok(format!("{} premises valid, conclusion valid", premises.len()))
    } else {
        Err(format!("conclusion `{conclusion}` fails on {}", t.complement().to_hex()))
    }
}

fn check_implication(rule: &str, c: &mut Ctx<'_>) -> Result<String, String> {
    use Formula as F;
    let (p, q) = (c.goal(), c.goal());
    let a = c.game(2);
    let f = if rule == "impAD" {
        F::implies(
            F::and(F::angel_single(a.clone(), p.clone()), F::demon_single(a.clone(), q.clone())),
            F::angel_single(systematize(&a), F::and(p, q)),
        )
    } else {
        let b = c.game(2);
        let coal = F::angel_single(systematize(&b), F::and(p.clone(), q));
        F::implies(
            F::and(
                F::angel_single(a.clone(), F::or(coal.clone(), F::angel_single(b.clone(), p.clone()))),
                F::not(F::angel_single(a.clone(), F::angel_single(b, p))),
            ),
            F::angel_single(systematize(&a), coal),
        )
    };
    let s = Sequent::goal(f.clone());
    apply_rule(&s, &ProofStep::new("a", rule).at(root()), Some(c.model)).map_err(|e| format!("kernel: {e}"))?;
    let t = c.truth(&f)?;
    if t.is_full() {
        Ok("valid".into())
    } else {
        Err(format!("`{f}` fails on {}", t.complement().to_hex()))
    }
}

/// Local soundness of cut: wherever both premises hold, so does the
/// conclusion.
fn check_cut(c: &mut Ctx<'_>) -> Result<String, String> {
    let side = |c: &mut Ctx<'_>| {
        let k = c.gen.rng().gen_range(0..=2);
        (0..k)
            .map(|_| {
                let a = c.game(2);
                let (p, q) = (c.goal(), c.goal());
                match c.gen.rng().gen_range(0..3) {
                    0 => p,
                    1 => Formula::angel(a, p, q),
                    _ => Formula::demon(a, p, q),
                }
            })
            .collect::<Vec<_>>()
    };
    let s = Sequent::new(side(c), side(c));
    let cut = side(c).pop().unwrap_or(Formula::True);
    let step = ProofStep::new("a", "cut").with("C", Inst::Formula(cut));
    let premises = apply_rule(&s, &step, Some(c.model)).map_err(|e| format!("kernel: {e}"))?;
    let mut both = StateSet::full(c.n());
    for p in &premises {
        both = both.intersection(&c.truth(&p.as_formula())?);
    }
    let concl = c.truth(&s.as_formula())?;
    if both.is_subset(&concl) {
        Ok(format!("premises {} within conclusion {}", both.to_hex(), concl.to_hex()))
    } else {
        Err(format!("`{s}`: premises {} not within {}", both.to_hex(), concl.to_hex()))
    }
}

/// One seeded soundness check of `rule` over `model`. The solution axioms
/// run on a companion model built for them; see [`ode_model`].
pub fn check_seed(rule: &str, seed: u64, model: &Model) -> CaseResult {
    let result = match rule {
        "contA" | "contD" => check_ode(rule, seed, model),
        _ => {
            let mut c = Ctx {
                model,
                gen: Gen::new(seed ^ salt(rule), GenConfig::for_space(&model.space, model.default_flow.is_some())),
            };
            match rule {
                "FP" | "FP2" | "ind" | "M1" | "M2" => check_global(rule, &mut c),
                "impAD" | "spA" => check_implication(rule, &mut c),
                "cut" => check_cut(&mut c),
                _ if RULES.contains(&rule) => {
                    let (lhs, inst) = equivalence_instance(rule, &mut c);
                    check_equivalence(rule, lhs, inst, model)
                }
                _ => Err(format!("unknown rule `{rule}`")),
            }
        }
    };
    match result {
        Ok(details) => CaseResult {
            seed,
            pass: true,
            details,
        },
        Err(details) => CaseResult {
            seed,
            pass: false,
            details: format!("space=[{}] {details}", model.space),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_rule_passes_a_few_seeds() {
        let model = parse_space_spec("x mod 3; y mod 3; euler step=1 horizon=2").unwrap();
        for rule in RULES {
            for seed in 0..8 {
                let r = check_seed(rule, seed, &model);
                assert!(r.pass, "{rule} seed {seed}: {}", r.details);
            }
        }
    }

    #[test]
    fn unknown_rule_fails() {
        let model = parse_space_spec("x mod 2").unwrap();
        assert!(!check_seed("nope", 0, &model).pass);
    }
}
