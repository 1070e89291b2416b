//! Script generators: the Demon monotonicity rules and complementarization
//! proofs for loop- and ode-free games.

use super::rules::{apply_rule, Inst, ProofStep};
use super::script::ProofScript;
use super::sequent::{Position, Sequent};
use super::KernelError;
use crate::syntax::{Formula, Game};
use crate::transform::complementarize_step;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    /// From `Q1 -> Q2` and `P1 -> P2`.
    M1,
    /// From `Q1 -> Q2` and `Q1 & P1 -> false`.
    M2,
}

fn prefix_ids(step: &ProofStep, prefix: &str) -> ProofStep {
    let mut s = step.clone();
    s.id = format!("{prefix}{}", step.id);
    s.premises = step.premises.iter().map(|p| prefix_ids(p, prefix)).collect();
    s
}

/// Proof of `[a](P1, Q1) -> [a](P2, Q2)`: both boxes are rewritten into
/// `<a^d>` diamonds with swapped goals, then Angel's rule closes the goal.
/// `premises` prove `==> Q1 -> Q2` and the second premise of the chosen
/// rule; their step ids are prefixed with `p1_` and `p2_`.
pub fn derive_demon_monotonicity(
    kind: Monotonicity,
    a: &Game,
    (p1, q1): (&Formula, &Formula),
    (p2, q2): (&Formula, &Formula),
    premises: [ProofStep; 2],
) -> ProofScript {
    let goal = Formula::implies(
        Formula::demon(a.clone(), p1.clone(), q1.clone()),
        Formula::demon(a.clone(), p2.clone(), q2.clone()),
    );
    let dual = Game::dual(a.clone());
    let rule = match kind {
        Monotonicity::M1 => "M1",
        Monotonicity::M2 => "M2",
    };
    let [first, second] = premises;
    let mono = ProofStep::new("mono", rule)
        .at(Position::right(0, &[]))
        .premises(vec![prefix_ids(&first, "p1_"), prefix_ids(&second, "p2_")]);
    let right = ProofStep::new("dual_right", "dualA")
        .reversed()
        .at(Position::right(0, &[0, 1, 0]))
        .with("to", Inst::Formula(Formula::angel(dual.clone(), q2.clone(), p2.clone())))
        .premises(vec![mono]);
    let left = ProofStep::new("dual_left", "dualA")
        .reversed()
        .at(Position::right(0, &[0, 0]))
        .with("to", Inst::Formula(Formula::angel(dual, q1.clone(), p1.clone())))
        .premises(vec![right]);
    ProofScript {
        goal: Sequent::goal(goal),
        root: left,
        model_ref: None,
    }
}

fn expansion_rule(f: &Formula) -> Option<&'static str> {
    let (g, angel) = match f {
        Formula::Angel(g, ..) => (g, true),
        Formula::Demon(g, ..) => (g, false),
        _ => return None,
    };
    Some(match (g.as_ref(), angel) {
        (Game::Assign(..), true) => "assignA",
        (Game::Assign(..), false) => "assignD",
        (Game::Test(_), true) => "testA",
        (Game::Test(_), false) => "testD",
        (Game::Choice(..), true) => "choiceA",
        (Game::Choice(..), false) => "choiceD",
        (Game::Seq(..), true) => "seqA",
        (Game::Seq(..), false) => "seqD",
        (Game::Dual(_), true) => "dualA",
        (Game::Dual(_), false) => "dualD",
        (Game::Ode { .. } | Game::Repeat(_), _) => return None,
    })
}

/// First expandable modality in post-order, so goals are expanded before
/// the games that act on them.
fn find_redex(f: &Formula, path: &mut Vec<usize>) -> Option<&'static str> {
    for (i, c) in f.children().into_iter().enumerate() {
        path.push(i);
        if let Some(r) = find_redex(c, path) {
            return Some(r);
        }
        path.pop();
    }
    expansion_rule(f)
}

/// Most rewrite steps a generated proof may take.
pub const MAX_EXPANSION_STEPS: usize = 4096;

/// Kernel proof of the complementarization instance of `f`, a modality
/// over a game without loops or differential equations: every modality
/// is unfolded by its axiom, innermost first, and the resulting
/// modality-free equivalence is closed propositionally.
pub fn prove_complementarization(f: &Formula) -> Result<ProofScript, KernelError> {
    let rhs = complementarize_step(f).map_err(|e| KernelError::SideConditionFailed(e.to_string()))?;
    let goal = Sequent::goal(Formula::equiv(f.clone(), rhs));
    let mut steps = Vec::new();
    let mut current = goal.clone();
    loop {
        let mut path = Vec::new();
        let Some(rule) = find_redex(&current.succedent[0], &mut path) else {
            break;
        };
        if steps.len() == MAX_EXPANSION_STEPS {
            return Err(KernelError::SideConditionFailed("expansion too long".into()));
        }
        let step = ProofStep::new(&format!("e{}", steps.len()), rule).at(Position::right(0, &path));
        let mut next = apply_rule(&current, &step, None)?;
        current = next.pop().expect("rewrites have one premise");
        steps.push(step);
    }
    let mut root = ProofStep::new("close", "taut");
    while let Some(step) = steps.pop() {
        root = step.premises(vec![root]);
    }
    Ok(ProofScript {
        goal,
        root,
        model_ref: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::check_proof;
    use crate::syntax::{parse_formula, parse_game};

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn taut_premise(id: &str, goal: &Formula) -> (ProofStep, Sequent) {
        (ProofStep::new(id, "taut"), Sequent::goal(goal.clone()))
    }

    #[test]
    fn demon_monotonicity_scripts_check() {
        let a = parse_game("x:=x+1 ++ (?x>=1)^d").unwrap();
        let (p1, q1) = (f("x>=1"), f("y>=1"));
        let (p2, q2) = (f("x>=1 | y>=2"), f("y>=1 | x>=0"));
        let (s1, _) = taut_premise("t", &Formula::implies(q1.clone(), q2.clone()));
        let (s2, _) = taut_premise("t", &Formula::implies(p1.clone(), p2.clone()));
        let script = derive_demon_monotonicity(Monotonicity::M1, &a, (&p1, &q1), (&p2, &q2), [s1, s2]);
        assert!(check_proof(&script, None).is_accepted(), "{}", script.to_text());
        assert_eq!(ProofScript::parse(&script.to_text()).unwrap(), script);

        let p1 = f("!y>=1 & x>=0");
        let (s1, _) = taut_premise("t", &Formula::implies(q1.clone(), q2.clone()));
        let (s2, _) = taut_premise("t", &Formula::implies(Formula::and(q1.clone(), p1.clone()), Formula::False));
        let script = derive_demon_monotonicity(Monotonicity::M2, &a, (&p1, &q1), (&f("true"), &q2), [s1, s2]);
        assert!(check_proof(&script, None).is_accepted(), "{}", script.to_text());
    }

    #[test]
    fn demon_monotonicity_rejects_bad_premises() {
        let a = parse_game("x:=1").unwrap();
        let (p1, q1) = (f("x>=1"), f("y>=1"));
        let (p2, q2) = (f("x>=2"), f("y>=1"));
        let script = derive_demon_monotonicity(
            Monotonicity::M1,
            &a,
            (&p1, &q1),
            (&p2, &q2),
            [ProofStep::new("t", "taut"), ProofStep::new("t", "taut")],
        );
        assert!(!check_proof(&script, None).is_accepted());
    }

    #[test]
    fn complementarization_proofs() {
        for s in [
            "<x:=x+1>(x>=1, y>=1)",
            "[x:=x+1](x>=1, y>=1)",
            "<?x>=1 ++ y:=0>(x>=1, y>=1)",
            "[?x>=1 ++ y:=0](x>=1, y>=1)",
            "<(x:=0 ++ y:=1)^d>(x>=1, y>=1)",
            "[(?x>=1)^d ++ x:=2](x>=1, y>=1)",
            "[x:=1; y:=x](x>=1, y>=1)",
        ] {
            let script = prove_complementarization(&f(s)).unwrap();
            let v = check_proof(&script, None);
            assert!(v.is_accepted(), "{s}: {v}");
        }
        assert!(prove_complementarization(&f("true")).is_err());
    }
}
