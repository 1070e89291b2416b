use std::path::PathBuf;

use dglsc::calculus::soundness::{self, RULES};
use dglsc::calculus::{
    check_proof, derive_demon_monotonicity, prove_complementarization, KernelError, Monotonicity, ProofScript,
    ProofStep, Verdict, AXIOMS, rewrite,
};
use dglsc::model::{parse_model, parse_space_spec, Model};
use dglsc::oracle::{Gen, GenConfig};
use dglsc::syntax::{parse_formula, Formula, Game};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn juice() -> (ProofScript, Model) {
    let script = ProofScript::parse(&std::fs::read_to_string(data("juice.proof")).unwrap()).unwrap();
    let model_path = data(script.model_ref.as_ref().unwrap().to_str().unwrap());
    let model = parse_model(&std::fs::read_to_string(model_path).unwrap()).unwrap();
    (script, model)
}

#[test]
fn juice_proof_is_accepted() {
    let (script, model) = juice();
    let v = check_proof(&script, Some(&model));
    assert_eq!(v, Verdict::Accepted, "{v}");
}

#[test]
fn juice_proof_round_trips_through_text() {
    let (script, _) = juice();
    assert_eq!(ProofScript::parse(&script.to_text()).unwrap(), script);
}

#[test]
fn juice_with_wrong_witness_is_rejected_at_the_leaf() {
    let (script, model) = juice();
    let text = script.to_text().replace("e := 3", "e := 2");
    let v = check_proof(&ProofScript::parse(&text).unwrap(), Some(&model));
    // The recorded premise of s15 no longer matches what s14 produces.
    match v {
        Verdict::Rejected { path, reason: KernelError::RedexMismatch { .. } } => {
            assert_eq!(path.last().map(String::as_str), Some("s14"));
        }
        v => panic!("{v}"),
    }
    let no_expect: String = text.lines().filter(|l| !l.starts_with("expect")).map(|l| format!("{l}\n")).collect();
    let v = check_proof(&ProofScript::parse(&no_expect).unwrap(), Some(&model));
    match v {
        Verdict::Rejected { path, reason: KernelError::LeafFailed(_) } => {
            assert_eq!(path.last().map(String::as_str), Some("s15"));
        }
        v => panic!("{v}"),
    }
}

fn with_clause(with: &str) -> String {
    if with.is_empty() {
        String::new()
    } else {
        format!(" with {{{with}}}")
    }
}

fn one_step(rule: &str, lhs: &str, with: &str) -> String {
    format!("goal ==> {lhs} -> true\nstep a {rule} at R0.0.0{} premises [b]\nstep b taut\n", with_clause(with))
}

const AXIOM_REDEXES: [(&str, &str, &str); 15] = [
    ("assignA", "<x:=x+1>(x>=1, y>=1)", ""),
    ("assignD", "[x:=x+1](x>=1, y>=1)", ""),
    ("contA", "<{x'=1}>(x>=1, y>=1)", "time := s, sol := x+s"),
    ("contD", "[{x'=1}](x>=1, y>=1)", "time := s, sol := x+s"),
    ("testA", "<?x>=2>(x>=1, y>=1)", ""),
    ("testD", "[?x>=2](x>=1, y>=1)", ""),
    ("choiceA", "<x:=1 ++ y:=0>(x>=1, y>=1)", ""),
    ("choiceD", "[x:=1 ++ y:=0](x>=1, y>=1)", ""),
    ("seqA", "<x:=1; y:=x>(x>=1, y>=1)", ""),
    ("seqD", "[x:=1; y:=x](x>=1, y>=1)", ""),
    ("dualA", "<(x:=1)^d>(x>=1, y>=1)", ""),
    ("dualD", "[(x:=1)^d](x>=1, y>=1)", ""),
    ("iterA", "<(x:=x+1)*>(x>=1, y>=1)", ""),
    ("iterD", "[(x:=x+1)*](x>=1, y>=1)", ""),
    ("det", "!<x:=x+1>x>=1", ""),
];

// `lhs <-> rhs` with `rhs` computed by the kernel: both occurrences of `lhs`
// are rewritten, then the two sides must agree propositionally.
#[test]
fn every_axiom_has_an_accepted_one_step_script() {
    assert_eq!(AXIOM_REDEXES.map(|r| r.0), AXIOMS);
    for (rule, lhs, with) in AXIOM_REDEXES {
        assert!(check_proof(&ProofScript::parse(&one_step(rule, lhs, with)).unwrap(), None).is_accepted());
        let insts = ProofScript::parse(&one_step(rule, lhs, with)).unwrap().root.inst;
        let rhs = rewrite(rule, &parse_formula(lhs).unwrap(), &insts).unwrap();
        let w = with_clause(with);
        let text = format!(
            "goal ==> {lhs} <-> {rhs}\nstep a {rule} at R0.0.0.0{w} premises [b]\nstep b {rule} at R0.1.0.1.0{w} premises [c]\nstep c taut\n"
        );
        let v = check_proof(&ProofScript::parse(&text).unwrap(), None);
        assert!(v.is_accepted(), "{rule}: {v}");
        // Skipping the second rewrite leaves a non-tautology.
        let short = format!("goal ==> {lhs} <-> {rhs}\nstep a {rule} at R0.0.0.0{w} premises [c]\nstep c taut\n");
        assert!(!check_proof(&ProofScript::parse(&short).unwrap(), None).is_accepted(), "{rule}");
    }
}

#[test]
fn axioms_applied_to_the_wrong_shape_are_rejected() {
    for (rule, _, with) in AXIOM_REDEXES {
        let text = one_step(rule, "x>=1", with);
        let v = check_proof(&ProofScript::parse(&text).unwrap(), None);
        assert!(
            matches!(v, Verdict::Rejected { reason: KernelError::RedexMismatch { .. }, .. }),
            "{rule}: {v}"
        );
    }
}

#[test]
fn cont_side_conditions() {
    let bad = [
        ("<{x'=y}>(x>=1, y>=1)", "time := s, sol := x+s"),
        ("<{x'=1}>(x>=1, s>=1)", "time := s, sol := x+s"),
        ("<{x'=1}>(x>=1, y>=1)", "time := x, sol := x+x"),
        ("<{x'=2}>(x>=1, y>=1)", "time := s, sol := x+s"),
        ("<{x'=1 & x>=0}>(x>=1, y>=1)", "time := s, sol := x+s"),
    ];
    for (lhs, with) in bad {
        let v = check_proof(&ProofScript::parse(&one_step("contA", lhs, with)).unwrap(), None);
        assert!(
            matches!(v, Verdict::Rejected { reason: KernelError::SideConditionFailed(_), .. }),
            "{lhs}: {v}"
        );
    }
    let v = check_proof(&ProofScript::parse(&one_step("contA", "<{x'=2}>(x>=1, y>=1)", "time := s, sol := s+x+s")).unwrap(), None);
    assert!(!matches!(v, Verdict::Rejected { reason: KernelError::SideConditionFailed(_), .. }), "{v}");
}

#[test]
fn every_kernel_rule_is_sound_on_seeded_instances() {
    let model = parse_space_spec("x mod 2; y mod 2; euler step=1 horizon=1").unwrap();
    for rule in RULES {
        for seed in 100..140 {
            let r = soundness::check_seed(rule, seed, &model);
            assert!(r.pass, "{rule} seed {seed}: {}", r.details);
        }
    }
}

#[test]
fn demon_monotonicity_macro_on_seeded_instances() {
    let model = parse_space_spec("x mod 3; y mod 3").unwrap();
    let cfg = GenConfig::for_space(&model.space, false);
    for seed in 0..100u64 {
        let mut g = Gen::new(seed, cfg.clone());
        let a = g.game(2);
        let (p1, q1) = (g.prop_formula(1), g.prop_formula(1));
        // Weakening by a disjunct, or making P1 exclude Q1, keeps both
        // premises tautological.
        let q2 = Formula::or(q1.clone(), g.atom());
        let (kind, p1, p2) = if seed % 2 == 0 {
            let p2 = Formula::or(p1.clone(), g.atom());
            (Monotonicity::M1, p1, p2)
        } else {
            let p1 = Formula::and(Formula::not(q1.clone()), p1);
            (Monotonicity::M2, p1, g.prop_formula(1))
        };
        let script = derive_demon_monotonicity(kind, &a, (&p1, &q1), (&p2, &q2), [ProofStep::new("t", "taut"), ProofStep::new("t", "taut")]);
        let v = check_proof(&script, None);
        assert!(v.is_accepted(), "seed {seed}: {v}\n{}", script.to_text());
        assert_eq!(ProofScript::parse(&script.to_text()).unwrap(), script);
    }
}

fn loop_and_ode_free(g: &Game) -> bool {
    match g {
        Game::Repeat(_) | Game::Ode { .. } => false,
        Game::Assign(..) | Game::Test(_) => true,
        Game::Choice(a, b) | Game::Seq(a, b) => loop_and_ode_free(a) && loop_and_ode_free(b),
        Game::Dual(a) => loop_and_ode_free(a),
    }
}

#[test]
fn complementarization_is_provable_for_loop_free_games() {
    let model = parse_space_spec("x mod 3; y mod 3").unwrap();
    let cfg = GenConfig::for_space(&model.space, false);
    let mut checked = 0;
    for seed in 0..400u64 {
        let mut g = Gen::new(seed, cfg.clone());
        let a = g.game(2);
        if !loop_and_ode_free(&a) {
            continue;
        }
        let (p, q) = (g.prop_formula(1), g.prop_formula(1));
        let f = if seed % 2 == 0 { Formula::angel(a, p, q) } else { Formula::demon(a, p, q) };
        let script = prove_complementarization(&f).unwrap();
        let v = check_proof(&script, None);
        assert!(v.is_accepted(), "{f}: {v}");
        checked += 1;
    }
    assert!(checked >= 100, "only {checked} loop-free games");
}

#[test]
fn checking_is_deterministic() {
    let (script, model) = juice();
    let first = check_proof(&script, Some(&model));
    for _ in 0..3 {
        assert_eq!(check_proof(&script, Some(&model)), first);
    }
    let f = parse_formula("<x:=1>(x>=1, y>=1)").unwrap();
    assert_eq!(prove_complementarization(&f).unwrap(), prove_complementarization(&f).unwrap());
}
