use std::path::PathBuf;

use dglsc::model::{parse_model, parse_space_spec, Model, StateSet};
use dglsc::oracle::{check_lemma, check_seed, EnumerationSolver, Gen, GenConfig, LemmaId};
use dglsc::semantics::{Evaluator, FixpointSolver, Iterative, Round, SemContext};
use dglsc::syntax::{parse_formula, Formula};
use dglsc::Rational;
use proptest::prelude::*;

const SPACES: [&str; 4] = [
    "x mod 3; y mod 3; euler step=1 horizon=2",
    "x mod 2; y mod 4; euler step=1 horizon=3",
    "x mod 5; y mod 2",
    "x mod 10",
];

fn model(i: usize) -> Model {
    parse_space_spec(SPACES[i % SPACES.len()]).unwrap()
}

fn juice() -> Model {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/juice.model");
    parse_model(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn state(m: &Model, o: i64, t: i64) -> usize {
    m.space
        .state_of(&[("o".into(), Rational::from_integer(o.into())), ("t".into(), Rational::from_integer(t.into()))])
        .unwrap()
}

#[test]
fn juice_region() {
    let m = juice();
    let ctx = SemContext::new(&m);
    let f = parse_formula("<{t'=1}; {o'=1}^d>(o=3, t=5)").unwrap();
    let region = ctx.truth_set(&f).unwrap();
    assert!(region.contains(state(&m, 0, 0)));
    // Angel reaches t=5 from anywhere; Demon can then stop at o=3 iff o<=3.
    for o in 0..=5 {
        for t in 0..=5 {
            assert_eq!(region.contains(state(&m, o, t)), o <= 3, "o={o} t={t}");
        }
    }
}

#[test]
fn juice_demon_view_is_the_dual_region() {
    let m = juice();
    let ctx = SemContext::new(&m);
    let x = ctx.truth_set(&parse_formula("o=3").unwrap()).unwrap();
    let y = ctx.truth_set(&parse_formula("t=5").unwrap()).unwrap();
    let g = dglsc::syntax::parse_game("{t'=1}; {o'=1}^d").unwrap();
    let angel = ctx.angel_region(&g, &x, &y).unwrap();
    let demon = ctx.demon_region(&g, &x, &y).unwrap();
    assert!(angel.contains(state(&m, 0, 0)));
    assert!(demon.contains(state(&m, 0, 0)));
}

fn region_pair(m: &Model, solver: &dyn FixpointSolver, f: &Formula) -> StateSet {
    SemContext::with_solver(m, solver).truth_set(f).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn iteration_agrees_with_subset_enumeration(seed in any::<u64>(), space in 0usize..4) {
        let m = model(space);
        let mut g = Gen::new(seed, GenConfig::for_space(&m.space, m.default_flow.is_some()));
        let game = g.game(3);
        let f = if seed % 2 == 0 {
            Formula::angel(game, g.prop_formula(1), g.prop_formula(1))
        } else {
            Formula::demon(game, g.prop_formula(1), g.prop_formula(1))
        };
        prop_assert_eq!(region_pair(&m, &Iterative::default(), &f), region_pair(&m, &EnumerationSolver, &f), "{}", f);
    }

    #[test]
    fn every_round_function_agrees(seed in any::<u64>(), space in 0usize..4) {
        let m = model(space);
        let n = m.space.size();
        let ctx = SemContext::new(&m);
        let mut g = Gen::new(seed, GenConfig::for_space(&m.space, false));
        let body = g.game(2);
        let (x, y) = (g.set(n), g.set(n));
        for round in [Round::AngelCompetitive, Round::Cooperative, Round::DemonCompetitive, Round::ZeroSum] {
            let mut ev = Evaluator::new(ctx);
            let mut f = |z: &StateSet| ev.round(round, &body, &x, &y, z);
            let (it, en) = if round.is_greatest() {
                (Iterative::default().gfp(n, &mut f).unwrap(), EnumerationSolver.gfp(n, &mut f).unwrap())
            } else {
                (Iterative::default().lfp(n, &mut f).unwrap(), EnumerationSolver.lfp(n, &mut f).unwrap())
            };
            prop_assert_eq!(it, en, "{:?} {}", round, body);
        }
    }

    #[test]
    fn regions_are_monotone_in_both_goals(seed in any::<u64>(), space in 0usize..4) {
        let m = model(space);
        prop_assert!(check_seed(&LemmaId::L1, seed, &m).pass);
    }

    #[test]
    fn zero_sum_reduction_and_determinacy(seed in any::<u64>(), space in 0usize..4) {
        let m = model(space);
        for id in [LemmaId::L3, LemmaId::CorDet] {
            let r = check_seed(&id, seed, &m);
            prop_assert!(r.pass, "{}: {}", id, r.details);
        }
    }

    #[test]
    fn systematization_and_cooperation(seed in any::<u64>(), space in 0usize..4) {
        let m = model(space);
        for id in [LemmaId::L2, LemmaId::L4, LemmaId::CorCoop] {
            let r = check_seed(&id, seed, &m);
            prop_assert!(r.pass, "{}: {}", id, r.details);
        }
    }

    #[test]
    fn transforms_preserve_truth_sets(seed in any::<u64>(), space in 0usize..4) {
        let m = model(space);
        for id in [LemmaId::L5, LemmaId::CA1, LemmaId::CA2] {
            let r = check_seed(&id, seed, &m);
            prop_assert!(r.pass, "{}: {}", id, r.details);
        }
    }

    #[test]
    fn hex_dump_round_trips(n in 1usize..200, bits in prop::collection::vec(any::<bool>(), 200)) {
        let s = StateSet::from_indices(n, (0..n).filter(|i| bits[*i]));
        prop_assert_eq!(StateSet::from_hex(n, &s.to_hex()), Some(s.clone()));
        prop_assert_eq!(s.complement().complement(), s);
    }
}

#[test]
fn lemma_runs_are_deterministic() {
    let m = model(0);
    let a = check_lemma(&LemmaId::L4, 0..64, &m);
    let b = check_lemma(&LemmaId::L4, 0..64, &m);
    assert_eq!(a, b);
    assert!(a.all_pass(), "{}", a.render());
}

#[test]
fn budget_exhaustion_is_reported() {
    let m = model(3);
    let f = parse_formula("<(x:=x+1)*>(x=9, false)").unwrap();
    let solver = Iterative { budget: Some(2) };
    assert!(SemContext::with_solver(&m, &solver).truth_set(&f).is_err());
    assert!(SemContext::new(&m).truth_set(&f).unwrap().is_full());
}
