//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use dglsc::calculus::soundness::{self, PRIMITIVE};
use dglsc::calculus::{check_proof, ProofScript};
use dglsc::model::{parse_model, parse_space_spec, Model, StateSet};
use dglsc::oracle::{check_lemma, EnumerationSolver, Gen, GenConfig, LemmaId, SyntaxGen};
use dglsc::semantics::{Evaluator, FixpointSolver, Iterative, Round, SemContext};
use dglsc::syntax::parse_formula;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// 12 states, modular, with continuous games.
const LEMMA_SPACE: &str = "x mod 4; y mod 3; euler step=1 horizon=2";
/// 9 states with one modulus, so assignment rewriting is sound.
const AXIOM_SPACE: &str = "x mod 3; y mod 3; euler step=1 horizon=2";

struct Outcome {
    passed: usize,
    total: usize,
    note: String,
}

impl Outcome {
    fn count(passed: usize, total: usize) -> Outcome {
        Outcome {
            passed,
            total,
            note: String::new(),
        }
    }
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data").join(name)
}

fn lemmas(ids: &[LemmaId], n: u64, space: &str) -> Outcome {
    let model = parse_space_spec(space).unwrap();
    let mut out = Outcome::count(0, 0);
    for id in ids {
        let r = check_lemma(id, 0..n, &model);
        out.passed += r.passed();
        out.total += r.results.len();
        if let Some(f) = r.failures().next() {
            out.note.push_str(&format!(" {id} seed {}: {};", f.seed, f.details));
        };
    }
    out
}

fn juice() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_dglsc");
    let model = data("juice.model");
    let regions = Command::new(bin)
        .args(["regions", "--model"])
        .arg(&model)
        .args(["--game", "{t'=1};{o'=1}^d", "--angel", "o=3", "--demon", "t=5", "--player", "angel"])
        .args(["--at", "o=0,t=0"])
        .output()
        .unwrap();
    let region_ok = regions.status.success() && String::from_utf8_lossy(&regions.stdout).trim() == "angel true";
    let check = Command::new(bin).arg("check").arg("--proof").arg(data("juice.proof")).output().unwrap();
    let check_ok = check.status.code() == Some(0);

    // Same two facts through the library.
    let m = parse_model(&std::fs::read_to_string(&model).unwrap()).unwrap();
    let script = ProofScript::parse(&std::fs::read_to_string(data("juice.proof")).unwrap()).unwrap();
    let lib_ok = check_proof(&script, Some(&m)).is_accepted() && {
        let f = parse_formula("o=0 & t=0 -> <{t'=1}; {o'=1}^d>(o=3, t=5)").unwrap();
        SemContext::new(&m).truth_set(&f).unwrap().is_full()
    };
    let passed = [region_ok, check_ok, lib_ok].iter().filter(|b| **b).count();
    let mut out = Outcome::count(passed, 3);
    if !region_ok {
        out.note = format!(" regions said {:?}", String::from_utf8_lossy(&regions.stdout));
    }
    if !check_ok {
        out.note.push_str(&format!(" check said {:?}", String::from_utf8_lossy(&check.stdout)));
    }
    out
}

/// A random modular space with at most 10 states.
fn small_model(rng: &mut ChaCha8Rng) -> Model {
    let shapes: [&[u64]; 9] = [&[10], &[9], &[5, 2], &[2, 5], &[3, 3], &[2, 4], &[2, 2, 2], &[7], &[3, 2]];
    let shape = shapes[rng.gen_range(0..shapes.len())];
    let names = ["x", "y", "z"];
    let mut spec: Vec<String> = shape.iter().zip(names).map(|(m, v)| format!("{v} mod {m}")).collect();
    if rng.gen_bool(0.5) {
        spec.push(format!("euler step=1 horizon={}", rng.gen_range(1..=3)));
    }
    parse_space_spec(&spec.join("; ")).unwrap()
}

fn fixpoint_oracle() -> Outcome {
    let results: Vec<Result<(), String>> = (0..100u64)
        .into_par_iter()
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let model = small_model(&mut rng);
            let n = model.space.size();
            let mut g = Gen::new(seed, GenConfig::for_space(&model.space, model.default_flow.is_some()));
            let body = g.game(3);
            let (x, y) = (g.set(n), g.set(n));
            let ctx = SemContext::new(&model);
            for round in [Round::AngelCompetitive, Round::DemonCompetitive, Round::Cooperative, Round::ZeroSum] {
                let mut ev = Evaluator::new(ctx);
                let mut f = |z: &StateSet| ev.round(round, &body, &x, &y, z);
                let (it, en) = if round.is_greatest() {
                    (Iterative::default().gfp(n, &mut f), EnumerationSolver.gfp(n, &mut f))
                } else {
                    (Iterative::default().lfp(n, &mut f), EnumerationSolver.lfp(n, &mut f))
                };
                match (it, en) {
                    (Ok(a), Ok(b)) if a == b => {}
                    (a, b) => return Err(format!("seed {seed} {round:?} on {body}: {a:?} vs {b:?}")),
                }
            }
            Ok(())
        })
        .collect();
    let mut out = Outcome::count(results.iter().filter(|r| r.is_ok()).count(), results.len());
    if let Some(Err(e)) = results.iter().find(|r| r.is_err()) {
        out.note = format!(" {e}");
    }
    out
}

fn axiom_soundness() -> Outcome {
    let model = parse_space_spec(AXIOM_SPACE).unwrap();
    let cases: Vec<(&str, u64)> = PRIMITIVE.iter().flat_map(|r| (0..200u64).map(move |s| (*r, s))).collect();
    let results: Vec<(&str, dglsc::oracle::CaseResult)> =
        cases.par_iter().map(|(r, s)| (*r, soundness::check_seed(r, *s, &model))).collect();
    let mut out = Outcome::count(results.iter().filter(|(_, c)| c.pass).count(), results.len());
    if let Some((r, c)) = results.iter().find(|(_, c)| !c.pass) {
        out.note = format!(" {r} seed {}: {}", c.seed, c.details);
    }
    out
}

fn round_trip() -> Outcome {
    let results: Vec<Option<String>> = (0..10_000u64)
        .into_par_iter()
        .map(|seed| {
            let f = SyntaxGen::new(seed).formula((seed % 7) as usize);
            let printed = f.to_string();
            match parse_formula(&printed) {
                Ok(g) if g == f => None,
                Ok(g) => Some(format!("seed {seed}: {printed} reparsed as {g}")),
                Err(e) => Some(format!("seed {seed}: {printed}: {e}")),
            }
        })
        .collect();
    let mut out = Outcome::count(results.iter().filter(|r| r.is_none()).count(), results.len());
    if let Some(Some(e)) = results.iter().find(|r| r.is_some()) {
        out.note = format!(" {e}");
    }
    out
}

type Criterion = (u32, &'static str, Duration, Box<dyn Fn() -> Outcome>);

fn main() {
    let secs = Duration::from_secs;
    let criteria: Vec<Criterion> = vec![
        (1, "juice example region and proof", secs(1), Box::new(juice)),
        (
            2,
            "zero-sum reduction and determinacy",
            secs(30),
            Box::new(|| lemmas(&[LemmaId::L3, LemmaId::CorDet], 1000, LEMMA_SPACE)),
        ),
        (
            3,
            "systematized regions and joint cooperation",
            secs(60),
            Box::new(|| lemmas(&[LemmaId::L4, LemmaId::CorCoop], 1000, LEMMA_SPACE)),
        ),
        (
            4,
            "monotonicity in both goals and for disjoint goals",
            secs(30),
            Box::new(|| lemmas(&[LemmaId::L1, LemmaId::L2], 1000, LEMMA_SPACE)),
        ),
        (
            5,
            "goals-to-tests and complementarization",
            secs(60),
            Box::new(|| lemmas(&[LemmaId::L5, LemmaId::CA1, LemmaId::CA2], 1000, LEMMA_SPACE)),
        ),
        (6, "iterative fixpoints equal subset enumeration", secs(300), Box::new(fixpoint_oracle)),
        (7, "model-level soundness of 15 axioms and 4 rules", secs(120), Box::new(axiom_soundness)),
        (8, "parse of print is the identity", secs(10), Box::new(round_trip)),
    ];
    let mut failures = 0;
    for (n, name, limit, run) in criteria {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let ok = out.total > 0 && out.passed == out.total && elapsed < limit;
        if !ok {
            failures += 1;
        }
        println!(
            "criterion {n} {}: {name}: {}/{} in {:.2}s (limit {}s){}",
            if ok { "PASS" } else { "FAIL" },
            out.passed,
            out.total,
            elapsed.as_secs_f64(),
            limit.as_secs(),
            out.note
        );
    }
    if failures > 0 {
        println!("{failures} criterion(s) failed");
        std::process::exit(1);
    }
}
