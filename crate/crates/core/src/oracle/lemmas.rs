use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;

use super::gen::{characteristic_formula, Gen, GenConfig};
use crate::model::{Model, StateSet};
use crate::semantics::{SemContext, SemError};
use crate::syntax::{Formula, Game};
use crate::transform::{complementarize, complementarize_step, goals_to_tests, systematize};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LemmaId {
    /// Monotonicity in both goals.
    L1,
    /// Monotonicity for initially disjoint goals.
    L2,
    /// Complementary goals collapse to zero-sum regions.
    L3,
    /// Determinacy for complementary goals.
    CorDet,
    /// Regions as systematized plus zero-sum regions.
    L4,
    /// Joint cooperation.
    CorCoop,
    /// Goals converted into tests.
    L5,
    /// Complementarization for Angel modalities.
    CA1,
    /// Complementarization for Demon modalities.
    CA2,
    /// Model-level soundness of one calculus axiom or rule.
    AxiomSoundness(String),
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LemmaId::L1 => f.write_str("L1"),
            LemmaId::L2 => f.write_str("L2"),
            LemmaId::L3 => f.write_str("L3"),
            LemmaId::CorDet => f.write_str("Cor-det"),
            LemmaId::L4 => f.write_str("L4"),
            LemmaId::CorCoop => f.write_str("Cor-coop"),
            LemmaId::L5 => f.write_str("L5"),
            LemmaId::CA1 => f.write_str("CA1"),
            LemmaId::CA2 => f.write_str("CA2"),
            LemmaId::AxiomSoundness(r) => write!(f, "axiom-soundness({r})"),
        }
    }
}

impl FromStr for LemmaId {
    type Err = String;

    fn from_str(s: &str) -> Result<LemmaId, String> {
        Ok(match s {
            "L1" => LemmaId::L1,
            "L2" => LemmaId::L2,
            "L3" => LemmaId::L3,
            "Cor-det" => LemmaId::CorDet,
            "L4" => LemmaId::L4,
            "Cor-coop" => LemmaId::CorCoop,
            "L5" => LemmaId::L5,
            "CA1" => LemmaId::CA1,
            "CA2" => LemmaId::CA2,
            _ => {
                let rule = s
                    .strip_prefix("axiom-soundness(")
                    .and_then(|r| r.strip_suffix(')'))
                    .or_else(|| s.strip_prefix("axiom-soundness:"))
                    .ok_or_else(|| format!("unknown lemma id `{s}`"))?;
                if !crate::calculus::soundness::RULES.contains(&rule) {
                    return Err(format!("unknown rule `{rule}`"));
                }
                LemmaId::AxiomSoundness(rule.to_string())
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseResult {
    pub seed: u64,
    pub pass: bool,
    pub details: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaReport {
    pub id: LemmaId,
    pub space: String,
    pub results: Vec<CaseResult>,
}

impl LemmaReport {
    pub fn passed(&self) -> usize {
        self.results.iter().filter(|r| r.pass).count()
    }

    pub fn all_pass(&self) -> bool {
        self.passed() == self.results.len()
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseResult> {
        self.results.iter().filter(|r| !r.pass)
    }

    pub fn summary(&self) -> String {
        format!(
            "lemma {} over [{}]: {}/{} passed",
            self.id,
            self.space,
            self.passed(),
            self.results.len()
        )
    }

    /// Summary line followed by one `seed,<pass|fail>,<details>` line per seed.
    pub fn render(&self) -> String {
        let mut out = self.summary();
        out.push('\n');
        for r in &self.results {
            out.push_str(&format!(
                "{},{},{}\n",
                r.seed,
                if r.pass { "pass" } else { "fail" },
                r.details
            ));
        }
        out
    }
}

/// A generated instance: games, raw goal masks and a side flag. Lemma
/// hypotheses are imposed when the masks are interpreted, so shrinking can
/// clear bits freely.
#[derive(Debug, Clone)]
struct Case {
    games: Vec<Game>,
    sets: Vec<StateSet>,
    nested: bool,
}

impl Case {
    fn describe(&self) -> String {
        let games: Vec<String> = self.games.iter().map(|g| format!("\"{g}\"")).collect();
        let sets: Vec<String> = self.sets.iter().map(|s| s.to_hex()).collect();
        format!("games=[{}] sets=[{}]", games.join(" "), sets.join(" "))
    }
}

fn generate(id: &LemmaId, seed: u64, model: &Model) -> Case {
    let n = model.space.size();
    let mut g = Gen::new(seed, GenConfig::for_space(&model.space, model.default_flow.is_some()));
    let depth = g.rng().gen_range(0..=4);
    let game = g.game(depth);
    let mut games = vec![game];
    let nested = matches!(id, LemmaId::CA1 | LemmaId::CA2) && g.rng().gen_bool(0.5);
    if nested {
        let d = g.rng().gen_range(0..=2);
        games.push(g.game(d));
    }
    let sets = (0..4).map(|_| g.set(n)).collect();
    Case { games, sets, nested }
}

fn subset_check(name: &str, small: &StateSet, big: &StateSet) -> Option<String> {
    if small.is_subset(big) {
        None
    } else {
        Some(format!("{name}: {} not within {}", small.to_hex(), big.to_hex()))
    }
}

fn eq_check(name: &str, lhs: &StateSet, rhs: &StateSet) -> Option<String> {
    if lhs == rhs {
        None
    } else {
        Some(format!("{name}: lhs={} rhs={}", lhs.to_hex(), rhs.to_hex()))
    }
}

fn first(checks: Vec<Option<String>>) -> Option<String> {
    checks.into_iter().flatten().next()
}

/// `None` when the instance satisfies the lemma, else a description.
fn run(id: &LemmaId, case: &Case, model: &Model) -> Result<Option<String>, SemError> {
    let ctx = SemContext::new(model);
    let g = &case.games[0];
    let s = &case.sets;
    let space = &model.space;
    Ok(match id {
        LemmaId::L1 => {
            let (x, y) = (&s[0], &s[1]);
            let a = x.union(&s[2]);
            let b = y.union(&s[3]);
            first(vec![
                subset_check("angel", &ctx.angel_region(g, x, y)?, &ctx.angel_region(g, &a, &b)?),
                subset_check("demon", &ctx.demon_region(g, x, y)?, &ctx.demon_region(g, &a, &b)?),
            ])
        }
        LemmaId::L2 => {
            let x = &s[0];
            let y = s[1].difference(x);
            let a = x.union(&s[2]);
            let b = &s[3];
            let angel = subset_check("angel", &ctx.angel_region(g, x, &y)?, &ctx.angel_region(g, &a, b)?);
            // Demon side: his goal grows, Angel's is arbitrary afterwards.
            let yd = &s[1];
            let xd = s[0].difference(yd);
            let bd = yd.union(&s[2]);
            let ad = &s[3];
            let demon = subset_check("demon", &ctx.demon_region(g, &xd, yd)?, &ctx.demon_region(g, ad, &bd)?);
            first(vec![angel, demon])
        }
        LemmaId::L3 => {
            let x = &s[0];
            eq_check("collapse", &ctx.angel_region(g, x, &x.complement())?, &ctx.dgl_angel_region(g, x)?)
        }
        LemmaId::CorDet => {
            let x = &s[0];
            let a = ctx.angel_region(g, x, &x.complement())?;
            eq_check("determinacy", &a.complement(), &ctx.demon_region(g, x, &x.complement())?)
        }
        LemmaId::L4 => {
            let (x, y) = (&s[0], &s[1]);
            let sys = systematize(g);
            let coop = ctx.dgl_angel_region(&sys, &x.intersection(y))?;
            first(vec![
                eq_check("angel", &ctx.angel_region(g, x, y)?, &coop.union(&ctx.dgl_angel_region(g, x)?)),
                eq_check("demon", &ctx.demon_region(g, x, y)?, &coop.union(&ctx.dgl_demon_region(g, y)?)),
            ])
        }
        LemmaId::CorCoop => {
            let (x, y) = (&s[0], &s[1]);
            let both = ctx.angel_region(g, x, y)?.intersection(&ctx.demon_region(g, x, y)?);
            let sys = systematize(g);
            eq_check("cooperation", &both, &ctx.dgl_angel_region(&sys, &x.intersection(y))?)
        }
        LemmaId::L5 => {
            let p = characteristic_formula(space, &s[0]);
            let q = characteristic_formula(space, &s[1]);
            let mut checks = Vec::new();
            for f in [
                Formula::angel(g.clone(), p.clone(), q.clone()),
                Formula::demon(g.clone(), p.clone(), q.clone()),
            ] {
                let t = goals_to_tests(&f).expect("modality");
                checks.push(eq_check(&format!("{f}"), &ctx.truth_set(&f)?, &ctx.truth_set(&t)?));
            }
            first(checks)
        }
        LemmaId::CA1 | LemmaId::CA2 => {
            let mut p = characteristic_formula(space, &s[0]);
            if case.nested {
                let inner_q = characteristic_formula(space, &s[3]);
                p = Formula::demon(case.games[1].clone(), Formula::and(p, Formula::not(inner_q.clone())), inner_q);
            }
            let q = characteristic_formula(space, &s[1]);
            let f = if *id == LemmaId::CA1 {
                Formula::angel(g.clone(), p, q)
            } else {
                Formula::demon(g.clone(), p, q)
            };
            let lhs = ctx.truth_set(&f)?;
            first(vec![
                eq_check("step", &lhs, &ctx.truth_set(&complementarize_step(&f).expect("modality"))?),
                eq_check("full", &lhs, &ctx.truth_set(&complementarize(&f))?),
            ])
        }
        LemmaId::AxiomSoundness(_) => unreachable!("handled by the calculus"),
    })
}

fn fails(id: &LemmaId, case: &Case, model: &Model) -> bool {
    !matches!(run(id, case, model), Ok(None))
}

fn replace_child(g: &Game, i: usize, c: Game) -> Game {
    match (g, i) {
        (Game::Choice(_, b), 0) => Game::choice(c, (**b).clone()),
        (Game::Choice(a, _), _) => Game::choice((**a).clone(), c),
        (Game::Seq(_, b), 0) => Game::seq(c, (**b).clone()),
        (Game::Seq(a, _), _) => Game::seq((**a).clone(), c),
        (Game::Dual(_), _) => Game::dual(c),
        (Game::Repeat(_), _) => Game::repeat(c),
        _ => unreachable!(),
    }
}

fn children(g: &Game) -> Vec<&Game> {
    match g {
        Game::Choice(a, b) | Game::Seq(a, b) => vec![a, b],
        Game::Dual(a) | Game::Repeat(a) => vec![a],
        _ => vec![],
    }
}

/// Games obtained by replacing one node with a child or with `?true`.
fn smaller_games(g: &Game) -> Vec<Game> {
    let skip = Game::test(Formula::True);
    let mut out: Vec<Game> = children(g).into_iter().cloned().collect();
    if *g != skip {
        out.push(skip);
    }
    for (i, c) in children(g).into_iter().enumerate() {
        for s in smaller_games(c) {
            out.push(replace_child(g, i, s));
        }
    }
    out
}

/// Greedy shrinking: drop game subtrees, then clear set bits.
fn shrink(id: &LemmaId, mut case: Case, model: &Model) -> Case {
    loop {
        let mut progressed = false;
        for gi in 0..case.games.len() {
            for cand in smaller_games(&case.games[gi]) {
                let mut next = case.clone();
                next.games[gi] = cand;
                if fails(id, &next, model) {
                    case = next;
                    progressed = true;
                    break;
                }
            }
        }
        for si in 0..case.sets.len() {
            for bit in case.sets[si].iter().collect::<Vec<_>>() {
                let mut next = case.clone();
                next.sets[si].remove(bit);
                if fails(id, &next, model) {
                    case = next;
                    progressed = true;
                }
            }
        }
        if !progressed {
            return case;
        }
    }
}

/// Checks one seed of one lemma.
pub fn check_seed(id: &LemmaId, seed: u64, model: &Model) -> CaseResult {
    if let LemmaId::AxiomSoundness(rule) = id {
        return crate::calculus::soundness::check_seed(rule, seed, model);
    }
    let case = generate(id, seed, model);
    match run(id, &case, model) {
        Ok(None) => CaseResult {
            seed,
            pass: true,
            details: format!("game size {}", case.games[0].size()),
        },
        outcome => {
            let reason = match outcome {
                Ok(Some(msg)) => msg,
                Err(e) => format!("error: {e}"),
                Ok(None) => unreachable!(),
            };
            let small = shrink(id, case.clone(), model);
            let small_reason = match run(id, &small, model) {
                Ok(Some(msg)) => msg,
                Err(e) => format!("error: {e}"),
                Ok(None) => String::new(),
            };
            CaseResult {
                seed,
                pass: false,
                details: format!(
                    "space=[{}] {} {reason}; shrunk: {} {small_reason}",
                    model.space,
                    case.describe(),
                    small.describe()
                ),
            }
        }
    }
}

/// Runs `id` for every seed in `seeds`, in parallel; results are in seed
/// order.
pub fn check_lemma(id: &LemmaId, seeds: impl IntoIterator<Item = u64>, model: &Model) -> LemmaReport {
    let seeds: Vec<u64> = seeds.into_iter().collect();
    let results = seeds.par_iter().map(|s| check_seed(id, *s, model)).collect();
    LemmaReport {
        id: id.clone(),
        space: model.space.to_string(),
        results,
    }
}
