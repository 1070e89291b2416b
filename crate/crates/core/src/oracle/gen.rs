//! Seeded generators for games, formulas and goal sets.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{StateSet, StateSpace};
use crate::syntax::{Formula, Game, Term};
use crate::Rational;

/// Relative constructor weights for random games at depth >= 1.
pub const GAME_WEIGHTS: [(&str, f64); 7] = [
    ("assign", 0.15),
    ("test", 0.10),
    ("ode", 0.05),
    ("choice", 0.20),
    ("seq", 0.20),
    ("dual", 0.15),
    ("repeat", 0.15),
];

pub fn constructor_name(g: &Game) -> &'static str {
    match g {
        Game::Assign(..) => "assign",
        Game::Ode { .. } => "ode",
        Game::Test(_) => "test",
        Game::Choice(..) => "choice",
        Game::Seq(..) => "seq",
        Game::Dual(_) => "dual",
        Game::Repeat(_) => "repeat",
    }
}

/// Vocabulary for semantic generators: variables with the number of values
/// they take. Constants are drawn from `0..size`.
#[derive(Debug, Clone)]
pub struct GenConfig {
    pub vars: Vec<(String, u64)>,
    /// Emit continuous games; the model then needs a default flow policy.
    pub ode: bool,
}

impl GenConfig {
    pub fn for_space(space: &StateSpace, ode: bool) -> GenConfig {
        GenConfig {
            vars: space
                .vars()
                .iter()
                .map(|v| (v.name.clone(), v.domain.len() as u64))
                .collect(),
            ode,
        }
    }
}

pub struct Gen {
    rng: ChaCha8Rng,
    cfg: GenConfig,
}

impl Gen {
    pub fn new(seed: u64, cfg: GenConfig) -> Gen {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            cfg,
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn var(&mut self) -> (String, u64) {
        self.cfg.vars.choose(&mut self.rng).cloned().expect("at least one variable")
    }

    fn constant(&mut self, bound: u64) -> Term {
        Term::int(self.rng.gen_range(0..bound.max(1)) as i64)
    }

    pub fn term(&mut self, depth: usize) -> Term {
        let (x, m) = self.var();
        if depth == 0 || self.rng.gen_bool(0.4) {
            return if self.rng.gen_bool(0.7) {
                Term::Var(x)
            } else {
                self.constant(m)
            };
        }
        let l = self.term(depth - 1);
        let r = self.term(depth - 1);
        match self.rng.gen_range(0..4) {
            0 | 1 => Term::add(l, r),
            2 => Term::sub(l, r),
            _ => Term::mul(l, r),
        }
    }

    pub fn atom(&mut self) -> Formula {
        let (x, m) = self.var();
        let c = self.constant(m);
        match self.rng.gen_range(0..10) {
            0 => Formula::True,
            1 => Formula::False,
            2..=4 => Formula::geq(Term::Var(x), c),
            5 | 6 => Formula::eq(Term::Var(x), c),
            7 => Formula::geq(c, Term::Var(x)),
            _ => Formula::geq(self.term(1), self.term(1)),
        }
    }

    /// Quantifier- and modality-free formula.
    pub fn prop_formula(&mut self, depth: usize) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.5) {
            return self.atom();
        }
        match self.rng.gen_range(0..3) {
            0 => Formula::not(self.prop_formula(depth - 1)),
            1 => Formula::and(self.prop_formula(depth - 1), self.prop_formula(depth - 1)),
            _ => Formula::or(self.prop_formula(depth - 1), self.prop_formula(depth - 1)),
        }
    }

    fn pick_constructor(&mut self, atomic_only: bool) -> &'static str {
        let weights: Vec<(&'static str, f64)> = GAME_WEIGHTS
            .iter()
            .filter(|(name, _)| !atomic_only || matches!(*name, "assign" | "test" | "ode"))
            .map(|(name, w)| {
                if *name == "ode" && !self.cfg.ode {
                    (*name, 0.0)
                } else if *name == "assign" && !self.cfg.ode {
                    (*name, w + 0.05)
                } else {
                    (*name, *w)
                }
            })
            .collect();
        let total: f64 = weights.iter().map(|(_, w)| w).sum();
        let mut roll = self.rng.gen_range(0.0..total);
        for (name, w) in &weights {
            if roll < *w {
                return name;
            }
            roll -= w;
        }
        weights.last().unwrap().0
    }

    /// A random game of depth at most `max_depth`; depth 0 is atomic.
    pub fn game(&mut self, max_depth: usize) -> Game {
        match self.pick_constructor(max_depth == 0) {
            "assign" => {
                let (x, _) = self.var();
                Game::Assign(x, self.term(1))
            }
            "test" => Game::test(self.prop_formula(1)),
            "ode" => {
                let (x, m) = self.var();
                let rate = Term::int(self.rng.gen_range(1..m.max(2)) as i64);
                let constraint = if self.rng.gen_bool(0.5) {
                    Formula::True
                } else {
                    self.atom()
                };
                Game::ode(&x, rate, constraint)
            }
            "choice" => Game::choice(self.game(max_depth - 1), self.game(max_depth - 1)),
            "seq" => Game::seq(self.game(max_depth - 1), self.game(max_depth - 1)),
            "dual" => Game::dual(self.game(max_depth - 1)),
            _ => Game::repeat(self.game(max_depth - 1)),
        }
    }

    /// Uniformly random subset.
    pub fn set(&mut self, n: usize) -> StateSet {
        let mut s = StateSet::empty(n);
        for i in 0..n {
            if self.rng.gen_bool(0.5) {
                s.insert(i);
            }
        }
        s
    }
}

/// Random game over `space`'s variables without continuous games.
pub fn gen_game(seed: u64, max_depth: usize, space: &StateSpace) -> Game {
    Gen::new(seed, GenConfig::for_space(space, false)).game(max_depth)
}

/// A modality-free formula whose truth set is exactly `set`.
pub fn characteristic_formula(space: &StateSpace, set: &StateSet) -> Formula {
    let state_formula = |s: usize| {
        Formula::conjunction(space.vars().iter().enumerate().map(|(v, var)| {
            Formula::eq(Term::Var(var.name.clone()), Term::Const(space.value(s, v).clone()))
        }))
    };
    if set.count() * 2 > set.len() {
        let rest = set.complement();
        if rest.is_empty() {
            return Formula::True;
        }
        Formula::not(Formula::disjunction(rest.iter().map(state_formula)))
    } else {
        Formula::disjunction(set.iter().map(state_formula))
    }
}

/// Generator of arbitrary well-formed syntax, for printer and parser tests.
pub struct SyntaxGen {
    rng: ChaCha8Rng,
}

const KEYWORDS: [&str; 4] = ["true", "false", "forall", "exists"];

impl SyntaxGen {
    pub fn new(seed: u64) -> SyntaxGen {
        SyntaxGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn ident(&mut self) -> String {
        const FIRST: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
        const REST: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_";
        loop {
            let len = self.rng.gen_range(1..=4);
            let mut s = String::new();
            s.push(*FIRST.choose(&mut self.rng).unwrap() as char);
            for _ in 1..len {
                s.push(*REST.choose(&mut self.rng).unwrap() as char);
            }
            if !KEYWORDS.contains(&s.as_str()) {
                return s;
            }
        }
    }

    fn rational(&mut self) -> Rational {
        let n: i64 = self.rng.gen_range(-20..=20);
        let d: i64 = if self.rng.gen_bool(0.7) { 1 } else { self.rng.gen_range(1..=9) };
        Rational::new(n.into(), d.into())
    }

    pub fn term(&mut self, depth: usize) -> Term {
        if depth == 0 || self.rng.gen_bool(0.3) {
            return if self.rng.gen_bool(0.5) {
                Term::Var(self.ident())
            } else {
                Term::Const(self.rational())
            };
        }
        match self.rng.gen_range(0..4) {
            0 => Term::add(self.term(depth - 1), self.term(depth - 1)),
            1 => Term::sub(self.term(depth - 1), self.term(depth - 1)),
            2 => Term::mul(self.term(depth - 1), self.term(depth - 1)),
            _ => Term::neg(self.term(depth - 1)),
        }
    }

    fn modal_free(&mut self, depth: usize) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.4) {
            return match self.rng.gen_range(0..4) {
                0 => Formula::True,
                1 => Formula::False,
                _ => Formula::geq(self.term(1), self.term(1)),
            };
        }
        match self.rng.gen_range(0..3) {
            0 => Formula::not(self.modal_free(depth - 1)),
            1 => Formula::and(self.modal_free(depth - 1), self.modal_free(depth - 1)),
            _ => Formula::or(self.modal_free(depth - 1), self.modal_free(depth - 1)),
        }
    }

    pub fn game(&mut self, depth: usize) -> Game {
        let atomic = depth == 0 || self.rng.gen_bool(0.25);
        let k = if atomic { self.rng.gen_range(0..3) } else { self.rng.gen_range(3..7) };
        let sub = depth.saturating_sub(1);
        match k {
            0 => Game::Assign(self.ident(), self.term(sub.min(3))),
            1 => {
                let constraint = if self.rng.gen_bool(0.5) {
                    Formula::True
                } else {
                    self.modal_free(sub.min(2))
                };
                Game::ode(&self.ident(), self.term(sub.min(2)), constraint)
            }
            2 => Game::test(self.formula(sub)),
            3 => Game::choice(self.game(sub), self.game(sub)),
            4 => Game::seq(self.game(sub), self.game(sub)),
            5 => Game::dual(self.game(sub)),
            _ => Game::repeat(self.game(sub)),
        }
    }

    /// Any formula of depth at most `depth`, including sugar shapes.
    pub fn formula(&mut self, depth: usize) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.2) {
            return match self.rng.gen_range(0..5) {
                0 => Formula::True,
                1 => Formula::False,
                2 => Formula::eq(self.term(2), self.term(2)),
                _ => Formula::geq(self.term(2), self.term(2)),
            };
        }
        let sub = depth - 1;
        match self.rng.gen_range(0..12) {
            0 => Formula::not(self.formula(sub)),
            1 => Formula::and(self.formula(sub), self.formula(sub)),
            2 => Formula::or(self.formula(sub), self.formula(sub)),
            3 => Formula::implies(self.formula(sub), self.formula(sub)),
            4 => Formula::equiv(self.formula(sub), self.formula(sub)),
            5 => Formula::forall(&self.ident(), self.formula(sub)),
            6 => Formula::exists(&self.ident(), self.formula(sub)),
            7 => Formula::angel(self.game(sub), self.formula(sub), self.formula(sub)),
            8 => Formula::demon(self.game(sub), self.formula(sub), self.formula(sub)),
            9 => Formula::angel_single(self.game(sub), self.formula(sub)),
            10 => Formula::demon_single(self.game(sub), self.formula(sub)),
            _ => Formula::not(Formula::geq(self.term(2), self.term(2))),
        }
    }
}
