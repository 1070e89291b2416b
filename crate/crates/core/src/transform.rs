//! Syntactic transforms between two-goal modalities and zero-sum ones.

use crate::syntax::{Formula, Game};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransformError {
    #[error("not a modality: {0}")]
    NotAModality(String),
}

/// Erases every dual operator, leaving the hybrid system in which one
/// coalition resolves all choices.
pub fn systematize(g: &Game) -> Game {
    match g {
        Game::Assign(..) | Game::Ode { .. } | Game::Test(_) => g.clone(),
        Game::Choice(a, b) => Game::choice(systematize(a), systematize(b)),
        Game::Seq(a, b) => Game::seq(systematize(a), systematize(b)),
        Game::Dual(a) => systematize(a),
        Game::Repeat(a) => Game::repeat(systematize(a)),
    }
}

fn map_game_formulas(g: &Game, f: &impl Fn(&Formula) -> Formula) -> Game {
    match g {
        Game::Assign(..) | Game::Ode { .. } => g.clone(),
        Game::Test(q) => Game::test(f(q)),
        Game::Choice(a, b) => Game::choice(map_game_formulas(a, f), map_game_formulas(b, f)),
        Game::Seq(a, b) => Game::seq(map_game_formulas(a, f), map_game_formulas(b, f)),
        Game::Dual(a) => Game::dual(map_game_formulas(a, f)),
        Game::Repeat(a) => Game::repeat(map_game_formulas(a, f)),
    }
}

/// One complementarization step on a modality, without recursion:
///
/// * `<a>(P, Q)` becomes `<a^-d>(P & Q) | <a>P`
/// * `[a](P, Q)` becomes `<a^-d>(P & Q) | [a]Q`
pub fn complementarize_step(f: &Formula) -> Result<Formula, TransformError> {
    match f {
        Formula::Angel(g, p, q) => Ok(Formula::or(
            Formula::angel_single(systematize(g), Formula::and((**p).clone(), (**q).clone())),
            Formula::angel_single((**g).clone(), (**p).clone()),
        )),
        Formula::Demon(g, p, q) => Ok(Formula::or(
            Formula::angel_single(systematize(g), Formula::and((**p).clone(), (**q).clone())),
            Formula::demon_single((**g).clone(), (**q).clone()),
        )),
        _ => Err(TransformError::NotAModality(f.to_string())),
    }
}

/// Rewrites every modality of `f`, including those inside tests, into
/// modalities with complementary goals. Each original modality is split
/// exactly once, even if its goals already are complementary.
pub fn complementarize(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Geq(..) => f.clone(),
        Formula::Not(p) => Formula::not(complementarize(p)),
        Formula::And(p, q) => Formula::and(complementarize(p), complementarize(q)),
        Formula::Forall(x, p) => Formula::forall(x, complementarize(p)),
        Formula::Exists(x, p) => Formula::exists(x, complementarize(p)),
        Formula::Angel(g, p, q) | Formula::Demon(g, p, q) => {
            let g = map_game_formulas(g, &complementarize);
            let p = complementarize(p);
            let q = complementarize(q);
            let m = if matches!(f, Formula::Angel(..)) {
                Formula::angel(g, p, q)
            } else {
                Formula::demon(g, p, q)
            };
            complementarize_step(&m).expect("modality")
        }
    }
}

/// True when every modality (including those inside tests) has goals of
/// the form `(P, !P)` for Angel or `(!Q, Q)` for Demon.
pub fn is_complementary(f: &Formula) -> bool {
    fn game_ok(g: &Game) -> bool {
        match g {
            Game::Assign(..) => true,
            Game::Ode { constraint, .. } => is_complementary(constraint),
            Game::Test(q) => is_complementary(q),
            Game::Choice(a, b) | Game::Seq(a, b) => game_ok(a) && game_ok(b),
            Game::Dual(a) | Game::Repeat(a) => game_ok(a),
        }
    }
    match f {
        Formula::True | Formula::False | Formula::Geq(..) => true,
        Formula::Not(p) | Formula::Forall(_, p) | Formula::Exists(_, p) => is_complementary(p),
        Formula::And(p, q) => is_complementary(p) && is_complementary(q),
        Formula::Angel(g, p, q) => {
            matches!(q.as_ref(), Formula::Not(inner) if inner == p) && game_ok(g) && is_complementary(p)
        }
        Formula::Demon(g, p, q) => {
            matches!(p.as_ref(), Formula::Not(inner) if inner == q) && game_ok(g) && is_complementary(q)
        }
    }
}

/// Moves both goals into tests at the end of the game, in both orders:
/// `<a>(P, Q)` becomes `<a; ?P; (?Q)^d>(true, true) & <a; (?Q)^d; ?P>(true, true)`
/// and likewise for `[a](P, Q)`.
pub fn goals_to_tests(f: &Formula) -> Result<Formula, TransformError> {
    let (g, p, q, angel) = match f {
        Formula::Angel(g, p, q) => (g, p, q, true),
        Formula::Demon(g, p, q) => (g, p, q, false),
        _ => return Err(TransformError::NotAModality(f.to_string())),
    };
    let test_p = Game::test((**p).clone());
    let test_q = Game::dual(Game::test((**q).clone()));
    let first = Game::seq((**g).clone(), Game::seq(test_p.clone(), test_q.clone()));
    let second = Game::seq((**g).clone(), Game::seq(test_q, test_p));
    let wrap = |h: Game| {
        if angel {
            Formula::angel(h, Formula::True, Formula::True)
        } else {
            Formula::demon(h, Formula::True, Formula::True)
        }
    };
    Ok(Formula::and(wrap(first), wrap(second)))
}
