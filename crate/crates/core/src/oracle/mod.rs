//! Brute-force oracles, seeded generators and the lemma checker.

pub mod gen;
mod lemmas;

pub use gen::{characteristic_formula, gen_game, Gen, GenConfig, SyntaxGen, GAME_WEIGHTS};
pub use lemmas::{check_lemma, check_seed, CaseResult, LemmaId, LemmaReport};

use crate::model::StateSet;
use crate::semantics::{FixpointSolver, RoundFn, SemError};

/// Largest space the subset scans accept.
pub const MAX_ENUMERATION_STATES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("space of {0} states is too large for subset enumeration")]
    SpaceTooLarge(usize),
    #[error(transparent)]
    Sem(#[from] SemError),
}

fn all_subsets(n: usize) -> Result<impl Iterator<Item = StateSet>, OracleError> {
    if n > MAX_ENUMERATION_STATES {
        return Err(OracleError::SpaceTooLarge(n));
    }
    Ok((0u64..(1u64 << n)).map(move |m| StateSet::from_u64(n, m)))
}

/// Intersection of all pre-fixpoints `f(Z) <= Z`.
pub fn lfp_by_enumeration(n: usize, f: &mut RoundFn<'_>) -> Result<StateSet, OracleError> {
    let mut acc = StateSet::full(n);
    for z in all_subsets(n)? {
        if f(&z)?.is_subset(&z) {
            acc = acc.intersection(&z);
        }
    }
    Ok(acc)
}

/// Union of all post-fixpoints `Z <= f(Z)`.
pub fn gfp_by_enumeration(n: usize, f: &mut RoundFn<'_>) -> Result<StateSet, OracleError> {
    let mut acc = StateSet::empty(n);
    for z in all_subsets(n)? {
        if z.is_subset(&f(&z)?) {
            acc = acc.union(&z);
        }
    }
    Ok(acc)
}

/// Fixpoint solver backed by the subset scans.
#[derive(Debug, Clone, Copy, Default)]
pub struct EnumerationSolver;

fn lower(e: OracleError) -> SemError {
    match e {
        OracleError::Sem(e) => e,
        OracleError::SpaceTooLarge(n) => SemError::FixpointBudgetExceeded { budget: n },
    }
}

impl FixpointSolver for EnumerationSolver {
    fn lfp(&self, n: usize, f: &mut RoundFn<'_>) -> Result<StateSet, SemError> {
        lfp_by_enumeration(n, f).map_err(lower)
    }

    fn gfp(&self, n: usize, f: &mut RoundFn<'_>) -> Result<StateSet, SemError> {
        gfp_by_enumeration(n, f).map_err(lower)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Model, StateSpace};
    use crate::semantics::{Evaluator, FixpointSolver, Iterative, Round, SemContext};

    #[test]
    fn trivial_round_functions() {
        let c = StateSet::from_indices(6, [1, 4]);
        assert!(lfp_by_enumeration(6, &mut |z: &StateSet| Ok(z.clone())).unwrap().is_empty());
        assert!(gfp_by_enumeration(6, &mut |z: &StateSet| Ok(z.clone())).unwrap().is_full());
        assert_eq!(lfp_by_enumeration(6, &mut |_: &StateSet| Ok(c.clone())).unwrap(), c);
        assert_eq!(gfp_by_enumeration(6, &mut |_: &StateSet| Ok(c.clone())).unwrap(), c);
        assert!(matches!(
            lfp_by_enumeration(17, &mut |z: &StateSet| Ok(z.clone())),
            Err(OracleError::SpaceTooLarge(17))
        ));
    }

    #[test]
    fn repetition_round_matches_iteration() {
        let space = StateSpace::modular(&[("x", 2), ("y", 4)]).unwrap();
        let model = Model::new(space.clone());
        let ctx = SemContext::new(&model);
        for seed in 0..20 {
            let mut g = Gen::new(seed, GenConfig::for_space(&space, false));
            let body = g.game(2);
            let x = g.set(8);
            let y = g.set(8);
            let mut ev = Evaluator::new(ctx);
            let mut f = |z: &StateSet| ev.round(Round::AngelCompetitive, &body, &x, &y, z);
            let it = Iterative::default().lfp(8, &mut f).unwrap();
            let en = lfp_by_enumeration(8, &mut f).unwrap();
            assert_eq!(it, en);
        }
    }
}
