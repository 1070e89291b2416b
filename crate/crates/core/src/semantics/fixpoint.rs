use super::SemError;
use crate::model::StateSet;

pub type RoundFn<'f> = dyn FnMut(&StateSet) -> Result<StateSet, SemError> + 'f;

/// Computes least and greatest fixpoints of monotone set operators over a
/// space of `n` states.
pub trait FixpointSolver: Sync {
    fn lfp(&self, n: usize, f: &mut RoundFn<'_>) -> Result<StateSet, SemError>;
    fn gfp(&self, n: usize, f: &mut RoundFn<'_>) -> Result<StateSet, SemError>;
}

/// Knaster-Tarski iteration: upward from the empty set for least fixpoints,
/// downward from the full set for greatest ones.
#[derive(Debug, Clone, Copy, Default)]
pub struct Iterative {
    /// Maximum number of operator applications; `None` means `n + 1`.
    pub budget: Option<usize>,
}

impl Iterative {
    fn run(&self, start: StateSet, f: &mut RoundFn<'_>) -> Result<StateSet, SemError> {
        let budget = self.budget.unwrap_or(start.len() + 1);
        let mut z = start;
        for _ in 0..budget {
            let next = f(&z)?;
            if next == z {
                return Ok(z);
            }
            z = next;
        }
        Err(SemError::FixpointBudgetExceeded { budget })
    }
}

impl FixpointSolver for Iterative {
    fn lfp(&self, n: usize, f: &mut RoundFn<'_>) -> Result<StateSet, SemError> {
        self.run(StateSet::empty(n), f)
    }

    fn gfp(&self, n: usize, f: &mut RoundFn<'_>) -> Result<StateSet, SemError> {
        self.run(StateSet::full(n), f)
    }
}
