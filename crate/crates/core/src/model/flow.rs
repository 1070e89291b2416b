use super::space::ArithMode;
use super::{ModelError, State, StateSpace};
use crate::syntax::Term;
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Euler,
    Explicit,
}

/// Discrete stand-in for a solution of an ODE: `states[0]` is the start.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowTrajectory {
    pub states: Vec<State>,
    pub step: Rational,
    pub provenance: Provenance,
}

/// Identifies the continuous games a table serves: the evolving variable
/// and the right-hand side. The evolution constraint is applied during
/// evaluation, so it is not part of the key.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FlowKey {
    pub var: String,
    pub rhs: Term,
}

impl FlowKey {
    pub fn new(var: &str, rhs: Term) -> FlowKey {
        FlowKey {
            var: var.to_string(),
            rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowTable {
    pub key: FlowKey,
    /// Indexed by start state.
    pub trajectories: Vec<FlowTrajectory>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerPolicy {
    pub step: Rational,
    pub horizon: usize,
}

/// Forward Euler: `x_{i+1} = x_i + step * f(state_i)`. Stops after
/// `horizon` steps, or earlier in strict mode when the next value leaves the
/// domain. Modular mode wraps around.
pub fn build_euler_flow(
    space: &StateSpace,
    key: &FlowKey,
    step: &Rational,
    horizon: usize,
) -> Result<FlowTable, ModelError> {
    if *step <= Rational::from_integer(0.into()) {
        return Err(ModelError::InvalidFlow("step must be positive".into()));
    }
    let var = space.require_var(&key.var)?;
    let modular = matches!(space.mode(), ArithMode::Modular(_));
    let mut trajectories = Vec::with_capacity(space.size());
    for start in 0..space.size() {
        let mut states = vec![start];
        let mut cur = start;
        for _ in 0..horizon {
            let next_value = space.value(cur, var) + step * space.eval_exact(cur, &key.rhs)?;
            if modular && !next_value.is_integer() {
                return Err(ModelError::NonIntegerStepInModularMode(next_value.to_string()));
            }
            match space.try_assign(cur, var, &next_value)? {
                Some(next) => {
                    states.push(next);
                    cur = next;
                }
                None => break,
            }
        }
        trajectories.push(FlowTrajectory {
            states,
            step: step.clone(),
            provenance: Provenance::Euler,
        });
    }
    Ok(FlowTable {
        key: key.clone(),
        trajectories,
    })
}

/// Table where every state stays put; explicit entries override it.
pub fn stationary_flow(space: &StateSpace, key: &FlowKey) -> FlowTable {
    FlowTable {
        key: key.clone(),
        trajectories: (0..space.size())
            .map(|s| FlowTrajectory {
                states: vec![s],
                step: Rational::from_integer(1.into()),
                provenance: Provenance::Explicit,
            })
            .collect(),
    }
}
