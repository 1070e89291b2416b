//! Finite models: state spaces, exact term evaluation, flow tables.

mod file;
mod flow;
mod space;
mod stateset;

use std::collections::HashMap;
use std::sync::Arc;

pub use file::{parse_model, parse_space_spec};
pub use flow::{build_euler_flow, stationary_flow, EulerPolicy, FlowKey, FlowTable, FlowTrajectory, Provenance};
pub use space::{ArithMode, State, StateSpace, Variable, DEFAULT_STATE_CAP};
pub use stateset::StateSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("assignment of {value} to `{var}` leaves its domain")]
    OutOfDomainAssignment { var: String, value: String },
    #[error("flow step produces non-integer value {0} in modular mode")]
    NonIntegerStepInModularMode(String),
    #[error("non-integer value {0} in modular mode")]
    NonIntegerInModularMode(String),
    #[error("state space exceeds the cap of {cap} states")]
    SpaceTooLarge { cap: usize },
    #[error("variable `{0}` declared twice")]
    DuplicateVariable(String),
    #[error("variable `{0}` has an empty domain")]
    EmptyDomain(String),
    #[error("value {1} listed twice in the domain of `{0}`")]
    DuplicateValue(String, String),
    #[error("variable `{0}` does not fit the arithmetic mode")]
    MixedModes(String),
    #[error("state does not assign `{0}`")]
    IncompleteState(String),
    #[error("not an atomic formula: {0}")]
    NotAtomic(String),
    #[error("invalid flow: {0}")]
    InvalidFlow(String),
    #[error("no flow table for {{{0}'={1}}}")]
    MissingFlowTable(String, String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A state space together with the flow tables its continuous games use.
#[derive(Debug, Clone)]
pub struct Model {
    pub space: StateSpace,
    flows: HashMap<FlowKey, Arc<FlowTable>>,
    /// Used for continuous games without an explicit table.
    pub default_flow: Option<EulerPolicy>,
}

impl Model {
    pub fn new(space: StateSpace) -> Model {
        Model {
            space,
            flows: HashMap::new(),
            default_flow: None,
        }
    }

    pub fn with_default_flow(mut self, policy: EulerPolicy) -> Model {
        self.default_flow = Some(policy);
        self
    }

    pub fn add_flow(&mut self, table: FlowTable) {
        self.flows.insert(table.key.clone(), Arc::new(table));
    }

    pub fn add_euler_flow(&mut self, var: &str, rhs: crate::syntax::Term, step: &crate::Rational, horizon: usize) -> Result<(), ModelError> {
        let table = build_euler_flow(&self.space, &FlowKey::new(var, rhs), step, horizon)?;
        self.add_flow(table);
        Ok(())
    }

    pub fn flows(&self) -> impl Iterator<Item = &FlowTable> {
        self.flows.values().map(|t| t.as_ref())
    }

    /// The table for `key`: an explicit one if present, otherwise one built
    /// from the default policy.
    pub fn flow_for(&self, key: &FlowKey) -> Result<Arc<FlowTable>, ModelError> {
        if let Some(t) = self.flows.get(key) {
            return Ok(t.clone());
        }
        match &self.default_flow {
            Some(p) => Ok(Arc::new(build_euler_flow(&self.space, key, &p.step, p.horizon)?)),
            None => Err(ModelError::MissingFlowTable(key.var.clone(), key.rhs.to_string())),
        }
    }
}
