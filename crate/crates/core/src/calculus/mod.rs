//! Sequent proof checking: axiom and rule application, leaf discharge and
//! the line-oriented script format.
//!
//! ```text
//! model juice.model
//! goal o=0, t=0 ==> <{t'=1}; {o'=1}^d>(o=3, t=5)
//! step s1 seqA at R0 premises [s2]
//! step s2 dualA at R0.0 premises [s3]
//! ...
//! expect s2 o=0, t=0 ==> <{t'=1}>(<{o'=1}^d>(o=3, t=5), [{o'=1}^d](o=3, t=5))
//! ```

mod check;
mod leaves;
pub mod macros;
mod rules;
mod script;
mod sequent;
pub mod soundness;
mod subst;

pub use check::{check_proof, Verdict};
pub use leaves::{leaf_arith, leaf_model, taut, MAX_TAUT_ATOMS};
pub use macros::{derive_demon_monotonicity, prove_complementarization, Monotonicity};
pub use rules::{
    all_rules, apply_rule, key_category, rewrite, Inst, Insts, ProofStep, AXIOMS, DERIVED_EQUIVALENCES,
    DERIVED_IMPLICATIONS, FOL_RULES, GLOBAL_RULES, LEAF_RULES, PROP_RULES,
};
pub use script::{ProofScript, ScriptError};
pub use sequent::{Position, Sequent, Side};
pub use subst::{constant_value, normalize, subst_formula, Poly};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KernelError {
    #[error("redex mismatch: expected `{expected}`, found `{found}`")]
    RedexMismatch { expected: String, found: String },
    #[error("side condition failed: {0}")]
    SideConditionFailed(String),
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("bad position: {0}")]
    BadPosition(String),
    #[error("missing instantiation `{0}`")]
    MissingInstantiation(String),
    #[error("instantiation `{key}` must be a {category}")]
    BadInstantiation { key: String, category: String },
    #[error("rule yields {expected} premise(s) but the script records {found}")]
    PremiseCount { expected: usize, found: usize },
    #[error("leaf not closed: {0}")]
    LeafFailed(String),
}
