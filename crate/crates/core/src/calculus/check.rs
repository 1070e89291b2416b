use std::fmt;

use super::rules::{apply_rule, ProofStep};
use super::script::ProofScript;
use super::sequent::Sequent;
use super::KernelError;
use crate::model::Model;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Accepted,
    /// `path` lists step ids from the root to the failing step.
    Rejected { path: Vec<String>, reason: KernelError },
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Accepted => f.write_str("accepted"),
            Verdict::Rejected { path, reason } => write!(f, "rejected at {}: {reason}", path.join("/")),
        }
    }
}

fn check_step(s: &Sequent, step: &ProofStep, model: Option<&Model>, path: &mut Vec<String>) -> Result<(), KernelError> {
    path.push(step.id.clone());
    if let Some(e) = &step.expect {
        if e != s {
            return Err(KernelError::RedexMismatch {
                expected: e.to_string(),
                found: s.to_string(),
            });
        }
    }
    let premises = apply_rule(s, step, model)?;
    if premises.len() != step.premises.len() {
        return Err(KernelError::PremiseCount {
            expected: premises.len(),
            found: step.premises.len(),
        });
    }
    // A premise whose recorded sequent disagrees with what this rule yields
    // is blamed on this step.
    for (p, sub) in premises.iter().zip(&step.premises) {
        if let Some(e) = &sub.expect {
            if e != p {
                return Err(KernelError::RedexMismatch {
                    expected: e.to_string(),
                    found: p.to_string(),
                });
            }
        }
    }
    for (p, sub) in premises.iter().zip(&step.premises) {
        check_step(p, sub, model, path)?;
    }
    path.pop();
    Ok(())
}

/// Depth-first check of every step against the kernel. `model` serves
/// `leafModel` leaves and quantifier expansion in `leafArith`.
pub fn check_proof(script: &ProofScript, model: Option<&Model>) -> Verdict {
    let mut path = Vec::new();
    match check_step(&script.goal, &script.root, model, &mut path) {
        Ok(()) => Verdict::Accepted,
        Err(reason) => Verdict::Rejected { path, reason },
    }
}
