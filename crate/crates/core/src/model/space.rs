use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};

use super::{ModelError, StateSet};
use crate::syntax::{Formula, Term};
use crate::Rational;

pub const DEFAULT_STATE_CAP: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithMode {
    /// Rational values from explicit domains; escaping a domain is an error.
    Strict,
    /// Integer values; every variable wraps around its own modulus. The
    /// payload is the largest modulus, which is what term values are reduced
    /// by.
    Modular(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub domain: Vec<Rational>,
    /// Set in modular mode, where `domain` is exactly `0..modulus`.
    pub modulus: Option<u64>,
}

/// A state is identified by its index in enumeration order.
pub type State = usize;

/// Variables with finite domains, enumerated lexicographically: the first
/// variable is the most significant digit.
#[derive(Debug, Clone)]
pub struct StateSpace {
    vars: Vec<Variable>,
    index: HashMap<String, usize>,
    lookup: Vec<HashMap<Rational, usize>>,
    strides: Vec<usize>,
    size: usize,
    mode: ArithMode,
}

impl PartialEq for StateSpace {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars && self.mode == other.mode
    }
}

impl StateSpace {
    pub fn new(vars: Vec<Variable>, strict: bool) -> Result<StateSpace, ModelError> {
        StateSpace::with_cap(vars, strict, DEFAULT_STATE_CAP)
    }

    pub fn with_cap(vars: Vec<Variable>, strict: bool, cap: usize) -> Result<StateSpace, ModelError> {
        let mut index = HashMap::new();
        let mut lookup = Vec::new();
        let mut size: usize = 1;
        let mut max_mod = 0u64;
        for (i, v) in vars.iter().enumerate() {
            if index.insert(v.name.clone(), i).is_some() {
                return Err(ModelError::DuplicateVariable(v.name.clone()));
            }
            if v.domain.is_empty() {
                return Err(ModelError::EmptyDomain(v.name.clone()));
            }
            match (strict, v.modulus) {
                (true, Some(_)) | (false, None) => {
                    return Err(ModelError::MixedModes(v.name.clone()));
                }
                (false, Some(m)) => {
                    let expected: Vec<Rational> = (0..m).map(|k| Rational::from_integer(k.into())).collect();
                    if m == 0 || v.domain != expected {
                        return Err(ModelError::MixedModes(v.name.clone()));
                    }
                    max_mod = max_mod.max(m);
                }
                (true, None) => {}
            }
            let mut map = HashMap::new();
            for (k, value) in v.domain.iter().enumerate() {
                if map.insert(value.clone(), k).is_some() {
                    return Err(ModelError::DuplicateValue(v.name.clone(), value.to_string()));
                }
            }
            lookup.push(map);
            size = size
                .checked_mul(v.domain.len())
                .filter(|s| *s <= cap)
                .ok_or(ModelError::SpaceTooLarge { cap })?;
        }
        let mut strides = vec![1; vars.len()];
        for i in (0..vars.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * vars[i + 1].domain.len();
        }
        let mode = if strict {
            ArithMode::Strict
        } else {
            ArithMode::Modular(max_mod.max(1))
        };
        Ok(StateSpace {
            vars,
            index,
            lookup,
            strides,
            size,
            mode,
        })
    }

    /// Uniform or mixed modular space, e.g. `[("x", 3), ("y", 2)]`.
    pub fn modular(vars: &[(&str, u64)]) -> Result<StateSpace, ModelError> {
        StateSpace::new(
            vars.iter()
                .map(|(name, m)| Variable {
                    name: name.to_string(),
                    domain: (0..*m).map(|k| Rational::from_integer(k.into())).collect(),
                    modulus: Some(*m),
                })
                .collect(),
            false,
        )
    }

    /// Strict space over integer domains.
    pub fn strict(vars: &[(&str, Vec<i64>)]) -> Result<StateSpace, ModelError> {
        StateSpace::new(
            vars.iter()
                .map(|(name, dom)| Variable {
                    name: name.to_string(),
                    domain: dom.iter().map(|k| Rational::from_integer((*k).into())).collect(),
                    modulus: None,
                })
                .collect(),
            true,
        )
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn mode(&self) -> ArithMode {
        self.mode
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn require_var(&self, name: &str) -> Result<usize, ModelError> {
        self.var_index(name)
            .ok_or_else(|| ModelError::UnknownVariable(name.to_string()))
    }

    pub fn empty_set(&self) -> StateSet {
        StateSet::empty(self.size)
    }

    pub fn full_set(&self) -> StateSet {
        StateSet::full(self.size)
    }

    pub fn digit(&self, state: State, var: usize) -> usize {
        (state / self.strides[var]) % self.vars[var].domain.len()
    }

    pub fn value(&self, state: State, var: usize) -> &Rational {
        &self.vars[var].domain[self.digit(state, var)]
    }

    pub fn with_digit(&self, state: State, var: usize, digit: usize) -> State {
        let old = self.digit(state, var);
        state - old * self.strides[var] + digit * self.strides[var]
    }

    pub fn values(&self, state: State) -> Vec<Rational> {
        (0..self.vars.len()).map(|v| self.value(state, v).clone()).collect()
    }

    /// The state with the given values; every variable must be listed.
    pub fn state_of(&self, assignment: &[(String, Rational)]) -> Result<State, ModelError> {
        let mut digits: Vec<Option<usize>> = vec![None; self.vars.len()];
        for (name, value) in assignment {
            let v = self.require_var(name)?;
            let d = self.lookup[v]
                .get(value)
                .copied()
                .ok_or_else(|| ModelError::OutOfDomainAssignment {
                    var: name.clone(),
                    value: value.to_string(),
                })?;
            digits[v] = Some(d);
        }
        let mut state = 0;
        for (v, d) in digits.iter().enumerate() {
            let d = d.ok_or_else(|| ModelError::IncompleteState(self.vars[v].name.clone()))?;
            state += d * self.strides[v];
        }
        Ok(state)
    }

    pub fn describe_state(&self, state: State) -> String {
        let parts: Vec<String> = self
            .vars
            .iter()
            .enumerate()
            .map(|(v, var)| format!("{}={}", var.name, self.value(state, v)))
            .collect();
        format!("{{{}}}", parts.join(", "))
    }

    /// Exact value of `e`, with no modular reduction.
    pub fn eval_exact(&self, state: State, e: &Term) -> Result<Rational, ModelError> {
        Ok(match e {
            Term::Var(x) => self.value(state, self.require_var(x)?).clone(),
            Term::Const(c) => {
                if matches!(self.mode, ArithMode::Modular(_)) && !c.is_integer() {
                    return Err(ModelError::NonIntegerInModularMode(c.to_string()));
                }
                c.clone()
            }
            Term::Add(l, r) => self.eval_exact(state, l)? + self.eval_exact(state, r)?,
            Term::Sub(l, r) => self.eval_exact(state, l)? - self.eval_exact(state, r)?,
            Term::Mul(l, r) => self.eval_exact(state, l)? * self.eval_exact(state, r)?,
            Term::Neg(t) => -self.eval_exact(state, t)?,
        })
    }

    /// Term value as used by comparisons: exact in strict mode, reduced
    /// into `0..m` in modular mode.
    pub fn eval_term(&self, state: State, e: &Term) -> Result<Rational, ModelError> {
        let v = self.eval_exact(state, e)?;
        Ok(match self.mode {
            ArithMode::Strict => v,
            ArithMode::Modular(m) => reduce(&v, m),
        })
    }

    /// The state reached by writing `value` into `var`.
    pub fn assign(&self, state: State, var: usize, value: &Rational) -> Result<State, ModelError> {
        let value = match self.vars[var].modulus {
            Some(m) => {
                if !value.is_integer() {
                    return Err(ModelError::NonIntegerInModularMode(value.to_string()));
                }
                reduce(value, m)
            }
            None => value.clone(),
        };
        match self.lookup[var].get(&value) {
            Some(d) => Ok(self.with_digit(state, var, *d)),
            None => Err(ModelError::OutOfDomainAssignment {
                var: self.vars[var].name.clone(),
                value: value.to_string(),
            }),
        }
    }

    /// Like [`assign`](Self::assign) but reports a domain escape as `None`
    /// in strict mode instead of an error.
    pub fn try_assign(&self, state: State, var: usize, value: &Rational) -> Result<Option<State>, ModelError> {
        match self.assign(state, var, value) {
            Ok(s) => Ok(Some(s)),
            Err(ModelError::OutOfDomainAssignment { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// Truth set of an atomic formula.
    pub fn atomic_truth_set(&self, f: &Formula) -> Result<StateSet, ModelError> {
        match f {
            Formula::True => Ok(self.full_set()),
            Formula::False => Ok(self.empty_set()),
            Formula::Geq(l, r) => {
                let mut out = self.empty_set();
                for s in 0..self.size {
                    if self.eval_term(s, l)? >= self.eval_term(s, r)? {
                        out.insert(s);
                    }
                }
                Ok(out)
            }
            _ => Err(ModelError::NotAtomic(f.to_string())),
        }
    }

    /// One line per member state.
    pub fn list_states(&self, set: &StateSet) -> Vec<String> {
        set.iter().map(|s| self.describe_state(s)).collect()
    }
}

pub(crate) fn reduce(v: &Rational, m: u64) -> Rational {
    let m = BigInt::from(m);
    let n = v.to_integer().mod_floor(&m);
    Rational::from_integer(n)
}

/// Small non-negative integer view, used for moduli and horizons.
pub(crate) fn as_small_uint(v: &Rational) -> Option<u64> {
    if v.is_integer() && !v.is_negative() {
        v.to_integer().to_u64()
    } else {
        None
    }
}

impl fmt::Display for StateSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .vars
            .iter()
            .map(|v| match v.modulus {
                Some(m) => format!("{} mod {m}", v.name),
                None => {
                    let vals: Vec<String> = v.domain.iter().map(|d| d.to_string()).collect();
                    format!("{} in {{{}}}", v.name, vals.join(","))
                }
            })
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}
