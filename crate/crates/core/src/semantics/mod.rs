//! Winning regions and truth sets over a finite model.

mod fixpoint;

use std::collections::HashMap;
use std::sync::Arc;

pub use fixpoint::{FixpointSolver, Iterative, RoundFn};

use crate::model::{FlowKey, Model, ModelError, State, StateSet};
use crate::syntax::{Formula, Game};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SemError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("fixpoint iteration did not stabilize within {budget} rounds")]
    FixpointBudgetExceeded { budget: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Player {
    Angel,
    Demon,
}

/// The three round functions of repetition games and the zero-sum one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Round {
    /// `Z -> X | A(a, Z, Z^c)`, least fixpoint.
    AngelCompetitive,
    /// `Z -> (X & Y) | (A(a, Z, Z) & D(a, Z, Z))`, least fixpoint.
    Cooperative,
    /// `Z -> Y & D(a, Z^c, Z)`, greatest fixpoint.
    DemonCompetitive,
    /// `Z -> X | A_zero_sum(a, Z)`, least fixpoint.
    ZeroSum,
}

impl Round {
    pub fn is_greatest(self) -> bool {
        self == Round::DemonCompetitive
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Kind {
    Angel,
    Demon,
    Coop,
    ZeroSum,
}

/// Immutable evaluation settings. Every query runs in a fresh
/// [`Evaluator`], so memo tables never outlive the syntax they index.
#[derive(Clone, Copy)]
pub struct SemContext<'m> {
    pub model: &'m Model,
    pub solver: &'m dyn FixpointSolver,
}

static DEFAULT_SOLVER: Iterative = Iterative { budget: None };

impl<'m> SemContext<'m> {
    pub fn new(model: &'m Model) -> SemContext<'m> {
        SemContext {
            model,
            solver: &DEFAULT_SOLVER,
        }
    }

    pub fn with_solver(model: &'m Model, solver: &'m dyn FixpointSolver) -> SemContext<'m> {
        SemContext { model, solver }
    }

    pub fn size(&self) -> usize {
        self.model.space.size()
    }

    pub fn evaluator<'a>(&self) -> Evaluator<'m, 'a> {
        Evaluator::new(*self)
    }

    pub fn truth_set(&self, f: &Formula) -> Result<StateSet, SemError> {
        self.evaluator().truth(f)
    }

    pub fn angel_region(&self, g: &Game, x: &StateSet, y: &StateSet) -> Result<StateSet, SemError> {
        self.evaluator().angel(g, x, y)
    }

    pub fn demon_region(&self, g: &Game, x: &StateSet, y: &StateSet) -> Result<StateSet, SemError> {
        self.evaluator().demon(g, x, y)
    }

    /// Zero-sum Angel region.
    pub fn dgl_angel_region(&self, g: &Game, x: &StateSet) -> Result<StateSet, SemError> {
        self.evaluator().zero_sum(g, x)
    }

    /// Zero-sum Demon region, the complement of Angel's for the complement.
    pub fn dgl_demon_region(&self, g: &Game, x: &StateSet) -> Result<StateSet, SemError> {
        Ok(self.evaluator().zero_sum(g, &x.complement())?.complement())
    }
}

/// Per-query evaluator. Caches are keyed by node address, which is sound
/// because every node is borrowed for `'a`.
pub struct Evaluator<'m, 'a> {
    ctx: SemContext<'m>,
    regions: HashMap<(*const Game, Kind, StateSet, StateSet), StateSet>,
    truth: HashMap<*const Formula, StateSet>,
    successors: HashMap<*const Game, Arc<Vec<State>>>,
    flows: HashMap<*const Game, Arc<Vec<Vec<State>>>>,
    _borrow: std::marker::PhantomData<&'a ()>,
}

impl<'m, 'a> Evaluator<'m, 'a> {
    pub fn new(ctx: SemContext<'m>) -> Evaluator<'m, 'a> {
        Evaluator {
            ctx,
            regions: HashMap::new(),
            truth: HashMap::new(),
            successors: HashMap::new(),
            flows: HashMap::new(),
            _borrow: std::marker::PhantomData,
        }
    }

    fn n(&self) -> usize {
        self.ctx.size()
    }

    pub fn truth(&mut self, f: &'a Formula) -> Result<StateSet, SemError> {
        let key = f as *const Formula;
        if let Some(s) = self.truth.get(&key) {
            return Ok(s.clone());
        }
        let space = &self.ctx.model.space;
        let out = match f {
            Formula::True | Formula::False | Formula::Geq(..) => space.atomic_truth_set(f)?,
            Formula::Not(p) => self.truth(p)?.complement(),
            Formula::And(p, q) => {
                let a = self.truth(p)?;
                a.intersection(&self.truth(q)?)
            }
            Formula::Forall(x, p) | Formula::Exists(x, p) => {
                let inner = self.truth(p)?;
                let space = &self.ctx.model.space;
                let v = space.require_var(x)?;
                let dom = space.vars()[v].domain.len();
                let universal = matches!(f, Formula::Forall(..));
                let mut out = space.empty_set();
                for s in 0..space.size() {
                    let mut hits = (0..dom).map(|d| inner.contains(space.with_digit(s, v, d)));
                    let holds = if universal {
                        hits.all(|b| b)
                    } else {
                        hits.any(|b| b)
                    };
                    if holds {
                        out.insert(s);
                    }
                }
                out
            }
            Formula::Angel(g, p, q) => {
                let x = self.truth(p)?;
                let y = self.truth(q)?;
                self.angel(g, &x, &y)?
            }
            Formula::Demon(g, p, q) => {
                let x = self.truth(p)?;
                let y = self.truth(q)?;
                self.demon(g, &x, &y)?
            }
        };
        self.truth.insert(key, out.clone());
        Ok(out)
    }

    fn successors(&mut self, g: &'a Game) -> Result<Arc<Vec<State>>, SemError> {
        let key = g as *const Game;
        if let Some(s) = self.successors.get(&key) {
            return Ok(s.clone());
        }
        let Game::Assign(x, e) = g else { unreachable!() };
        let space = &self.ctx.model.space;
        let v = space.require_var(x)?;
        let mut succ = Vec::with_capacity(space.size());
        for s in 0..space.size() {
            let value = space.eval_exact(s, e)?;
            succ.push(space.assign(s, v, &value)?);
        }
        let succ = Arc::new(succ);
        self.successors.insert(key, succ.clone());
        Ok(succ)
    }

    /// For each start state, the trajectory prefix along which the evolution
    /// constraint holds throughout (empty if it fails at the start).
    fn admissible(&mut self, g: &'a Game) -> Result<Arc<Vec<Vec<State>>>, SemError> {
        let key = g as *const Game;
        if let Some(s) = self.flows.get(&key) {
            return Ok(s.clone());
        }
        let Game::Ode { var, rhs, constraint } = g else { unreachable!() };
        let table = self.ctx.model.flow_for(&FlowKey::new(var, rhs.clone()))?;
        let ok = self.truth(constraint)?;
        let prefixes: Vec<Vec<State>> = table
            .trajectories
            .iter()
            .map(|t| t.states.iter().copied().take_while(|s| ok.contains(*s)).collect())
            .collect();
        let prefixes = Arc::new(prefixes);
        self.flows.insert(key, prefixes.clone());
        Ok(prefixes)
    }

    fn preimage(&mut self, g: &'a Game, target: &StateSet) -> Result<StateSet, SemError> {
        let succ = self.successors(g)?;
        Ok(StateSet::from_indices(
            self.n(),
            (0..self.n()).filter(|s| target.contains(succ[*s])),
        ))
    }

    fn ode_some(&mut self, g: &'a Game, target: &StateSet) -> Result<StateSet, SemError> {
        let adm = self.admissible(g)?;
        Ok(StateSet::from_indices(
            self.n(),
            (0..self.n()).filter(|s| adm[*s].iter().any(|t| target.contains(*t))),
        ))
    }

    fn ode_all(&mut self, g: &'a Game, target: &StateSet) -> Result<StateSet, SemError> {
        let adm = self.admissible(g)?;
        Ok(StateSet::from_indices(
            self.n(),
            (0..self.n()).filter(|s| adm[*s].iter().all(|t| target.contains(*t))),
        ))
    }

    fn memo(
        &mut self,
        g: &'a Game,
        kind: Kind,
        x: &StateSet,
        y: &StateSet,
        compute: impl FnOnce(&mut Self) -> Result<StateSet, SemError>,
    ) -> Result<StateSet, SemError> {
        let key = (g as *const Game, kind, x.clone(), y.clone());
        if let Some(s) = self.regions.get(&key) {
            return Ok(s.clone());
        }
        let out = compute(self)?;
        self.regions.insert(key, out.clone());
        Ok(out)
    }

    /// Angel's region for goals `x` (hers) and `y` (Demon's).
    pub fn angel(&mut self, g: &'a Game, x: &StateSet, y: &StateSet) -> Result<StateSet, SemError> {
        self.memo(g, Kind::Angel, x, y, |ev| match g {
            Game::Assign(..) => ev.preimage(g, x),
            Game::Ode { .. } => ev.ode_some(g, x),
            Game::Test(q) => Ok(ev.truth(q)?.intersection(x)),
            Game::Choice(a, b) => Ok(ev.angel(a, x, y)?.union(&ev.angel(b, x, y)?)),
            Game::Seq(a, b) => {
                let ax = ev.angel(b, x, y)?;
                let dy = ev.demon(b, x, y)?;
                ev.angel(a, &ax, &dy)
            }
            Game::Dual(a) => ev.demon(a, y, x),
            Game::Repeat(a) => {
                let comp = ev.fixpoint(Round::AngelCompetitive, a, x, y)?;
                Ok(comp.union(&ev.cooperative(a, x, y)?))
            }
        })
    }

    /// Demon's region for goals `x` (Angel's) and `y` (his).
    pub fn demon(&mut self, g: &'a Game, x: &StateSet, y: &StateSet) -> Result<StateSet, SemError> {
        self.memo(g, Kind::Demon, x, y, |ev| match g {
            Game::Assign(..) => ev.preimage(g, y),
            Game::Ode { .. } => {
                let all = ev.ode_all(g, y)?;
                Ok(all.union(&ev.ode_some(g, &x.intersection(y))?))
            }
            Game::Test(q) => Ok(ev.truth(q)?.complement().union(y)),
            Game::Choice(a, b) => {
                let da = ev.demon(a, x, y)?;
                let db = ev.demon(b, x, y)?;
                let aa = ev.angel(a, x, y)?;
                let ab = ev.angel(b, x, y)?;
                Ok(da
                    .intersection(&db)
                    .union(&da.intersection(&aa))
                    .union(&db.intersection(&ab)))
            }
            Game::Seq(a, b) => {
                let ax = ev.angel(b, x, y)?;
                let dy = ev.demon(b, x, y)?;
                ev.demon(a, &ax, &dy)
            }
            Game::Dual(a) => ev.angel(a, y, x),
            Game::Repeat(a) => {
                let comp = ev.fixpoint(Round::DemonCompetitive, a, x, y)?;
                Ok(comp.union(&ev.cooperative(a, x, y)?))
            }
        })
    }

    /// The cooperative fixpoint shared by both players' repetition clauses.
    fn cooperative(&mut self, body: &'a Game, x: &StateSet, y: &StateSet) -> Result<StateSet, SemError> {
        self.memo(body, Kind::Coop, x, y, |ev| ev.fixpoint(Round::Cooperative, body, x, y))
    }

    /// Zero-sum Angel region: Demon wins exactly when Angel does not.
    pub fn zero_sum(&mut self, g: &'a Game, x: &StateSet) -> Result<StateSet, SemError> {
        let none = StateSet::empty(self.n());
        self.memo(g, Kind::ZeroSum, x, &none, |ev| match g {
            Game::Assign(..) => ev.preimage(g, x),
            Game::Ode { .. } => ev.ode_some(g, x),
            Game::Test(q) => Ok(ev.truth(q)?.intersection(x)),
            Game::Choice(a, b) => Ok(ev.zero_sum(a, x)?.union(&ev.zero_sum(b, x)?)),
            Game::Seq(a, b) => {
                let inner = ev.zero_sum(b, x)?;
                ev.zero_sum(a, &inner)
            }
            Game::Dual(a) => Ok(ev.zero_sum(a, &x.complement())?.complement()),
            Game::Repeat(a) => ev.fixpoint(Round::ZeroSum, a, x, &none),
        })
    }

    /// One application of the round function for `body*`.
    pub fn round(
        &mut self,
        round: Round,
        body: &'a Game,
        x: &StateSet,
        y: &StateSet,
        z: &StateSet,
    ) -> Result<StateSet, SemError> {
        Ok(match round {
            Round::AngelCompetitive => x.union(&self.angel(body, z, &z.complement())?),
            Round::Cooperative => {
                let a = self.angel(body, z, z)?;
                let d = self.demon(body, z, z)?;
                x.intersection(y).union(&a.intersection(&d))
            }
            Round::DemonCompetitive => y.intersection(&self.demon(body, &z.complement(), z)?),
            Round::ZeroSum => x.union(&self.zero_sum(body, z)?),
        })
    }

    /// Fixpoint of a round function using the context's solver.
    pub fn fixpoint(
        &mut self,
        round: Round,
        body: &'a Game,
        x: &StateSet,
        y: &StateSet,
    ) -> Result<StateSet, SemError> {
        let n = self.n();
        let solver = self.ctx.solver;
        let mut f = |z: &StateSet| self.round(round, body, x, y, z);
        if round.is_greatest() {
            solver.gfp(n, &mut f)
        } else {
            solver.lfp(n, &mut f)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{parse_model, StateSpace};
    use crate::syntax::{parse_formula, parse_game};

    fn juice() -> Model {
        parse_model(
            "var o in {0..5}\nvar t in {0..5}\nflow {t'=1} euler step=1 horizon=5\nflow {o'=1} euler step=1 horizon=5\n",
        )
        .unwrap()
    }

    #[test]
    fn juice_region_contains_start() {
        let m = juice();
        let ctx = SemContext::new(&m);
        let f = parse_formula("<{t'=1}; {o'=1}^d>(o=3, t=5)").unwrap();
        let s = ctx.truth_set(&f).unwrap();
        let start = m
            .space
            .state_of(&[("o".into(), crate::Rational::from_integer(0.into())), ("t".into(), crate::Rational::from_integer(0.into()))])
            .unwrap();
        assert!(s.contains(start));
    }

    #[test]
    fn small_examples() {
        let m = Model::new(StateSpace::modular(&[("x", 2)]).unwrap());
        let ctx = SemContext::new(&m);
        let t = |s: &str| ctx.truth_set(&parse_formula(s).unwrap()).unwrap();
        assert!(t("!true").is_empty());
        assert!(t("<(x:=1 ++ x:=0)^d>(x=1, true)").is_full());
        assert!(t("[?false](x=0, x=1)").is_full());
        assert!(t("[x:=0](x=1, x=0)").is_full());
        assert!(t("[x:=1 ++ x:=0](false, x=1)").is_empty());
        let any = StateSet::from_indices(2, [1]);
        let g = parse_game("?true").unwrap();
        assert_eq!(ctx.angel_region(&g, &any, &StateSet::empty(2)).unwrap(), any);
    }

    #[test]
    fn repeat_increment_reaches_goal() {
        let m = Model::new(StateSpace::modular(&[("x", 4)]).unwrap());
        let ctx = SemContext::new(&m);
        let s = ctx.truth_set(&parse_formula("<(x:=x+1)*>x>=2").unwrap()).unwrap();
        assert!(s.is_full());
    }

    #[test]
    fn ode_constraint_failing_at_start() {
        let m = parse_model("var x in {0..3}\nflow {x'=1} euler step=1 horizon=3\n").unwrap();
        let ctx = SemContext::new(&m);
        let a = ctx.truth_set(&parse_formula("<{x'=1 & x<=1}>x=3").unwrap()).unwrap();
        assert!(a.is_empty());
        let d = ctx.truth_set(&parse_formula("[{x'=1 & x<=1}](false, false)").unwrap()).unwrap();
        assert_eq!(d, StateSet::from_indices(4, [2, 3]));
    }

    #[test]
    fn missing_flow() {
        let m = Model::new(StateSpace::modular(&[("x", 2)]).unwrap());
        let ctx = SemContext::new(&m);
        let e = ctx.truth_set(&parse_formula("<{x'=1}>x=1").unwrap()).unwrap_err();
        assert!(matches!(e, SemError::Model(ModelError::MissingFlowTable(..))));
    }

    #[test]
    fn strict_escape_is_an_error() {
        let m = Model::new(StateSpace::strict(&[("x", vec![0, 1])]).unwrap());
        let ctx = SemContext::new(&m);
        let e = ctx.truth_set(&parse_formula("<x:=x+1>x=1").unwrap()).unwrap_err();
        assert!(matches!(e, SemError::Model(ModelError::OutOfDomainAssignment { .. })));
    }
}
