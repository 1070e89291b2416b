use std::fmt;
use std::str::FromStr;

use crate::syntax::{parse_sequent, Formula, SyntaxError};

/// `antecedent ==> succedent`, read as the conjunction of the left implying
/// the disjunction of the right.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Sequent {
    pub antecedent: Vec<Formula>,
    pub succedent: Vec<Formula>,
}

impl Sequent {
    pub fn new(antecedent: Vec<Formula>, succedent: Vec<Formula>) -> Sequent {
        Sequent {
            antecedent,
            succedent,
        }
    }

    /// `==> f`
    pub fn goal(f: Formula) -> Sequent {
        Sequent::new(vec![], vec![f])
    }

    pub fn parse(text: &str) -> Result<Sequent, SyntaxError> {
        let (a, s) = parse_sequent(text)?;
        Ok(Sequent::new(a, s))
    }

    /// The single formula `/\antecedent -> \/succedent`.
    pub fn as_formula(&self) -> Formula {
        Formula::implies(
            Formula::conjunction(self.antecedent.iter().cloned()),
            Formula::disjunction(self.succedent.iter().cloned()),
        )
    }

    pub fn side(&self, side: Side) -> &Vec<Formula> {
        match side {
            Side::Left => &self.antecedent,
            Side::Right => &self.succedent,
        }
    }

    pub fn side_mut(&mut self, side: Side) -> &mut Vec<Formula> {
        match side {
            Side::Left => &mut self.antecedent,
            Side::Right => &mut self.succedent,
        }
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.antecedent.iter().chain(self.succedent.iter())
    }

    /// The formula addressed by `pos`, if the path exists.
    pub fn at(&self, pos: &Position) -> Option<&Formula> {
        let mut f = self.side(pos.side).get(pos.index)?;
        for &i in &pos.path {
            f = *f.children().get(i)?;
        }
        Some(f)
    }

    /// Copy of the sequent with the subformula at `pos` replaced.
    pub fn replace(&self, pos: &Position, by: Formula) -> Option<Sequent> {
        let mut out = self.clone();
        let slot = out.side_mut(pos.side).get_mut(pos.index)?;
        *slot = replace_in(slot, &pos.path, by)?;
        Some(out)
    }
}

fn replace_in(f: &Formula, path: &[usize], by: Formula) -> Option<Formula> {
    let Some((&i, rest)) = path.split_first() else {
        return Some(by);
    };
    let sub = |c: &Formula| replace_in(c, rest, by.clone());
    Some(match (f, i) {
        (Formula::Not(p), 0) => Formula::not(sub(p)?),
        (Formula::And(p, q), 0) => Formula::and(sub(p)?, (**q).clone()),
        (Formula::And(p, q), 1) => Formula::and((**p).clone(), sub(q)?),
        (Formula::Forall(x, p), 0) => Formula::forall(x, sub(p)?),
        (Formula::Exists(x, p), 0) => Formula::exists(x, sub(p)?),
        (Formula::Angel(g, p, q), 0) => Formula::angel((**g).clone(), sub(p)?, (**q).clone()),
        (Formula::Angel(g, p, q), 1) => Formula::angel((**g).clone(), (**p).clone(), sub(q)?),
        (Formula::Demon(g, p, q), 0) => Formula::demon((**g).clone(), sub(p)?, (**q).clone()),
        (Formula::Demon(g, p, q), 1) => Formula::demon((**g).clone(), (**p).clone(), sub(q)?),
        _ => return None,
    })
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[Formula]| v.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ");
        let (a, s) = (join(&self.antecedent), join(&self.succedent));
        match (a.is_empty(), s.is_empty()) {
            (true, true) => f.write_str("==>"),
            (true, false) => write!(f, "==> {s}"),
            (false, true) => write!(f, "{a} ==>"),
            (false, false) => write!(f, "{a} ==> {s}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// `R0.1` is child 1 of the first succedent formula; `L2` is the third
/// antecedent formula. Children: `!` and quantifiers have child 0, `&` has
/// 0 and 1, a modality has its Angel goal at 0 and its Demon goal at 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Position {
    pub side: Side,
    pub index: usize,
    pub path: Vec<usize>,
}

impl Position {
    pub fn right(index: usize, path: &[usize]) -> Position {
        Position {
            side: Side::Right,
            index,
            path: path.to_vec(),
        }
    }

    pub fn left(index: usize, path: &[usize]) -> Position {
        Position {
            side: Side::Left,
            index,
            path: path.to_vec(),
        }
    }

    pub fn is_top(&self) -> bool {
        self.path.is_empty()
    }

    pub fn child(&self, i: usize) -> Position {
        let mut p = self.clone();
        p.path.push(i);
        p
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.side {
            Side::Left => 'L',
            Side::Right => 'R',
        };
        write!(f, "{s}{}", self.index)?;
        for i in &self.path {
            write!(f, ".{i}")?;
        }
        Ok(())
    }
}

impl FromStr for Position {
    type Err = String;

    fn from_str(s: &str) -> Result<Position, String> {
        let bad = || format!("bad position `{s}` (expected e.g. R0 or L1.0.1)");
        let side = match s.chars().next() {
            Some('L') => Side::Left,
            Some('R') => Side::Right,
            _ => return Err(bad()),
        };
        let mut parts = s[1..].split('.');
        let index = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad)?;
        let path = parts
            .map(|p| p.parse::<usize>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Position { side, index, path })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    #[test]
    fn positions_parse_and_print() {
        for s in ["R0", "L3", "R0.1.0", "L1.0"] {
            assert_eq!(s.parse::<Position>().unwrap().to_string(), s);
        }
        for s in ["", "X0", "R", "R0.", "R0.a", "r0"] {
            assert!(s.parse::<Position>().is_err(), "{s}");
        }
    }

    #[test]
    fn navigate_and_replace() {
        let s = Sequent::parse("x>=0 ==> <x:=1>(x>=1, x>=2) & true").unwrap();
        let pos: Position = "R0.0.1".parse().unwrap();
        assert_eq!(s.at(&pos), Some(&parse_formula("x>=2").unwrap()));
        let t = s.replace(&pos, Formula::False).unwrap();
        assert_eq!(t.to_string(), "x >= 0 ==> <x:=1>(x >= 1, false) & true");
        assert!(s.at(&"R0.2".parse().unwrap()).is_none());
        assert!(s.replace(&"L1".parse().unwrap(), Formula::True).is_none());
    }

    #[test]
    fn display_edges() {
        assert_eq!(Sequent::default().to_string(), "==>");
        assert_eq!(Sequent::parse("true ==>").unwrap().to_string(), "true ==>");
    }
}
