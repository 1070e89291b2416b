//! Line-oriented model files.
//!
//! ```text
//! # comment
//! var o in {0..5}
//! var t in {0,1,2,3,4,5}
//! var x mod 5
//! mode strict            # or: mode modular 5
//! flow {t'=1} euler step=1 horizon=5
//! flow {x'=1} explicit: {x=0} -> {x=0} {x=2}
//! flow default euler step=1 horizon=4
//! ```
//!
//! Without a `mode` line the model is modular iff some variable is declared
//! with `mod`. Explicit trajectories list the whole sequence, starting at
//! the key state; states without an explicit entry do not move.

use std::collections::HashMap;

use super::{
    build_euler_flow, stationary_flow, EulerPolicy, FlowKey, FlowTrajectory, Model, ModelError,
    Provenance, StateSpace, Variable,
};
use crate::syntax::lexer::Tok;
use crate::syntax::parser::Parser;
use crate::syntax::{Game, SyntaxError};
use crate::Rational;

enum Domain {
    Values(Vec<Rational>),
    Modulus(u64),
}

type Assignment = Vec<(String, Rational)>;

enum FlowSpec {
    Euler(EulerPolicy),
    Explicit(Assignment, Vec<Assignment>),
}

enum Decl {
    Var(String, Domain),
    Mode(Option<u64>),
    Flow(Option<FlowKey>, FlowSpec),
}

fn perr(line: usize, e: SyntaxError) -> ModelError {
    ModelError::Parse {
        line,
        message: format!("column {}: {}", e.col, e.message),
    }
}

fn signed_number(p: &mut Parser) -> Result<Rational, SyntaxError> {
    let neg = p.eat(&Tok::Minus);
    match p.peek().clone() {
        Tok::Number(n) => {
            p.bump();
            Ok(if neg { -n } else { n })
        }
        _ => Err(p.error("expected a number", &["number"])),
    }
}

fn small_uint(p: &mut Parser) -> Result<u64, SyntaxError> {
    let n = signed_number(p)?;
    super::space::as_small_uint(&n).ok_or_else(|| p.error("expected a non-negative integer", &[]))
}

fn keyword(p: &mut Parser, word: &str) -> Result<(), SyntaxError> {
    if p.at_ident(word) {
        p.bump();
        Ok(())
    } else {
        Err(p.error(&format!("expected `{word}`"), &[word]))
    }
}

fn key_value(p: &mut Parser, key: &str) -> Result<Rational, SyntaxError> {
    keyword(p, key)?;
    p.expect(&Tok::Eq)?;
    signed_number(p)
}

fn state_literal(p: &mut Parser) -> Result<Vec<(String, Rational)>, SyntaxError> {
    p.expect(&Tok::LBrace)?;
    let mut out = Vec::new();
    while !p.at(&Tok::RBrace) {
        let x = p.ident()?;
        p.expect(&Tok::Eq)?;
        out.push((x, signed_number(p)?));
        if !p.eat(&Tok::Comma) {
            break;
        }
    }
    p.expect(&Tok::RBrace)?;
    Ok(out)
}

fn euler_policy(p: &mut Parser) -> Result<EulerPolicy, SyntaxError> {
    keyword(p, "euler")?;
    let step = key_value(p, "step")?;
    let horizon = key_value(p, "horizon")?;
    let horizon = super::space::as_small_uint(&horizon)
        .ok_or_else(|| p.error("horizon must be a non-negative integer", &[]))?;
    Ok(EulerPolicy {
        step,
        horizon: horizon as usize,
    })
}

fn parse_decl(p: &mut Parser) -> Result<Decl, SyntaxError> {
    let head = p.word()?;
    let decl = match head.as_str() {
        "var" => {
            let x = p.ident()?;
            if p.at_ident("mod") {
                p.bump();
                Decl::Var(x, Domain::Modulus(small_uint(p)?))
            } else {
                keyword(p, "in")?;
                p.expect(&Tok::LBrace)?;
                let mut values = Vec::new();
                loop {
                    let lo = signed_number(p)?;
                    if p.eat(&Tok::Dot) {
                        p.expect(&Tok::Dot)?;
                        let hi = signed_number(p)?;
                        if !lo.is_integer() || !hi.is_integer() {
                            return Err(p.error("range bounds must be integers", &[]));
                        }
                        let mut v = lo;
                        while v <= hi {
                            values.push(v.clone());
                            v += Rational::from_integer(1.into());
                        }
                    } else {
                        values.push(lo);
                    }
                    if !p.eat(&Tok::Comma) {
                        break;
                    }
                }
                p.expect(&Tok::RBrace)?;
                Decl::Var(x, Domain::Values(values))
            }
        }
        "mode" => {
            let m = p.word()?;
            match m.as_str() {
                "strict" => Decl::Mode(None),
                "modular" => Decl::Mode(Some(small_uint(p)?)),
                _ => return Err(p.error("expected `strict` or `modular`", &["strict", "modular"])),
            }
        }
        "flow" => {
            if p.at_ident("default") {
                p.bump();
                Decl::Flow(None, FlowSpec::Euler(euler_policy(p)?))
            } else {
                let key = match p.game()? {
                    Game::Ode { var, rhs, .. } => FlowKey { var, rhs },
                    _ => return Err(p.error("expected a continuous game", &["{"])),
                };
                if p.at_ident("explicit") {
                    p.bump();
                    p.expect(&Tok::Colon)?;
                    let from = state_literal(p)?;
                    p.expect(&Tok::Arrow)?;
                    let mut seq = vec![state_literal(p)?];
                    while p.at(&Tok::LBrace) || p.at(&Tok::Comma) {
                        p.eat(&Tok::Comma);
                        seq.push(state_literal(p)?);
                    }
                    Decl::Flow(Some(key), FlowSpec::Explicit(from, seq))
                } else {
                    Decl::Flow(Some(key), FlowSpec::Euler(euler_policy(p)?))
                }
            }
        }
        _ => return Err(p.error("expected `var`, `mode` or `flow`", &["var", "mode", "flow"])),
    };
    p.expect_eof()?;
    Ok(decl)
}

fn build(decls: Vec<(usize, Decl)>) -> Result<Model, ModelError> {
    let mut mode: Option<Option<u64>> = None;
    for (line, d) in &decls {
        if let Decl::Mode(m) = d {
            if mode.is_some() {
                return Err(ModelError::Parse {
                    line: *line,
                    message: "mode declared twice".into(),
                });
            }
            mode = Some(*m);
        }
    }
    let any_mod = decls.iter().any(|(_, d)| matches!(d, Decl::Var(_, Domain::Modulus(_))));
    let strict = match mode {
        Some(m) => m.is_none(),
        None => !any_mod,
    };
    let mut vars = Vec::new();
    for (line, d) in &decls {
        if let Decl::Var(name, dom) = d {
            let bad = || ModelError::Parse {
                line: *line,
                message: format!("domain of `{name}` does not fit the arithmetic mode"),
            };
            let var = match (dom, strict) {
                (Domain::Values(vals), true) => Variable {
                    name: name.clone(),
                    domain: vals.clone(),
                    modulus: None,
                },
                (Domain::Modulus(_), true) => return Err(bad()),
                (Domain::Modulus(m), false) => modular_var(name, *m),
                (Domain::Values(vals), false) => {
                    // `in {0..m-1}` is accepted under an explicit modular mode
                    let m = match mode {
                        Some(Some(m)) => m,
                        _ => return Err(bad()),
                    };
                    let v = modular_var(name, m);
                    if *vals != v.domain {
                        return Err(bad());
                    }
                    v
                }
            };
            vars.push(var);
        }
    }
    if let Some(Some(m)) = mode {
        if vars.iter().any(|v| v.modulus != Some(m)) {
            return Err(ModelError::Parse {
                line: 0,
                message: format!("`mode modular {m}` requires every variable to range over 0..{m}"),
            });
        }
    }
    let space = StateSpace::new(vars, strict)?;
    let mut model = Model::new(space);
    let mut explicit: HashMap<FlowKey, Vec<(usize, Assignment, Vec<Assignment>)>> =
        HashMap::new();
    let mut order = Vec::new();
    for (line, d) in decls {
        if let Decl::Flow(key, spec) = d {
            match (key, spec) {
                (None, FlowSpec::Euler(p)) => model.default_flow = Some(p),
                (Some(key), FlowSpec::Euler(p)) => {
                    let table = build_euler_flow(&model.space, &key, &p.step, p.horizon)?;
                    model.add_flow(table);
                }
                (Some(key), FlowSpec::Explicit(from, seq)) => {
                    if !explicit.contains_key(&key) {
                        order.push(key.clone());
                    }
                    explicit.entry(key).or_default().push((line, from, seq));
                }
                (None, FlowSpec::Explicit(..)) => unreachable!(),
            }
        }
    }
    for key in order {
        let mut table = stationary_flow(&model.space, &key);
        let var = model.space.require_var(&key.var)?;
        for (line, from, seq) in explicit.remove(&key).unwrap() {
            let at = |e: ModelError| ModelError::Parse {
                line,
                message: e.to_string(),
            };
            let start = model.space.state_of(&from).map_err(at)?;
            let states = seq
                .iter()
                .map(|s| model.space.state_of(s))
                .collect::<Result<Vec<_>, _>>()
                .map_err(at)?;
            if states[0] != start {
                return Err(ModelError::Parse {
                    line,
                    message: "trajectory must begin with its key state".into(),
                });
            }
            for w in states.windows(2) {
                for v in 0..model.space.vars().len() {
                    if v != var && model.space.digit(w[0], v) != model.space.digit(w[1], v) {
                        return Err(ModelError::Parse {
                            line,
                            message: format!("trajectory changes `{}`, which does not evolve", model.space.vars()[v].name),
                        });
                    }
                }
            }
            table.trajectories[start] = FlowTrajectory {
                states,
                step: Rational::from_integer(1.into()),
                provenance: Provenance::Explicit,
            };
        }
        model.add_flow(table);
    }
    Ok(model)
}

fn modular_var(name: &str, m: u64) -> Variable {
    Variable {
        name: name.to_string(),
        domain: (0..m).map(|k| Rational::from_integer(k.into())).collect(),
        modulus: Some(m),
    }
}

pub fn parse_model(text: &str) -> Result<Model, ModelError> {
    let mut decls = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut p = Parser::new(line).map_err(|e| perr(i + 1, e))?;
        decls.push((i + 1, parse_decl(&mut p).map_err(|e| perr(i + 1, e))?));
    }
    build(decls)
}

/// Compact one-line description such as `x mod 3; y mod 2` or
/// `o in {0..5}; t in {0..5}; euler step=1 horizon=5`. Items are variable
/// declarations (the `var` keyword is optional), `mode ...`, and an optional
/// default flow policy.
pub fn parse_space_spec(spec: &str) -> Result<Model, ModelError> {
    let mut decls = Vec::new();
    for (i, item) in spec.split(';').enumerate() {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        let text = if item.starts_with("var ") || item.starts_with("mode ") || item.starts_with("flow ") {
            item.to_string()
        } else if item.starts_with("euler ") {
            format!("flow default {item}")
        } else {
            format!("var {item}")
        };
        let mut p = Parser::new(&text).map_err(|e| perr(i + 1, e))?;
        decls.push((i + 1, parse_decl(&mut p).map_err(|e| perr(i + 1, e))?));
    }
    build(decls)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ArithMode;
    use crate::syntax::Term;

    #[test]
    fn juice_model() {
        let m = parse_model(
            "# juice\nvar o in {0..5}\nvar t in {0..5}\nmode strict\nflow {t'=1} euler step=1 horizon=5\nflow {o'=1} euler step=1 horizon=5\n",
        )
        .unwrap();
        assert_eq!(m.space.size(), 36);
        assert_eq!(m.space.mode(), ArithMode::Strict);
        let t = m.flow_for(&FlowKey::new("t", Term::int(1))).unwrap();
        assert_eq!(t.trajectories[0].states.len(), 6);
    }

    #[test]
    fn inferred_modular_mode() {
        let m = parse_space_spec("x mod 3; y mod 2").unwrap();
        assert_eq!(m.space.size(), 6);
        assert_eq!(m.space.mode(), ArithMode::Modular(3));
        assert!(parse_space_spec("x mod 3; y in {0,1}").is_err());
        let m = parse_space_spec("mode modular 2; x in {0,1}").unwrap();
        assert_eq!(m.space.mode(), ArithMode::Modular(2));
    }

    #[test]
    fn explicit_flows() {
        let m = parse_model("var x in {0,1,2}\nflow {x'=1} explicit: {x=0} -> {x=0} {x=2}\n").unwrap();
        let t = m.flow_for(&FlowKey::new("x", Term::int(1))).unwrap();
        assert_eq!(t.trajectories[0].states, vec![0, 2]);
        assert_eq!(t.trajectories[1].states, vec![1]);
        assert!(parse_model("var x in {0,1}\nflow {x'=1} explicit: {x=0} -> {x=1}\n").is_err());
    }

    #[test]
    fn errors_have_lines() {
        let e = parse_model("var x in {0}\nvar y of {1}\n").unwrap_err();
        assert!(matches!(e, ModelError::Parse { line: 2, .. }));
        assert!(parse_model("var x in {0}\nflow {x'=1} explicit: {x=0} -> {x=0}\nflow default euler step=1 horizon=1\n").is_ok());
    }
}
