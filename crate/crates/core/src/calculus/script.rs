use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::PathBuf;

use super::rules::{key_category, Inst, Insts, ProofStep};
use super::sequent::{Position, Sequent};
use crate::syntax::lexer::Tok;
use crate::syntax::parser::Parser;
use crate::syntax::{Category, SyntaxError};

/// A goal, a proof tree for it and an optional model reference.
#[derive(Debug, Clone, PartialEq)]
pub struct ProofScript {
    pub goal: Sequent,
    pub root: ProofStep,
    /// Path as written in the script, relative to the script's directory.
    pub model_ref: Option<PathBuf>,
}

/// A script that cannot be read as a proof tree at all.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ScriptError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ScriptError {
    ScriptError {
        line,
        message: message.into(),
    }
}

fn syntax(line: usize, e: SyntaxError) -> ScriptError {
    err(line, format!("column {}: {}", e.col, e))
}

struct RawStep {
    line: usize,
    step: ProofStep,
    premises: Vec<String>,
}

fn step_id(p: &mut Parser) -> Result<String, SyntaxError> {
    match p.peek().clone() {
        Tok::Ident(s) => {
            p.bump();
            Ok(s)
        }
        Tok::Number(n) if n.is_integer() => {
            p.bump();
            Ok(n.to_string())
        }
        _ => Err(p.error("expected a step id", &["identifier", "number"])),
    }
}

/// `[with {k := v, ...}] [premises [id, ...]]`
fn step_tail(text: &str) -> Result<(Insts, Vec<String>), SyntaxError> {
    let mut p = Parser::new(text)?;
    let mut inst = BTreeMap::new();
    if p.at_ident("with") {
        p.bump();
        p.expect(&Tok::LBrace)?;
        if !p.at(&Tok::RBrace) {
            loop {
                let key = p.word()?;
                p.expect(&Tok::Assign)?;
                let value = match key_category(&key) {
                    Category::Formula => Inst::Formula(p.formula()?),
                    Category::Term => Inst::Term(p.term()?),
                    Category::Game => Inst::Game(p.game()?),
                };
                if inst.insert(key.clone(), value).is_some() {
                    return Err(p.error(&format!("`{key}` bound twice"), &[]));
                }
                if !p.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        p.expect(&Tok::RBrace)?;
    }
    let mut premises = Vec::new();
    if p.at_ident("premises") {
        p.bump();
        p.expect(&Tok::LBracket)?;
        if !p.at(&Tok::RBracket) {
            premises.push(step_id(&mut p)?);
            while p.eat(&Tok::Comma) {
                premises.push(step_id(&mut p)?);
            }
        }
        p.expect(&Tok::RBracket)?;
    }
    if !p.at(&Tok::Eof) {
        return Err(p.error("unexpected input after step", &["with", "premises", "end of line"]));
    }
    Ok((inst, premises))
}

/// Splits off the first whitespace-delimited word.
fn word(s: &str) -> (&str, &str) {
    let s = s.trim_start();
    match s.find(char::is_whitespace) {
        Some(i) => (&s[..i], s[i..].trim_start()),
        None => (s, ""),
    }
}

fn parse_step(line: usize, rest: &str) -> Result<RawStep, ScriptError> {
    let (id, rest) = word(rest);
    let (rule, mut rest) = word(rest);
    if id.is_empty() || rule.is_empty() {
        return Err(err(line, "expected `step <id> <rule> ...`"));
    }
    if !id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(err(line, format!("bad step id `{id}`")));
    }
    let mut step = ProofStep::new(id, rule);
    let (w, r) = word(rest);
    if w == "rev" {
        step.reverse = true;
        rest = r;
    }
    let (w, r) = word(rest);
    if w == "at" {
        let (pos, r) = word(r);
        step.position = Some(pos.parse::<Position>().map_err(|m| err(line, m))?);
        rest = r;
    }
    let (inst, premises) = step_tail(rest).map_err(|e| syntax(line, e))?;
    step.inst = inst;
    Ok(RawStep { line, step, premises })
}

impl ProofScript {
    /// Reads the line-oriented script format. The first `step` is the
    /// root; every other step must be the premise of exactly one step.
    pub fn parse(text: &str) -> Result<ProofScript, ScriptError> {
        let mut goal = None;
        let mut model_ref = None;
        let mut steps: Vec<RawStep> = Vec::new();
        let mut expects: Vec<(usize, String, Sequent)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let (kw, rest) = word(content);
            match kw {
                "model" => {
                    if model_ref.is_some() {
                        return Err(err(line, "second `model` line"));
                    }
                    if rest.is_empty() {
                        return Err(err(line, "`model` needs a path"));
                    }
                    model_ref = Some(PathBuf::from(rest));
                }
                "goal" => {
                    if goal.is_some() {
                        return Err(err(line, "second `goal` line"));
                    }
                    goal = Some(Sequent::parse(rest).map_err(|e| syntax(line, e))?);
                }
                "step" => {
                    if goal.is_none() {
                        return Err(err(line, "`goal` must come before the first step"));
                    }
                    steps.push(parse_step(line, rest)?);
                }
                "expect" => {
                    let (id, rest) = word(rest);
                    let s = Sequent::parse(rest).map_err(|e| syntax(line, e))?;
                    expects.push((line, id.to_string(), s));
                }
                _ => return Err(err(line, format!("unknown directive `{kw}`"))),
            }
        }
        let goal = goal.ok_or_else(|| err(0, "missing `goal` line"))?;
        if steps.is_empty() {
            return Err(err(0, "no steps"));
        }
        let mut index: HashMap<String, usize> = HashMap::new();
        for (k, s) in steps.iter().enumerate() {
            if index.insert(s.step.id.clone(), k).is_some() {
                return Err(err(s.line, format!("duplicate step id `{}`", s.step.id)));
            }
        }
        for (line, id, s) in expects {
            let k = *index.get(&id).ok_or_else(|| err(line, format!("`expect` names unknown step `{id}`")))?;
            if steps[k].step.expect.replace(s).is_some() {
                return Err(err(line, format!("second `expect` for `{id}`")));
            }
        }
        let mut used: HashSet<usize> = HashSet::from([0]);
        for s in &steps {
            for p in &s.premises {
                let k = *index
                    .get(p)
                    .ok_or_else(|| err(s.line, format!("unknown premise step `{p}`")))?;
                if !used.insert(k) {
                    return Err(err(s.line, format!("step `{p}` is used twice or closes a cycle")));
                }
            }
        }
        if let Some(k) = (0..steps.len()).find(|k| !used.contains(k)) {
            return Err(err(steps[k].line, format!("step `{}` is not reachable", steps[k].step.id)));
        }
        fn build(k: usize, steps: &[RawStep], index: &HashMap<String, usize>) -> ProofStep {
            let mut step = steps[k].step.clone();
            step.premises = steps[k].premises.iter().map(|p| build(index[p], steps, index)).collect();
            step
        }
        Ok(ProofScript {
            goal,
            root: build(0, &steps, &index),
            model_ref,
        })
    }

    /// Script text that parses back to `self`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(m) = &self.model_ref {
            out.push_str(&format!("model {}\n", m.display()));
        }
        out.push_str(&format!("goal {}\n", self.goal));
        let mut expects = Vec::new();
        let mut stack = vec![&self.root];
        while let Some(s) = stack.pop() {
            out.push_str(&format!("step {} {}", s.id, s.rule));
            if s.reverse {
                out.push_str(" rev");
            }
            if let Some(p) = &s.position {
                out.push_str(&format!(" at {p}"));
            }
            if !s.inst.is_empty() {
                let items: Vec<String> = s.inst.iter().map(|(k, v)| format!("{k} := {v}")).collect();
                out.push_str(&format!(" with {{{}}}", items.join(", ")));
            }
            if !s.premises.is_empty() {
                let ids: Vec<&str> = s.premises.iter().map(|p| p.id.as_str()).collect();
                out.push_str(&format!(" premises [{}]", ids.join(", ")));
            }
            out.push('\n');
            if let Some(e) = &s.expect {
                expects.push(format!("expect {} {e}\n", s.id));
            }
            stack.extend(s.premises.iter().rev());
        }
        for e in expects {
            out.push_str(&e);
        }
        out
    }
}
