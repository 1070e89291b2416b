use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use dglsc::calculus::{check_proof, ProofScript, Verdict};
use dglsc::model::{parse_model, parse_space_spec, Model, StateSet};
use dglsc::oracle::{check_lemma, LemmaId};
use dglsc::semantics::{Iterative, SemContext};
use dglsc::syntax::{parse_formula, parse_game, parse_term, Formula, Game};
use dglsc::transform::{complementarize, goals_to_tests, systematize};
use dglsc::Rational;

/// Winning regions, transforms and proof checking for semi-competitive
/// differential game logic over finite models.
#[derive(Parser)]
#[command(name = "dglsc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula, game or term file and print it back.
    Parse { file: PathBuf },
    /// Truth set of a formula, or its value at one state.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        formula: String,
        /// State such as `x=0,y=1`; prints `true` or `false`.
        #[arg(long)]
        at: Option<String>,
        /// List member states after the bitmask.
        #[arg(long)]
        pretty: bool,
    },
    /// Winning regions of a game for goal formulas X (Angel) and Y (Demon).
    Regions {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        game: String,
        #[arg(long)]
        angel: String,
        #[arg(long)]
        demon: String,
        #[arg(long, value_enum, default_value_t = PlayerArg::Both)]
        player: PlayerArg,
        /// Zero-sum regions: Angel for X alone, Demon for Y alone.
        #[arg(long)]
        zero_sum: bool,
        #[arg(long)]
        at: Option<String>,
        #[arg(long)]
        pretty: bool,
    },
    /// Apply a syntactic transform. `--in` is a file path or the text itself.
    Transform {
        #[arg(long, value_enum)]
        op: Op,
        #[arg(long = "in")]
        input: String,
    },
    /// Check a proof script; exit 0 accepted, 1 rejected, 2 malformed.
    Check {
        #[arg(long)]
        proof: PathBuf,
        /// Overrides the script's `model` line.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Run a lemma checker over a seed range; exit 0 iff every seed passes.
    Lemmas {
        #[arg(long)]
        id: String,
        /// `a..b` (inclusive), `a..=b` or a single seed.
        #[arg(long)]
        seeds: String,
        /// Space such as `x mod 3; y mod 2; euler step=1 horizon=2`.
        #[arg(long)]
        space: String,
        /// Print one line per seed, not just failures.
        #[arg(long)]
        verbose: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PlayerArg {
    Angel,
    Demon,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    Systematize,
    Complementarize,
    GoalsToTests,
}

/// Exit code 2 is malformed input; 1 is a well-formed run with a negative
/// outcome or an evaluation failure.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn malformed(error: anyhow::Error) -> Failure {
    Failure { code: 2, error }
}

fn failed(error: anyhow::Error) -> Failure {
    Failure { code: 1, error }
}

type Outcome = std::result::Result<ExitCode, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Parse { file } => cmd_parse(&file),
        Command::Eval {
            model,
            formula,
            at,
            pretty,
        } => cmd_eval(&model, &formula, at.as_deref(), pretty),
        Command::Regions {
            model,
            game,
            angel,
            demon,
            player,
            zero_sum,
            at,
            pretty,
        } => cmd_regions(&model, &game, &angel, &demon, player, zero_sum, at.as_deref(), pretty),
        Command::Transform { op, input } => cmd_transform(op, &input),
        Command::Check { proof, model } => cmd_check(&proof, model.as_deref()),
        Command::Lemmas {
            id,
            seeds,
            space,
            verbose,
        } => cmd_lemmas(&id, &seeds, &space, verbose),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure { code, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(code)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_model(path: &Path) -> Result<Model> {
    parse_model(&read(path)?).with_context(|| format!("in model {}", path.display()))
}

fn solver() -> Result<Iterative> {
    match std::env::var("DGLSC_FIXPOINT_BUDGET") {
        Ok(v) => {
            let budget = v
                .trim()
                .parse()
                .map_err(|_| anyhow!("DGLSC_FIXPOINT_BUDGET must be a non-negative integer, got `{v}`"))?;
            Ok(Iterative { budget: Some(budget) })
        }
        Err(_) => Ok(Iterative::default()),
    }
}

/// `x=0,y=1/2` or `{x=0, y=1/2}`.
fn parse_state(model: &Model, text: &str) -> Result<usize> {
    let inner = text.trim().trim_start_matches('{').trim_end_matches('}');
    let mut assignment = Vec::new();
    for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| anyhow!("state entry `{part}` is not of the form name=value"))?;
        let value: Rational = value
            .trim()
            .parse()
            .map_err(|_| anyhow!("`{}` is not a rational number", value.trim()))?;
        assignment.push((name.trim().to_string(), value));
    }
    Ok(model.space.state_of(&assignment)?)
}

fn print_set(label: Option<&str>, model: &Model, set: &StateSet, pretty: bool) {
    match label {
        Some(l) => println!("{l} {}", set.to_hex()),
        None => println!("{}", set.to_hex()),
    }
    if pretty {
        for s in model.space.list_states(set) {
            println!("  {s}");
        }
    }
}

fn cmd_parse(file: &Path) -> Outcome {
    let text = read(file).map_err(malformed)?;
    let text = text.trim();
    let printed = match parse_formula(text) {
        Ok(f) => f.to_string(),
        Err(formula_err) => match (parse_game(text), parse_term(text)) {
            (Ok(g), _) => g.to_string(),
            (_, Ok(t)) => t.to_string(),
            _ => return Err(malformed(anyhow!("{}: {formula_err}", file.display()))),
        },
    };
    println!("{printed}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_eval(model: &Path, formula: &str, at: Option<&str>, pretty: bool) -> Outcome {
    let model = load_model(model).map_err(malformed)?;
    let f = parse_formula(formula).context("in --formula").map_err(malformed)?;
    let state = at.map(|s| parse_state(&model, s)).transpose().map_err(malformed)?;
    let solver = solver().map_err(malformed)?;
    let set = SemContext::with_solver(&model, &solver)
        .truth_set(&f)
        .map_err(|e| failed(e.into()))?;
    match state {
        Some(s) => println!("{}", set.contains(s)),
        None => print_set(None, &model, &set, pretty),
    }
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_regions(
    model: &Path,
    game: &str,
    angel: &str,
    demon: &str,
    player: PlayerArg,
    zero_sum: bool,
    at: Option<&str>,
    pretty: bool,
) -> Outcome {
    let model = load_model(model).map_err(malformed)?;
    let g: Game = parse_game(game).context("in --game").map_err(malformed)?;
    let x: Formula = parse_formula(angel).context("in --angel").map_err(malformed)?;
    let y: Formula = parse_formula(demon).context("in --demon").map_err(malformed)?;
    let state = at.map(|s| parse_state(&model, s)).transpose().map_err(malformed)?;
    let solver = solver().map_err(malformed)?;
    let ctx = SemContext::with_solver(&model, &solver);
    let run = || -> Result<Vec<(&str, StateSet)>> {
        let xs = ctx.truth_set(&x)?;
        let ys = ctx.truth_set(&y)?;
        let mut out = Vec::new();
        if player != PlayerArg::Demon {
            let r = if zero_sum { ctx.dgl_angel_region(&g, &xs)? } else { ctx.angel_region(&g, &xs, &ys)? };
            out.push(("angel", r));
        }
        if player != PlayerArg::Angel {
            let r = if zero_sum { ctx.dgl_demon_region(&g, &ys)? } else { ctx.demon_region(&g, &xs, &ys)? };
            out.push(("demon", r));
        }
        Ok(out)
    };
    for (label, set) in run().map_err(failed)? {
        match state {
            Some(s) => println!("{label} {}", set.contains(s)),
            None => print_set(Some(label), &model, &set, pretty),
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_transform(op: Op, input: &str) -> Outcome {
    let path = Path::new(input);
    let text = if path.is_file() { read(path).map_err(malformed)? } else { input.to_string() };
    let text = text.trim();
    let out = match op {
        Op::Systematize => match parse_game(text) {
            Ok(g) => systematize(&g).to_string(),
            Err(e) => return Err(malformed(anyhow!("systematize needs a game: {e}"))),
        },
        Op::Complementarize => {
            let f = parse_formula(text).map_err(|e| malformed(e.into()))?;
            complementarize(&f).to_string()
        }
        Op::GoalsToTests => {
            let f = parse_formula(text).map_err(|e| malformed(e.into()))?;
            goals_to_tests(&f).map_err(|e| malformed(e.into()))?.to_string()
        }
    };
    println!("{out}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_check(proof: &Path, model_override: Option<&Path>) -> Outcome {
    let script = ProofScript::parse(&read(proof).map_err(malformed)?)
        .with_context(|| format!("in {}", proof.display()))
        .map_err(malformed)?;
    let model_path = match (model_override, &script.model_ref) {
        (Some(p), _) => Some(p.to_path_buf()),
        (None, Some(r)) => Some(proof.parent().unwrap_or(Path::new(".")).join(r)),
        (None, None) => None,
    };
    let model = model_path.as_deref().map(load_model).transpose().map_err(malformed)?;
    let verdict = check_proof(&script, model.as_ref());
    println!("{verdict}");
    Ok(match verdict {
        Verdict::Accepted => ExitCode::SUCCESS,
        Verdict::Rejected { .. } => ExitCode::from(1),
    })
}

fn parse_seeds(text: &str) -> Result<Vec<u64>> {
    let num = |s: &str| s.trim().parse::<u64>().map_err(|_| anyhow!("bad seed `{s}` in `{text}`"));
    if let Some((a, b)) = text.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let (a, b) = (num(a)?, num(b)?);
        if a > b {
            bail!("empty seed range `{text}`");
        }
        Ok((a..=b).collect())
    } else {
        Ok(vec![num(text)?])
    }
}

fn cmd_lemmas(id: &str, seeds: &str, space: &str, verbose: bool) -> Outcome {
    let id: LemmaId = id.parse().map_err(|e: String| malformed(anyhow!(e)))?;
    let seeds = parse_seeds(seeds).map_err(malformed)?;
    let model = parse_space_spec(space).context("in --space").map_err(malformed)?;
    let report = check_lemma(&id, seeds, &model);
    if verbose {
        print!("{}", report.render());
    } else {
        println!("{}", report.summary());
        for r in report.failures() {
            println!("{},fail,{}", r.seed, r.details);
        }
    }
    Ok(if report.all_pass() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
