use clap::{Parser, Subcommand, ValueEnum};
use focj::cut::eliminate_cuts_traced;
use focj::json::{
    countermodel_to_json, derivation_from_json, derivation_to_json, model_from_json, search_result_to_json,
    trace_to_json,
};
use focj::kernel::{check_derivation, Calculus, Derivation};
use focj::kripke::{countermodel_search, CountermodelBounds, CountermodelError, KripkeModel};
use focj::parse::{parse_formula, parse_sequent};
use focj::render::{check_report, derivation_tree, model_report};
use focj::search::{prove_in, SearchError, SearchLimits, SearchResult};
use focj::sequent::Sequent;
use focj::syntax::Signature;
use serde_json::{json, Value};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const OK: u8 = 0;
const NO: u8 = 1;
const INPUT: u8 = 2;
const LIMITS: u8 = 3;

#[derive(Parser)]
#[command(name = "focj", version, about = "Check, search and transform derivations; evaluate Kripke models")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FragmentArg {
    Full,
    Mlj,
    Lk,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a derivation file.
    Check { file: PathBuf },
    /// Search for a cut-free derivation of a sequent.
    Prove {
        sequent: String,
        #[arg(long, default_value_t = 12)]
        depth: usize,
        #[arg(long, default_value_t = 2)]
        mult: usize,
        /// Fresh constants available as witnesses.
        #[arg(long, default_value_t = 1)]
        extra: usize,
        #[arg(long, value_enum, default_value_t = FragmentArg::Full)]
        fragment: FragmentArg,
        /// Countermodel bounds as WORLDS,ELEMENTS.
        #[arg(long, default_value = "3,2", value_parser = parse_bounds)]
        countermodel_bounds: (usize, usize),
        /// Skip the countermodel attempt.
        #[arg(long)]
        no_countermodel: bool,
        /// Write the derivation or countermodel JSON here.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Eliminate all cuts from a derivation file.
    Elim {
        file: PathBuf,
        /// Write the cut-free derivation JSON here.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Evaluate a closed formula at a world of a model file.
    Eval { model: PathBuf, world: String, formula: String },
    /// Search for a finite countermodel of a sequent.
    Countermodel {
        sequent: String,
        #[arg(long, default_value = "3,2", value_parser = parse_bounds)]
        bounds: (usize, usize),
        #[arg(long, default_value_t = 2_000_000)]
        max_candidates: u64,
    },
    /// Check that a formula is hereditary in a model file.
    Heredity { model: PathBuf, formula: String },
}

fn parse_bounds(s: &str) -> Result<(usize, usize), String> {
    let (w, e) = s.split_once(',').ok_or("expected WORLDS,ELEMENTS")?;
    let w = w.trim().parse().map_err(|_| format!("bad world count {w:?}"))?;
    let e = e.trim().parse().map_err(|_| format!("bad element count {e:?}"))?;
    Ok((w, e))
}

/// Stops a command with an exit code after printing `msg` to stderr.
struct Fail(u8, String);

type Out = Result<u8, Fail>;

fn input(msg: impl std::fmt::Display) -> Fail {
    Fail(INPUT, msg.to_string())
}

fn read(path: &Path) -> Result<String, Fail> {
    std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, v: &Value) -> Result<(), Fail> {
    std::fs::write(path, serde_json::to_string_pretty(v).expect("json") + "\n").map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load_derivation(path: &Path) -> Result<Derivation, Fail> {
    derivation_from_json(&read(path)?).map_err(input)
}

fn load_model(path: &Path) -> Result<KripkeModel, Fail> {
    let m = model_from_json(&read(path)?).map_err(input)?;
    if let Err(vs) = m.validate() {
        let lines: Vec<String> = vs.iter().map(|v| format!("  {v}")).collect();
        return Err(input(format!("invalid model:\n{}", lines.join("\n"))));
    }
    Ok(m)
}

fn sequent(text: &str) -> Result<Sequent, Fail> {
    parse_sequent(text, &mut Signature::new()).map_err(|e| input(format!("sequent: {e}")))
}

fn emit(json_mode: bool, v: Value, text: String) {
    let text = if json_mode { serde_json::to_string_pretty(&v).expect("json") + "\n" } else { text };
    // a closed pipe is not worth a panic
    let _ = std::io::stdout().write_all(text.as_bytes());
}

fn check(file: &Path, j: bool) -> Out {
    let d = load_derivation(file)?;
    let errors = check_derivation(&d).err().unwrap_or_default();
    let v = json!({
        "valid": errors.is_empty(),
        "nodes": d.node_count(),
        "errors": errors.iter().map(|(p, e)| json!({"path": p, "error": e.to_string()})).collect::<Vec<_>>(),
    });
    emit(j, v, check_report(&d, &errors));
    Ok(if errors.is_empty() { OK } else { NO })
}

/// Final guard: nothing unchecked is printed.
fn rechecked(d: &Derivation, calc: Calculus) -> Result<(), Fail> {
    focj::kernel::check_derivation_in(d, calc).map_err(|e| Fail(NO, format!("internal error, produced derivation fails to check: {e:?}")))
}

#[allow(clippy::too_many_arguments)]
fn prove(text: &str, depth: usize, mult: usize, extra: usize, frag: FragmentArg, bounds: (usize, usize), no_cm: bool, output: Option<&Path>, j: bool) -> Out {
    let s = sequent(text)?;
    let lim = SearchLimits {
        max_depth: depth,
        max_multiplicity: mult,
        term_universe_extra: extra,
        countermodel: (!no_cm).then(|| CountermodelBounds::new(bounds.0, bounds.1)),
        ..SearchLimits::default()
    };
    let (calc, result) = match frag {
        FragmentArg::Full => (Calculus::Full, Ok(prove_in(Calculus::Full, &s, &lim))),
        FragmentArg::Mlj => (Calculus::Mlj, focj::search::prove_mlj(&s, &lim)),
        FragmentArg::Lk => (Calculus::Lk, focj::search::prove_lk(&s, &lim)),
    };
    let result = result.map_err(|e: SearchError| input(e))?;
    let v = search_result_to_json(&result);
    let (code, text) = match &result {
        SearchResult::Proved(d) => {
            rechecked(d, calc)?;
            if let Some(p) = output {
                write(p, &derivation_to_json(d))?;
            }
            (OK, format!("proved, {} nodes\n{}", d.node_count(), derivation_tree(d)))
        }
        SearchResult::Refuted(cm, stats) => {
            if let Some(p) = output {
                write(p, &countermodel_to_json(cm))?;
            }
            let code = if stats.limits_hit() { LIMITS } else { NO };
            let assignment = cm.assignment.iter().map(|(x, e)| format!(" {x}={e}")).collect::<String>();
            (code, format!("refuted at world {}{assignment}\n{}", cm.world, model_report(&cm.model)))
        }
        SearchResult::NotProvedWithinLimits(stats) => {
            let code = if stats.limits_hit() { LIMITS } else { NO };
            let why = if stats.depth_hit {
                "depth limit reached"
            } else if stats.step_limit_hit {
                "step limit reached"
            } else {
                "search space exhausted"
            };
            (code, format!("not proved: {why} after {} steps\n", stats.steps))
        }
    };
    emit(j, v, text);
    Ok(code)
}

fn elim(file: &Path, output: Option<&Path>, j: bool) -> Out {
    let d = load_derivation(file)?;
    let (e, trace) = eliminate_cuts_traced(&d).map_err(input)?;
    rechecked(&e, Calculus::Full)?;
    if let Some(p) = output {
        write(p, &derivation_to_json(&e))?;
    }
    let v = json!({"derivation": derivation_to_json(&e), "trace": trace_to_json(&trace)});
    let mut text = format!("{} cuts removed in {} reduction steps, {} nodes\n", d.cut_count(), trace.len(), e.node_count());
    for t in &trace {
        text += &format!("  step {:>3} {:<26} complexity {:>2} weight {:>3}\n", t.index, t.label, t.complexity, t.weight);
    }
    text += &derivation_tree(&e);
    emit(j, v, text);
    Ok(OK)
}

fn eval(model: &Path, world: &str, formula: &str, j: bool) -> Out {
    let m = load_model(model)?;
    let f = parse_formula(formula, &mut Signature::new()).map_err(|e| input(format!("formula: {e}")))?;
    let b = m.eval(world, &f).map_err(input)?;
    emit(j, json!({"world": world, "formula": f.to_string(), "value": b}), format!("{b}\n"));
    Ok(if b { OK } else { NO })
}

fn countermodel(text: &str, bounds: (usize, usize), max_candidates: u64, j: bool) -> Out {
    let s = sequent(text)?;
    let b = CountermodelBounds { max_worlds: bounds.0, max_elems: bounds.1, max_candidates };
    match countermodel_search(&s, b) {
        Ok(Some(cm)) => {
            let assignment = cm.assignment.iter().map(|(x, e)| format!(" {x}={e}")).collect::<String>();
            emit(j, countermodel_to_json(&cm), format!("countermodel at world {}{assignment}\n{}", cm.world, model_report(&cm.model)));
            Ok(OK)
        }
        Ok(None) => {
            emit(j, json!({"countermodel": null}), "no countermodel within bounds\n".to_string());
            Ok(NO)
        }
        Err(e @ CountermodelError::ResourceLimit { .. }) => Err(Fail(LIMITS, e.to_string())),
        Err(e) => Err(input(e)),
    }
}

fn heredity(model: &Path, formula: &str, j: bool) -> Out {
    let m = load_model(model)?;
    let f = parse_formula(formula, &mut Signature::new()).map_err(|e| input(format!("formula: {e}")))?;
    match m.check_heredity(&f).map_err(input)? {
        None => {
            emit(j, json!({"hereditary": true}), "hereditary\n".to_string());
            Ok(OK)
        }
        Some(w) => {
            let v = json!({"hereditary": false, "from": w.from, "to": w.to, "formula": w.formula.to_string()});
            emit(j, v, format!("not hereditary: {} holds at {} but not at {}\n", w.formula, w.from, w.to));
            Ok(NO)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { INPUT } else { OK });
        }
    };
    let j = cli.json;
    let r = match &cli.cmd {
        Cmd::Check { file } => check(file, j),
        Cmd::Prove { sequent, depth, mult, extra, fragment, countermodel_bounds, no_countermodel, output } => {
            prove(sequent, *depth, *mult, *extra, *fragment, *countermodel_bounds, *no_countermodel, output.as_deref(), j)
        }
        Cmd::Elim { file, output } => elim(file, output.as_deref(), j),
        Cmd::Eval { model, world, formula } => eval(model, world, formula, j),
        Cmd::Countermodel { sequent, bounds, max_candidates } => countermodel(sequent, *bounds, *max_candidates, j),
        Cmd::Heredity { model, formula } => heredity(model, formula, j),
    };
    match r {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("focj: {msg}");
            ExitCode::from(code)
        }
    }
}
