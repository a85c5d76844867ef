//! Plain-text reports.

use crate::kernel::{Derivation, RuleError};
use crate::kripke::KripkeModel;
use std::fmt::Write;

fn path_text(path: &[usize]) -> String {
    if path.is_empty() {
        "root".to_string()
    } else {
        path.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
    }
}

/// One line per node, root first, premises indented below their conclusion.
pub fn derivation_tree(d: &Derivation) -> String {
    let mut out = String::new();
    d.visit(&mut |path, node| {
        let _ = writeln!(out, "{}{}  [{}]", "  ".repeat(path.len()), node.conclusion, node.rule);
    });
    out
}

/// A verdict for every node of `d`, given the checker's errors.
pub fn check_report(d: &Derivation, errors: &[(Vec<usize>, RuleError)]) -> String {
    let mut out = String::new();
    d.visit(&mut |path, node| {
        let verdict = match errors.iter().find(|(p, _)| p == path) {
            Some((_, e)) => format!("error: {e}"),
            None => "ok".to_string(),
        };
        let _ = writeln!(out, "{:<8} {:<9} {}  {}", path_text(path), node.rule.name(), node.conclusion, verdict);
    });
    let _ = writeln!(out, "{} nodes, {} errors", d.node_count(), errors.len());
    out
}

pub fn model_report(m: &KripkeModel) -> String {
    let mut out = String::new();
    let worlds = m.worlds();
    for (i, w) in worlds.iter().enumerate() {
        let above: Vec<&str> = (0..worlds.len()).filter(|&j| j != i && m.related(i, j)).map(|j| worlds[j].as_str()).collect();
        let _ = writeln!(out, "world {w}: domain {{{}}}, sees {{{}}}", m.domain(i).join(", "), above.join(", "));
    }
    for (c, e) in m.constant_map() {
        let _ = writeln!(out, "constant {c} = {e}");
    }
    for (p, _, per_world) in m.predicate_tables() {
        for (w, tuples) in worlds.iter().zip(per_world) {
            let ts: Vec<String> = tuples.iter().map(|t| format!("({})", t.join(", "))).collect();
            let _ = writeln!(out, "{p} at {w}: {{{}}}", ts.join(", "));
        }
    }
    out
}
