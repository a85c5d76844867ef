//! Matching formulas against substitution instances, and the subformula
//! property of cut-free derivations.

use super::Derivation;
use crate::syntax::{Formula, Term};
use std::collections::{BTreeMap, BTreeSet};

/// Matches `pat` against `target` up to alpha-equivalence, where each free
/// occurrence of a hole variable may stand for a term (the same term at every
/// occurrence). Terms bound in `target` never fill a hole.
pub(crate) fn match_pattern(
    pat: &Formula,
    holes: &BTreeSet<String>,
    target: &Formula,
    map: &mut BTreeMap<String, Term>,
) -> bool {
    fn term(p: &Term, t: &Term, penv: &[String], tenv: &[String], holes: &BTreeSet<String>, map: &mut BTreeMap<String, Term>) -> bool {
        let bound_t = |t: &Term| t.as_var().and_then(|v| tenv.iter().rposition(|b| b == v));
        if let Term::Var(v) = p {
            if let Some(i) = penv.iter().rposition(|b| b == v) {
                return bound_t(t) == Some(i);
            }
            if holes.contains(v) {
                if bound_t(t).is_some() {
                    return false;
                }
                return match map.get(v) {
                    Some(prev) => prev == t,
                    None => {
                        map.insert(v.clone(), t.clone());
                        true
                    }
                };
            }
        }
        p == t && bound_t(t).is_none()
    }
    fn go(
        p: &Formula,
        t: &Formula,
        penv: &mut Vec<String>,
        tenv: &mut Vec<String>,
        holes: &BTreeSet<String>,
        map: &mut BTreeMap<String, Term>,
    ) -> bool {
        match (p, t) {
            (Formula::Atom(a, pa), Formula::Atom(b, ta)) => {
                a == b && pa.len() == ta.len() && pa.iter().zip(ta).all(|(x, y)| term(x, y, penv, tenv, holes, map))
            }
            (Formula::Bottom, Formula::Bottom) => true,
            (Formula::Bin(o1, l1, r1), Formula::Bin(o2, l2, r2)) => {
                o1 == o2 && go(l1, l2, penv, tenv, holes, map) && go(r1, r2, penv, tenv, holes, map)
            }
            (Formula::Quant(q1, x1, b1), Formula::Quant(q2, x2, b2)) if q1 == q2 => {
                penv.push(x1.clone());
                tenv.push(x2.clone());
                let r = go(b1, b2, penv, tenv, holes, map);
                penv.pop();
                tenv.pop();
                r
            }
            _ => false,
        }
    }
    go(pat, target, &mut Vec::new(), &mut Vec::new(), holes, map)
}

/// `Some(Some(t))` when `target` is `body[t/x]`, `Some(None)` when `x` does
/// not occur free and `target` is `body` itself, `None` otherwise.
pub(crate) fn match_instance(body: &Formula, x: &str, target: &Formula) -> Option<Option<Term>> {
    let holes = BTreeSet::from([x.to_string()]);
    let mut map = BTreeMap::new();
    match_pattern(body, &holes, target, &mut map).then(|| map.remove(x))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubformulaViolation {
    pub path: Vec<usize>,
    pub formula: Formula,
}

/// Subformulas of `f`, each with the variables bound above it, which may be
/// instantiated.
fn patterns(f: &Formula, holes: &mut Vec<String>, out: &mut Vec<(Formula, BTreeSet<String>)>) {
    out.push((f.clone(), holes.iter().cloned().collect()));
    match f {
        Formula::Atom(..) | Formula::Bottom => {}
        Formula::Bin(_, l, r) => {
            patterns(l, holes, out);
            patterns(r, holes, out);
        }
        Formula::Quant(_, x, body) => {
            holes.push(x.clone());
            patterns(body, holes, out);
            holes.pop();
        }
    }
}

/// Every formula in the tree must be a substitution instance of a subformula
/// of the end sequent. Returns the first offending formula in pre-order.
pub fn subformula_property_check(d: &Derivation) -> Result<(), SubformulaViolation> {
    let mut pats = Vec::new();
    for f in d.conclusion.formulas() {
        patterns(f, &mut Vec::new(), &mut pats);
    }
    let mut seen = BTreeSet::new();
    pats.retain(|(f, h)| seen.insert((f.alpha_key(), h.clone())));
    let mut known: BTreeSet<Formula> = BTreeSet::new();
    let mut bad = None;
    d.visit(&mut |path, node| {
        if bad.is_some() {
            return;
        }
        for g in node.conclusion.formulas() {
            let key = g.alpha_key();
            if known.contains(&key) {
                continue;
            }
            let ok = pats.iter().any(|(p, holes)| match_pattern(p, holes, g, &mut BTreeMap::new()));
            if ok {
                known.insert(key);
            } else {
                bad = Some(SubformulaViolation { path: path.to_vec(), formula: g.clone() });
                return;
            }
        }
    });
    match bad {
        Some(v) => Err(v),
        None => Ok(()),
    }
}
