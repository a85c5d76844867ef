//! Rule-instance checking for every rule, in three calculi: the full combined
//! calculus, Maehara's intuitionistic calculus and classical LK.

use super::{match_instance, Derivation, Meta, RuleId, Split};
use crate::sequent::{Multiset, Sequent};
use crate::syntax::{BinOp, Formula, Quant, Term};
use thiserror::Error;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Calculus {
    /// The combined calculus with restricted right rules for `->i` and `forall_i`.
    #[default]
    Full,
    /// Intuitionistic multi-succedent calculus: ordinary right rules for
    /// `->i`/`forall_i` with any context, no classical rules.
    Mlj,
    /// Classical calculus: no rules for `->i`/`forall_i`.
    Lk,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum RuleError {
    #[error("{rule} takes {expected} premise(s), found {found}")]
    Arity { rule: RuleId, expected: usize, found: usize },
    #[error("{0} is not a rule of this calculus")]
    NotInCalculus(RuleId),
    #[error("wrong shape: {0}")]
    Shape(String),
    #[error("context formula {0} is not persistent")]
    NonPersistent(Formula),
    #[error("eigenvariable {0} occurs free in the conclusion")]
    EigenFree(String),
    #[error("witness mismatch: {0}")]
    Witness(String),
    #[error("declared split does not match the premises")]
    Split,
    #[error("missing metadata: {0}")]
    MissingMeta(&'static str),
}

/// What the checker worked out about a valid node.
#[derive(Clone, Debug, Default)]
pub(crate) struct Resolved {
    pub formula: Option<Formula>,
    pub eigen: Option<String>,
    pub witness: Option<Term>,
    pub split: Option<Split>,
}

impl Resolved {
    fn principal(f: &Formula) -> Resolved {
        Resolved { formula: Some(f.clone()), ..Resolved::default() }
    }
}

fn shape(msg: impl Into<String>) -> RuleError {
    RuleError::Shape(msg.into())
}

pub fn check_rule_instance(rule: RuleId, premises: &[&Sequent], conclusion: &Sequent, meta: &Meta) -> Result<(), RuleError> {
    check_rule_instance_in(Calculus::Full, rule, premises, conclusion, meta)
}

pub fn check_rule_instance_in(
    calc: Calculus,
    rule: RuleId,
    premises: &[&Sequent],
    conclusion: &Sequent,
    meta: &Meta,
) -> Result<(), RuleError> {
    check_node(calc, rule, premises, conclusion, meta).map(|_| ())
}

pub(crate) fn resolve(d: &Derivation) -> Result<Resolved, RuleError> {
    let prem: Vec<&Sequent> = d.premises.iter().map(|p| &p.conclusion).collect();
    check_node(Calculus::Full, d.rule, &prem, &d.conclusion, &d.meta)
}

pub fn check_derivation(d: &Derivation) -> Result<(), Vec<(Vec<usize>, RuleError)>> {
    check_derivation_in(d, Calculus::Full)
}

/// Checks every node; reports all failures with their paths from the root.
pub fn check_derivation_in(d: &Derivation, calc: Calculus) -> Result<(), Vec<(Vec<usize>, RuleError)>> {
    let mut errs = Vec::new();
    d.visit(&mut |path, node| {
        let prem: Vec<&Sequent> = node.premises.iter().map(|p| &p.conclusion).collect();
        if let Err(e) = check_node(calc, node.rule, &prem, &node.conclusion, &node.meta) {
            errs.push((path.to_vec(), e));
        }
    });
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs)
    }
}

fn available(calc: Calculus, rule: RuleId) -> bool {
    use RuleId::*;
    match calc {
        Calculus::Full => true,
        Calculus::Mlj => !matches!(rule, ImpCR | ImpCL | ForallCR | ForallCL),
        Calculus::Lk => !matches!(rule, ImpIR | ImpIL | ForallIR | ForallIL),
    }
}

fn check_node(calc: Calculus, rule: RuleId, prem: &[&Sequent], concl: &Sequent, meta: &Meta) -> Result<Resolved, RuleError> {
    if prem.len() != rule.arity() {
        return Err(RuleError::Arity { rule, expected: rule.arity(), found: prem.len() });
    }
    if !available(calc, rule) {
        return Err(RuleError::NotInCalculus(rule));
    }
    use RuleId::*;
    match rule {
        Id => {
            let ok = concl.ante.len() == 1
                && concl.succ.len() == 1
                && concl.ante.as_slice()[0].alpha_eq(&concl.succ.as_slice()[0]);
            if ok {
                Ok(Resolved::default())
            } else {
                Err(shape("Id concludes exactly A => A"))
            }
        }
        BottomAx => {
            if concl.ante.len() == 1 && concl.ante.as_slice()[0] == Formula::Bottom && concl.succ.is_empty() {
                Ok(Resolved::default())
            } else {
                Err(shape("BottomAx concludes exactly bot =>"))
            }
        }
        WeakL => weakening(&prem[0].ante, &concl.ante, &prem[0].succ, &concl.succ, meta),
        WeakR => weakening(&prem[0].succ, &concl.succ, &prem[0].ante, &concl.ante, meta),
        ContrL => contraction(&prem[0].ante, &concl.ante, &prem[0].succ, &concl.succ, meta),
        ContrR => contraction(&prem[0].succ, &concl.succ, &prem[0].ante, &concl.ante, meta),
        Cut => {
            let cands = match &meta.formula {
                Some(a) => vec![a.clone()],
                None => prem[0].succ.distinct().into_iter().filter(|a| prem[1].ante.contains(a)).collect(),
            };
            if cands.is_empty() {
                return Err(shape("no formula occurs in both the left succedent and the right antecedent"));
            }
            first_ok(cands, |a| cut_instance(prem, concl, &a, 1, 1, meta))
        }
        Ecut => {
            let e = meta.ecut.as_ref().ok_or(RuleError::MissingMeta("Ecut needs a formula and multiplicities"))?;
            cut_instance(prem, concl, &e.formula, e.m, e.n, meta)
        }
        ImpIR => {
            let f = single_succedent(concl)?;
            let Formula::Bin(BinOp::ImpI, a, b) = &f else {
                return Err(shape(format!("{f} is not an intuitionistic implication")));
            };
            persistent_context(calc, concl)?;
            let want = Sequent::from_sides(concl.ante.clone().with((**a).clone()), Multiset::from_vec(vec![(**b).clone()]));
            same(prem[0], &want)?;
            Ok(Resolved::principal(&f))
        }
        ImpCR => {
            let cands = candidates(&concl.succ, meta, |f| matches!(f, Formula::Bin(BinOp::ImpC, ..)), "a classical implication")?;
            first_ok(cands, |f| {
                let (a, b) = bin_parts(&f);
                let want = Sequent::from_sides(concl.ante.clone().with(a.clone()), swap(&concl.succ, &f, b));
                same(prem[0], &want)?;
                Ok(Resolved::principal(&f))
            })
        }
        ImpIL | ImpCL => {
            let op = if rule == ImpIL { BinOp::ImpI } else { BinOp::ImpC };
            let what = if rule == ImpIL { "an intuitionistic implication" } else { "a classical implication" };
            let cands = candidates(&concl.ante, meta, |f| matches!(f, Formula::Bin(o, ..) if *o == op), what)?;
            first_ok(cands, |f| {
                let (a, b) = bin_parts(&f);
                let delta1 = prem[0]
                    .succ
                    .without(a)
                    .ok_or_else(|| shape(format!("left premise lacks {a} in its succedent")))?;
                let gamma2 = prem[1]
                    .ante
                    .without(b)
                    .ok_or_else(|| shape(format!("right premise lacks {b} in its antecedent")))?;
                let want = Sequent::from_sides(
                    Multiset::from_vec(vec![f.clone()]).union(&prem[0].ante).union(&gamma2),
                    delta1.union(&prem[1].succ),
                );
                if *concl != want {
                    return Err(shape(format!("conclusion should be {want}")));
                }
                let split = Split { left_ante: prem[0].ante.clone(), left_succ: delta1 };
                check_split(meta, &split)?;
                Ok(Resolved { formula: Some(f.clone()), split: Some(split), ..Resolved::default() })
            })
        }
        AndR => {
            let cands = candidates(&concl.succ, meta, |f| matches!(f, Formula::Bin(BinOp::And, ..)), "a conjunction")?;
            first_ok(cands, |f| {
                let (a, b) = bin_parts(&f);
                same(prem[0], &Sequent::from_sides(concl.ante.clone(), swap(&concl.succ, &f, a)))?;
                same(prem[1], &Sequent::from_sides(concl.ante.clone(), swap(&concl.succ, &f, b)))?;
                Ok(Resolved::principal(&f))
            })
        }
        AndL1 | AndL2 => {
            let cands = candidates(&concl.ante, meta, |f| matches!(f, Formula::Bin(BinOp::And, ..)), "a conjunction")?;
            first_ok(cands, |f| {
                let (a, b) = bin_parts(&f);
                let comp = if rule == AndL1 { a } else { b };
                same(prem[0], &Sequent::from_sides(swap(&concl.ante, &f, comp), concl.succ.clone()))?;
                Ok(Resolved::principal(&f))
            })
        }
        OrR1 | OrR2 => {
            let cands = candidates(&concl.succ, meta, |f| matches!(f, Formula::Bin(BinOp::Or, ..)), "a disjunction")?;
            first_ok(cands, |f| {
                let (a, b) = bin_parts(&f);
                let comp = if rule == OrR1 { a } else { b };
                same(prem[0], &Sequent::from_sides(concl.ante.clone(), swap(&concl.succ, &f, comp)))?;
                Ok(Resolved::principal(&f))
            })
        }
        OrL => {
            let cands = candidates(&concl.ante, meta, |f| matches!(f, Formula::Bin(BinOp::Or, ..)), "a disjunction")?;
            first_ok(cands, |f| {
                let (a, b) = bin_parts(&f);
                same(prem[0], &Sequent::from_sides(swap(&concl.ante, &f, a), concl.succ.clone()))?;
                same(prem[1], &Sequent::from_sides(swap(&concl.ante, &f, b), concl.succ.clone()))?;
                Ok(Resolved::principal(&f))
            })
        }
        ForallIR => {
            let f = single_succedent(concl)?;
            let Formula::Quant(Quant::ForallI, x, body) = &f else {
                return Err(shape(format!("{f} is not an intuitionistic universal")));
            };
            persistent_context(calc, concl)?;
            if prem[0].ante != concl.ante || prem[0].succ.len() != 1 {
                return Err(shape("premise should have the same antecedent and a single succedent formula"));
            }
            let g = &prem[0].succ.as_slice()[0];
            let eigen = eigen_instance(concl, x, body, g, meta)?;
            Ok(Resolved { formula: Some(f.clone()), eigen, ..Resolved::default() })
        }
        ForallCR => {
            let cands = candidates(&concl.succ, meta, |f| matches!(f, Formula::Quant(Quant::ForallC, ..)), "a classical universal")?;
            first_ok(cands, |f| {
                let (x, body) = quant_parts(&f);
                if prem[0].ante != concl.ante {
                    return Err(shape("premise should have the same antecedent"));
                }
                let g = introduced(&prem[0].succ, &concl.succ, &f)?;
                let eigen = eigen_instance(concl, x, body, &g, meta)?;
                Ok(Resolved { formula: Some(f.clone()), eigen, ..Resolved::default() })
            })
        }
        ExistsL => {
            let cands = candidates(&concl.ante, meta, |f| matches!(f, Formula::Quant(Quant::Exists, ..)), "an existential")?;
            first_ok(cands, |f| {
                let (x, body) = quant_parts(&f);
                if prem[0].succ != concl.succ {
                    return Err(shape("premise should have the same succedent"));
                }
                let g = introduced(&prem[0].ante, &concl.ante, &f)?;
                let eigen = eigen_instance(concl, x, body, &g, meta)?;
                Ok(Resolved { formula: Some(f.clone()), eigen, ..Resolved::default() })
            })
        }
        ForallIL | ForallCL => {
            let q = if rule == ForallIL { Quant::ForallI } else { Quant::ForallC };
            let cands = candidates(&concl.ante, meta, |f| matches!(f, Formula::Quant(p, ..) if *p == q), "a universal of the right kind")?;
            first_ok(cands, |f| {
                let (x, body) = quant_parts(&f);
                if prem[0].succ != concl.succ {
                    return Err(shape("premise should have the same succedent"));
                }
                let g = introduced(&prem[0].ante, &concl.ante, &f)?;
                let witness = witness_instance(x, body, &g, meta)?;
                Ok(Resolved { formula: Some(f.clone()), witness, ..Resolved::default() })
            })
        }
        ExistsR => {
            let cands = candidates(&concl.succ, meta, |f| matches!(f, Formula::Quant(Quant::Exists, ..)), "an existential")?;
            first_ok(cands, |f| {
                let (x, body) = quant_parts(&f);
                if prem[0].ante != concl.ante {
                    return Err(shape("premise should have the same antecedent"));
                }
                let g = introduced(&prem[0].succ, &concl.succ, &f)?;
                let witness = witness_instance(x, body, &g, meta)?;
                Ok(Resolved { formula: Some(f.clone()), witness, ..Resolved::default() })
            })
        }
    }
}

fn bin_parts(f: &Formula) -> (&Formula, &Formula) {
    match f {
        Formula::Bin(_, l, r) => (l, r),
        _ => unreachable!("candidates are filtered by shape"),
    }
}

fn quant_parts(f: &Formula) -> (&str, &Formula) {
    match f {
        Formula::Quant(_, x, b) => (x, b),
        _ => unreachable!("candidates are filtered by shape"),
    }
}

/// `side` with one copy of `old` replaced by `new`.
fn swap(side: &Multiset, old: &Formula, new: &Formula) -> Multiset {
    let mut m = side.clone();
    m.remove_one(old);
    m.push(new.clone());
    m
}

fn same(premise: &Sequent, want: &Sequent) -> Result<(), RuleError> {
    if premise == want {
        Ok(())
    } else {
        Err(shape(format!("premise should be {want}, found {premise}")))
    }
}

fn first_ok(cands: Vec<Formula>, mut f: impl FnMut(Formula) -> Result<Resolved, RuleError>) -> Result<Resolved, RuleError> {
    let mut first_err = None;
    for c in cands {
        match f(c) {
            Ok(r) => return Ok(r),
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    Err(first_err.expect("at least one candidate"))
}

fn candidates(side: &Multiset, meta: &Meta, ok: impl Fn(&Formula) -> bool, what: &str) -> Result<Vec<Formula>, RuleError> {
    if let Some(f) = &meta.formula {
        if !ok(f) {
            return Err(shape(format!("{f} is not {what}")));
        }
        if !side.contains(f) {
            return Err(shape(format!("{f} does not occur in the conclusion")));
        }
        return Ok(vec![f.clone()]);
    }
    let out: Vec<Formula> = side.distinct().into_iter().filter(|f| ok(f)).collect();
    if out.is_empty() {
        Err(shape(format!("no {} in the conclusion", what.trim_start_matches("a ").trim_start_matches("an "))))
    } else {
        Ok(out)
    }
}

fn single_succedent(concl: &Sequent) -> Result<Formula, RuleError> {
    if concl.succ.len() == 1 {
        Ok(concl.succ.as_slice()[0].clone())
    } else {
        Err(shape("the succedent must be a single formula"))
    }
}

fn persistent_context(calc: Calculus, concl: &Sequent) -> Result<(), RuleError> {
    if calc == Calculus::Mlj {
        return Ok(());
    }
    match concl.ante.iter().find(|f| !f.is_persistent()) {
        Some(f) => Err(RuleError::NonPersistent(f.clone())),
        None => Ok(()),
    }
}

/// The single formula the premise side has in place of `principal`.
fn introduced(prem_side: &Multiset, concl_side: &Multiset, principal: &Formula) -> Result<Formula, RuleError> {
    let rest = concl_side.without(principal).expect("candidate occurs in the conclusion");
    match prem_side.difference(&rest) {
        Some(d) if d.len() == 1 => Ok(d.as_slice()[0].clone()),
        _ => Err(shape(format!("premise should replace {principal} by one instance"))),
    }
}

fn eigen_instance(concl: &Sequent, x: &str, body: &Formula, g: &Formula, meta: &Meta) -> Result<Option<String>, RuleError> {
    let z = match &meta.eigen {
        Some(z) => {
            if !body.subst(x, &Term::var(z.clone())).alpha_eq(g) {
                return Err(shape(format!("{g} is not the instance of the quantified formula at {z}")));
            }
            Some(z.clone())
        }
        None => match match_instance(body, x, g) {
            None => return Err(shape(format!("{g} is not an instance of the quantified formula"))),
            Some(None) => None,
            Some(Some(Term::Var(z))) => Some(z),
            Some(Some(t)) => return Err(shape(format!("eigenvariable position holds {t}, not a variable"))),
        },
    };
    if let Some(z) = &z {
        if concl.has_free(z) {
            return Err(RuleError::EigenFree(z.clone()));
        }
    }
    Ok(z)
}

fn witness_instance(x: &str, body: &Formula, g: &Formula, meta: &Meta) -> Result<Option<Term>, RuleError> {
    match &meta.witness {
        Some(t) => {
            if body.subst(x, t).alpha_eq(g) {
                Ok(Some(t.clone()))
            } else {
                Err(RuleError::Witness(format!("instantiating with {t} does not give {g}")))
            }
        }
        None => match_instance(body, x, g).ok_or_else(|| RuleError::Witness(format!("{g} is not an instance of the quantified formula"))),
    }
}

fn weakening(pa: &Multiset, ca: &Multiset, po: &Multiset, co: &Multiset, meta: &Meta) -> Result<Resolved, RuleError> {
    if po != co {
        return Err(shape("the other side must be unchanged"));
    }
    let added = match ca.difference(pa) {
        Some(d) if d.len() == 1 => d.as_slice()[0].clone(),
        _ => return Err(shape("the conclusion must add exactly one formula")),
    };
    if let Some(f) = &meta.formula {
        if !f.alpha_eq(&added) {
            return Err(shape(format!("declared {f} but {added} was added")));
        }
    }
    Ok(Resolved::principal(&added))
}

fn contraction(pa: &Multiset, ca: &Multiset, po: &Multiset, co: &Multiset, meta: &Meta) -> Result<Resolved, RuleError> {
    if po != co {
        return Err(shape("the other side must be unchanged"));
    }
    let removed = match pa.difference(ca) {
        Some(d) if d.len() == 1 => d.as_slice()[0].clone(),
        _ => return Err(shape("the conclusion must drop exactly one copy")),
    };
    if !ca.contains(&removed) {
        return Err(shape(format!("{removed} must keep one copy")));
    }
    if let Some(f) = &meta.formula {
        if !f.alpha_eq(&removed) {
            return Err(shape(format!("declared {f} but {removed} was contracted")));
        }
    }
    Ok(Resolved::principal(&removed))
}

fn check_split(meta: &Meta, actual: &Split) -> Result<(), RuleError> {
    match &meta.split {
        Some(s) if s != actual => Err(RuleError::Split),
        _ => Ok(()),
    }
}

fn cut_instance(prem: &[&Sequent], concl: &Sequent, a: &Formula, m: usize, n: usize, meta: &Meta) -> Result<Resolved, RuleError> {
    let delta = prem[0]
        .succ
        .without_n(a, m)
        .ok_or_else(|| shape(format!("left premise lacks {m} copies of {a}")))?;
    let pi = prem[1]
        .ante
        .without_n(a, n)
        .ok_or_else(|| shape(format!("right premise lacks {n} copies of {a}")))?;
    let want = Sequent::from_sides(prem[0].ante.union(&pi), delta.union(&prem[1].succ));
    if *concl != want {
        return Err(shape(format!("conclusion should be {want}")));
    }
    let split = Split { left_ante: prem[0].ante.clone(), left_succ: delta };
    check_split(meta, &split)?;
    Ok(Resolved { formula: Some(a.clone()), split: Some(split), ..Resolved::default() })
}
