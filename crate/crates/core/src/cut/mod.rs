//! Cut elimination.
//!
//! Every cut is read as an extended cut on `m` and `n` copies of its formula.
//! A topmost extended cut has cut-free premises and is removed by
//! [`reduce_ecut_bottom`], a recursion on the complexity of the cut formula
//! and then on the number of sequents above the cut. Each principal case
//! follows the usual pattern for its connective.

use crate::kernel::{check_derivation, restructure, Derivation, Meta, RuleError, RuleId, Split};
use crate::sequent::{Multiset, Sequent};
use crate::syntax::{fresh_var, Formula, Fragment, Quant, Term};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum CutError {
    #[error("input derivation is invalid at {path:?}: {error}")]
    Invalid { path: Vec<usize>, error: RuleError },
    #[error("premise of an extended cut contains a cut")]
    NotCutFree,
    #[error("{0}")]
    Shape(String),
}

/// An extended cut whose premises are cut-free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EcutBottom {
    pub left: Derivation,
    pub right: Derivation,
    pub formula: Formula,
    pub m: usize,
    pub n: usize,
    pub conclusion: Sequent,
}

impl EcutBottom {
    pub fn new(left: Derivation, right: Derivation, formula: Formula, m: usize, n: usize) -> Result<EcutBottom, CutError> {
        if left.uses_cut() || right.uses_cut() {
            return Err(CutError::NotCutFree);
        }
        let conclusion = ecut_conclusion(&left.conclusion, &right.conclusion, &formula, m, n)?;
        let (mut left, mut right) = (left, right);
        left.annotate();
        right.annotate();
        Ok(EcutBottom { left, right, formula, m, n, conclusion })
    }

    /// Reads a `Cut` or `Ecut` node with cut-free premises.
    pub fn from_derivation(d: &Derivation) -> Result<EcutBottom, CutError> {
        let (a, m, n) = match (d.rule, &d.meta.ecut, &d.meta.formula) {
            (RuleId::Ecut, Some(e), _) => (e.formula.clone(), e.m, e.n),
            (RuleId::Cut, _, Some(a)) => (a.clone(), 1, 1),
            (RuleId::Cut, _, None) => {
                let mut d = d.clone();
                d.annotate();
                let a = d.meta.formula.ok_or_else(|| CutError::Shape("cannot determine the cut formula".into()))?;
                (a, 1, 1)
            }
            _ => return Err(CutError::Shape(format!("{} is not a cut", d.rule))),
        };
        let e = EcutBottom::new(d.premises[0].clone(), d.premises[1].clone(), a, m, n)?;
        if e.conclusion != d.conclusion {
            return Err(CutError::Shape(format!("cut conclusion should be {}", e.conclusion)));
        }
        Ok(e)
    }

    /// Sequents in both premise trees.
    pub fn weight(&self) -> usize {
        self.left.node_count() + self.right.node_count()
    }

    pub fn complexity(&self) -> usize {
        self.formula.complexity()
    }
}

fn ecut_conclusion(l: &Sequent, r: &Sequent, a: &Formula, m: usize, n: usize) -> Result<Sequent, CutError> {
    let delta = l.succ.without_n(a, m).ok_or_else(|| CutError::Shape(format!("left premise lacks {m} copies of {a}")))?;
    let pi = r.ante.without_n(a, n).ok_or_else(|| CutError::Shape(format!("right premise lacks {n} copies of {a}")))?;
    Ok(Sequent::from_sides(l.ante.union(&pi), delta.union(&r.succ)))
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct TraceStep {
    pub index: usize,
    /// The step whose case analysis made this call.
    pub parent: Option<usize>,
    pub label: &'static str,
    pub complexity: usize,
    pub weight: usize,
}

fn term_subst(t: &Term, x: &str, s: &Term) -> Term {
    match t {
        Term::Var(v) if v == x => s.clone(),
        _ => t.clone(),
    }
}

fn term_vars(t: &Term) -> BTreeSet<String> {
    crate::syntax::term_vars(t)
}

/// Replaces the free variable `x` by `t` throughout `d`. Eigenvariables that
/// occur in `t` are renamed first; subtrees where `x` is itself the
/// eigenvariable are left alone. The node count does not change.
pub fn subst_derivation(d: &Derivation, t: &Term, x: &str) -> Derivation {
    let mut avoid = d.all_vars();
    avoid.extend(term_vars(t));
    avoid.insert(x.to_string());
    subst_in(d, t, x, &mut avoid)
}

fn subst_in(d: &Derivation, t: &Term, x: &str, avoid: &mut BTreeSet<String>) -> Derivation {
    if !d.conclusion.has_free(x) && !d.all_vars().contains(x) {
        return d.clone();
    }
    let mut premises: Vec<Derivation> = d.premises.clone();
    let mut meta = d.meta.clone();
    if let Some(e) = d.meta.eigen.clone() {
        if e == x {
            return d.clone();
        }
        if term_vars(t).contains(&e) {
            let fresh = fresh_var(avoid);
            avoid.insert(fresh.clone());
            premises = premises.iter().map(|p| subst_in(p, &Term::var(fresh.clone()), &e, avoid)).collect();
            meta.eigen = Some(fresh);
        }
    }
    let premises = premises.iter().map(|p| subst_in(p, t, x, avoid)).collect();
    meta.formula = meta.formula.map(|f| f.subst(x, t));
    meta.witness = meta.witness.map(|w| term_subst(&w, x, t));
    meta.split = meta.split.map(|s| Split { left_ante: side_subst(&s.left_ante, x, t), left_succ: side_subst(&s.left_succ, x, t) });
    if let Some(e) = &mut meta.ecut {
        e.formula = e.formula.subst(x, t);
    }
    Derivation::new(d.rule, d.conclusion.subst(x, t), premises, meta)
}

fn side_subst(m: &Multiset, x: &str, t: &Term) -> Multiset {
    m.map(|f| f.subst(x, t))
}

/// Removes a topmost extended cut.
pub fn reduce_ecut_bottom(e: &EcutBottom) -> Derivation {
    reduce_ecut_bottom_traced(e, &mut Vec::new())
}

/// Like [`reduce_ecut_bottom`], appending every reduction step to `trace`.
pub fn reduce_ecut_bottom_traced(e: &EcutBottom, trace: &mut Vec<TraceStep>) -> Derivation {
    let mut r = Reducer { trace };
    r.reduce(&e.left, &e.right, &e.formula, e.m, e.n, None)
}

/// Replaces every cut, topmost first, by a cut-free derivation of the same
/// sequent.
pub fn eliminate_cuts(d: &Derivation) -> Result<Derivation, CutError> {
    eliminate_cuts_traced(d).map(|(d, _)| d)
}

pub fn eliminate_cuts_traced(d: &Derivation) -> Result<(Derivation, Vec<TraceStep>), CutError> {
    if let Err(errs) = check_derivation(d) {
        let (path, error) = errs.into_iter().next().expect("at least one error");
        return Err(CutError::Invalid { path, error });
    }
    let mut d = d.clone();
    d.annotate();
    let mut trace = Vec::new();
    let out = eliminate(&d, &mut trace)?;
    Ok((out, trace))
}

fn eliminate(d: &Derivation, trace: &mut Vec<TraceStep>) -> Result<Derivation, CutError> {
    if !d.uses_cut() {
        return Ok(d.clone());
    }
    let premises = d.premises.iter().map(|p| eliminate(p, trace)).collect::<Result<Vec<_>, _>>()?;
    let mut node = Derivation::new(d.rule, d.conclusion.clone(), premises, d.meta.clone());
    if node.rule.is_cut() {
        let e = EcutBottom::from_derivation(&node)?;
        node = reduce_ecut_bottom_traced(&e, trace);
        node = restructure(node, &d.conclusion).expect("same end sequent");
    }
    Ok(node)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certificate {
    PureIntuitionistic,
    PureClassical,
    /// Only atoms and the shared connectives, so both of the above.
    Shared,
    Mixed,
}

/// Classifies a cut-free derivation by the connectives in all its formulas.
pub fn fragment_certificate(d: &Derivation) -> Result<Certificate, CutError> {
    if d.uses_cut() {
        return Err(CutError::NotCutFree);
    }
    let mut frag = Fragment::Common;
    d.visit(&mut |_, node| {
        for f in node.conclusion.formulas() {
            frag = frag.join(f.fragment());
        }
    });
    Ok(match frag {
        Fragment::Common => Certificate::Shared,
        Fragment::Intuitionistic => Certificate::PureIntuitionistic,
        Fragment::Classical => Certificate::PureClassical,
        Fragment::Mixed => Certificate::Mixed,
    })
}

struct Reducer<'a> {
    trace: &'a mut Vec<TraceStep>,
}

fn principal_of(d: &Derivation) -> Formula {
    d.meta.formula.clone().expect("annotated logical rule")
}

fn is_right(rule: RuleId) -> bool {
    use RuleId::*;
    matches!(rule, ImpIR | ImpCR | AndR | OrR1 | OrR2 | ForallIR | ForallCR | ExistsR)
}

fn is_left(rule: RuleId) -> bool {
    use RuleId::*;
    matches!(rule, ImpIL | ImpCL | AndL1 | AndL2 | OrL | ForallIL | ForallCL | ExistsL)
}

fn bin(f: &Formula) -> (&Formula, &Formula) {
    match f {
        Formula::Bin(_, l, r) => (l, r),
        _ => unreachable!("binary principal formula"),
    }
}

fn quant(f: &Formula) -> (&str, &Formula) {
    match f {
        Formula::Quant(_, x, b) => (x, b),
        _ => unreachable!("quantified principal formula"),
    }
}

fn avoid_of(l: &Derivation, r: &Derivation) -> BTreeSet<String> {
    let mut s = l.all_vars();
    s.extend(r.all_vars());
    s
}

/// Rebuilds a one-premise node over a new premise.
fn reapply(node: &Derivation, premise: Derivation) -> Derivation {
    use RuleId::*;
    let f = principal_of(node);
    let meta = &node.meta;
    match node.rule {
        WeakL => Derivation::weak_l(premise, f),
        WeakR => Derivation::weak_r(premise, f),
        ContrL => Derivation::contr_l(premise, f),
        ContrR => Derivation::contr_r(premise, f),
        ImpIR => Derivation::imp_i_r(premise, f),
        ImpCR => Derivation::imp_c_r(premise, f),
        AndL1 => Derivation::and_l(premise, f, true),
        AndL2 => Derivation::and_l(premise, f, false),
        OrR1 => Derivation::or_r(premise, f, true),
        OrR2 => Derivation::or_r(premise, f, false),
        ForallIR | ForallCR => match &meta.eigen {
            Some(z) => Derivation::forall_r(premise, f, z),
            None => vacuous_forall_r(premise, f),
        },
        ExistsL => match &meta.eigen {
            Some(z) => Derivation::exists_l(premise, f, z),
            None => {
                let (_, body) = quant(&f);
                let c = Sequent::from_sides(premise.conclusion.ante.without(body).expect("body").with(f.clone()), premise.conclusion.succ.clone());
                Derivation::new(ExistsL, c, vec![premise], Meta { formula: Some(f), ..Meta::default() })
            }
        },
        ForallIL | ForallCL => {
            let t = meta.witness.clone().unwrap_or_else(|| Term::var(quant(&f).0));
            Derivation::forall_l(premise, f, t)
        }
        ExistsR => {
            let t = meta.witness.clone().unwrap_or_else(|| Term::var(quant(&f).0));
            Derivation::exists_r(premise, f, t)
        }
        r => unreachable!("{r} has one premise"),
    }
}

fn vacuous_forall_r(premise: Derivation, f: Formula) -> Derivation {
    let rule = match &f {
        Formula::Quant(Quant::ForallI, ..) => RuleId::ForallIR,
        _ => RuleId::ForallCR,
    };
    let (_, body) = quant(&f);
    let c = Sequent::from_sides(premise.conclusion.ante.clone(), premise.conclusion.succ.without(body).expect("body").with(f.clone()));
    Derivation::new(rule, c, vec![premise], Meta { formula: Some(f), ..Meta::default() })
}

/// Rebuilds a two-premise node over new premises.
fn reapply2(node: &Derivation, l: Derivation, r: Derivation) -> Derivation {
    let f = principal_of(node);
    match node.rule {
        RuleId::AndR => Derivation::and_r(l, r, f),
        RuleId::OrL => Derivation::or_l(l, r, f),
        RuleId::ImpIL | RuleId::ImpCL => Derivation::imp_l(l, r, f),
        other => unreachable!("{other} is not a two-premise logical rule"),
    }
}

impl Reducer<'_> {
    /// Cut-free derivation of the conclusion of the extended cut of `l` and `r`
    /// on `a`.
    fn reduce(&mut self, l: &Derivation, r: &Derivation, a: &Formula, m: usize, n: usize, parent: Option<usize>) -> Derivation {
        let complexity = a.complexity();
        let weight = l.node_count() + r.node_count();
        if let Some(p) = parent {
            let prev = &self.trace[p];
            assert!(
                (complexity, weight) < (prev.complexity, prev.weight),
                "measure must decrease: ({complexity}, {weight}) after ({}, {})",
                prev.complexity,
                prev.weight
            );
        }
        let idx = self.trace.len();
        self.trace.push(TraceStep { index: idx, parent, label: "", complexity, weight });
        let target = ecut_conclusion(&l.conclusion, &r.conclusion, a, m, n).expect("well-formed extended cut");
        let (label, d) = self.case(l, r, a, m, n, idx);
        self.trace[idx].label = label;
        let d = restructure(d, &target).expect("reduction result fits the conclusion");
        debug_assert!(!d.uses_cut());
        d
    }

    fn case(&mut self, l: &Derivation, r: &Derivation, a: &Formula, m: usize, n: usize, me: usize) -> (&'static str, Derivation) {
        use RuleId::*;
        let me = Some(me);
        if m == 0 {
            return ("base-m0", l.clone());
        }
        if n == 0 {
            return ("base-n0", r.clone());
        }
        if l.rule == Id {
            return ("axiom", r.clone());
        }
        if r.rule == Id {
            return ("axiom", l.clone());
        }
        let on_a = |d: &Derivation| d.meta.formula.as_ref().is_some_and(|f| f.alpha_eq(a));
        match l.rule {
            WeakR if on_a(l) => return ("structural", self.reduce(&l.premises[0], r, a, m - 1, n, me)),
            ContrR if on_a(l) => return ("structural", self.reduce(&l.premises[0], r, a, m + 1, n, me)),
            _ => {}
        }
        match r.rule {
            WeakL if on_a(r) => return ("structural", self.reduce(l, &r.premises[0], a, m, n - 1, me)),
            ContrL if on_a(r) => return ("structural", self.reduce(l, &r.premises[0], a, m, n + 1, me)),
            _ => {}
        }
        if !(is_right(l.rule) && on_a(l)) {
            return ("non-principal-L", self.permute_left(l, r, a, m, n, me));
        }
        if !(is_left(r.rule) && on_a(r)) {
            let label = match r.rule {
                ImpIR => "principal-cross-imp-i",
                ForallIR => "principal-cross-forall-i",
                _ => "non-principal-R",
            };
            return (label, self.permute_right(l, r, a, m, n, me));
        }
        self.principal(l, r, a, m, n, me)
    }

    fn permute_left(&mut self, l: &Derivation, r: &Derivation, a: &Formula, m: usize, n: usize, me: Option<usize>) -> Derivation {
        if l.premises.len() == 1 {
            let (node, prem) = self.rename_eigen(l, &r.conclusion, r);
            let d = self.reduce(&prem, r, a, m, n, me);
            return reapply(&node, d);
        }
        let (l1, l2) = (&l.premises[0], &l.premises[1]);
        match l.rule {
            RuleId::AndR | RuleId::OrL => {
                let d1 = self.reduce(l1, r, a, m, n, me);
                let d2 = self.reduce(l2, r, a, m, n, me);
                reapply2(l, d1, d2)
            }
            _ => {
                let split = l.meta.split.as_ref().expect("annotated split");
                let m1 = m.min(split.left_succ.count(a));
                let m2 = m - m1;
                let d1 = if m1 > 0 { self.reduce(l1, r, a, m1, n, me) } else { l1.clone() };
                let d2 = if m2 > 0 { self.reduce(l2, r, a, m2, n, me) } else { l2.clone() };
                reapply2(l, d1, d2)
            }
        }
    }

    fn permute_right(&mut self, l: &Derivation, r: &Derivation, a: &Formula, m: usize, n: usize, me: Option<usize>) -> Derivation {
        if r.premises.len() == 1 {
            let (node, prem) = self.rename_eigen(r, &l.conclusion, l);
            let d = self.reduce(l, &prem, a, m, n, me);
            return reapply(&node, d);
        }
        let (r1, r2) = (&r.premises[0], &r.premises[1]);
        match r.rule {
            RuleId::AndR | RuleId::OrL => {
                let d1 = self.reduce(l, r1, a, m, n, me);
                let d2 = self.reduce(l, r2, a, m, n, me);
                reapply2(r, d1, d2)
            }
            _ => {
                let split = r.meta.split.as_ref().expect("annotated split");
                let n1 = n.min(split.left_ante.count(a));
                let n2 = n - n1;
                let d1 = if n1 > 0 { self.reduce(l, r1, a, m, n1, me) } else { r1.clone() };
                let d2 = if n2 > 0 { self.reduce(l, r2, a, m, n2, me) } else { r2.clone() };
                reapply2(r, d1, d2)
            }
        }
    }

    /// Renames the eigenvariable of a one-premise `node` when it occurs free
    /// in `other`, the conclusion of the opposite cut premise.
    fn rename_eigen(&self, node: &Derivation, other: &Sequent, other_tree: &Derivation) -> (Derivation, Derivation) {
        let prem = node.premises[0].clone();
        let Some(z) = node.meta.eigen.clone() else {
            return (node.clone(), prem);
        };
        if !other.has_free(&z) {
            return (node.clone(), prem);
        }
        let y = fresh_var(&avoid_of(node, other_tree));
        let prem = subst_derivation(&prem, &Term::var(y.clone()), &z);
        let mut node = node.clone();
        node.meta.eigen = Some(y);
        (node, prem)
    }

    fn principal(&mut self, l: &Derivation, r: &Derivation, a: &Formula, m: usize, n: usize, me: Option<usize>) -> (&'static str, Derivation) {
        use RuleId::*;
        // the left premises with the remaining m - 1 copies cut away
        let left_rest = |this: &mut Self, p: &Derivation| if m > 1 { this.reduce(p, r, a, m - 1, n, me) } else { p.clone() };
        let fl = principal_of(l);
        match (l.rule, r.rule) {
            (AndR, AndL1 | AndL2) => {
                let first = r.rule == AndL1;
                let (b, c) = bin(&fl);
                let lp = left_rest(self, &l.premises[if first { 0 } else { 1 }]);
                let rp = self.right_rest(l, &r.premises[0], a, m, n, me);
                let comp = if first { b } else { c };
                ("principal-and", self.reduce(&lp, &rp, comp, 1, 1, me))
            }
            (OrR1 | OrR2, OrL) => {
                let first = l.rule == OrR1;
                let (b, c) = bin(&fl);
                let lp = left_rest(self, &l.premises[0]);
                let rp = self.right_rest(l, &r.premises[if first { 0 } else { 1 }], a, m, n, me);
                let comp = if first { b } else { c };
                ("principal-or", self.reduce(&lp, &rp, comp, 1, 1, me))
            }
            (ImpIR, ImpIL) | (ImpCR, ImpCL) => {
                let label = if l.rule == ImpIR { "principal-imp-i" } else { "principal-imp-c" };
                let (b, c) = bin(&fl);
                let lp = left_rest(self, &l.premises[0]);
                let split = r.meta.split.as_ref().expect("annotated split");
                let n1 = (n - 1).min(split.left_ante.count(a));
                let n2 = n - 1 - n1;
                let r1 = if n1 > 0 { self.reduce(l, &r.premises[0], a, m, n1, me) } else { r.premises[0].clone() };
                let r2 = if n2 > 0 { self.reduce(l, &r.premises[1], a, m, n2, me) } else { r.premises[1].clone() };
                let e1 = self.reduce(&r1, &lp, b, 1, 1, me);
                (label, self.reduce(&e1, &r2, c, 1, 1, me))
            }
            (ForallIR, ForallIL) | (ForallCR, ForallCL) => {
                let label = if l.rule == ForallIR { "principal-forall-i" } else { "principal-forall-c" };
                let (x, body) = quant(&fl);
                let t = r.meta.witness.clone().unwrap_or_else(|| Term::var(x));
                let mut lp = l.premises[0].clone();
                if let Some(z) = &l.meta.eigen {
                    // move the eigenvariable out of the way of the other premise first
                    let y = fresh_var(&avoid_of(l, r));
                    lp = subst_derivation(&lp, &Term::var(y.clone()), z);
                    lp = left_rest(self, &lp);
                    lp = subst_derivation(&lp, &t, &y);
                } else {
                    lp = left_rest(self, &lp);
                }
                let rp = self.right_rest(l, &r.premises[0], a, m, n, me);
                (label, self.reduce(&lp, &rp, &body.subst(x, &t), 1, 1, me))
            }
            (ExistsR, ExistsL) => {
                let (x, body) = quant(&fl);
                let t = l.meta.witness.clone().unwrap_or_else(|| Term::var(x));
                let lp = left_rest(self, &l.premises[0]);
                let mut rp = r.premises[0].clone();
                if let Some(z) = &r.meta.eigen {
                    let y = fresh_var(&avoid_of(l, r));
                    rp = subst_derivation(&rp, &Term::var(y.clone()), z);
                    rp = self.right_rest(l, &rp, a, m, n, me);
                    rp = subst_derivation(&rp, &t, &y);
                } else {
                    rp = self.right_rest(l, &rp, a, m, n, me);
                }
                ("principal-exists", self.reduce(&lp, &rp, &body.subst(x, &t), 1, 1, me))
            }
            (lr, rr) => unreachable!("{lr} and {rr} cannot both be principal on {a}"),
        }
    }

    /// The right premise with the remaining n - 1 copies cut away.
    fn right_rest(&mut self, l: &Derivation, p: &Derivation, a: &Formula, m: usize, n: usize, me: Option<usize>) -> Derivation {
        if n > 1 {
            self.reduce(l, p, a, m, n - 1, me)
        } else {
            p.clone()
        }
    }
}

#[cfg(test)]
mod tests;
