//! Terms and formulas of the combined intuitionistic/classical language.
//!
//! Binders are named. Every formula handed out by the parser or by
//! [`Formula::subst`] is *normalized*: binders are pairwise distinct and never
//! coincide with a free variable of the same formula. Alpha-equivalence is
//! decided on [`Formula::alpha_key`], a nameless rendering in which every
//! binder is replaced by its depth.

use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Const(String),
    /// A name for a domain element. Only produced by the evaluator.
    Elem(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Term {
        Term::Const(name.into())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinOp {
    And,
    Or,
    ImpI,
    ImpC,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Quant {
    ForallI,
    ForallC,
    Exists,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(String, Vec<Term>),
    Bottom,
    Bin(BinOp, Box<Formula>, Box<Formula>),
    Quant(Quant, String, Box<Formula>),
}

/// Which connective families a formula uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Fragment {
    /// Only connectives shared by both logics (atoms, bottom, and, or, exists).
    Common,
    /// Uses intuitionistic implication or universal quantifier, no classical ones.
    Intuitionistic,
    /// Uses classical implication or universal quantifier, no intuitionistic ones.
    Classical,
    Mixed,
}

impl Fragment {
    pub fn join(self, other: Fragment) -> Fragment {
        use Fragment::*;
        match (self, other) {
            (Common, f) | (f, Common) => f,
            (Intuitionistic, Intuitionistic) => Intuitionistic,
            (Classical, Classical) => Classical,
            _ => Mixed,
        }
    }

    /// Membership in the intuitionistic sublanguage.
    pub fn is_intuitionistic(self) -> bool {
        matches!(self, Fragment::Common | Fragment::Intuitionistic)
    }

    /// Membership in the classical sublanguage.
    pub fn is_classical(self) -> bool {
        matches!(self, Fragment::Common | Fragment::Classical)
    }
}

impl Formula {
    pub fn atom(pred: impl Into<String>, args: Vec<Term>) -> Formula {
        Formula::Atom(pred.into(), args)
    }

    pub fn bin(op: BinOp, l: Formula, r: Formula) -> Formula {
        Formula::Bin(op, Box::new(l), Box::new(r))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::bin(BinOp::And, l, r)
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::bin(BinOp::Or, l, r)
    }

    pub fn imp_i(l: Formula, r: Formula) -> Formula {
        Formula::bin(BinOp::ImpI, l, r)
    }

    pub fn imp_c(l: Formula, r: Formula) -> Formula {
        Formula::bin(BinOp::ImpC, l, r)
    }

    pub fn quant(q: Quant, var: impl Into<String>, body: Formula) -> Formula {
        Formula::Quant(q, var.into(), Box::new(body))
    }

    pub fn forall_i(var: impl Into<String>, body: Formula) -> Formula {
        Formula::quant(Quant::ForallI, var, body)
    }

    pub fn forall_c(var: impl Into<String>, body: Formula) -> Formula {
        Formula::quant(Quant::ForallC, var, body)
    }

    pub fn exists(var: impl Into<String>, body: Formula) -> Formula {
        Formula::quant(Quant::Exists, var, body)
    }

    /// `bot ->i bot`
    pub fn top() -> Formula {
        Formula::imp_i(Formula::Bottom, Formula::Bottom)
    }

    pub fn neg_i(a: Formula) -> Formula {
        Formula::imp_i(a, Formula::Bottom)
    }

    pub fn neg_c(a: Formula) -> Formula {
        Formula::imp_c(a, Formula::Bottom)
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Formula::Bin(BinOp::ImpI, l, r)
            if **l == Formula::Bottom && **r == Formula::Bottom)
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(_, args) => {
                for t in args {
                    if let Term::Var(v) = t {
                        if !bound.iter().any(|b| b == v) {
                            out.insert(v.clone());
                        }
                    }
                }
            }
            Formula::Bottom => {}
            Formula::Bin(_, l, r) => {
                l.collect_free(bound, out);
                r.collect_free(bound, out);
            }
            Formula::Quant(_, v, body) => {
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn has_free(&self, x: &str) -> bool {
        match self {
            Formula::Atom(_, args) => args.iter().any(|t| t.as_var() == Some(x)),
            Formula::Bottom => false,
            Formula::Bin(_, l, r) => l.has_free(x) || r.has_free(x),
            Formula::Quant(_, v, body) => v != x && body.has_free(x),
        }
    }

    /// Every variable name occurring anywhere, bound or free, binder positions included.
    pub fn all_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(_, args) => {
                for t in args {
                    if let Term::Var(v) = t {
                        out.insert(v.clone());
                    }
                }
            }
            Formula::Bottom => {}
            Formula::Bin(_, l, r) => {
                l.all_vars(out);
                r.all_vars(out);
            }
            Formula::Quant(_, v, body) => {
                out.insert(v.clone());
                body.all_vars(out);
            }
        }
    }

    /// Constant symbols occurring in the formula.
    pub fn constants(&self, out: &mut BTreeSet<String>) {
        self.visit_terms(&mut |t| {
            if let Term::Const(c) = t {
                out.insert(c.clone());
            }
        });
    }

    pub fn visit_terms(&self, f: &mut impl FnMut(&Term)) {
        match self {
            Formula::Atom(_, args) => args.iter().for_each(f),
            Formula::Bottom => {}
            Formula::Bin(_, l, r) => {
                l.visit_terms(f);
                r.visit_terms(f);
            }
            Formula::Quant(_, _, body) => body.visit_terms(f),
        }
    }

    /// Predicate symbols with the arities they are used at.
    pub fn predicates(&self, out: &mut BTreeMap<String, usize>) {
        match self {
            Formula::Atom(p, args) => {
                out.entry(p.clone()).or_insert(args.len());
            }
            Formula::Bottom => {}
            Formula::Bin(_, l, r) => {
                l.predicates(out);
                r.predicates(out);
            }
            Formula::Quant(_, _, body) => body.predicates(out),
        }
    }

    /// Clash-avoiding substitution `self[t/x]`; the result is normalized.
    pub fn subst(&self, x: &str, t: &Term) -> Formula {
        if !self.has_free(x) {
            return self.clone();
        }
        self.subst_raw(x, t).normalize()
    }

    /// Clash-avoiding substitution without the final normalization pass.
    pub(crate) fn subst_raw(&self, x: &str, t: &Term) -> Formula {
        match self {
            Formula::Atom(p, args) => Formula::Atom(
                p.clone(),
                args.iter()
                    .map(|a| match a {
                        Term::Var(v) if v == x => t.clone(),
                        other => other.clone(),
                    })
                    .collect(),
            ),
            Formula::Bottom => Formula::Bottom,
            Formula::Bin(op, l, r) => Formula::bin(*op, l.subst_raw(x, t), r.subst_raw(x, t)),
            Formula::Quant(q, y, body) => {
                if y == x || !body.has_free(x) {
                    return self.clone();
                }
                if t.as_var() == Some(y.as_str()) {
                    let mut avoid = BTreeSet::new();
                    body.all_vars(&mut avoid);
                    avoid.insert(x.to_string());
                    avoid.insert(y.clone());
                    let fresh = variant(y, &avoid);
                    let renamed = body.subst_raw(y, &Term::Var(fresh.clone()));
                    Formula::quant(*q, fresh, renamed.subst_raw(x, t))
                } else {
                    Formula::quant(*q, y.clone(), body.subst_raw(x, t))
                }
            }
        }
    }

    pub fn normalize(&self) -> Formula {
        self.normalize_in(&BTreeSet::new())
    }

    /// Alpha-renames binders so that they are pairwise distinct and disjoint
    /// from the free variables of `self` and from `context`. Binders that
    /// already satisfy this keep their names, which makes the pass idempotent.
    pub fn normalize_in(&self, context: &BTreeSet<String>) -> Formula {
        let mut used: BTreeSet<String> = self.free_vars();
        used.extend(context.iter().cloned());
        let mut all = used.clone();
        self.all_vars(&mut all);
        self.normalize_walk(&mut used, &mut all)
    }

    fn normalize_walk(&self, used: &mut BTreeSet<String>, all: &mut BTreeSet<String>) -> Formula {
        match self {
            Formula::Atom(..) | Formula::Bottom => self.clone(),
            Formula::Bin(op, l, r) => {
                let l = l.normalize_walk(used, all);
                let r = r.normalize_walk(used, all);
                Formula::bin(*op, l, r)
            }
            Formula::Quant(q, y, body) => {
                if used.contains(y) {
                    let fresh = variant(y, all);
                    all.insert(fresh.clone());
                    used.insert(fresh.clone());
                    let renamed = body.subst_raw(y, &Term::Var(fresh.clone()));
                    Formula::quant(*q, fresh, renamed.normalize_walk(used, all))
                } else {
                    used.insert(y.clone());
                    Formula::quant(*q, y.clone(), body.normalize_walk(used, all))
                }
            }
        }
    }

    /// Nameless rendering: each binder becomes `#<depth>`. Two formulas are
    /// alpha-equivalent iff their keys are equal.
    pub fn alpha_key(&self) -> Formula {
        let mut env: Vec<(String, String)> = Vec::new();
        self.key_walk(&mut env)
    }

    fn key_walk(&self, env: &mut Vec<(String, String)>) -> Formula {
        match self {
            Formula::Atom(p, args) => Formula::Atom(
                p.clone(),
                args.iter()
                    .map(|t| match t {
                        Term::Var(v) => match env.iter().rev().find(|(n, _)| n == v) {
                            Some((_, k)) => Term::Var(k.clone()),
                            None => t.clone(),
                        },
                        _ => t.clone(),
                    })
                    .collect(),
            ),
            Formula::Bottom => Formula::Bottom,
            Formula::Bin(op, l, r) => Formula::bin(*op, l.key_walk(env), r.key_walk(env)),
            Formula::Quant(q, y, body) => {
                let k = format!("#{}", env.len());
                env.push((y.clone(), k.clone()));
                let b = body.key_walk(env);
                env.pop();
                Formula::quant(*q, k, b)
            }
        }
    }

    pub fn alpha_eq(&self, other: &Formula) -> bool {
        self.alpha_key() == other.alpha_key()
    }

    /// Atoms, intuitionistic implications and intuitionistic universals.
    pub fn is_persistent(&self) -> bool {
        matches!(
            self,
            Formula::Atom(..) | Formula::Bin(BinOp::ImpI, ..) | Formula::Quant(Quant::ForallI, ..)
        )
    }

    pub fn fragment(&self) -> Fragment {
        match self {
            Formula::Atom(..) | Formula::Bottom => Fragment::Common,
            Formula::Bin(op, l, r) => {
                let own = match op {
                    BinOp::ImpI => Fragment::Intuitionistic,
                    BinOp::ImpC => Fragment::Classical,
                    _ => Fragment::Common,
                };
                own.join(l.fragment()).join(r.fragment())
            }
            Formula::Quant(q, _, body) => {
                let own = match q {
                    Quant::ForallI => Fragment::Intuitionistic,
                    Quant::ForallC => Fragment::Classical,
                    Quant::Exists => Fragment::Common,
                };
                own.join(body.fragment())
            }
        }
    }

    /// Number of logical symbols; bottom and atoms count zero.
    pub fn complexity(&self) -> usize {
        match self {
            Formula::Atom(..) | Formula::Bottom => 0,
            Formula::Bin(_, l, r) => 1 + l.complexity() + r.complexity(),
            Formula::Quant(_, _, body) => 1 + body.complexity(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(..) | Formula::Bottom => 0,
            Formula::Bin(_, l, r) => 1 + l.depth().max(r.depth()),
            Formula::Quant(_, _, body) => 1 + body.depth(),
        }
    }

    pub fn contains_elem(&self) -> bool {
        let mut found = false;
        self.visit_terms(&mut |t| found |= matches!(t, Term::Elem(_)));
        found
    }
}

pub fn free_vars(f: &Formula) -> BTreeSet<String> {
    f.free_vars()
}

pub fn term_vars(t: &Term) -> BTreeSet<String> {
    t.as_var().map(|v| v.to_string()).into_iter().collect()
}

/// Smallest `z<n>` (n >= 1) not in `avoid`.
pub fn fresh_var(avoid: &BTreeSet<String>) -> String {
    (1..)
        .map(|i| format!("z{i}"))
        .find(|name| !avoid.contains(name))
        .expect("unbounded")
}

/// Smallest `<base><n>` not in `avoid`, where `base` is `name` without trailing digits.
pub fn variant(name: &str, avoid: &BTreeSet<String>) -> String {
    let base = name.trim_end_matches(|c: char| c.is_ascii_digit());
    let base = if base.is_empty() { "z" } else { base };
    (1..)
        .map(|i| format!("{base}{i}"))
        .find(|n| !avoid.contains(n))
        .expect("unbounded")
}

/// Predicate arities and constant symbols of one session.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub predicates: BTreeMap<String, usize>,
    pub constants: BTreeSet<String>,
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    pub fn with_predicate(mut self, name: &str, arity: usize) -> Signature {
        self.predicates.insert(name.to_string(), arity);
        self
    }

    /// Records the arity on first use; returns the established arity on mismatch.
    pub fn use_predicate(&mut self, name: &str, arity: usize) -> Result<(), usize> {
        match self.predicates.get(name) {
            Some(&a) if a != arity => Err(a),
            Some(_) => Ok(()),
            None => {
                self.predicates.insert(name.to_string(), arity);
                Ok(())
            }
        }
    }
}
