//! Derivation trees of the sequent calculus and constructors that compute
//! conclusions from premises.

mod check;
mod ordinary;
mod subformula;

pub use check::{check_derivation, check_derivation_in, check_rule_instance, check_rule_instance_in, Calculus, RuleError};
pub use ordinary::{derive_ordinary_right, DeriveError};
pub use subformula::{subformula_property_check, SubformulaViolation};
pub(crate) use subformula::match_instance;

use crate::sequent::{Multiset, Sequent};
use crate::syntax::{fresh_var, BinOp, Formula, Quant, Term};
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleId {
    Id,
    BottomAx,
    WeakL,
    WeakR,
    ContrL,
    ContrR,
    Cut,
    Ecut,
    ImpIR,
    ImpIL,
    ImpCR,
    ImpCL,
    AndR,
    AndL1,
    AndL2,
    OrR1,
    OrR2,
    OrL,
    ForallIR,
    ForallIL,
    ForallCR,
    ForallCL,
    ExistsR,
    ExistsL,
}

impl RuleId {
    pub const ALL: [RuleId; 24] = [
        RuleId::Id,
        RuleId::BottomAx,
        RuleId::WeakL,
        RuleId::WeakR,
        RuleId::ContrL,
        RuleId::ContrR,
        RuleId::Cut,
        RuleId::Ecut,
        RuleId::ImpIR,
        RuleId::ImpIL,
        RuleId::ImpCR,
        RuleId::ImpCL,
        RuleId::AndR,
        RuleId::AndL1,
        RuleId::AndL2,
        RuleId::OrR1,
        RuleId::OrR2,
        RuleId::OrL,
        RuleId::ForallIR,
        RuleId::ForallIL,
        RuleId::ForallCR,
        RuleId::ForallCL,
        RuleId::ExistsR,
        RuleId::ExistsL,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleId::Id => "Id",
            RuleId::BottomAx => "BottomAx",
            RuleId::WeakL => "WeakL",
            RuleId::WeakR => "WeakR",
            RuleId::ContrL => "ContrL",
            RuleId::ContrR => "ContrR",
            RuleId::Cut => "Cut",
            RuleId::Ecut => "Ecut",
            RuleId::ImpIR => "ImpIR",
            RuleId::ImpIL => "ImpIL",
            RuleId::ImpCR => "ImpCR",
            RuleId::ImpCL => "ImpCL",
            RuleId::AndR => "AndR",
            RuleId::AndL1 => "AndL1",
            RuleId::AndL2 => "AndL2",
            RuleId::OrR1 => "OrR1",
            RuleId::OrR2 => "OrR2",
            RuleId::OrL => "OrL",
            RuleId::ForallIR => "ForallIR",
            RuleId::ForallIL => "ForallIL",
            RuleId::ForallCR => "ForallCR",
            RuleId::ForallCL => "ForallCL",
            RuleId::ExistsR => "ExistsR",
            RuleId::ExistsL => "ExistsL",
        }
    }

    /// Number of premises.
    pub fn arity(self) -> usize {
        match self {
            RuleId::Id | RuleId::BottomAx => 0,
            RuleId::Cut | RuleId::Ecut | RuleId::ImpIL | RuleId::ImpCL | RuleId::AndR | RuleId::OrL => 2,
            _ => 1,
        }
    }

    pub fn is_structural(self) -> bool {
        matches!(self, RuleId::WeakL | RuleId::WeakR | RuleId::ContrL | RuleId::ContrR)
    }

    pub fn is_cut(self) -> bool {
        matches!(self, RuleId::Cut | RuleId::Ecut)
    }

    /// Logical rules, i.e. everything except axioms, structural rules and cuts.
    pub fn is_logical(self) -> bool {
        !(self.arity() == 0 || self.is_structural() || self.is_cut())
    }

    /// The side on which a logical rule introduces its principal formula.
    pub fn principal_side(self) -> Option<Side> {
        use RuleId::*;
        match self {
            ImpIR | ImpCR | AndR | OrR1 | OrR2 | ForallIR | ForallCR | ExistsR => Some(Side::Succ),
            ImpIL | ImpCL | AndL1 | AndL2 | OrL | ForallIL | ForallCL | ExistsL => Some(Side::Ante),
            _ => None,
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("unknown rule `{0}`")]
pub struct UnknownRule(pub String);

impl FromStr for RuleId {
    type Err = UnknownRule;
    fn from_str(s: &str) -> Result<RuleId, UnknownRule> {
        RuleId::ALL.into_iter().find(|r| r.name() == s).ok_or_else(|| UnknownRule(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Ante,
    Succ,
}

/// Context of the left premise of a two-premise rule with split contexts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub left_ante: Multiset,
    pub left_succ: Multiset,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EcutMeta {
    pub formula: Formula,
    pub m: usize,
    pub n: usize,
}

/// Per-node annotations. Anything left out is inferred by the checker.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Meta {
    /// Principal formula of a logical rule, the cut formula, or the formula a
    /// structural rule acts on.
    pub formula: Option<Formula>,
    pub eigen: Option<String>,
    pub witness: Option<Term>,
    pub split: Option<Split>,
    pub ecut: Option<EcutMeta>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub conclusion: Sequent,
    pub rule: RuleId,
    pub premises: Vec<Derivation>,
    pub meta: Meta,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum StructuralError {
    #[error("cannot remove every copy of {0} by structural rules")]
    Strengthening(Formula),
}

fn replace(side: &Multiset, old: &Formula, new: Formula) -> Multiset {
    let mut m = side.clone();
    m.remove_one(old);
    m.push(new);
    m
}

fn remove(side: &Multiset, f: &Formula) -> Multiset {
    let mut m = side.clone();
    m.remove_one(f);
    m
}

fn parts(f: &Formula) -> (&Formula, &Formula) {
    match f {
        Formula::Bin(_, l, r) => (l, r),
        _ => panic!("expected a binary formula, got {f}"),
    }
}

fn quant_parts(f: &Formula) -> (&str, &Formula) {
    match f {
        Formula::Quant(_, x, body) => (x, body),
        _ => panic!("expected a quantified formula, got {f}"),
    }
}

impl Derivation {
    pub fn new(rule: RuleId, conclusion: Sequent, premises: Vec<Derivation>, meta: Meta) -> Derivation {
        Derivation { conclusion, rule, premises, meta }
    }

    fn unary(rule: RuleId, conclusion: Sequent, premise: Derivation, meta: Meta) -> Derivation {
        Derivation::new(rule, conclusion, vec![premise], meta)
    }

    fn principal(f: &Formula) -> Meta {
        Meta { formula: Some(f.clone()), ..Meta::default() }
    }

    pub fn id(a: Formula) -> Derivation {
        Derivation::new(RuleId::Id, Sequent::new(vec![a.clone()], vec![a]), vec![], Meta::default())
    }

    pub fn bottom() -> Derivation {
        Derivation::new(RuleId::BottomAx, Sequent::new(vec![Formula::Bottom], vec![]), vec![], Meta::default())
    }

    pub fn weak_l(d: Derivation, a: Formula) -> Derivation {
        let c = Sequent::from_sides(d.conclusion.ante.clone().with(a.clone()), d.conclusion.succ.clone());
        Derivation::unary(RuleId::WeakL, c, d, Derivation::principal(&a))
    }

    pub fn weak_r(d: Derivation, a: Formula) -> Derivation {
        let c = Sequent::from_sides(d.conclusion.ante.clone(), d.conclusion.succ.clone().with(a.clone()));
        Derivation::unary(RuleId::WeakR, c, d, Derivation::principal(&a))
    }

    pub fn contr_l(d: Derivation, a: Formula) -> Derivation {
        let c = Sequent::from_sides(remove(&d.conclusion.ante, &a), d.conclusion.succ.clone());
        Derivation::unary(RuleId::ContrL, c, d, Derivation::principal(&a))
    }

    pub fn contr_r(d: Derivation, a: Formula) -> Derivation {
        let c = Sequent::from_sides(d.conclusion.ante.clone(), remove(&d.conclusion.succ, &a));
        Derivation::unary(RuleId::ContrR, c, d, Derivation::principal(&a))
    }

    /// `Θ ⇒ A ->i B` from `A, Θ ⇒ B`.
    pub fn imp_i_r(d: Derivation, f: Formula) -> Derivation {
        let (a, _) = parts(&f);
        let c = Sequent::from_sides(remove(&d.conclusion.ante, a), Multiset::from_vec(vec![f.clone()]));
        Derivation::unary(RuleId::ImpIR, c, d, Derivation::principal(&f))
    }

    /// `Γ ⇒ Δ, A ->c B` from `A, Γ ⇒ Δ, B`.
    pub fn imp_c_r(d: Derivation, f: Formula) -> Derivation {
        let (a, b) = parts(&f);
        let c = Sequent::from_sides(remove(&d.conclusion.ante, a), replace(&d.conclusion.succ, b, f.clone()));
        Derivation::unary(RuleId::ImpCR, c, d, Derivation::principal(&f))
    }

    /// `A -> B, Γ1, Γ2 ⇒ Δ1, Δ2` from `Γ1 ⇒ Δ1, A` and `B, Γ2 ⇒ Δ2`, for
    /// either implication.
    pub fn imp_l(left: Derivation, right: Derivation, f: Formula) -> Derivation {
        let rule = match f {
            Formula::Bin(BinOp::ImpI, ..) => RuleId::ImpIL,
            Formula::Bin(BinOp::ImpC, ..) => RuleId::ImpCL,
            _ => panic!("expected an implication, got {f}"),
        };
        let (a, b) = parts(&f);
        let left_succ = remove(&left.conclusion.succ, a);
        let split = Split { left_ante: left.conclusion.ante.clone(), left_succ: left_succ.clone() };
        let ante = Multiset::from_vec(vec![f.clone()])
            .union(&left.conclusion.ante)
            .union(&remove(&right.conclusion.ante, b));
        let succ = left_succ.union(&right.conclusion.succ);
        let meta = Meta { formula: Some(f.clone()), split: Some(split), ..Meta::default() };
        Derivation::new(rule, Sequent::from_sides(ante, succ), vec![left, right], meta)
    }

    pub fn and_r(left: Derivation, right: Derivation, f: Formula) -> Derivation {
        let (a, _) = parts(&f);
        let c = Sequent::from_sides(left.conclusion.ante.clone(), replace(&left.conclusion.succ, a, f.clone()));
        Derivation::new(RuleId::AndR, c, vec![left, right], Derivation::principal(&f))
    }

    /// `A /\ B, Γ ⇒ Δ` from the premise holding the left (`first`) or right conjunct.
    pub fn and_l(d: Derivation, f: Formula, first: bool) -> Derivation {
        let (a, b) = parts(&f);
        let comp = if first { a } else { b };
        let c = Sequent::from_sides(replace(&d.conclusion.ante, comp, f.clone()), d.conclusion.succ.clone());
        let rule = if first { RuleId::AndL1 } else { RuleId::AndL2 };
        Derivation::unary(rule, c, d, Derivation::principal(&f))
    }

    pub fn or_r(d: Derivation, f: Formula, first: bool) -> Derivation {
        let (a, b) = parts(&f);
        let comp = if first { a } else { b };
        let c = Sequent::from_sides(d.conclusion.ante.clone(), replace(&d.conclusion.succ, comp, f.clone()));
        let rule = if first { RuleId::OrR1 } else { RuleId::OrR2 };
        Derivation::unary(rule, c, d, Derivation::principal(&f))
    }

    pub fn or_l(left: Derivation, right: Derivation, f: Formula) -> Derivation {
        let (a, _) = parts(&f);
        let c = Sequent::from_sides(replace(&left.conclusion.ante, a, f.clone()), left.conclusion.succ.clone());
        Derivation::new(RuleId::OrL, c, vec![left, right], Derivation::principal(&f))
    }

    /// Right rule for `forall_i`/`forall_c` with eigenvariable `z`.
    pub fn forall_r(d: Derivation, f: Formula, z: &str) -> Derivation {
        let (x, body) = quant_parts(&f);
        let inst = body.subst(x, &Term::var(z));
        let (rule, ante) = match f {
            Formula::Quant(Quant::ForallI, ..) => (RuleId::ForallIR, d.conclusion.ante.clone()),
            Formula::Quant(Quant::ForallC, ..) => (RuleId::ForallCR, d.conclusion.ante.clone()),
            _ => panic!("expected a universal formula, got {f}"),
        };
        let succ = replace(&d.conclusion.succ, &inst, f.clone());
        let meta = Meta { formula: Some(f.clone()), eigen: Some(z.to_string()), ..Meta::default() };
        Derivation::unary(rule, Sequent::from_sides(ante, succ), d, meta)
    }

    /// Left rule for `forall_i`/`forall_c` with witness `t`.
    pub fn forall_l(d: Derivation, f: Formula, t: Term) -> Derivation {
        let (x, body) = quant_parts(&f);
        let inst = body.subst(x, &t);
        let rule = match f {
            Formula::Quant(Quant::ForallI, ..) => RuleId::ForallIL,
            Formula::Quant(Quant::ForallC, ..) => RuleId::ForallCL,
            _ => panic!("expected a universal formula, got {f}"),
        };
        let c = Sequent::from_sides(replace(&d.conclusion.ante, &inst, f.clone()), d.conclusion.succ.clone());
        let meta = Meta { formula: Some(f.clone()), witness: Some(t), ..Meta::default() };
        Derivation::unary(rule, c, d, meta)
    }

    pub fn exists_r(d: Derivation, f: Formula, t: Term) -> Derivation {
        let (x, body) = quant_parts(&f);
        let inst = body.subst(x, &t);
        let c = Sequent::from_sides(d.conclusion.ante.clone(), replace(&d.conclusion.succ, &inst, f.clone()));
        let meta = Meta { formula: Some(f.clone()), witness: Some(t), ..Meta::default() };
        Derivation::unary(RuleId::ExistsR, c, d, meta)
    }

    pub fn exists_l(d: Derivation, f: Formula, z: &str) -> Derivation {
        let (x, body) = quant_parts(&f);
        let inst = body.subst(x, &Term::var(z));
        let c = Sequent::from_sides(replace(&d.conclusion.ante, &inst, f.clone()), d.conclusion.succ.clone());
        let meta = Meta { formula: Some(f.clone()), eigen: Some(z.to_string()), ..Meta::default() };
        Derivation::unary(RuleId::ExistsL, c, d, meta)
    }

    /// `Γ, Π ⇒ Δ, Σ` from `Γ ⇒ Δ, A` and `A, Π ⇒ Σ`.
    pub fn cut(left: Derivation, right: Derivation, a: Formula) -> Derivation {
        Derivation::cut_like(RuleId::Cut, left, right, a, 1, 1)
    }

    /// `Γ, Π ⇒ Δ, Σ` from `Γ ⇒ Δ, A^m` and `A^n, Π ⇒ Σ`.
    pub fn ecut(left: Derivation, right: Derivation, a: Formula, m: usize, n: usize) -> Derivation {
        Derivation::cut_like(RuleId::Ecut, left, right, a, m, n)
    }

    fn cut_like(rule: RuleId, left: Derivation, right: Derivation, a: Formula, m: usize, n: usize) -> Derivation {
        let delta = left.conclusion.succ.without_n(&a, m).unwrap_or_else(|| left.conclusion.succ.clone());
        let pi = right.conclusion.ante.without_n(&a, n).unwrap_or_else(|| right.conclusion.ante.clone());
        let split = Split { left_ante: left.conclusion.ante.clone(), left_succ: delta.clone() };
        let c = Sequent::from_sides(left.conclusion.ante.union(&pi), delta.union(&right.conclusion.succ));
        let mut meta = Meta { formula: Some(a.clone()), split: Some(split), ..Meta::default() };
        if rule == RuleId::Ecut {
            meta.ecut = Some(EcutMeta { formula: a, m, n });
        }
        Derivation::new(rule, c, vec![left, right], meta)
    }

    /// Number of sequent occurrences in the tree.
    pub fn node_count(&self) -> usize {
        1 + self.premises.iter().map(Derivation::node_count).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self.premises.iter().map(Derivation::height).max().unwrap_or(0)
    }

    /// True iff some node is a Cut or an Ecut.
    pub fn uses_cut(&self) -> bool {
        self.rule.is_cut() || self.premises.iter().any(Derivation::uses_cut)
    }

    pub fn cut_count(&self) -> usize {
        usize::from(self.rule.is_cut()) + self.premises.iter().map(Derivation::cut_count).sum::<usize>()
    }

    /// Pre-order walk with the path of premise indices leading to each node.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&[usize], &'a Derivation)) {
        fn go<'a>(d: &'a Derivation, path: &mut Vec<usize>, f: &mut impl FnMut(&[usize], &'a Derivation)) {
            f(path, d);
            for (i, p) in d.premises.iter().enumerate() {
                path.push(i);
                go(p, path, f);
                path.pop();
            }
        }
        go(self, &mut Vec::new(), f);
    }

    pub fn rules(&self) -> Vec<RuleId> {
        let mut out = Vec::new();
        self.visit(&mut |_, d| out.push(d.rule));
        out
    }

    /// Every variable name occurring anywhere in the tree, including metadata.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |_, d| {
            out.extend(d.conclusion.all_vars());
            if let Some(z) = &d.meta.eigen {
                out.insert(z.clone());
            }
            if let Some(Term::Var(v)) = &d.meta.witness {
                out.insert(v.clone());
            }
        });
        out
    }

    pub fn constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |_, d| {
            out.extend(d.conclusion.constants());
            if let Some(Term::Const(c)) = &d.meta.witness {
                out.insert(c.clone());
            }
        });
        out
    }

    /// Whether the occurrence `index` on `side` of the conclusion is principal:
    /// every occurrence for the restricted right rules, the introduced compound
    /// formula for the other logical rules, nothing otherwise.
    pub fn is_principal(&self, side: Side, index: usize) -> bool {
        let m = match side {
            Side::Ante => &self.conclusion.ante,
            Side::Succ => &self.conclusion.succ,
        };
        if index >= m.len() {
            return false;
        }
        if matches!(self.rule, RuleId::ImpIR | RuleId::ForallIR) {
            return true;
        }
        if self.rule.principal_side() != Some(side) {
            return false;
        }
        let Some(p) = self.meta.formula.as_ref().or(check::resolve(self).ok().and_then(|r| r.formula).as_ref()).cloned()
        else {
            return false;
        };
        let key = p.alpha_key();
        (0..m.len()).find(|&i| *m.key_at(i) == key) == Some(index)
    }

    /// Fills in principal formulas, eigenvariables, witnesses and splits
    /// wherever the checker can infer them.
    pub fn annotate(&mut self) {
        for p in &mut self.premises {
            p.annotate();
        }
        if let Ok(r) = check::resolve(self) {
            if self.meta.formula.is_none() {
                self.meta.formula = r.formula;
            }
            if self.meta.eigen.is_none() {
                self.meta.eigen = r.eigen;
            }
            if self.meta.witness.is_none() {
                self.meta.witness = r.witness;
            }
            if self.meta.split.is_none() {
                self.meta.split = r.split;
            }
        }
    }
}

/// The six-sequent cut-free derivation of
/// `top ->i forall_c x P(x) => forall_c x (top ->i P(x))`, mixing both
/// implications and both universal quantifiers.
pub fn mixed_example() -> Derivation {
    let p = |v: &str| Formula::atom("P", vec![Term::var(v)]);
    let top = Formula::top();
    let fc = Formula::forall_c("x", p("x"));
    let right = Derivation::forall_l(Derivation::id(p("z")), fc.clone(), Term::var("z"));
    let il = Derivation::imp_l(Derivation::id(top.clone()), right, Formula::imp_i(top.clone(), fc));
    let ir = Derivation::imp_i_r(il, Formula::imp_i(top.clone(), p("z")));
    Derivation::forall_r(ir, Formula::forall_c("x", Formula::imp_i(top, p("x"))), "z")
}

/// A cut-free derivation of `a ⇒ a` whose axioms are atomic or `bot ⇒`.
pub fn eta_expand(a: &Formula) -> Derivation {
    eta(a, &mut a.free_vars())
}

fn eta(a: &Formula, avoid: &mut BTreeSet<String>) -> Derivation {
    let ante_succ = |d: Derivation, x: &Formula| restructure(d, &Sequent::new(vec![x.clone()], vec![x.clone()])).expect("contractions only");
    match a {
        Formula::Atom(..) => Derivation::id(a.clone()),
        Formula::Bottom => Derivation::weak_r(Derivation::bottom(), Formula::Bottom),
        Formula::Bin(op, l, r) => {
            let (el, er) = (eta(l, avoid), eta(r, avoid));
            match op {
                BinOp::And => {
                    let dl = Derivation::and_l(el, a.clone(), true);
                    let dr = Derivation::and_l(er, a.clone(), false);
                    ante_succ(Derivation::and_r(dl, dr, a.clone()), a)
                }
                BinOp::Or => {
                    let dl = Derivation::or_r(el, a.clone(), true);
                    let dr = Derivation::or_r(er, a.clone(), false);
                    Derivation::or_l(dl, dr, a.clone())
                }
                BinOp::ImpI => Derivation::imp_i_r(Derivation::imp_l(el, er, a.clone()), a.clone()),
                BinOp::ImpC => Derivation::imp_c_r(Derivation::imp_l(el, er, a.clone()), a.clone()),
            }
        }
        Formula::Quant(q, x, body) => {
            let z = fresh_var(avoid);
            avoid.insert(z.clone());
            let inst = body.subst(x, &Term::var(z.clone()));
            let e = eta(&inst, avoid);
            match q {
                Quant::Exists => Derivation::exists_l(Derivation::exists_r(e, a.clone(), Term::var(z.clone())), a.clone(), &z),
                _ => Derivation::forall_r(Derivation::forall_l(e, a.clone(), Term::var(z.clone())), a.clone(), &z),
            }
        }
    }
}

/// Extends `d` to a derivation of `target` using contractions and weakenings.
/// Fails when `target` would need fewer than one copy of a formula `d` uses.
pub fn restructure(d: Derivation, target: &Sequent) -> Result<Derivation, StructuralError> {
    let mut d = d;
    for side in [Side::Ante, Side::Succ] {
        let (have, want) = match side {
            Side::Ante => (d.conclusion.ante.clone(), &target.ante),
            Side::Succ => (d.conclusion.succ.clone(), &target.succ),
        };
        for f in have.distinct() {
            let (h, w) = (have.count(&f), want.count(&f));
            if w == 0 {
                return Err(StructuralError::Strengthening(f));
            }
            for _ in w..h {
                d = match side {
                    Side::Ante => Derivation::contr_l(d, f.clone()),
                    Side::Succ => Derivation::contr_r(d, f.clone()),
                };
            }
        }
        for f in want.distinct() {
            let cur = match side {
                Side::Ante => d.conclusion.ante.count(&f),
                Side::Succ => d.conclusion.succ.count(&f),
            };
            for _ in cur..want.count(&f) {
                d = match side {
                    Side::Ante => Derivation::weak_l(d, f.clone()),
                    Side::Succ => Derivation::weak_r(d, f.clone()),
                };
            }
        }
    }
    Ok(d)
}
