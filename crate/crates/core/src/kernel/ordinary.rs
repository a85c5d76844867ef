//! The unrestricted intuitionistic right rules as derived rules over
//! intuitionistic contexts.
//!
//! Non-persistent context formulas (conjunctions, disjunctions, existentials,
//! bottom) are broken up by left rules until only persistent formulas remain.
//! At each such leaf the original context is rebuilt from the pieces, cut
//! against the given premise, and the restricted rule applies.

use super::{match_instance, restructure, Derivation};
use crate::sequent::{Multiset, Sequent};
use crate::syntax::{fresh_var, BinOp, Formula, Quant, Term};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum DeriveError {
    #[error("context formula {0} is not intuitionistic")]
    NotIntuitionistic(Formula),
    #[error("goal {0} is neither an intuitionistic implication nor an intuitionistic universal")]
    Goal(Formula),
    #[error("premise derivation should conclude {expected}, found {found}")]
    Premise { expected: String, found: String },
    #[error("eigenvariable {0} occurs free in the context or goal")]
    Eigen(String),
}

enum Goal {
    Imp(Formula),
    Forall { z: Option<String> },
}

struct Builder<'a> {
    context: &'a [Formula],
    goal: &'a Formula,
    kind: Goal,
    premise: &'a Derivation,
    avoid: BTreeSet<String>,
}

/// Derives `context ⇒ goal` from `premise`, which concludes `A, context ⇒ B`
/// for `goal = A ->i B`, or `context ⇒ A[z/x]` for `goal = forall_i x A`.
pub fn derive_ordinary_right(context: &[Formula], goal: &Formula, premise: Derivation) -> Result<Derivation, DeriveError> {
    if let Some(f) = context.iter().find(|f| !f.fragment().is_intuitionistic()) {
        return Err(DeriveError::NotIntuitionistic(f.clone()));
    }
    let ctx = Multiset::from_vec(context.to_vec());
    let kind = match goal {
        Formula::Bin(BinOp::ImpI, a, b) => {
            let expected = Sequent::from_sides(ctx.clone().with((**a).clone()), Multiset::from_vec(vec![(**b).clone()]));
            if premise.conclusion != expected {
                return Err(DeriveError::Premise { expected: expected.to_string(), found: premise.conclusion.to_string() });
            }
            Goal::Imp((**a).clone())
        }
        Formula::Quant(Quant::ForallI, x, body) => {
            let found = &premise.conclusion;
            let inst = (found.ante == ctx && found.succ.len() == 1)
                .then(|| match_instance(body, x, &found.succ.as_slice()[0]))
                .flatten();
            let z = match inst {
                Some(Some(Term::Var(z))) => Some(z),
                Some(None) => None,
                _ => {
                    return Err(DeriveError::Premise {
                        expected: format!("{} => an instance of {goal}", ctx.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(", ")),
                        found: found.to_string(),
                    })
                }
            };
            if let Some(z) = &z {
                if goal.has_free(z) || context.iter().any(|f| f.has_free(z)) {
                    return Err(DeriveError::Eigen(z.clone()));
                }
            }
            Goal::Forall { z }
        }
        _ => return Err(DeriveError::Goal(goal.clone())),
    };
    let mut avoid = premise.all_vars();
    for f in context.iter().chain(std::iter::once(goal)) {
        f.all_vars(&mut avoid);
    }
    let mut b = Builder { context, goal, kind, premise: &premise, avoid };
    if context.iter().all(Formula::is_persistent) {
        return Ok(b.apply_rule(premise.clone()));
    }
    Ok(b.build(Vec::new(), context.to_vec()))
}

impl Builder<'_> {
    fn apply_rule(&self, d: Derivation) -> Derivation {
        match &self.kind {
            Goal::Imp(_) => Derivation::imp_i_r(d, self.goal.clone()),
            Goal::Forall { z } => {
                let z = z.clone().unwrap_or_else(|| fresh_var(&self.avoid));
                Derivation::forall_r(d, self.goal.clone(), &z)
            }
        }
    }

    /// Derivation of `done, todo ⇒ goal`.
    fn build(&mut self, done: Vec<Formula>, todo: Vec<Formula>) -> Derivation {
        let Some((g, rest)) = todo.split_first() else {
            return self.leaf(done);
        };
        let with = |front: Vec<Formula>| front.into_iter().chain(rest.iter().cloned()).collect::<Vec<_>>();
        match g {
            f if f.is_persistent() => {
                let mut done = done;
                done.push(f.clone());
                self.build(done, rest.to_vec())
            }
            Formula::Bottom => {
                let target = Sequent::new(
                    std::iter::once(Formula::Bottom).chain(done.iter().cloned()).chain(rest.iter().cloned()).collect(),
                    vec![self.goal.clone()],
                );
                restructure(Derivation::bottom(), &target).expect("only weakenings needed")
            }
            Formula::Bin(BinOp::And, a, b) => {
                let d = self.build(done, with(vec![(**a).clone(), (**b).clone()]));
                let d = Derivation::and_l(d, g.clone(), true);
                let d = Derivation::and_l(d, g.clone(), false);
                Derivation::contr_l(d, g.clone())
            }
            Formula::Bin(BinOp::Or, a, b) => {
                let l = self.build(done.clone(), with(vec![(**a).clone()]));
                let r = self.build(done, with(vec![(**b).clone()]));
                Derivation::or_l(l, r, g.clone())
            }
            Formula::Quant(Quant::Exists, x, body) => {
                let y = fresh_var(&self.avoid);
                self.avoid.insert(y.clone());
                let d = self.build(done, with(vec![body.subst(x, &Term::var(y.clone()))]));
                Derivation::exists_l(d, g.clone(), &y)
            }
            other => unreachable!("{other} is persistent or not intuitionistic"),
        }
    }

    /// `theta ⇒ goal` for a fully decomposed context `theta`.
    fn leaf(&self, theta: Vec<Formula>) -> Derivation {
        let th = Multiset::from_vec(theta.clone());
        let mut d = self.premise.clone();
        for g in self.context {
            let r = recompose(&th, g).expect("the leaf holds the pieces of every context formula");
            let r = restructure(r, &Sequent::from_sides(th.clone(), Multiset::from_vec(vec![g.clone()]))).expect("weakening only");
            d = Derivation::cut(r, d, g.clone());
        }
        let mut ante = th.clone();
        if let Goal::Imp(a) = &self.kind {
            ante.push(a.clone());
        }
        let target = Sequent::from_sides(ante, d.conclusion.succ.clone());
        let d = restructure(d, &target).expect("contractions only");
        self.apply_rule(d)
    }
}

/// Some `Θ' ⇒ g` with `Θ'` drawn from `theta`.
fn recompose(theta: &Multiset, g: &Formula) -> Option<Derivation> {
    if theta.contains(g) {
        return Some(Derivation::id(g.clone()));
    }
    match g {
        Formula::Bin(BinOp::And, a, b) => {
            let l = recompose(theta, a)?;
            let r = recompose(theta, b)?;
            let both = Sequent::from_sides(l.conclusion.ante.union(&r.conclusion.ante), Multiset::new());
            let l = restructure(l, &Sequent::from_sides(both.ante.clone(), Multiset::from_vec(vec![(**a).clone()]))).ok()?;
            let r = restructure(r, &Sequent::from_sides(both.ante.clone(), Multiset::from_vec(vec![(**b).clone()]))).ok()?;
            Some(Derivation::and_r(l, r, g.clone()))
        }
        Formula::Bin(BinOp::Or, a, b) => {
            if let Some(d) = recompose(theta, a) {
                return Some(Derivation::or_r(d, g.clone(), true));
            }
            recompose(theta, b).map(|d| Derivation::or_r(d, g.clone(), false))
        }
        Formula::Quant(Quant::Exists, x, body) => {
            let mut vars = BTreeSet::new();
            for f in theta.iter() {
                vars.extend(f.free_vars());
            }
            vars.into_iter().find_map(|y| {
                let t = Term::var(y);
                recompose(theta, &body.subst(x, &t)).map(|d| Derivation::exists_r(d, g.clone(), t))
            })
        }
        _ => None,
    }
}
