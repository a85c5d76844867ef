//! Bounded backward proof search in the cut-free calculus.
//!
//! Sequents are searched as sets: duplicate formulas and bottom in the
//! succedent are dropped first and restored afterwards by weakening. Rules
//! are tried in a fixed order:
//!
//! 1. axioms;
//! 2. invertible one-premise rules (`/\` left, `\/` right, `->c` right,
//!    `forall_c` right, `exists` left), committed to without backtracking;
//! 3. invertible branching rules (`\/` left, `/\` right, `->c` left);
//! 4. the right rules for `->i` and `forall_i`, then `->i` left;
//! 5. the quantifier rules that need a witness term.
//!
//! Rules in the last two groups keep their principal formula, and each
//! formula may serve as such a principal at most `max_multiplicity` times on
//! a branch.

use crate::kernel::{check_derivation_in, restructure, Calculus, Derivation};
use crate::kripke::{countermodel_search, Countermodel, CountermodelBounds};
use crate::sequent::{Multiset, Sequent};
use crate::syntax::{fresh_var, BinOp, Formula, Quant, Term};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_depth: usize,
    pub max_multiplicity: usize,
    /// Fresh constants available as witnesses.
    pub term_universe_extra: usize,
    /// Bounds for the countermodel attempt after a failed search.
    pub countermodel: Option<CountermodelBounds>,
    /// Hard cap on search nodes.
    pub max_steps: usize,
}

impl Default for SearchLimits {
    fn default() -> SearchLimits {
        SearchLimits {
            max_depth: 12,
            max_multiplicity: 2,
            term_universe_extra: 1,
            countermodel: Some(CountermodelBounds::default()),
            max_steps: 200_000,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub steps: usize,
    /// Some branch ran out of depth.
    pub depth_hit: bool,
    /// Some rule was skipped because its principal formula was used up.
    pub multiplicity_hit: bool,
    pub step_limit_hit: bool,
}

impl SearchStats {
    /// The search was cut short by depth or by the step cap.
    pub fn limits_hit(&self) -> bool {
        self.depth_hit || self.step_limit_hit
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchResult {
    Proved(Derivation),
    NotProvedWithinLimits(SearchStats),
    Refuted(Countermodel, SearchStats),
}

impl SearchResult {
    pub fn is_proved(&self) -> bool {
        matches!(self, SearchResult::Proved(_))
    }

    pub fn derivation(&self) -> Option<&Derivation> {
        match self {
            SearchResult::Proved(d) => Some(d),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("{0} is not an intuitionistic formula")]
    NotIntuitionistic(Formula),
    #[error("{0} is not a classical formula")]
    NotClassical(Formula),
}

pub fn prove(s: &Sequent, lim: &SearchLimits) -> SearchResult {
    prove_in(Calculus::Full, s, lim)
}

/// Search in the intuitionistic calculus; the input must be intuitionistic.
pub fn prove_mlj(s: &Sequent, lim: &SearchLimits) -> Result<SearchResult, SearchError> {
    if let Some(f) = s.formulas().find(|f| !f.fragment().is_intuitionistic()) {
        return Err(SearchError::NotIntuitionistic(f.clone()));
    }
    Ok(prove_in(Calculus::Mlj, s, lim))
}

/// Search in classical LK; the input must be classical.
pub fn prove_lk(s: &Sequent, lim: &SearchLimits) -> Result<SearchResult, SearchError> {
    if let Some(f) = s.formulas().find(|f| !f.fragment().is_classical()) {
        return Err(SearchError::NotClassical(f.clone()));
    }
    Ok(prove_in(Calculus::Lk, s, lim))
}

pub fn prove_in(calc: Calculus, s: &Sequent, lim: &SearchLimits) -> SearchResult {
    let constants = s.constants();
    let mut fresh = Vec::new();
    let mut i = 1;
    while fresh.len() < lim.term_universe_extra {
        let k = format!("k{i}");
        if !constants.contains(&k) {
            fresh.push(Term::constant(k));
        }
        i += 1;
    }
    let mut engine = Engine { calc, lim: *lim, fresh, failures: HashMap::new(), stats: SearchStats::default() };
    let found = engine.prove_seq(s, lim.max_depth, &Uses::new());
    let stats = engine.stats;
    if let Some(d) = found {
        debug_assert!(check_derivation_in(&d, calc).is_ok(), "search built an invalid derivation");
        return SearchResult::Proved(d);
    }
    if let Some(bounds) = lim.countermodel {
        if let Ok(Some(cm)) = countermodel_search(s, bounds) {
            if verify_countermodel(s, &cm) {
                return SearchResult::Refuted(cm, stats);
            }
        }
    }
    SearchResult::NotProvedWithinLimits(stats)
}

/// Re-evaluates a countermodel: valid model, antecedents true, succedents false.
pub fn verify_countermodel(s: &Sequent, cm: &Countermodel) -> bool {
    cm.model.validate().is_ok()
        && s.ante.iter().all(|f| cm.model.holds_under(&cm.world, &cm.assignment, f) == Ok(true))
        && s.succ.iter().all(|f| cm.model.holds_under(&cm.world, &cm.assignment, f) == Ok(false))
}

/// Uses of kept principal formulas on the current branch, by alpha-key.
type Uses = BTreeMap<Formula, usize>;

type Key = (Vec<(Formula, usize)>, Vec<(Formula, usize)>, Vec<(Formula, usize)>);

struct Engine {
    calc: Calculus,
    lim: SearchLimits,
    fresh: Vec<Term>,
    /// Largest depth at which each state is known to fail.
    failures: HashMap<Key, usize>,
    stats: SearchStats,
}

fn set_form(s: &Sequent) -> Sequent {
    let ante = Multiset::from_vec(s.ante.distinct());
    let succ = Multiset::from_vec(s.succ.distinct().into_iter().filter(|f| *f != Formula::Bottom).collect());
    Sequent::from_sides(ante, succ)
}

fn bin(f: &Formula) -> (&Formula, &Formula) {
    match f {
        Formula::Bin(_, l, r) => (l, r),
        _ => unreachable!(),
    }
}

fn quant(f: &Formula) -> (&str, &Formula) {
    match f {
        Formula::Quant(_, x, b) => (x, b),
        _ => unreachable!(),
    }
}

enum Step {
    One(Sequent, Box<dyn Fn(Derivation) -> Derivation>),
    Two(Sequent, Sequent, Box<dyn Fn(Derivation, Derivation) -> Derivation>),
}

impl Engine {
    fn prove_seq(&mut self, s: &Sequent, depth: usize, uses: &Uses) -> Option<Derivation> {
        let set = set_form(s);
        let d = self.prove_set(&set, depth, uses)?;
        Some(restructure(d, s).expect("the set form only drops copies"))
    }

    fn fresh_eigen(&self, s: &Sequent) -> String {
        fresh_var(&s.all_vars())
    }

    fn prove_set(&mut self, s: &Sequent, depth: usize, uses: &Uses) -> Option<Derivation> {
        self.stats.steps += 1;
        if self.stats.steps > self.lim.max_steps {
            self.stats.step_limit_hit = true;
            return None;
        }
        if s.ante.contains(&Formula::Bottom) {
            return Some(restructure(Derivation::bottom(), s).expect("weakening only"));
        }
        if let Some(a) = s.ante.iter().find(|a| s.succ.contains(a)) {
            return Some(restructure(Derivation::id(a.clone()), s).expect("weakening only"));
        }
        if depth == 0 {
            self.stats.depth_hit = true;
            return None;
        }
        let key: Key = (s.ante.canonical(), s.succ.canonical(), uses.iter().map(|(k, v)| (k.clone(), *v)).collect());
        if self.failures.get(&key).is_some_and(|&d| d >= depth) {
            return None;
        }
        let result = self.expand(s, depth, uses);
        if result.is_none() && !self.stats.step_limit_hit {
            let e = self.failures.entry(key).or_insert(0);
            *e = (*e).max(depth);
        }
        result
    }

    fn run(&mut self, step: Step, depth: usize, uses: &Uses) -> Option<Derivation> {
        match step {
            Step::One(p, build) => self.prove_seq(&p, depth - 1, uses).map(build),
            Step::Two(p, q, build) => {
                let l = self.prove_seq(&p, depth - 1, uses)?;
                let r = self.prove_seq(&q, depth - 1, uses)?;
                Some(build(l, r))
            }
        }
    }

    fn expand(&mut self, s: &Sequent, depth: usize, uses: &Uses) -> Option<Derivation> {
        if let Some(step) = self.invertible_one(s) {
            return self.run(step, depth, uses).map(|d| restructure(d, s).expect("exact premises"));
        }
        if let Some(step) = self.invertible_two(s) {
            return self.run(step, depth, uses).map(|d| restructure(d, s).expect("exact premises"));
        }
        for (step, principal) in self.non_invertible(s, uses) {
            let mut u = uses.clone();
            if let Some(p) = principal {
                *u.entry(p.alpha_key()).or_insert(0) += 1;
            }
            if let Some(d) = self.run(step, depth, &u) {
                return Some(restructure(d, s).expect("premises cover the sequent"));
            }
            if self.stats.step_limit_hit {
                return None;
            }
        }
        None
    }

    fn invertible_one(&self, s: &Sequent) -> Option<Step> {
        for f in s.ante.iter() {
            let rest = s.ante.without(f).expect("member");
            match f {
                Formula::Bin(BinOp::And, a, b) => {
                    let p = Sequent::from_sides(rest.with((**a).clone()).with((**b).clone()), s.succ.clone());
                    let f = f.clone();
                    return Some(Step::One(
                        p,
                        Box::new(move |d| {
                            let d = Derivation::and_l(d, f.clone(), true);
                            let d = Derivation::and_l(d, f.clone(), false);
                            Derivation::contr_l(d, f.clone())
                        }),
                    ));
                }
                Formula::Quant(Quant::Exists, x, body) => {
                    let z = self.fresh_eigen(s);
                    let p = Sequent::from_sides(rest.with(body.subst(x, &Term::var(z.clone()))), s.succ.clone());
                    let f = f.clone();
                    return Some(Step::One(p, Box::new(move |d| Derivation::exists_l(d, f.clone(), &z))));
                }
                _ => {}
            }
        }
        let classical = self.calc != Calculus::Mlj;
        for f in s.succ.iter() {
            let rest = s.succ.without(f).expect("member");
            match f {
                Formula::Bin(BinOp::Or, a, b) => {
                    let p = Sequent::from_sides(s.ante.clone(), rest.with((**a).clone()).with((**b).clone()));
                    let f = f.clone();
                    return Some(Step::One(
                        p,
                        Box::new(move |d| {
                            let d = Derivation::or_r(d, f.clone(), true);
                            let d = Derivation::or_r(d, f.clone(), false);
                            Derivation::contr_r(d, f.clone())
                        }),
                    ));
                }
                Formula::Bin(BinOp::ImpC, a, b) if classical => {
                    let p = Sequent::from_sides(s.ante.clone().with((**a).clone()), rest.with((**b).clone()));
                    let f = f.clone();
                    return Some(Step::One(p, Box::new(move |d| Derivation::imp_c_r(d, f.clone()))));
                }
                Formula::Quant(Quant::ForallC, x, body) if classical => {
                    let z = self.fresh_eigen(s);
                    let p = Sequent::from_sides(s.ante.clone(), rest.with(body.subst(x, &Term::var(z.clone()))));
                    let f = f.clone();
                    return Some(Step::One(p, Box::new(move |d| Derivation::forall_r(d, f.clone(), &z))));
                }
                _ => {}
            }
        }
        None
    }

    fn invertible_two(&self, s: &Sequent) -> Option<Step> {
        let classical = self.calc != Calculus::Mlj;
        for f in s.ante.iter() {
            let rest = s.ante.without(f).expect("member");
            match f {
                Formula::Bin(BinOp::Or, a, b) => {
                    let p = Sequent::from_sides(rest.clone().with((**a).clone()), s.succ.clone());
                    let q = Sequent::from_sides(rest.with((**b).clone()), s.succ.clone());
                    let f = f.clone();
                    return Some(Step::Two(p, q, Box::new(move |l, r| Derivation::or_l(l, r, f.clone()))));
                }
                Formula::Bin(BinOp::ImpC, a, b) if classical => {
                    let p = Sequent::from_sides(rest.clone(), s.succ.clone().with((**a).clone()));
                    let q = Sequent::from_sides(rest.with((**b).clone()), s.succ.clone());
                    let f = f.clone();
                    return Some(Step::Two(p, q, Box::new(move |l, r| Derivation::imp_l(l, r, f.clone()))));
                }
                _ => {}
            }
        }
        for f in s.succ.iter() {
            if let Formula::Bin(BinOp::And, a, b) = f {
                let rest = s.succ.without(f).expect("member");
                let p = Sequent::from_sides(s.ante.clone(), rest.clone().with((**a).clone()));
                let q = Sequent::from_sides(s.ante.clone(), rest.with((**b).clone()));
                let f = f.clone();
                return Some(Step::Two(p, q, Box::new(move |l, r| Derivation::and_r(l, r, f.clone()))));
            }
        }
        None
    }

    /// Terms in occurrence order, then the fresh constants.
    fn terms(&self, s: &Sequent) -> Vec<Term> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for f in s.formulas() {
            f.visit_terms(&mut |t| {
                if !matches!(t, Term::Var(v) if !f.has_free(v)) && seen.insert(t.clone()) {
                    out.push(t.clone());
                }
            });
        }
        for t in &self.fresh {
            if seen.insert(t.clone()) {
                out.push(t.clone());
            }
        }
        out
    }

    fn used_up(&mut self, f: &Formula, uses: &Uses) -> bool {
        let n = uses.get(&f.alpha_key()).copied().unwrap_or(0);
        if n >= self.lim.max_multiplicity {
            self.stats.multiplicity_hit = true;
            true
        } else {
            false
        }
    }

    fn non_invertible(&mut self, s: &Sequent, uses: &Uses) -> Vec<(Step, Option<Formula>)> {
        let mut out = Vec::new();
        let intuitionistic = self.calc != Calculus::Lk;
        let classical = self.calc != Calculus::Mlj;
        if intuitionistic {
            let theta: Multiset = match self.calc {
                Calculus::Mlj => s.ante.clone(),
                _ => s.ante.iter().filter(|f| f.is_persistent()).cloned().collect(),
            };
            for f in s.succ.iter() {
                match f {
                    Formula::Bin(BinOp::ImpI, a, b) => {
                        let p = Sequent::from_sides(theta.clone().with((**a).clone()), Multiset::from_vec(vec![(**b).clone()]));
                        let f = f.clone();
                        out.push((Step::One(p, Box::new(move |d| Derivation::imp_i_r(d, f.clone()))), None));
                    }
                    Formula::Quant(Quant::ForallI, x, body) => {
                        let z = self.fresh_eigen(s);
                        let p = Sequent::from_sides(theta.clone(), Multiset::from_vec(vec![body.subst(x, &Term::var(z.clone()))]));
                        let f = f.clone();
                        out.push((Step::One(p, Box::new(move |d| Derivation::forall_r(d, f.clone(), &z))), None));
                    }
                    _ => {}
                }
            }
            for f in s.ante.iter() {
                if let Formula::Bin(BinOp::ImpI, a, b) = f {
                    // a premise equal to the conclusion makes no progress
                    if **a == Formula::Bottom || s.succ.contains(a) || s.ante.contains(b) || self.used_up(f, uses) {
                        continue;
                    }
                    let rest = s.ante.without(f).expect("member");
                    let p = Sequent::from_sides(s.ante.clone(), s.succ.clone().with((**a).clone()));
                    let q = Sequent::from_sides(rest.with(f.clone()).with((**b).clone()), s.succ.clone());
                    let g = f.clone();
                    out.push((Step::Two(p, q, Box::new(move |l, r| Derivation::imp_l(l, r, g.clone()))), Some(f.clone())));
                }
            }
        }
        let terms = self.terms(s);
        let ante: Vec<Formula> = s.ante.iter().cloned().collect();
        for f in &ante {
            let ok = match f {
                Formula::Quant(Quant::ForallI, ..) => intuitionistic,
                Formula::Quant(Quant::ForallC, ..) => classical,
                _ => false,
            };
            if !ok {
                continue;
            }
            let (x, body) = quant(f);
            for t in &terms {
                let inst = body.subst(x, t);
                if s.ante.contains(&inst) {
                    continue;
                }
                if self.used_up(f, uses) {
                    break;
                }
                let p = Sequent::from_sides(s.ante.clone().with(inst), s.succ.clone());
                let (g, t) = (f.clone(), t.clone());
                out.push((Step::One(p, Box::new(move |d| Derivation::forall_l(d, g.clone(), t.clone()))), Some(f.clone())));
            }
        }
        let succ: Vec<Formula> = s.succ.iter().cloned().collect();
        for f in &succ {
            if let Formula::Quant(Quant::Exists, x, body) = f {
                for t in &terms {
                    let inst = body.subst(x, t);
                    if s.succ.contains(&inst) {
                        continue;
                    }
                    if self.used_up(f, uses) {
                        break;
                    }
                    let p = Sequent::from_sides(s.ante.clone(), s.succ.clone().with(inst));
                    let (g, t) = (f.clone(), t.clone());
                    out.push((Step::One(p, Box::new(move |d| Derivation::exists_r(d, g.clone(), t.clone()))), Some(f.clone())));
                }
            }
        }
        let _ = bin;
        out
    }
}
