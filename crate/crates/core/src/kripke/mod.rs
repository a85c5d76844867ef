//! Finite Kripke models with growing domains, rigid constants and hereditary
//! predicate extensions, together with the satisfaction relation.
//!
//! Intuitionistic implication and universal quantification range over all
//! successors of the current world; their classical counterparts only look at
//! the current world.

mod search;

pub use search::{countermodel_search, Countermodel, CountermodelBounds, CountermodelError};

use crate::sequent::Sequent;
use crate::syntax::{BinOp, Formula, Quant, Term};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// Variable assignment restricted to the variables that matter.
pub type Assignment = BTreeMap<String, String>;

#[derive(Clone, Debug, PartialEq, Eq)]
struct PredTable {
    arity: usize,
    /// One extension per world, tuples of element indices.
    ext: Vec<BTreeSet<Vec<usize>>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KripkeModel {
    worlds: Vec<String>,
    order: Vec<Vec<bool>>,
    elems: Vec<String>,
    domains: Vec<BTreeSet<usize>>,
    constants: BTreeMap<String, usize>,
    predicates: BTreeMap<String, PredTable>,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("duplicate world `{0}`")]
    DuplicateWorld(String),
    #[error("predicate {pred} has arity {expected}, got a tuple of length {found}")]
    TupleArity { pred: String, expected: usize, found: usize },
}

/// Name, arity, and per-world tuples of element names.
pub type PredicateTable = (String, usize, Vec<Vec<Vec<String>>>);

/// A violated frame or valuation condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoWorlds,
    NotReflexive { world: String },
    NotTransitive { a: String, b: String, c: String },
    EmptyDomain { world: String },
    DomainNotMonotone { from: String, to: String, elem: String },
    EmptyDomainIntersection,
    ConstantNotRigid { constant: String, elem: String },
    TupleOutsideDomain { pred: String, world: String, tuple: Vec<String> },
    PredicateNotHereditary { pred: String, from: String, to: String, tuple: Vec<String> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoWorlds => write!(f, "the model has no worlds"),
            Violation::NotReflexive { world } => write!(f, "order is not reflexive at {world}"),
            Violation::NotTransitive { a, b, c } => {
                write!(f, "order is not transitive: {a} R {b} and {b} R {c} but not {a} R {c}")
            }
            Violation::EmptyDomain { world } => write!(f, "domain of {world} is empty"),
            Violation::DomainNotMonotone { from, to, elem } => {
                write!(f, "{from} R {to} but element {elem} of D({from}) is missing from D({to})")
            }
            Violation::EmptyDomainIntersection => write!(f, "the domains have no common element"),
            Violation::ConstantNotRigid { constant, elem } => {
                write!(f, "constant {constant} denotes {elem}, which is not in every domain")
            }
            Violation::TupleOutsideDomain { pred, world, tuple } => {
                write!(f, "V({pred}, {world}) contains ({}) outside D({world})", tuple.join(", "))
            }
            Violation::PredicateNotHereditary { pred, from, to, tuple } => write!(
                f,
                "heredity for {pred} fails: ({}) in V({pred}, {from}) but not in V({pred}, {to})",
                tuple.join(", ")
            ),
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("constant `{0}` is not interpreted")]
    UnknownConstant(String),
    #[error("unknown domain element `{0}`")]
    UnknownElement(String),
    #[error("element `{elem}` is not in the domain of `{world}`")]
    ElementNotInDomain { elem: String, world: String },
    #[error("free variable `{0}` has no value")]
    FreeVariable(String),
}

/// `from R to`, the formula holds at `from` and fails at `to`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeredityWitness {
    pub from: String,
    pub to: String,
    pub formula: Formula,
}

impl KripkeModel {
    /// A model over the given worlds with an identity order, empty domains and
    /// no interpretation.
    pub fn new<S: AsRef<str>>(worlds: &[S]) -> Result<KripkeModel, ModelError> {
        let mut names: Vec<String> = Vec::new();
        for w in worlds {
            let w = w.as_ref().to_string();
            if names.contains(&w) {
                return Err(ModelError::DuplicateWorld(w));
            }
            names.push(w);
        }
        let n = names.len();
        Ok(KripkeModel {
            worlds: names,
            order: (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect(),
            elems: Vec::new(),
            domains: vec![BTreeSet::new(); n],
            constants: BTreeMap::new(),
            predicates: BTreeMap::new(),
        })
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn elements(&self) -> &[String] {
        &self.elems
    }

    pub fn world_index(&self, w: &str) -> Option<usize> {
        self.worlds.iter().position(|x| x == w)
    }

    fn world(&self, w: &str) -> Result<usize, ModelError> {
        self.world_index(w).ok_or_else(|| ModelError::UnknownWorld(w.to_string()))
    }

    fn elem_index(&mut self, e: &str) -> usize {
        match self.elems.iter().position(|x| x == e) {
            Some(i) => i,
            None => {
                self.elems.push(e.to_string());
                self.elems.len() - 1
            }
        }
    }

    /// Sets the order to exactly the given pairs (no closure).
    pub fn set_order(&mut self, pairs: &[(String, String)]) -> Result<(), ModelError> {
        let n = self.worlds.len();
        let mut order = vec![vec![false; n]; n];
        for (a, b) in pairs {
            order[self.world(a)?][self.world(b)?] = true;
        }
        self.order = order;
        Ok(())
    }

    pub fn add_order(&mut self, from: &str, to: &str) -> Result<(), ModelError> {
        let (a, b) = (self.world(from)?, self.world(to)?);
        self.order[a][b] = true;
        Ok(())
    }

    /// Reflexive-transitive closure of the current order.
    pub fn close_order(&mut self) {
        let n = self.worlds.len();
        for i in 0..n {
            self.order[i][i] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if self.order[i][k] {
                    for j in 0..n {
                        if self.order[k][j] {
                            self.order[i][j] = true;
                        }
                    }
                }
            }
        }
    }

    pub fn set_domain<S: AsRef<str>>(&mut self, world: &str, elems: &[S]) -> Result<(), ModelError> {
        let w = self.world(world)?;
        let idx: BTreeSet<usize> = elems.iter().map(|e| self.elem_index(e.as_ref())).collect();
        self.domains[w] = idx;
        Ok(())
    }

    pub fn set_constant(&mut self, c: &str, elem: &str) {
        let e = self.elem_index(elem);
        self.constants.insert(c.to_string(), e);
    }

    /// Registers a predicate with an empty extension everywhere.
    pub fn declare_predicate(&mut self, pred: &str, arity: usize) {
        let n = self.worlds.len();
        self.predicates
            .entry(pred.to_string())
            .or_insert_with(|| PredTable { arity, ext: vec![BTreeSet::new(); n] });
    }

    pub fn add_fact<S: AsRef<str>>(&mut self, pred: &str, world: &str, tuple: &[S]) -> Result<(), ModelError> {
        let w = self.world(world)?;
        let t: Vec<usize> = tuple.iter().map(|e| self.elem_index(e.as_ref())).collect();
        self.declare_predicate(pred, t.len());
        let table = self.predicates.get_mut(pred).expect("declared");
        if table.arity != t.len() {
            return Err(ModelError::TupleArity { pred: pred.to_string(), expected: table.arity, found: t.len() });
        }
        table.ext[w].insert(t);
        Ok(())
    }

    pub fn related(&self, from: usize, to: usize) -> bool {
        self.order[from][to]
    }

    pub fn order_pairs(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for (i, row) in self.order.iter().enumerate() {
            for (j, &r) in row.iter().enumerate() {
                if r {
                    out.push((self.worlds[i].clone(), self.worlds[j].clone()));
                }
            }
        }
        out
    }

    pub fn domain(&self, w: usize) -> Vec<String> {
        self.domains[w].iter().map(|&e| self.elems[e].clone()).collect()
    }

    pub fn constant_map(&self) -> BTreeMap<String, String> {
        self.constants.iter().map(|(c, &e)| (c.clone(), self.elems[e].clone())).collect()
    }

    /// `(pred, arity, per-world tuples)` for every declared predicate.
    pub fn predicate_tables(&self) -> Vec<PredicateTable> {
        self.predicates
            .iter()
            .map(|(p, t)| {
                let per_world = t
                    .ext
                    .iter()
                    .map(|set| set.iter().map(|tu| tu.iter().map(|&e| self.elems[e].clone()).collect()).collect())
                    .collect();
                (p.clone(), t.arity, per_world)
            })
            .collect()
    }

    fn tuple_names(&self, t: &[usize]) -> Vec<String> {
        t.iter().map(|&e| self.elems[e].clone()).collect()
    }

    /// Checks the frame and valuation conditions; reports every violation.
    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let mut v = Vec::new();
        let n = self.worlds.len();
        let name = |i: usize| self.worlds[i].clone();
        if n == 0 {
            v.push(Violation::NoWorlds);
        }
        for i in 0..n {
            if !self.order[i][i] {
                v.push(Violation::NotReflexive { world: name(i) });
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.order[a][b] && self.order[b][c] && !self.order[a][c] {
                        v.push(Violation::NotTransitive { a: name(a), b: name(b), c: name(c) });
                    }
                }
            }
        }
        for i in 0..n {
            if self.domains[i].is_empty() {
                v.push(Violation::EmptyDomain { world: name(i) });
            }
        }
        for a in 0..n {
            for b in 0..n {
                if a != b && self.order[a][b] {
                    for &e in self.domains[a].difference(&self.domains[b]) {
                        v.push(Violation::DomainNotMonotone { from: name(a), to: name(b), elem: self.elems[e].clone() });
                    }
                }
            }
        }
        let common = self.common_domain();
        if n > 0 && common.is_empty() {
            v.push(Violation::EmptyDomainIntersection);
        }
        for (c, &e) in &self.constants {
            if !common.contains(&e) {
                v.push(Violation::ConstantNotRigid { constant: c.clone(), elem: self.elems[e].clone() });
            }
        }
        for (p, table) in &self.predicates {
            for w in 0..n {
                for t in &table.ext[w] {
                    if t.iter().any(|e| !self.domains[w].contains(e)) {
                        v.push(Violation::TupleOutsideDomain { pred: p.clone(), world: name(w), tuple: self.tuple_names(t) });
                    }
                }
            }
            for a in 0..n {
                for b in 0..n {
                    if a != b && self.order[a][b] {
                        for t in table.ext[a].difference(&table.ext[b]) {
                            v.push(Violation::PredicateNotHereditary {
                                pred: p.clone(),
                                from: name(a),
                                to: name(b),
                                tuple: self.tuple_names(t),
                            });
                        }
                    }
                }
            }
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(v)
        }
    }

    fn common_domain(&self) -> BTreeSet<usize> {
        let mut it = self.domains.iter();
        let first = match it.next() {
            Some(d) => d.clone(),
            None => return BTreeSet::new(),
        };
        it.fold(first, |acc, d| acc.intersection(d).copied().collect())
    }

    fn check_terms(&self, w: usize, f: &Formula, bound: &BTreeSet<String>) -> Result<(), EvalError> {
        let mut res = Ok(());
        f.visit_terms(&mut |t| {
            if res.is_err() {
                return;
            }
            res = match t {
                Term::Const(c) if !self.constants.contains_key(c) => Err(EvalError::UnknownConstant(c.clone())),
                Term::Elem(e) => match self.elems.iter().position(|x| x == e) {
                    None => Err(EvalError::UnknownElement(e.clone())),
                    Some(i) if !self.domains[w].contains(&i) => {
                        Err(EvalError::ElementNotInDomain { elem: e.clone(), world: self.worlds[w].clone() })
                    }
                    Some(_) => Ok(()),
                },
                _ => Ok(()),
            };
        });
        res?;
        if let Some(x) = f.free_vars().into_iter().find(|x| !bound.contains(x)) {
            return Err(EvalError::FreeVariable(x));
        }
        Ok(())
    }

    /// `w |= f` for a closed formula whose element names lie in `D(w)`.
    pub fn eval(&self, world: &str, f: &Formula) -> Result<bool, EvalError> {
        let w = self.world_index(world).ok_or_else(|| EvalError::UnknownWorld(world.to_string()))?;
        self.eval_at(w, f)
    }

    pub fn eval_at(&self, w: usize, f: &Formula) -> Result<bool, EvalError> {
        self.check_terms(w, f, &BTreeSet::new())?;
        Ok(self.sat(w, f, &mut Vec::new()))
    }

    /// Truth of `f` at `world` after replacing each free variable by the name
    /// of its assigned element.
    pub fn holds_under(&self, world: &str, d: &Assignment, f: &Formula) -> Result<bool, EvalError> {
        let w = self.world_index(world).ok_or_else(|| EvalError::UnknownWorld(world.to_string()))?;
        let mut g = f.clone();
        for x in f.free_vars() {
            let e = d.get(&x).ok_or_else(|| EvalError::FreeVariable(x.clone()))?;
            g = g.subst(&x, &Term::Elem(e.clone()));
        }
        self.eval_at(w, &g)
    }

    fn term_value(&self, t: &Term, env: &[(String, usize)]) -> usize {
        match t {
            Term::Var(v) => env.iter().rev().find(|(n, _)| n == v).map(|(_, e)| *e).expect("checked: no free variables"),
            Term::Const(c) => self.constants[c],
            Term::Elem(e) => self.elems.iter().position(|x| x == e).expect("checked: known element"),
        }
    }

    fn sat(&self, w: usize, f: &Formula, env: &mut Vec<(String, usize)>) -> bool {
        match f {
            Formula::Atom(p, args) => {
                let tuple: Vec<usize> = args.iter().map(|t| self.term_value(t, env)).collect();
                self.predicates.get(p).is_some_and(|t| t.ext[w].contains(&tuple))
            }
            Formula::Bottom => false,
            Formula::Bin(BinOp::And, l, r) => self.sat(w, l, env) && self.sat(w, r, env),
            Formula::Bin(BinOp::Or, l, r) => self.sat(w, l, env) || self.sat(w, r, env),
            Formula::Bin(BinOp::ImpC, l, r) => !self.sat(w, l, env) || self.sat(w, r, env),
            Formula::Bin(BinOp::ImpI, l, r) => (0..self.worlds.len())
                .filter(|&v| self.order[w][v])
                .all(|v| !self.sat(v, l, env) || self.sat(v, r, env)),
            Formula::Quant(Quant::ForallI, x, body) => (0..self.worlds.len())
                .filter(|&v| self.order[w][v])
                .all(|v| self.domains[v].iter().all(|&d| self.sat_with(v, x, d, body, env))),
            Formula::Quant(Quant::ForallC, x, body) => {
                self.domains[w].iter().all(|&d| self.sat_with(w, x, d, body, env))
            }
            Formula::Quant(Quant::Exists, x, body) => {
                self.domains[w].iter().any(|&d| self.sat_with(w, x, d, body, env))
            }
        }
    }

    fn sat_with(&self, w: usize, x: &str, d: usize, f: &Formula, env: &mut Vec<(String, usize)>) -> bool {
        env.push((x.to_string(), d));
        let r = self.sat(w, f, env);
        env.pop();
        r
    }

    /// `Ok(None)` when the closed formula is hereditary in this model.
    pub fn check_heredity(&self, f: &Formula) -> Result<Option<HeredityWitness>, EvalError> {
        let n = self.worlds.len();
        for w in 0..n {
            self.check_terms(w, f, &BTreeSet::new())?;
        }
        for w in 0..n {
            if !self.sat(w, f, &mut Vec::new()) {
                continue;
            }
            for v in 0..n {
                if self.order[w][v] && !self.sat(v, f, &mut Vec::new()) {
                    return Ok(Some(HeredityWitness {
                        from: self.worlds[w].clone(),
                        to: self.worlds[v].clone(),
                        formula: f.clone(),
                    }));
                }
            }
        }
        Ok(None)
    }

    /// First `(world, assignment)` at which every antecedent holds and every
    /// succedent fails, scanning worlds in order.
    pub fn sequent_counterexample(&self, s: &Sequent) -> Result<Option<(String, Assignment)>, EvalError> {
        for w in 0..self.worlds.len() {
            if let Some(d) = self.counterexample_at(w, s)? {
                return Ok(Some((self.worlds[w].clone(), d)));
            }
        }
        Ok(None)
    }

    pub(crate) fn counterexample_at(&self, w: usize, s: &Sequent) -> Result<Option<Assignment>, EvalError> {
        let fv: Vec<String> = s.free_vars().into_iter().collect();
        let bound: BTreeSet<String> = fv.iter().cloned().collect();
        for f in s.formulas() {
            self.check_terms(w, f, &bound)?;
        }
        let dom: Vec<usize> = self.domains[w].iter().copied().collect();
        if dom.is_empty() && !fv.is_empty() {
            return Ok(None);
        }
        let mut idx = vec![0usize; fv.len()];
        loop {
            let mut env: Vec<(String, usize)> = fv.iter().cloned().zip(idx.iter().map(|&i| dom[i])).collect();
            let refutes = s.ante.iter().all(|f| self.sat(w, f, &mut env))
                && s.succ.iter().all(|f| !self.sat(w, f, &mut env));
            if refutes {
                return Ok(Some(env.into_iter().map(|(x, e)| (x, self.elems[e].clone())).collect()));
            }
            // odometer over D(w)^|fv|
            let mut k = 0;
            loop {
                if k == idx.len() {
                    return Ok(None);
                }
                idx[k] += 1;
                if idx[k] < dom.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    /// The sequent holds at every world under every assignment of its free variables.
    pub fn sequent_holds(&self, s: &Sequent) -> Result<bool, EvalError> {
        Ok(self.sequent_counterexample(s)?.is_none())
    }

    /// Brute-force isomorphism test on worlds and elements.
    pub fn is_isomorphic(&self, other: &KripkeModel) -> bool {
        if self.worlds.len() != other.worlds.len() || self.elems.len() != other.elems.len() {
            return false;
        }
        if self.constants.keys().ne(other.constants.keys()) || self.predicates.keys().ne(other.predicates.keys()) {
            return false;
        }
        let wperms = permutations(self.worlds.len());
        let eperms = permutations(self.elems.len());
        wperms.iter().any(|wp| {
            let frame_ok = (0..self.worlds.len())
                .all(|i| (0..self.worlds.len()).all(|j| self.order[i][j] == other.order[wp[i]][wp[j]]));
            frame_ok
                && eperms.iter().any(|ep| {
                    let map_set = |s: &BTreeSet<usize>| s.iter().map(|&e| ep[e]).collect::<BTreeSet<_>>();
                    (0..self.worlds.len()).all(|i| map_set(&self.domains[i]) == other.domains[wp[i]])
                        && self.constants.iter().all(|(c, &e)| other.constants[c] == ep[e])
                        && self.predicates.iter().all(|(p, t)| {
                            let o = &other.predicates[p];
                            o.arity == t.arity
                                && (0..self.worlds.len()).all(|i| {
                                    let mapped: BTreeSet<Vec<usize>> =
                                        t.ext[i].iter().map(|tu| tu.iter().map(|&e| ep[e]).collect()).collect();
                                    mapped == o.ext[wp[i]]
                                })
                        })
                })
        })
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Two worlds `w R v`, one element `d` denoting `c`, `P` false at `w` and true at `v`.
pub fn two_world_countermodel() -> KripkeModel {
    let mut m = KripkeModel::new(&["w", "v"]).expect("distinct worlds");
    m.add_order("w", "v").expect("known worlds");
    m.close_order();
    m.set_domain("w", &["d"]).expect("known world");
    m.set_domain("v", &["d"]).expect("known world");
    m.set_constant("c", "d");
    m.declare_predicate("P", 1);
    m.add_fact("P", "v", &["d"]).expect("arity 1");
    m
}
