//! Exhaustive countermodel search over small rooted models.
//!
//! Worlds are `w0 .. w(n-1)` with `w0` the root; the order is generated by
//! edges `wi R wj` with `i < j`, so every frame is a partial order. Worlds
//! related in both directions would need identical domains and extensions,
//! so nothing is lost. Domains grow along the order, every element occurs in
//! some domain, constants denote elements of the root domain, and predicate
//! tables are built monotone world by world.

use super::{Assignment, KripkeModel};
use crate::sequent::Sequent;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CountermodelBounds {
    pub max_worlds: usize,
    pub max_elems: usize,
    /// Upper bound on complete candidate models examined.
    pub max_candidates: u64,
}

impl CountermodelBounds {
    pub fn new(max_worlds: usize, max_elems: usize) -> CountermodelBounds {
        CountermodelBounds { max_worlds, max_elems, ..CountermodelBounds::default() }
    }
}

impl Default for CountermodelBounds {
    fn default() -> CountermodelBounds {
        CountermodelBounds { max_worlds: 3, max_elems: 2, max_candidates: 2_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Countermodel {
    pub model: KripkeModel,
    pub world: String,
    pub assignment: Assignment,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum CountermodelError {
    #[error("bounds must be at least one world and one element")]
    InvalidBounds,
    #[error("gave up after examining {examined} candidate models")]
    ResourceLimit { examined: u64 },
    #[error("predicate {pred} has too many tuples over {elems} elements")]
    TooManyTuples { pred: String, elems: usize },
    #[error("the sequent mentions domain elements")]
    ElementInInput,
}

/// Searches for a model, a world and an assignment making every antecedent
/// true and every succedent false. `Ok(None)` means no such model exists
/// within the bounds.
pub fn countermodel_search(s: &Sequent, bounds: CountermodelBounds) -> Result<Option<Countermodel>, CountermodelError> {
    if bounds.max_worlds == 0 || bounds.max_elems == 0 {
        return Err(CountermodelError::InvalidBounds);
    }
    if s.formulas().any(|f| f.contains_elem()) {
        return Err(CountermodelError::ElementInInput);
    }
    let mut preds = BTreeMap::new();
    for f in s.formulas() {
        f.predicates(&mut preds);
    }
    let mut search = Search {
        seq: s,
        preds: preds.into_iter().collect(),
        consts: s.constants().into_iter().collect(),
        examined: 0,
        limit: bounds.max_candidates,
    };
    for n in 1..=bounds.max_worlds {
        let frames = rooted_orders(n);
        for k in 1..=bounds.max_elems {
            for (p, a) in &search.preds {
                if k.checked_pow(*a as u32).is_none_or(|t| t > 64) {
                    return Err(CountermodelError::TooManyTuples { pred: p.clone(), elems: k });
                }
            }
            for order in &frames {
                for domains in nested_domains(order, k) {
                    let mut frame = Frame { order, k, domains: &domains, consts: vec![0; search.consts.len()] };
                    if let Some(found) = search.constants(&mut frame, 0)? {
                        return Ok(Some(found));
                    }
                }
            }
        }
    }
    Ok(None)
}

struct Frame<'a> {
    order: &'a [Vec<bool>],
    k: usize,
    domains: &'a [u64],
    consts: Vec<usize>,
}

struct Search<'s> {
    seq: &'s Sequent,
    preds: Vec<(String, usize)>,
    consts: Vec<String>,
    examined: u64,
    limit: u64,
}

type Found = Result<Option<Countermodel>, CountermodelError>;

impl Search<'_> {
    fn constants(&mut self, frame: &mut Frame<'_>, i: usize) -> Found {
        if i == self.consts.len() {
            let n = frame.order.len();
            let mut tables = vec![vec![0u64; n]; self.preds.len()];
            return self.tables(frame, &mut tables, 0, 0);
        }
        for e in 0..frame.k {
            if frame.domains[0] & (1 << e) != 0 {
                frame.consts[i] = e;
                if let Some(found) = self.constants(frame, i + 1)? {
                    return Ok(Some(found));
                }
            }
        }
        Ok(None)
    }

    fn tables(&mut self, frame: &Frame<'_>, tables: &mut Vec<Vec<u64>>, p: usize, w: usize) -> Found {
        let n = frame.order.len();
        if p == self.preds.len() {
            return self.check(frame, tables);
        }
        if w == n {
            return self.tables(frame, tables, p + 1, 0);
        }
        let arity = self.preds[p].1;
        let allowed = tuple_mask(frame.k, arity, frame.domains[w]);
        let lower = (0..w).filter(|&u| frame.order[u][w]).fold(0u64, |acc, u| acc | tables[p][u]);
        let free = allowed & !lower;
        // all submasks of `free`, including the empty one
        let mut sub = free;
        loop {
            tables[p][w] = lower | sub;
            if let Some(found) = self.tables(frame, tables, p, w + 1)? {
                return Ok(Some(found));
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & free;
        }
        Ok(None)
    }

    fn check(&mut self, frame: &Frame<'_>, tables: &[Vec<u64>]) -> Found {
        self.examined += 1;
        if self.examined > self.limit {
            return Err(CountermodelError::ResourceLimit { examined: self.limit });
        }
        let m = build_model(frame, &self.consts, &self.preds, tables);
        match m.counterexample_at(0, self.seq) {
            Ok(Some(assignment)) => {
                debug_assert!(m.validate().is_ok());
                Ok(Some(Countermodel { world: m.worlds()[0].clone(), model: m, assignment }))
            }
            Ok(None) => Ok(None),
            Err(e) => unreachable!("every symbol is interpreted: {e}"),
        }
    }
}

fn build_model(frame: &Frame<'_>, consts: &[String], preds: &[(String, usize)], tables: &[Vec<u64>]) -> KripkeModel {
    let n = frame.order.len();
    let worlds: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
    let elem = |e: usize| format!("d{e}");
    let mut m = KripkeModel::new(&worlds).expect("distinct names");
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if frame.order[i][j] {
                pairs.push((worlds[i].clone(), worlds[j].clone()));
            }
        }
    }
    m.set_order(&pairs).expect("known worlds");
    for e in 0..frame.k {
        m.elem_index(&elem(e));
    }
    for (i, w) in worlds.iter().enumerate() {
        let d: Vec<String> = (0..frame.k).filter(|e| frame.domains[i] & (1 << e) != 0).map(elem).collect();
        m.set_domain(w, &d).expect("known world");
    }
    for (c, &e) in consts.iter().zip(&frame.consts) {
        m.set_constant(c, &elem(e));
    }
    for (pi, (p, arity)) in preds.iter().enumerate() {
        m.declare_predicate(p, *arity);
        for (wi, w) in worlds.iter().enumerate() {
            let mask = tables[pi][wi];
            for t in 0..frame.k.pow(*arity as u32) {
                if mask & (1 << t) != 0 {
                    let tuple: Vec<String> = decode(t, frame.k, *arity).into_iter().map(elem).collect();
                    m.add_fact(p, w, &tuple).expect("declared arity");
                }
            }
        }
    }
    m
}

fn decode(mut t: usize, k: usize, arity: usize) -> Vec<usize> {
    let mut out = vec![0; arity];
    for slot in out.iter_mut().rev() {
        *slot = t % k;
        t /= k;
    }
    out
}

/// Tuples of the given arity whose components all lie in `domain`.
fn tuple_mask(k: usize, arity: usize, domain: u64) -> u64 {
    let mut mask = 0u64;
    for t in 0..k.pow(arity as u32) {
        if decode(t, k, arity).iter().all(|&e| domain & (1 << e) != 0) {
            mask |= 1 << t;
        }
    }
    mask
}

/// Partial orders on `0..n` generated by edges `i < j` in which `0` is below
/// every world, in a fixed order without duplicates.
fn rooted_orders(n: usize) -> Vec<Vec<Vec<bool>>> {
    let edges: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u64..(1 << edges.len()) {
        let mut r: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect();
        for (b, &(i, j)) in edges.iter().enumerate() {
            if mask & (1 << b) != 0 {
                r[i][j] = true;
            }
        }
        for k in 0..n {
            for i in 0..n {
                if r[i][k] {
                    for j in 0..n {
                        if r[k][j] {
                            r[i][j] = true;
                        }
                    }
                }
            }
        }
        if r[0].iter().all(|&b| b) && seen.insert(r.clone()) {
            out.push(r);
        }
    }
    out
}

/// Domain masks over `k` elements, non-empty, growing along `order`, and
/// jointly covering every element.
fn nested_domains(order: &[Vec<bool>], k: usize) -> Vec<Vec<u64>> {
    let n = order.len();
    let full = (1u64 << k) - 1;
    let mut out = Vec::new();
    let mut cur = vec![0u64; n];
    fn rec(order: &[Vec<bool>], full: u64, w: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        let n = order.len();
        if w == n {
            if cur.iter().fold(0, |a, d| a | d) == full {
                out.push(cur.clone());
            }
            return;
        }
        let lower = (0..w).filter(|&u| order[u][w]).fold(0u64, |acc, u| acc | cur[u]);
        for d in 1..=full {
            if d & lower == lower {
                cur[w] = d;
                rec(order, full, w + 1, cur, out);
            }
        }
    }
    rec(order, full, 0, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::two_world_countermodel;
    use crate::parse::parse_sequent;
    use crate::syntax::Signature;

    fn seq(s: &str) -> Sequent {
        parse_sequent(s, &mut Signature::new()).unwrap()
    }

    #[test]
    fn frame_counts() {
        assert_eq!(rooted_orders(1).len(), 1);
        assert_eq!(rooted_orders(2).len(), 1);
        // chain, fork
        assert_eq!(rooted_orders(3).len(), 2);
    }

    #[test]
    fn prop2_countermodel_is_the_two_world_model() {
        let s = seq("=> ~c P(c) ->i (top ->i ~c P(c))");
        let cm = countermodel_search(&s, CountermodelBounds::new(2, 1)).unwrap().unwrap();
        assert!(cm.model.is_isomorphic(&two_world_countermodel()));
        assert_eq!(cm.world, "w0");
    }

    #[test]
    fn valid_sequent_has_no_countermodel() {
        assert_eq!(countermodel_search(&seq("=> top"), CountermodelBounds::new(3, 2)), Ok(None));
        assert_eq!(countermodel_search(&seq("=> top"), CountermodelBounds::new(1, 1)), Ok(None));
    }

    #[test]
    fn bottom_is_refuted_by_one_world() {
        let cm = countermodel_search(&seq("=> bot"), CountermodelBounds::new(1, 1)).unwrap().unwrap();
        assert_eq!(cm.model.worlds().len(), 1);
        assert_eq!(cm.model.elements().len(), 1);
    }

    #[test]
    fn free_variables_get_assignments() {
        let cm = countermodel_search(&seq("P(x) => Q(x)"), CountermodelBounds::new(1, 1)).unwrap().unwrap();
        assert_eq!(cm.assignment["x"], "d0");
        assert_eq!(cm.model.holds_under(&cm.world, &cm.assignment, &crate::parse::parse_formula("P(x)", &mut Signature::new()).unwrap()), Ok(true));
    }

    #[test]
    fn candidate_budget_is_reported() {
        let s = seq("=> R(c, d) \\/ ~i R(c, d) \\/ forall_i x exists y R(x, y)");
        let b = CountermodelBounds { max_worlds: 3, max_elems: 2, max_candidates: 5 };
        assert!(matches!(countermodel_search(&s, b), Err(CountermodelError::ResourceLimit { .. })));
    }

    #[test]
    fn bad_bounds() {
        assert_eq!(countermodel_search(&seq("=> bot"), CountermodelBounds::new(0, 1)), Err(CountermodelError::InvalidBounds));
    }
}
