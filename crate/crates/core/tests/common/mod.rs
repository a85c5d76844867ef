#![allow(dead_code)]

use focj::kernel::{eta_expand, Derivation};
use focj::kripke::KripkeModel;
use focj::search::{prove, SearchLimits};
use focj::sequent::Sequent;
use focj::syntax::{BinOp, Formula, Quant, Term};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const CONSTANTS: [&str; 2] = ["c", "d"];
const BOUND: [&str; 3] = ["x", "y", "z"];

/// Which connectives a generated formula may use.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Lang {
    Intuitionistic,
    Classical,
    Full,
}

impl Lang {
    fn ops(self) -> &'static [BinOp] {
        match self {
            Lang::Intuitionistic => &[BinOp::And, BinOp::Or, BinOp::ImpI],
            Lang::Classical => &[BinOp::And, BinOp::Or, BinOp::ImpC],
            Lang::Full => &[BinOp::And, BinOp::Or, BinOp::ImpI, BinOp::ImpC],
        }
    }

    fn quants(self) -> &'static [Quant] {
        match self {
            Lang::Intuitionistic => &[Quant::ForallI, Quant::Exists],
            Lang::Classical => &[Quant::ForallC, Quant::Exists],
            Lang::Full => &[Quant::ForallI, Quant::ForallC, Quant::Exists],
        }
    }
}

fn term(r: &mut ChaCha8Rng, scope: &[String]) -> Term {
    if !scope.is_empty() && r.gen_bool(0.6) {
        Term::var(scope.choose(r).unwrap().clone())
    } else {
        Term::constant(*CONSTANTS.choose(r).unwrap())
    }
}

fn atom(r: &mut ChaCha8Rng, scope: &[String]) -> Formula {
    match r.gen_range(0..10) {
        0 => Formula::Bottom,
        1..=4 => Formula::atom("P", vec![term(r, scope)]),
        5..=7 => Formula::atom("Q", vec![term(r, scope)]),
        _ => Formula::atom("R", vec![term(r, scope), term(r, scope)]),
    }
}

/// A formula of depth at most `depth` whose free variables lie in `scope`.
pub fn formula_in(r: &mut ChaCha8Rng, lang: Lang, depth: usize, scope: &mut Vec<String>) -> Formula {
    if depth == 0 || r.gen_bool(0.25) {
        return atom(r, scope);
    }
    if r.gen_bool(0.7) {
        let op = *lang.ops().choose(r).unwrap();
        let l = formula_in(r, lang, depth - 1, scope);
        let rr = formula_in(r, lang, depth - 1, scope);
        Formula::bin(op, l, rr)
    } else {
        let q = *lang.quants().choose(r).unwrap();
        let x = BOUND.choose(r).unwrap().to_string();
        scope.push(x.clone());
        let body = formula_in(r, lang, depth - 1, scope);
        scope.pop();
        Formula::quant(q, x, body)
    }
}

pub fn closed_formula(r: &mut ChaCha8Rng, lang: Lang, depth: usize) -> Formula {
    formula_in(r, lang, depth, &mut Vec::new())
}

/// Free variables, when present, are drawn from `x` only.
fn sequent_formula(r: &mut ChaCha8Rng, lang: Lang, depth: usize, open: bool) -> Formula {
    let mut scope = if open { vec!["x".to_string()] } else { Vec::new() };
    formula_in(r, lang, depth, &mut scope)
}

/// A sequent that is usually, but not always, derivable: one of a few
/// valid shapes filled with random formulas, or a random sequent.
pub fn candidate_sequent(r: &mut ChaCha8Rng, lang: Lang) -> Sequent {
    let open = r.gen_bool(0.3);
    let f = |r: &mut ChaCha8Rng| sequent_formula(r, lang, 2, open);
    let (a, b) = (f(r), f(r));
    let imp = |a: Formula, b: Formula, r: &mut ChaCha8Rng| match lang {
        Lang::Intuitionistic => Formula::imp_i(a, b),
        Lang::Classical => Formula::imp_c(a, b),
        Lang::Full => {
            if r.gen_bool(0.5) {
                Formula::imp_i(a, b)
            } else {
                Formula::imp_c(a, b)
            }
        }
    };
    let mut s = match r.gen_range(0..9) {
        0 => Sequent::new(vec![a.clone()], vec![Formula::or(a, b)]),
        1 => Sequent::new(vec![Formula::and(a.clone(), b)], vec![a]),
        2 => {
            let i = imp(a.clone(), a, r);
            Sequent::new(vec![], vec![i])
        }
        3 => {
            let i = imp(a.clone(), b.clone(), r);
            Sequent::new(vec![a, i], vec![b])
        }
        4 => Sequent::new(vec![Formula::and(a.clone(), b.clone())], vec![Formula::and(b, a)]),
        5 => Sequent::new(vec![Formula::or(a.clone(), b.clone())], vec![Formula::or(b, a)]),
        6 => {
            let x = "y";
            let body = Formula::atom("P", vec![Term::var(x)]);
            let q = if lang == Lang::Classical || (lang == Lang::Full && r.gen_bool(0.5)) { Quant::ForallC } else { Quant::ForallI };
            let c = Term::constant(*CONSTANTS.choose(r).unwrap());
            Sequent::new(vec![Formula::quant(q, x, body.clone()), a], vec![body.subst(x, &c)])
        }
        7 => Sequent::new(vec![a.clone(), b.clone()], vec![Formula::and(a, b)]),
        _ => Sequent::new(vec![a], vec![b]),
    };
    if r.gen_bool(0.3) {
        s.ante.push(f(r));
    }
    s
}

fn quick_limits() -> SearchLimits {
    SearchLimits { max_depth: 10, countermodel: None, max_steps: 20_000, ..SearchLimits::default() }
}

/// `n` derivations found by `prove` over `candidate_sequent`s.
pub fn proved_corpus(seed: u64, n: usize, lang: Lang) -> Vec<Derivation> {
    let mut r = rng(seed);
    let lim = quick_limits();
    let mut out = Vec::new();
    let mut tries = 0;
    while out.len() < n {
        tries += 1;
        assert!(tries < n * 50, "corpus generator found only {} of {n} derivations", out.len());
        let s = candidate_sequent(&mut r, lang);
        if let Some(d) = prove(&s, &lim).derivation() {
            out.push(d.clone());
        }
    }
    out
}

fn node_count(d: &Derivation) -> usize {
    d.node_count()
}

/// Replaces the subtree at `target` (pre-order index) with `f(subtree)`.
fn rewrite_at(d: &Derivation, target: usize, counter: &mut usize, f: &mut impl FnMut(&Derivation) -> Derivation) -> Derivation {
    let here = *counter;
    *counter += 1;
    if here == target {
        return f(d);
    }
    let mut out = d.clone();
    out.premises = d.premises.iter().map(|p| rewrite_at(p, target, counter, f)).collect();
    out
}

/// Cuts `d` against an identity derivation of one of its end formulas.
pub fn cut_with_identity(r: &mut ChaCha8Rng, d: &Derivation) -> Derivation {
    let s = &d.conclusion;
    let use_succ = !s.succ.is_empty() && (s.ante.is_empty() || r.gen_bool(0.5));
    if use_succ {
        let a = s.succ.as_slice().choose(r).unwrap().clone();
        Derivation::cut(d.clone(), eta_expand(&a), a)
    } else if !s.ante.is_empty() {
        let a = s.ante.as_slice().choose(r).unwrap().clone();
        Derivation::cut(eta_expand(&a), d.clone(), a)
    } else {
        d.clone()
    }
}

/// Injects between one and three cuts at random positions of `d`.
pub fn inject_cuts(r: &mut ChaCha8Rng, d: &Derivation) -> Derivation {
    let mut d = d.clone();
    for _ in 0..r.gen_range(1..=3) {
        let target = r.gen_range(0..node_count(&d));
        let mut rr = ChaCha8Rng::seed_from_u64(r.gen());
        d = rewrite_at(&d, target, &mut 0, &mut |sub| cut_with_identity(&mut rr, sub));
    }
    d
}

/// A valid finite model with at most `max_worlds` worlds and `max_elems`
/// elements, interpreting P, Q (unary), R (binary), c and d.
pub fn model(r: &mut ChaCha8Rng, max_worlds: usize, max_elems: usize) -> KripkeModel {
    let n = r.gen_range(1..=max_worlds);
    let k = r.gen_range(1..=max_elems);
    let worlds: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
    let elems: Vec<String> = (0..k).map(|i| format!("e{i}")).collect();
    let mut m = KripkeModel::new(&worlds).unwrap();

    // random edges, then reflexive-transitive closure
    let mut rel = vec![vec![false; n]; n];
    for (i, row) in rel.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = i == j || r.gen_bool(0.35);
        }
    }
    for mid in 0..n {
        for i in 0..n {
            for j in 0..n {
                if rel[i][mid] && rel[mid][j] {
                    rel[i][j] = true;
                }
            }
        }
    }
    let pairs: Vec<(String, String)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| rel[i][j])
        .map(|(i, j)| (worlds[i].clone(), worlds[j].clone()))
        .collect();
    m.set_order(&pairs).unwrap();

    // e0 lives everywhere; other elements are born somewhere and persist upward
    let mut dom: Vec<Vec<bool>> = (0..n).map(|_| (0..k).map(|e| e == 0 || r.gen_bool(0.5)).collect()).collect();
    for i in 0..n {
        for j in 0..n {
            if rel[i][j] {
                for e in 0..k {
                    if dom[i][e] {
                        dom[j][e] = true;
                    }
                }
            }
        }
    }
    for (i, w) in worlds.iter().enumerate() {
        let d: Vec<&String> = elems.iter().enumerate().filter(|(e, _)| dom[i][*e]).map(|(_, s)| s).collect();
        m.set_domain(w, &d).unwrap();
    }
    let common: Vec<usize> = (0..k).filter(|&e| (0..n).all(|i| dom[i][e])).collect();
    for c in CONSTANTS {
        m.set_constant(c, &elems[*common.choose(r).unwrap()]);
    }

    for (p, arity) in [("P", 1), ("Q", 1), ("R", 2)] {
        m.declare_predicate(p, arity);
        let tuples: Vec<Vec<usize>> = if arity == 1 {
            (0..k).map(|e| vec![e]).collect()
        } else {
            (0..k).flat_map(|a| (0..k).map(move |b| vec![a, b])).collect()
        };
        let mut ext = vec![vec![false; tuples.len()]; n];
        for (i, row) in ext.iter_mut().enumerate() {
            for (t, cell) in row.iter_mut().enumerate() {
                *cell = tuples[t].iter().all(|&e| dom[i][e]) && r.gen_bool(0.4);
            }
        }
        for i in 0..n {
            for j in 0..n {
                if rel[i][j] {
                    for t in 0..tuples.len() {
                        if ext[i][t] {
                            ext[j][t] = true;
                        }
                    }
                }
            }
        }
        for (i, w) in worlds.iter().enumerate() {
            for (t, tuple) in tuples.iter().enumerate() {
                if ext[i][t] {
                    let names: Vec<&String> = tuple.iter().map(|&e| &elems[e]).collect();
                    m.add_fact(p, w, &names).unwrap();
                }
            }
        }
    }
    if let Err(v) = m.validate() {
        panic!("generated an invalid model: {v:?}");
    }
    m
}
