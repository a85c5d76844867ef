use super::*;
use crate::kernel::{check_derivation, subformula_property_check, Derivation};
use crate::parse::{parse_formula, parse_sequent};
use crate::syntax::Signature;

fn f(s: &str) -> Formula {
    parse_formula(s, &mut Signature::new()).unwrap()
}

fn s(t: &str) -> Sequent {
    parse_sequent(t, &mut Signature::new()).unwrap()
}

fn id(t: &str) -> Derivation {
    Derivation::id(f(t))
}

/// Reduces and checks everything a reduction promises.
fn reduced(l: Derivation, r: Derivation, a: &str, m: usize, n: usize) -> (Derivation, Vec<TraceStep>) {
    assert_eq!(check_derivation(&l), Ok(()));
    assert_eq!(check_derivation(&r), Ok(()));
    let e = EcutBottom::new(l, r, f(a), m, n).unwrap();
    let mut trace = Vec::new();
    let d = reduce_ecut_bottom_traced(&e, &mut trace);
    assert_eq!(d.conclusion, e.conclusion);
    assert_eq!(check_derivation(&d), Ok(()), "{d:#?}");
    assert!(!d.uses_cut());
    assert_eq!(subformula_property_check(&d), Ok(()));
    measure_decreases(&trace);
    (d, trace)
}

fn measure_decreases(trace: &[TraceStep]) {
    for st in trace {
        if let Some(p) = st.parent {
            let p = &trace[p];
            assert!((st.complexity, st.weight) < (p.complexity, p.weight), "{st:?} under {p:?}");
        }
        assert!(!st.label.is_empty());
    }
}

fn labels(trace: &[TraceStep]) -> Vec<&'static str> {
    trace.iter().map(|t| t.label).collect()
}

#[test]
fn weights() {
    let e = EcutBottom::new(id("P(c)"), id("P(c)"), f("P(c)"), 1, 1).unwrap();
    assert_eq!(e.weight(), 2);
    assert_eq!(e.complexity(), 0);
    let l = Derivation::weak_l(Derivation::weak_l(id("P(c)"), f("Q(c)")), f("R(c)"));
    let e = EcutBottom::new(l, id("P(c)"), f("P(c)"), 1, 1).unwrap();
    assert_eq!(e.weight(), 4);
}

#[test]
fn shape_is_checked() {
    assert!(matches!(EcutBottom::new(id("P(c)"), id("P(c)"), f("Q(c)"), 1, 1), Err(CutError::Shape(_))));
    let cut = Derivation::cut(id("P(c)"), id("P(c)"), f("P(c)"));
    assert_eq!(EcutBottom::new(cut, id("P(c)"), f("P(c)"), 1, 1), Err(CutError::NotCutFree));
}

#[test]
fn substitution_keeps_shape() {
    let d = subst_derivation(&id("P(x)"), &Term::constant("c"), "x");
    assert_eq!(d.conclusion, s("P(c) => P(c)"));
    assert_eq!(d.node_count(), 1);

    let d = Derivation::forall_l(id("P(x)"), f("forall_i y P(y)"), Term::var("x"));
    let e = subst_derivation(&d, &Term::constant("c"), "x");
    assert_eq!(e.conclusion, s("forall_i y P(y) => P(c)"));
    assert_eq!(e.node_count(), d.node_count());
    assert_eq!(check_derivation(&e), Ok(()));
}

#[test]
fn substitution_renames_clashing_eigenvariables() {
    // R(x) => forall_c y (R(x) /\ P(y) ->c P(y)), eigenvariable y
    let mut sig = Signature::new();
    let body = parse_formula("R(x) /\\ P(y) ->c P(y)", &mut sig).unwrap();
    let inner = Derivation::and_l(id("P(y)"), f("R(x) /\\ P(y)"), false);
    let inner = Derivation::weak_l(Derivation::imp_c_r(inner, body), f("R(x)"));
    let d = Derivation::forall_r(inner, f("forall_c y (R(x) /\\ P(y) ->c P(y))"), "y");
    assert_eq!(check_derivation(&d), Ok(()));
    let e = subst_derivation(&d, &Term::var("y"), "x");
    assert_eq!(check_derivation(&e), Ok(()));
    assert_eq!(e.node_count(), d.node_count());
    assert_eq!(e.conclusion, s("R(y) => forall_c z (R(y) /\\ P(z) ->c P(z))"));
    assert_ne!(e.meta.eigen.as_deref(), Some("y"));
}

#[test]
fn vacuous_substitution() {
    let d = Derivation::imp_i_r(id("P(c)"), f("P(c) ->i P(c)"));
    assert_eq!(subst_derivation(&d, &Term::constant("k"), "x"), d);
}

#[test]
fn axiom_against_axiom() {
    let (d, trace) = reduced(id("P(c)"), id("P(c)"), "P(c)", 1, 1);
    assert_eq!(d, id("P(c)"));
    assert_eq!(labels(&trace), ["axiom"]);
}

#[test]
fn zero_copies_pad_with_weakenings() {
    let (d, trace) = reduced(id("Q(c)"), id("P(c)"), "P(c)", 0, 1);
    assert_eq!(d.conclusion, s("Q(c) => Q(c), P(c)"));
    assert_eq!(labels(&trace), ["base-m0"]);
    assert!(d.rules().iter().all(|r| matches!(r, RuleId::Id | RuleId::WeakL | RuleId::WeakR)));
}

#[test]
fn structural_cases_change_multiplicities() {
    let l = Derivation::contr_r(Derivation::weak_r(id("P(c)"), f("P(c)")), f("P(c)"));
    let r = Derivation::weak_l(id("Q(c)"), f("P(c)"));
    let (d, trace) = reduced(l, r, "P(c)", 1, 1);
    assert_eq!(d.conclusion, s("P(c), Q(c) => Q(c)"));
    assert_eq!(trace[0].label, "structural");
}

#[test]
fn principal_and() {
    let l = Derivation::and_r(
        restructure(id("P(c)"), &s("P(c), Q(c) => P(c)")).unwrap(),
        restructure(id("Q(c)"), &s("P(c), Q(c) => Q(c)")).unwrap(),
        f("P(c) /\\ Q(c)"),
    );
    let r = Derivation::and_l(id("Q(c)"), f("P(c) /\\ Q(c)"), false);
    let (d, trace) = reduced(l, r, "P(c) /\\ Q(c)", 1, 1);
    assert_eq!(d.conclusion, s("P(c), Q(c) => Q(c)"));
    assert_eq!(trace[0].label, "principal-and");
}

#[test]
fn principal_or() {
    let l = Derivation::or_r(id("P(c)"), f("P(c) \\/ Q(c)"), true);
    let r = Derivation::or_l(
        Derivation::or_r(id("P(c)"), f("Q(c) \\/ P(c)"), false),
        Derivation::or_r(id("Q(c)"), f("Q(c) \\/ P(c)"), true),
        f("P(c) \\/ Q(c)"),
    );
    let (d, trace) = reduced(l, r, "P(c) \\/ Q(c)", 1, 1);
    assert_eq!(d.conclusion, s("P(c) => Q(c) \\/ P(c)"));
    assert_eq!(trace[0].label, "principal-or");
}

#[test]
fn principal_imp_i() {
    // => P(c) ->i P(c)   against   P(c) ->i P(c), P(c) => P(c)
    let l = Derivation::imp_i_r(id("P(c)"), f("P(c) ->i P(c)"));
    let r = Derivation::imp_l(id("P(c)"), id("P(c)"), f("P(c) ->i P(c)"));
    let (d, trace) = reduced(l, r, "P(c) ->i P(c)", 1, 1);
    assert_eq!(d.conclusion, s("P(c) => P(c)"));
    assert_eq!(trace[0].label, "principal-imp-i");
}

#[test]
fn principal_imp_c_with_extra_copies() {
    // ~c P(c) in the right context twice
    let a = "P(c) ->c Q(c)";
    let l = Derivation::imp_c_r(Derivation::weak_l(id("Q(c)"), f("P(c)")), f(a));
    let l = Derivation::weak_l(l, f("Q(c)"));
    let l = Derivation::contr_l(l, f("Q(c)"));
    let l = Derivation::weak_r(l, f(a));
    let r = Derivation::imp_l(id("P(c)"), id("Q(c)"), f(a));
    let r = Derivation::weak_l(r, f(a));
    let (d, trace) = reduced(l, r, a, 2, 2);
    assert_eq!(d.conclusion, s("Q(c), P(c) => Q(c)"));
    assert!(labels(&trace).contains(&"principal-imp-c"));
}

#[test]
fn principal_forall_i() {
    let l = Derivation::forall_r(Derivation::imp_i_r(id("P(z)"), f("P(z) ->i P(z)")), f("forall_i x (P(x) ->i P(x))"), "z");
    let r = Derivation::forall_l(Derivation::imp_l(id("P(c)"), id("P(c)"), f("P(c) ->i P(c)")), f("forall_i x (P(x) ->i P(x))"), Term::constant("c"));
    let (d, trace) = reduced(l, r, "forall_i x (P(x) ->i P(x))", 1, 1);
    assert_eq!(d.conclusion, s("P(c) => P(c)"));
    assert_eq!(trace[0].label, "principal-forall-i");
}

#[test]
fn principal_forall_c_renames_eigenvariable() {
    // left: Q(z) => forall_c x (P(x) ->c P(x)) with eigen y; right mentions y
    let body = |v: &str| format!("P({v}) ->c P({v})");
    let l = Derivation::imp_c_r(id("P(y)"), f(&body("y")));
    let l = Derivation::forall_r(l, f("forall_c x (P(x) ->c P(x))"), "y");
    let r = Derivation::forall_l(Derivation::imp_l(id("P(y)"), id("P(y)"), f(&body("y"))), f("forall_c x (P(x) ->c P(x))"), Term::var("y"));
    let (d, trace) = reduced(l, r, "forall_c x (P(x) ->c P(x))", 1, 1);
    assert_eq!(d.conclusion, s("P(y) => P(y)"));
    assert_eq!(trace[0].label, "principal-forall-c");
}

#[test]
fn principal_exists() {
    let l = Derivation::exists_r(id("P(c)"), f("exists x P(x)"), Term::constant("c"));
    let r = Derivation::exists_l(Derivation::exists_r(id("P(z)"), f("exists y P(y)"), Term::var("z")), f("exists x P(x)"), "z");
    let (d, trace) = reduced(l, r, "exists x P(x)", 1, 1);
    assert_eq!(d.conclusion, s("P(c) => exists y P(y)"));
    assert_eq!(trace[0].label, "principal-exists");
}

#[test]
fn cross_case_ends_in_the_universal_rule() {
    // left: R(z) => P(c) ->i P(c); right: (P(c) ->i P(c))^2 => forall_i x (Q(x) ->i Q(x)) with eigen z
    let a = "P(c) ->i P(c)";
    let l = Derivation::imp_i_r(Derivation::weak_l(id("P(c)"), f("R(z)")), f(a));
    let inner = Derivation::imp_i_r(id("Q(z)"), f("Q(z) ->i Q(z)"));
    let inner = Derivation::weak_l(Derivation::weak_l(inner, f(a)), f(a));
    let r = Derivation::forall_r(inner, f("forall_i x (Q(x) ->i Q(x))"), "z");
    let (d, trace) = reduced(l, r, a, 1, 2);
    assert_eq!(d.conclusion, s("R(z) => forall_i x (Q(x) ->i Q(x))"));
    assert_eq!(d.rule, RuleId::ForallIR);
    assert_ne!(d.meta.eigen.as_deref(), Some("z"));
    assert_eq!(trace[0].label, "principal-cross-forall-i");
}

#[test]
fn cross_case_with_implication() {
    let a = "forall_i x P(x)";
    let l = Derivation::forall_r(Derivation::forall_l(id("P(z)"), f(a), Term::var("z")), f(a), "z");
    let r = Derivation::imp_i_r(Derivation::weak_l(id("Q(c)"), f(a)), f("Q(c) ->i Q(c)"));
    let (d, trace) = reduced(l, r, a, 1, 1);
    assert_eq!(d.conclusion, s("forall_i x P(x) => Q(c) ->i Q(c)"));
    assert_eq!(d.rule, RuleId::ImpIR);
    assert_eq!(trace[0].label, "principal-cross-imp-i");
}

#[test]
fn non_principal_left_two_premises() {
    // left ends in an implication left rule that carries the cut formula in its right branch
    let l = Derivation::imp_l(id("P(c)"), Derivation::weak_l(id("R(c)"), f("Q(c)")), f("P(c) ->i Q(c)"));
    let r = Derivation::or_r(id("R(c)"), f("R(c) \\/ S(c)"), true);
    let (d, trace) = reduced(l, r, "R(c)", 1, 1);
    assert_eq!(d.conclusion, s("P(c) ->i Q(c), P(c), R(c) => R(c) \\/ S(c)"));
    assert_eq!(trace[0].label, "non-principal-L");
}

#[test]
fn bottom_on_the_right() {
    let l = Derivation::weak_r(id("P(c)"), Formula::Bottom);
    let (d, _) = reduced(l, Derivation::bottom(), "bot", 1, 1);
    assert_eq!(d.conclusion, s("P(c) => P(c)"));
}

#[test]
fn cut_of_identities() {
    let d = Derivation::cut(id("P(c)"), id("P(c)"), f("P(c)"));
    assert_eq!(eliminate_cuts(&d).unwrap(), id("P(c)"));
}

#[test]
fn deliberate_cut_on_conjunct() {
    let l = Derivation::and_l(id("P(c)"), f("P(c) /\\ Q(c)"), true);
    let r = Derivation::or_r(id("P(c)"), f("P(c) \\/ Q(c)"), true);
    let d = Derivation::cut(l, r, f("P(c)"));
    assert_eq!(check_derivation(&d), Ok(()));
    let (e, trace) = eliminate_cuts_traced(&d).unwrap();
    assert_eq!(e.conclusion, s("P(c) /\\ Q(c) => P(c) \\/ Q(c)"));
    assert!(!e.uses_cut());
    assert_eq!(check_derivation(&e), Ok(()));
    assert_eq!(subformula_property_check(&e), Ok(()));
    measure_decreases(&trace);
}

#[test]
fn nested_cuts_below_other_rules() {
    let l = Derivation::and_l(id("P(c)"), f("P(c) /\\ Q(c)"), true);
    let r = Derivation::or_r(id("P(c)"), f("P(c) \\/ Q(c)"), true);
    let c1 = Derivation::cut(l, r, f("P(c)"));
    let c1 = Derivation::imp_c_r(c1, f("P(c) /\\ Q(c) ->c P(c) \\/ Q(c)"));
    assert_eq!(check_derivation(&c1), Ok(()));
    let e = eliminate_cuts(&c1).unwrap();
    assert_eq!(e.conclusion, c1.conclusion);
    assert!(!e.uses_cut());
}

#[test]
fn invalid_input_is_rejected() {
    let bad = Derivation::new(RuleId::Id, s("P(c) => Q(c)"), vec![], Meta::default());
    assert!(matches!(eliminate_cuts(&bad), Err(CutError::Invalid { .. })));
}

#[test]
fn certificates() {
    let mixed = crate::kernel::mixed_example();
    assert_eq!(fragment_certificate(&mixed), Ok(Certificate::Mixed));
    let d = Derivation::imp_i_r(id("P(c)"), f("P(c) ->i P(c)"));
    assert_eq!(fragment_certificate(&d), Ok(Certificate::PureIntuitionistic));
    let p = f("P(c)");
    let d = Derivation::weak_r(Derivation::id(p.clone()), Formula::Bottom);
    let d = Derivation::imp_c_r(d, Formula::neg_c(p));
    let d = Derivation::or_r(d, f("P(c) \\/ ~c P(c)"), false);
    let d = Derivation::or_r(d, f("P(c) \\/ ~c P(c)"), true);
    let d = Derivation::contr_r(d, f("P(c) \\/ ~c P(c)"));
    assert_eq!(fragment_certificate(&d), Ok(Certificate::PureClassical));
    assert_eq!(fragment_certificate(&id("P(c)")), Ok(Certificate::Shared));
    let cut = Derivation::cut(id("P(c)"), id("P(c)"), f("P(c)"));
    assert_eq!(fragment_certificate(&cut), Err(CutError::NotCutFree));
}
