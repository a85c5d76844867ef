mod common;

use common::{candidate_sequent, closed_formula, formula_in, inject_cuts, model, proved_corpus, rng, Lang};
use focj::cut::{eliminate_cuts, subst_derivation};
use focj::json::{derivation_from_json, derivation_to_json, model_from_json, model_to_json};
use focj::kernel::{check_derivation, eta_expand};
use focj::kripke::{countermodel_search, CountermodelBounds};
use focj::print::print_formula;
use focj::search::{prove, SearchLimits};
use focj::syntax::Term;
use proptest::prelude::*;

fn open_formula(seed: u64, lang: Lang) -> focj::syntax::Formula {
    formula_in(&mut rng(seed), lang, 4, &mut vec!["x".to_string()])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn substitution_keeps_complexity(seed in any::<u64>(), c in 0..3usize) {
        let f = open_formula(seed, Lang::Full);
        let t = [Term::constant("c"), Term::var("y"), Term::var("x")][c].clone();
        prop_assert_eq!(f.subst("x", &t).complexity(), f.complexity());
    }

    #[test]
    fn substitution_removes_the_variable(seed in any::<u64>()) {
        let f = open_formula(seed, Lang::Full);
        let g = f.subst("x", &Term::constant("d"));
        prop_assert!(!g.has_free("x"));
        prop_assert!(g.free_vars().is_empty());
    }

    #[test]
    fn normalize_is_idempotent(seed in any::<u64>()) {
        let f = open_formula(seed, Lang::Full);
        let n = f.normalize();
        prop_assert_eq!(n.normalize(), n.clone());
        prop_assert!(n.alpha_eq(&f));
    }

    #[test]
    fn intuitionistic_formulas_are_hereditary(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = model(&mut r, 4, 3);
        let f = closed_formula(&mut r, Lang::Intuitionistic, 5);
        prop_assert!(f.fragment().is_intuitionistic());
        prop_assert_eq!(m.check_heredity(&f).unwrap(), None);
    }

    #[test]
    fn generated_models_survive_json(seed in any::<u64>()) {
        let m = model(&mut rng(seed), 4, 3);
        let back = model_from_json(&model_to_json(&m).to_string()).unwrap();
        prop_assert!(back.validate().is_ok());
        prop_assert!(back.is_isomorphic(&m));
    }

    #[test]
    fn eta_expansions_check(seed in any::<u64>()) {
        let f = open_formula(seed, Lang::Full);
        let d = eta_expand(&f);
        prop_assert!(check_derivation(&d).is_ok(), "{}", print_formula(&f));
        prop_assert!(!d.uses_cut());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn search_agrees_with_countermodels(seed in any::<u64>()) {
        let s = candidate_sequent(&mut rng(seed), Lang::Full);
        let lim = SearchLimits { max_depth: 10, countermodel: None, max_steps: 20_000, ..SearchLimits::default() };
        let proved = prove(&s, &lim).is_proved();
        let cm = countermodel_search(&s, CountermodelBounds::new(2, 2));
        if let Ok(Some(cm)) = cm {
            prop_assert!(!proved, "{} is proved yet refuted at {}", s, cm.world);
        }
    }

    #[test]
    fn derivations_survive_json(seed in any::<u64>()) {
        let d = proved_corpus(seed, 1, Lang::Full).remove(0);
        // parsing renames clashing binders, so compare up to alpha-equivalence
        let back = derivation_from_json(&derivation_to_json(&d).to_string()).unwrap();
        prop_assert!(check_derivation(&back).is_ok());
        prop_assert_eq!(back.rules(), d.rules());
        prop_assert_eq!(back.conclusion.ante.canonical(), d.conclusion.ante.canonical());
        prop_assert_eq!(back.conclusion.succ.canonical(), d.conclusion.succ.canonical());
        let again = derivation_from_json(&derivation_to_json(&back).to_string()).unwrap();
        prop_assert_eq!(again, back);
    }

    #[test]
    fn elimination_fixes_cut_free_input(seed in any::<u64>()) {
        let d = proved_corpus(seed, 1, Lang::Full).remove(0);
        prop_assert_eq!(eliminate_cuts(&d).unwrap(), d);
    }

    #[test]
    fn elimination_keeps_the_end_sequent(seed in any::<u64>()) {
        let d = proved_corpus(seed, 1, Lang::Full).remove(0);
        let cut = inject_cuts(&mut rng(seed ^ 1), &d);
        let e = eliminate_cuts(&cut).unwrap();
        prop_assert!(!e.uses_cut());
        prop_assert_eq!(&e.conclusion, &d.conclusion);
        prop_assert!(check_derivation(&e).is_ok());
    }

    #[test]
    fn substituted_derivations_check(seed in any::<u64>()) {
        let d = proved_corpus(seed, 1, Lang::Full).remove(0);
        let e = subst_derivation(&d, &Term::var("y"), "x");
        prop_assert_eq!(e.node_count(), d.node_count());
        prop_assert!(check_derivation(&e).is_ok());
    }
}
