//! Pretty printing with minimal parentheses. The ASCII form re-parses to an
//! alpha-equal formula; the Unicode form is for display only.

use crate::sequent::Sequent;
use crate::syntax::{BinOp, Formula, Quant, Term};
use std::fmt::{self, Write};

struct Symbols {
    bot: &'static str,
    top: &'static str,
    and: &'static str,
    or: &'static str,
    imp_i: &'static str,
    imp_c: &'static str,
    neg_i: &'static str,
    neg_c: &'static str,
    forall_i: &'static str,
    forall_c: &'static str,
    exists: &'static str,
    turnstile: &'static str,
}

const ASCII: Symbols = Symbols {
    bot: "bot",
    top: "top",
    and: " /\\ ",
    or: " \\/ ",
    imp_i: " ->i ",
    imp_c: " ->c ",
    neg_i: "~i ",
    neg_c: "~c ",
    forall_i: "forall_i ",
    forall_c: "forall_c ",
    exists: "exists ",
    turnstile: "=>",
};

const UNICODE: Symbols = Symbols {
    bot: "⊥",
    top: "⊤",
    and: " ∧ ",
    or: " ∨ ",
    imp_i: " →i ",
    imp_c: " →c ",
    neg_i: "¬i ",
    neg_c: "¬c ",
    forall_i: "∀i ",
    forall_c: "∀c ",
    exists: "∃",
    turnstile: "⇒",
};

const PREC_IMP: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_UNARY: u8 = 4;

fn write_term(out: &mut String, t: &Term) {
    match t {
        Term::Var(v) | Term::Const(v) => out.push_str(v),
        Term::Elem(e) => {
            out.push('\'');
            out.push_str(e);
        }
    }
}

fn write_formula(out: &mut String, f: &Formula, ctx: u8, sym: &Symbols) {
    let prec = match f {
        Formula::Bin(BinOp::ImpI | BinOp::ImpC, _, r) if **r == Formula::Bottom => PREC_UNARY,
        Formula::Bin(BinOp::ImpI | BinOp::ImpC, ..) => PREC_IMP,
        Formula::Bin(BinOp::Or, ..) => PREC_OR,
        Formula::Bin(BinOp::And, ..) => PREC_AND,
        _ => PREC_UNARY,
    };
    let paren = prec < ctx;
    if paren {
        out.push('(');
    }
    match f {
        Formula::Atom(p, args) => {
            out.push_str(p);
            if !args.is_empty() {
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_term(out, a);
                }
                out.push(')');
            }
        }
        Formula::Bottom => out.push_str(sym.bot),
        f if f.is_top() => out.push_str(sym.top),
        Formula::Bin(op @ (BinOp::ImpI | BinOp::ImpC), l, r) if **r == Formula::Bottom => {
            out.push_str(if *op == BinOp::ImpI { sym.neg_i } else { sym.neg_c });
            write_formula(out, l, PREC_UNARY, sym);
        }
        Formula::Bin(op, l, r) => {
            let (lp, rp, s) = match op {
                BinOp::ImpI => (PREC_OR, PREC_IMP, sym.imp_i),
                BinOp::ImpC => (PREC_OR, PREC_IMP, sym.imp_c),
                BinOp::Or => (PREC_OR, PREC_AND, sym.or),
                BinOp::And => (PREC_AND, PREC_UNARY, sym.and),
            };
            write_formula(out, l, lp, sym);
            out.push_str(s);
            write_formula(out, r, rp, sym);
        }
        Formula::Quant(q, v, body) => {
            out.push_str(match q {
                Quant::ForallI => sym.forall_i,
                Quant::ForallC => sym.forall_c,
                Quant::Exists => sym.exists,
            });
            out.push_str(v);
            out.push(' ');
            write_formula(out, body, PREC_UNARY, sym);
        }
    }
    if paren {
        out.push(')');
    }
}

pub fn print_formula(f: &Formula) -> String {
    let mut s = String::new();
    write_formula(&mut s, f, 0, &ASCII);
    s
}

pub fn display_formula(f: &Formula) -> String {
    let mut s = String::new();
    write_formula(&mut s, f, 0, &UNICODE);
    s
}

fn write_sequent(s: &Sequent, sym: &Symbols) -> String {
    let side = |fs: &mut dyn Iterator<Item = &Formula>| {
        fs.map(|f| {
            let mut o = String::new();
            write_formula(&mut o, f, 0, sym);
            o
        })
        .collect::<Vec<_>>()
        .join(", ")
    };
    let a = side(&mut s.ante.iter());
    let c = side(&mut s.succ.iter());
    let mut out = String::new();
    if !a.is_empty() {
        out.push_str(&a);
        out.push(' ');
    }
    out.push_str(sym.turnstile);
    if !c.is_empty() {
        let _ = write!(out, " {c}");
    }
    out
}

pub fn print_sequent(s: &Sequent) -> String {
    write_sequent(s, &ASCII)
}

pub fn display_sequent(s: &Sequent) -> String {
    write_sequent(s, &UNICODE)
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_term(&mut s, self);
        f.write_str(&s)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_sequent(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_formula;
    use crate::syntax::Signature;
    use proptest::prelude::*;

    fn pc(p: &str) -> Formula {
        Formula::atom(p, vec![Term::constant("c")])
    }

    #[test]
    fn printing_examples() {
        assert_eq!(print_formula(&Formula::imp_c(pc("P"), Formula::Bottom)), "~c P(c)");
        assert_eq!(
            print_formula(&Formula::and(pc("P"), Formula::or(pc("Q"), Formula::Bottom))),
            "P(c) /\\ (Q(c) \\/ bot)"
        );
        assert_eq!(print_formula(&Formula::top()), "top");
        let px = Formula::atom("P", vec![Term::var("x")]);
        let q = Formula::imp_i(Formula::neg_c(Formula::forall_c("x", px.clone())), Formula::Bottom);
        assert_eq!(print_formula(&q), "~i ~c forall_c x P(x)");
        assert_eq!(
            print_formula(&Formula::forall_c("x", Formula::imp_i(Formula::top(), px))),
            "forall_c x (top ->i P(x))"
        );
        assert_eq!(display_formula(&Formula::neg_c(pc("P"))), "¬c P(c)");
    }

    pub(crate) fn arb_formula() -> impl Strategy<Value = Formula> {
        let term = prop_oneof![
            Just(Term::var("x")),
            Just(Term::var("y")),
            Just(Term::constant("c")),
            Just(Term::constant("d")),
        ];
        let leaf = prop_oneof![
            Just(Formula::Bottom),
            term.clone().prop_map(|t| Formula::atom("P", vec![t])),
            (term.clone(), term).prop_map(|(a, b)| Formula::atom("R", vec![a, b])),
            Just(Formula::atom("Q", vec![])),
        ];
        leaf.prop_recursive(5, 40, 2, |inner| {
            let ops = prop_oneof![Just(BinOp::And), Just(BinOp::Or), Just(BinOp::ImpI), Just(BinOp::ImpC)];
            let qs = prop_oneof![Just(Quant::ForallI), Just(Quant::ForallC), Just(Quant::Exists)];
            let vars = prop_oneof![Just("x"), Just("y")];
            prop_oneof![
                (ops, inner.clone(), inner.clone()).prop_map(|(o, l, r)| Formula::bin(o, l, r)),
                (qs, vars, inner).prop_map(|(q, v, b)| Formula::quant(q, v, b)),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn print_parse_round_trip(f in arb_formula()) {
            let text = print_formula(&f);
            let back = parse_formula(&text, &mut Signature::new()).unwrap();
            prop_assert!(back.alpha_eq(&f), "{} -> {}", text, back);
        }
    }
}
