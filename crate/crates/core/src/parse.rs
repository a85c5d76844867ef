//! Text grammar for formulas and sequents.
//!
//! ```text
//! formula := disj (("->i" | "->c") formula)?        right associative
//! disj    := conj ("\/" conj)*
//! conj    := unary ("/\" unary)*
//! unary   := ("~i" | "~c") unary
//!          | ("forall_i" | "forall_c" | "exists") VAR "."? unary
//!          | "bot" | "top" | PRED ("(" term ("," term)* ")")? | "(" formula ")"
//! sequent := (formula ("," formula)*)? "=>" (formula ("," formula)*)?
//! ```
//!
//! Variables start with `x`, `y` or `z`; predicates start with an uppercase
//! letter; every other lowercase identifier is a constant.

use crate::sequent::Sequent;
use crate::syntax::{BinOp, Formula, Quant, Signature, Term};
use std::fmt;
use thiserror::Error;

/// Code-point offsets into the parsed text, `start <= end`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{message} at {span}")]
pub struct ParseError {
    pub message: String,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    And,
    Or,
    ImpI,
    ImpC,
    NegI,
    NegC,
    Turnstile,
    ElemLit(String),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::And => "`/\\`".into(),
            Tok::Or => "`\\/`".into(),
            Tok::ImpI => "`->i`".into(),
            Tok::ImpC => "`->c`".into(),
            Tok::NegI => "`~i`".into(),
            Tok::NegC => "`~c`".into(),
            Tok::Turnstile => "`=>`".into(),
            Tok::ElemLit(s) => format!("`'{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn err(message: impl Into<String>, start: usize, end: usize) -> ParseError {
    ParseError { message: message.into(), span: SourceSpan { start, end } }
}

fn lex(text: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let is_ident = |c: char| c.is_ascii_alphanumeric() || c == '_';
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let two = |a: char, b: char| c == a && chars.get(i + 1) == Some(&b);
        let tok = if c == '(' {
            i += 1;
            Tok::LParen
        } else if c == ')' {
            i += 1;
            Tok::RParen
        } else if c == ',' {
            i += 1;
            Tok::Comma
        } else if c == '.' {
            i += 1;
            Tok::Dot
        } else if two('/', '\\') {
            i += 2;
            Tok::And
        } else if two('\\', '/') {
            i += 2;
            Tok::Or
        } else if two('=', '>') {
            i += 2;
            Tok::Turnstile
        } else if two('-', '>') {
            match chars.get(i + 2) {
                Some('i') => {
                    i += 3;
                    Tok::ImpI
                }
                Some('c') => {
                    i += 3;
                    Tok::ImpC
                }
                _ => return Err(err("expected `->i` or `->c`", start, (i + 2).min(chars.len()))),
            }
        } else if c == '~' {
            match chars.get(i + 1) {
                Some('i') => {
                    i += 2;
                    Tok::NegI
                }
                Some('c') => {
                    i += 2;
                    Tok::NegC
                }
                _ => return Err(err("expected `~i` or `~c`", start, (i + 1).min(chars.len()))),
            }
        } else if c == '\'' {
            i += 1;
            while i < chars.len() && is_ident(chars[i]) {
                i += 1;
            }
            Tok::ElemLit(chars[start + 1..i].iter().collect())
        } else if c.is_ascii_alphabetic() {
            while i < chars.len() && is_ident(chars[i]) {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else {
            return Err(err(format!("unexpected character `{c}`"), start, start + 1));
        };
        out.push((tok, SourceSpan { start, end: i }));
    }
    out.push((Tok::Eof, SourceSpan { start: chars.len(), end: chars.len() }));
    Ok(out)
}

pub fn is_variable_name(s: &str) -> bool {
    matches!(s.chars().next(), Some('x' | 'y' | 'z'))
        && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn is_keyword(s: &str) -> bool {
    matches!(s, "bot" | "top" | "forall_i" | "forall_c" | "exists")
}

struct Parser<'a> {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
    sig: &'a mut Signature,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, SourceSpan) {
        let t = self.toks[self.pos].clone();
        if t.0 != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            let sp = self.span();
            Err(err(
                format!("expected {}, found {}", want.describe(), self.peek().describe()),
                sp.start,
                sp.end,
            ))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disj()?;
        let op = match self.peek() {
            Tok::ImpI => BinOp::ImpI,
            Tok::ImpC => BinOp::ImpC,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.formula()?;
        Ok(Formula::bin(op, lhs, rhs))
    }

    fn disj(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.conj()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.conj()?;
            acc = Formula::or(acc, rhs);
        }
        Ok(acc)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary()?;
            acc = Formula::and(acc, rhs);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let (tok, sp) = self.bump();
        match tok {
            Tok::NegI => Ok(Formula::neg_i(self.unary()?)),
            Tok::NegC => Ok(Formula::neg_c(self.unary()?)),
            Tok::LParen => {
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(name) => match name.as_str() {
                "bot" => Ok(Formula::Bottom),
                "top" => Ok(Formula::top()),
                "forall_i" | "forall_c" | "exists" => {
                    let q = match name.as_str() {
                        "forall_i" => Quant::ForallI,
                        "forall_c" => Quant::ForallC,
                        _ => Quant::Exists,
                    };
                    let (vt, vsp) = self.bump();
                    let var = match vt {
                        Tok::Ident(v) if is_variable_name(&v) && !is_keyword(&v) => v,
                        other => {
                            return Err(err(
                                format!("expected a variable after `{name}`, found {}", other.describe()),
                                vsp.start,
                                vsp.end,
                            ))
                        }
                    };
                    if *self.peek() == Tok::Dot {
                        self.bump();
                    }
                    let body = self.unary()?;
                    Ok(Formula::quant(q, var, body))
                }
                _ if name.starts_with(|c: char| c.is_ascii_uppercase()) => self.atom(name, sp),
                _ => Err(err(format!("expected a formula, found term `{name}`"), sp.start, sp.end)),
            },
            Tok::ElemLit(e) => Err(err(
                format!("domain element literal `'{e}` is not allowed in input"),
                sp.start,
                sp.end,
            )),
            other => Err(err(format!("expected a formula, found {}", other.describe()), sp.start, sp.end)),
        }
    }

    fn atom(&mut self, pred: String, sp: SourceSpan) -> Result<Formula, ParseError> {
        let mut args = Vec::new();
        let mut end = sp.end;
        if *self.peek() == Tok::LParen {
            self.bump();
            loop {
                args.push(self.term()?);
                match self.bump() {
                    (Tok::Comma, _) => continue,
                    (Tok::RParen, rsp) => {
                        end = rsp.end;
                        break;
                    }
                    (other, osp) => {
                        return Err(err(
                            format!("expected `,` or `)`, found {}", other.describe()),
                            osp.start,
                            osp.end,
                        ))
                    }
                }
            }
        }
        if let Err(arity) = self.sig.use_predicate(&pred, args.len()) {
            return Err(err(
                format!("predicate {pred} has arity {arity}, used with {} arguments", args.len()),
                sp.start,
                end,
            ));
        }
        Ok(Formula::Atom(pred, args))
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let (tok, sp) = self.bump();
        match tok {
            Tok::Ident(name) if !is_keyword(&name) && name.starts_with(|c: char| c.is_ascii_lowercase()) => {
                if is_variable_name(&name) {
                    Ok(Term::Var(name))
                } else {
                    self.sig.constants.insert(name.clone());
                    Ok(Term::Const(name))
                }
            }
            Tok::ElemLit(e) => Err(err(
                format!("domain element literal `'{e}` is not allowed in input"),
                sp.start,
                sp.end,
            )),
            other => Err(err(format!("expected a term, found {}", other.describe()), sp.start, sp.end)),
        }
    }

    fn formula_list(&mut self, stop: &Tok) -> Result<Vec<Formula>, ParseError> {
        let mut out = Vec::new();
        if self.peek() == stop {
            return Ok(out);
        }
        loop {
            out.push(self.formula()?.normalize());
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                return Ok(out);
            }
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            let sp = self.span();
            Err(err(format!("unexpected {}", self.peek().describe()), sp.start, sp.end))
        }
    }
}

pub fn parse_formula(text: &str, sig: &mut Signature) -> Result<Formula, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, sig };
    let f = p.formula()?;
    p.finish()?;
    Ok(f.normalize())
}

pub fn parse_sequent(text: &str, sig: &mut Signature) -> Result<Sequent, ParseError> {
    let toks = lex(text)?;
    if !toks.iter().any(|(t, _)| *t == Tok::Turnstile) {
        let n = text.chars().count();
        return Err(err("missing `=>`", 0, n));
    }
    let mut p = Parser { toks, pos: 0, sig };
    let ante = p.formula_list(&Tok::Turnstile)?;
    p.expect(Tok::Turnstile)?;
    let succ = p.formula_list(&Tok::Eof)?;
    p.finish()?;
    Ok(Sequent::new(ante, succ))
}

/// Parses a single term (used for witness terms in derivation files).
pub fn parse_term(text: &str, sig: &mut Signature) -> Result<Term, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, sig };
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pc(p: &str) -> Formula {
        Formula::atom(p, vec![Term::constant("c")])
    }

    fn parse(s: &str) -> Formula {
        parse_formula(s, &mut Signature::new()).unwrap()
    }

    #[test]
    fn grammar_examples() {
        assert_eq!(
            parse("P(c) ->i (Q(c) ->i P(c))"),
            Formula::imp_i(pc("P"), Formula::imp_i(pc("Q"), pc("P")))
        );
        assert_eq!(parse("~c P(c)"), Formula::imp_c(pc("P"), Formula::Bottom));
        let px = Formula::atom("P", vec![Term::var("x")]);
        let py = Formula::atom("P", vec![Term::var("y")]);
        assert_eq!(
            parse("forall_i y (~c forall_c x P(x) ->i ~c P(y))"),
            Formula::forall_i(
                "y",
                Formula::imp_i(Formula::neg_c(Formula::forall_c("x", px)), Formula::neg_c(py))
            )
        );
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(
            parse("P(c) /\\ Q(c) \\/ bot"),
            Formula::or(Formula::and(pc("P"), pc("Q")), Formula::Bottom)
        );
        assert_eq!(
            parse("P(c) ->c Q(c) ->i bot"),
            Formula::imp_c(pc("P"), Formula::imp_i(pc("Q"), Formula::Bottom))
        );
        assert_eq!(parse("forall_c x. P(x)"), parse("forall_c x P(x)"));
    }

    #[test]
    fn sequent_examples() {
        let mut sig = Signature::new();
        let s = parse_sequent("P(c) => P(c)", &mut sig).unwrap();
        assert_eq!(s, Sequent::new(vec![pc("P")], vec![pc("P")]));
        let s = parse_sequent("bot =>", &mut sig).unwrap();
        assert_eq!(s, Sequent::new(vec![Formula::Bottom], vec![]));
        let s = parse_sequent("top ->i forall_c x P(x) => forall_c x (top ->i P(x))", &mut sig).unwrap();
        assert_eq!(s.ante.len(), 1);
        assert_eq!(s.succ.len(), 1);
        assert!(parse_sequent("=>", &mut sig).unwrap().is_empty());
    }

    #[test]
    fn errors_carry_spans() {
        let mut sig = Signature::new();
        for bad in ["P(c", "P(c) /\\", "P(c) => Q(", "P('d)", "forall_i c P(c)", "P(c) -> Q(c)", "x", "P(c)  Q(c)", "#"] {
            let e = parse_formula(bad, &mut sig).or_else(|_| parse_sequent(bad, &mut sig).map(|_| Formula::Bottom));
            let e = e.expect_err(bad);
            assert!(e.span.start <= e.span.end && e.span.end <= bad.chars().count(), "{bad}: {e}");
        }
        let e = parse_sequent("P(c)", &mut sig).unwrap_err();
        assert!(e.message.contains("=>"));
    }

    #[test]
    fn arity_is_fixed_by_first_use() {
        let mut sig = Signature::new();
        parse_formula("P(c)", &mut sig).unwrap();
        let e = parse_formula("P(c, d)", &mut sig).unwrap_err();
        assert!(e.message.contains("arity"));
        let mut declared = Signature::new().with_predicate("R", 2);
        assert!(parse_formula("R(c)", &mut declared).is_err());
    }

    #[test]
    fn rejects_domain_elements() {
        let e = parse_formula("P('d)", &mut Signature::new()).unwrap_err();
        assert!(e.message.contains("domain element"));
    }

    #[test]
    fn parse_normalizes() {
        let f = parse("P(x) /\\ forall_i x Q(x)");
        assert_eq!(f, parse("P(x) /\\ forall_i x1 Q(x1)"));
    }
}
