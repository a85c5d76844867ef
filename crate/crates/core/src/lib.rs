//! Syntax, Kripke semantics, sequent calculus, cut elimination and proof
//! search for first-order logic with both intuitionistic and classical
//! implication and universal quantification.

pub mod cut;
pub mod json;
pub mod kernel;
pub mod kripke;
pub mod parse;
pub mod print;
pub mod render;
pub mod search;
pub mod sequent;
pub mod syntax;
