//! JSON wire formats. Formulas, sequents and terms travel as text in the
//! concrete syntax, so files stay readable and editable by hand.
//!
//! A derivation node:
//!
//! ```json
//! {"rule": "ImpIR", "conclusion": "=> top ->i P(c)", "premises": [...],
//!  "meta": {"formula": "top ->i P(c)"}}
//! ```
//!
//! `meta` and all of its fields (`formula`, `eigen`, `witness`, `split`,
//! `ecut`) may be left out. A model:
//!
//! ```json
//! {"worlds": ["w", "v"], "order": [["w", "v"]],
//!  "domains": {"w": ["d"], "v": ["d"]}, "constants": {"c": "d"},
//!  "predicates": {"P": {"arity": 1, "extension": {"v": [["d"]]}}}}
//! ```
//!
//! The order is closed under reflexivity and transitivity on load.

use crate::cut::TraceStep;
use crate::kernel::{Derivation, EcutMeta, Meta, RuleId, Split};
use crate::kripke::{Countermodel, KripkeModel, ModelError};
use crate::parse::{parse_formula, parse_sequent, parse_term, ParseError};
use crate::search::{SearchResult, SearchStats};
use crate::sequent::Multiset;
use crate::syntax::Signature;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("at node {path:?}: {what}: {error}")]
    Parse { path: Vec<usize>, what: String, error: ParseError },
    #[error("at node {path:?}: unknown rule {rule}")]
    Rule { path: Vec<usize>, rule: String },
    #[error("model: {0}")]
    Model(#[from] ModelError),
    #[error("predicate {pred}: {msg}")]
    Predicate { pred: String, msg: String },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SplitJson {
    pub left_ante: Vec<String>,
    pub left_succ: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EcutJson {
    pub formula: String,
    pub m: usize,
    pub n: usize,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct MetaJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formula: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigen: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<SplitJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ecut: Option<EcutJson>,
}

impl MetaJson {
    fn is_empty(&self) -> bool {
        self.formula.is_none() && self.eigen.is_none() && self.witness.is_none() && self.split.is_none() && self.ecut.is_none()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DerivationJson {
    pub rule: String,
    pub conclusion: String,
    #[serde(default)]
    pub premises: Vec<DerivationJson>,
    #[serde(default, skip_serializing_if = "MetaJson::is_empty")]
    pub meta: MetaJson,
}

fn side_text(m: &Multiset) -> Vec<String> {
    m.iter().map(|f| f.to_string()).collect()
}

impl From<&Derivation> for DerivationJson {
    fn from(d: &Derivation) -> DerivationJson {
        let m = &d.meta;
        DerivationJson {
            rule: d.rule.name().to_string(),
            conclusion: d.conclusion.to_string(),
            premises: d.premises.iter().map(DerivationJson::from).collect(),
            meta: MetaJson {
                formula: m.formula.as_ref().map(|f| f.to_string()),
                eigen: m.eigen.clone(),
                witness: m.witness.as_ref().map(|t| t.to_string()),
                split: m.split.as_ref().map(|s| SplitJson { left_ante: side_text(&s.left_ante), left_succ: side_text(&s.left_succ) }),
                ecut: m.ecut.as_ref().map(|e| EcutJson { formula: e.formula.to_string(), m: e.m, n: e.n }),
            },
        }
    }
}

impl DerivationJson {
    pub fn to_derivation(&self) -> Result<Derivation, JsonError> {
        self.build(&mut Vec::new(), &mut Signature::new())
    }

    fn build(&self, path: &mut Vec<usize>, sig: &mut Signature) -> Result<Derivation, JsonError> {
        let at = |path: &[usize], what: &str, error: ParseError| JsonError::Parse { path: path.to_vec(), what: what.to_string(), error };
        let rule: RuleId = self.rule.parse().map_err(|_| JsonError::Rule { path: path.clone(), rule: self.rule.clone() })?;
        let conclusion = parse_sequent(&self.conclusion, sig).map_err(|e| at(path, "conclusion", e))?;
        let formula_list = |sig: &mut Signature, items: &[String], path: &[usize]| -> Result<Multiset, JsonError> {
            items.iter().map(|t| parse_formula(t, sig).map_err(|e| at(path, "split", e))).collect()
        };
        let m = &self.meta;
        let meta = Meta {
            formula: m.formula.as_deref().map(|t| parse_formula(t, sig)).transpose().map_err(|e| at(path, "formula", e))?,
            eigen: m.eigen.clone(),
            witness: m.witness.as_deref().map(|t| parse_term(t, sig)).transpose().map_err(|e| at(path, "witness", e))?,
            split: match &m.split {
                Some(s) => Some(Split { left_ante: formula_list(sig, &s.left_ante, path)?, left_succ: formula_list(sig, &s.left_succ, path)? }),
                None => None,
            },
            ecut: match &m.ecut {
                Some(e) => Some(EcutMeta {
                    formula: parse_formula(&e.formula, sig).map_err(|err| at(path, "ecut formula", err))?,
                    m: e.m,
                    n: e.n,
                }),
                None => None,
            },
        };
        let mut premises = Vec::new();
        for (i, p) in self.premises.iter().enumerate() {
            path.push(i);
            premises.push(p.build(path, sig)?);
            path.pop();
        }
        Ok(Derivation::new(rule, conclusion, premises, meta))
    }
}

pub fn derivation_to_json(d: &Derivation) -> serde_json::Value {
    serde_json::to_value(DerivationJson::from(d)).expect("plain data")
}

pub fn derivation_from_json(text: &str) -> Result<Derivation, JsonError> {
    let j: DerivationJson = serde_json::from_str(text)?;
    j.to_derivation()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PredicateJson {
    pub arity: usize,
    #[serde(default)]
    pub extension: BTreeMap<String, Vec<Vec<String>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelJson {
    pub worlds: Vec<String>,
    #[serde(default)]
    pub order: Vec<(String, String)>,
    pub domains: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub constants: BTreeMap<String, String>,
    #[serde(default)]
    pub predicates: BTreeMap<String, PredicateJson>,
}

impl From<&KripkeModel> for ModelJson {
    fn from(m: &KripkeModel) -> ModelJson {
        let worlds = m.worlds().to_vec();
        let predicates = m
            .predicate_tables()
            .into_iter()
            .map(|(p, arity, per_world)| {
                let extension = worlds.iter().cloned().zip(per_world).filter(|(_, t)| !t.is_empty()).collect();
                (p, PredicateJson { arity, extension })
            })
            .collect();
        ModelJson {
            order: m.order_pairs().into_iter().filter(|(a, b)| a != b).collect(),
            domains: worlds.iter().enumerate().map(|(i, w)| (w.clone(), m.domain(i))).collect(),
            constants: m.constant_map(),
            predicates,
            worlds,
        }
    }
}

impl ModelJson {
    /// Builds the model; validity is left to [`KripkeModel::validate`].
    pub fn to_model(&self) -> Result<KripkeModel, JsonError> {
        let mut m = KripkeModel::new(&self.worlds)?;
        for (a, b) in &self.order {
            m.add_order(a, b)?;
        }
        m.close_order();
        for (w, elems) in &self.domains {
            m.set_domain(w, elems)?;
        }
        for (c, e) in &self.constants {
            m.set_constant(c, e);
        }
        for (p, table) in &self.predicates {
            m.declare_predicate(p, table.arity);
            for (w, tuples) in &table.extension {
                for t in tuples {
                    if t.len() != table.arity {
                        return Err(JsonError::Predicate { pred: p.clone(), msg: format!("tuple {t:?} does not have {} entries", table.arity) });
                    }
                    m.add_fact(p, w, t)?;
                }
            }
        }
        Ok(m)
    }
}

pub fn model_to_json(m: &KripkeModel) -> serde_json::Value {
    serde_json::to_value(ModelJson::from(m)).expect("plain data")
}

pub fn model_from_json(text: &str) -> Result<KripkeModel, JsonError> {
    let j: ModelJson = serde_json::from_str(text)?;
    j.to_model()
}

pub fn countermodel_to_json(cm: &Countermodel) -> serde_json::Value {
    serde_json::json!({
        "model": model_to_json(&cm.model),
        "world": cm.world,
        "assignment": cm.assignment,
    })
}

pub fn stats_to_json(s: &SearchStats) -> serde_json::Value {
    serde_json::json!({
        "steps": s.steps,
        "depth_hit": s.depth_hit,
        "multiplicity_hit": s.multiplicity_hit,
        "step_limit_hit": s.step_limit_hit,
    })
}

pub fn search_result_to_json(r: &SearchResult) -> serde_json::Value {
    match r {
        SearchResult::Proved(d) => serde_json::json!({"status": "proved", "derivation": derivation_to_json(d)}),
        SearchResult::Refuted(cm, s) => {
            serde_json::json!({"status": "refuted", "countermodel": countermodel_to_json(cm), "stats": stats_to_json(s)})
        }
        SearchResult::NotProvedWithinLimits(s) => serde_json::json!({"status": "not-proved", "stats": stats_to_json(s)}),
    }
}

pub fn trace_to_json(trace: &[TraceStep]) -> serde_json::Value {
    serde_json::to_value(trace).expect("plain data")
}
