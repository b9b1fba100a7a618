//! English surface forms for catalog formulas.
//!
//! Rendering is compositional: a sentence pattern for the top-level shape
//! (universal, ground statement, ground conditional) is filled with
//! predication phrases built from the phrase patterns. Pathway slots render
//! as `<name> pathway`, gene slots as `Gene <symbol>`.

use crate::logic::{Formula, Term};
use regex::Regex;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TemplateError {
    #[error("no display name bound for `{0}`")]
    UnboundPlaceholder(String),
    #[error("no sentence pattern for formula {0}")]
    UnsupportedShape(String),
}

/// Polarity prefix applied to a conclusion sentence.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConclusionWrapper {
    #[default]
    None,
    AssertTrue,
    AssertFalse,
}

impl ConclusionWrapper {
    pub fn prefix(self) -> &'static str {
        match self {
            ConclusionWrapper::None => "",
            ConclusionWrapper::AssertTrue => "It is true that ",
            ConclusionWrapper::AssertFalse => "It is false that ",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SentencePattern {
    pub shape: &'static str,
    pub pattern: &'static str,
}

pub const PATTERNS: &[SentencePattern] = &[
    SentencePattern {
        shape: "UniversalImplication",
        pattern: "Every member of {F} pathway is {consequent}",
    },
    SentencePattern {
        shape: "UniversalGeneral",
        pattern: "Everything that is {antecedent} is {consequent}",
    },
    SentencePattern {
        shape: "GroundStatement",
        pattern: "Gene {a} is {predication}",
    },
    SentencePattern {
        shape: "GroundConditional",
        pattern: "If Gene {a} is {antecedent}, then Gene {a} is {consequent}",
    },
    SentencePattern {
        shape: "AtomicMembership",
        pattern: "a member of {F} pathway",
    },
    SentencePattern {
        shape: "NegatedAtomic",
        pattern: "not a member of {F} pathway",
    },
    SentencePattern {
        shape: "ConjunctivePredicate",
        pattern: "{left} and {right}",
    },
    SentencePattern {
        shape: "DisjunctivePredicate",
        pattern: "{left} or {right}",
    },
    SentencePattern {
        shape: "NegatedDisjunction",
        pattern: "neither {left} nor {right}",
    },
    SentencePattern {
        shape: "NegatedConjunction",
        pattern: "not both {left} and {right}",
    },
];

fn pattern(shape: &str) -> &'static str {
    PATTERNS
        .iter()
        .find(|p| p.shape == shape)
        .map(|p| p.pattern)
        .expect("shape in table")
}

fn fill(shape: &str, slots: &[(&str, &str)]) -> String {
    let mut out = pattern(shape).to_string();
    for (name, value) in slots {
        out = out.replace(&format!("{{{name}}}"), value);
    }
    out
}

/// Pattern table plus wrapper prefixes, for audit and localization.
pub fn pattern_table_json() -> serde_json::Value {
    serde_json::json!({
        "patterns": PATTERNS,
        "wrappers": {
            "assert_true": ConclusionWrapper::AssertTrue.prefix(),
            "assert_false": ConclusionWrapper::AssertFalse.prefix(),
        }
    })
}

/// Display names for predicate and constant symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lexicon {
    pub predicates: BTreeMap<String, String>,
    pub constants: BTreeMap<String, String>,
}

impl Lexicon {
    fn pred(&self, p: &str) -> Result<&str, TemplateError> {
        self.predicates
            .get(p)
            .map(String::as_str)
            .ok_or_else(|| TemplateError::UnboundPlaceholder(p.to_string()))
    }

    fn constant(&self, c: &str) -> Result<&str, TemplateError> {
        self.constants
            .get(c)
            .map(String::as_str)
            .ok_or_else(|| TemplateError::UnboundPlaceholder(c.to_string()))
    }
}

pub fn wrap_conclusion(sentence: &str, w: ConclusionWrapper) -> String {
    format!("{}{sentence}", w.prefix())
}

/// Renders a closed catalog-shaped formula.
pub fn render(f: &Formula, lex: &Lexicon) -> Result<String, TemplateError> {
    let unsupported = || TemplateError::UnsupportedShape(f.to_string());
    match f {
        Formula::Forall { var, body } => match &**body {
            Formula::Implies(ante, cons) => {
                let t = Term::Var(var.clone());
                let consequent = phrase(cons, &t, lex)?.ok_or_else(unsupported)?;
                if let Formula::Atom { pred, term } = &**ante {
                    if *term == t {
                        return Ok(fill("UniversalImplication", &[("F", lex.pred(pred)?), ("consequent", &consequent)]));
                    }
                }
                let antecedent = phrase(ante, &t, lex)?.ok_or_else(unsupported)?;
                Ok(fill("UniversalGeneral", &[("antecedent", &antecedent), ("consequent", &consequent)]))
            }
            _ => Err(unsupported()),
        },
        Formula::Implies(ante, cons) => {
            let c = single_constant(f).ok_or_else(unsupported)?;
            let t = Term::Const(c.clone());
            let antecedent = phrase(ante, &t, lex)?.ok_or_else(unsupported)?;
            let consequent = phrase(cons, &t, lex)?.ok_or_else(unsupported)?;
            Ok(fill(
                "GroundConditional",
                &[("a", lex.constant(&c)?), ("antecedent", &antecedent), ("consequent", &consequent)],
            ))
        }
        _ => {
            let c = single_constant(f).ok_or_else(unsupported)?;
            let predication = phrase(f, &Term::Const(c.clone()), lex)?.ok_or_else(unsupported)?;
            Ok(fill("GroundStatement", &[("a", lex.constant(&c)?), ("predication", &predication)]))
        }
    }
}

fn single_constant(f: &Formula) -> Option<String> {
    if f.is_quantified() {
        return None;
    }
    match f.constants().as_slice() {
        [c] => Some(c.clone()),
        _ => None,
    }
}

/// Predication phrase for a body whose atoms all apply to `t`. `Ok(None)`
/// marks a shape outside the table.
fn phrase(f: &Formula, t: &Term, lex: &Lexicon) -> Result<Option<String>, TemplateError> {
    let r = match f {
        Formula::Atom { pred, term } if term == t => fill("AtomicMembership", &[("F", lex.pred(pred)?)]),
        Formula::Not(inner) => match &**inner {
            Formula::Atom { pred, term } if term == t => fill("NegatedAtomic", &[("F", lex.pred(pred)?)]),
            Formula::Or(l, r) => match (positive(l, t, lex)?, positive(r, t, lex)?) {
                (Some(l), Some(r)) => fill("NegatedDisjunction", &[("left", &l), ("right", &r)]),
                _ => return Ok(None),
            },
            Formula::And(l, r) => match (positive(l, t, lex)?, positive(r, t, lex)?) {
                (Some(l), Some(r)) => fill("NegatedConjunction", &[("left", &l), ("right", &r)]),
                _ => return Ok(None),
            },
            _ => return Ok(None),
        },
        Formula::And(l, r) => {
            if matches!(&**l, Formula::Or(..)) || matches!(&**r, Formula::Or(..) | Formula::And(..)) {
                return Ok(None);
            }
            match (phrase(l, t, lex)?, phrase(r, t, lex)?) {
                (Some(l), Some(r)) => fill("ConjunctivePredicate", &[("left", &l), ("right", &r)]),
                _ => return Ok(None),
            }
        }
        Formula::Or(l, r) => {
            if matches!(&**l, Formula::And(..)) || matches!(&**r, Formula::And(..) | Formula::Or(..)) {
                return Ok(None);
            }
            match (phrase(l, t, lex)?, phrase(r, t, lex)?) {
                (Some(l), Some(r)) => fill("DisjunctivePredicate", &[("left", &l), ("right", &r)]),
                _ => return Ok(None),
            }
        }
        _ => return Ok(None),
    };
    Ok(Some(r))
}

/// Only bare atoms may appear under `neither … nor` / `not both`.
fn positive(f: &Formula, t: &Term, lex: &Lexicon) -> Result<Option<String>, TemplateError> {
    match f {
        Formula::Atom { .. } => phrase(f, t, lex),
        _ => Ok(None),
    }
}

/// Recovers display names from a sentence rendered from `template`. Returns
/// `None` when the sentence does not match or names cannot be separated
/// unambiguously.
pub fn parse_back(template: &Formula, sentence: &str) -> Option<Lexicon> {
    const MARK: char = '\u{1}';
    let mut marker_lex = Lexicon::default();
    for p in template.predicates() {
        marker_lex.predicates.insert(p.clone(), format!("{MARK}p{p}{MARK}"));
    }
    for c in template.constants() {
        marker_lex.constants.insert(c.clone(), format!("{MARK}c{c}{MARK}"));
    }
    let skeleton = render(template, &marker_lex).ok()?;
    let mut regex = String::from("^");
    let mut slots = Vec::new();
    for (i, piece) in skeleton.split(MARK).enumerate() {
        if i % 2 == 0 {
            regex.push_str(&regex::escape(piece));
        } else {
            regex.push_str("(.+?)");
            slots.push(piece.to_string());
        }
    }
    regex.push('$');
    let caps = Regex::new(&regex).ok()?.captures(sentence)?;
    let mut lex = Lexicon::default();
    for (i, slot) in slots.iter().enumerate() {
        let value = caps.get(i + 1)?.as_str().to_string();
        let (kind, name) = slot.split_at(1);
        let map = if kind == "p" { &mut lex.predicates } else { &mut lex.constants };
        if let Some(prev) = map.insert(name.to_string(), value.clone()) {
            if prev != value {
                return None;
            }
        }
    }
    (render(template, &lex).ok()? == sentence).then_some(lex)
}
