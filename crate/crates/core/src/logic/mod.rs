//! Monadic first-order formulas, the syllogistic scheme catalog and the
//! finite-model entailment checker.
//!
//! Formulas are written in a small prefix notation for audit and storage:
//!
//! ```text
//! (forall ?x (-> (F ?x) (G ?x)))
//! (and (F a) (not (G a)))
//! ```
//!
//! Variables carry a `?` sigil, every other term is a constant. Symbols that
//! contain whitespace, parentheses or quotes are written as JSON-style quoted
//! strings.

mod catalog;
mod check;
mod syntax;

pub use catalog::{scheme_catalog, scheme_by_id, BaseScheme, FormalScheme, SchemeId, Variant};
pub use check::{
    decide, entails, entails_auto, find_countermodel, satisfiable, small_model_bound,
    validate_scheme, CheckError, Countermodel, ValidityReport, ENUMERATION_TYPE_LIMIT,
};
pub use syntax::ParseError;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A term: either a constant placeholder / grounded symbol, or a bound variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Const(String),
    Var(String),
}

impl Term {
    pub fn constant(name: impl Into<String>) -> Self {
        Term::Const(name.into())
    }

    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }
}

/// Formula AST. Predicates are unary by construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom { pred: String, term: Term },
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall { var: String, body: Box<Formula> },
}

impl Formula {
    pub fn atom(pred: impl Into<String>, term: Term) -> Self {
        Formula::Atom {
            pred: pred.into(),
            term,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn forall(var: impl Into<String>, body: Formula) -> Self {
        Formula::Forall {
            var: var.into(),
            body: Box::new(body),
        }
    }

    /// Parses the prefix notation produced by `Display`.
    pub fn parse(src: &str) -> Result<Formula, ParseError> {
        syntax::parse_formula(src)
    }

    /// Negation with double negation removed.
    pub fn negated(&self) -> Formula {
        match self {
            Formula::Not(inner) => (**inner).clone(),
            other => Formula::not(other.clone()),
        }
    }

    /// Predicate symbols in order of first appearance.
    pub fn predicates(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.visit_symbols(&mut |sym| {
            if let Symbol::Pred(p) = sym {
                if !out.iter().any(|q| q == p) {
                    out.push(p.to_string());
                }
            }
        });
        out
    }

    /// Constant symbols in order of first appearance.
    pub fn constants(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.visit_symbols(&mut |sym| {
            if let Symbol::Const(c) = sym {
                if !out.iter().any(|q| q == c) {
                    out.push(c.to_string());
                }
            }
        });
        out
    }

    /// Variables that occur without an enclosing binder.
    pub fn free_variables(&self) -> BTreeSet<String> {
        fn walk(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match f {
                Formula::Atom { term, .. } => {
                    if let Term::Var(v) = term {
                        if !bound.contains(v) {
                            out.insert(v.clone());
                        }
                    }
                }
                Formula::Not(a) => walk(a, bound, out),
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                    walk(a, bound, out);
                    walk(b, bound, out);
                }
                Formula::Forall { var, body } => {
                    bound.push(var.clone());
                    walk(body, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_variables().is_empty()
    }

    pub fn is_quantified(&self) -> bool {
        match self {
            Formula::Atom { .. } => false,
            Formula::Not(a) => a.is_quantified(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.is_quantified() || b.is_quantified()
            }
            Formula::Forall { .. } => true,
        }
    }

    /// Renames predicate and constant symbols. Symbols missing from the maps
    /// are kept.
    pub fn rename(
        &self,
        preds: &BTreeMap<String, String>,
        consts: &BTreeMap<String, String>,
    ) -> Formula {
        match self {
            Formula::Atom { pred, term } => {
                let pred = preds.get(pred).cloned().unwrap_or_else(|| pred.clone());
                let term = match term {
                    Term::Const(c) => Term::Const(consts.get(c).cloned().unwrap_or_else(|| c.clone())),
                    Term::Var(v) => Term::Var(v.clone()),
                };
                Formula::Atom { pred, term }
            }
            Formula::Not(a) => Formula::not(a.rename(preds, consts)),
            Formula::And(a, b) => Formula::and(a.rename(preds, consts), b.rename(preds, consts)),
            Formula::Or(a, b) => Formula::or(a.rename(preds, consts), b.rename(preds, consts)),
            Formula::Implies(a, b) => {
                Formula::implies(a.rename(preds, consts), b.rename(preds, consts))
            }
            Formula::Forall { var, body } => Formula::forall(var.clone(), body.rename(preds, consts)),
        }
    }

    fn visit_symbols<'a>(&'a self, f: &mut impl FnMut(Symbol<'a>)) {
        match self {
            Formula::Atom { pred, term } => {
                f(Symbol::Pred(pred));
                if let Term::Const(c) = term {
                    f(Symbol::Const(c));
                }
            }
            Formula::Not(a) => a.visit_symbols(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.visit_symbols(f);
                b.visit_symbols(f);
            }
            Formula::Forall { body, .. } => body.visit_symbols(f),
        }
    }
}

enum Symbol<'a> {
    Pred(&'a str),
    Const(&'a str),
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        syntax::write_formula(self, f)
    }
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Formula::parse(s)
    }
}

impl serde::Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Formula {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Formula::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbols_in_first_appearance_order() {
        let f = Formula::parse("(forall ?x (-> (and (G ?x) (F ?x)) (H a)))").unwrap();
        assert_eq!(f.predicates(), vec!["G", "F", "H"]);
        assert_eq!(f.constants(), vec!["a"]);
        assert!(f.is_closed());
    }

    #[test]
    fn free_variable_detected() {
        let f = Formula::atom("F", Term::var("x"));
        assert_eq!(f.free_variables().into_iter().collect::<Vec<_>>(), vec!["x"]);
    }

    #[test]
    fn negated_removes_double_negation() {
        let g = Formula::atom("G", Term::constant("a"));
        assert_eq!(Formula::not(g.clone()).negated(), g);
        assert_eq!(g.negated(), Formula::not(g.clone()));
    }

    #[test]
    fn rename_keeps_variables() {
        let f = Formula::parse("(forall ?x (-> (F ?x) (G a)))").unwrap();
        let preds = BTreeMap::from([("F".to_string(), "P1".to_string())]);
        let consts = BTreeMap::from([("a".to_string(), "GP1BB".to_string())]);
        assert_eq!(
            f.rename(&preds, &consts).to_string(),
            "(forall ?x (-> (P1 ?x) (G GP1BB)))"
        );
    }
}
