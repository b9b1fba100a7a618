use super::{Formula, Term};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// The seven general syllogistic schemes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BaseScheme {
    GeneralizedModusPonens,
    GeneralizedContraposition,
    HypotheticalSyllogism1,
    HypotheticalSyllogism3,
    GeneralizedModusTollens,
    DisjunctiveSyllogism,
    GeneralizedDilemma,
}

impl BaseScheme {
    pub const ALL: [BaseScheme; 7] = [
        BaseScheme::GeneralizedModusPonens,
        BaseScheme::GeneralizedContraposition,
        BaseScheme::HypotheticalSyllogism1,
        BaseScheme::HypotheticalSyllogism3,
        BaseScheme::GeneralizedModusTollens,
        BaseScheme::DisjunctiveSyllogism,
        BaseScheme::GeneralizedDilemma,
    ];

    pub fn key(self) -> &'static str {
        match self {
            BaseScheme::GeneralizedModusPonens => "gmp",
            BaseScheme::GeneralizedContraposition => "gc",
            BaseScheme::HypotheticalSyllogism1 => "hs1",
            BaseScheme::HypotheticalSyllogism3 => "hs3",
            BaseScheme::GeneralizedModusTollens => "gmt",
            BaseScheme::DisjunctiveSyllogism => "ds",
            BaseScheme::GeneralizedDilemma => "gd",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            BaseScheme::GeneralizedModusPonens => "generalized modus ponens",
            BaseScheme::GeneralizedContraposition => "generalized contraposition",
            BaseScheme::HypotheticalSyllogism1 => "hypothetical syllogism 1",
            BaseScheme::HypotheticalSyllogism3 => "hypothetical syllogism 3",
            BaseScheme::GeneralizedModusTollens => "generalized modus tollens",
            BaseScheme::DisjunctiveSyllogism => "disjunctive syllogism",
            BaseScheme::GeneralizedDilemma => "generalized dilemma",
        }
    }

    pub fn from_key(key: &str) -> Option<BaseScheme> {
        BaseScheme::ALL.into_iter().find(|b| b.key() == key)
    }
}

/// Surface variation applied to a base scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    Base,
    Negation,
    ComplexPredicates,
    DeMorgan,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::Base,
        Variant::Negation,
        Variant::ComplexPredicates,
        Variant::DeMorgan,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Variant::Base => "base",
            Variant::Negation => "negation",
            Variant::ComplexPredicates => "complex",
            Variant::DeMorgan => "demorgan",
        }
    }

    pub fn from_key(key: &str) -> Option<Variant> {
        Variant::ALL.into_iter().find(|v| v.key() == key)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SchemeId {
    pub base: BaseScheme,
    pub variant: Variant,
}

impl SchemeId {
    pub fn new(base: BaseScheme, variant: Variant) -> Self {
        SchemeId { base, variant }
    }

    /// All 28 ids, base-major.
    pub fn all() -> impl Iterator<Item = SchemeId> {
        BaseScheme::ALL
            .into_iter()
            .flat_map(|b| Variant::ALL.into_iter().map(move |v| SchemeId::new(b, v)))
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.base.key(), self.variant.key())
    }
}

impl FromStr for SchemeId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (b, v) = s
            .split_once(':')
            .ok_or_else(|| format!("scheme id `{s}` must look like `gmp:base`"))?;
        let base = BaseScheme::from_key(&b.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown base scheme `{b}`"))?;
        let variant = Variant::from_key(&v.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown variant `{v}`"))?;
        Ok(SchemeId::new(base, variant))
    }
}

impl Serialize for SchemeId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SchemeId {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A formal argument scheme over predicate placeholders (`F`, `G`, …) and
/// constant placeholders (`a`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormalScheme {
    pub id: SchemeId,
    pub premises: Vec<Formula>,
    pub conclusion: Formula,
    pub predicate_placeholders: Vec<String>,
    pub constant_placeholders: Vec<String>,
}

impl FormalScheme {
    fn new(id: SchemeId, premises: Vec<Formula>, conclusion: Formula) -> Self {
        let mut preds: Vec<String> = Vec::new();
        let mut consts: Vec<String> = Vec::new();
        for f in premises.iter().chain(std::iter::once(&conclusion)) {
            for p in f.predicates() {
                if !preds.contains(&p) {
                    preds.push(p);
                }
            }
            for c in f.constants() {
                if !consts.contains(&c) {
                    consts.push(c);
                }
            }
        }
        preds.sort();
        consts.sort();
        FormalScheme {
            id,
            premises,
            conclusion,
            predicate_placeholders: preds,
            constant_placeholders: consts,
        }
    }
}

fn x() -> Term {
    Term::var("x")
}

fn a() -> Term {
    Term::constant("a")
}

fn p(name: &str, t: Term) -> Formula {
    Formula::atom(name, t)
}

fn not(f: Formula) -> Formula {
    Formula::not(f)
}

fn and(l: Formula, r: Formula) -> Formula {
    Formula::and(l, r)
}

fn or(l: Formula, r: Formula) -> Formula {
    Formula::or(l, r)
}

fn imp(l: Formula, r: Formula) -> Formula {
    Formula::implies(l, r)
}

/// `∀x antecedent(x) → consequent(x)`, both built from a term-parametric closure.
fn every(antecedent: impl Fn(Term) -> Formula, consequent: impl Fn(Term) -> Formula) -> Formula {
    Formula::forall("x", imp(antecedent(x()), consequent(x())))
}

fn build(id: SchemeId) -> FormalScheme {
    use BaseScheme::*;
    use Variant::*;

    let (premises, conclusion) = match (id.base, id.variant) {
        (GeneralizedModusPonens, Base) => (
            vec![every(|t| p("F", t), |t| p("G", t)), p("F", a())],
            p("G", a()),
        ),
        (GeneralizedModusPonens, Negation) => (
            vec![every(|t| p("F", t), |t| not(p("G", t))), p("F", a())],
            not(p("G", a())),
        ),
        (GeneralizedModusPonens, ComplexPredicates) => (
            vec![
                every(|t| and(p("F", t.clone()), p("G", t)), |t| p("H", t)),
                and(p("F", a()), p("G", a())),
            ],
            p("H", a()),
        ),
        (GeneralizedModusPonens, DeMorgan) => (
            vec![
                every(|t| p("F", t), |t| not(or(p("G", t.clone()), p("H", t)))),
                p("F", a()),
            ],
            and(not(p("G", a())), not(p("H", a()))),
        ),

        (GeneralizedContraposition, Base) => (
            vec![every(|t| not(p("F", t)), |t| not(p("G", t))), p("G", a())],
            p("F", a()),
        ),
        (GeneralizedContraposition, Negation) => (
            vec![every(|t| not(p("F", t)), |t| not(p("G", t))), not(p("F", a()))],
            not(p("G", a())),
        ),
        (GeneralizedContraposition, ComplexPredicates) => (
            vec![
                every(|t| not(p("F", t)), |t| not(and(p("G", t.clone()), p("H", t)))),
                and(p("G", a()), p("H", a())),
            ],
            p("F", a()),
        ),
        (GeneralizedContraposition, DeMorgan) => (
            vec![
                every(|t| not(p("F", t)), |t| or(not(p("G", t.clone())), not(p("H", t)))),
                and(p("G", a()), p("H", a())),
            ],
            p("F", a()),
        ),

        (HypotheticalSyllogism1, Base) => (
            vec![
                every(|t| p("F", t), |t| p("G", t)),
                every(|t| p("G", t), |t| p("H", t)),
            ],
            every(|t| p("F", t), |t| p("H", t)),
        ),
        (HypotheticalSyllogism1, Negation) => (
            vec![
                every(|t| p("F", t), |t| p("G", t)),
                every(|t| p("G", t), |t| not(p("H", t))),
            ],
            every(|t| p("F", t), |t| not(p("H", t))),
        ),
        (HypotheticalSyllogism1, ComplexPredicates) => (
            vec![
                every(|t| and(p("F", t.clone()), p("G", t)), |t| p("H", t)),
                every(|t| p("H", t), |t| p("I", t)),
            ],
            every(|t| and(p("F", t.clone()), p("G", t)), |t| p("I", t)),
        ),
        (HypotheticalSyllogism1, DeMorgan) => (
            vec![
                every(|t| p("F", t), |t| p("G", t)),
                every(|t| p("G", t), |t| not(or(p("H", t.clone()), p("I", t)))),
            ],
            every(|t| p("F", t), |t| and(not(p("H", t.clone())), not(p("I", t)))),
        ),

        (HypotheticalSyllogism3, Base) => (
            vec![
                imp(p("F", a()), p("G", a())),
                every(|t| p("G", t), |t| p("H", t)),
            ],
            imp(p("F", a()), p("H", a())),
        ),
        (HypotheticalSyllogism3, Negation) => (
            vec![
                imp(p("F", a()), p("G", a())),
                every(|t| p("G", t), |t| not(p("H", t))),
            ],
            imp(p("F", a()), not(p("H", a()))),
        ),
        (HypotheticalSyllogism3, ComplexPredicates) => (
            vec![
                imp(and(p("F", a()), p("G", a())), p("H", a())),
                every(|t| p("H", t), |t| p("I", t)),
            ],
            imp(and(p("F", a()), p("G", a())), p("I", a())),
        ),
        (HypotheticalSyllogism3, DeMorgan) => (
            vec![
                imp(p("F", a()), p("G", a())),
                every(|t| p("G", t), |t| not(or(p("H", t.clone()), p("I", t)))),
            ],
            imp(p("F", a()), and(not(p("H", a())), not(p("I", a())))),
        ),

        (GeneralizedModusTollens, Base) => (
            vec![every(|t| p("F", t), |t| p("G", t)), not(p("G", a()))],
            not(p("F", a())),
        ),
        (GeneralizedModusTollens, Negation) => (
            vec![every(|t| p("F", t), |t| not(p("G", t))), p("G", a())],
            not(p("F", a())),
        ),
        (GeneralizedModusTollens, ComplexPredicates) => (
            vec![
                every(|t| and(p("F", t.clone()), p("G", t)), |t| p("H", t)),
                not(p("H", a())),
            ],
            not(and(p("F", a()), p("G", a()))),
        ),
        (GeneralizedModusTollens, DeMorgan) => (
            vec![
                every(|t| and(p("F", t.clone()), p("G", t)), |t| p("H", t)),
                not(p("H", a())),
            ],
            or(not(p("F", a())), not(p("G", a()))),
        ),

        (DisjunctiveSyllogism, Base) => (
            vec![
                every(|t| p("F", t), |t| or(p("G", t.clone()), p("H", t))),
                and(p("F", a()), not(p("G", a()))),
            ],
            p("H", a()),
        ),
        (DisjunctiveSyllogism, Negation) => (
            vec![
                every(|t| p("F", t), |t| or(not(p("G", t.clone())), p("H", t))),
                and(p("F", a()), p("G", a())),
            ],
            p("H", a()),
        ),
        (DisjunctiveSyllogism, ComplexPredicates) => (
            vec![
                every(
                    |t| and(p("F", t.clone()), p("G", t)),
                    |t| or(p("H", t.clone()), p("I", t)),
                ),
                and(and(p("F", a()), p("G", a())), not(p("H", a()))),
            ],
            p("I", a()),
        ),
        (DisjunctiveSyllogism, DeMorgan) => (
            vec![
                every(|t| not(or(p("G", t.clone()), p("H", t))), |t| not(p("F", t))),
                and(p("F", a()), not(p("G", a()))),
            ],
            p("H", a()),
        ),

        (GeneralizedDilemma, Base) => (
            vec![
                every(|t| p("F", t), |t| p("H", t)),
                every(|t| p("G", t), |t| p("H", t)),
                or(p("F", a()), p("G", a())),
            ],
            p("H", a()),
        ),
        (GeneralizedDilemma, Negation) => (
            vec![
                every(|t| p("F", t), |t| not(p("H", t))),
                every(|t| p("G", t), |t| not(p("H", t))),
                or(p("F", a()), p("G", a())),
            ],
            not(p("H", a())),
        ),
        (GeneralizedDilemma, ComplexPredicates) => (
            vec![
                every(|t| p("F", t), |t| and(p("H", t.clone()), p("I", t))),
                every(|t| p("G", t), |t| and(p("H", t.clone()), p("I", t))),
                or(p("F", a()), p("G", a())),
            ],
            and(p("H", a()), p("I", a())),
        ),
        (GeneralizedDilemma, DeMorgan) => (
            vec![
                every(|t| not(p("H", t)), |t| not(or(p("F", t.clone()), p("G", t)))),
                or(p("F", a()), p("G", a())),
            ],
            p("H", a()),
        ),
    };
    FormalScheme::new(id, premises, conclusion)
}

/// The full catalog: 7 base schemes × 4 variants, base-major order.
pub fn scheme_catalog() -> Vec<FormalScheme> {
    SchemeId::all().map(build).collect()
}

pub fn scheme_by_id(id: SchemeId) -> FormalScheme {
    build(id)
}
