//! Grounding schemes into labeled argument instances.

mod corpus;
mod search;

pub use corpus::{build_corpus, Corpus, CorpusConfig, SchemeSummary};
pub use search::{binding_is_sound, enumerate_bindings, premise_is_sound};

use crate::logic::{decide, entails_auto, small_model_bound, CheckError, FormalScheme, Formula, SchemeId};
use crate::ontology::{Ontology, OntologyError};
use crate::perturb::PerturbationRecord;
use crate::templates::{render, wrap_conclusion, ConclusionWrapper, Lexicon, TemplateError};
use crate::{derive_seed, Label};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;
/// Subset enumeration for gold premises is exponential; refuse beyond this.
pub const MAX_GOLD_PREMISES: usize = 16;
/// Largest small-model bound verified by exhaustive enumeration; beyond it
/// (a fresh predicate on a four-predicate scheme) the symbolic route decides.
pub const EXHAUSTIVE_VERIFY_BOUND: usize = 16;

#[derive(Debug, Error)]
pub enum InstantiateError {
    #[error(transparent)]
    Ontology(#[from] OntologyError),
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error("binding is not sound for {0}")]
    Unsound(SchemeId),
    #[error("{strategy} is not applicable: {reason}")]
    StrategyInapplicable { strategy: NegativeStrategy, reason: String },
    #[error("no premise subset entails the conclusion of positive instance {0}")]
    NoSufficientSubset(String),
    #[error("instance {id} has several minimal sufficient premise sets: {sets:?}")]
    AmbiguousGold { id: String, sets: Vec<Vec<usize>> },
    #[error("instance {id} has {n} premises; gold enumeration supports at most {MAX_GOLD_PREMISES}")]
    TooManyPremises { id: String, n: usize },
    #[error("ontology has no genes or pathways")]
    EmptyOntology,
    #[error(transparent)]
    Perturb(#[from] crate::perturb::PerturbError),
}

/// Placeholder assignment: predicate → pathway id, constant → gene symbol.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Binding {
    pub predicates: BTreeMap<String, String>,
    pub constants: BTreeMap<String, String>,
}

impl Binding {
    pub fn ground(&self, f: &Formula) -> Formula {
        f.rename(&self.predicates, &self.constants)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NegativeStrategy {
    #[default]
    None,
    WrapperFlip,
    EntitySwap,
    PathwaySwap,
}

impl NegativeStrategy {
    pub const NEGATIVE: [NegativeStrategy; 3] = [
        NegativeStrategy::WrapperFlip,
        NegativeStrategy::EntitySwap,
        NegativeStrategy::PathwaySwap,
    ];

    pub fn key(self) -> &'static str {
        match self {
            NegativeStrategy::None => "none",
            NegativeStrategy::WrapperFlip => "wrapper_flip",
            NegativeStrategy::EntitySwap => "entity_swap",
            NegativeStrategy::PathwaySwap => "pathway_swap",
        }
    }

    pub fn from_key(s: &str) -> Option<NegativeStrategy> {
        [NegativeStrategy::None]
            .into_iter()
            .chain(NegativeStrategy::NEGATIVE)
            .find(|x| x.key() == s)
    }
}

impl fmt::Display for NegativeStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PremiseOrigin {
    Scheme { index: usize },
    Distractor,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Premise {
    pub text: String,
    pub formula: Formula,
    pub origin: PremiseOrigin,
}

/// `formula` is what the conclusion asserts, wrapper included: an
/// `AssertFalse` wrapper around sentence `s` asserts the negation of `s`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conclusion {
    pub text: String,
    pub sentence: String,
    pub wrapper: ConclusionWrapper,
    pub formula: Formula,
}

impl Conclusion {
    /// Renders `content` and wraps it; the asserted formula follows the wrapper.
    pub fn new(content: &Formula, wrapper: ConclusionWrapper, o: &Ontology) -> Result<Conclusion, InstantiateError> {
        let sentence = render_grounded(content, o)?;
        let formula = match wrapper {
            ConclusionWrapper::AssertFalse => content.negated(),
            _ => content.clone(),
        };
        Ok(Conclusion {
            text: wrap_conclusion(&sentence, wrapper),
            sentence,
            wrapper,
            formula,
        })
    }

    /// The unwrapped content formula.
    pub fn content(&self) -> Formula {
        match self.wrapper {
            ConclusionWrapper::AssertFalse => self.formula.negated(),
            _ => self.formula.clone(),
        }
    }

    pub fn rewrapped(&self, wrapper: ConclusionWrapper) -> Conclusion {
        let content = self.content();
        Conclusion {
            text: wrap_conclusion(&self.sentence, wrapper),
            sentence: self.sentence.clone(),
            wrapper,
            formula: match wrapper {
                ConclusionWrapper::AssertFalse => content.negated(),
                _ => content,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleRoute {
    Exhaustive,
    /// Used above [`EXHAUSTIVE_VERIFY_BOUND`].
    Symbolic,
}

/// Build-time oracle results.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub entailed: bool,
    pub route: OracleRoute,
    pub domain_valid: bool,
    pub gold_premises_ok: bool,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArgumentInstance {
    pub schema_version: u32,
    pub instance_id: String,
    pub scheme: SchemeId,
    pub binding: Binding,
    pub premises: Vec<Premise>,
    pub conclusion: Conclusion,
    pub gold_label: Label,
    /// 0-based indices into `premises`, ascending.
    pub gold_premises: Vec<usize>,
    pub negative_strategy: NegativeStrategy,
    pub perturbation: PerturbationRecord,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<Verification>,
}

impl ArgumentInstance {
    pub fn premise_formulas(&self) -> Vec<Formula> {
        self.premises.iter().map(|p| p.formula.clone()).collect()
    }

    pub fn distractor_indices(&self) -> Vec<usize> {
        self.premises
            .iter()
            .enumerate()
            .filter(|(_, p)| p.origin == PremiseOrigin::Distractor)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Pathway ids render through their ontology names; every constant renders
/// as itself.
pub fn render_grounded(f: &Formula, o: &Ontology) -> Result<String, InstantiateError> {
    let mut lex = Lexicon::default();
    for p in f.predicates() {
        let node = o.pathway(&p).ok_or_else(|| OntologyError::UnknownPathway(p.clone()))?;
        lex.predicates.insert(p, node.name.clone());
    }
    for c in f.constants() {
        lex.constants.insert(c.clone(), c);
    }
    Ok(render(f, &lex)?)
}

fn default_id(s: &FormalScheme, b: &Binding, polarity: &str) -> String {
    let key = serde_json::to_string(b).expect("binding serializes");
    format!("{}-{polarity}-{:016x}", s.id, derive_seed(0, &[&key]))
}

fn ground_premises(s: &FormalScheme, b: &Binding, o: &Ontology) -> Result<Vec<Premise>, InstantiateError> {
    s.premises
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let formula = b.ground(f);
            Ok(Premise {
                text: render_grounded(&formula, o)?,
                formula,
                origin: PremiseOrigin::Scheme { index: i },
            })
        })
        .collect()
}

pub fn make_positive(s: &FormalScheme, b: &Binding, o: &Ontology) -> Result<ArgumentInstance, InstantiateError> {
    if !binding_is_sound(s, b, o)? {
        return Err(InstantiateError::Unsound(s.id));
    }
    let premises = ground_premises(s, b, o)?;
    let conclusion = Conclusion::new(&b.ground(&s.conclusion), ConclusionWrapper::None, o)?;
    Ok(ArgumentInstance {
        schema_version: SCHEMA_VERSION,
        instance_id: default_id(s, b, "pos"),
        scheme: s.id,
        binding: b.clone(),
        gold_premises: (0..premises.len()).collect(),
        perturbation: PerturbationRecord::identity(premises.len()),
        premises,
        conclusion,
        gold_label: Label::True,
        negative_strategy: NegativeStrategy::None,
        seed: 0,
        verification: None,
    })
}

fn is_literal(f: &Formula) -> bool {
    match f {
        Formula::Atom { .. } => true,
        Formula::Not(inner) => matches!(**inner, Formula::Atom { .. }),
        _ => false,
    }
}

/// One-character same-class substitutions of `symbol` that name no real gene
/// and none of `avoid`.
pub fn near_miss_candidates(symbol: &str, o: &Ontology, avoid: &[String]) -> Vec<String> {
    let chars: Vec<char> = symbol.chars().collect();
    let mut out = Vec::new();
    for (i, &c) in chars.iter().enumerate() {
        let class: Vec<char> = if c.is_ascii_uppercase() {
            ('A'..='Z').collect()
        } else if c.is_ascii_lowercase() {
            ('a'..='z').collect()
        } else if c.is_ascii_digit() {
            ('0'..='9').collect()
        } else {
            continue;
        };
        for r in class.into_iter().filter(|&r| r != c) {
            let mut v = chars.clone();
            v[i] = r;
            let cand: String = v.into_iter().collect();
            if o.gene(&cand).is_none() && !avoid.contains(&cand) {
                out.push(cand);
            }
        }
    }
    out
}

pub fn make_negative(
    s: &FormalScheme,
    b: &Binding,
    strategy: NegativeStrategy,
    o: &Ontology,
    seed: u64,
) -> Result<ArgumentInstance, InstantiateError> {
    let inapplicable = |reason: &str| InstantiateError::StrategyInapplicable {
        strategy,
        reason: reason.to_string(),
    };
    if !binding_is_sound(s, b, o)? {
        return Err(InstantiateError::Unsound(s.id));
    }
    let premises = ground_premises(s, b, o)?;
    let premise_formulas: Vec<Formula> = premises.iter().map(|p| p.formula.clone()).collect();
    let valid = b.ground(&s.conclusion);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let candidates: Vec<Conclusion> = match strategy {
        NegativeStrategy::None => return Err(inapplicable("a negative needs a strategy")),
        NegativeStrategy::WrapperFlip => {
            let c = if is_literal(&valid) {
                Conclusion::new(&valid.negated(), ConclusionWrapper::None, o)?
            } else {
                Conclusion::new(&valid, ConclusionWrapper::AssertFalse, o)?
            };
            vec![c]
        }
        NegativeStrategy::EntitySwap => {
            let gene = valid.constants().into_iter().last().ok_or_else(|| inapplicable("conclusion names no gene"))?;
            let avoid: Vec<String> = premise_formulas.iter().flat_map(|f| f.constants()).collect();
            let mut options = near_miss_candidates(&gene, o, &avoid);
            if options.is_empty() {
                return Err(inapplicable("no unused one-character variant of the gene symbol"));
            }
            options.shuffle(&mut rng);
            options
                .into_iter()
                .take(8)
                .map(|alt| {
                    let swapped = valid.rename(&BTreeMap::new(), &BTreeMap::from([(gene.clone(), alt)]));
                    Conclusion::new(&swapped, ConclusionWrapper::None, o)
                })
                .collect::<Result<_, _>>()?
        }
        NegativeStrategy::PathwaySwap => {
            let target = valid.predicates().into_iter().last().expect("conclusion has a predicate");
            let ancestors = o.ancestors(&target)?;
            let used: Vec<&String> = b.predicates.values().collect();
            let node = o.pathway(&target).expect("bound");
            let mut siblings: Vec<String> = node
                .parents
                .iter()
                .flat_map(|p| o.children(p).iter().cloned())
                .filter(|c| *c != target)
                .collect();
            siblings.sort();
            siblings.dedup();
            let mut others: Vec<String> = o
                .pathways()
                .map(|n| n.id.clone())
                .filter(|id| *id != target && !siblings.contains(id))
                .collect();
            let ok = |id: &String| !ancestors.contains(id) && !used.contains(&id);
            siblings.retain(ok);
            others.retain(ok);
            siblings.shuffle(&mut rng);
            others.shuffle(&mut rng);
            let model = o.canonical_model();
            let swap = |q: &String| valid.rename(&BTreeMap::from([(target.clone(), q.clone())]), &BTreeMap::new());
            let mut ordered: Vec<Formula> = Vec::new();
            // Prefer swaps whose grounded claim is false in the ontology.
            for group in [&siblings, &others] {
                for q in group.iter() {
                    let f = swap(q);
                    if !model.holds(&f)? {
                        ordered.push(f);
                    }
                }
            }
            for group in [&siblings, &others] {
                for q in group.iter() {
                    let f = swap(q);
                    if !ordered.contains(&f) {
                        ordered.push(f);
                    }
                }
            }
            if ordered.is_empty() {
                return Err(inapplicable("no non-ancestor pathway outside the binding"));
            }
            ordered
                .into_iter()
                .take(8)
                .map(|f| Conclusion::new(&f, ConclusionWrapper::None, o))
                .collect::<Result<_, _>>()?
        }
    };

    for conclusion in candidates {
        if decide(&premise_formulas, &conclusion.formula)? {
            continue;
        }
        return Ok(ArgumentInstance {
            schema_version: SCHEMA_VERSION,
            instance_id: default_id(s, b, "neg"),
            scheme: s.id,
            binding: b.clone(),
            perturbation: PerturbationRecord::identity(premises.len()),
            premises,
            conclusion,
            gold_label: Label::False,
            gold_premises: Vec::new(),
            negative_strategy: strategy,
            seed,
            verification: None,
        });
    }
    Err(inapplicable("every candidate conclusion is still entailed"))
}

/// The unique inclusion-minimal premise subset entailing the conclusion, by
/// enumeration of all subsets. Negative instances have an empty gold set.
pub fn compute_gold_premises(inst: &ArgumentInstance) -> Result<Vec<usize>, InstantiateError> {
    if inst.gold_label == Label::False {
        return Ok(Vec::new());
    }
    let n = inst.premises.len();
    if n > MAX_GOLD_PREMISES {
        return Err(InstantiateError::TooManyPremises {
            id: inst.instance_id.clone(),
            n,
        });
    }
    let formulas = inst.premise_formulas();
    let mut masks: Vec<u32> = (0..(1u32 << n)).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    let mut minimal: Vec<u32> = Vec::new();
    for m in masks {
        if minimal.iter().any(|&k| k & !m == 0) {
            continue;
        }
        let subset: Vec<Formula> = (0..n).filter(|i| m >> i & 1 == 1).map(|i| formulas[i].clone()).collect();
        if decide(&subset, &inst.conclusion.formula)? {
            minimal.push(m);
        }
    }
    let to_indices = |m: u32| (0..n).filter(|i| m >> i & 1 == 1).collect::<Vec<usize>>();
    match minimal.as_slice() {
        [] => Err(InstantiateError::NoSufficientSubset(inst.instance_id.clone())),
        [one] => Ok(to_indices(*one)),
        many => Err(InstantiateError::AmbiguousGold {
            id: inst.instance_id.clone(),
            sets: many.iter().map(|&m| to_indices(m)).collect(),
        }),
    }
}

/// Re-checks an instance: oracle label, truth of premises in the ontology,
/// and gold premise set.
pub fn verify(inst: &ArgumentInstance, o: &Ontology) -> Result<Verification, InstantiateError> {
    let premises = inst.premise_formulas();
    let bound = small_model_bound(premises.iter().chain(std::iter::once(&inst.conclusion.formula)))?;
    let (entailed, route) = if bound <= EXHAUSTIVE_VERIFY_BOUND {
        (entails_auto(&premises, &inst.conclusion.formula)?, OracleRoute::Exhaustive)
    } else {
        (decide(&premises, &inst.conclusion.formula)?, OracleRoute::Symbolic)
    };
    let reverse: BTreeMap<String, String> = inst
        .perturbation
        .synthetic_name_map
        .iter()
        .map(|(real, syn)| (syn.clone(), real.clone()))
        .collect();
    let model = o.canonical_model();
    let mut domain_valid = true;
    for p in &inst.premises {
        let real = p.formula.rename(&BTreeMap::new(), &reverse);
        match model.holds(&real) {
            Ok(true) => {}
            Ok(false) | Err(_) => domain_valid = false,
        }
    }
    let gold_premises_ok = match compute_gold_premises(inst) {
        Ok(g) => g == inst.gold_premises,
        Err(_) => false,
    };
    let label_ok = entailed == inst.gold_label.is_true();
    Ok(Verification {
        entailed,
        route,
        domain_valid,
        gold_premises_ok,
        passed: label_ok && domain_valid && gold_premises_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::scheme_by_id;
    use crate::perturb::{add_distractors, apply_permutation};

    fn scheme(id: &str) -> FormalScheme {
        scheme_by_id(id.parse().unwrap())
    }

    fn two_row() -> Ontology {
        Ontology::from_jsonl_str(
            r#"{"kind":"pathway","id":"D","name":"Disease","parents":[]}
{"kind":"pathway","id":"I","name":"Infectious disease","parents":["D"]}
{"kind":"gene","symbol":"PKQQ","pathways":["I"]}
"#,
        )
        .unwrap()
    }

    fn toy() -> Ontology {
        Ontology::from_jsonl_str(include_str!("../../fixtures/toy_ontology.jsonl")).unwrap()
    }

    #[test]
    fn minimal_ontology_yields_the_expected_binding() {
        let o = two_row();
        let s = scheme("gmp:base");
        let bs = enumerate_bindings(&s, &o, 10, 0).unwrap();
        assert_eq!(bs.len(), 1);
        assert_eq!(bs[0].predicates["F"], "I");
        assert_eq!(bs[0].predicates["G"], "D");
        assert_eq!(bs[0].constants["a"], "PKQQ");
        let inst = make_positive(&s, &bs[0], &o).unwrap();
        assert_eq!(inst.premises[0].text, "Every member of Infectious disease pathway is a member of Disease pathway");
        assert_eq!(inst.premises[1].text, "Gene PKQQ is a member of Infectious disease pathway");
        assert_eq!(inst.conclusion.text, "Gene PKQQ is a member of Disease pathway");
        assert_eq!(inst.gold_premises, vec![0, 1]);
        assert!(verify(&inst, &o).unwrap().passed);
    }

    #[test]
    fn three_pathway_scheme_on_two_pathways_is_empty() {
        assert!(enumerate_bindings(&scheme("hs1:base"), &two_row(), 10, 0).unwrap().is_empty());
    }

    #[test]
    fn capped_enumeration_is_stable() {
        let o = toy();
        let s = scheme("gmp:complex");
        let a = enumerate_bindings(&s, &o, 5, 42).unwrap();
        assert_eq!(a.len(), 5);
        assert_eq!(a, enumerate_bindings(&s, &o, 5, 42).unwrap());
        for b in &a {
            assert!(binding_is_sound(&s, b, &o).unwrap());
        }
    }

    #[test]
    fn unsound_binding_rejected() {
        let o = two_row();
        let b = Binding {
            predicates: [("F".into(), "D".into()), ("G".into(), "I".into())].into(),
            constants: [("a".into(), "PKQQ".into())].into(),
        };
        assert!(matches!(make_positive(&scheme("gmp:base"), &b, &o), Err(InstantiateError::Unsound(_))));
    }

    #[test]
    fn wrapper_flip_negates_a_literal_conclusion() {
        let o = toy();
        let s = scheme("gmp:negation");
        let b = enumerate_bindings(&s, &o, 1, 1).unwrap().remove(0);
        let neg = make_negative(&s, &b, NegativeStrategy::WrapperFlip, &o, 0).unwrap();
        assert_eq!(neg.conclusion.wrapper, ConclusionWrapper::None);
        assert!(!neg.conclusion.text.contains(" not "));
        assert_eq!(neg.gold_label, Label::False);
        assert!(neg.gold_premises.is_empty());
        assert!(verify(&neg, &o).unwrap().passed);
    }

    #[test]
    fn wrapper_flip_wraps_a_complex_conclusion() {
        let o = toy();
        let s = scheme("hs1:base");
        let b = enumerate_bindings(&s, &o, 1, 1).unwrap().remove(0);
        let neg = make_negative(&s, &b, NegativeStrategy::WrapperFlip, &o, 0).unwrap();
        assert_eq!(neg.conclusion.wrapper, ConclusionWrapper::AssertFalse);
        assert!(neg.conclusion.text.starts_with("It is false that Every member of "));
        assert!(verify(&neg, &o).unwrap().passed);
    }

    #[test]
    fn entity_swap_uses_a_fresh_near_miss() {
        let o = toy();
        let s = scheme("gmp:base");
        let b = enumerate_bindings(&s, &o, 1, 1).unwrap().remove(0);
        let neg = make_negative(&s, &b, NegativeStrategy::EntitySwap, &o, 3).unwrap();
        let real = &b.constants["a"];
        let fake = neg.conclusion.formula.constants().remove(0);
        assert_eq!(fake.len(), real.len());
        assert_eq!(fake.chars().zip(real.chars()).filter(|(x, y)| x != y).count(), 1);
        assert!(o.gene(&fake).is_none());
        assert!(verify(&neg, &o).unwrap().passed);
        assert!(matches!(
            make_negative(&scheme("hs1:base"), &enumerate_bindings(&scheme("hs1:base"), &o, 1, 1).unwrap()[0], NegativeStrategy::EntitySwap, &o, 0),
            Err(InstantiateError::StrategyInapplicable { .. })
        ));
    }

    #[test]
    fn pathway_swap_avoids_ancestors() {
        let o = toy();
        let s = scheme("gmp:base");
        for b in enumerate_bindings(&s, &o, 10, 2).unwrap() {
            let neg = make_negative(&s, &b, NegativeStrategy::PathwaySwap, &o, 3).unwrap();
            let new = neg.conclusion.formula.predicates().remove(0);
            assert!(!o.ancestors(&b.predicates["G"]).unwrap().contains(&new));
            assert!(!b.predicates.values().any(|p| *p == new));
            assert!(!decide(&neg.premise_formulas(), &neg.conclusion.formula).unwrap());
        }
    }

    #[test]
    fn gold_set_follows_premises_through_distractors() {
        let o = toy();
        let s = scheme("gmp:base");
        let b = enumerate_bindings(&s, &o, 1, 1).unwrap().remove(0);
        let inst = add_distractors(&make_positive(&s, &b, &o).unwrap(), 1, &o, 5).unwrap();
        // Distractor moved to the middle: P1, distractor, P2.
        let moved = apply_permutation(&inst, &[0, 2, 1]).unwrap();
        assert_eq!(moved.gold_premises, vec![0, 2]);
        assert_eq!(compute_gold_premises(&moved).unwrap(), vec![0, 2]);

        let d = scheme("gd:base");
        let b = enumerate_bindings(&d, &o, 1, 1).unwrap().remove(0);
        let inst = add_distractors(&make_positive(&d, &b, &o).unwrap(), 2, &o, 5).unwrap();
        assert_eq!(compute_gold_premises(&inst).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn redundant_premises_make_gold_ambiguous() {
        let o = two_row();
        let s = scheme("gmp:base");
        let b = enumerate_bindings(&s, &o, 1, 0).unwrap().remove(0);
        let mut inst = make_positive(&s, &b, &o).unwrap();
        let fact = Formula::parse("(D PKQQ)").unwrap();
        inst.premises.push(Premise {
            text: render_grounded(&fact, &o).unwrap(),
            formula: fact,
            origin: PremiseOrigin::Distractor,
        });
        assert!(matches!(compute_gold_premises(&inst), Err(InstantiateError::AmbiguousGold { .. })));
        inst.premises.truncate(1);
        assert!(matches!(compute_gold_premises(&inst), Err(InstantiateError::NoSufficientSubset(_))));
    }

    #[test]
    fn corpus_is_deterministic_and_capped() {
        let o = toy();
        let cfg = CorpusConfig {
            schemes: vec!["gmp:base".parse().unwrap(), "ds:complex".parse().unwrap()],
            cap: 4,
            seed: 11,
            synthetic_names: true,
            ..Default::default()
        };
        let a = build_corpus(&o, &cfg).unwrap();
        let b = build_corpus(&o, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.failures(), 0);
        for s in &a.summaries {
            assert_eq!(s.positives, 4);
            assert_eq!(s.negatives, 4);
        }
        let ids: Vec<&str> = a.instances.iter().map(|i| i.instance_id.as_str()).collect();
        assert_eq!(&ids[..5], &["gmp:base-pos-0000", "gmp:base-pos-0001", "gmp:base-pos-0002", "gmp:base-pos-0003", "gmp:base-neg-0000"]);
        for inst in &a.instances {
            assert!(inst.verification.as_ref().unwrap().passed);
            assert!(inst.gold_premises.iter().all(|i| !inst.distractor_indices().contains(i)));
        }
    }

    #[test]
    fn empty_ontology_rejected() {
        let o = Ontology::from_jsonl_str(r#"{"kind":"pathway","id":"D","name":"Disease","parents":[]}"#).unwrap();
        assert!(matches!(build_corpus(&o, &CorpusConfig::default()), Err(InstantiateError::EmptyOntology)));
    }
}
