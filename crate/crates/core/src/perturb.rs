//! Label-preserving interventions: premise permutation, distractor injection
//! and synthetic gene names.

use crate::instantiate::{render_grounded, ArgumentInstance, Conclusion, InstantiateError, Premise, PremiseOrigin};
use crate::logic::{decide, CheckError, Formula, Term};
use crate::ontology::{GeneRecord, Ontology, PathwayNode};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashSet};
use thiserror::Error;

pub const MAX_DISTRACTORS: usize = 5;
pub const SYNTHETIC_NAME_LEN: usize = 4;
const SAMPLE_ATTEMPTS_PER_DISTRACTOR: usize = 200;

#[derive(Debug, Error)]
pub enum PerturbError {
    #[error("at most {MAX_DISTRACTORS} distractors are supported, got {0}")]
    TooManyDistractors(usize),
    #[error("ontology offers only {found} of {needed} disjoint distractor facts")]
    InsufficientFacts { needed: usize, found: usize },
    #[error("label of {0} changed under perturbation")]
    LabelChanged(String),
    #[error("permutation of length {len} is not a bijection on {n} premises")]
    BadPermutation { len: usize, n: usize },
    #[error("no unused synthetic gene name left")]
    NamesExhausted,
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Instantiate(Box<InstantiateError>),
}

impl From<InstantiateError> for PerturbError {
    fn from(e: InstantiateError) -> Self {
        PerturbError::Instantiate(Box::new(e))
    }
}

/// Where an injected premise came from.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistractorSource {
    Subsumption { child: String, parent: String },
    Membership { gene: String, pathway: String },
}

impl DistractorSource {
    pub fn formula(&self) -> Formula {
        match self {
            DistractorSource::Subsumption { child, parent } => Formula::forall(
                "x",
                Formula::implies(
                    Formula::atom(child.clone(), Term::var("x")),
                    Formula::atom(parent.clone(), Term::var("x")),
                ),
            ),
            DistractorSource::Membership { gene, pathway } => {
                Formula::atom(pathway.clone(), Term::constant(gene.clone()))
            }
        }
    }

    fn symbols(&self) -> [&str; 2] {
        match self {
            DistractorSource::Subsumption { child, parent } => [child, parent],
            DistractorSource::Membership { gene, pathway } => [gene, pathway],
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerturbationRecord {
    /// Canonical index of the premise shown at each position. Canonical order
    /// is scheme premises first, then distractors in injection order.
    pub permutation: Vec<usize>,
    pub n_distractors: usize,
    pub distractor_sources: Vec<DistractorSource>,
    /// Real gene symbol → synthetic symbol.
    pub synthetic_name_map: BTreeMap<String, String>,
}

impl PerturbationRecord {
    pub fn identity(n: usize) -> PerturbationRecord {
        PerturbationRecord {
            permutation: (0..n).collect(),
            ..Default::default()
        }
    }
}

/// Reorders premises so that position `j` shows former position `perm[j]`;
/// gold indices follow their sentences.
pub fn apply_permutation(inst: &ArgumentInstance, perm: &[usize]) -> Result<ArgumentInstance, PerturbError> {
    let n = inst.premises.len();
    let mut seen = vec![false; n];
    if perm.len() != n || perm.iter().any(|&i| i >= n || std::mem::replace(&mut seen[i], true)) {
        return Err(PerturbError::BadPermutation { len: perm.len(), n });
    }
    let mut inverse = vec![0; n];
    for (j, &i) in perm.iter().enumerate() {
        inverse[i] = j;
    }
    let mut out = inst.clone();
    out.premises = perm.iter().map(|&i| inst.premises[i].clone()).collect();
    out.perturbation.permutation = perm.iter().map(|&i| inst.perturbation.permutation[i]).collect();
    out.gold_premises = inst.gold_premises.iter().map(|&i| inverse[i]).collect();
    out.gold_premises.sort_unstable();
    Ok(out)
}

/// Uniform seeded reordering of the premises.
pub fn permute_premises(inst: &ArgumentInstance, seed: u64) -> ArgumentInstance {
    let mut perm: Vec<usize> = (0..inst.premises.len()).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    apply_permutation(inst, &perm).expect("shuffle is a bijection")
}

fn real_symbols(inst: &ArgumentInstance) -> HashSet<String> {
    let reverse: BTreeMap<&String, &String> =
        inst.perturbation.synthetic_name_map.iter().map(|(r, s)| (s, r)).collect();
    let mut out = HashSet::new();
    let formulas = inst.premises.iter().map(|p| &p.formula).chain(std::iter::once(&inst.conclusion.formula));
    for f in formulas {
        for s in f.predicates().into_iter().chain(f.constants()) {
            if let Some(r) = reverse.get(&s) {
                out.insert((*r).clone());
            }
            out.insert(s);
        }
    }
    out.extend(inst.binding.predicates.values().cloned());
    out.extend(inst.binding.constants.values().cloned());
    out
}

fn random_fact(pathways: &[&PathwayNode], genes: &[&GeneRecord], rng: &mut ChaCha8Rng) -> Option<DistractorSource> {
    if rng.gen_bool(0.5) {
        let node = pathways.choose(rng)?;
        let parent = node.parents.choose(rng)?;
        Some(DistractorSource::Subsumption {
            child: node.id.clone(),
            parent: parent.clone(),
        })
    } else {
        let gene = genes.choose(rng)?;
        let pathway = gene.pathways.choose(rng)?;
        Some(DistractorSource::Membership {
            gene: gene.symbol.clone(),
            pathway: pathway.clone(),
        })
    }
}

fn all_facts(o: &Ontology) -> Vec<DistractorSource> {
    let mut out: Vec<DistractorSource> = Vec::new();
    for node in o.pathways() {
        for parent in &node.parents {
            out.push(DistractorSource::Subsumption {
                child: node.id.clone(),
                parent: parent.clone(),
            });
        }
    }
    for gene in o.genes() {
        for pathway in &gene.pathways {
            out.push(DistractorSource::Membership {
                gene: gene.symbol.clone(),
                pathway: pathway.clone(),
            });
        }
    }
    out
}

/// Appends `n` true ontology facts that share no symbol with the instance or
/// with each other, then re-checks the label with the oracle.
pub fn add_distractors(inst: &ArgumentInstance, n: usize, o: &Ontology, seed: u64) -> Result<ArgumentInstance, PerturbError> {
    if n > MAX_DISTRACTORS {
        return Err(PerturbError::TooManyDistractors(n));
    }
    if n == 0 {
        return Ok(inst.clone());
    }
    let mut used = real_symbols(inst);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pathways: Vec<_> = o.pathways().filter(|p| !p.parents.is_empty()).collect();
    let genes: Vec<_> = o.genes().filter(|g| !g.pathways.is_empty()).collect();
    let mut picked: Vec<DistractorSource> = Vec::new();
    let fits = |f: &DistractorSource, used: &HashSet<String>| f.symbols().iter().all(|s| !used.contains(*s));
    for _ in 0..n * SAMPLE_ATTEMPTS_PER_DISTRACTOR {
        if picked.len() == n {
            break;
        }
        if let Some(f) = random_fact(&pathways, &genes, &mut rng) {
            if fits(&f, &used) {
                used.extend(f.symbols().iter().map(|s| s.to_string()));
                picked.push(f);
            }
        }
    }
    if picked.len() < n {
        let mut facts = all_facts(o);
        facts.shuffle(&mut rng);
        for f in facts {
            if picked.len() == n {
                break;
            }
            if fits(&f, &used) {
                used.extend(f.symbols().iter().map(|s| s.to_string()));
                picked.push(f);
            }
        }
    }
    if picked.len() < n {
        return Err(PerturbError::InsufficientFacts {
            needed: n,
            found: picked.len(),
        });
    }

    let mut out = inst.clone();
    let base = inst.perturbation.permutation.len();
    for (j, src) in picked.iter().enumerate() {
        let formula = src.formula();
        out.premises.push(Premise {
            text: render_grounded(&formula, o)?,
            formula,
            origin: PremiseOrigin::Distractor,
        });
        out.perturbation.permutation.push(base + j);
    }
    out.perturbation.n_distractors += n;
    out.perturbation.distractor_sources.extend(picked);
    if decide(&out.premise_formulas(), &out.conclusion.formula)? != out.gold_label.is_true() {
        return Err(PerturbError::LabelChanged(inst.instance_id.clone()));
    }
    Ok(out)
}

fn random_name(rng: &mut ChaCha8Rng) -> String {
    (0..SYNTHETIC_NAME_LEN).map(|_| rng.gen_range(b'A'..=b'Z') as char).collect()
}

/// Consistently replaces every real gene symbol with a fresh four-letter
/// uppercase name absent from the ontology. A near-miss symbol produced by
/// entity swapping becomes a near-miss of its source gene's new name.
pub fn synthesize_gene_names(inst: &ArgumentInstance, o: &Ontology, seed: u64) -> Result<ArgumentInstance, PerturbError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut constants: BTreeSet<String> = BTreeSet::new();
    for f in inst.premises.iter().map(|p| &p.formula).chain(std::iter::once(&inst.conclusion.formula)) {
        constants.extend(f.constants());
    }
    let premise_consts: BTreeSet<String> = inst.premises.iter().flat_map(|p| p.formula.constants()).collect();
    let mut taken: HashSet<String> = constants.iter().cloned().collect();
    taken.extend(inst.perturbation.synthetic_name_map.values().cloned());
    let fresh = |rng: &mut ChaCha8Rng, taken: &mut HashSet<String>| -> Result<String, PerturbError> {
        for _ in 0..100_000 {
            let cand = random_name(rng);
            if o.gene(&cand).is_none() && taken.insert(cand.clone()) {
                return Ok(cand);
            }
        }
        Err(PerturbError::NamesExhausted)
    };

    let mut rename: BTreeMap<String, String> = BTreeMap::new();
    for c in constants.iter().filter(|c| premise_consts.contains(*c)) {
        rename.insert(c.clone(), fresh(&mut rng, &mut taken)?);
    }
    // Conclusion-only constants are swapped near-misses of a premise gene.
    for c in constants.iter().filter(|c| !premise_consts.contains(*c)) {
        let source = premise_consts.iter().find(|p| {
            p.len() == c.len() && p.chars().zip(c.chars()).filter(|(a, b)| a != b).count() == 1
        });
        let new = match source.and_then(|s| rename.get(s)) {
            Some(syn) => {
                let chars: Vec<char> = syn.chars().collect();
                let mut found = None;
                for _ in 0..1000 {
                    let mut v = chars.clone();
                    let i = rng.gen_range(0..v.len());
                    v[i] = rng.gen_range(b'A'..=b'Z') as char;
                    let cand: String = v.into_iter().collect();
                    if cand != *syn && o.gene(&cand).is_none() && taken.insert(cand.clone()) {
                        found = Some(cand);
                        break;
                    }
                }
                found.ok_or(PerturbError::NamesExhausted)?
            }
            None => fresh(&mut rng, &mut taken)?,
        };
        rename.insert(c.clone(), new);
    }

    let none = BTreeMap::new();
    let mut out = inst.clone();
    for p in &mut out.premises {
        p.formula = p.formula.rename(&none, &rename);
        p.text = render_grounded(&p.formula, o)?;
    }
    let content = inst.conclusion.content().rename(&none, &rename);
    out.conclusion = Conclusion::new(&content, inst.conclusion.wrapper, o)?;

    let mut map = BTreeMap::new();
    let prior: BTreeMap<&String, &String> =
        inst.perturbation.synthetic_name_map.iter().map(|(r, s)| (s, r)).collect();
    for (old, new) in &rename {
        let real = prior.get(old).map(|r| (*r).clone()).unwrap_or_else(|| old.clone());
        map.insert(real, new.clone());
    }
    for (real, syn) in &inst.perturbation.synthetic_name_map {
        if !rename.contains_key(syn) {
            map.insert(real.clone(), syn.clone());
        }
    }
    out.perturbation.synthetic_name_map = map;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instantiate::{enumerate_bindings, make_negative, make_positive, NegativeStrategy};
    use crate::logic::{scheme_by_id, SchemeId};

    fn toy() -> Ontology {
        let mut src = String::from(
            r#"{"kind":"pathway","id":"D","name":"Disease","parents":[]}
{"kind":"pathway","id":"I","name":"Infectious disease","parents":["D"]}
{"kind":"pathway","id":"V","name":"Viral","parents":["I"]}
{"kind":"pathway","id":"B","name":"Bacterial","parents":["I"]}
{"kind":"pathway","id":"M","name":"Metabolic","parents":["D"]}
{"kind":"pathway","id":"L","name":"Lipid","parents":["M"]}
{"kind":"pathway","id":"S","name":"Sugar","parents":["M"]}
"#,
        );
        for (i, p) in ["V", "B", "L", "S", "I", "M", "V", "L"].iter().enumerate() {
            src.push_str(&format!("{{\"kind\":\"gene\",\"symbol\":\"GN{i}\",\"pathways\":[\"{p}\"]}}\n"));
        }
        Ontology::from_jsonl_str(&src).unwrap()
    }

    fn gmp(o: &Ontology) -> ArgumentInstance {
        let s = scheme_by_id("gmp:base".parse::<SchemeId>().unwrap());
        let b = enumerate_bindings(&s, o, 1, 3).unwrap().remove(0);
        make_positive(&s, &b, o).unwrap()
    }

    #[test]
    fn permutation_tracks_gold_sentences() {
        let o = toy();
        let inst = add_distractors(&gmp(&o), 2, &o, 1).unwrap();
        let gold_text: BTreeSet<String> = inst.gold_premises.iter().map(|&i| inst.premises[i].text.clone()).collect();
        for seed in 0..20 {
            let p = permute_premises(&inst, seed);
            let now: BTreeSet<String> = p.gold_premises.iter().map(|&i| p.premises[i].text.clone()).collect();
            assert_eq!(now, gold_text);
            for (j, &c) in p.perturbation.permutation.iter().enumerate() {
                assert_eq!(p.premises[j], inst.premises[c]);
            }
        }
    }

    #[test]
    fn bad_permutation_rejected() {
        let o = toy();
        let inst = gmp(&o);
        assert!(apply_permutation(&inst, &[0, 0]).is_err());
        assert!(apply_permutation(&inst, &[0]).is_err());
        assert_eq!(apply_permutation(&inst, &[0, 1]).unwrap(), inst);
    }

    #[test]
    fn distractors_are_disjoint_true_facts() {
        let o = toy();
        let inst = gmp(&o);
        let d = add_distractors(&inst, 2, &o, 9).unwrap();
        assert_eq!(d.premises.len(), 4);
        assert_eq!(d.distractor_indices(), vec![2, 3]);
        assert_eq!(d.gold_premises, vec![0, 1]);
        let mut seen: HashSet<String> = real_symbols(&inst);
        for src in &d.perturbation.distractor_sources {
            assert!(o.canonical_model().holds(&src.formula()).unwrap());
            for s in src.symbols() {
                assert!(seen.insert(s.to_string()), "{s} reused");
            }
        }
        assert_eq!(add_distractors(&inst, 0, &o, 9).unwrap(), inst);
        assert!(matches!(add_distractors(&inst, 6, &o, 9), Err(PerturbError::TooManyDistractors(6))));
    }

    #[test]
    fn too_small_ontology_reports_shortfall() {
        let o = Ontology::from_jsonl_str(
            r#"{"kind":"pathway","id":"D","name":"Disease","parents":[]}
{"kind":"pathway","id":"I","name":"Infectious disease","parents":["D"]}
{"kind":"pathway","id":"M","name":"Metabolic","parents":["D"]}
{"kind":"gene","symbol":"G1","pathways":["I"]}
{"kind":"gene","symbol":"G2","pathways":["M"]}
"#,
        )
        .unwrap();
        assert!(matches!(
            add_distractors(&gmp(&o), 2, &o, 2),
            Err(PerturbError::InsufficientFacts { needed: 2, found: 1 })
        ));
    }

    #[test]
    fn synthetic_names_are_consistent_and_fresh() {
        let o = toy();
        let inst = gmp(&o);
        let gene = inst.binding.constants["a"].clone();
        let s = synthesize_gene_names(&inst, &o, 4).unwrap();
        let syn = &s.perturbation.synthetic_name_map[&gene];
        assert_eq!(syn.len(), 4);
        assert!(syn.chars().all(|c| c.is_ascii_uppercase()));
        assert!(o.gene(syn).is_none());
        assert!(s.premises.iter().any(|p| p.text.contains(&format!("Gene {syn} "))));
        assert!(s.conclusion.text.contains(&format!("Gene {syn} ")));
        assert!(!s.conclusion.text.contains(&gene));
        assert_eq!(s.gold_label, inst.gold_label);
    }

    #[test]
    fn entity_swap_stays_a_near_miss_after_renaming() {
        let o = toy();
        let s = scheme_by_id("gmp:base".parse::<SchemeId>().unwrap());
        let b = enumerate_bindings(&s, &o, 1, 3).unwrap().remove(0);
        let neg = make_negative(&s, &b, NegativeStrategy::EntitySwap, &o, 5).unwrap();
        let r = synthesize_gene_names(&neg, &o, 8).unwrap();
        let syn = &r.perturbation.synthetic_name_map[&b.constants["a"]];
        let fake = r.conclusion.formula.constants().remove(0);
        assert_ne!(&fake, syn);
        assert_eq!(fake.chars().zip(syn.chars()).filter(|(x, y)| x != y).count(), 1);
        assert!(!decide(&r.premise_formulas(), &r.conclusion.formula).unwrap());
    }
}
