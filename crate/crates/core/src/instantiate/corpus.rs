//! Corpus assembly: bindings per scheme, positives and negatives, perturbed
//! and verified, merged in (scheme, polarity, index) order.

use super::{
    enumerate_bindings, make_negative, make_positive, verify, ArgumentInstance,
    InstantiateError, NegativeStrategy,
};
use crate::derive_seed;
use crate::logic::{scheme_by_id, SchemeId};
use crate::ontology::Ontology;
use crate::perturb::{add_distractors, permute_premises, synthesize_gene_names, PerturbError, MAX_DISTRACTORS};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorpusConfig {
    pub schemes: Vec<SchemeId>,
    /// Maximum instances per polarity per scheme.
    pub cap: usize,
    pub min_distractors: usize,
    pub max_distractors: usize,
    pub seed: u64,
    pub synthetic_names: bool,
    /// Negative strategies, cycled per binding.
    pub strategies: Vec<NegativeStrategy>,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            schemes: SchemeId::all().collect(),
            cap: 200,
            min_distractors: 0,
            max_distractors: MAX_DISTRACTORS,
            seed: 0,
            synthetic_names: false,
            strategies: NegativeStrategy::NEGATIVE.to_vec(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeSummary {
    pub scheme: Option<SchemeId>,
    pub bindings: usize,
    pub positives: usize,
    pub negatives: usize,
    /// Instances whose build-time verification failed.
    pub failures: usize,
    /// Bindings for which no negative strategy applied.
    pub negative_shortfall: usize,
    /// Instances that got fewer distractors than scheduled.
    pub distractor_shortfall: usize,
    pub strategies: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub instances: Vec<ArgumentInstance>,
    pub summaries: Vec<SchemeSummary>,
}

impl Corpus {
    pub fn failures(&self) -> usize {
        self.summaries.iter().map(|s| s.failures).sum()
    }
}

struct Perturbed {
    inst: ArgumentInstance,
    short: bool,
}

fn perturb(
    inst: ArgumentInstance,
    n: usize,
    cfg: &CorpusConfig,
    o: &Ontology,
    seed: u64,
) -> Result<Perturbed, InstantiateError> {
    let mut short = false;
    let mut with = None;
    for k in (cfg.min_distractors.min(n)..=n).rev() {
        match add_distractors(&inst, k, o, derive_seed(seed, &["distractors"])) {
            Ok(i) => {
                short = k < n;
                with = Some(i);
                break;
            }
            Err(PerturbError::InsufficientFacts { .. }) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    let mut inst = match with {
        Some(i) => i,
        None => {
            short = n > 0;
            inst
        }
    };
    if cfg.synthetic_names {
        inst = synthesize_gene_names(&inst, o, derive_seed(seed, &["names"]))?;
    }
    inst = permute_premises(&inst, derive_seed(seed, &["permute"]));
    Ok(Perturbed { inst, short })
}

fn finish(mut inst: ArgumentInstance, id: String, seed: u64, o: &Ontology, summary: &mut SchemeSummary) -> Result<ArgumentInstance, InstantiateError> {
    inst.instance_id = id;
    inst.seed = seed;
    let v = verify(&inst, o)?;
    if !v.passed {
        log::warn!("{} failed verification: {:?}", inst.instance_id, v);
        summary.failures += 1;
    }
    inst.verification = Some(v);
    Ok(inst)
}

fn build_scheme(id: SchemeId, cfg: &CorpusConfig, o: &Ontology) -> Result<(Vec<ArgumentInstance>, SchemeSummary), InstantiateError> {
    let scheme = scheme_by_id(id);
    let key = id.to_string();
    let scheme_seed = derive_seed(cfg.seed, &[&key]);
    let bindings = enumerate_bindings(&scheme, o, cfg.cap, derive_seed(scheme_seed, &["bindings"]))?;
    let mut summary = SchemeSummary {
        scheme: Some(id),
        bindings: bindings.len(),
        ..Default::default()
    };
    let width = cfg.max_distractors.saturating_sub(cfg.min_distractors) + 1;
    let mut positives = Vec::new();
    let mut negatives = Vec::new();

    for (i, b) in bindings.iter().enumerate() {
        let n = cfg.min_distractors + i % width;
        let idx = format!("{i}");
        let seed = derive_seed(scheme_seed, &["pos", &idx]);
        let p = perturb(make_positive(&scheme, b, o)?, n, cfg, o, seed)?;
        summary.distractor_shortfall += p.short as usize;
        positives.push(finish(p.inst, format!("{key}-pos-{i:04}"), seed, o, &mut summary)?);
    }

    for (i, b) in bindings.iter().enumerate() {
        if cfg.strategies.is_empty() {
            break;
        }
        let n = cfg.min_distractors + i % width;
        let idx = format!("{i}");
        let seed = derive_seed(scheme_seed, &["neg", &idx]);
        let mut built = None;
        for k in 0..cfg.strategies.len() {
            let strategy = cfg.strategies[(i + k) % cfg.strategies.len()];
            match make_negative(&scheme, b, strategy, o, derive_seed(seed, &[strategy.key()])) {
                Ok(inst) => {
                    built = Some(inst);
                    break;
                }
                Err(InstantiateError::StrategyInapplicable { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        let Some(inst) = built else {
            summary.negative_shortfall += 1;
            continue;
        };
        *summary.strategies.entry(inst.negative_strategy.key().to_string()).or_default() += 1;
        let p = perturb(inst, n, cfg, o, seed)?;
        summary.distractor_shortfall += p.short as usize;
        let id = format!("{key}-neg-{:04}", negatives.len());
        negatives.push(finish(p.inst, id, seed, o, &mut summary)?);
    }
    summary.positives = positives.len();
    summary.negatives = negatives.len();
    positives.extend(negatives);
    Ok((positives, summary))
}

/// Deterministic corpus for `cfg`; schemes are built in parallel and merged
/// in the configured order.
pub fn build_corpus(o: &Ontology, cfg: &CorpusConfig) -> Result<Corpus, InstantiateError> {
    if o.pathway_count() == 0 || o.gene_count() == 0 {
        return Err(InstantiateError::EmptyOntology);
    }
    let parts: Vec<(Vec<ArgumentInstance>, SchemeSummary)> = cfg
        .schemes
        .par_iter()
        .map(|&id| build_scheme(id, cfg, o))
        .collect::<Result<_, _>>()?;
    let mut corpus = Corpus::default();
    for (instances, summary) in parts {
        corpus.instances.extend(instances);
        corpus.summaries.push(summary);
    }
    Ok(corpus)
}
