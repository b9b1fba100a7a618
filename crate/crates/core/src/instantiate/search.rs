//! Binding search: assign pathways to predicate placeholders and genes to
//! constant placeholders so that every grounded premise is a true,
//! non-vacuous fact of the ontology.

use super::Binding;
use crate::logic::{FormalScheme, Formula};
use crate::ontology::{CanonicalModel, Ontology, OntologyError};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{HashMap, HashSet};

/// Below this many raw assignments the search space is enumerated in full.
const EXHAUSTIVE_SPACE: f64 = 1.0e6;
const EXHAUSTIVE_NODE_BUDGET: usize = 1_500_000;
const RESTART_NODE_BUDGET: usize = 2_000;
const SOLUTIONS_PER_RESTART: usize = 4;
const MAX_IDLE_RESTARTS: usize = 60;
const RELATED_LIMIT: usize = 64;
const RANDOM_EXTRA: usize = 16;

/// A grounded premise is sound when it holds in the ontology's intended
/// interpretation and is not vacuously true: some element satisfies the
/// antecedent of a universal, and a ground conditional has a true antecedent.
pub fn premise_is_sound(f: &Formula, model: &CanonicalModel) -> Result<bool, OntologyError> {
    if !model.holds(f)? {
        return Ok(false);
    }
    match f {
        Formula::Forall { var, body } => match &**body {
            Formula::Implies(ante, _) => {
                let witness = Formula::not(Formula::forall(var.clone(), Formula::not((**ante).clone())));
                model.holds(&witness)
            }
            _ => Ok(true),
        },
        Formula::Implies(ante, _) => model.holds(ante),
        _ => Ok(true),
    }
}

/// Soundness of a complete binding: injective, all premises sound.
pub fn binding_is_sound(s: &FormalScheme, b: &Binding, o: &Ontology) -> Result<bool, OntologyError> {
    let distinct: HashSet<&String> = b.predicates.values().collect();
    if distinct.len() != b.predicates.len() {
        return Ok(false);
    }
    let model = o.canonical_model();
    for p in &s.premises {
        if !premise_is_sound(&b.ground(p), model)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Exhaustive,
    Random,
}

#[derive(PartialEq, Eq)]
enum Flow {
    Continue,
    Stop,
    Budget,
}

struct Slot {
    placeholder: String,
    is_pred: bool,
}

struct Searcher<'a> {
    o: &'a Ontology,
    model: &'a CanonicalModel,
    premises: &'a [Formula],
    slots: Vec<Slot>,
    checks_at: Vec<Vec<usize>>,
    pathway_ids: Vec<&'a str>,
    genes: Vec<&'a str>,
    binding: Binding,
    nodes: usize,
    budget: usize,
    cache: HashMap<(usize, Vec<String>), bool>,
}

impl<'a> Searcher<'a> {
    fn new(s: &'a FormalScheme, o: &'a Ontology) -> Searcher<'a> {
        let mut slots: Vec<Slot> = Vec::new();
        let push = |name: String, is_pred: bool, slots: &mut Vec<Slot>| {
            if !slots.iter().any(|x| x.placeholder == name && x.is_pred == is_pred) {
                slots.push(Slot {
                    placeholder: name,
                    is_pred,
                });
            }
        };
        for f in s.premises.iter().chain(std::iter::once(&s.conclusion)) {
            for c in f.constants() {
                push(c, false, &mut slots);
            }
            for p in f.predicates() {
                push(p, true, &mut slots);
            }
        }
        let mut checks_at = vec![Vec::new(); slots.len()];
        for (i, f) in s.premises.iter().enumerate() {
            let last = slots
                .iter()
                .rposition(|slot| {
                    if slot.is_pred {
                        f.predicates().contains(&slot.placeholder)
                    } else {
                        f.constants().contains(&slot.placeholder)
                    }
                })
                .expect("premise mentions a placeholder");
            checks_at[last].push(i);
        }
        Searcher {
            o,
            model: o.canonical_model(),
            premises: &s.premises,
            slots,
            checks_at,
            pathway_ids: o.pathways().map(|n| n.id.as_str()).collect(),
            genes: o.genes().map(|g| g.symbol.as_str()).collect(),
            binding: Binding::default(),
            nodes: 0,
            budget: 0,
            cache: HashMap::new(),
        }
    }

    fn space_size(&self) -> f64 {
        self.slots
            .iter()
            .map(|s| if s.is_pred { self.pathway_ids.len() } else { self.genes.len() } as f64)
            .product()
    }

    fn check(&mut self, premise: usize) -> Result<bool, OntologyError> {
        let f = &self.premises[premise];
        let mut key: Vec<String> = f.predicates().iter().map(|p| self.binding.predicates[p].clone()).collect();
        key.extend(f.constants().iter().map(|c| self.binding.constants[c].clone()));
        if let Some(&v) = self.cache.get(&(premise, key.clone())) {
            return Ok(v);
        }
        let v = premise_is_sound(&self.binding.ground(f), self.model)?;
        self.cache.insert((premise, key), v);
        Ok(v)
    }

    fn candidates(&self, depth: usize, mode: Mode, rng: &mut ChaCha8Rng) -> Vec<&'a str> {
        let slot = &self.slots[depth];
        let bound_preds: HashSet<&str> = self.binding.predicates.values().map(String::as_str).collect();
        let bound_consts: HashSet<&str> = self.binding.constants.values().map(String::as_str).collect();
        if mode == Mode::Exhaustive {
            let pool = if slot.is_pred { &self.pathway_ids } else { &self.genes };
            let taken = if slot.is_pred { &bound_preds } else { &bound_consts };
            return pool.iter().copied().filter(|x| !taken.contains(x)).collect();
        }
        let mut related: Vec<&'a str> = Vec::new();
        if slot.is_pred {
            for g in self.binding.constants.values() {
                related.extend(self.model.gene_pathways(g).map(|p| self.intern_pathway(p)));
            }
            for p in self.binding.predicates.values() {
                if let Ok(anc) = self.o.ancestors(p) {
                    related.extend(anc.iter().map(|a| self.intern_pathway(a)));
                }
                let node = self.o.pathway(p).expect("bound pathway exists");
                related.extend(self.o.children(p).iter().map(|c| self.intern_pathway(c)));
                for c in self.o.children(p) {
                    related.extend(self.o.children(c).iter().map(|g| self.intern_pathway(g)));
                }
                for parent in &node.parents {
                    related.extend(self.o.children(parent).iter().map(|c| self.intern_pathway(c)));
                }
            }
        } else {
            for p in self.binding.predicates.values() {
                let members: Vec<&str> = self.model.member_genes(p).collect();
                for _ in 0..members.len().min(32) {
                    related.push(self.intern_gene(members[rng.gen_range(0..members.len())]));
                }
            }
        }
        related.shuffle(rng);
        related.truncate(RELATED_LIMIT);
        let pool = if slot.is_pred { &self.pathway_ids } else { &self.genes };
        for _ in 0..RANDOM_EXTRA.min(pool.len()) {
            related.push(pool[rng.gen_range(0..pool.len())]);
        }
        let taken = if slot.is_pred { &bound_preds } else { &bound_consts };
        let mut seen = HashSet::new();
        related.retain(|x| !taken.contains(x) && seen.insert(*x));
        related
    }

    fn intern_pathway(&self, id: &str) -> &'a str {
        self.o.pathway(id).map(|n| n.id.as_str()).expect("known pathway")
    }

    fn intern_gene(&self, symbol: &str) -> &'a str {
        self.o.gene(symbol).map(|g| g.symbol.as_str()).expect("known gene")
    }

    fn dfs(
        &mut self,
        depth: usize,
        mode: Mode,
        rng: &mut ChaCha8Rng,
        out: &mut Vec<Binding>,
        limit: usize,
    ) -> Result<Flow, OntologyError> {
        if depth == self.slots.len() {
            out.push(self.binding.clone());
            return Ok(if out.len() >= limit { Flow::Stop } else { Flow::Continue });
        }
        let cands = self.candidates(depth, mode, rng);
        let (name, is_pred) = (self.slots[depth].placeholder.clone(), self.slots[depth].is_pred);
        for c in cands {
            if self.nodes >= self.budget {
                return Ok(Flow::Budget);
            }
            self.nodes += 1;
            let map = if is_pred {
                &mut self.binding.predicates
            } else {
                &mut self.binding.constants
            };
            map.insert(name.clone(), c.to_string());
            let mut ok = true;
            for i in self.checks_at[depth].clone() {
                if !self.check(i)? {
                    ok = false;
                    break;
                }
            }
            let flow = if ok { self.dfs(depth + 1, mode, rng, out, limit)? } else { Flow::Continue };
            let map = if is_pred {
                &mut self.binding.predicates
            } else {
                &mut self.binding.constants
            };
            map.remove(&name);
            if flow != Flow::Continue {
                return Ok(flow);
            }
        }
        Ok(Flow::Continue)
    }
}

/// Up to `cap` distinct sound bindings, deterministic for a given seed.
pub fn enumerate_bindings(s: &FormalScheme, o: &Ontology, cap: usize, seed: u64) -> Result<Vec<Binding>, OntologyError> {
    if cap == 0 {
        return Ok(Vec::new());
    }
    let mut searcher = Searcher::new(s, o);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    if searcher.space_size() <= EXHAUSTIVE_SPACE {
        searcher.budget = EXHAUSTIVE_NODE_BUDGET;
        let mut all = Vec::new();
        if searcher.dfs(0, Mode::Exhaustive, &mut rng, &mut all, usize::MAX)? != Flow::Budget {
            all.shuffle(&mut rng);
            all.truncate(cap);
            return Ok(all);
        }
        log::debug!("{}: exhaustive binding search over budget, sampling instead", s.id);
    }

    let mut found: Vec<Binding> = Vec::new();
    let mut seen: HashSet<Binding> = HashSet::new();
    let mut idle = 0;
    while found.len() < cap && idle < MAX_IDLE_RESTARTS {
        searcher.nodes = 0;
        searcher.budget = RESTART_NODE_BUDGET;
        let mut local = Vec::new();
        searcher.dfs(0, Mode::Random, &mut rng, &mut local, SOLUTIONS_PER_RESTART)?;
        let before = found.len();
        for b in local {
            if found.len() < cap && seen.insert(b.clone()) {
                found.push(b);
            }
        }
        idle = if found.len() > before { 0 } else { idle + 1 };
    }
    Ok(found)
}
