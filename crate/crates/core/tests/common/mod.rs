//! Oracles written independently of the library's checker and model code.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use syllo_core::instantiate::NegativeStrategy;
use syllo_core::logic::{Countermodel, Formula, SchemeId, Term};
use syllo_core::ontology::Ontology;
use syllo_core::prompts::{Expected, Mode, PromptRecord, Task, TwinRole};
use syllo_core::Label;

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

pub fn toy() -> Ontology {
    Ontology::from_jsonl_str(&std::fs::read_to_string(fixture("toy_ontology.jsonl")).unwrap()).unwrap()
}

fn symbols(f: &Formula, preds: &mut BTreeSet<String>, consts: &mut BTreeSet<String>) {
    match f {
        Formula::Atom { pred, term } => {
            preds.insert(pred.clone());
            if let Term::Const(c) = term {
                consts.insert(c.clone());
            }
        }
        Formula::Not(a) | Formula::Forall { body: a, .. } => symbols(a, preds, consts),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            symbols(a, preds, consts);
            symbols(b, preds, consts);
        }
    }
}

/// A model given by its elements' types: element `e` has type `types[e]`,
/// a bitmask over the predicate list.
struct TypeModel<'a> {
    preds: &'a [String],
    types: Vec<u32>,
    consts: BTreeMap<&'a str, usize>,
}

impl TypeModel<'_> {
    fn eval(&self, f: &Formula, env: &mut Vec<(String, usize)>) -> bool {
        match f {
            Formula::Atom { pred, term } => {
                let e = match term {
                    Term::Const(c) => self.consts[c.as_str()],
                    Term::Var(v) => env.iter().rev().find(|(n, _)| n == v).expect("bound").1,
                };
                let bit = self.preds.iter().position(|p| p == pred).expect("known predicate");
                self.types[e] >> bit & 1 == 1
            }
            Formula::Not(a) => !self.eval(a, env),
            Formula::And(a, b) => self.eval(a, env) && self.eval(b, env),
            Formula::Or(a, b) => self.eval(a, env) || self.eval(b, env),
            Formula::Implies(a, b) => !self.eval(a, env) || self.eval(b, env),
            Formula::Forall { var, body } => (0..self.types.len()).all(|e| {
                env.push((var.clone(), e));
                let r = self.eval(body, env);
                env.pop();
                r
            }),
        }
    }
}

/// Entailment by enumerating every nonempty set of realized element types
/// and every placement of the constants on them. Sound and complete for
/// monadic formulas; meant for at most four predicates.
pub fn oracle_entails(premises: &[Formula], conclusion: &Formula) -> bool {
    let (mut preds, mut consts) = (BTreeSet::new(), BTreeSet::new());
    for f in premises.iter().chain([conclusion]) {
        symbols(f, &mut preds, &mut consts);
    }
    let preds: Vec<String> = preds.into_iter().collect();
    let consts: Vec<String> = consts.into_iter().collect();
    assert!(preds.len() <= 4, "oracle limited to four predicates");
    let n_types = 1u32 << preds.len();
    for set in 1u64..(1u64 << n_types) {
        let types: Vec<u32> = (0..n_types).filter(|t| set >> t & 1 == 1).collect();
        let mut placement = vec![0usize; consts.len()];
        loop {
            let m = TypeModel {
                preds: &preds,
                types: types.clone(),
                consts: consts.iter().map(String::as_str).zip(placement.iter().copied()).collect(),
            };
            let mut env = Vec::new();
            if premises.iter().all(|p| m.eval(p, &mut env)) && !m.eval(conclusion, &mut env) {
                return false;
            }
            // next placement, odometer style
            let mut i = 0;
            while i < placement.len() {
                placement[i] += 1;
                if placement[i] < types.len() {
                    break;
                }
                placement[i] = 0;
                i += 1;
            }
            if i == placement.len() {
                break;
            }
        }
    }
    true
}

/// Evaluates a formula in an explicit countermodel without the library's
/// evaluator.
pub fn eval_countermodel(m: &Countermodel, f: &Formula, env: &mut Vec<(String, usize)>) -> bool {
    match f {
        Formula::Atom { pred, term } => {
            let e = match term {
                Term::Const(c) => *m.constants.get(c).expect("constant placed"),
                Term::Var(v) => env.iter().rev().find(|(n, _)| n == v).expect("bound").1,
            };
            m.extensions.get(pred).is_some_and(|xs| xs.contains(&e))
        }
        Formula::Not(a) => !eval_countermodel(m, a, env),
        Formula::And(a, b) => eval_countermodel(m, a, env) && eval_countermodel(m, b, env),
        Formula::Or(a, b) => eval_countermodel(m, a, env) || eval_countermodel(m, b, env),
        Formula::Implies(a, b) => !eval_countermodel(m, a, env) || eval_countermodel(m, b, env),
        Formula::Forall { var, body } => (0..m.domain_size).all(|e| {
            env.push((var.clone(), e));
            let r = eval_countermodel(m, body, env);
            env.pop();
            r
        }),
    }
}

/// The intended reading of the ontology: genes plus one generic member per
/// pathway; a pathway holds of a gene when the gene is annotated to it or to
/// a descendant, and of a generic member of `p` when `p` is it or below it.
pub struct OntologyWorld {
    individuals: Vec<BTreeSet<String>>,
    genes: BTreeMap<String, usize>,
}

impl OntologyWorld {
    pub fn new(o: &Ontology) -> OntologyWorld {
        let mut individuals = Vec::new();
        let mut genes = BTreeMap::new();
        let above = |p: &str| -> BTreeSet<String> {
            let mut s: BTreeSet<String> = o.ancestors(p).unwrap().into_iter().collect();
            s.insert(p.to_string());
            s
        };
        for g in o.genes() {
            let mut s = BTreeSet::new();
            for p in &g.pathways {
                s.extend(above(p));
            }
            genes.insert(g.symbol.clone(), individuals.len());
            individuals.push(s);
        }
        for p in o.pathways() {
            individuals.push(above(&p.id));
        }
        OntologyWorld { individuals, genes }
    }

    pub fn holds(&self, f: &Formula) -> bool {
        self.eval(f, &mut Vec::new())
    }

    fn eval(&self, f: &Formula, env: &mut Vec<(String, usize)>) -> bool {
        match f {
            Formula::Atom { pred, term } => {
                let e = match term {
                    Term::Const(c) => match self.genes.get(c) {
                        Some(&e) => e,
                        None => return false,
                    },
                    Term::Var(v) => env.iter().rev().find(|(n, _)| n == v).expect("bound").1,
                };
                self.individuals[e].contains(pred)
            }
            Formula::Not(a) => !self.eval(a, env),
            Formula::And(a, b) => self.eval(a, env) && self.eval(b, env),
            Formula::Or(a, b) => self.eval(a, env) || self.eval(b, env),
            Formula::Implies(a, b) => !self.eval(a, env) || self.eval(b, env),
            Formula::Forall { var, body } => (0..self.individuals.len()).all(|e| {
                env.push((var.clone(), e));
                let r = self.eval(body, env);
                env.pop();
                r
            }),
        }
    }
}

/// One line of the hand-built metric fixture.
#[derive(serde::Deserialize)]
pub struct MetricCase {
    pub prompt_id: String,
    pub label: Label,
    pub premises: Vec<usize>,
    pub n_premises: usize,
    #[serde(default)]
    pub twin_id: Option<String>,
    #[serde(default)]
    pub twin_role: Option<TwinRole>,
    pub text: String,
}

pub fn metric_prompt(c: &MetricCase, task: Task) -> PromptRecord {
    PromptRecord {
        schema_version: 1,
        prompt_id: c.prompt_id.clone(),
        instance_id: c.prompt_id.clone(),
        task,
        mode: Mode::ZeroShot,
        text: String::new(),
        twin_id: c.twin_id.clone(),
        twin_role: c.twin_role,
        expected: Expected {
            label: c.label,
            premises: c.premises.clone(),
        },
        n_premises: c.n_premises,
        scheme: "gmp:base".parse::<SchemeId>().unwrap(),
        n_distractors: 0,
        negative_strategy: NegativeStrategy::None,
    }
}

pub fn load_metric_cases(rel: &str) -> Vec<MetricCase> {
    std::fs::read_to_string(fixture(rel))
        .unwrap()
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

/// Runs the CLI in-process; returns the exit code and captured stdout.
pub fn syllo(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let code = syllo_core::cli::run(std::iter::once("syllo").chain(args.iter().copied()), &mut out);
    (code, String::from_utf8(out).unwrap())
}
