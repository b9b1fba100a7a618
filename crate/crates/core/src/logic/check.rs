//! Finite-model entailment for monadic first-order logic.
//!
//! For k unary predicates an interpretation is determined, up to truth of
//! every formula, by the set of element *types* it realizes (a type is one of
//! the 2^k truth assignments to the predicates) plus the type of each
//! constant. Any model can be shrunk to one element per realized type, so
//! domains of size 2^k suffice and enumerating realized-type sets covers every
//! interpretation of size 1..=max_domain up to isomorphism.
//!
//! Formula sets are first split into components that share no predicate or
//! constant symbol. `P ⊨ c` holds iff some premise-only component is
//! unsatisfiable or the premises of the conclusion's component entail `c`;
//! models of disjoint components combine by padding element lists.

use super::{Formula, FormalScheme, ParseError, SchemeId, Term};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

/// Upper bound on free type bits enumerated exhaustively in one component.
pub const ENUMERATION_TYPE_LIMIT: u32 = 24;
const MAX_COMPONENT_PREDICATES: usize = 6;
const MAX_SYMBOLIC_SLOTS: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("variable `{0}` is not bound by an enclosing forall")]
    UnboundVariable(String),
    #[error("max_domain {given} is below the small-model bound {needed}")]
    DomainBoundTooSmall { needed: usize, given: usize },
    #[error("{count} interacting predicates exceed the checker limit of {limit}")]
    TooManyPredicates { count: usize, limit: usize },
    #[error("{free_types} unconstrained element types exceed the enumeration limit of {limit}")]
    SearchTooLarge { free_types: u32, limit: u32 },
}

/// A finite interpretation: elements `0..domain_size`, predicate extensions
/// and constant denotations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Countermodel {
    pub domain_size: usize,
    pub extensions: BTreeMap<String, Vec<usize>>,
    pub constants: BTreeMap<String, usize>,
}

impl Countermodel {
    /// Direct evaluation over the listed elements. Symbols absent from the
    /// model are read as empty predicates / element 0.
    pub fn evaluate(&self, f: &Formula) -> bool {
        self.eval_env(f, &mut Vec::new())
    }

    fn denote(&self, t: &Term, env: &[(String, usize)]) -> usize {
        match t {
            Term::Const(c) => self.constants.get(c).copied().unwrap_or(0),
            Term::Var(v) => env
                .iter()
                .rev()
                .find(|(name, _)| name == v)
                .map(|(_, e)| *e)
                .unwrap_or(0),
        }
    }

    fn eval_env(&self, f: &Formula, env: &mut Vec<(String, usize)>) -> bool {
        match f {
            Formula::Atom { pred, term } => {
                let e = self.denote(term, env);
                self.extensions.get(pred).is_some_and(|ext| ext.contains(&e))
            }
            Formula::Not(a) => !self.eval_env(a, env),
            Formula::And(a, b) => self.eval_env(a, env) && self.eval_env(b, env),
            Formula::Or(a, b) => self.eval_env(a, env) || self.eval_env(b, env),
            Formula::Implies(a, b) => !self.eval_env(a, env) || self.eval_env(b, env),
            Formula::Forall { var, body } => (0..self.domain_size).all(|e| {
                env.push((var.clone(), e));
                let r = self.eval_env(body, env);
                env.pop();
                r
            }),
        }
    }
}

/// Outcome of checking one catalog scheme.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub scheme: SchemeId,
    pub entailed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Countermodel>,
}

/// Exhaustive entailment check over all interpretations with at most
/// `max_domain` elements.
pub fn entails(premises: &[Formula], conclusion: &Formula, max_domain: usize) -> Result<bool, CheckError> {
    Ok(find_countermodel(premises, conclusion, max_domain)?.is_none())
}

/// [`entails`] with `max_domain` set to the small-model bound of the inputs.
pub fn entails_auto(premises: &[Formula], conclusion: &Formula) -> Result<bool, CheckError> {
    let bound = small_model_bound(premises.iter().chain(std::iter::once(conclusion)))?;
    entails(premises, conclusion, bound)
}

/// Exhaustive search for an interpretation satisfying every premise and
/// falsifying the conclusion.
pub fn find_countermodel(
    premises: &[Formula],
    conclusion: &Formula,
    max_domain: usize,
) -> Result<Option<Countermodel>, CheckError> {
    solve(premises, Some(conclusion), max_domain, Route::Exhaustive)
}

/// Exhaustive search for a model of all formulas.
pub fn satisfiable(formulas: &[Formula], max_domain: usize) -> Result<Option<Countermodel>, CheckError> {
    solve(formulas, None, max_domain, Route::Exhaustive)
}

/// Symbolic decision procedure for the same relation as [`entails_auto`].
///
/// Each universally quantified subformula `∀x φ` is true in a realized-type
/// set `S` iff `S ⊆ M_φ`, where `M_φ` is the set of types satisfying `φ`. For
/// a fixed truth assignment to those atoms the best candidate is the largest
/// admissible `S`, so only 2^q assignments per constant assignment need to be
/// tried. Falls back to enumeration when quantifiers are nested.
pub fn decide(premises: &[Formula], conclusion: &Formula) -> Result<bool, CheckError> {
    let bound = small_model_bound(premises.iter().chain(std::iter::once(conclusion)))?;
    Ok(solve(premises, Some(conclusion), bound, Route::Symbolic)?.is_none())
}

/// `2^k` for the largest symbol-connected component of the formulas.
pub fn small_model_bound<'a>(formulas: impl IntoIterator<Item = &'a Formula>) -> Result<usize, CheckError> {
    let formulas: Vec<&Formula> = formulas.into_iter().collect();
    let groups = components(&formulas);
    let mut k_max = 0;
    for g in groups {
        let k = collect_symbols(g.iter().map(|&i| formulas[i])).0.len();
        k_max = k_max.max(k);
    }
    if k_max > MAX_COMPONENT_PREDICATES {
        return Err(CheckError::TooManyPredicates {
            count: k_max,
            limit: MAX_COMPONENT_PREDICATES,
        });
    }
    Ok(1usize << k_max)
}

/// Checks a scheme with the exhaustive route and attaches a countermodel when
/// the conclusion does not follow.
pub fn validate_scheme(s: &FormalScheme) -> ValidityReport {
    let result = small_model_bound(s.premises.iter().chain(std::iter::once(&s.conclusion)))
        .and_then(|bound| find_countermodel(&s.premises, &s.conclusion, bound));
    match result {
        Ok(None) => ValidityReport {
            scheme: s.id,
            entailed: true,
            witness: None,
        },
        Ok(Some(w)) => ValidityReport {
            scheme: s.id,
            entailed: false,
            witness: Some(w),
        },
        // Catalog formulas are closed and small; an error here is a catalog bug.
        Err(e) => panic!("scheme {} cannot be checked: {e}", s.id),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Route {
    Exhaustive,
    Symbolic,
}

fn solve(
    premises: &[Formula],
    conclusion: Option<&Formula>,
    max_domain: usize,
    route: Route,
) -> Result<Option<Countermodel>, CheckError> {
    for f in premises.iter().chain(conclusion) {
        if let Some(v) = f.free_variables().into_iter().next() {
            return Err(CheckError::UnboundVariable(v));
        }
    }
    let mut all: Vec<&Formula> = premises.iter().collect();
    if let Some(c) = conclusion {
        all.push(c);
    }
    let goal_index = conclusion.map(|_| all.len() - 1);
    let groups = components(&all);

    let mut needed = 1usize;
    let mut compiled = Vec::with_capacity(groups.len());
    for g in &groups {
        let prem: Vec<&Formula> = g.iter().filter(|&&i| Some(i) != goal_index).map(|&i| all[i]).collect();
        let goal = g.iter().find(|&&i| Some(i) == goal_index).map(|&i| all[i]);
        let c = Compiled::new(&prem, goal)?;
        needed = needed.max(1usize << c.k);
        compiled.push(c);
    }
    if max_domain < needed {
        return Err(CheckError::DomainBoundTooSmall {
            needed,
            given: max_domain,
        });
    }

    let mut parts = Vec::with_capacity(compiled.len());
    for c in &compiled {
        let found = match route {
            Route::Symbolic if c.all_flat => c.search_symbolic()?,
            _ => c.search_exhaustive(max_domain)?,
        };
        match found {
            Some(assignment) => parts.push((c, assignment)),
            // An unsatisfiable premise group entails everything; an
            // unrefutable goal component means no countermodel exists.
            None => return Ok(None),
        }
    }
    Ok(Some(combine(&parts)))
}

/// Union-find over shared predicate / constant symbols.
fn components(formulas: &[&Formula]) -> Vec<Vec<usize>> {
    let n = formulas.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut j = i;
        while parent[j] != r {
            let next = parent[j];
            parent[j] = r;
            j = next;
        }
        r
    }
    let mut owner: HashMap<String, usize> = HashMap::new();
    for (i, f) in formulas.iter().enumerate() {
        let keys = f
            .predicates()
            .into_iter()
            .map(|p| format!("p\u{0}{p}"))
            .chain(f.constants().into_iter().map(|c| format!("c\u{0}{c}")));
        for key in keys {
            match owner.get(&key) {
                Some(&j) => {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    if ri != rj {
                        parent[ri.max(rj)] = ri.min(rj);
                    }
                }
                None => {
                    owner.insert(key, i);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

fn collect_symbols<'a>(formulas: impl Iterator<Item = &'a Formula>) -> (Vec<String>, Vec<String>) {
    let mut preds = Vec::new();
    let mut consts = Vec::new();
    for f in formulas {
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
    (preds, consts)
}

#[derive(Debug)]
enum Cf {
    Atom { pred: u8, term: Ct },
    Not(Box<Cf>),
    And(Box<Cf>, Box<Cf>),
    Or(Box<Cf>, Box<Cf>),
    Implies(Box<Cf>, Box<Cf>),
    /// `slot` indexes a precomputed type mask when the body has no nested quantifier.
    Forall { var: u16, body: Box<Cf>, slot: Option<usize> },
}

#[derive(Debug, Clone, Copy)]
enum Ct {
    Const(u8),
    Var(u16),
}

struct Compiled {
    k: usize,
    preds: Vec<String>,
    consts: Vec<String>,
    premises: Vec<Cf>,
    goal: Option<Cf>,
    /// Bodies of flat quantifiers, indexed by slot.
    flat: Vec<(u16, *const Cf)>,
    all_flat: bool,
}

/// A satisfying assignment: realized type set and constant types.
#[derive(Debug, Clone)]
struct Assignment {
    types: u64,
    consts: Vec<u8>,
}

impl Compiled {
    fn new(premises: &[&Formula], goal: Option<&Formula>) -> Result<Compiled, CheckError> {
        let (preds, consts) = collect_symbols(premises.iter().copied().chain(goal));
        if preds.len() > MAX_COMPONENT_PREDICATES {
            return Err(CheckError::TooManyPredicates {
                count: preds.len(),
                limit: MAX_COMPONENT_PREDICATES,
            });
        }
        let mut vars: Vec<String> = Vec::new();
        let mut c = Compiled {
            k: preds.len(),
            preds,
            consts,
            premises: Vec::new(),
            goal: None,
            flat: Vec::new(),
            all_flat: true,
        };
        let prem: Vec<Cf> = premises.iter().map(|f| c.lower(f, &mut vars)).collect();
        let goal = goal.map(|f| c.lower(f, &mut vars));
        c.premises = prem;
        c.goal = goal;
        c.flat.clear();
        c.all_flat = true;
        // Register flat quantifier bodies after the tree is in its final place.
        let mut flat = Vec::new();
        let mut all_flat = true;
        for f in c.premises.iter_mut().chain(c.goal.iter_mut()) {
            register_slots(f, &mut flat, &mut all_flat);
        }
        c.flat = flat;
        c.all_flat = all_flat;
        Ok(c)
    }

    fn lower(&self, f: &Formula, vars: &mut Vec<String>) -> Cf {
        match f {
            Formula::Atom { pred, term } => {
                let pred = self.preds.iter().position(|p| p == pred).expect("collected") as u8;
                let term = match term {
                    Term::Const(c) => Ct::Const(self.consts.iter().position(|x| x == c).expect("collected") as u8),
                    Term::Var(v) => {
                        let id = vars.iter().position(|x| x == v).unwrap_or_else(|| {
                            vars.push(v.clone());
                            vars.len() - 1
                        });
                        Ct::Var(id as u16)
                    }
                };
                Cf::Atom { pred, term }
            }
            Formula::Not(a) => Cf::Not(Box::new(self.lower(a, vars))),
            Formula::And(a, b) => Cf::And(Box::new(self.lower(a, vars)), Box::new(self.lower(b, vars))),
            Formula::Or(a, b) => Cf::Or(Box::new(self.lower(a, vars)), Box::new(self.lower(b, vars))),
            Formula::Implies(a, b) => {
                Cf::Implies(Box::new(self.lower(a, vars)), Box::new(self.lower(b, vars)))
            }
            Formula::Forall { var, body } => {
                let id = vars.iter().position(|x| x == var).unwrap_or_else(|| {
                    vars.push(var.clone());
                    vars.len() - 1
                }) as u16;
                Cf::Forall {
                    var: id,
                    body: Box::new(self.lower(body, vars)),
                    slot: None,
                }
            }
        }
    }

    fn type_count(&self) -> usize {
        1usize << self.k
    }

    fn full_set(&self) -> u64 {
        let n = self.type_count();
        if n == 64 {
            u64::MAX
        } else {
            (1u64 << n) - 1
        }
    }

    /// Type masks of every flat quantifier body under a constant assignment.
    fn masks(&self, consts: &[u8]) -> Vec<u64> {
        self.flat
            .iter()
            .map(|&(var, body)| {
                // SAFETY: `body` points into `self.premises` / `self.goal`,
                // which are not mutated after `new` returns.
                let body = unsafe { &*body };
                let mut m = 0u64;
                let mut env = Vec::with_capacity(1);
                for t in 0..self.type_count() {
                    env.clear();
                    env.push((var, t as u8));
                    if eval(body, 0, consts, &[], &mut env, None) {
                        m |= 1 << t;
                    }
                }
                m
            })
            .collect()
    }

    fn for_each_const_assignment(&self, mut f: impl FnMut(&[u8]) -> Result<bool, CheckError>) -> Result<(), CheckError> {
        let base = self.type_count();
        let mut consts = vec![0u8; self.consts.len()];
        loop {
            if f(&consts)? {
                return Ok(());
            }
            let mut i = 0;
            loop {
                if i == consts.len() {
                    return Ok(());
                }
                consts[i] += 1;
                if (consts[i] as usize) < base {
                    break;
                }
                consts[i] = 0;
                i += 1;
            }
        }
    }

    fn holds(&self, s: u64, consts: &[u8], masks: &[u64]) -> bool {
        let mut env = Vec::new();
        self.premises.iter().all(|p| eval(p, s, consts, masks, &mut env, None))
            && self
                .goal
                .as_ref()
                .is_none_or(|g| !eval(g, s, consts, masks, &mut env, None))
    }

    fn search_exhaustive(&self, max_domain: usize) -> Result<Option<Assignment>, CheckError> {
        let full = self.full_set();
        let mut found = None;
        self.for_each_const_assignment(|consts| {
            let masks = self.masks(consts);
            let mut allowed = full;
            for p in &self.premises {
                if let Cf::Forall { slot: Some(i), .. } = p {
                    allowed &= masks[*i];
                }
            }
            let required = consts.iter().fold(0u64, |acc, &t| acc | (1 << t));
            if required & !allowed != 0 {
                return Ok(false);
            }
            let free = allowed & !required;
            if free.count_ones() > ENUMERATION_TYPE_LIMIT {
                return Err(CheckError::SearchTooLarge {
                    free_types: free.count_ones(),
                    limit: ENUMERATION_TYPE_LIMIT,
                });
            }
            // Ascending submask order, so small witnesses come first.
            let mut sub = 0u64;
            loop {
                let s = required | sub;
                if s != 0 && (s.count_ones() as usize) <= max_domain && self.holds(s, consts, &masks) {
                    found = Some(Assignment {
                        types: s,
                        consts: consts.to_vec(),
                    });
                    return Ok(true);
                }
                if sub == free {
                    break;
                }
                sub = sub.wrapping_sub(free) & free;
            }
            Ok(false)
        })?;
        Ok(found)
    }

    fn search_symbolic(&self) -> Result<Option<Assignment>, CheckError> {
        let q = self.flat.len();
        if q > MAX_SYMBOLIC_SLOTS {
            return self.search_exhaustive(self.type_count());
        }
        let full = self.full_set();
        let mut found = None;
        self.for_each_const_assignment(|consts| {
            let masks = self.masks(consts);
            let required = consts.iter().fold(0u64, |acc, &t| acc | (1 << t));
            let mut env = Vec::new();
            for qa in 0u32..(1u32 << q) {
                let truth = |f: &Cf, env: &mut Vec<(u16, u8)>| eval(f, 0, consts, &masks, env, Some(qa));
                let ok = self.premises.iter().all(|p| truth(p, &mut env))
                    && self.goal.as_ref().is_none_or(|g| !truth(g, &mut env));
                if !ok {
                    continue;
                }
                let mut u = full;
                for (i, m) in masks.iter().enumerate() {
                    if qa & (1 << i) != 0 {
                        u &= m;
                    }
                }
                if u == 0 || required & !u != 0 {
                    continue;
                }
                let refutes_false_atoms = masks
                    .iter()
                    .enumerate()
                    .all(|(i, m)| qa & (1 << i) != 0 || u & !m != 0);
                if refutes_false_atoms {
                    found = Some(Assignment {
                        types: u,
                        consts: consts.to_vec(),
                    });
                    return Ok(true);
                }
            }
            Ok(false)
        })?;
        Ok(found)
    }
}

// `Compiled` holds raw pointers into its own boxed trees; they are never
// shared mutably.
unsafe impl Send for Compiled {}
unsafe impl Sync for Compiled {}

fn contains_quantifier(f: &Cf) -> bool {
    match f {
        Cf::Atom { .. } => false,
        Cf::Not(a) => contains_quantifier(a),
        Cf::And(a, b) | Cf::Or(a, b) | Cf::Implies(a, b) => contains_quantifier(a) || contains_quantifier(b),
        Cf::Forall { .. } => true,
    }
}

fn only_var(f: &Cf, var: u16) -> bool {
    match f {
        Cf::Atom { term: Ct::Var(v), .. } => *v == var,
        Cf::Atom { .. } => true,
        Cf::Not(a) => only_var(a, var),
        Cf::And(a, b) | Cf::Or(a, b) | Cf::Implies(a, b) => only_var(a, var) && only_var(b, var),
        Cf::Forall { .. } => false,
    }
}

fn register_slots(f: &mut Cf, flat: &mut Vec<(u16, *const Cf)>, all_flat: &mut bool) {
    match f {
        Cf::Atom { .. } => {}
        Cf::Not(a) => register_slots(a, flat, all_flat),
        Cf::And(a, b) | Cf::Or(a, b) | Cf::Implies(a, b) => {
            register_slots(a, flat, all_flat);
            register_slots(b, flat, all_flat);
        }
        Cf::Forall { var, body, slot } => {
            if contains_quantifier(body) || !only_var(body, *var) {
                *all_flat = false;
                register_slots(body, flat, all_flat);
            } else {
                *slot = Some(flat.len());
                flat.push((*var, &**body as *const Cf));
            }
        }
    }
}

/// Evaluates a compiled formula in the realized-type set `s`. With
/// `symbolic = Some(qa)`, flat quantifiers read their truth from bit `slot`
/// of `qa` instead of the type set.
fn eval(f: &Cf, s: u64, consts: &[u8], masks: &[u64], env: &mut Vec<(u16, u8)>, symbolic: Option<u32>) -> bool {
    match f {
        Cf::Atom { pred, term } => {
            let t = match term {
                Ct::Const(c) => consts[*c as usize],
                Ct::Var(v) => env.iter().rev().find(|(x, _)| x == v).map(|(_, t)| *t).expect("closed formula"),
            };
            (t >> pred) & 1 == 1
        }
        Cf::Not(a) => !eval(a, s, consts, masks, env, symbolic),
        Cf::And(a, b) => eval(a, s, consts, masks, env, symbolic) && eval(b, s, consts, masks, env, symbolic),
        Cf::Or(a, b) => eval(a, s, consts, masks, env, symbolic) || eval(b, s, consts, masks, env, symbolic),
        Cf::Implies(a, b) => !eval(a, s, consts, masks, env, symbolic) || eval(b, s, consts, masks, env, symbolic),
        Cf::Forall { var, body, slot } => match (slot, symbolic) {
            (Some(i), Some(qa)) => qa & (1 << i) != 0,
            (Some(i), None) => s & !masks[*i] == 0,
            (None, _) => {
                let mut bits = s;
                while bits != 0 {
                    let t = bits.trailing_zeros() as u8;
                    bits &= bits - 1;
                    env.push((*var, t));
                    let r = eval(body, s, consts, masks, env, symbolic);
                    env.pop();
                    if !r {
                        return false;
                    }
                }
                true
            }
        },
    }
}

fn combine(parts: &[(&Compiled, Assignment)]) -> Countermodel {
    let lists: Vec<Vec<u8>> = parts
        .iter()
        .map(|(_, a)| (0..64u8).filter(|t| a.types & (1u64 << t) != 0).collect())
        .collect();
    let domain_size = lists.iter().map(Vec::len).max().unwrap_or(1).max(1);
    let mut extensions = BTreeMap::new();
    let mut constants = BTreeMap::new();
    for ((c, a), types) in parts.iter().zip(&lists) {
        let type_at = |e: usize| types[e.min(types.len() - 1)];
        for (bit, pred) in c.preds.iter().enumerate() {
            let ext: Vec<usize> = (0..domain_size).filter(|&e| (type_at(e) >> bit) & 1 == 1).collect();
            extensions.insert(pred.clone(), ext);
        }
        for (name, &t) in c.consts.iter().zip(&a.consts) {
            let e = types.iter().position(|&x| x == t).expect("constant types are realized");
            constants.insert(name.clone(), e);
        }
    }
    Countermodel {
        domain_size,
        extensions,
        constants,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> Formula {
        Formula::parse(s).unwrap()
    }

    #[test]
    fn modus_ponens_is_entailed() {
        let p = [f("(forall ?x (-> (F ?x) (G ?x)))"), f("(F a)")];
        assert!(entails(&p, &f("(G a)"), 8).unwrap());
        assert!(decide(&p, &f("(G a)")).unwrap());
    }

    #[test]
    fn affirming_the_consequent_has_one_element_countermodel() {
        let p = [f("(forall ?x (-> (F ?x) (G ?x)))"), f("(G a)")];
        let w = find_countermodel(&p, &f("(F a)"), 8).unwrap().expect("not entailed");
        assert_eq!(w.domain_size, 1);
        assert_eq!(w.extensions["F"], Vec::<usize>::new());
        assert_eq!(w.extensions["G"], vec![0]);
        assert_eq!(w.constants["a"], 0);
        assert!(p.iter().all(|x| w.evaluate(x)));
        assert!(!w.evaluate(&f("(F a)")));
    }

    #[test]
    fn excluded_middle_from_no_premises() {
        assert!(entails(&[], &f("(or (F a) (not (F a)))"), 2).unwrap());
    }

    #[test]
    fn bound_below_small_model_size_is_rejected() {
        let p = [f("(forall ?x (-> (F ?x) (G ?x)))"), f("(forall ?x (-> (G ?x) (H ?x)))")];
        let err = entails(&p, &f("(forall ?x (-> (F ?x) (H ?x)))"), 4).unwrap_err();
        assert_eq!(err, CheckError::DomainBoundTooSmall { needed: 8, given: 4 });
    }

    #[test]
    fn unbound_variable_is_rejected() {
        let bad = Formula::atom("F", Term::var("x"));
        assert_eq!(entails(&[], &bad, 4), Err(CheckError::UnboundVariable("x".into())));
    }

    #[test]
    fn inconsistent_disjoint_premises_entail_anything() {
        let p = [f("(P b)"), f("(not (P b))")];
        assert!(entails(&p, &f("(G a)"), 2).unwrap());
        assert!(decide(&p, &f("(G a)")).unwrap());
    }

    #[test]
    fn countermodel_combines_disjoint_components() {
        let p = [
            f("(forall ?x (-> (F ?x) (G ?x)))"),
            f("(forall ?x (-> (P ?x) (Q ?x)))"),
            f("(P b)"),
        ];
        let w = find_countermodel(&p, &f("(F a)"), 4).unwrap().unwrap();
        assert!(p.iter().all(|x| w.evaluate(x)));
        assert!(!w.evaluate(&f("(F a)")));
    }

    #[test]
    fn nested_quantifiers_use_enumeration() {
        let p = [f("(forall ?x (forall ?y (-> (F ?x) (G ?y))))"), f("(F a)")];
        assert!(entails(&p, &f("(G b)"), 4).unwrap());
        assert!(decide(&p, &f("(G b)")).unwrap());
        assert!(!decide(&p, &f("(H b)")).unwrap());
    }

    #[test]
    fn negated_universal_needs_witness() {
        // ¬∀x F(x) is satisfiable only with an element outside F.
        let w = satisfiable(&[f("(not (forall ?x (F ?x)))"), f("(F a)")], 2).unwrap().unwrap();
        assert_eq!(w.domain_size, 2);
    }

    #[test]
    fn small_model_bound_is_per_component() {
        let fs = [f("(forall ?x (-> (F ?x) (G ?x)))"), f("(P b)")];
        assert_eq!(small_model_bound(fs.iter()).unwrap(), 4);
    }

    #[test]
    fn every_catalog_scheme_is_valid() {
        for scheme in crate::logic::scheme_catalog() {
            let report = validate_scheme(&scheme);
            assert!(report.entailed, "{} has countermodel {:?}", scheme.id, report.witness);
            assert!(decide(&scheme.premises, &scheme.conclusion).unwrap(), "{}", scheme.id);
        }
    }

    #[test]
    fn every_catalog_premise_is_necessary() {
        for scheme in crate::logic::scheme_catalog() {
            for drop in 0..scheme.premises.len() {
                let rest: Vec<Formula> = scheme
                    .premises
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != drop)
                    .map(|(_, p)| p.clone())
                    .collect();
                let w = find_countermodel(&rest, &scheme.conclusion, 64)
                    .unwrap()
                    .unwrap_or_else(|| panic!("{} premise {drop} is redundant", scheme.id));
                assert!(rest.iter().all(|p| w.evaluate(p)));
                assert!(!w.evaluate(&scheme.conclusion));
            }
        }
    }

    /// Literal search over every interpretation with 1..=max_n elements.
    fn brute_force_entails(premises: &[Formula], conclusion: &Formula, max_n: usize) -> bool {
        let (preds, consts) = collect_symbols(premises.iter().chain(std::iter::once(conclusion)));
        for n in 1..=max_n {
            let ext_count = 1usize << n;
            let mut ext_idx = vec![0usize; preds.len()];
            loop {
                let mut const_idx = vec![0usize; consts.len()];
                loop {
                    let model = Countermodel {
                        domain_size: n,
                        extensions: preds
                            .iter()
                            .zip(&ext_idx)
                            .map(|(p, &bits)| (p.clone(), (0..n).filter(|e| bits >> e & 1 == 1).collect()))
                            .collect(),
                        constants: consts.iter().cloned().zip(const_idx.iter().copied()).collect(),
                    };
                    if premises.iter().all(|p| model.evaluate(p)) && !model.evaluate(conclusion) {
                        return false;
                    }
                    if !bump(&mut const_idx, n) {
                        break;
                    }
                }
                if !bump(&mut ext_idx, ext_count) {
                    break;
                }
            }
        }
        true
    }

    fn bump(digits: &mut [usize], base: usize) -> bool {
        for d in digits.iter_mut() {
            *d += 1;
            if *d < base {
                return true;
            }
            *d = 0;
        }
        false
    }

    use proptest::prelude::*;

    fn small_formula() -> impl Strategy<Value = Formula> {
        let pred = prop_oneof![Just("F"), Just("G")];
        let ground = (pred.clone(), prop_oneof![Just("a"), Just("b")])
            .prop_map(|(p, c)| Formula::atom(p, Term::constant(c)));
        let open = pred.prop_map(|p| Formula::atom(p, Term::var("x")));
        let body = open.prop_recursive(2, 6, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                (inner.clone(), inner).prop_map(|(a, b)| Formula::implies(a, b)),
            ]
        });
        let leaf = prop_oneof![ground, body.prop_map(|b| Formula::forall("x", b))];
        leaf.prop_recursive(2, 6, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                (inner.clone(), inner).prop_map(|(a, b)| Formula::implies(a, b)),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn routes_agree_with_literal_search(
            premises in proptest::collection::vec(small_formula(), 0..3),
            conclusion in small_formula(),
        ) {
            let oracle = brute_force_entails(&premises, &conclusion, 4);
            prop_assert_eq!(entails(&premises, &conclusion, 4).unwrap(), oracle);
            prop_assert_eq!(decide(&premises, &conclusion).unwrap(), oracle);
            if let Some(w) = find_countermodel(&premises, &conclusion, 4).unwrap() {
                prop_assert!(premises.iter().all(|p| w.evaluate(p)));
                prop_assert!(!w.evaluate(&conclusion));
            }
        }
    }
}
