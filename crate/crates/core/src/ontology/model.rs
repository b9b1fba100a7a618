//! The intended interpretation of an ontology.
//!
//! The domain holds every gene plus one generic individual per pathway. A
//! generic individual of `Q` belongs to `Q` and all of its ancestors and to
//! nothing else, so a universal sentence `∀x F(x) → G(x)` over pathway
//! predicates is true exactly when every gene and every sub-pathway of `F`
//! also falls under `G`. Formulas use pathway ids as predicate symbols and
//! gene symbols as constants.

use super::{Ontology, OntologyError};
use crate::logic::{Countermodel, Formula};
use std::collections::{BTreeMap, BTreeSet, HashMap};

#[derive(Debug)]
pub struct CanonicalModel {
    pathway_ids: Vec<String>,
    pathway_index: HashMap<String, u32>,
    gene_symbols: Vec<String>,
    gene_index: HashMap<String, u32>,
    /// Per pathway: sorted element ids (genes first, then generics at `G + i`).
    members: Vec<Vec<u32>>,
    /// Per gene: sorted pathway indices it belongs to, with closure.
    gene_closure: Vec<Vec<u32>>,
}

impl CanonicalModel {
    pub(super) fn build(o: &Ontology) -> CanonicalModel {
        let pathway_ids: Vec<String> = o.pathways().map(|n| n.id.clone()).collect();
        let pathway_index: HashMap<String, u32> =
            pathway_ids.iter().enumerate().map(|(i, id)| (id.clone(), i as u32)).collect();
        let gene_symbols: Vec<String> = o.genes().map(|g| g.symbol.clone()).collect();
        let gene_index: HashMap<String, u32> =
            gene_symbols.iter().enumerate().map(|(i, s)| (s.clone(), i as u32)).collect();

        // Upward closure (self included) per pathway, memoized over the DAG.
        let mut up: Vec<Option<Vec<u32>>> = vec![None; pathway_ids.len()];
        fn closure(o: &Ontology, ids: &[String], index: &HashMap<String, u32>, up: &mut Vec<Option<Vec<u32>>>, i: usize) -> Vec<u32> {
            if let Some(c) = &up[i] {
                return c.clone();
            }
            let mut set: BTreeSet<u32> = BTreeSet::from([i as u32]);
            let parents = o.pathway(&ids[i]).expect("indexed").parents.clone();
            for p in parents {
                let j = index[&p] as usize;
                set.extend(closure(o, ids, index, up, j));
            }
            let v: Vec<u32> = set.into_iter().collect();
            up[i] = Some(v.clone());
            v
        }
        let ups: Vec<Vec<u32>> =
            (0..pathway_ids.len()).map(|i| closure(o, &pathway_ids, &pathway_index, &mut up, i)).collect();

        let n_genes = gene_symbols.len() as u32;
        let mut members: Vec<Vec<u32>> = vec![Vec::new(); pathway_ids.len()];
        let mut gene_closure = Vec::with_capacity(gene_symbols.len());
        for (g, sym) in gene_symbols.iter().enumerate() {
            let mut set: BTreeSet<u32> = BTreeSet::new();
            for d in &o.gene(sym).expect("indexed").pathways {
                set.extend(&ups[pathway_index[d] as usize]);
            }
            for &p in &set {
                members[p as usize].push(g as u32);
            }
            gene_closure.push(set.into_iter().collect());
        }
        for (q, anc) in ups.iter().enumerate() {
            for &p in anc {
                members[p as usize].push(n_genes + q as u32);
            }
        }
        for m in &mut members {
            m.sort_unstable();
        }
        CanonicalModel {
            pathway_ids,
            pathway_index,
            gene_symbols,
            gene_index,
            members,
            gene_closure,
        }
    }

    fn element_count(&self) -> usize {
        self.gene_symbols.len() + self.pathway_ids.len()
    }

    fn pathway(&self, id: &str) -> Result<u32, OntologyError> {
        self.pathway_index
            .get(id)
            .copied()
            .ok_or_else(|| OntologyError::UnknownPathway(id.to_string()))
    }

    fn gene(&self, symbol: &str) -> Result<u32, OntologyError> {
        self.gene_index
            .get(symbol)
            .copied()
            .ok_or_else(|| OntologyError::UnknownGene(symbol.to_string()))
    }

    /// Genes in the closure of a pathway; empty for unknown ids.
    pub fn member_genes(&self, pathway: &str) -> impl Iterator<Item = &str> {
        let n_genes = self.gene_symbols.len() as u32;
        self.pathway_index
            .get(pathway)
            .map(|&i| self.members[i as usize].as_slice())
            .unwrap_or(&[])
            .iter()
            .take_while(move |&&e| e < n_genes)
            .map(|&e| self.gene_symbols[e as usize].as_str())
    }

    /// Number of genes in the closure of a pathway.
    pub fn member_gene_count(&self, pathway: &str) -> usize {
        self.member_genes(pathway).count()
    }

    /// Pathways a gene belongs to, with closure.
    pub fn gene_pathways(&self, symbol: &str) -> impl Iterator<Item = &str> {
        self.gene_index
            .get(symbol)
            .map(|&g| self.gene_closure[g as usize].as_slice())
            .unwrap_or(&[])
            .iter()
            .map(|&p| self.pathway_ids[p as usize].as_str())
    }

    /// The intended interpretation restricted to the given symbols, collapsed
    /// to one element per realized membership pattern.
    pub fn interpretation(&self, pathways: &[String], genes: &[String]) -> Result<Countermodel, OntologyError> {
        let idx: Vec<u32> = pathways.iter().map(|p| self.pathway(p)).collect::<Result<_, _>>()?;
        let gene_elems: Vec<u32> = genes.iter().map(|g| self.gene(g)).collect::<Result<_, _>>()?;
        let mut pattern: HashMap<u32, u64> = HashMap::new();
        for (bit, &p) in idx.iter().enumerate() {
            for &e in &self.members[p as usize] {
                *pattern.entry(e).or_insert(0) |= 1u64 << bit;
            }
        }
        let mut types: BTreeSet<u64> = pattern.values().copied().collect();
        if pattern.len() < self.element_count() {
            types.insert(0);
        }
        let types: Vec<u64> = types.into_iter().collect();
        let position = |t: u64| types.iter().position(|&x| x == t).expect("realized");
        let extensions: BTreeMap<String, Vec<usize>> = pathways
            .iter()
            .enumerate()
            .map(|(bit, p)| {
                let ext = types.iter().enumerate().filter(|(_, &t)| t >> bit & 1 == 1).map(|(i, _)| i).collect();
                (p.clone(), ext)
            })
            .collect();
        let constants = genes
            .iter()
            .zip(&gene_elems)
            .map(|(g, e)| (g.clone(), position(pattern.get(e).copied().unwrap_or(0))))
            .collect();
        Ok(Countermodel {
            domain_size: types.len(),
            extensions,
            constants,
        })
    }

    /// Truth of a closed formula in the intended interpretation.
    pub fn holds(&self, f: &Formula) -> Result<bool, OntologyError> {
        Ok(self.interpretation(&f.predicates(), &f.constants())?.evaluate(f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> Ontology {
        let src = r#"{"kind":"pathway","id":"D","name":"Disease","parents":[]}
{"kind":"pathway","id":"I","name":"Infectious disease","parents":["D"]}
{"kind":"pathway","id":"V","name":"Viral","parents":["I"]}
{"kind":"pathway","id":"M","name":"Metabolic","parents":["D"]}
{"kind":"gene","symbol":"G1","pathways":["V"]}
{"kind":"gene","symbol":"G2","pathways":["M"]}
{"kind":"gene","symbol":"G3","pathways":["I","M"]}
"#;
        Ontology::from_jsonl_str(src).unwrap()
    }

    fn holds(o: &Ontology, s: &str) -> bool {
        o.canonical_model().holds(&Formula::parse(s).unwrap()).unwrap()
    }

    #[test]
    fn subsumption_follows_edges() {
        let o = toy();
        assert!(holds(&o, "(forall ?x (-> (V ?x) (D ?x)))"));
        assert!(!holds(&o, "(forall ?x (-> (D ?x) (V ?x)))"));
        // Shared gene G3 does not make M a subclass of I.
        assert!(!holds(&o, "(forall ?x (-> (M ?x) (I ?x)))"));
    }

    #[test]
    fn disjointness_needs_no_shared_member() {
        let o = toy();
        assert!(holds(&o, "(forall ?x (-> (V ?x) (not (M ?x))))"));
        assert!(!holds(&o, "(forall ?x (-> (I ?x) (not (M ?x))))"));
    }

    #[test]
    fn ground_facts_use_closure() {
        let o = toy();
        assert!(holds(&o, "(D G1)"));
        assert!(holds(&o, "(not (M G1))"));
        assert!(holds(&o, "(and (I G3) (M G3))"));
    }

    #[test]
    fn unknown_symbols_are_errors() {
        let o = toy();
        let m = o.canonical_model();
        assert!(matches!(m.holds(&Formula::parse("(X G1)").unwrap()), Err(OntologyError::UnknownPathway(_))));
        assert!(matches!(m.holds(&Formula::parse("(D ZZ)").unwrap()), Err(OntologyError::UnknownGene(_))));
    }

    #[test]
    fn closure_lists() {
        let o = toy();
        let m = o.canonical_model();
        assert_eq!(m.member_genes("I").collect::<Vec<_>>(), vec!["G1", "G3"]);
        assert_eq!(m.gene_pathways("G1").collect::<Vec<_>>(), vec!["D", "I", "V"]);
    }
}
