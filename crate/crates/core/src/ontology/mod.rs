//! Pathway hierarchy and gene membership facts.
//!
//! The ontology is a DAG of pathway nodes (`is-a` edges point from child to
//! parent) plus direct gene-to-pathway annotations. Membership is closed
//! upward on demand: a gene annotated to a pathway is also a member of every
//! ancestor of that pathway.

mod ingest;
mod model;

pub use ingest::{IngestCounts, IngestOptions, IngestReport, ReactomeSources};
pub use model::CanonicalModel;

use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OntologyError {
    #[error("cannot read {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("cyclic hierarchy: {}", cycle.join(" -> "))]
    Cycle { cycle: Vec<String> },
    #[error("{}`{from}` references unknown pathway `{to}`", line_prefix(*line))]
    Dangling { line: Option<usize>, from: String, to: String },
    #[error("line {line}: pathway `{id}` redefined with a different name")]
    ConflictingPathway { line: usize, id: String },
    #[error("ontology has no root pathway")]
    NoRoot,
    #[error("root filter `{0}` matches no pathway id or name")]
    UnknownRoot(String),
    #[error("unknown pathway `{0}`")]
    UnknownPathway(String),
    #[error("unknown gene `{0}`")]
    UnknownGene(String),
}

fn line_prefix(line: Option<usize>) -> String {
    line.map(|l| format!("line {l}: ")).unwrap_or_default()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathwayNode {
    pub id: String,
    pub name: String,
    /// Sorted, deduplicated.
    pub parents: Vec<String>,
    /// Shortest distance to a root.
    pub level: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneRecord {
    pub symbol: String,
    /// Direct annotations, sorted and deduplicated.
    pub pathways: Vec<String>,
}

/// One row of [`Ontology::dictionary_stats`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelStats {
    pub level: usize,
    pub unique_pathway_names: usize,
    /// Genes that are members (with closure) of some pathway at this level.
    pub unique_genes: usize,
}

#[derive(Debug)]
pub struct Ontology {
    nodes: BTreeMap<String, PathwayNode>,
    genes: BTreeMap<String, GeneRecord>,
    version: String,
    children: BTreeMap<String, Vec<String>>,
    model: OnceLock<CanonicalModel>,
}

impl PartialEq for Ontology {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.genes == other.genes && self.version == other.version
    }
}

impl Ontology {
    /// Validates raw tables: references, acyclicity, roots; computes levels.
    pub(crate) fn from_tables(
        nodes: BTreeMap<String, (String, BTreeSet<String>)>,
        genes: BTreeMap<String, BTreeSet<String>>,
        version: String,
    ) -> Result<Ontology, OntologyError> {
        if nodes.is_empty() {
            return Err(OntologyError::NoRoot);
        }
        let mut children: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (id, (_, parents)) in &nodes {
            for p in parents {
                if !nodes.contains_key(p) {
                    return Err(OntologyError::Dangling {
                        line: None,
                        from: id.clone(),
                        to: p.clone(),
                    });
                }
                children.entry(p.clone()).or_default().push(id.clone());
            }
        }
        if let Some(cycle) = find_cycle(&nodes) {
            return Err(OntologyError::Cycle { cycle });
        }
        let roots: Vec<&String> = nodes.iter().filter(|(_, (_, ps))| ps.is_empty()).map(|(id, _)| id).collect();
        if roots.is_empty() {
            return Err(OntologyError::NoRoot);
        }
        let mut level: BTreeMap<&str, usize> = BTreeMap::new();
        let mut queue: VecDeque<&str> = VecDeque::new();
        for r in roots {
            level.insert(r, 0);
            queue.push_back(r);
        }
        while let Some(id) = queue.pop_front() {
            let l = level[id];
            for c in children.get(id).into_iter().flatten() {
                if !level.contains_key(c.as_str()) {
                    level.insert(c, l + 1);
                    queue.push_back(c);
                }
            }
        }
        let nodes: BTreeMap<String, PathwayNode> = nodes
            .iter()
            .map(|(id, (name, parents))| {
                (
                    id.clone(),
                    PathwayNode {
                        id: id.clone(),
                        name: name.clone(),
                        parents: parents.iter().cloned().collect(),
                        level: level[id.as_str()],
                    },
                )
            })
            .collect();
        for (symbol, pathways) in &genes {
            for p in pathways {
                if !nodes.contains_key(p) {
                    return Err(OntologyError::Dangling {
                        line: None,
                        from: symbol.clone(),
                        to: p.clone(),
                    });
                }
            }
        }
        let genes = genes
            .into_iter()
            .map(|(symbol, pathways)| {
                let rec = GeneRecord {
                    symbol: symbol.clone(),
                    pathways: pathways.into_iter().collect(),
                };
                (symbol, rec)
            })
            .collect();
        for list in children.values_mut() {
            list.sort();
        }
        Ok(Ontology {
            nodes,
            genes,
            version,
            children,
            model: OnceLock::new(),
        })
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn pathways(&self) -> impl Iterator<Item = &PathwayNode> {
        self.nodes.values()
    }

    pub fn genes(&self) -> impl Iterator<Item = &GeneRecord> {
        self.genes.values()
    }

    pub fn pathway(&self, id: &str) -> Option<&PathwayNode> {
        self.nodes.get(id)
    }

    pub fn gene(&self, symbol: &str) -> Option<&GeneRecord> {
        self.genes.get(symbol)
    }

    pub fn pathway_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn gene_count(&self) -> usize {
        self.genes.len()
    }

    pub fn roots(&self) -> impl Iterator<Item = &PathwayNode> {
        self.nodes.values().filter(|n| n.parents.is_empty())
    }

    pub fn children(&self, id: &str) -> &[String] {
        self.children.get(id).map(Vec::as_slice).unwrap_or(&[])
    }

    fn require_pathway(&self, id: &str) -> Result<&PathwayNode, OntologyError> {
        self.nodes.get(id).ok_or_else(|| OntologyError::UnknownPathway(id.to_string()))
    }

    /// Transitive parents of `id`, excluding `id`. Every node precedes its own
    /// ancestors; ties are broken by id.
    pub fn ancestors(&self, id: &str) -> Result<Vec<String>, OntologyError> {
        self.require_pathway(id)?;
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut stack = vec![id];
        while let Some(cur) = stack.pop() {
            for p in &self.nodes[cur].parents {
                if seen.insert(p) {
                    stack.push(p);
                }
            }
        }
        // Longest distance from `id` inside the ancestor subgraph.
        let mut dist: BTreeMap<&str, usize> = BTreeMap::new();
        let mut pending: BTreeMap<&str, usize> = BTreeMap::new();
        for &a in &seen {
            let n_children = self
                .children(a)
                .iter()
                .filter(|c| c.as_str() == id || seen.contains(c.as_str()))
                .count();
            pending.insert(a, n_children);
        }
        let mut ready = vec![(id, 0usize)];
        while let Some((cur, d)) = ready.pop() {
            for p in &self.nodes[cur].parents {
                let e = dist.entry(p).or_insert(0);
                *e = (*e).max(d + 1);
                let left = pending.get_mut(p.as_str()).expect("ancestor");
                *left -= 1;
                if *left == 0 {
                    ready.push((p, dist[p.as_str()]));
                }
            }
        }
        let mut out: Vec<(&str, usize)> = dist.into_iter().collect();
        out.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(b.0)));
        Ok(out.into_iter().map(|(s, _)| s.to_string()).collect())
    }

    /// Transitive children of `id`, excluding `id`, in breadth-first order.
    pub fn descendants(&self, id: &str) -> Result<Vec<String>, OntologyError> {
        self.require_pathway(id)?;
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut out = Vec::new();
        let mut queue: VecDeque<&str> = VecDeque::from([id]);
        while let Some(cur) = queue.pop_front() {
            for c in self.children(cur) {
                if seen.insert(c) {
                    out.push(c.clone());
                    queue.push_back(c);
                }
            }
        }
        Ok(out)
    }

    /// `a` equals `b` or `b` is an ancestor of `a`.
    pub fn is_subsumed(&self, a: &str, b: &str) -> Result<bool, OntologyError> {
        self.require_pathway(b)?;
        Ok(a == b || self.ancestors(a)?.iter().any(|x| x == b))
    }

    /// True iff `pathway` is a direct annotation of `symbol` or an ancestor of one.
    pub fn is_member(&self, symbol: &str, pathway: &str) -> Result<bool, OntologyError> {
        let gene = self
            .genes
            .get(symbol)
            .ok_or_else(|| OntologyError::UnknownGene(symbol.to_string()))?;
        self.require_pathway(pathway)?;
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut stack: Vec<&str> = gene.pathways.iter().map(String::as_str).collect();
        while let Some(cur) = stack.pop() {
            if cur == pathway {
                return Ok(true);
            }
            if seen.insert(cur) {
                stack.extend(self.nodes[cur].parents.iter().map(String::as_str));
            }
        }
        Ok(false)
    }

    /// All pathways a gene belongs to, with closure, sorted by id.
    pub fn memberships(&self, symbol: &str) -> Result<Vec<String>, OntologyError> {
        let gene = self
            .genes
            .get(symbol)
            .ok_or_else(|| OntologyError::UnknownGene(symbol.to_string()))?;
        let mut out: BTreeSet<String> = BTreeSet::new();
        for p in &gene.pathways {
            out.insert(p.clone());
            out.extend(self.ancestors(p)?);
        }
        Ok(out.into_iter().collect())
    }

    pub fn dictionary_stats(&self) -> Vec<LevelStats> {
        let model = self.canonical_model();
        let mut names: BTreeMap<usize, BTreeSet<&str>> = BTreeMap::new();
        let mut genes: BTreeMap<usize, BTreeSet<&str>> = BTreeMap::new();
        for node in self.nodes.values() {
            names.entry(node.level).or_default().insert(&node.name);
            let entry = genes.entry(node.level).or_default();
            for g in model.member_genes(&node.id) {
                entry.insert(g);
            }
        }
        names
            .into_iter()
            .map(|(level, n)| LevelStats {
                level,
                unique_pathway_names: n.len(),
                unique_genes: genes.get(&level).map_or(0, BTreeSet::len),
            })
            .collect()
    }

    /// Index used for DomainValid checks; built once per ontology.
    pub fn canonical_model(&self) -> &CanonicalModel {
        self.model.get_or_init(|| CanonicalModel::build(self))
    }
}

fn find_cycle(nodes: &BTreeMap<String, (String, BTreeSet<String>)>) -> Option<Vec<String>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }
    let mut mark: BTreeMap<&str, Mark> = BTreeMap::new();
    for start in nodes.keys() {
        if mark.contains_key(start.as_str()) {
            continue;
        }
        // Iterative DFS over parent edges; `path` mirrors the open stack.
        let mut path: Vec<&str> = vec![start];
        let mut iters: Vec<std::collections::btree_set::Iter<'_, String>> = vec![nodes[start].1.iter()];
        mark.insert(start, Mark::Open);
        while let Some(it) = iters.last_mut() {
            match it.next() {
                Some(p) => match mark.get(p.as_str()) {
                    Some(Mark::Open) => {
                        let from = path.iter().position(|x| x == p).expect("open node on path");
                        let mut cycle: Vec<String> = path[from..].iter().map(|s| s.to_string()).collect();
                        cycle.push(p.clone());
                        return Some(cycle);
                    }
                    Some(Mark::Done) => {}
                    None => {
                        mark.insert(p, Mark::Open);
                        path.push(p);
                        iters.push(nodes[p.as_str()].1.iter());
                    }
                },
                None => {
                    let done = path.pop().expect("non-empty");
                    mark.insert(done, Mark::Done);
                    iters.pop();
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond() -> Ontology {
        let src = r#"{"kind":"pathway","id":"D","name":"D","parents":[]}
{"kind":"pathway","id":"B","name":"B","parents":["D"]}
{"kind":"pathway","id":"C","name":"C","parents":["D"]}
{"kind":"pathway","id":"A","name":"A","parents":["B","C"]}
{"kind":"gene","symbol":"G1","pathways":["A"]}
"#;
        Ontology::from_jsonl_str(src).unwrap()
    }

    #[test]
    fn diamond_ancestors_end_at_root() {
        let o = diamond();
        assert_eq!(o.ancestors("A").unwrap(), vec!["B", "C", "D"]);
        assert!(o.ancestors("D").unwrap().is_empty());
        assert_eq!(o.pathway("A").unwrap().level, 2);
    }

    #[test]
    fn ancestors_are_topological_with_uneven_depths() {
        let src = r#"{"kind":"pathway","id":"R","name":"R","parents":[]}
{"kind":"pathway","id":"M","name":"M","parents":["R"]}
{"kind":"pathway","id":"X","name":"X","parents":["R","M"]}
"#;
        let o = Ontology::from_jsonl_str(src).unwrap();
        assert_eq!(o.ancestors("X").unwrap(), vec!["M", "R"]);
        assert_eq!(o.pathway("X").unwrap().level, 1);
    }

    #[test]
    fn membership_closes_upward() {
        let o = diamond();
        assert!(o.is_member("G1", "A").unwrap());
        assert!(o.is_member("G1", "D").unwrap());
        assert!(matches!(o.is_member("NOPE", "A"), Err(OntologyError::UnknownGene(_))));
        assert_eq!(o.memberships("G1").unwrap(), vec!["A", "B", "C", "D"]);
    }

    #[test]
    fn cycle_is_reported() {
        let src = r#"{"kind":"pathway","id":"A","name":"A","parents":["B"]}
{"kind":"pathway","id":"B","name":"B","parents":["A"]}
"#;
        match Ontology::from_jsonl_str(src) {
            Err(OntologyError::Cycle { cycle }) => {
                assert_eq!(cycle.first(), cycle.last());
                assert_eq!(cycle.len(), 3);
            }
            other => panic!("expected cycle, got {other:?}"),
        }
    }

    #[test]
    fn stats_count_closure_genes() {
        let stats = diamond().dictionary_stats();
        assert_eq!(
            stats.iter().map(|s| (s.level, s.unique_pathway_names, s.unique_genes)).collect::<Vec<_>>(),
            vec![(0, 1, 1), (1, 2, 1), (2, 1, 1)]
        );
    }

    #[test]
    fn stats_without_genes_are_zero() {
        let src = r#"{"kind":"pathway","id":"A","name":"A","parents":[]}
{"kind":"pathway","id":"B","name":"B","parents":["A"]}
"#;
        let stats = Ontology::from_jsonl_str(src).unwrap().dictionary_stats();
        assert!(stats.iter().all(|s| s.unique_genes == 0));
    }
}
