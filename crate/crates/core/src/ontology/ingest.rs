use super::{Ontology, OntologyError};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, Default)]
pub struct IngestOptions {
    /// Keep only the sub-hierarchy under this pathway (id, or unique name).
    pub root: Option<String>,
    /// Overrides the version tag found in the source.
    pub version: Option<String>,
}

/// Paths of a Reactome-style TSV export.
#[derive(Clone, Debug)]
pub struct ReactomeSources {
    /// `parent_id<TAB>child_id`
    pub relations: PathBuf,
    /// `gene_symbol<TAB>pathway_id<TAB>pathway_name`
    pub membership: PathBuf,
    /// Optional `pathway_id<TAB>name[<TAB>...]`, for pathways without genes.
    pub names: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct IngestCounts {
    pub pathways: usize,
    pub genes: usize,
    pub memberships: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub unfiltered: IngestCounts,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub filtered: Option<IngestCounts>,
    pub duplicate_rows: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum Record {
    Meta {
        version: String,
    },
    Pathway {
        id: String,
        name: String,
        #[serde(default)]
        parents: Vec<String>,
    },
    Gene {
        symbol: String,
        #[serde(default)]
        pathways: Vec<String>,
    },
}

#[derive(Default)]
struct Tables {
    nodes: BTreeMap<String, (String, BTreeSet<String>)>,
    genes: BTreeMap<String, BTreeSet<String>>,
    /// (line, from, to) for every pathway reference, checked after parsing.
    refs: Vec<(usize, String, String)>,
    version: String,
    duplicates: usize,
}

impl Tables {
    fn add_pathway(&mut self, line: usize, id: &str, name: &str) -> Result<(), OntologyError> {
        match self.nodes.get(id) {
            Some((existing, _)) if existing != name => Err(OntologyError::ConflictingPathway {
                line,
                id: id.to_string(),
            }),
            Some(_) => Ok(()),
            None => {
                self.nodes.insert(id.to_string(), (name.to_string(), BTreeSet::new()));
                Ok(())
            }
        }
    }

    fn add_parent(&mut self, line: usize, child: &str, parent: &str) {
        let parents = &mut self.nodes.get_mut(child).expect("child registered").1;
        if !parents.insert(parent.to_string()) {
            self.duplicates += 1;
        }
        self.refs.push((line, child.to_string(), parent.to_string()));
    }

    fn add_membership(&mut self, line: usize, symbol: &str, pathway: &str) {
        if !self.genes.entry(symbol.to_string()).or_default().insert(pathway.to_string()) {
            self.duplicates += 1;
        }
        self.refs.push((line, symbol.to_string(), pathway.to_string()));
    }

    fn counts(&self) -> IngestCounts {
        IngestCounts {
            pathways: self.nodes.len(),
            genes: self.genes.len(),
            memberships: self.genes.values().map(BTreeSet::len).sum(),
        }
    }

    fn check_refs(&self) -> Result<(), OntologyError> {
        for (line, from, to) in &self.refs {
            if !self.nodes.contains_key(to) {
                return Err(OntologyError::Dangling {
                    line: Some(*line),
                    from: from.clone(),
                    to: to.clone(),
                });
            }
        }
        Ok(())
    }

    fn restrict_to(&mut self, root: &str) -> Result<(), OntologyError> {
        let root_id = if self.nodes.contains_key(root) {
            root.to_string()
        } else {
            let matches: Vec<&String> = self.nodes.iter().filter(|(_, (n, _))| n == root).map(|(id, _)| id).collect();
            match matches.as_slice() {
                [one] => (*one).clone(),
                [] => return Err(OntologyError::UnknownRoot(root.to_string())),
                many => {
                    return Err(OntologyError::UnknownRoot(format!(
                        "{root} (ambiguous: {})",
                        many.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
                    )))
                }
            }
        };
        let mut children: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for (id, (_, parents)) in &self.nodes {
            for p in parents {
                children.entry(p).or_default().push(id);
            }
        }
        let mut keep: BTreeSet<String> = BTreeSet::from([root_id.clone()]);
        let mut queue = VecDeque::from([root_id.as_str()]);
        while let Some(cur) = queue.pop_front() {
            for &c in children.get(cur).into_iter().flatten() {
                if keep.insert(c.to_string()) {
                    queue.push_back(c);
                }
            }
        }
        self.nodes.retain(|id, _| keep.contains(id));
        for (_, parents) in self.nodes.values_mut() {
            parents.retain(|p| keep.contains(p));
        }
        for pathways in self.genes.values_mut() {
            pathways.retain(|p| keep.contains(p));
        }
        self.genes.retain(|_, ps| !ps.is_empty());
        Ok(())
    }

    fn finish(mut self, opts: &IngestOptions) -> Result<(Ontology, IngestReport), OntologyError> {
        self.check_refs()?;
        let mut report = IngestReport {
            unfiltered: self.counts(),
            filtered: None,
            duplicate_rows: self.duplicates,
        };
        if let Some(root) = &opts.root {
            self.restrict_to(root)?;
            report.filtered = Some(self.counts());
        }
        let version = opts.version.clone().unwrap_or(self.version);
        let o = Ontology::from_tables(self.nodes, self.genes, version)?;
        Ok((o, report))
    }
}

fn read(path: &Path) -> Result<String, OntologyError> {
    std::fs::read_to_string(path).map_err(|source| OntologyError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn tsv_rows(src: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    src.lines().enumerate().filter_map(|(i, line)| {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            None
        } else {
            Some((i + 1, line.split('\t').map(str::trim).collect()))
        }
    })
}

fn require_columns(line: usize, cols: &[&str], n: usize) -> Result<(), OntologyError> {
    if cols.len() < n || cols[..n].iter().any(|c| c.is_empty()) {
        return Err(OntologyError::Malformed {
            line,
            message: format!("expected {n} non-empty tab-separated columns, found {}", cols.len()),
        });
    }
    Ok(())
}

impl Ontology {
    /// Canonical JSONL with default options.
    pub fn from_jsonl_str(src: &str) -> Result<Ontology, OntologyError> {
        Ok(Ontology::ingest_jsonl(src, &IngestOptions::default())?.0)
    }

    pub fn ingest_jsonl(src: &str, opts: &IngestOptions) -> Result<(Ontology, IngestReport), OntologyError> {
        let mut t = Tables::default();
        let mut pending_parents: Vec<(usize, String, Vec<String>)> = Vec::new();
        for (i, line) in src.lines().enumerate() {
            let line_no = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let rec: Record = serde_json::from_str(line).map_err(|e| OntologyError::Malformed {
                line: line_no,
                message: e.to_string(),
            })?;
            match rec {
                Record::Meta { version } => t.version = version,
                Record::Pathway { id, name, parents } => {
                    if id.is_empty() {
                        return Err(OntologyError::Malformed {
                            line: line_no,
                            message: "empty pathway id".into(),
                        });
                    }
                    t.add_pathway(line_no, &id, &name)?;
                    pending_parents.push((line_no, id, parents));
                }
                Record::Gene { symbol, pathways } => {
                    if symbol.is_empty() {
                        return Err(OntologyError::Malformed {
                            line: line_no,
                            message: "empty gene symbol".into(),
                        });
                    }
                    t.genes.entry(symbol.clone()).or_default();
                    for p in pathways {
                        t.add_membership(line_no, &symbol, &p);
                    }
                }
            }
        }
        for (line, id, parents) in pending_parents {
            for p in parents {
                t.add_parent(line, &id, &p);
            }
        }
        t.finish(opts)
    }

    pub fn load_jsonl(path: &Path, opts: &IngestOptions) -> Result<(Ontology, IngestReport), OntologyError> {
        Ontology::ingest_jsonl(&read(path)?, opts)
    }

    /// Relation rows are `parent_id<TAB>child_id`; membership rows are
    /// `gene_symbol<TAB>pathway_id<TAB>pathway_name`. Pathways named nowhere
    /// take their id as name.
    pub fn ingest_reactome(
        relations: &str,
        membership: &str,
        names: Option<&str>,
        opts: &IngestOptions,
    ) -> Result<(Ontology, IngestReport), OntologyError> {
        let mut t = Tables::default();
        let mut named: BTreeMap<String, String> = BTreeMap::new();
        let mut name_conflict = |line: usize, id: &str, name: &str| -> Result<(), OntologyError> {
            match named.get(id) {
                Some(n) if n != name => Err(OntologyError::ConflictingPathway {
                    line,
                    id: id.to_string(),
                }),
                Some(_) => Ok(()),
                None => {
                    named.insert(id.to_string(), name.to_string());
                    Ok(())
                }
            }
        };
        if let Some(names) = names {
            for (line, cols) in tsv_rows(names) {
                require_columns(line, &cols, 2)?;
                name_conflict(line, cols[0], cols[1])?;
            }
        }
        let mut rows = Vec::new();
        for (line, cols) in tsv_rows(membership) {
            require_columns(line, &cols, 3)?;
            name_conflict(line, cols[1], cols[2])?;
            rows.push((line, cols[0], cols[1]));
        }
        let mut edges = Vec::new();
        for (line, cols) in tsv_rows(relations) {
            require_columns(line, &cols, 2)?;
            edges.push((line, cols[0], cols[1]));
        }
        let mut ids: BTreeSet<&str> = BTreeSet::new();
        for &(_, parent, child) in &edges {
            ids.insert(parent);
            ids.insert(child);
        }
        for &(_, _, pathway) in &rows {
            ids.insert(pathway);
        }
        for id in ids {
            let name = named.get(id).map(String::as_str).unwrap_or(id);
            t.add_pathway(0, id, name)?;
        }
        for (line, parent, child) in edges {
            t.add_parent(line, child, parent);
        }
        for (line, gene, pathway) in rows {
            t.add_membership(line, gene, pathway);
        }
        t.finish(opts)
    }

    pub fn load_reactome(sources: &ReactomeSources, opts: &IngestOptions) -> Result<(Ontology, IngestReport), OntologyError> {
        let relations = read(&sources.relations)?;
        let membership = read(&sources.membership)?;
        let names = sources.names.as_deref().map(read).transpose()?;
        Ontology::ingest_reactome(&relations, &membership, names.as_deref(), opts)
    }

    /// Canonical JSONL: optional meta line, pathways by id, genes by symbol.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        let mut push = |r: &Record| {
            out.push_str(&serde_json::to_string(r).expect("records serialize"));
            out.push('\n');
        };
        if !self.version.is_empty() {
            push(&Record::Meta {
                version: self.version.clone(),
            });
        }
        for n in self.nodes.values() {
            push(&Record::Pathway {
                id: n.id.clone(),
                name: n.name.clone(),
                parents: n.parents.clone(),
            });
        }
        for g in self.genes.values() {
            push(&Record::Gene {
                symbol: g.symbol.clone(),
                pathways: g.pathways.clone(),
            });
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOY: &str = r#"{"kind":"pathway","id":"R-1","name":"Disease","parents":[]}
{"kind":"pathway","id":"R-2","name":"Infectious disease","parents":["R-1"]}
{"kind":"gene","symbol":"PKQQ","pathways":["R-2"]}
"#;

    #[test]
    fn two_row_toy() {
        let o = Ontology::from_jsonl_str(TOY).unwrap();
        assert_eq!(o.pathway_count(), 2);
        assert_eq!(o.gene_count(), 1);
        assert!(o.is_member("PKQQ", "R-1").unwrap());
    }

    #[test]
    fn export_roundtrip() {
        let o = Ontology::from_jsonl_str(TOY).unwrap();
        let again = Ontology::from_jsonl_str(&o.to_jsonl()).unwrap();
        assert_eq!(o, again);
        assert_eq!(o.to_jsonl(), again.to_jsonl());
        assert!(o.to_jsonl().starts_with(r#"{"kind":"pathway","id":"R-1""#));
    }

    #[test]
    fn malformed_line_is_numbered() {
        let src = format!("{TOY}{{\"kind\":\"gene\",\"symbol\":\n");
        match Ontology::from_jsonl_str(&src) {
            Err(OntologyError::Malformed { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dangling_membership_is_numbered() {
        let src = format!("{TOY}{{\"kind\":\"gene\",\"symbol\":\"X\",\"pathways\":[\"R-9\"]}}\n");
        match Ontology::from_jsonl_str(&src) {
            Err(OntologyError::Dangling { line, to, .. }) => {
                assert_eq!(line, Some(4));
                assert_eq!(to, "R-9");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn duplicate_memberships_are_merged() {
        let src = format!("{TOY}{{\"kind\":\"gene\",\"symbol\":\"PKQQ\",\"pathways\":[\"R-2\",\"R-1\"]}}\n");
        let (o, report) = Ontology::ingest_jsonl(&src, &IngestOptions::default()).unwrap();
        assert_eq!(o.gene("PKQQ").unwrap().pathways, vec!["R-1", "R-2"]);
        assert_eq!(report.duplicate_rows, 1);
    }

    #[test]
    fn tsv_pair_with_root_filter() {
        let relations = "R-1\tR-2\nR-1\tR-3\nR-9\tR-8\nR-1\tR-2\n";
        let membership = "PKQQ\tR-2\tInfectious disease\nAXZY\tR-3\tDisorders of transmembrane transporters\n\
                          OUT1\tR-8\tOther\nPKQQ\tR-2\tInfectious disease\n";
        let names = "R-1\tDisease\tHomo sapiens\nR-9\tSignal Transduction\tHomo sapiens\n";
        let opts = IngestOptions {
            root: Some("Disease".into()),
            version: Some("toy".into()),
        };
        let (o, report) = Ontology::ingest_reactome(relations, membership, Some(names), &opts).unwrap();
        assert_eq!(report.unfiltered.pathways, 5);
        assert_eq!(report.unfiltered.genes, 3);
        assert_eq!(report.duplicate_rows, 2);
        let filtered = report.filtered.unwrap();
        assert_eq!((filtered.pathways, filtered.genes, filtered.memberships), (3, 2, 2));
        assert_eq!(o.pathway("R-1").unwrap().name, "Disease");
        assert_eq!(o.pathway("R-3").unwrap().level, 1);
        assert!(o.gene("OUT1").is_none());
    }

    #[test]
    fn tsv_short_row_is_rejected() {
        match Ontology::ingest_reactome("A\tB\nC\n", "", None, &IngestOptions::default()) {
            Err(OntologyError::Malformed { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }
}
