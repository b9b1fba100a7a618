//! Pipeline artifacts: JSONL files whose first line is a provenance header
//! and whose remaining lines are records.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArtifactKind {
    Ontology,
    Corpus,
    Prompts,
    Responses,
    Scores,
}

impl fmt::Display for ArtifactKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant");
        f.write_str(s.as_str().expect("string"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactHeader {
    pub kind: ArtifactKind,
    pub schema_version: u32,
    /// SHA-256 of the canonical JSON of the settings that shaped the records.
    pub config_hash: String,
    /// SHA-256 of the input artifact file(s), in input order.
    pub upstream: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub meta: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct HeaderLine {
    artifact: ArtifactHeader,
}

impl ArtifactHeader {
    pub fn new<C: Serialize>(kind: ArtifactKind, config: &C, upstream: Vec<String>) -> ArtifactHeader {
        ArtifactHeader {
            kind,
            schema_version: SCHEMA_VERSION,
            config_hash: config_hash(config),
            upstream,
            meta: BTreeMap::new(),
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<String>) -> ArtifactHeader {
        self.meta.insert(key.to_string(), value.into());
        self
    }
}

#[derive(Debug, Error)]
pub enum ArtifactError {
    #[error("cannot access {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: missing artifact header on line 1")]
    MissingHeader { path: String },
    #[error("{path}: expected a {expected} artifact, found {found}")]
    WrongKind {
        path: String,
        expected: ArtifactKind,
        found: ArtifactKind,
    },
    #[error("{path}: schema version {found} is not supported (expected {expected})")]
    SchemaMismatch { path: String, expected: u32, found: u32 },
    #[error("{path}:{line}: {message}")]
    Malformed { path: String, line: usize, message: String },
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn config_hash<C: Serialize>(config: &C) -> String {
    // serde_json maps preserve key order only for structs; round-tripping
    // through Value sorts map keys so equal settings hash equally.
    let v = serde_json::to_value(config).expect("config serializes");
    sha256_hex(serde_json::to_string(&v).expect("value serializes").as_bytes())
}

/// Header line followed by one JSON line per record.
pub fn render<T: Serialize>(header: &ArtifactHeader, records: &[T]) -> String {
    let mut out = serde_json::to_string(&HeaderLine { artifact: header.clone() }).expect("header serializes");
    out.push('\n');
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("record serializes"));
        out.push('\n');
    }
    out
}

/// Writes the artifact and returns the SHA-256 of the bytes written.
pub fn write<T: Serialize>(path: &Path, header: &ArtifactHeader, records: &[T]) -> Result<String, ArtifactError> {
    write_raw(path, &render(header, records))
}

pub fn write_raw(path: &Path, text: &str) -> Result<String, ArtifactError> {
    let io = |source| ArtifactError::Io {
        path: path.display().to_string(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    std::fs::write(path, text).map_err(io)?;
    Ok(sha256_hex(text.as_bytes()))
}

pub fn read_file(path: &Path) -> Result<String, ArtifactError> {
    std::fs::read_to_string(path).map_err(|source| ArtifactError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// The header of `text`, if its first line is one, and the remaining body.
pub fn split_header(text: &str) -> Option<(ArtifactHeader, &str)> {
    let (first, body) = text.split_once('\n').unwrap_or((text, ""));
    let h: HeaderLine = serde_json::from_str(first).ok()?;
    Some((h.artifact, body))
}

pub struct Loaded<T> {
    pub header: ArtifactHeader,
    pub records: Vec<T>,
    pub sha256: String,
}

pub fn check_header(path: &Path, header: &ArtifactHeader, kind: ArtifactKind) -> Result<(), ArtifactError> {
    let path = path.display().to_string();
    if header.kind != kind {
        return Err(ArtifactError::WrongKind {
            path,
            expected: kind,
            found: header.kind,
        });
    }
    if header.schema_version != SCHEMA_VERSION {
        return Err(ArtifactError::SchemaMismatch {
            path,
            expected: SCHEMA_VERSION,
            found: header.schema_version,
        });
    }
    Ok(())
}

pub fn parse<T: DeserializeOwned>(path: &Path, text: &str, kind: ArtifactKind) -> Result<Loaded<T>, ArtifactError> {
    let (header, body) = split_header(text).ok_or_else(|| ArtifactError::MissingHeader {
        path: path.display().to_string(),
    })?;
    check_header(path, &header, kind)?;
    let mut records = Vec::new();
    for (i, line) in body.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let r = serde_json::from_str(line).map_err(|e| ArtifactError::Malformed {
            path: path.display().to_string(),
            line: i + 2,
            message: e.to_string(),
        })?;
        records.push(r);
    }
    Ok(Loaded {
        header,
        records,
        sha256: sha256_hex(text.as_bytes()),
    })
}

pub fn read<T: DeserializeOwned>(path: &Path, kind: ArtifactKind) -> Result<Loaded<T>, ArtifactError> {
    parse(path, &read_file(path)?, kind)
}
