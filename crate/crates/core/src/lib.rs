//! Syllogistic NLI corpus generation and LLM evaluation over a pathway/gene
//! ontology.
//!
//! Pipeline: [`ontology`] facts are bound into [`logic`] schemes by
//! [`instantiate`], perturbed by [`perturb`], rendered through [`templates`]
//! and [`prompts`], sent through [`adapter`], read back by [`parse`] and scored
//! by [`metrics`]. The `syllo` binary drives the stages; [`artifact`] holds the
//! shared JSONL framing.

pub mod adapter;
pub mod artifact;
pub mod cli;
pub mod instantiate;
pub mod logic;
pub mod metrics;
pub mod ontology;
pub mod parse;
pub mod perturb;
pub mod prompts;
pub mod templates;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt;

/// Gold or predicted truth value of an argument.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    True,
    False,
}

impl Label {
    pub fn from_bool(b: bool) -> Label {
        if b {
            Label::True
        } else {
            Label::False
        }
    }

    pub fn is_true(self) -> bool {
        self == Label::True
    }

    pub fn flipped(self) -> Label {
        Label::from_bool(!self.is_true())
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::True => "True",
            Label::False => "False",
        })
    }
}

/// Sub-seed for a named sub-task, stable across platforms and runs.
pub fn derive_seed(seed: u64, parts: &[&str]) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p.as_bytes());
    }
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_seeds_separate_parts() {
        assert_ne!(derive_seed(7, &["ab", "c"]), derive_seed(7, &["a", "bc"]));
        assert_eq!(derive_seed(7, &["x"]), derive_seed(7, &["x"]));
        assert_ne!(derive_seed(7, &["x"]), derive_seed(8, &["x"]));
    }
}
