//! JSON algebra definition files.
//!
//! ```json
//! {"p":3,"names":["x","y","z"],"brackets":[{"i":0,"j":1,"c":[0,0,1]}],"pmap":[[0,0,0],[0,0,0],[0,0,0]]}
//! ```
//!
//! Omitted pairs have zero bracket. Coefficients may be any integers and are
//! reduced mod p by validation.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::liealg::{Algebra, AlgebraSpec};

#[derive(Debug, Error)]
pub enum FileError {
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("DuplicateBracket({i},{j}): the pair appears more than once")]
    DuplicateBracket { i: usize, j: usize },
    #[error("BracketOrder({i},{j}): bracket entries need i < j")]
    BracketOrder { i: usize, j: usize },
}

impl FileError {
    /// Syntax-level failures, as opposed to well-formed but invalid content.
    pub fn is_parse_error(&self) -> bool {
        matches!(self, FileError::Read { .. } | FileError::Parse(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub c: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub p: i64,
    pub names: Vec<String>,
    #[serde(default)]
    pub brackets: Vec<BracketEntry>,
    pub pmap: Vec<Vec<i64>>,
}

impl AlgebraFile {
    pub fn from_json(text: &str) -> Result<Self, FileError> {
        serde_json::from_str(text).map_err(|e| FileError::Parse(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self, FileError> {
        let text = std::fs::read_to_string(path).map_err(|e| FileError::Read {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json(&text)
    }

    pub fn to_spec(&self) -> Result<AlgebraSpec, FileError> {
        let mut brackets = BTreeMap::new();
        for b in &self.brackets {
            if b.i >= b.j {
                return Err(FileError::BracketOrder { i: b.i, j: b.j });
            }
            if brackets.insert((b.i, b.j), b.c.clone()).is_some() {
                return Err(FileError::DuplicateBracket { i: b.i, j: b.j });
            }
        }
        Ok(AlgebraSpec {
            p: self.p,
            names: self.names.clone(),
            brackets,
            pmap: self.pmap.clone(),
        })
    }

    /// File for a validated algebra: residues in `0..p`, zero brackets omitted.
    pub fn from_algebra(alg: &Algebra) -> Self {
        Self::from_spec(&alg.to_spec())
    }

    pub fn from_spec(spec: &AlgebraSpec) -> Self {
        Self {
            p: spec.p,
            names: spec.names.clone(),
            brackets: spec
                .brackets
                .iter()
                .filter(|(_, c)| c.iter().any(|&v| v != 0))
                .map(|(&(i, j), c)| BracketEntry { i, j, c: c.clone() })
                .collect(),
            pmap: spec.pmap.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("algebra files serialize")
    }
}
