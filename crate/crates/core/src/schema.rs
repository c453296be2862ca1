//! Structured-text documents for primitive libraries.
//!
//! Matrices are row-major nested arrays. The JSON Schema lives in
//! `docs/library.schema.json`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::linalg::{matrix_from_rows, matrix_to_rows};
use crate::primitives::{Primitive, PrimitiveLibrary, PrimitiveMap, QuadraticLyapunov};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimitiveDocument {
    pub id: usize,
    pub fixed_point: Vec<f64>,
    /// `A`, state_dim × state_dim.
    pub linear: Vec<Vec<f64>>,
    /// One symmetric state_dim × state_dim matrix per output coordinate, or
    /// absent for a purely affine map.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub quadratic: Vec<Vec<Vec<f64>>>,
    /// `B`, state_dim × dist_dim.
    pub disturbance_gain: Vec<Vec<f64>>,
    /// `P` of `V(x) = (x − x*)ᵀ P (x − x*)`.
    pub lyapunov: Vec<Vec<f64>>,
    pub basin_level: f64,
    pub contraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LibraryDocument {
    #[serde(default)]
    pub name: String,
    pub primitives: Vec<PrimitiveDocument>,
}

impl PrimitiveDocument {
    pub fn to_primitive(&self) -> Result<Primitive> {
        let quadratic = self
            .quadratic
            .iter()
            .map(|q| matrix_from_rows(q))
            .collect::<Result<Vec<_>>>()?;
        let map = PrimitiveMap::new(
            self.fixed_point.clone(),
            matrix_from_rows(&self.linear)?,
            quadratic,
            matrix_from_rows(&self.disturbance_gain)?,
        )?;
        let lyapunov =
            QuadraticLyapunov::new(self.fixed_point.clone(), matrix_from_rows(&self.lyapunov)?)?;
        Primitive::new(self.id, map, lyapunov, self.basin_level, self.contraction)
    }

    pub fn from_primitive(p: &Primitive) -> Self {
        Self {
            id: p.id,
            fixed_point: p.fixed_point().to_vec(),
            linear: matrix_to_rows(p.map.linear()),
            quadratic: p.map.quadratic().iter().map(matrix_to_rows).collect(),
            disturbance_gain: matrix_to_rows(p.map.disturbance_gain()),
            lyapunov: matrix_to_rows(p.lyapunov.weight()),
            basin_level: p.basin_level,
            contraction: p.contraction,
        }
    }
}

impl LibraryDocument {
    pub fn to_library(&self) -> Result<PrimitiveLibrary> {
        let prims = self
            .primitives
            .iter()
            .map(PrimitiveDocument::to_primitive)
            .collect::<Result<Vec<_>>>()?;
        PrimitiveLibrary::new(prims)
    }

    pub fn from_library(name: &str, lib: &PrimitiveLibrary) -> Self {
        Self {
            name: name.to_string(),
            primitives: lib
                .primitives()
                .iter()
                .map(PrimitiveDocument::from_primitive)
                .collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("library documents always serialize")
    }
}

/// Content hash of a library: SHA-256 over the canonical JSON of its
/// primitives (the document name is not part of the content).
pub fn library_fingerprint(lib: &PrimitiveLibrary) -> String {
    let doc = LibraryDocument::from_library("", lib);
    let bytes = serde_json::to_vec(&doc.primitives).expect("library documents always serialize");
    hex::encode(Sha256::digest(&bytes))
}

pub fn load_library(path: &Path) -> Result<PrimitiveLibrary> {
    LibraryDocument::load(path)?.to_library()
}
