//! JSON documents for meshes and angle sets, and OBJ / CSV exporters.

use crate::geometry::Vector3;
use crate::mesh::{AngleSet, KokotsakisMesh, MeshError};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

pub const MESH_SCHEMA: &str = "kokotsakis/1";
pub const ANGLES_SCHEMA: &str = "kokotsakis-angles/1";

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("schema mismatch: expected {expected:?}, found {found:?}")]
    SchemaVersionMismatch { expected: &'static str, found: String },
    #[error("field {field}: expected {expected} entries, found {found}")]
    Length { field: String, expected: usize, found: usize },
    #[error("invalid value in {field}: {message}")]
    Value { field: String, message: String },
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("serialization failed: {0}")]
    Serialize(String),
}

impl From<serde_json::Error> for DocumentError {
    fn from(e: serde_json::Error) -> Self {
        DocumentError::Parse { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

/// Free-form descriptive fields carried alongside a document.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(flatten)]
    pub extra: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshDocument {
    pub schema: String,
    pub n: usize,
    #[serde(rename = "A")]
    pub a: Vec<[f64; 3]>,
    #[serde(rename = "V")]
    pub v: Vec<[f64; 3]>,
    #[serde(rename = "W")]
    pub w: Vec<[f64; 3]>,
    #[serde(default)]
    pub meta: Meta,
}

fn to_points(field: &str, n: usize, raw: &[[f64; 3]]) -> Result<Vec<Vector3>, DocumentError> {
    if raw.len() != n {
        return Err(DocumentError::Length { field: field.into(), expected: n, found: raw.len() });
    }
    Ok(raw.iter().map(|p| Vector3::new(p[0], p[1], p[2])).collect())
}

impl MeshDocument {
    pub fn from_mesh(mesh: &KokotsakisMesh, meta: Meta) -> Self {
        let arr = |pts: &[Vector3]| pts.iter().map(|p| [p.x, p.y, p.z]).collect();
        Self {
            schema: MESH_SCHEMA.into(),
            n: mesh.n(),
            a: arr(&mesh.centre),
            v: arr(&mesh.v_wing),
            w: arr(&mesh.w_wing),
            meta,
        }
    }

    pub fn to_mesh(&self) -> Result<KokotsakisMesh, DocumentError> {
        if self.schema != MESH_SCHEMA {
            return Err(DocumentError::SchemaVersionMismatch { expected: MESH_SCHEMA, found: self.schema.clone() });
        }
        let a = to_points("A", self.n, &self.a)?;
        let v = to_points("V", self.n, &self.v)?;
        let w = to_points("W", self.n, &self.w)?;
        Ok(KokotsakisMesh::new(a, v, w)?)
    }
}

pub fn parse_mesh_document(bytes: &[u8]) -> Result<MeshDocument, DocumentError> {
    Ok(serde_json::from_slice(bytes)?)
}

pub fn load_mesh(bytes: &[u8]) -> Result<KokotsakisMesh, DocumentError> {
    parse_mesh_document(bytes)?.to_mesh()
}

pub fn save_mesh(mesh: &KokotsakisMesh, meta: Meta) -> Result<Vec<u8>, DocumentError> {
    if let Some(p) = mesh.vertices().find(|p| !p.iter().all(|c| c.is_finite())) {
        return Err(DocumentError::Serialize(format!("non-finite coordinate {p:?}")));
    }
    let mut out = serde_json::to_vec_pretty(&MeshDocument::from_mesh(mesh, meta))
        .map_err(|e| DocumentError::Serialize(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

/// Exact half-angle tangents `tan(x / 2)` as rational strings `"p/q"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfTangents {
    pub alpha: Vec<String>,
    pub beta: Vec<String>,
    pub gamma: Vec<String>,
    pub phi: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnglesDocument {
    pub schema: String,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub phi: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_tan: Option<HalfTangents>,
    #[serde(default)]
    pub meta: Meta,
}

impl AnglesDocument {
    pub fn new(angles: &AngleSet, half_tan: Option<HalfTangents>, meta: Meta) -> Self {
        Self {
            schema: ANGLES_SCHEMA.into(),
            alpha: angles.alpha.clone(),
            beta: angles.beta.clone(),
            gamma: angles.gamma.clone(),
            phi: angles.phi.clone(),
            omega: angles.omega.clone(),
            half_tan,
            meta,
        }
    }

    pub fn angle_set(&self) -> Result<AngleSet, DocumentError> {
        if self.schema != ANGLES_SCHEMA {
            return Err(DocumentError::SchemaVersionMismatch { expected: ANGLES_SCHEMA, found: self.schema.clone() });
        }
        let n = self.alpha.len();
        for (field, arr) in [("beta", &self.beta), ("gamma", &self.gamma), ("phi", &self.phi)] {
            if arr.len() != n {
                return Err(DocumentError::Length { field: field.into(), expected: n, found: arr.len() });
            }
        }
        if let Some(o) = &self.omega {
            if o.len() != n {
                return Err(DocumentError::Length { field: "omega".into(), expected: n, found: o.len() });
            }
        }
        for (field, arr) in [("alpha", &self.alpha), ("beta", &self.beta), ("gamma", &self.gamma), ("phi", &self.phi)] {
            if let Some(x) = arr.iter().find(|x| !(x.is_finite() && **x > 0.0 && **x < std::f64::consts::PI)) {
                return Err(DocumentError::Value { field: field.into(), message: format!("{x} is outside (0, pi)") });
            }
        }
        Ok(AngleSet {
            alpha: self.alpha.clone(),
            beta: self.beta.clone(),
            gamma: self.gamma.clone(),
            phi: self.phi.clone(),
            omega: self.omega.clone(),
        })
    }
}

pub fn load_angles(bytes: &[u8]) -> Result<AnglesDocument, DocumentError> {
    let doc: AnglesDocument = serde_json::from_slice(bytes)?;
    doc.angle_set()?;
    Ok(doc)
}

pub fn to_json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, DocumentError> {
    let mut out = serde_json::to_vec_pretty(value).map_err(|e| DocumentError::Serialize(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

/// Wavefront OBJ: vertices `A_1..A_n, V_1..V_n, W_1..W_n`; faces are the
/// central polygon, the edge quads `W_i A_i A_{i+1} V_{i+1}` and the corner
/// triangles `V_i A_i W_i`.
pub fn mesh_to_obj(mesh: &KokotsakisMesh, comment: &str) -> String {
    let n = mesh.n();
    let mut s = String::new();
    for line in comment.lines() {
        s.push_str(&format!("# {line}\n"));
    }
    for p in mesh.vertices() {
        s.push_str(&format!("v {} {} {}\n", p.x, p.y, p.z));
    }
    let a = |i: usize| i % n + 1;
    let v = |i: usize| n + i % n + 1;
    let w = |i: usize| 2 * n + i % n + 1;
    s.push('f');
    for i in 0..n {
        s.push_str(&format!(" {}", a(i)));
    }
    s.push('\n');
    for i in 0..n {
        s.push_str(&format!("f {} {} {} {}\n", w(i), a(i), a(i + 1), v(i + 1)));
    }
    for i in 0..n {
        s.push_str(&format!("f {} {} {}\n", v(i), a(i), w(i)));
    }
    s
}

/// File name of frame `k`, zero-padded for lexicographic order.
pub fn frame_name(k: usize) -> String {
    format!("frame_{k:06}.obj")
}
