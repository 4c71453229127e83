//! The Kokotsakis mesh model: a central n-gon `A` and the wing vertices `V`, `W`.
//!
//! Indices are 0-based in code; vertex `i` is the 1-based `A_{i+1}` of the usual notation.
//! Wing `V_i` sits on the face over edge `A_{i-1} A_i`, wing `W_i` on the
//! face over edge `A_i A_{i+1}`.

use crate::geometry::{angle_between, newell_normal, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("a mesh needs at least 3 central vertices, got {0}")]
    TooFewVertices(usize),
    #[error("array {field} has length {found}, expected {expected}")]
    LengthMismatch { field: &'static str, expected: usize, found: usize },
    #[error("non-finite coordinate in {field}[{index}]")]
    NonFinite { field: &'static str, index: usize },
    #[error("degenerate angle at vertex {vertex}: a spanning vector has vanishing length")]
    DegenerateAngle { vertex: usize },
}

/// Central polygon plus wing vertices, stored as positions.
#[derive(Debug, Clone, PartialEq)]
pub struct KokotsakisMesh {
    pub centre: Vec<Vector3>,
    pub v_wing: Vec<Vector3>,
    pub w_wing: Vec<Vector3>,
}

/// Edge and wing vectors derived from the positions.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedVectors {
    /// `a[i] = A[i+1] - A[i]`
    pub a: Vec<Vector3>,
    /// `v[i] = V[i] - A[i]`
    pub v: Vec<Vector3>,
    /// `w[i] = W[i] - A[i]`
    pub w: Vec<Vector3>,
}

impl DerivedVectors {
    pub fn n(&self) -> usize {
        self.a.len()
    }

    /// `a[i-1]` with the cyclic convention.
    pub fn a_prev(&self, i: usize) -> &Vector3 {
        let n = self.n();
        &self.a[(i + n - 1) % n]
    }
}

impl KokotsakisMesh {
    pub fn new(centre: Vec<Vector3>, v_wing: Vec<Vector3>, w_wing: Vec<Vector3>) -> Result<Self, MeshError> {
        let n = centre.len();
        if n < 3 {
            return Err(MeshError::TooFewVertices(n));
        }
        if v_wing.len() != n {
            return Err(MeshError::LengthMismatch { field: "V", expected: n, found: v_wing.len() });
        }
        if w_wing.len() != n {
            return Err(MeshError::LengthMismatch { field: "W", expected: n, found: w_wing.len() });
        }
        for (field, pts) in [("A", &centre), ("V", &v_wing), ("W", &w_wing)] {
            if let Some(index) = pts.iter().position(|p| !p.iter().all(|c| c.is_finite())) {
                return Err(MeshError::NonFinite { field, index });
            }
        }
        Ok(Self { centre, v_wing, w_wing })
    }

    pub fn n(&self) -> usize {
        self.centre.len()
    }

    pub fn prev(&self, i: usize) -> usize {
        (i + self.n() - 1) % self.n()
    }

    pub fn next(&self, i: usize) -> usize {
        (i + 1) % self.n()
    }

    pub fn derived_vectors(&self) -> DerivedVectors {
        let n = self.n();
        let a = (0..n).map(|i| self.centre[(i + 1) % n] - self.centre[i]).collect();
        let v = (0..n).map(|i| self.v_wing[i] - self.centre[i]).collect();
        let w = (0..n).map(|i| self.w_wing[i] - self.centre[i]).collect();
        DerivedVectors { a, v, w }
    }

    /// Rebuild positions from the central polygon and wing vectors.
    pub fn from_vectors(centre: Vec<Vector3>, v: &[Vector3], w: &[Vector3]) -> Result<Self, MeshError> {
        let v_wing = centre.iter().zip(v).map(|(p, d)| p + d).collect();
        let w_wing = centre.iter().zip(w).map(|(p, d)| p + d).collect();
        Self::new(centre, v_wing, w_wing)
    }

    pub fn vertices(&self) -> impl Iterator<Item = &Vector3> {
        self.centre.iter().chain(&self.v_wing).chain(&self.w_wing)
    }

    /// Largest distance of a vertex from the centroid; the geometric scale
    /// used by relative tolerances. Translation invariant.
    pub fn scale(&self) -> f64 {
        let count = (3 * self.n()) as f64;
        let c = self.vertices().fold(Vector3::zeros(), |s, p| s + p) / count;
        self.vertices().map(|p| (p - c).norm()).fold(0.0, f64::max)
    }

    /// Applies `f` to every vertex.
    pub fn map_points(&self, f: impl Fn(&Vector3) -> Vector3) -> Self {
        Self {
            centre: self.centre.iter().map(&f).collect(),
            v_wing: self.v_wing.iter().map(&f).collect(),
            w_wing: self.w_wing.iter().map(&f).collect(),
        }
    }

    /// The same mesh with the cyclic labelling shifted by `k`.
    pub fn shifted(&self, k: usize) -> Self {
        let n = self.n();
        let rot = |pts: &[Vector3]| (0..n).map(|i| pts[(i + k) % n]).collect();
        Self { centre: rot(&self.centre), v_wing: rot(&self.v_wing), w_wing: rot(&self.w_wing) }
    }

    /// Unit normal of the central polygon, oriented by its winding.
    pub fn central_normal(&self) -> Option<Vector3> {
        newell_normal(&self.centre).try_normalize(0.0)
    }
}

/// Which face a validation flag refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FaceRef {
    Central,
    /// The chain `A_{i-1} A_i V_i`.
    BetaChain(usize),
    /// The chain `V_i A_i W_i`.
    GammaChain(usize),
    /// The chain `W_i A_i A_{i+1}`.
    PhiChain(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValidationFlag {
    CoincidingVertices { face: FaceRef, at: usize },
    ConsecutiveCollinear { face: FaceRef, at: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub accepted: bool,
    pub flags: Vec<ValidationFlag>,
}

fn check_triple(
    p: &Vector3,
    q: &Vector3,
    r: &Vector3,
    tol: f64,
    scale: f64,
    face: FaceRef,
    at: usize,
    flags: &mut Vec<ValidationFlag>,
) {
    let u = p - q;
    let w = r - q;
    let lim = tol * scale;
    if u.norm() <= lim || w.norm() <= lim || (p - r).norm() <= lim {
        flags.push(ValidationFlag::CoincidingVertices { face, at });
    } else if u.cross(&w).norm() <= tol * u.norm() * w.norm() {
        flags.push(ValidationFlag::ConsecutiveCollinear { face, at });
    }
}

/// Flags coinciding face vertices and three consecutive collinear vertices.
pub fn validate_theta(mesh: &KokotsakisMesh, tol: f64) -> ValidationReport {
    let n = mesh.n();
    let scale = mesh.scale().max(f64::MIN_POSITIVE);
    let mut flags = Vec::new();
    let a = &mesh.centre;
    for i in 0..n {
        let (ip, inx) = (mesh.prev(i), mesh.next(i));
        check_triple(&a[ip], &a[i], &a[inx], tol, scale, FaceRef::Central, i, &mut flags);
        check_triple(&a[ip], &a[i], &mesh.v_wing[i], tol, scale, FaceRef::BetaChain(i), i, &mut flags);
        check_triple(&mesh.v_wing[i], &a[i], &mesh.w_wing[i], tol, scale, FaceRef::GammaChain(i), i, &mut flags);
        check_triple(&mesh.w_wing[i], &a[i], &a[inx], tol, scale, FaceRef::PhiChain(i), i, &mut flags);
    }
    ValidationReport { accepted: flags.is_empty(), flags }
}

/// Face angles at every central vertex and dihedral angles along central edges.
///
/// `omega[i]` is the signed angle of the wing face over edge `A_i A_{i+1}`
/// measured from the central face, in `(-pi, pi]`: the wing direction is
/// `cos(omega) (N x e) + sin(omega) N` with `e` the unit edge and `N` the
/// oriented normal of the central polygon. A flat mesh has `omega = pi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleSet {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub phi: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<Vec<f64>>,
}

impl AngleSet {
    pub fn n(&self) -> usize {
        self.alpha.len()
    }

    /// The four face angles at vertex `i` as `[alpha, beta, gamma, phi]`.
    pub fn vertex(&self, i: usize) -> [f64; 4] {
        [self.alpha[i], self.beta[i], self.gamma[i], self.phi[i]]
    }

    /// Largest absolute difference over the face angles (and dihedrals when
    /// both sets carry them, compared modulo 2 pi).
    pub fn max_abs_diff(&self, other: &AngleSet) -> f64 {
        let mut d: f64 = 0.0;
        for (x, y) in [
            (&self.alpha, &other.alpha),
            (&self.beta, &other.beta),
            (&self.gamma, &other.gamma),
            (&self.phi, &other.phi),
        ] {
            for (p, q) in x.iter().zip(y) {
                d = d.max((p - q).abs());
            }
        }
        if let (Some(x), Some(y)) = (&self.omega, &other.omega) {
            for (p, q) in x.iter().zip(y) {
                let r = (p - q).rem_euclid(std::f64::consts::TAU);
                d = d.max(r.min(std::f64::consts::TAU - r));
            }
        }
        d
    }
}

/// Signed dihedral of the wing vector `u` about unit edge `e`.
fn wing_dihedral(u: &Vector3, e: &Vector3, normal: &Vector3) -> f64 {
    let perp = u - e * u.dot(e);
    perp.dot(normal).atan2(perp.dot(&normal.cross(e)))
}

/// Face angles, and dihedrals when every edge face is planar within `tol`.
pub fn extract_angles(mesh: &KokotsakisMesh, tol: f64) -> Result<AngleSet, MeshError> {
    let n = mesh.n();
    let d = mesh.derived_vectors();
    let scale = mesh.scale().max(f64::MIN_POSITIVE);
    let mut set = AngleSet {
        alpha: vec![0.0; n],
        beta: vec![0.0; n],
        gamma: vec![0.0; n],
        phi: vec![0.0; n],
        omega: None,
    };
    for i in 0..n {
        let back = -d.a_prev(i);
        let fwd = d.a[i];
        if [back.norm(), fwd.norm(), d.v[i].norm(), d.w[i].norm()].iter().any(|&l| l <= tol * scale) {
            return Err(MeshError::DegenerateAngle { vertex: i });
        }
        set.alpha[i] = angle_between(&fwd, &back);
        set.beta[i] = angle_between(&back, &d.v[i]);
        set.gamma[i] = angle_between(&d.v[i], &d.w[i]);
        set.phi[i] = angle_between(&d.w[i], &fwd);
    }
    if let Some(normal) = mesh.central_normal() {
        let mut omega = Vec::with_capacity(n);
        let mut planar = true;
        for i in 0..n {
            let e = d.a[i].normalize();
            let from_w = wing_dihedral(&d.w[i], &e, &normal);
            let from_v = wing_dihedral(&d.v[mesh.next(i)], &e, &normal);
            let gap = (from_w - from_v).rem_euclid(std::f64::consts::TAU);
            if gap.min(std::f64::consts::TAU - gap) > tol.sqrt().max(1e-7) {
                planar = false;
            }
            omega.push(from_w);
        }
        if planar {
            set.omega = Some(omega);
        }
    }
    Ok(set)
}

/// Builds wings over a planar, counter-clockwise central polygon from face
/// angles `beta`, `phi`, dihedrals `omega` (see [`AngleSet`]) and wing lengths.
/// Every edge face of the result is planar by construction.
pub fn place_wings(
    centre: Vec<Vector3>,
    beta: &[f64],
    phi: &[f64],
    omega: &[f64],
    v_len: &[f64],
    w_len: &[f64],
) -> Result<KokotsakisMesh, MeshError> {
    let n = centre.len();
    if n < 3 {
        return Err(MeshError::TooFewVertices(n));
    }
    let normal = newell_normal(&centre).try_normalize(0.0).ok_or(MeshError::DegenerateAngle { vertex: 0 })?;
    let mut v = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    for i in 0..n {
        let ip = (i + n - 1) % n;
        let e_next = (centre[(i + 1) % n] - centre[i]).try_normalize(0.0).ok_or(MeshError::DegenerateAngle { vertex: i })?;
        let e_prev = (centre[ip] - centre[i]).try_normalize(0.0).ok_or(MeshError::DegenerateAngle { vertex: i })?;
        let (sb, cb) = beta[i].sin_cos();
        let (sp, cp) = phi[i].sin_cos();
        let (so, co) = omega[ip].sin_cos();
        let (si, ci) = omega[i].sin_cos();
        v.push((e_prev * cb + (e_prev.cross(&normal) * co + normal * so) * sb) * v_len[i]);
        w.push((e_next * cp + (normal.cross(&e_next) * ci + normal * si) * sp) * w_len[i]);
    }
    KokotsakisMesh::from_vectors(centre, &v, &w)
}

/// Largest distance of an edge-face vertex from the plane of the other three,
/// relative to the mesh scale. Zero for planar edge faces.
pub fn edge_face_planarity_defect(mesh: &KokotsakisMesh) -> f64 {
    let n = mesh.n();
    let scale = mesh.scale().max(f64::MIN_POSITIVE);
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let j = mesh.next(i);
        let (p, q) = (mesh.centre[i], mesh.centre[j]);
        let nrm = (q - p).cross(&(mesh.w_wing[i] - p));
        if let Some(nrm) = nrm.try_normalize(0.0) {
            worst = worst.max((mesh.v_wing[j] - p).dot(&nrm).abs() / scale);
        }
    }
    worst
}
