//! First-order flexibility: the per-corner infinitesimal motion, the
//! invariant `chi`, and the infinitesimal flexibility verdict.

use crate::geometry::{triple_product, Vector3};
use crate::mesh::KokotsakisMesh;
use nalgebra::{SMatrix, SVD};
use serde::Serialize;
use thiserror::Error;

/// Relative cut-off below which a singular value counts as zero.
pub const NULLSPACE_RTOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum FlexError {
    #[error("corner {0} is degenerate: its triple product vanishes")]
    DegenerateCorner(usize),
}

/// `chi` together with its per-vertex factors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiValue {
    pub value: f64,
    /// `(a_{i-1}, v_i, w_i) / (a_i, v_i, w_i)` for each vertex.
    pub factors: Vec<f64>,
}

/// Numerators `(a_{i-1}, v_i, w_i)` and denominators `(a_i, v_i, w_i)`.
pub fn corner_triples(mesh: &KokotsakisMesh) -> (Vec<f64>, Vec<f64>) {
    let d = mesh.derived_vectors();
    let n = mesh.n();
    let num = (0..n).map(|i| triple_product(d.a_prev(i), &d.v[i], &d.w[i])).collect();
    let den = (0..n).map(|i| triple_product(&d.a[i], &d.v[i], &d.w[i])).collect();
    (num, den)
}

/// Product of the corner ratios; a product of ratios keeps the dynamic range
/// small when faces have very different sizes.
pub fn chi(mesh: &KokotsakisMesh, tol: f64) -> Result<ChiValue, FlexError> {
    let (num, den) = corner_triples(mesh);
    let s3 = mesh.scale().powi(3);
    let mut factors = Vec::with_capacity(mesh.n());
    for (i, (p, q)) in num.iter().zip(&den).enumerate() {
        if q.abs() <= tol * s3 {
            return Err(FlexError::DegenerateCorner(i));
        }
        factors.push(p / q);
    }
    let value = factors.iter().product();
    Ok(ChiValue { value, factors })
}

/// Velocities of `v` and `w` in the one-parameter family of first-order
/// motions of a corner with fixed edges `b` (under `v`) and `c` (under `w`).
pub fn closed_form_motion(
    b: &Vector3,
    c: &Vector3,
    v: &Vector3,
    w: &Vector3,
    lambda: f64,
    tol: f64,
) -> Result<(Vector3, Vector3), FlexError> {
    let dv = triple_product(b, v, w);
    let dw = triple_product(c, v, w);
    let vw = v.norm() * w.norm();
    if dv.abs() <= tol * b.norm() * vw || dw.abs() <= tol * c.norm() * vw {
        return Err(FlexError::DegenerateCorner(0));
    }
    Ok((b.cross(v) * (lambda / dv), c.cross(w) * (lambda / dw)))
}

/// Solution space of the corner's linear constraint system.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NullspaceReport {
    pub dimension: usize,
    /// Orthonormal basis vectors in the unknowns `(v_dot, w_dot)`.
    pub basis: Vec<[f64; 6]>,
    /// Singular values, largest first (six values; the system is padded
    /// with one zero row to a square matrix).
    pub singular_values: Vec<f64>,
}

/// The 5x6 coefficient matrix over `(v_dot, w_dot)`.
pub fn corner_system(b: &Vector3, c: &Vector3, v: &Vector3, w: &Vector3) -> SMatrix<f64, 5, 6> {
    let z = Vector3::zeros();
    let rows = [(v, &z), (&z, w), (w, v), (b, &z), (&z, c)];
    let mut m = SMatrix::<f64, 5, 6>::zeros();
    for (r, (p, q)) in rows.iter().enumerate() {
        for k in 0..3 {
            m[(r, k)] = p[k];
            m[(r, k + 3)] = q[k];
        }
    }
    m
}

pub fn motion_nullspace(b: &Vector3, c: &Vector3, v: &Vector3, w: &Vector3) -> NullspaceReport {
    let m5 = corner_system(b, c, v, w);
    let mut m = SMatrix::<f64, 6, 6>::zeros();
    m.fixed_view_mut::<5, 6>(0, 0).copy_from(&m5);
    let svd = SVD::new(m, false, true);
    let vt = svd.v_t.expect("requested right singular vectors");
    let sigma = svd.singular_values;
    let smax = sigma.max();
    let mut order: Vec<usize> = (0..6).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]));
    let basis: Vec<[f64; 6]> = order
        .iter()
        .filter(|&&k| sigma[k] <= NULLSPACE_RTOL * smax || smax == 0.0)
        .map(|&k| std::array::from_fn(|j| vt[(k, j)]))
        .collect();
    NullspaceReport {
        dimension: basis.len(),
        basis,
        singular_values: order.iter().map(|&k| sigma[k]).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlexVerdict {
    pub flexible: bool,
    pub chi: f64,
    /// `|chi - 1|`
    pub residual: f64,
}

pub fn is_infinitesimally_flexible(mesh: &KokotsakisMesh, tol: f64) -> Result<FlexVerdict, FlexError> {
    let c = chi(mesh, crate::geometry::DEFAULT_TOL)?;
    let residual = (c.value - 1.0).abs();
    Ok(FlexVerdict { flexible: residual <= tol, chi: c.value, residual })
}

/// `(chi - 1)` times the product of the denominators, i.e. the difference of
/// the numerator and denominator products.
pub fn f1_numerator(mesh: &KokotsakisMesh) -> f64 {
    let (num, den) = corner_triples(mesh);
    num.iter().product::<f64>() - den.iter().product::<f64>()
}
