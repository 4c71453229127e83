//! The flexion vector field, its integral curves, and derivative tests of
//! `chi` along them.
//!
//! With prefix products `P_i = prod_{j <= i} (a_{j-1}, v_j, w_j) / (a_j, v_j, w_j)`
//! (and `P_{-1} = 1`) the field is `v_i' = P_{i-1} [a_{i-1}, v_i]`,
//! `w_i' = P_i [a_i, w_i]`. It preserves every face angle at the central
//! vertices; the last edge face keeps its shape only while `chi = 1`.

use crate::geometry::{triple_product, Vector3};
use crate::infinitesimal::{chi, FlexError};
use crate::mesh::KokotsakisMesh;
use crate::ode::{integrate, StepControl};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

/// Relative size below which a corner triple product counts as collapsed.
pub const COLLAPSE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error(transparent)]
    Flex(#[from] FlexError),
    #[error("integration failed at t = {time}: {reason}")]
    StepFailure { time: f64, reason: String },
    #[error("invalid argument: {0}")]
    Argument(String),
}

/// Prefix products `P_0 .. P_{n-1}`; the last entry is `chi`.
pub fn prefix_products(mesh: &KokotsakisMesh) -> Result<Vec<f64>, FlexError> {
    let c = chi(mesh, COLLAPSE_TOL)?;
    let mut acc = 1.0;
    Ok(c.factors.iter().map(|f| {
        acc *= f;
        acc
    }).collect())
}

fn p_before(prefix: &[f64], i: usize) -> f64 {
    if i == 0 {
        1.0
    } else {
        prefix[i - 1]
    }
}

/// Velocities of the wing vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Tangent {
    pub v_dot: Vec<Vector3>,
    pub w_dot: Vec<Vector3>,
}

pub fn xi_field(mesh: &KokotsakisMesh) -> Result<Tangent, FlexError> {
    let prefix = prefix_products(mesh)?;
    let d = mesh.derived_vectors();
    let n = mesh.n();
    let v_dot = (0..n).map(|i| d.a_prev(i).cross(&d.v[i]) * p_before(&prefix, i)).collect();
    let w_dot = (0..n).map(|i| d.a[i].cross(&d.w[i]) * prefix[i]).collect();
    Ok(Tangent { v_dot, w_dot })
}

/// A mesh on a trajectory, with its prefix products.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub mesh: KokotsakisMesh,
    pub time: f64,
    pub prefix: Vec<f64>,
}

impl FlowState {
    pub fn new(mesh: KokotsakisMesh, time: f64) -> Result<Self, FlexError> {
        let prefix = prefix_products(&mesh)?;
        Ok(Self { mesh, time, prefix })
    }

    pub fn chi(&self) -> f64 {
        *self.prefix.last().expect("non-empty mesh")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<FlowState>,
    /// Set when the integration stopped before the requested duration.
    pub truncated: Option<(f64, String)>,
    pub steps: usize,
}

fn pack(mesh: &KokotsakisMesh) -> Vec<f64> {
    let d = mesh.derived_vectors();
    d.v.iter().chain(&d.w).flat_map(|p| [p.x, p.y, p.z]).collect()
}

fn unpack(centre: &[Vector3], y: &[f64]) -> KokotsakisMesh {
    let n = centre.len();
    let vec_at = |k: usize| Vector3::new(y[3 * k], y[3 * k + 1], y[3 * k + 2]);
    let v: Vec<Vector3> = (0..n).map(vec_at).collect();
    let w: Vec<Vector3> = (0..n).map(|k| vec_at(n + k)).collect();
    KokotsakisMesh::from_vectors(centre.to_vec(), &v, &w).expect("lengths match")
}

/// Integrates the flexion field from `mesh` and returns states at the
/// `frames + 1` equally spaced times `0, duration / frames, .., duration`
/// (negative durations integrate backwards).
///
/// After each accepted step the wing vectors are projected back onto the
/// invariants of the exact flow: their lengths and their angles with the
/// fixed central edges they hinge on.
pub fn integrate_flow(mesh: &KokotsakisMesh, duration: f64, frames: usize, tol: f64) -> Result<Trajectory, FlowError> {
    if !(tol > 0.0) || !duration.is_finite() {
        return Err(FlowError::Argument("tolerance must be positive and duration finite".into()));
    }
    let frames = frames.max(1);
    let times: Vec<f64> = (0..=frames).map(|k| duration * k as f64 / frames as f64).collect();
    integrate_to(mesh, &times, tol)
}

/// Like [`integrate_flow`] with arbitrary monotone output times starting at 0.
pub fn integrate_to(mesh: &KokotsakisMesh, times: &[f64], tol: f64) -> Result<Trajectory, FlowError> {
    let first = FlowState::new(mesh.clone(), 0.0)?;
    let n = mesh.n();
    let centre = mesh.centre.clone();
    let d0 = mesh.derived_vectors();
    let scale = mesh.scale();
    // invariants: (unit hinge edge, component along it, perpendicular length)
    let hinge = |e: &Vector3, u: &Vector3| {
        let e = e.normalize();
        let along = u.dot(&e);
        (e, along, (u - e * along).norm())
    };
    let inv_v: Vec<_> = (0..n).map(|i| hinge(d0.a_prev(i), &d0.v[i])).collect();
    let inv_w: Vec<_> = (0..n).map(|i| hinge(&d0.a[i], &d0.w[i])).collect();
    let field = |y: &[f64]| -> Result<Vec<f64>, String> {
        let m = unpack(&centre, y);
        let prefix = prefix_products(&m).map_err(|e| e.to_string())?;
        let d = m.derived_vectors();
        let mut out = Vec::with_capacity(6 * n);
        for i in 0..n {
            let p = d.a_prev(i).cross(&d.v[i]) * p_before(&prefix, i);
            out.extend([p.x, p.y, p.z]);
        }
        for i in 0..n {
            let p = d.a[i].cross(&d.w[i]) * prefix[i];
            out.extend([p.x, p.y, p.z]);
        }
        Ok(out)
    };
    let project = |y: &mut Vec<f64>| {
        for (k, (e, along, perp)) in inv_v.iter().chain(&inv_w).enumerate() {
            let u = Vector3::new(y[3 * k], y[3 * k + 1], y[3 * k + 2]);
            let q = u - e * u.dot(e);
            if let Some(q) = q.try_normalize(1e-300) {
                let r = e * *along + q * *perp;
                y[3 * k..3 * k + 3].copy_from_slice(&[r.x, r.y, r.z]);
            }
        }
    };
    let ctl = StepControl { tol, min_step: 1e-14 * (1.0 + scale), max_steps: 2_000_000 };
    let sol = integrate(&pack(mesh), times, ctl, field, project);
    let mut states = Vec::with_capacity(sol.states.len());
    for (t, y) in sol.times.iter().zip(&sol.states) {
        if *t == 0.0 {
            states.push(FlowState { time: 0.0, ..first.clone() });
            continue;
        }
        let m = unpack(&mesh.centre, y);
        match FlowState::new(m, *t) {
            Ok(s) => states.push(s),
            Err(e) => {
                return Ok(Trajectory { states, truncated: Some((*t, e.to_string())), steps: sol.steps });
            }
        }
    }
    if states.is_empty() {
        let reason = sol.stopped.as_ref().map(|s| s.reason.clone()).unwrap_or_default();
        return Err(FlowError::StepFailure { time: 0.0, reason });
    }
    Ok(Trajectory { states, truncated: sol.stopped.map(|s| (s.time, s.reason)), steps: sol.steps })
}

/// The five primed quantities at vertex `i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ingredients {
    /// `<a_i, v_i>'`
    pub a_dot_v: f64,
    /// `<a_{i-1}, w_i>'`
    pub aprev_dot_w: f64,
    /// `(a_{i-1}, a_i, v_i)'`
    pub triple_v: f64,
    /// `(a_{i-1}, a_i, w_i)'`
    pub triple_w: f64,
    /// `(a_{i-1}, v_i, w_i)'`
    pub corner_prev: f64,
    /// `(a_i, v_i, w_i)'`
    pub corner_cur: f64,
}

/// `(a_k, v_i, w_i)'` for an arbitrary fixed edge vector `a_k`.
pub fn corner_triple_derivative(mesh: &KokotsakisMesh, prefix: &[f64], i: usize, ak: &Vector3) -> f64 {
    let d = mesh.derived_vectors();
    let (ap, a, v, w) = (d.a_prev(i), &d.a[i], &d.v[i], &d.w[i]);
    (ak.dot(v) * ap.dot(w) - ap.dot(ak) * v.dot(w)) * p_before(prefix, i)
        + (a.dot(ak) * v.dot(w) - a.dot(v) * ak.dot(w)) * prefix[i]
}

pub fn derivative_ingredients(state: &FlowState, i: usize) -> Ingredients {
    let d = state.mesh.derived_vectors();
    let (ap, a, v, w) = (*d.a_prev(i), d.a[i], d.v[i], d.w[i]);
    let before = p_before(&state.prefix, i);
    let upto = state.prefix[i];
    Ingredients {
        a_dot_v: -triple_product(&ap, &a, &v) * before,
        aprev_dot_w: triple_product(&ap, &a, &w) * upto,
        triple_v: (ap.dot(&ap) * a.dot(&v) - ap.dot(&a) * ap.dot(&v)) * before,
        triple_w: (ap.dot(&a) * a.dot(&w) - a.dot(&a) * ap.dot(&w)) * upto,
        corner_prev: corner_triple_derivative(&state.mesh, &state.prefix, i, &ap),
        corner_cur: corner_triple_derivative(&state.mesh, &state.prefix, i, &a),
    }
}

/// `chi'` evaluated two ways.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiPrime {
    /// Four separate sums over the vertices, combined with the sign pattern
    /// `chi' = -chi (S1 + S2 - S3 - S4)`.
    pub four_sums: f64,
    /// Logarithmic product rule over the ingredient table.
    pub product_rule: f64,
}

impl ChiPrime {
    pub fn value(&self) -> f64 {
        self.product_rule
    }
}

pub fn chi_prime(state: &FlowState) -> ChiPrime {
    let mesh = &state.mesh;
    let n = mesh.n();
    let d = mesh.derived_vectors();
    let chi = state.chi();
    let (mut s1, mut s2, mut s3, mut s4) = (0.0, 0.0, 0.0, 0.0);
    let mut log_sum = 0.0;
    for i in 0..n {
        let (ap, a, v, w) = (d.a_prev(i), &d.a[i], &d.v[i], &d.w[i]);
        let den = triple_product(a, v, w);
        let num = triple_product(ap, v, w);
        let before = p_before(&state.prefix, i);
        let upto = state.prefix[i];
        s1 += (a.dot(v) * ap.dot(w) - ap.dot(a) * v.dot(w)) / den * before;
        s2 += (a.dot(a) * v.dot(w) - a.dot(v) * a.dot(w)) / den * upto;
        s3 += (ap.dot(v) * ap.dot(w) - ap.dot(ap) * v.dot(w)) / num * before;
        s4 += (ap.dot(a) * v.dot(w) - a.dot(v) * ap.dot(w)) / num * upto;
        let ing = derivative_ingredients(state, i);
        log_sum += ing.corner_prev / num - ing.corner_cur / den;
    }
    ChiPrime { four_sums: -chi * (s1 + s2 - s3 - s4), product_rule: chi * log_sum }
}

/// Outcome of one derivative order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderStatus {
    /// The value exceeds its error bar.
    Nonzero,
    /// The value lies within its error bar, and the bar is tight.
    ZeroWithinError,
    /// The error bar is too wide to decide.
    UnreliableOrder,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeEntry {
    pub order: usize,
    pub value: f64,
    pub error: f64,
    pub method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    pub status: OrderStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeReport {
    pub chi: f64,
    pub chi_minus_one: f64,
    pub entries: Vec<DerivativeEntry>,
    /// Time unit: inverse of the fastest hinge rotation rate.
    pub time_unit: f64,
}

impl DerivativeReport {
    /// True when every reported order is within its error bar of zero.
    pub fn all_vanish(&self) -> bool {
        self.entries.iter().all(|e| e.status == OrderStatus::ZeroWithinError)
    }
}

/// Error bars wider than this, in units of the time-normalized derivative,
/// are too coarse to call an order zero.
pub const UNRELIABLE_BAR: f64 = 1e-3;

/// Weights of the finite-difference approximation of the `order`-th
/// derivative at 0 from samples at the nodes `xs` (Fornberg's recursion).
pub fn fornberg_weights(order: usize, xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut c = vec![vec![0.0; order + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0];
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i];
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|row| row[order]).collect()
}

/// Samples `chi` at `t = j h` for `j = -m..=m`.
fn chi_samples(mesh: &KokotsakisMesh, h: f64, m: usize, tol: f64) -> Result<Vec<f64>, FlowError> {
    let fwd: Vec<f64> = (0..=m).map(|j| j as f64 * h).collect();
    let bwd: Vec<f64> = (0..=m).map(|j| -(j as f64) * h).collect();
    let (f, b) = rayon::join(|| integrate_to(mesh, &fwd, tol), || integrate_to(mesh, &bwd, tol));
    let (f, b) = (f?, b?);
    if f.states.len() != m + 1 || b.states.len() != m + 1 {
        let (time, reason) = f.truncated.or(b.truncated).unwrap_or((0.0, "short trajectory".into()));
        return Err(FlowError::StepFailure { time, reason });
    }
    let mut out: Vec<f64> = b.states.iter().rev().map(FlowState::chi).collect();
    out.extend(f.states.iter().skip(1).map(FlowState::chi));
    Ok(out)
}

/// Central-difference estimate of the `k`-th derivative with spacing `h`
/// (second order), from samples at `j h`, `j = -m..=m`, using the inner
/// `2p + 1` nodes with stride `stride`.
fn central(samples: &[f64], m: usize, h: f64, k: usize, p: usize, stride: usize) -> (f64, f64) {
    let xs: Vec<f64> = (0..=2 * p).map(|j| (j as f64 - p as f64) * h * stride as f64).collect();
    let w = fornberg_weights(k, &xs);
    let mut val = 0.0;
    let mut abs = 0.0;
    for (j, wj) in w.iter().enumerate() {
        let idx = (m as isize + (j as isize - p as isize) * stride as isize) as usize;
        val += wj * samples[idx];
        abs += wj.abs();
    }
    (val, abs)
}

/// `chi` and its time derivatives along the flow up to order `max_order`.
///
/// Order 1 comes from the closed form; orders `k >= 2` from central
/// differences on the integrated trajectory with Richardson extrapolation
/// over spacings `h` and `h / 2`, where `h` balances truncation against the
/// integration noise floor for each order separately.
pub fn chi_higher_derivatives(mesh: &KokotsakisMesh, max_order: usize, tol: f64) -> Result<DerivativeReport, FlowError> {
    let state = FlowState::new(mesh.clone(), 0.0)?;
    let chi0 = state.chi();
    let d = mesh.derived_vectors();
    let rate = (0..mesh.n())
        .map(|i| d.a[i].norm() * state.prefix[i].abs().max(p_before(&state.prefix, i).abs()))
        .fold(0.0, f64::max)
        .max(1e-12);
    let unit = 1.0 / rate;
    let mut entries = Vec::new();
    if max_order >= 1 {
        let cp = chi_prime(&state);
        let error = (cp.four_sums - cp.product_rule).abs().max(1e-13 * (1.0 + chi0.abs()) * rate);
        entries.push(classify(1, cp.value(), error, "closed_form", None, unit));
    }
    let noise = tol.max(1e-15);
    let higher: Vec<Result<DerivativeEntry, FlowError>> = (2..=max_order)
        .into_par_iter()
        .map(|k| {
            let p = (k + 1) / 2;
            let mut h = unit * noise.powf(1.0 / (k as f64 + 4.0)) * 2.0;
            let m = 2 * p;
            // shrink the stencil when it reaches a singular configuration
            let mut tries = 0;
            let samples = loop {
                match chi_samples(mesh, h / 2.0, m, noise) {
                    Ok(s) => break s,
                    Err(e) if tries >= 3 => return Err(e),
                    Err(_) => {
                        tries += 1;
                        h /= 4.0;
                    }
                }
            };
            let half = h / 2.0;
            let (coarse, wc) = central(&samples, m, half, k, p, 2);
            let (fine, wf) = central(&samples, m, half, k, p, 1);
            let value = fine + (fine - coarse) / 3.0;
            let round = noise * (1.0 + chi0.abs()) * (wc + wf);
            let error = (fine - coarse).abs() / 3.0 + round;
            Ok(classify(k, value, error, "finite_difference", Some(h), unit))
        })
        .collect();
    for e in higher {
        entries.push(e?);
    }
    Ok(DerivativeReport { chi: chi0, chi_minus_one: chi0 - 1.0, entries, time_unit: unit })
}

fn classify(order: usize, value: f64, error: f64, method: &'static str, step: Option<f64>, unit: f64) -> DerivativeEntry {
    // compare in time-normalized units so the cut-off is scale free
    let norm = unit.powi(order as i32);
    let status = if value.abs() > error {
        OrderStatus::Nonzero
    } else if error * norm <= UNRELIABLE_BAR {
        OrderStatus::ZeroWithinError
    } else {
        OrderStatus::UnreliableOrder
    };
    DerivativeEntry { order, value, error, method, step, status }
}

/// Shape descriptors that a flexion keeps fixed: at every central vertex the
/// angles `beta`, `gamma`, `phi`, and for every edge face its angles at the
/// two wing vertices, its wing-to-wing edge length and its planarity defect.
pub fn face_shape_signature(mesh: &KokotsakisMesh) -> Vec<f64> {
    use crate::geometry::angle_between;
    let n = mesh.n();
    let d = mesh.derived_vectors();
    let mut out = Vec::with_capacity(9 * n);
    for i in 0..n {
        out.push(angle_between(&-d.a_prev(i), &d.v[i]));
        out.push(angle_between(&d.v[i], &d.w[i]));
        out.push(angle_between(&d.w[i], &d.a[i]));
    }
    for i in 0..n {
        let j = (i + 1) % n;
        let (wi, ai, aj, vj) = (mesh.w_wing[i], mesh.centre[i], mesh.centre[j], mesh.v_wing[j]);
        out.push(angle_between(&(ai - wi), &(vj - wi)));
        out.push(angle_between(&(aj - vj), &(wi - vj)));
        out.push((vj - wi).norm());
        let nrm = (aj - ai).cross(&(wi - ai));
        out.push(nrm.try_normalize(0.0).map_or(0.0, |u| (vj - ai).dot(&u)));
    }
    out
}

/// CSV monitor: time, `chi`, `chi - 1`, `chi'` and the corner triple products.
pub fn monitor_csv(traj: &Trajectory) -> String {
    let n = traj.states.first().map_or(0, |s| s.mesh.n());
    let mut s = String::from("t,chi,chi_minus_one,chi_prime");
    for i in 1..=n {
        s.push_str(&format!(",num{i},den{i}"));
    }
    s.push('\n');
    for st in &traj.states {
        let cp = chi_prime(st).value();
        s.push_str(&format!("{},{},{},{}", st.time, st.chi(), st.chi() - 1.0, cp));
        let (num, den) = crate::infinitesimal::corner_triples(&st.mesh);
        for (p, q) in num.iter().zip(&den) {
            s.push_str(&format!(",{p},{q}"));
        }
        s.push('\n');
    }
    s
}
