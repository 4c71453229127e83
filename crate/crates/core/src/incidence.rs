//! Planar trace geometry: the trace lines of the wing planes in the central
//! plane, their consecutive intersections `B_i`, the division ratios `t_i`,
//! the signed cyclic product of `(1 - t_i) / t_i`, and the two incidence
//! constructions that characterize the product being `+1` or `-1`.
//!
//! Everything runs in a chart of the central plane centred at the centroid
//! and scaled by the polygon diameter, so coordinates are of order one.

use crate::geometry::{
    affine_ratio, intersect_lines, GeometryError, Line2, PlaneFrame, ProjectivePoint2, Vector2,
};
use crate::infinitesimal::{chi, FlexError};
use crate::mesh::KokotsakisMesh;
use serde::Serialize;
use thiserror::Error;

/// Default coincidence / collinearity threshold relative to the diameter.
pub const INCIDENCE_TOL: f64 = 1e-7;

/// Relative weight below which a homogeneous point counts as infinite.
const INFINITY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IncidenceError {
    #[error("central face is not planar (relative defect {0:e})")]
    NonPlanarCentralFace(f64),
    #[error("wing plane at vertex {0} is parallel to the central plane")]
    WingPlaneParallelToBase(usize),
    #[error("trace lines {0} and {1} coincide")]
    CoincidentTraces(usize, usize),
    #[error("two adjacent corner points lie at infinity (vertices {0} and {1})")]
    UnsupportedInfinityPattern(usize, usize),
    #[error("construction degenerates at step {0}")]
    ConstructionDegenerate(String),
    #[error("ratio at vertex {vertex}: {source}")]
    Ratio { vertex: usize, source: GeometryError },
    #[error(transparent)]
    Flex(#[from] FlexError),
}

/// Division ratio of `A_i` on the segment `B_{i-1} B_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Ratio {
    Finite(f64),
    /// One of the endpoints is at infinity.
    Infinite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceConfiguration {
    /// Chart of the central plane (absent for synthetic planar inputs).
    pub frame: Option<PlaneFrame>,
    /// Chart length unit: the central polygon diameter.
    pub unit: f64,
    /// Chart centre in unscaled chart coordinates.
    pub centre: Vector2,
    /// Central vertices in scaled chart coordinates.
    pub a: Vec<Vector2>,
    pub lines: Vec<Line2>,
    /// `b[i] = lines[i] ^ lines[i+1]`
    pub b: Vec<ProjectivePoint2>,
    pub b_infinite: Vec<bool>,
    /// `t[i]` with `a[i] = t b[i-1] + (1 - t) b[i]`.
    pub t: Vec<Ratio>,
}

fn diameter(pts: &[Vector2]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            d = d.max((p - q).norm());
        }
    }
    d
}

impl TraceConfiguration {
    /// Builds the configuration from planar points `a[i]` and lines through
    /// them, in any affine chart.
    pub fn from_planar(a: &[Vector2], lines: &[Line2]) -> Result<Self, IncidenceError> {
        let n = a.len();
        let centre = a.iter().sum::<Vector2>() / n as f64;
        let unit = diameter(a).max(f64::MIN_POSITIVE);
        let scaled: Vec<Vector2> = a.iter().map(|p| (p - centre) / unit).collect();
        // l0 x + l1 y + l2 = 0 in old coordinates becomes, with x = c + u X,
        // l0 u X + l1 u Y + (l0 cx + l1 cy + l2) = 0
        let lines: Vec<Line2> = lines
            .iter()
            .map(|l| Line2::new(l.l[0] * unit, l.l[1] * unit, l.l[0] * centre.x + l.l[1] * centre.y + l.l[2]))
            .collect();
        Self::assemble(None, unit, centre, scaled, lines)
    }

    fn assemble(
        frame: Option<PlaneFrame>,
        unit: f64,
        centre: Vector2,
        a: Vec<Vector2>,
        lines: Vec<Line2>,
    ) -> Result<Self, IncidenceError> {
        let n = a.len();
        let mut b = Vec::with_capacity(n);
        for i in 0..n {
            let j = (i + 1) % n;
            let p = intersect_lines(&lines[i], &lines[j]).map_err(|_| IncidenceError::CoincidentTraces(i, j))?;
            b.push(p);
        }
        let b_infinite: Vec<bool> = b.iter().map(|p| p.is_infinite(INFINITY_TOL)).collect();
        let mut t = Vec::with_capacity(n);
        for i in 0..n {
            let ip = (i + n - 1) % n;
            if b_infinite[ip] || b_infinite[i] {
                t.push(Ratio::Infinite);
                continue;
            }
            let ai = ProjectivePoint2::from_affine(&a[i]);
            // A_i lies on l_i, and both endpoints do as well; the collinearity
            // test only guards against inconsistent synthetic input.
            let ti = affine_ratio(&ai, &b[ip], &b[i], 1e-6)
                .map_err(|source| IncidenceError::Ratio { vertex: i, source })?;
            t.push(Ratio::Finite(ti));
        }
        Ok(Self { frame, unit, centre, a, lines, b, b_infinite, t })
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    /// Unscaled chart coordinates of a scaled point.
    pub fn to_chart(&self, p: &Vector2) -> Vector2 {
        self.centre + p * self.unit
    }
}

/// Traces of the wing planes `span(v_i, w_i) + A_i` in the central plane.
pub fn build_trace_configuration(mesh: &KokotsakisMesh, tol: f64) -> Result<TraceConfiguration, IncidenceError> {
    let frame = PlaneFrame::best_fit(&mesh.centre)
        .ok_or_else(|| IncidenceError::ConstructionDegenerate("central plane".into()))?;
    let pts: Vec<Vector2> = mesh.centre.iter().map(|p| frame.project(p)).collect();
    let unit = diameter(&pts).max(f64::MIN_POSITIVE);
    let defect = mesh.centre.iter().map(|p| frame.height(p).abs()).fold(0.0, f64::max) / unit;
    if defect > tol {
        return Err(IncidenceError::NonPlanarCentralFace(defect));
    }
    let centre = pts.iter().sum::<Vector2>() / pts.len() as f64;
    let a: Vec<Vector2> = pts.iter().map(|p| (p - centre) / unit).collect();
    let d = mesh.derived_vectors();
    let mut lines = Vec::with_capacity(mesh.n());
    for i in 0..mesh.n() {
        let m = d.v[i].cross(&d.w[i]);
        let (m1, m2) = (m.dot(&frame.e1), m.dot(&frame.e2));
        if m1.hypot(m2) <= 1e-12 * m.norm() {
            return Err(IncidenceError::WingPlaneParallelToBase(i));
        }
        // the trace passes through A_i, which sits at a[i] in the chart
        lines.push(Line2::new(m1, m2, -(m1 * a[i].x + m2 * a[i].y)));
    }
    TraceConfiguration::assemble(Some(frame), unit, centre, a, lines)
}

/// Signed cyclic product of `(1 - t_i) / t_i`.
///
/// When `B_k` is at infinity the two factors that involve it are replaced by
/// their joint limit `(-1)^eps |A_k - B_{k-1}| / |B_{k+1} - A_{k+1}|`, where
/// `eps = 1` when `A_k - B_{k-1}` and `B_{k+1} - A_{k+1}` point the same way.
pub fn ceva_menelaus_product(config: &TraceConfiguration) -> Result<f64, IncidenceError> {
    let n = config.n();
    for k in 0..n {
        if config.b_infinite[k] && config.b_infinite[(k + 1) % n] {
            return Err(IncidenceError::UnsupportedInfinityPattern(k, (k + 1) % n));
        }
    }
    let mut product = 1.0;
    let mut i = 0;
    while i < n {
        if let Ratio::Finite(t) = config.t[i] {
            product *= (1.0 - t) / t;
            i += 1;
            continue;
        }
        // B_{i-1} or B_i is infinite; only the first such index handles a pair
        let ip = (i + n - 1) % n;
        if config.b_infinite[ip] {
            // pair (i-1, i) was or will be handled from index i-1
            i += 1;
            continue;
        }
        product *= infinity_replacement(config, i)?;
        i += 1;
    }
    Ok(product)
}

/// Joint limit of factors `k` and `k+1` when `B_k` is at infinity.
fn infinity_replacement(config: &TraceConfiguration, k: usize) -> Result<f64, IncidenceError> {
    let n = config.n();
    let (kp, kn) = ((k + n - 1) % n, (k + 1) % n);
    let before = config.b[kp]
        .to_affine()
        .ok_or_else(|| IncidenceError::UnsupportedInfinityPattern(kp, k))?;
    let after = config.b[kn]
        .to_affine()
        .ok_or_else(|| IncidenceError::UnsupportedInfinityPattern(k, kn))?;
    let first = config.a[k] - before;
    let second = after - config.a[kn];
    let same_way = first.dot(&second) > 0.0;
    let magnitude = first.norm() / second.norm();
    Ok(if same_way { -magnitude } else { magnitude })
}

/// A named point of a witness chain, in unscaled chart coordinates
/// (`None` for points at infinity).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessPoint {
    pub label: String,
    pub point: Option<[f64; 2]>,
    pub homogeneous: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesarguesCheck {
    /// Normalized determinant of the lines `B1B3`, `A2A3`, `A4A1`.
    pub concurrency_residual: f64,
    pub concurrent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub holds: bool,
    /// Distance (I) or collinearity residual (II) relative to the diameter.
    pub measure: f64,
    pub witness: Vec<WitnessPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub desargues: Option<DesarguesCheck>,
}

fn line_through(p: &ProjectivePoint2, q: &ProjectivePoint2, step: &str) -> Result<Line2, IncidenceError> {
    let l = Line2::through(p, q);
    let raw = [
        p.h[1] * q.h[2] - p.h[2] * q.h[1],
        p.h[2] * q.h[0] - p.h[0] * q.h[2],
        p.h[0] * q.h[1] - p.h[1] * q.h[0],
    ];
    if raw.iter().map(|x| x * x).sum::<f64>().sqrt() <= 1e-13 {
        return Err(IncidenceError::ConstructionDegenerate(step.into()));
    }
    Ok(l)
}

fn meet(l1: &Line2, l2: &Line2, step: &str) -> Result<ProjectivePoint2, IncidenceError> {
    intersect_lines(l1, l2).map_err(|_| IncidenceError::ConstructionDegenerate(step.into()))
}

fn witness(config: &TraceConfiguration, label: String, p: &ProjectivePoint2) -> WitnessPoint {
    let point = if p.is_infinite(INFINITY_TOL) {
        None
    } else {
        p.to_affine().map(|q| {
            let c = config.to_chart(&q);
            [c.x, c.y]
        })
    };
    WitnessPoint { label, point, homogeneous: p.h }
}

/// The chain `P_0 = A_1`, `O_i = [B_n A_{i+1}; B_{i+1} P_{i-1}]`,
/// `P_i = [B_{i+1} B_n; B_i O_i]` for `i = 1..=last` (1-based labels).
fn witness_chain(
    config: &TraceConfiguration,
    last: usize,
) -> Result<(Vec<ProjectivePoint2>, Vec<WitnessPoint>), IncidenceError> {
    let n = config.n();
    let a = |k: usize| ProjectivePoint2::from_affine(&config.a[k - 1]);
    let b = |k: usize| config.b[k - 1];
    let mut p = vec![a(1)];
    let mut labels = vec![witness(config, "P0".into(), &p[0])];
    for i in 1..=last {
        let l1 = line_through(&b(n), &a(i + 1), &format!("B{n}A{}", i + 1))?;
        let l2 = line_through(&b(i + 1), &p[i - 1], &format!("B{}P{}", i + 1, i - 1))?;
        let o = meet(&l1, &l2, &format!("O{i}"))?;
        let l3 = line_through(&b(i + 1), &b(n), &format!("B{}B{n}", i + 1))?;
        let l4 = line_through(&b(i), &o, &format!("B{i}O{i}"))?;
        let pi = meet(&l3, &l4, &format!("P{i}"))?;
        labels.push(witness(config, format!("O{i}"), &o));
        labels.push(witness(config, format!("P{i}"), &pi));
        p.push(pi);
    }
    Ok((p, labels))
}

fn unit_line(l: &Line2) -> [f64; 3] {
    let s = l.l.iter().map(|x| x * x).sum::<f64>().sqrt();
    l.l.map(|x| x / s)
}

fn det3(r: [[f64; 3]; 3]) -> f64 {
    r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
        + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0])
}

/// Whether `A_n` coincides with the end of the witness chain.
pub fn geometric_condition_i(config: &TraceConfiguration, tol: f64) -> Result<ConditionReport, IncidenceError> {
    let n = config.n();
    let (p, witness) = witness_chain(config, n - 2)?;
    let end = &p[n - 2];
    let measure = match end.to_affine() {
        Some(q) if !end.is_infinite(INFINITY_TOL) => (q - config.a[n - 1]).norm(),
        _ => f64::INFINITY,
    };
    let desargues = if n == 4 {
        let a = |k: usize| ProjectivePoint2::from_affine(&config.a[k - 1]);
        let l1 = line_through(&config.b[0], &config.b[2], "B1B3")?;
        let l2 = line_through(&a(2), &a(3), "A2A3")?;
        let l3 = line_through(&a(4), &a(1), "A4A1")?;
        let r = det3([unit_line(&l1), unit_line(&l2), unit_line(&l3)]).abs();
        Some(DesarguesCheck { concurrency_residual: r, concurrent: r <= tol })
    } else {
        None
    };
    Ok(ConditionReport { holds: measure <= tol, measure, witness, desargues })
}

/// Whether `P_{n-3}`, `A_{n-1}` and `A_n` are collinear.
pub fn geometric_condition_ii(config: &TraceConfiguration, tol: f64) -> Result<ConditionReport, IncidenceError> {
    let n = config.n();
    let (p, witness) = witness_chain(config, n - 3)?;
    let an1 = ProjectivePoint2::from_affine(&config.a[n - 2]);
    let an = config.a[n - 1];
    let line = line_through(&p[n - 3], &an1, "collinearity line")?;
    let l = line.l;
    let measure = (l[0] * an.x + l[1] * an.y + l[2]).abs() / l[0].hypot(l[1]);
    Ok(ConditionReport { holds: measure <= tol, measure, witness, desargues: None })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncidenceVerdict {
    /// `"I"` for even `n`, `"II"` for odd `n`.
    pub condition: &'static str,
    pub holds: bool,
    pub measure: f64,
    pub product: Option<f64>,
    pub chi_flexible: bool,
    pub chi_residual: f64,
    pub agree: bool,
}

/// Even `n` uses condition I, odd `n` condition II; the result is
/// cross-checked against `|chi - 1| <= chi_tol`.
pub fn flexibility_via_incidence(
    mesh: &KokotsakisMesh,
    tol: f64,
    chi_tol: f64,
) -> Result<IncidenceVerdict, IncidenceError> {
    let config = build_trace_configuration(mesh, 1e-9)?;
    let even = mesh.n() % 2 == 0;
    let report = if even { geometric_condition_i(&config, tol)? } else { geometric_condition_ii(&config, tol)? };
    let c = chi(mesh, crate::geometry::DEFAULT_TOL)?;
    let chi_residual = (c.value - 1.0).abs();
    let chi_flexible = chi_residual <= chi_tol;
    Ok(IncidenceVerdict {
        condition: if even { "I" } else { "II" },
        holds: report.holds,
        measure: report.measure,
        product: ceva_menelaus_product(&config).ok(),
        chi_flexible,
        chi_residual,
        agree: report.holds == chi_flexible,
    })
}

/// CSV rows `label,x,y` of a witness chain, preceded by the `A` and `B` points.
pub fn witness_csv(config: &TraceConfiguration, report: &ConditionReport) -> String {
    let mut out = String::from("label,x,y\n");
    let mut row = |label: String, p: Option<Vector2>| match p {
        Some(q) => out.push_str(&format!("{label},{},{}\n", q.x, q.y)),
        None => out.push_str(&format!("{label},inf,inf\n")),
    };
    for (k, a) in config.a.iter().enumerate() {
        row(format!("A{}", k + 1), Some(config.to_chart(a)));
    }
    for (k, b) in config.b.iter().enumerate() {
        let p = if config.b_infinite[k] { None } else { b.to_affine().map(|q| config.to_chart(&q)) };
        row(format!("B{}", k + 1), p);
    }
    for w in &report.witness {
        row(w.label.clone(), w.point.map(|p| Vector2::new(p[0], p[1])));
    }
    out
}
