//! Embedding an angle set as a mesh: the central polygon is laid out from
//! its angles, the dihedrals are chained vertex by vertex from a chosen
//! first dihedral, and the wings are placed with the frame formulas of
//! [`crate::mesh::place_wings`].

use super::lemma::{linear_form, r_residual, VertexAngles};
use crate::geometry::Vector3;
use crate::mesh::{extract_angles, place_wings, AngleSet, KokotsakisMesh, MeshError};
use crate::sampling::find_root;
use nalgebra::{DMatrix, DVector};
use std::f64::consts::{PI, TAU};
use thiserror::Error;

/// Largest residual of the closing vertex relation accepted as closed.
pub const CLOSURE_TOL: f64 = 1e-9;
/// Largest face-angle error of the realized mesh.
pub const ROUND_TRIP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RealizeError {
    #[error("central angles sum to {sum}, expected {expected}")]
    CentralAngles { sum: f64, expected: f64 },
    #[error("central angles admit no convex polygon")]
    NoCentralPolygon,
    #[error("no real dihedral at vertex {vertex}: |cos| would be {ratio}")]
    NoRealRealization { vertex: usize, ratio: f64 },
    #[error("dihedral chain does not close: best residual {residual:e}")]
    NoClosure { residual: f64 },
    #[error("realized mesh reproduces the angles only to {0:e}")]
    RoundTrip(f64),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

fn wrap(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}

/// The two dihedrals at the `phi` side of vertex `v` given the dihedral at
/// its `beta` side, the one with the larger sine first.
pub fn next_dihedrals(v: &VertexAngles, omega_prev: f64) -> Result<[f64; 2], f64> {
    let (p, q, r) = linear_form(v, omega_prev);
    let rho = q.hypot(r);
    let ratio = if rho > 1e-14 { (v.gamma.cos() - p) / rho } else { f64::INFINITY };
    if !(ratio.abs() <= 1.0 + 1e-12) {
        return Err(ratio);
    }
    let psi = r.atan2(q);
    let delta = ratio.clamp(-1.0, 1.0).acos();
    let (a, b) = (wrap(psi + delta), wrap(psi - delta));
    Ok(if a.sin() >= b.sin() { [a, b] } else { [b, a] })
}

/// Dihedrals along one branch: bit `k - 1` of `branch` selects the second
/// candidate at vertex `k`. Returns the dihedrals and the residual of the
/// relation at vertex 0, which closes the chain.
pub fn chain(angles: &AngleSet, omega1: f64, branch: u32) -> Result<(Vec<f64>, f64), RealizeError> {
    let n = angles.n();
    let mut omega = vec![wrap(omega1)];
    for k in 1..n {
        let v = VertexAngles::from_array(angles.vertex(k));
        let c = next_dihedrals(&v, omega[k - 1]).map_err(|ratio| RealizeError::NoRealRealization { vertex: k, ratio })?;
        omega.push(c[(branch >> (k - 1) & 1) as usize]);
    }
    let res = r_residual(&VertexAngles::from_array(angles.vertex(0)), omega[n - 1], omega[0]);
    Ok((omega, res))
}

/// Branch masks ordered by preference: fewer non-preferred choices first.
fn branch_order(n: usize) -> Vec<u32> {
    let mut b: Vec<u32> = (0..1u32 << (n - 1)).collect();
    b.sort_by_key(|m| (m.count_ones(), *m));
    b
}

/// Dihedrals closing the chain from `omega1`, preferring nonnegative sines.
pub fn realization_dihedrals(angles: &AngleSet, omega1: f64) -> Result<Vec<f64>, RealizeError> {
    let mut best: Option<RealizeError> = None;
    for m in branch_order(angles.n()) {
        match chain(angles, omega1, m) {
            Ok((omega, res)) if res.abs() <= CLOSURE_TOL => return Ok(omega),
            Ok((_, res)) => {
                let better = match &best {
                    Some(RealizeError::NoClosure { residual }) => res.abs() < *residual,
                    _ => true,
                };
                if better {
                    best = Some(RealizeError::NoClosure { residual: res.abs() });
                }
            }
            Err(e) => {
                if best.is_none() {
                    best = Some(e);
                }
            }
        }
    }
    Err(best.expect("at least one branch"))
}

/// Edge lengths of a convex polygon with the given interior angles: as close
/// to 1 as the closing condition allows, or, failing positivity, unit
/// lengths on all but two edges.
fn central_lengths(dirs: &[f64]) -> Option<Vec<f64>> {
    let n = dirs.len();
    let a = DMatrix::from_fn(2, n, |r, c| if r == 0 { dirs[c].cos() } else { dirs[c].sin() });
    let ones = DVector::from_element(n, 1.0);
    let gram = &a * a.transpose();
    let fix = gram.try_inverse()? * (&a * &ones);
    let proj = &ones - a.transpose() * fix;
    let ok = |l: &[f64]| {
        let max = l.iter().cloned().fold(0.0, f64::max);
        l.iter().all(|&x| x > 0.05 * max)
    };
    if ok(proj.as_slice()) {
        return Some(proj.as_slice().to_vec());
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for i in 0..n {
        for j in i + 1..n {
            // unit lengths elsewhere; solve the 2x2 closing system for l_i, l_j
            let (mut sx, mut sy) = (0.0, 0.0);
            for k in (0..n).filter(|&k| k != i && k != j) {
                sx += dirs[k].cos();
                sy += dirs[k].sin();
            }
            let det = dirs[i].cos() * dirs[j].sin() - dirs[j].cos() * dirs[i].sin();
            if det.abs() < 1e-9 {
                continue;
            }
            let li = (-sx * dirs[j].sin() + sy * dirs[j].cos()) / det;
            let lj = (-dirs[i].cos() * sy + dirs[i].sin() * sx) / det;
            let mut l = vec![1.0; n];
            l[i] = li;
            l[j] = lj;
            let score = li.min(lj);
            if ok(&l) && best.as_ref().is_none_or(|(s, _)| score > *s) {
                best = Some((score, l));
            }
        }
    }
    best.map(|(_, l)| l)
}

/// Planar counter-clockwise polygon in `z = 0` with interior angles `alpha`.
pub fn central_polygon(alpha: &[f64]) -> Result<Vec<Vector3>, RealizeError> {
    let n = alpha.len();
    let sum: f64 = alpha.iter().sum();
    let expected = (n as f64 - 2.0) * PI;
    if (sum - expected).abs() > 1e-9 {
        return Err(RealizeError::CentralAngles { sum, expected });
    }
    let mut dirs = vec![0.0; n];
    for k in 1..n {
        dirs[k] = dirs[k - 1] + PI - alpha[k];
    }
    let len = central_lengths(&dirs).ok_or(RealizeError::NoCentralPolygon)?;
    let mut pts = vec![Vector3::zeros()];
    for k in 0..n - 1 {
        let p = pts[k] + Vector3::new(dirs[k].cos(), dirs[k].sin(), 0.0) * len[k];
        pts.push(p);
    }
    Ok(pts)
}

/// A mesh with the given face angles whose first dihedral is `omega1`,
/// with unit wing vectors. The dihedral branch with nonnegative sines is
/// preferred at every vertex.
pub fn realize_mesh(angles: &AngleSet, omega1: f64) -> Result<KokotsakisMesh, RealizeError> {
    let n = angles.n();
    let centre = central_polygon(&angles.alpha)?;
    let omega = realization_dihedrals(angles, omega1)?;
    let ones = vec![1.0; n];
    let mesh = place_wings(centre, &angles.beta, &angles.phi, &omega, &ones, &ones)?;
    let back = extract_angles(&mesh, 1e-9)?;
    let err = AngleSet { omega: None, ..back }.max_abs_diff(angles);
    if err > ROUND_TRIP_TOL {
        return Err(RealizeError::RoundTrip(err));
    }
    Ok(mesh)
}

/// Grid values of the first dihedral (cell centres of `samples` cells in
/// `(-pi, pi)`) from which the chain is real and closes.
pub fn realizable_first_dihedrals(angles: &AngleSet, samples: usize) -> Vec<f64> {
    (0..samples)
        .map(|k| -PI + TAU * (k as f64 + 0.5) / samples as f64)
        .filter(|&w| realization_dihedrals(angles, w).is_ok())
        .collect()
}

/// First dihedrals in `(-pi, pi)` at which some branch of the chain closes,
/// found by scanning `samples` intervals per branch. Rigid angle sets have
/// finitely many; flexible ones close everywhere and are not meant for this.
pub fn closing_first_dihedrals(angles: &AngleSet, samples: usize) -> Vec<f64> {
    let mut roots: Vec<f64> = Vec::new();
    for m in branch_order(angles.n()) {
        let f = |w: f64| chain(angles, w, m).ok().map(|(_, r)| r);
        // scan sub-windows so that several roots per branch are found
        let windows = 16;
        for k in 0..windows {
            let lo = -PI + TAU * k as f64 / windows as f64 + 1e-9;
            let hi = -PI + TAU * (k + 1) as f64 / windows as f64 - 1e-9;
            if let Some(r) = find_root(f, lo, hi, samples / windows + 2, 1e-10) {
                if roots.iter().all(|x| (x - r).abs() > 1e-6) {
                    roots.push(r);
                }
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::families::{draw_family, FamilyKind};
    use crate::infinitesimal::chi;
    use crate::sampling::rng;

    #[test]
    fn polygon_closes_with_requested_angles() {
        let alpha = [1.2, 1.9, 1.5, 2.0 * PI - 4.6];
        let p = central_polygon(&alpha).unwrap();
        let n = p.len();
        for i in 0..n {
            let a = p[(i + 1) % n] - p[i];
            let b = p[(i + n - 1) % n] - p[i];
            assert!((a.angle(&b) - alpha[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn voss_round_trip_and_chi() {
        let (_, h) = draw_family(FamilyKind::Voss, &mut rng(5)).unwrap();
        let a = h.to_angle_set();
        for w in [0.7, 1.9, -2.0] {
            let m = realize_mesh(&a, w).unwrap();
            assert!((chi(&m, 1e-12).unwrap().value - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn impossible_vertex_is_reported() {
        // gamma far larger than alpha + beta (+ phi) allows
        let a = AngleSet {
            alpha: vec![PI / 2.0; 4],
            beta: vec![0.2; 4],
            gamma: vec![2.8; 4],
            phi: vec![0.2; 4],
            omega: None,
        };
        assert!(matches!(realize_mesh(&a, 1.0), Err(RealizeError::NoRealRealization { .. })));
    }
}
