//! Seeded random meshes and a bracketing root finder, used by tests,
//! benchmarks and the command line generator.

use crate::geometry::Vector3;
use crate::mesh::{place_wings, KokotsakisMesh};
use nalgebra::{Rotation3, Unit};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_rotation<R: Rng>(rng: &mut R) -> Rotation3<f64> {
    let axis = loop {
        let v = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if let Some(u) = Unit::try_new(v, 1e-3) {
            break u;
        }
    };
    Rotation3::from_axis_angle(&axis, rng.random_range(-PI..PI))
}

/// Counter-clockwise convex polygon in the plane `z = 0`, vertices on an
/// ellipse at well separated angles.
pub fn random_convex_polygon<R: Rng>(rng: &mut R, n: usize) -> Vec<Vector3> {
    let gap = TAU / n as f64;
    let start = rng.random_range(0.0..TAU);
    let (rx, ry) = (rng.random_range(0.8..1.2), rng.random_range(0.8..1.2));
    (0..n)
        .map(|k| {
            let t = start + gap * (k as f64 + rng.random_range(-0.3..0.3));
            Vector3::new(rx * t.cos(), ry * t.sin(), 0.0)
        })
        .collect()
}

fn place<R: Rng>(rng: &mut R, mesh: KokotsakisMesh) -> KokotsakisMesh {
    let rot = random_rotation(rng);
    let shift = Vector3::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
    mesh.map_points(|p| rot * p + shift)
}

/// Random mesh with planar edge faces in a random position.
pub fn random_planar_face_mesh<R: Rng>(rng: &mut R, n: usize) -> KokotsakisMesh {
    loop {
        let centre = random_convex_polygon(rng, n);
        let mut angle = || rng.random_range(0.35..PI - 0.35);
        let beta: Vec<f64> = (0..n).map(|_| angle()).collect();
        let phi: Vec<f64> = (0..n).map(|_| angle()).collect();
        let omega: Vec<f64> = (0..n)
            .map(|_| {
                let s = if rng.random_bool(0.85) { 1.0 } else { -1.0 };
                s * rng.random_range(0.35..PI - 0.35)
            })
            .collect();
        let v_len: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..1.5)).collect();
        let w_len: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..1.5)).collect();
        let Ok(mesh) = place_wings(centre, &beta, &phi, &omega, &v_len, &w_len) else { continue };
        if well_conditioned(&mesh) {
            return place(rng, mesh);
        }
    }
}

/// Random mesh whose edge faces are in general not planar.
pub fn random_mesh<R: Rng>(rng: &mut R, n: usize) -> KokotsakisMesh {
    loop {
        let centre = random_convex_polygon(rng, n);
        let mut wing = || {
            Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(0.2..1.2))
        };
        let v: Vec<Vector3> = (0..n).map(|_| wing()).collect();
        let w: Vec<Vector3> = (0..n).map(|_| wing()).collect();
        let Ok(mesh) = KokotsakisMesh::from_vectors(centre, &v, &w) else { continue };
        if well_conditioned(&mesh) {
            return place(rng, mesh);
        }
    }
}

/// Rejects meshes close to the degenerate locus: every corner triple product
/// and every wing angle must stay clear of zero.
pub fn well_conditioned(mesh: &KokotsakisMesh) -> bool {
    let d = mesh.derived_vectors();
    (0..mesh.n()).all(|i| {
        let (a0, a1, v, w) = (d.a_prev(i), &d.a[i], &d.v[i], &d.w[i]);
        let unit = |x: &Vector3, y: &Vector3, z: &Vector3| {
            crate::geometry::triple_product(x, y, z).abs() / (x.norm() * y.norm() * z.norm())
        };
        unit(a0, v, w) > 0.05 && unit(a1, v, w) > 0.05 && v.cross(w).norm() > 0.1 * v.norm() * w.norm()
    })
}

/// Root of `f` on `[lo, hi]` found by scanning `samples` sub-intervals for a
/// sign change and bisecting. Sign changes across poles are rejected by
/// requiring `|f| <= accept` at the converged point.
pub fn find_root(f: impl Fn(f64) -> Option<f64>, lo: f64, hi: f64, samples: usize, accept: f64) -> Option<f64> {
    let xs: Vec<f64> = (0..=samples).map(|k| lo + (hi - lo) * k as f64 / samples as f64).collect();
    let vals: Vec<Option<f64>> = xs.iter().map(|&x| f(x)).collect();
    for k in 0..samples {
        let (Some(fa), Some(fb)) = (vals[k], vals[k + 1]) else { continue };
        if fa == 0.0 {
            return Some(xs[k]);
        }
        if fa.signum() == fb.signum() {
            continue;
        }
        let (mut a, mut b, mut fa) = (xs[k], xs[k + 1], fa);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let Some(fm) = f(m) else { break };
            if fm == 0.0 {
                a = m;
                b = m;
                break;
            }
            if fm.signum() == fa.signum() {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        let root = 0.5 * (a + b);
        if f(root).is_some_and(|v| v.abs() <= accept) {
            return Some(root);
        }
    }
    None
}

/// Rotates wing `W_i` (`which_w = true`) or `V_i` about the other wing vector
/// of the same vertex by angle `s`.
pub fn rotate_wing(mesh: &KokotsakisMesh, i: usize, which_w: bool, s: f64) -> KokotsakisMesh {
    let d = mesh.derived_vectors();
    let (axis, moving) = if which_w { (d.v[i], d.w[i]) } else { (d.w[i], d.v[i]) };
    let rot = Rotation3::from_axis_angle(&Unit::new_normalize(axis), s);
    let mut out = mesh.clone();
    let p = mesh.centre[i] + rot * moving;
    if which_w {
        out.w_wing[i] = p;
    } else {
        out.v_wing[i] = p;
    }
    out
}
