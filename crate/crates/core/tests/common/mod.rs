//! Builders shared by the integration tests.
#![allow(dead_code)]

use kokotsakis::algebra::families::{draw_family, FamilyKind, HalfTan};
use kokotsakis::algebra::realize::{realizable_first_dihedrals, realize_mesh};
use kokotsakis::geometry::{Line2, ProjectivePoint2, Vector2};
use kokotsakis::incidence::{ceva_menelaus_product, TraceConfiguration};
use kokotsakis::mesh::{AngleSet, KokotsakisMesh};
use kokotsakis::sampling::{random_convex_polygon, rng, well_conditioned};
use num_rational::BigRational;
use rand::Rng;
use std::f64::consts::PI;

/// Random angle set of a planar quadrilateral with arbitrary wing angles.
pub fn random_angle_set<R: Rng>(rng: &mut R) -> AngleSet {
    let quad = random_convex_polygon(rng, 4);
    let alpha: Vec<f64> = (0..4)
        .map(|i| {
            let p = quad[(i + 3) % 4] - quad[i];
            let q = quad[(i + 1) % 4] - quad[i];
            p.angle(&q)
        })
        .collect();
    let mut draw = || (0..4).map(|_| rng.random_range(0.3..PI - 0.3)).collect::<Vec<f64>>();
    AngleSet { alpha, beta: draw(), gamma: draw(), phi: draw(), omega: None }
}

/// A well conditioned embedding of a family member drawn from `seed`,
/// together with its exact half tangents and the first dihedral used.
pub fn realized_family(kind: FamilyKind, seed: u64) -> Option<(HalfTan<BigRational>, KokotsakisMesh, f64)> {
    let mut r = rng(seed);
    for _ in 0..50 {
        let (_, ht) = draw_family(kind, &mut r).ok()?;
        let angles = ht.to_angle_set();
        let cands = realizable_first_dihedrals(&angles, 72);
        if cands.is_empty() {
            continue;
        }
        let pick = r.random_range(0..cands.len());
        for k in 0..cands.len() {
            let omega1 = cands[(pick + k) % cands.len()];
            if let Ok(mesh) = realize_mesh(&angles, omega1) {
                if well_conditioned(&mesh) {
                    return Some((ht, mesh, omega1));
                }
            }
        }
    }
    None
}

pub fn to_2d(p: &kokotsakis::geometry::Vector3) -> Vector2 {
    Vector2::new(p.x, p.y)
}

/// Planar trace configuration: lines through the vertices of a random convex
/// polygon with the given direction angles.
pub fn trace_config(a: &[Vector2], theta: &[f64]) -> Option<TraceConfiguration> {
    let lines: Vec<Line2> = a
        .iter()
        .zip(theta)
        .map(|(p, t)| {
            let q = p + Vector2::new(t.cos(), t.sin());
            Line2::through(&ProjectivePoint2::from_affine(p), &ProjectivePoint2::from_affine(&q))
        })
        .collect();
    TraceConfiguration::from_planar(a, &lines).ok()
}

pub fn product(a: &[Vector2], theta: &[f64]) -> Option<f64> {
    let c = trace_config(a, theta)?;
    if c.b_infinite.iter().any(|&x| x) {
        return None;
    }
    ceva_menelaus_product(&c).ok()
}

/// Random trace directions with the last one tuned so that the product
/// equals `target`.
pub fn tuned_config<R: Rng>(rng: &mut R, n: usize, target: f64) -> Option<TraceConfiguration> {
    for _ in 0..100 {
        let a: Vec<Vector2> = if n == 3 && target < 0.0 {
            // a product of -1 on a triangle forces collinear points
            let (p, d) = (Vector2::new(rng.random_range(-1.0..1.0), 0.0), Vector2::new(1.0, rng.random_range(-0.5..0.5)));
            [0.0, rng.random_range(0.5..1.0), rng.random_range(1.5..2.0)].iter().map(|s| p + d * *s).collect()
        } else {
            random_convex_polygon(rng, n).iter().map(to_2d).collect()
        };
        let mut theta: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..PI)).collect();
        let fixed = theta.clone();
        let f = |x: f64| {
            let mut th = fixed.clone();
            th[n - 1] = x;
            product(&a, &th).map(|p| p - target)
        };
        if let Some(x) = kokotsakis::sampling::find_root(f, 0.0, PI, 400, 1e-9) {
            theta[n - 1] = x;
            return trace_config(&a, &theta);
        }
    }
    None
}

/// Random trace directions through a random convex polygon.
pub fn generic_config<R: Rng>(rng: &mut R, n: usize) -> TraceConfiguration {
    loop {
        let a: Vec<Vector2> = random_convex_polygon(rng, n).iter().map(to_2d).collect();
        let theta: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..PI)).collect();
        if let Some(c) = trace_config(&a, &theta) {
            if !c.b_infinite.iter().any(|&x| x) {
                return c;
            }
        }
    }
}
