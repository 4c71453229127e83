//! Reduction of the four vertex relations of a quadrilateral mesh to two
//! polynomials in `(t1, t3)`.
//!
//! Vertices are indexed `0..4`; vertex `k` carries the relation between
//! `t_{k-1}` and `t_k`, the cosines of the dihedrals at the edges on either
//! side of it. Writing `t1`, `t3` for the cosines at edges 0 and 2, the
//! cosine at edge 1 is eliminated between vertices 1 and 2 and the cosine at
//! edge 3 between vertices 3 and 0. Each pair is linear after the squares
//! are cancelled against each other.

use super::poly::BivarPoly;
use super::scalar::Scalar;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EliminationError {
    #[error("elimination denominator vanishes for the {0} unknown")]
    EliminationSingular(&'static str),
}

/// Coefficient rows `C_1..C_9` for the four vertices.
pub type CornerCoefficients<S> = [[S; 9]; 4];

/// A vertex form regrouped as `g0 + g1 s + g2 s^2`, each `g` a quadratic in
/// the other variable `x` (lowest degree first).
struct Grouped<S> {
    g: [[S; 3]; 3],
}

/// Grouping by powers of the previous-edge cosine `t'` with `x = t`.
fn by_prev<S: Scalar>(c: &[S; 9]) -> Grouped<S> {
    let c = c.clone();
    Grouped {
        g: [
            [c[0].clone(), c[2].clone(), c[5].clone()],
            [c[1].clone(), c[4].clone(), c[7].clone()],
            [c[3].clone(), c[6].clone(), c[8].clone()],
        ],
    }
}

/// Grouping by powers of the current-edge cosine `t` with `x = t'`.
fn by_cur<S: Scalar>(c: &[S; 9]) -> Grouped<S> {
    let c = c.clone();
    Grouped {
        g: [
            [c[0].clone(), c[1].clone(), c[3].clone()],
            [c[2].clone(), c[4].clone(), c[6].clone()],
            [c[5].clone(), c[7].clone(), c[8].clone()],
        ],
    }
}

fn quad<S: Scalar>(q: &[S; 3], x: &S) -> S {
    q[0].clone() + x.clone() * (q[1].clone() + x.clone() * q[2].clone())
}

/// `(numerator, denominator)` of the eliminated unknown from forms
/// `a0 + a1 s + a2 s^2` and `b0 + b1 s + b2 s^2`:
/// `s = -(a2 b0 - b2 a0) / (a2 b1 - b2 a1)`.
fn linear_solve<S: Scalar>(a: [S; 3], b: [S; 3]) -> (S, S) {
    let [a0, a1, a2] = a;
    let [b0, b1, b2] = b;
    let num = -(a2.clone() * b0 - b2.clone() * a0);
    let den = a2 * b1 - b2 * a1;
    (num, den)
}

/// Numerator and denominator of `t2` (edge 1) at `(t1, t3)`.
pub fn t2_parts<S: Scalar>(c: &CornerCoefficients<S>, t1: &S, t3: &S) -> (S, S) {
    let q = by_cur(&c[1]);
    let s = by_prev(&c[2]);
    let a = [quad(&q.g[0], t1), quad(&q.g[1], t1), quad(&q.g[2], t1)];
    let b = [quad(&s.g[0], t3), quad(&s.g[1], t3), quad(&s.g[2], t3)];
    linear_solve(a, b)
}

/// Numerator and denominator of `t4` (edge 3) at `(t1, t3)`.
pub fn t4_parts<S: Scalar>(c: &CornerCoefficients<S>, t1: &S, t3: &S) -> (S, S) {
    let v = by_prev(&c[0]);
    let u = by_cur(&c[3]);
    let a = [quad(&v.g[0], t1), quad(&v.g[1], t1), quad(&v.g[2], t1)];
    let b = [quad(&u.g[0], t3), quad(&u.g[1], t3), quad(&u.g[2], t3)];
    linear_solve(a, b)
}

/// The dihedral cosines at edges 1 and 3 as rational functions of the
/// cosines at edges 0 and 2.
pub fn eliminate_t2_t4(c: &CornerCoefficients<f64>, t1: f64, t3: f64) -> Result<(f64, f64), EliminationError> {
    let (n2, d2) = t2_parts(c, &t1, &t3);
    let (n4, d4) = t4_parts(c, &t1, &t3);
    let scale = |x: &[f64; 9]| x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let size = c.iter().map(scale).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mag = (1.0 + t1.abs()).powi(2) * (1.0 + t3.abs()).powi(2) * size * size;
    if d2.abs() <= 1e-14 * mag {
        return Err(EliminationError::EliminationSingular("second"));
    }
    if d4.abs() <= 1e-14 * mag {
        return Err(EliminationError::EliminationSingular("fourth"));
    }
    Ok((n2 / d2, n4 / d4))
}

fn poly_in<S: Scalar>(q: &[S; 3], first: bool) -> BivarPoly<S> {
    if first {
        BivarPoly::in_t1(q)
    } else {
        BivarPoly::in_t3(q)
    }
}

/// `(numerator, denominator)` as polynomials in `(t1, t3)`.
fn parts_poly<S: Scalar>(a: &Grouped<S>, b: &Grouped<S>) -> (BivarPoly<S>, BivarPoly<S>) {
    let a: Vec<BivarPoly<S>> = a.g.iter().map(|q| poly_in(q, true)).collect();
    let b: Vec<BivarPoly<S>> = b.g.iter().map(|q| poly_in(q, false)).collect();
    let num = a[2].mul(&b[0]).sub(&b[2].mul(&a[0])).neg();
    let den = a[2].mul(&b[1]).sub(&b[2].mul(&a[1]));
    (num, den)
}

/// `g0 d^2 + g1 d n + g2 n^2` for a grouping `g` whose coefficients are
/// quadratics in `t1`.
fn cleared<S: Scalar>(g: &Grouped<S>, num: &BivarPoly<S>, den: &BivarPoly<S>) -> BivarPoly<S> {
    let g: Vec<BivarPoly<S>> = g.g.iter().map(|q| poly_in(q, true)).collect();
    g[0].mul(&den.mul(den)).add(&g[1].mul(&den.mul(num))).add(&g[2].mul(&num.mul(num)))
}

/// The two polynomials whose common zeros in `t3` decide flexibility:
/// `f1` clears the vertex-0 relation after substituting `t4`, `f2` the
/// vertex-1 relation after substituting `t2`.
pub fn build_f1_f2<S: Scalar>(c: &CornerCoefficients<S>) -> (BivarPoly<S>, BivarPoly<S>) {
    let v = by_prev(&c[0]);
    let u = by_cur(&c[3]);
    let q = by_cur(&c[1]);
    let s = by_prev(&c[2]);
    let (n4, d4) = parts_poly(&v, &u);
    let (n2, d2) = parts_poly(&q, &s);
    (cleared(&v, &n4, &d4), cleared(&q, &n2, &d2))
}

/// Direct evaluation of `f1`, `f2` through the unexpanded composition.
pub fn f1_f2_direct<S: Scalar>(c: &CornerCoefficients<S>, t1: &S, t3: &S) -> (S, S) {
    let (n4, d4) = t4_parts(c, t1, t3);
    let (n2, d2) = t2_parts(c, t1, t3);
    let v = by_prev(&c[0]);
    let q = by_cur(&c[1]);
    let form = |g: &Grouped<S>, n: S, d: S| {
        quad(&g.g[0], t1) * d.clone() * d.clone() + quad(&g.g[1], t1) * d * n.clone() + quad(&g.g[2], t1) * n.clone() * n
    };
    (form(&v, n4, d4), form(&q, n2, d2))
}
