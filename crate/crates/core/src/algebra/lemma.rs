//! The per-vertex relation between face angles and dihedral angles, its
//! squared polynomial form in the dihedral cosines, and the nine
//! coefficients of that form.

use super::scalar::Scalar;
use num_rational::BigRational;
use num_traits::One;

/// Face angles `(alpha, beta, gamma, phi)` at one vertex, in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub phi: f64,
}

impl VertexAngles {
    pub fn new(alpha: f64, beta: f64, gamma: f64, phi: f64) -> Self {
        Self { alpha, beta, gamma, phi }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }
}

/// Residual of the relation at a vertex whose `beta` wing is hinged at
/// dihedral `omega_prev` and whose `phi` wing is hinged at `omega`. Zero for
/// every embedded vertex (see [`crate::mesh::AngleSet`] for the sign of the
/// dihedrals).
pub fn r_residual(v: &VertexAngles, omega_prev: f64, omega: f64) -> f64 {
    let (sa, ca) = v.alpha.sin_cos();
    let (sb, cb) = v.beta.sin_cos();
    let (sp, cp) = v.phi.sin_cos();
    let (sw, cw) = omega_prev.sin_cos();
    let (so, co) = omega.sin_cos();
    ca * cb * cp + sa * sb * cp * cw + sa * cb * sp * co - ca * sb * sp * cw * co + sb * sp * sw * so - v.gamma.cos()
}

/// The part of the relation that is linear in `(cos omega, sin omega)` once
/// `omega_prev` is known: returns `(p, q, r)` with
/// `p + q cos(omega) + r sin(omega) = cos(gamma)`.
pub fn linear_form(v: &VertexAngles, omega_prev: f64) -> (f64, f64, f64) {
    let (sa, ca) = v.alpha.sin_cos();
    let (sb, cb) = v.beta.sin_cos();
    let (sp, cp) = v.phi.sin_cos();
    let (sw, cw) = omega_prev.sin_cos();
    (ca * cb * cp + sa * sb * cp * cw, sa * cb * sp - ca * sb * sp * cw, sb * sp * sw)
}

/// Cosines and sines the coefficients are built from.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexTrig<S> {
    pub ca: S,
    pub sa: S,
    pub cb: S,
    pub sb: S,
    pub cg: S,
    pub cp: S,
    pub sp: S,
}

impl<S: Scalar> VertexTrig<S> {
    pub fn from_angles(v: &VertexAngles) -> Self {
        let f = S::from_f64;
        Self {
            ca: f(v.alpha.cos()),
            sa: f(v.alpha.sin()),
            cb: f(v.beta.cos()),
            sb: f(v.beta.sin()),
            cg: f(v.gamma.cos()),
            cp: f(v.phi.cos()),
            sp: f(v.phi.sin()),
        }
    }

    /// From half-angle tangents `u = tan(x / 2)`:
    /// `cos x = (1 - u^2) / (1 + u^2)`, `sin x = 2u / (1 + u^2)`.
    pub fn from_half_tangents(u: [&BigRational; 4]) -> Self {
        let cs = |u: &BigRational| {
            let one = BigRational::one();
            let d = &one + u * u;
            let c = (&one - u * u) / &d;
            let s = (u + u) / d;
            (S::from_rational(&c), S::from_rational(&s))
        };
        let (ca, sa) = cs(u[0]);
        let (cb, sb) = cs(u[1]);
        let (cg, _) = cs(u[2]);
        let (cp, sp) = cs(u[3]);
        Self { ca, sa, cb, sb, cg, cp, sp }
    }
}

/// Coefficients `C_1..C_9` of the squared relation
/// `C1 + C2 t' + C3 t + C4 t'^2 + C5 t' t + C6 t^2 + C7 t'^2 t + C8 t' t^2 + C9 t'^2 t^2 = 0`
/// in `t' = cos(omega_prev)`, `t = cos(omega)`.
pub fn c_coefficients<S: Scalar>(tr: &VertexTrig<S>) -> [S; 9] {
    let VertexTrig { ca, sa, cb, sb, cg, cp, sp } = tr.clone();
    let two = S::from_f64(2.0);
    let sq = |x: &S| x.clone() * x.clone();
    let m = ca.clone() * cb.clone() * cp.clone() - cg.clone();
    let sbsp2 = sq(&sb) * sq(&sp);
    [
        sq(&m) - sbsp2.clone(),
        two.clone() * m.clone() * sa.clone() * sb.clone() * cp.clone(),
        two.clone() * m * sa.clone() * cb.clone() * sp.clone(),
        sq(&sa) * sq(&sb) * sq(&cp) + sbsp2.clone(),
        two.clone()
            * (cb.clone() * cp.clone() - two.clone() * sq(&ca) * cb.clone() * cp.clone() + ca.clone() * cg)
            * sb.clone()
            * sp.clone(),
        sq(&sa) * sq(&cb) * sq(&sp) + sbsp2,
        -(two.clone() * sa.clone() * ca.clone() * sq(&sb) * sp.clone() * cp.clone()),
        -(two * sa.clone() * ca * sb.clone() * cb * sq(&sp)),
        -(sq(&sa) * sq(&sb) * sq(&sp)),
    ]
}

pub fn c_coefficients_f64(v: &VertexAngles) -> [f64; 9] {
    c_coefficients(&VertexTrig::<f64>::from_angles(v))
}

/// The biquadratic form at `(t_prev, t_cur)`.
pub fn rbar_residual<S: Scalar>(c: &[S; 9], t_prev: &S, t_cur: &S) -> S {
    let (p, q) = (t_prev.clone(), t_cur.clone());
    let p2 = p.clone() * p.clone();
    let q2 = q.clone() * q.clone();
    c[0].clone()
        + c[1].clone() * p.clone()
        + c[2].clone() * q.clone()
        + c[3].clone() * p2.clone()
        + c[4].clone() * p.clone() * q.clone()
        + c[5].clone() * q2.clone()
        + c[6].clone() * p2.clone() * q.clone()
        + c[7].clone() * p * q2.clone()
        + c[8].clone() * p2 * q2
}
