//! Known flexible families of quadrilateral meshes in angle space, built on
//! half-angle tangents `u = tan(x / 2)` so that rational parameters give
//! rational cosines and sines.
//!
//! * Voss: `gamma_i = alpha_i`, `phi_i = beta_i`, plus the closure
//!   `k_0 k_2 = k_1 k_3` with `k = (1 + u_alpha u_beta) / (1 - u_alpha u_beta)`
//!   that makes the chain of dihedral relations close up.
//! * Two mirror-symmetric families, swapping vertices `0 <-> 3, 1 <-> 2`
//!   or `0 <-> 1, 2 <-> 3`; a mirror exchanges the roles of `beta` and `phi`.
//! * Sign flips: replacing a wing vector by its negative maps the two face
//!   angles next to it to their supplements, `u -> 1 / u`.

use super::scalar::Scalar;
use crate::io::HalfTangents;
use crate::mesh::AngleSet;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FamilyError {
    #[error("infeasible family parameters: {0}")]
    InfeasibleParameters(String),
    #[error("bad flip {0:?}: expected v<k> or w<k> with 1 <= k <= 4")]
    BadFlip(String),
    #[error("bad rational {0:?}")]
    BadRational(String),
}

/// Half-angle tangents of the four face-angle kinds at every vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfTan<S> {
    pub alpha: Vec<S>,
    pub beta: Vec<S>,
    pub gamma: Vec<S>,
    pub phi: Vec<S>,
}

impl<S: Scalar> HalfTan<S> {
    pub fn n(&self) -> usize {
        self.alpha.len()
    }

    pub fn vertex(&self, i: usize) -> [&S; 4] {
        [&self.alpha[i], &self.beta[i], &self.gamma[i], &self.phi[i]]
    }

    pub fn to_angle_set(&self) -> AngleSet {
        let ang = |v: &[S]| v.iter().map(|u| 2.0 * u.to_f64().atan()).collect();
        AngleSet { alpha: ang(&self.alpha), beta: ang(&self.beta), gamma: ang(&self.gamma), phi: ang(&self.phi), omega: None }
    }

    fn check(self) -> Result<Self, FamilyError> {
        for (name, v) in [("alpha", &self.alpha), ("beta", &self.beta), ("gamma", &self.gamma), ("phi", &self.phi)] {
            for (i, u) in v.iter().enumerate() {
                let x = u.to_f64();
                if !(x.is_finite() && x > 0.0) {
                    return Err(FamilyError::InfeasibleParameters(format!("{name}{} is outside (0, pi)", i + 1)));
                }
            }
        }
        Ok(self)
    }
}

impl HalfTan<f64> {
    pub fn from_angles(a: &AngleSet) -> Self {
        let u = |v: &[f64]| v.iter().map(|x| (x / 2.0).tan()).collect();
        Self { alpha: u(&a.alpha), beta: u(&a.beta), gamma: u(&a.gamma), phi: u(&a.phi) }
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational, FamilyError> {
    let bad = || FamilyError::BadRational(s.to_string());
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
    }
}

impl HalfTan<BigRational> {
    pub fn to_strings(&self) -> HalfTangents {
        let s = |v: &[BigRational]| v.iter().map(|q| q.to_string()).collect();
        HalfTangents { alpha: s(&self.alpha), beta: s(&self.beta), gamma: s(&self.gamma), phi: s(&self.phi) }
    }

    pub fn from_strings(h: &HalfTangents) -> Result<Self, FamilyError> {
        let p = |v: &[String]| v.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>();
        Self { alpha: p(&h.alpha)?, beta: p(&h.beta)?, gamma: p(&h.gamma)?, phi: p(&h.phi)? }.check()
    }
}

/// `tan(a + b)` from `tan a`, `tan b`.
fn tan_sum<S: Scalar>(x: &S, y: &S) -> Result<S, FamilyError> {
    let den = S::one() - x.clone() * y.clone();
    if den.is_zero() {
        return Err(FamilyError::InfeasibleParameters("angle sum hits a multiple of pi".into()));
    }
    Ok((x.clone() + y.clone()) / den)
}

fn voss_k<S: Scalar>(u: &S, v: &S) -> Result<S, FamilyError> {
    let p = u.clone() * v.clone();
    let den = S::one() - p.clone();
    if den.is_zero() {
        return Err(FamilyError::InfeasibleParameters("alpha + beta = pi at a Voss vertex".into()));
    }
    Ok((S::one() + p) / den)
}

/// Fourth central angle closing the quadrilateral: `alpha_4 = 2 pi - (alpha_1 + alpha_2 + alpha_3)`,
/// i.e. `tan(alpha_4 / 2) = -tan((alpha_1 + alpha_2 + alpha_3) / 2)`.
pub fn closing_alpha<S: Scalar>(a: &[S; 3]) -> Result<S, FamilyError> {
    Ok(-tan_sum(&tan_sum(&a[0], &a[1])?, &a[2])?)
}

/// Voss angle set from the half tangents of `alpha_1..alpha_3` and
/// `beta_1..beta_3`.
pub fn voss<S: Scalar>(alpha: [S; 3], beta: [S; 3]) -> Result<HalfTan<S>, FamilyError> {
    // angles must sum to more than pi for the fourth to be below pi
    let total: f64 = alpha.iter().map(|u| 2.0 * u.to_f64().atan()).sum();
    if !(total > PI && total < 2.0 * PI) {
        return Err(FamilyError::InfeasibleParameters("central angles do not close a convex quadrilateral".into()));
    }
    let a4 = closing_alpha(&alpha)?;
    let ks: Vec<S> = (0..3).map(|i| voss_k(&alpha[i], &beta[i])).collect::<Result<_, _>>()?;
    let k = ks[0].clone() * ks[2].clone() / ks[1].clone();
    let den = (k.clone() + S::one()) * a4.clone();
    if den.is_zero() {
        return Err(FamilyError::InfeasibleParameters("Voss closure is singular".into()));
    }
    let b4 = (k - S::one()) / den;
    let alpha = vec![alpha[0].clone(), alpha[1].clone(), alpha[2].clone(), a4];
    let beta = vec![beta[0].clone(), beta[1].clone(), beta[2].clone(), b4];
    HalfTan { gamma: alpha.clone(), phi: beta.clone(), alpha, beta }.check()
}

/// Mirror family swapping vertices `0 <-> 3` and `1 <-> 2`. Free: `alpha_1`
/// and `(beta, gamma, phi)` at vertices 1 and 2; `alpha_2 = pi - alpha_1`.
pub fn symmetric_12_43<S: Scalar>(alpha1: S, v1: [S; 3], v2: [S; 3]) -> Result<HalfTan<S>, FamilyError> {
    let a2 = S::one() / alpha1.clone();
    let [b1, g1, p1] = v1;
    let [b2, g2, p2] = v2;
    HalfTan {
        alpha: vec![alpha1.clone(), a2.clone(), a2, alpha1],
        beta: vec![b1.clone(), b2.clone(), p2.clone(), p1.clone()],
        gamma: vec![g1.clone(), g2.clone(), g2, g1],
        phi: vec![p1, p2, b2, b1],
    }
    .check()
}

/// Mirror family swapping vertices `0 <-> 1` and `2 <-> 3`. Free: `alpha_1`
/// and `(beta, gamma, phi)` at vertices 1 and 4; `alpha_4 = pi - alpha_1`.
pub fn symmetric_14_23<S: Scalar>(alpha1: S, v1: [S; 3], v4: [S; 3]) -> Result<HalfTan<S>, FamilyError> {
    let a4 = S::one() / alpha1.clone();
    let [b1, g1, p1] = v1;
    let [b4, g4, p4] = v4;
    HalfTan {
        alpha: vec![alpha1.clone(), alpha1, a4.clone(), a4],
        beta: vec![b1.clone(), p1.clone(), p4.clone(), b4.clone()],
        gamma: vec![g1.clone(), g1, g4.clone(), g4],
        phi: vec![p1, b1, b4, p4],
    }
    .check()
}

/// A wing vector to negate: `V(i)` or `W(i)` at vertex `i` (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flip {
    V(usize),
    W(usize),
}

impl Flip {
    /// The pair of flips on the edge face over edge `i`: `w_i` and `v_{i+1}`.
    /// Flipping both keeps the angle system consistent; the dihedral at that
    /// edge changes by `pi`.
    pub fn edge_pair(i: usize, n: usize) -> [Flip; 2] {
        [Flip::W(i), Flip::V((i + 1) % n)]
    }
}

impl fmt::Display for Flip {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Flip::V(i) => write!(f, "v{}", i + 1),
            Flip::W(i) => write!(f, "w{}", i + 1),
        }
    }
}

impl FromStr for Flip {
    type Err = FamilyError;
    /// `v1`..`v4`, `w1`..`w4` (1-based, as printed).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FamilyError::BadFlip(s.to_string());
        let s = s.trim();
        let (kind, num) = s.split_at(s.char_indices().nth(1).map_or(s.len(), |(k, _)| k));
        let k: usize = num.parse().map_err(|_| bad())?;
        if !(1..=4).contains(&k) {
            return Err(bad());
        }
        match kind {
            "v" | "V" => Ok(Flip::V(k - 1)),
            "w" | "W" => Ok(Flip::W(k - 1)),
            _ => Err(bad()),
        }
    }
}

/// Negates the listed wing vectors: the adjacent face angle and the corner
/// angle `gamma` become their supplements.
pub fn sign_flip<S: Scalar>(base: &HalfTan<S>, flips: &[Flip]) -> Result<HalfTan<S>, FamilyError> {
    let mut out = base.clone();
    let inv = |u: &S| S::one() / u.clone();
    for f in flips {
        let i = match *f {
            Flip::V(i) | Flip::W(i) => i,
        };
        if i >= out.n() {
            return Err(FamilyError::BadFlip(f.to_string()));
        }
        match *f {
            Flip::V(i) => out.beta[i] = inv(&out.beta[i]),
            Flip::W(i) => out.phi[i] = inv(&out.phi[i]),
        }
        out.gamma[i] = inv(&out.gamma[i]);
    }
    out.check()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Voss,
    #[serde(rename = "symmetric_12_43")]
    Symmetric1243,
    #[serde(rename = "symmetric_14_23")]
    Symmetric1423,
    SignFlip,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 4] = [FamilyKind::Voss, FamilyKind::Symmetric1243, FamilyKind::Symmetric1423, FamilyKind::SignFlip];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Voss => "voss",
            FamilyKind::Symmetric1243 => "symmetric_12_43",
            FamilyKind::Symmetric1423 => "symmetric_14_23",
            FamilyKind::SignFlip => "sign_flip",
        }
    }
}

impl FromStr for FamilyKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let key = s.replace('-', "_").to_lowercase();
        FamilyKind::ALL
            .into_iter()
            .find(|k| k.name() == key)
            .ok_or_else(|| format!("unknown family {s:?}; expected one of voss, symmetric_12_43, symmetric_14_23, sign_flip"))
    }
}

/// Free parameters of a family, as half-angle tangents.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilyParams<S> {
    Voss { alpha: [S; 3], beta: [S; 3] },
    Symmetric1243 { alpha1: S, v1: [S; 3], v2: [S; 3] },
    Symmetric1423 { alpha1: S, v1: [S; 3], v4: [S; 3] },
    SignFlip { base: Box<FamilyParams<S>>, flips: Vec<Flip> },
}

pub fn family_half_tan<S: Scalar>(params: &FamilyParams<S>) -> Result<HalfTan<S>, FamilyError> {
    match params.clone() {
        FamilyParams::Voss { alpha, beta } => voss(alpha, beta),
        FamilyParams::Symmetric1243 { alpha1, v1, v2 } => symmetric_12_43(alpha1, v1, v2),
        FamilyParams::Symmetric1423 { alpha1, v1, v4 } => symmetric_14_23(alpha1, v1, v4),
        FamilyParams::SignFlip { base, flips } => sign_flip(&family_half_tan(&base)?, &flips),
    }
}

/// Angle set of a family member; parameters are half-angle tangents.
pub fn family_angles<S: Scalar>(params: &FamilyParams<S>) -> Result<AngleSet, FamilyError> {
    Ok(family_half_tan(params)?.to_angle_set())
}

/// Half tangent of an angle given in radians.
pub fn half_tan(x: f64) -> f64 {
    (x / 2.0).tan()
}

/// Small-denominator rational close to `tan(x / 2)` for `x` uniform in
/// `(lo, hi)`.
fn random_half_tan<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> BigRational {
    let x = rng.random_range(lo..hi);
    let q: i64 = rng.random_range(3..=12);
    let p = ((x / 2.0).tan() * q as f64).round().max(1.0) as i64;
    BigRational::new(p.into(), q.into())
}

fn well_inside(ht: &HalfTan<BigRational>, margin: f64) -> bool {
    let a = ht.to_angle_set();
    [&a.alpha, &a.beta, &a.gamma, &a.phi].iter().all(|v| v.iter().all(|&x| x > margin && x < PI - margin))
}

/// Random draw of the free parameters of `kind` with rational values whose
/// angles keep at least `0.2` away from `0` and `pi`. Sign flips are drawn on
/// a Voss base with a random nonempty set of edge-face pairs.
pub fn draw_family<R: Rng>(kind: FamilyKind, rng: &mut R) -> Result<(FamilyParams<BigRational>, HalfTan<BigRational>), FamilyError> {
    for _ in 0..10_000 {
        let mut r = |lo: f64, hi: f64| random_half_tan(rng, lo, hi);
        let params = match kind {
            FamilyKind::Voss => {
                FamilyParams::Voss { alpha: [r(1.2, 2.2), r(1.2, 2.2), r(1.2, 2.2)], beta: [r(0.6, 2.5), r(0.6, 2.5), r(0.6, 2.5)] }
            }
            FamilyKind::Symmetric1243 => FamilyParams::Symmetric1243 {
                alpha1: r(1.0, 2.1),
                v1: [r(0.6, 2.5), r(0.6, 2.5), r(0.6, 2.5)],
                v2: [r(0.6, 2.5), r(0.6, 2.5), r(0.6, 2.5)],
            },
            FamilyKind::Symmetric1423 => FamilyParams::Symmetric1423 {
                alpha1: r(1.0, 2.1),
                v1: [r(0.6, 2.5), r(0.6, 2.5), r(0.6, 2.5)],
                v4: [r(0.6, 2.5), r(0.6, 2.5), r(0.6, 2.5)],
            },
            FamilyKind::SignFlip => {
                let (base, _) = draw_family(FamilyKind::Voss, rng)?;
                let mask = rng.random_range(1u32..16);
                let flips = (0..4).filter(|e| mask >> e & 1 == 1).flat_map(|e| Flip::edge_pair(e, 4)).collect();
                FamilyParams::SignFlip { base: Box::new(base), flips }
            }
        };
        if let Ok(ht) = family_half_tan(&params) {
            if well_inside(&ht, 0.2) {
                return Ok((params, ht));
            }
        }
    }
    Err(FamilyError::InfeasibleParameters(format!("no admissible {} draw", kind.name())))
}

/// Equalities of the form `x_i = y_i` or `x_i + y_i = pi` between
/// `(alpha, gamma)` and `(beta, phi)` at every vertex, decided exactly.
pub fn angle_relations(ht: &HalfTan<BigRational>) -> Vec<String> {
    let mut out = Vec::new();
    for i in 0..ht.n() {
        let k = i + 1;
        for (x, y, nx, ny) in [(&ht.alpha[i], &ht.gamma[i], "alpha", "gamma"), (&ht.beta[i], &ht.phi[i], "beta", "phi")] {
            if x == y {
                out.push(format!("{nx}{k} = {ny}{k}"));
            }
            if (x * y).is_one() {
                out.push(format!("{nx}{k} + {ny}{k} = pi"));
            }
        }
    }
    out
}
