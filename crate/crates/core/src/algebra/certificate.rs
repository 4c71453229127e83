//! The sampled resultant test for quadrilateral meshes.
//!
//! `p(t1) = res_{t3}(f1, f2)` vanishes identically exactly when the angle set
//! flexes. It has degree at most 100, so 101 integer samples decide it. Each
//! sample normalizes the two specialized polynomials before taking the
//! resultant so that the values are comparable across angle sets.

use super::elimination::{build_f1_f2, CornerCoefficients};
use super::families::HalfTan;
use super::lemma::{c_coefficients, VertexAngles, VertexTrig};
use super::poly::{max_abs, BivarPoly};
use super::resultant::resultant_in_t3;
use super::scalar::{Dd, Scalar};
use crate::mesh::AngleSet;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::ops::RangeInclusive;
use thiserror::Error;

pub const CERTIFICATE_SCHEMA: &str = "kokotsakis-certificate/1";
/// Largest normalized sample magnitude still read as zero.
pub const VERDICT_THRESHOLD: f64 = 1e-6;
/// The designated coefficient is replaced when it is this small relative to
/// the largest one.
pub const NORMALIZATION_RTOL: f64 = 1e-12;
/// Designated normalization coefficient: the `t3^4` term.
pub const DESIGNATED_DEGREE: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertificateError {
    #[error("the resultant test needs a quadrilateral, got {0} vertices")]
    NotQuadrilateral(usize),
    #[error("empty sample range")]
    EmptyRange,
    #[error("only {valid} of the {required} required samples are usable")]
    TooFewValidSamples { valid: usize, required: usize },
    #[error("exact arithmetic needs rational half-angle tangents")]
    ExactNeedsRationalInput,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Arithmetic {
    Double,
    DoubleDouble,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Flexible,
    Rigid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateOptions {
    pub samples: RangeInclusive<i64>,
    pub threshold: f64,
    pub arithmetic: Arithmetic,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        Self { samples: -50..=50, threshold: VERDICT_THRESHOLD, arithmetic: Arithmetic::DoubleDouble }
    }
}

/// Which coefficient a specialized polynomial was divided by.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub degree: usize,
    pub coefficient: f64,
    pub fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t1: i64,
    /// Normalized resultant; absent for excluded samples.
    pub value: Option<f64>,
    /// Exact arithmetic only: whether the value is exactly zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_zero: Option<bool>,
    pub normalization: Vec<Normalization>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlexCertificate {
    pub schema: String,
    pub arithmetic: Arithmetic,
    pub threshold: f64,
    pub verdict: Verdict,
    pub max_abs: f64,
    pub valid: usize,
    pub required: usize,
    pub fallbacks: usize,
    /// Degrees of `f1` and `f2` in `(t1, t3)`.
    pub degrees: [[usize; 2]; 2],
    pub samples: Vec<Sample>,
}

impl FlexCertificate {
    pub fn is_flexible(&self) -> bool {
        self.verdict == Verdict::Flexible
    }

    /// Normalized values of the usable samples.
    pub fn values(&self) -> Vec<(i64, f64)> {
        self.samples.iter().filter_map(|s| s.value.map(|v| (s.t1, v))).collect()
    }
}

/// Minimum number of usable samples: 95 of the standard 101.
pub fn required_samples(count: usize) -> usize {
    (count * 95).div_ceil(101)
}

fn normalize<S: Scalar>(g: &[S]) -> Option<(Vec<S>, Normalization)> {
    let norm = max_abs(g);
    if g.iter().all(|c| c.is_zero()) || norm == 0.0 {
        return None;
    }
    let designated = g.get(DESIGNATED_DEGREE).map_or(0.0, Scalar::magnitude);
    let (degree, fallback) = if designated >= NORMALIZATION_RTOL * norm {
        (DESIGNATED_DEGREE, false)
    } else {
        let k = (0..g.len()).max_by(|&a, &b| g[a].magnitude().total_cmp(&g[b].magnitude())).expect("nonempty");
        (k, true)
    };
    let c = g[degree].clone();
    let scaled = g.iter().map(|x| x.clone() / c.clone()).collect();
    Some((scaled, Normalization { degree, coefficient: c.to_f64(), fallback }))
}

/// Specialized polynomials at `t1 = m` whose size is at the rounding level
/// of the grid are treated as identically zero.
fn negligible<S: Scalar>(g: &[S], f: &BivarPoly<S>, m: i64) -> bool {
    if S::EPSILON == 0.0 {
        return g.iter().all(|c| c.is_zero());
    }
    let d = f.degrees().map_or(0, |d| d.0) as i32;
    let bound = f.max_abs() * (1.0 + m.unsigned_abs() as f64).powi(d) * (d as f64 + 1.0);
    max_abs(g) <= 1e3 * S::EPSILON * bound
}

fn sample<S: Scalar>(f1: &BivarPoly<S>, f2: &BivarPoly<S>, m: i64) -> Sample {
    let t = S::from_i64(m);
    let (g1, g2) = (f1.at_t1(&t), f2.at_t1(&t));
    let excluded = |why: &str| Sample {
        t1: m,
        value: None,
        exact_zero: None,
        normalization: Vec::new(),
        diagnostic: Some(why.to_string()),
    };
    if negligible(&g1, f1, m) || negligible(&g2, f2, m) {
        return excluded("a specialized polynomial vanishes identically");
    }
    let (Some((n1, k1)), Some((n2, k2))) = (normalize(&g1), normalize(&g2)) else {
        return excluded("a specialized polynomial vanishes identically");
    };
    match resultant_in_t3(&n1, &n2) {
        Ok(r) => Sample {
            t1: m,
            value: Some(r.to_f64()),
            exact_zero: (S::EPSILON == 0.0).then(|| r.is_zero()),
            normalization: vec![k1, k2],
            diagnostic: None,
        },
        Err(e) => excluded(&e.to_string()),
    }
}

fn certify<S: Scalar>(c: &CornerCoefficients<S>, opts: &CertificateOptions) -> Result<FlexCertificate, CertificateError> {
    let ms: Vec<i64> = opts.samples.clone().collect();
    if ms.is_empty() {
        return Err(CertificateError::EmptyRange);
    }
    let (f1, f2) = build_f1_f2(c);
    let degs = |f: &BivarPoly<S>| f.degrees().map_or([0, 0], |(a, b)| [a, b]);
    let samples: Vec<Sample> = ms.par_iter().map(|&m| sample(&f1, &f2, m)).collect();
    let valid = samples.iter().filter(|s| s.value.is_some()).count();
    let required = required_samples(ms.len());
    if valid < required {
        return Err(CertificateError::TooFewValidSamples { valid, required });
    }
    let max_abs = samples.iter().filter_map(|s| s.value).map(f64::abs).fold(0.0, f64::max);
    let flexible = if opts.arithmetic == Arithmetic::Exact {
        samples.iter().all(|s| s.exact_zero != Some(false))
    } else {
        max_abs <= opts.threshold
    };
    Ok(FlexCertificate {
        schema: CERTIFICATE_SCHEMA.into(),
        arithmetic: opts.arithmetic,
        threshold: opts.threshold,
        verdict: if flexible { Verdict::Flexible } else { Verdict::Rigid },
        max_abs,
        valid,
        required,
        fallbacks: samples.iter().flat_map(|s| &s.normalization).filter(|k| k.fallback).count(),
        degrees: [degs(&f1), degs(&f2)],
        samples,
    })
}

fn check_n(n: usize) -> Result<(), CertificateError> {
    if n == 4 {
        Ok(())
    } else {
        Err(CertificateError::NotQuadrilateral(n))
    }
}

fn rows_from_angles<S: Scalar>(angles: &AngleSet) -> CornerCoefficients<S> {
    std::array::from_fn(|i| c_coefficients(&VertexTrig::<S>::from_angles(&VertexAngles::from_array(angles.vertex(i)))))
}

fn rows_from_half_tan<S: Scalar>(ht: &HalfTan<BigRational>) -> CornerCoefficients<S> {
    std::array::from_fn(|i| c_coefficients(&VertexTrig::<S>::from_half_tangents(ht.vertex(i))))
}

/// Certificate with the default options (double-double arithmetic, samples
/// `-50..=50`, threshold `1e-6`).
pub fn flex_certificate(angles: &AngleSet) -> Result<FlexCertificate, CertificateError> {
    flex_certificate_with(angles, &CertificateOptions::default())
}

pub fn flex_certificate_with(angles: &AngleSet, opts: &CertificateOptions) -> Result<FlexCertificate, CertificateError> {
    check_n(angles.n())?;
    match opts.arithmetic {
        Arithmetic::Double => certify(&rows_from_angles::<f64>(angles), opts),
        Arithmetic::DoubleDouble => certify(&rows_from_angles::<Dd>(angles), opts),
        Arithmetic::Exact => Err(CertificateError::ExactNeedsRationalInput),
    }
}

/// Certificate from exact half-angle tangents; with [`Arithmetic::Exact`]
/// the verdict requires every sample to vanish exactly.
pub fn flex_certificate_half_tan(
    ht: &HalfTan<BigRational>,
    opts: &CertificateOptions,
) -> Result<FlexCertificate, CertificateError> {
    check_n(ht.n())?;
    match opts.arithmetic {
        Arithmetic::Double => certify(&rows_from_half_tan::<f64>(ht), opts),
        Arithmetic::DoubleDouble => certify(&rows_from_half_tan::<Dd>(ht), opts),
        Arithmetic::Exact => certify(&rows_from_half_tan::<BigRational>(ht), opts),
    }
}
