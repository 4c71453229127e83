//! Sylvester resultants of univariate polynomials.

use super::poly::degree;
use super::scalar::Scalar;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ResultantError {
    #[error("both polynomials are zero")]
    BothZero,
}

/// Sylvester matrix of `f` (degree `p`) and `g` (degree `q`), coefficients
/// lowest degree first: `q` shifted rows of `f` followed by `p` rows of `g`,
/// leading coefficients on the left.
pub fn sylvester_matrix<S: Scalar>(f: &[S], g: &[S]) -> Vec<Vec<S>> {
    let p = degree(f).unwrap_or(0);
    let q = degree(g).unwrap_or(0);
    let size = p + q;
    let mut m = vec![vec![S::zero(); size]; size];
    for r in 0..q {
        for k in 0..=p {
            m[r][r + k] = f[p - k].clone();
        }
    }
    for r in 0..p {
        for k in 0..=q {
            m[q + r][r + k] = g[q - k].clone();
        }
    }
    m
}

/// Determinant by Gaussian elimination with partial pivoting on magnitude.
pub fn determinant<S: Scalar>(mut m: Vec<Vec<S>>) -> S {
    let n = m.len();
    let mut det = S::one();
    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| !m[r][col].is_zero())
            .max_by(|&a, &b| m[a][col].magnitude().total_cmp(&m[b][col].magnitude()));
        let Some(p) = pivot else { return S::zero() };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        let piv = m[col][col].clone();
        det = det * piv.clone();
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone() / piv.clone();
            for c in col + 1..n {
                let sub = factor.clone() * m[col][c].clone();
                m[r][c] = m[r][c].clone() - sub;
            }
            m[r][col] = S::zero();
        }
    }
    det
}

/// Resultant of `f` and `g` in their common variable, using the actual
/// degrees of the arguments. A zero polynomial against a nonzero one gives 0.
pub fn resultant_in_t3<S: Scalar>(f: &[S], g: &[S]) -> Result<S, ResultantError> {
    match (degree(f), degree(g)) {
        (None, None) => Err(ResultantError::BothZero),
        (None, Some(_)) | (Some(_), None) => Ok(S::zero()),
        (Some(0), Some(q)) => Ok(pow(&f[0], q)),
        (Some(p), Some(0)) => Ok(pow(&g[0], p)),
        _ => Ok(determinant(sylvester_matrix(f, g))),
    }
}

fn pow<S: Scalar>(x: &S, k: usize) -> S {
    (0..k).fold(S::one(), |acc, _| acc * x.clone())
}
