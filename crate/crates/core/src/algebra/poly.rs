//! Dense polynomials: univariate coefficient vectors (lowest degree first)
//! and bivariate grids in `(t1, t3)`.

use super::scalar::Scalar;
use num_traits::Zero;

/// Degree of `p` ignoring trailing zeros; `None` for the zero polynomial.
pub fn degree<S: Scalar>(p: &[S]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn trimmed<S: Scalar>(p: &[S]) -> Vec<S> {
    match degree(p) {
        Some(d) => p[..=d].to_vec(),
        None => Vec::new(),
    }
}

/// Horner evaluation.
pub fn eval<S: Scalar>(p: &[S], x: &S) -> S {
    p.iter().rev().fold(S::zero(), |acc, c| acc * x.clone() + c.clone())
}

pub fn max_abs<S: Scalar>(p: &[S]) -> f64 {
    p.iter().map(Scalar::magnitude).fold(0.0, f64::max)
}

/// Dense coefficient grid: `c[i][j]` multiplies `t1^i t3^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct BivarPoly<S> {
    c: Vec<Vec<S>>,
}

impl<S: Scalar> BivarPoly<S> {
    pub fn zero() -> Self {
        Self { c: Vec::new() }
    }

    /// Builds from a grid, trimming zero rows and columns.
    pub fn from_grid(mut c: Vec<Vec<S>>) -> Self {
        let width = c.iter().filter_map(|row| degree(row)).max().map_or(0, |d| d + 1);
        for row in c.iter_mut() {
            row.resize(width, S::zero());
        }
        while c.last().is_some_and(|row| row.iter().all(Zero::is_zero)) {
            c.pop();
        }
        Self { c }
    }

    /// Polynomial in `t1` only.
    pub fn in_t1(p: &[S]) -> Self {
        Self::from_grid(p.iter().map(|x| vec![x.clone()]).collect())
    }

    /// Polynomial in `t3` only.
    pub fn in_t3(p: &[S]) -> Self {
        Self::from_grid(vec![p.to_vec()])
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Tight degrees `(deg in t1, deg in t3)`; `None` for zero.
    pub fn degrees(&self) -> Option<(usize, usize)> {
        if self.c.is_empty() {
            None
        } else {
            Some((self.c.len() - 1, self.c[0].len() - 1))
        }
    }

    pub fn coeff(&self, i: usize, j: usize) -> S {
        self.c.get(i).and_then(|row| row.get(j)).cloned().unwrap_or_else(S::zero)
    }

    pub fn grid(&self) -> &[Vec<S>] {
        &self.c
    }

    pub fn add(&self, other: &Self) -> Self {
        let rows = self.c.len().max(other.c.len());
        let cols = self.c.first().map_or(0, Vec::len).max(other.c.first().map_or(0, Vec::len));
        let grid = (0..rows)
            .map(|i| (0..cols).map(|j| self.coeff(i, j) + other.coeff(i, j)).collect())
            .collect();
        Self::from_grid(grid)
    }

    pub fn neg(&self) -> Self {
        Self { c: self.c.iter().map(|row| row.iter().map(|x| -x.clone()).collect()).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (Some((a1, a3)), Some((b1, b3))) = (self.degrees(), other.degrees()) else {
            return Self::zero();
        };
        let mut grid = vec![vec![S::zero(); a3 + b3 + 1]; a1 + b1 + 1];
        for (i, row) in self.c.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (k, orow) in other.c.iter().enumerate() {
                    for (l, y) in orow.iter().enumerate() {
                        let g = &mut grid[i + k][j + l];
                        *g = g.clone() + x.clone() * y.clone();
                    }
                }
            }
        }
        Self::from_grid(grid)
    }

    pub fn eval(&self, t1: &S, t3: &S) -> S {
        let rows: Vec<S> = self.c.iter().map(|row| eval(row, t3)).collect();
        eval(&rows, t1)
    }

    /// The univariate polynomial in `t3` obtained by fixing `t1`.
    pub fn at_t1(&self, t1: &S) -> Vec<S> {
        let cols = self.c.first().map_or(0, Vec::len);
        (0..cols)
            .map(|j| {
                let column: Vec<S> = self.c.iter().map(|row| row[j].clone()).collect();
                eval(&column, t1)
            })
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().map(|row| max_abs(row)).fold(0.0, f64::max)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> BivarPoly<T> {
        BivarPoly::from_grid(self.c.iter().map(|row| row.iter().map(&f).collect()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_specialization() {
        // (1 + t1)(2 - t3) = 2 - t3 + 2 t1 - t1 t3
        let p = BivarPoly::in_t1(&[1.0, 1.0]).mul(&BivarPoly::in_t3(&[2.0, -1.0]));
        assert_eq!(p.degrees(), Some((1, 1)));
        assert_eq!(p.coeff(1, 1), -1.0);
        assert_eq!(p.at_t1(&3.0), vec![8.0, -4.0]);
        assert_eq!(p.eval(&3.0, &0.5), 6.0);
        let z = p.sub(&p);
        assert!(z.is_zero());
        assert_eq!(z.degrees(), None);
    }

    #[test]
    fn degrees_are_tight() {
        let p = BivarPoly::from_grid(vec![vec![1.0, 0.0, 0.0], vec![0.0, 2.0, 0.0], vec![0.0; 3]]);
        assert_eq!(p.degrees(), Some((1, 1)));
        assert_eq!(degree(&[0.0, 1.0, 0.0]), Some(1));
        assert_eq!(degree::<f64>(&[0.0, 0.0]), None);
    }
}
