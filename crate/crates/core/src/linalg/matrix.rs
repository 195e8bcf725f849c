//! Dense rational matrices and the exact procedures built on them.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::poly::RationalPoly;
use super::rational::Rational;
use super::LinalgError;
use crate::par;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::Ragged);
        }
        Ok(Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        self.data[i * self.cols + j] = value;
    }

    pub fn add_to(&mut self, i: usize, j: usize, value: &Rational) {
        self.data[i * self.cols + j] += value;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Row sums, in row order.
    pub fn row_sums(&self) -> Vec<Rational> {
        (0..self.rows).map(|i| self.row(i).iter().sum()).collect()
    }

    /// `self - lambda * I`
    pub fn shifted(&self, lambda: &Rational) -> Result<Self, LinalgError> {
        self.require_square()?;
        let mut m = self.clone();
        for i in 0..self.rows {
            m.data[i * self.cols + i] -= lambda;
        }
        Ok(m)
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::DimensionMismatch {
                left: (self.rows, self.cols),
                right: (rhs.rows, rhs.cols),
            });
        }
        let rhs_rows = rhs.sparse_rows();
        let out = par::map_indices(self.rows, |i| {
            let mut acc = vec![Rational::zero(); rhs.cols];
            for (k, a) in self.row(i).iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, b) in &rhs_rows[k] {
                    acc[*j] += a * *b;
                }
            }
            acc
        });
        Ok(Self { rows: self.rows, cols: rhs.cols, data: out.into_iter().flatten().collect() })
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        let columns = self.sparse_columns();
        mul_vec_sparse(&columns, self.rows, v)
    }

    fn sparse_rows(&self) -> Vec<Vec<(usize, &Rational)>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().enumerate().filter(|(_, x)| !x.is_zero()).collect())
            .collect()
    }

    fn sparse_columns(&self) -> Vec<Vec<(usize, &Rational)>> {
        let mut columns = vec![Vec::new(); self.cols];
        for i in 0..self.rows {
            for (j, x) in self.row(i).iter().enumerate() {
                if !x.is_zero() {
                    columns[j].push((i, x));
                }
            }
        }
        columns
    }

    fn require_square(&self) -> Result<(), LinalgError> {
        if self.is_square() {
            Ok(())
        } else {
            Err(LinalgError::NotSquare { rows: self.rows, cols: self.cols })
        }
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

fn mul_vec_sparse(columns: &[Vec<(usize, &Rational)>], rows: usize, v: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); rows];
    for (k, x) in v.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (i, m) in &columns[k] {
            out[*i] += *m * x;
        }
    }
    out
}

/// `∏ (M - root I)` taken left to right in the order given.
pub fn apply_linear_factors(m: &RationalMatrix, roots: &[Rational]) -> Result<RationalMatrix, LinalgError> {
    m.require_square()?;
    let mut acc = RationalMatrix::identity(m.rows);
    for root in roots {
        let prod = acc.mul(m)?;
        acc = RationalMatrix {
            rows: m.rows,
            cols: m.cols,
            data: prod.data.into_iter().zip(&acc.data).map(|(p, a)| p - a * root).collect(),
        };
    }
    Ok(acc)
}

/// Evaluates `p(M)` by Horner's rule.
pub fn evaluate_poly(m: &RationalMatrix, p: &RationalPoly) -> Result<RationalMatrix, LinalgError> {
    m.require_square()?;
    let n = m.rows;
    let mut acc = RationalMatrix::zeros(n, n);
    for c in p.coeffs().iter().rev() {
        acc = acc.mul(m)?;
        for i in 0..n {
            acc.data[i * n + i] += c;
        }
    }
    Ok(acc)
}

/// Monic polynomial of least degree annihilating `v` under `M`.
fn krylov_local_minimal_poly(columns: &[Vec<(usize, &Rational)>], n: usize, start: Vec<Rational>) -> RationalPoly {
    // reduced Krylov vectors with their pivot and their expression in M^i v
    let mut basis: Vec<(usize, Vec<Rational>, Vec<Rational>)> = Vec::new();
    let mut current = start;
    for degree in 0..=n {
        let mut vec = current.clone();
        let mut combo = vec![Rational::zero(); degree + 1];
        combo[degree] = Rational::one();
        for (pivot, reduced, expr) in &basis {
            let factor = vec[*pivot].clone();
            if factor.is_zero() {
                continue;
            }
            for (x, r) in vec.iter_mut().zip(reduced) {
                if !r.is_zero() {
                    *x -= &factor * r;
                }
            }
            for (c, e) in combo.iter_mut().zip(expr) {
                *c -= &factor * e;
            }
        }
        match vec.iter().position(|x| !x.is_zero()) {
            None => return RationalPoly::new(combo),
            Some(pivot) => {
                let inv = vec[pivot].recip();
                let reduced = vec.into_iter().map(|x| x * &inv).collect();
                let expr = combo.into_iter().map(|x| x * &inv).collect();
                basis.push((pivot, reduced, expr));
            }
        }
        current = mul_vec_sparse(columns, n, &current);
    }
    unreachable!("Krylov sequence of length n + 1 is dependent")
}

/// Exact minimal polynomial: least common multiple of the Krylov minimal
/// polynomials of the standard basis vectors.
pub fn minimal_polynomial(m: &RationalMatrix) -> Result<RationalPoly, LinalgError> {
    m.require_square()?;
    let n = m.rows;
    let columns = m.sparse_columns();
    let locals = par::map_indices(n, |j| {
        let mut e = vec![Rational::zero(); n];
        e[j] = Rational::one();
        krylov_local_minimal_poly(&columns, n, e)
    });
    Ok(locals.iter().fold(RationalPoly::one(), |acc, p| acc.lcm(p)))
}

/// Rank by fraction-free elimination over the integers.
pub fn rank(m: &RationalMatrix) -> usize {
    let mut rows: Vec<Vec<BigInt>> = (0..m.rows).map(|i| integer_row(m.row(i))).collect();
    let cols = m.cols;
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let pivot_row = rows[r].clone();
        let pivot = pivot_row[c].clone();
        let below = rows.split_off(r + 1);
        let updated = par::map_slice(&below, |row| {
            let mut out = row.clone();
            let factor = &row[c];
            for j in c + 1..cols {
                let num = &pivot * &row[j] - factor * &pivot_row[j];
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "inexact fraction-free step");
                out[j] = q;
            }
            out[c] = BigInt::zero();
            out
        });
        rows.extend(updated);
        prev = pivot;
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

fn integer_row(row: &[Rational]) -> Vec<BigInt> {
    let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
}

/// Dimension of the nullspace of a square matrix.
pub fn kernel_dimension(m: &RationalMatrix) -> Result<usize, LinalgError> {
    m.require_square()?;
    Ok(m.cols - rank(m))
}
