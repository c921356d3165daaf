//! Dense matrices and vectors over any [`Scalar`].
//!
//! Everything downstream instantiates these with exact rationals; the
//! algorithms themselves are field-generic.

use std::fmt;
use std::ops::Index;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vector<T> {
    entries: Vec<T>,
}

impl<T: Scalar> Vector<T> {
    pub fn new(entries: Vec<T>) -> Self {
        Self { entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::new(vec![T::zero(); dim])
    }

    pub fn unit(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.entries[k] = T::one();
        v
    }

    pub fn from_i64(values: &[i64]) -> Self {
        Self::new(values.iter().map(|&v| T::from_i64(v)).collect())
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<T> {
        self.entries
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(Scalar::is_integral)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::Shape(format!("vector dims {} and {}", self.dim(), other.dim())));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        ))
    }

    pub fn scale(&self, s: &T) -> Self {
        Self::new(self.entries.iter().map(|a| a.clone() * s.clone()).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.entries.iter().map(|a| -a.clone()).collect())
    }

    pub fn dot(&self, other: &Self) -> Result<T> {
        self.check_dim(other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone()))
    }
}

impl<T> Index<usize> for Vector<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        &self.entries[i]
    }
}

impl<T: fmt::Display> fmt::Display for Vector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    /// Convenience for integer literals in tests and fixtures.
    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&v| T::from_i64(v)).collect())
                .collect(),
        )
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, T::one())
    }

    pub fn scalar(n: usize, s: T) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = s.clone();
        }
        m
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

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.cols.max(1)).map(<[T]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(Scalar::is_integral)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn scale(&self, s: &T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.clone() * s.clone()).collect(),
        }
    }

    fn zip_with(&self, other: &Self, op: impl Fn(T, T) -> T) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape(format!(
                "{}x{} against {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| op(a.clone(), b.clone()))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = T::zero();
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    if a.is_zero() {
                        continue;
                    }
                    acc = acc + a.clone() * other.get(k, j).clone();
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &Vector<T>) -> Result<Vector<T>> {
        if self.cols != v.dim() {
            return Err(Error::Shape(format!(
                "{}x{} times vector of dim {}",
                self.rows,
                self.cols,
                v.dim()
            )));
        }
        Ok(Vector::new(
            (0..self.rows)
                .map(|i| {
                    self.row(i)
                        .iter()
                        .zip(v.entries())
                        .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
                })
                .collect(),
        ))
    }

    fn require_square(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::Shape(format!("{}x{} is not square", self.rows, self.cols)));
        }
        Ok(())
    }

    /// Row of the largest-magnitude nonzero entry in column `col`, at or below `from`.
    fn pivot_row(rows: &[Vec<T>], col: usize, from: usize) -> Option<usize> {
        (from..rows.len())
            .filter(|&r| !rows[r][col].is_zero())
            .max_by(|&a, &b| {
                rows[a][col]
                    .abs()
                    .partial_cmp(&rows[b][col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
    }

    /// Determinant by Bareiss fraction-free elimination.
    pub fn det(&self) -> Result<T> {
        self.require_square()?;
        let n = self.rows;
        if n == 0 {
            return Ok(T::one());
        }
        let mut m = self.to_rows();
        let mut sign = T::one();
        let mut prev = T::one();
        for k in 0..n - 1 {
            let Some(p) = Self::pivot_row(&m, k, k) else {
                return Ok(T::zero());
            };
            if p != k {
                m.swap(p, k);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (m[i][j].clone() * m[k][k].clone() - m[i][k].clone() * m[k][j].clone()) / prev.clone();
                    m[i][j] = v;
                }
                m[i][k] = T::zero();
            }
            prev = m[k][k].clone();
        }
        Ok(sign * m[n - 1][n - 1].clone())
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<Self> {
        self.require_square()?;
        let n = self.rows;
        let mut m = self.to_rows();
        let mut inv = Self::identity(n).to_rows();
        for c in 0..n {
            let p = Self::pivot_row(&m, c, c).ok_or(Error::Singular)?;
            m.swap(p, c);
            inv.swap(p, c);
            let piv = m[c][c].clone();
            for j in 0..n {
                m[c][j] = m[c][j].clone() / piv.clone();
                inv[c][j] = inv[c][j].clone() / piv.clone();
            }
            for r in 0..n {
                if r == c || m[r][c].is_zero() {
                    continue;
                }
                let f = m[r][c].clone();
                for j in 0..n {
                    let a = m[c][j].clone() * f.clone();
                    m[r][j] = m[r][j].clone() - a;
                    let b = inv[c][j].clone() * f.clone();
                    inv[r][j] = inv[r][j].clone() - b;
                }
            }
        }
        Self::from_rows(inv)
    }

    /// Row rank by elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.to_rows();
        if self.rows == 0 {
            return 0;
        }
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = Self::pivot_row(&m, c, rank) else {
                continue;
            };
            m.swap(p, rank);
            for r in rank + 1..self.rows {
                if m[r][c].is_zero() {
                    continue;
                }
                let f = m[r][c].clone() / m[rank][c].clone();
                let (head, tail) = m.split_at_mut(r);
                for (x, p) in tail[0][c..].iter_mut().zip(&head[rank][c..]) {
                    *x = x.clone() - p.clone() * f.clone();
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }

    /// Membership in GL_n(Z): integer entries and determinant ±1.
    pub fn is_gl_n_z(&self) -> bool {
        if !self.is_square() || !self.is_integral() {
            return false;
        }
        match self.det() {
            Ok(d) => d.abs() == T::one(),
            Err(_) => false,
        }
    }
}

impl<T: fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.data[i * self.cols + j])?;
            }
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};
    use crate::{RMatrix, Rational};

    fn m(rows: &[&[i64]]) -> RMatrix {
        RMatrix::from_i64(rows).unwrap()
    }

    /// Cofactor expansion along the first row; independent of the Bareiss path.
    fn cofactor_det(a: &RMatrix) -> Rational {
        let n = a.rows();
        if n == 1 {
            return a.get(0, 0).clone();
        }
        let mut acc = int(0);
        for j in 0..n {
            let minor: Vec<Vec<Rational>> = (1..n)
                .map(|i| (0..n).filter(|&c| c != j).map(|c| a.get(i, c).clone()).collect())
                .collect();
            let term = a.get(0, j).clone() * cofactor_det(&RMatrix::from_rows(minor).unwrap());
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    #[test]
    fn matmul_examples() {
        let shear = m(&[&[1, 1], &[0, 1]]);
        assert_eq!(RMatrix::identity(2).matmul(&shear).unwrap(), shear);
        assert_eq!(shear.matmul(&shear).unwrap(), m(&[&[1, 2], &[0, 1]]));
        let swap = m(&[&[0, 1], &[1, 0]]);
        assert_eq!(swap.matmul(&swap).unwrap(), RMatrix::identity(2));
        assert!(matches!(shear.matmul(&RMatrix::identity(3)), Err(Error::Shape(_))));
    }

    #[test]
    fn det_examples_against_cofactor_oracle() {
        assert_eq!(RMatrix::identity(3).det().unwrap(), int(1));
        let shear = m(&[&[1, 1], &[0, 1]]);
        let refl = m(&[&[-1, 0], &[0, 1]]);
        assert_eq!(cofactor_det(&shear), int(1));
        assert_eq!(shear.det().unwrap(), int(1));
        assert_eq!(cofactor_det(&refl), int(-1));
        assert_eq!(refl.det().unwrap(), int(-1));
        let odd = m(&[&[0, 2, 1], &[3, 0, 5], &[1, 1, 0]]);
        assert_eq!(odd.det().unwrap(), cofactor_det(&odd));
        assert!(matches!(RMatrix::zeros(2, 3).det(), Err(Error::Shape(_))));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(RMatrix::identity(4).inverse().unwrap(), RMatrix::identity(4));
        let shear = m(&[&[1, 1], &[0, 1]]);
        let inv = shear.inverse().unwrap();
        assert_eq!(inv, m(&[&[1, -1], &[0, 1]]));
        assert_eq!(shear.matmul(&inv).unwrap(), RMatrix::identity(2));
        let stretch = m(&[&[2, 0], &[0, 1]]);
        let inv = stretch.inverse().unwrap();
        assert_eq!(*inv.get(0, 0), rat(1, 2));
        assert_eq!(stretch.matmul(&inv).unwrap(), RMatrix::identity(2));
        assert_eq!(m(&[&[1, 2], &[2, 4]]).inverse(), Err(Error::Singular));
    }

    #[test]
    fn gl_n_z_membership() {
        assert!(m(&[&[1, 1], &[0, 1]]).is_gl_n_z());
        assert!(!m(&[&[2, 0], &[0, 1]]).is_gl_n_z());
        assert!(m(&[&[-1, 0], &[0, 1]]).is_gl_n_z());
        let half = RMatrix::from_rows(vec![vec![rat(1, 2), int(0)], vec![int(0), int(2)]]).unwrap();
        assert!(!half.is_gl_n_z());
    }

    #[test]
    fn rank_counts_independent_rows() {
        assert_eq!(m(&[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(m(&[&[1, 0, 0], &[0, 1, 0]]).rank(), 2);
        assert_eq!(RMatrix::zeros(3, 3).rank(), 0);
    }

    #[test]
    fn float_instantiation_agrees() {
        let a = Matrix::<f64>::from_i64(&[&[4, 7], &[2, 6]]).unwrap();
        assert!((a.det().unwrap() - 10.0).abs() < 1e-12);
        let p = a.matmul(&a.inverse().unwrap()).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((p.get(i, j) - want).abs() < 1e-12);
            }
        }
    }
}
