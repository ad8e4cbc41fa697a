//! Dense complex linear algebra.
//!
//! Only what the precoders and the link simulation need: products, Hermitian
//! transposes, regularized Hermitian solves and Gram-form pseudo-inverses.
//! Matrices here are small (tens of rows), so everything is plain loops over
//! a row-major `Vec<Complex64>`.

use std::fmt;
use std::ops::Range;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Cholesky pivots below this fraction of `‖A‖_F` trigger the LU fallback.
const CHOLESKY_PIVOT_TOL: f64 = 1e-12;
/// LU pivots below this fraction of `‖A‖_F` are reported as singular.
const LU_PIVOT_TOL: f64 = 1e-14;

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::shape(
                "ComplexMatrix::new",
                format!("{} entries for a {rows}x{cols} matrix", data.len()),
            ));
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::shape(
                "ComplexMatrix::new",
                format!("non-finite entry at ({}, {})", pos / cols.max(1), pos % cols.max(1)),
            ));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| {
            if r == c {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from real row slices.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::shape("from_real_rows", "ragged rows"));
        }
        let data = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)))
            .collect();
        Self::new(rows.len(), cols, data)
    }

    /// Builds a matrix from complex row vectors.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::shape("from_rows", "ragged rows"));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Conjugate transpose.
    pub fn hermitian(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    /// Matrix product `self · rhs`.
    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::shape(
                "matmul",
                format!("{}x{} times {}x{}", self.rows, self.cols, rhs.rows, rhs.cols),
            ));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (o, b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product `self · x`, written into `out`.
    pub fn matvec_into(&self, x: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        if x.len() != self.cols || out.len() != self.rows {
            return Err(Error::shape(
                "matvec",
                format!(
                    "{}x{} matrix, input length {}, output length {}",
                    self.rows,
                    self.cols,
                    x.len(),
                    out.len()
                ),
            ));
        }
        for (o, row) in out.iter_mut().zip(self.data.chunks_exact(self.cols.max(1))) {
            *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
        Ok(())
    }

    pub fn matvec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        self.matvec_into(x, &mut out)?;
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(Error::shape(
                "sub",
                format!("{:?} minus {:?}", self.shape(), rhs.shape()),
            ));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        })
    }

    /// `self + s·I` for a square matrix.
    pub fn add_scaled_identity(&self, s: f64) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::shape(
                "add_scaled_identity",
                format!("{}x{} is not square", self.rows, self.cols),
            ));
        }
        let mut out = self.clone();
        for i in 0..self.rows {
            out[(i, i)] += s;
        }
        Ok(out)
    }

    pub fn trace(&self) -> Result<Complex64> {
        if !self.is_square() {
            return Err(Error::shape(
                "trace",
                format!("{}x{} is not square", self.rows, self.cols),
            ));
        }
        Ok((0..self.rows).map(|i| self[(i, i)]).sum())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `trace(A A^H)` without forming the product.
    pub fn energy(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Euclidean norm of each row.
    pub fn row_norms(&self) -> Vec<f64> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .collect()
    }

    /// Copy of the given column range.
    pub fn columns(&self, range: Range<usize>) -> Result<Self> {
        if range.start > range.end || range.end > self.cols {
            return Err(Error::shape(
                "columns",
                format!("range {range:?} out of 0..{}", self.cols),
            ));
        }
        let width = range.len();
        Ok(Self::from_fn(self.rows, width, |r, c| self[(r, range.start + c)]))
    }

    /// Copy of the selected rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.rows) {
            return Err(Error::shape(
                "select_rows",
                format!("row {bad} out of 0..{}", self.rows),
            ));
        }
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Ok(Self {
            rows: indices.len(),
            cols: self.cols,
            data,
        })
    }

    /// `[self; lower]`
    pub fn vstack(&self, lower: &Self) -> Result<Self> {
        if self.cols != lower.cols {
            return Err(Error::shape(
                "vstack",
                format!("{} columns over {} columns", self.cols, lower.cols),
            ));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&lower.data);
        Ok(Self {
            rows: self.rows + lower.rows,
            cols: self.cols,
            data,
        })
    }

    /// `[self  right]`
    pub fn hstack(&self, right: &Self) -> Result<Self> {
        if self.rows != right.rows {
            return Err(Error::shape(
                "hstack",
                format!("{} rows beside {} rows", self.rows, right.rows),
            ));
        }
        Ok(Self::from_fn(self.rows, self.cols + right.cols, |r, c| {
            if c < self.cols {
                self[(r, c)]
            } else {
                right[(r, c - self.cols)]
            }
        }))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.data.iter().map(|z| z.norm()).fold(0.0, f64::max))
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

/// Solves `(A + ridge·I) X = B` for Hermitian positive (semi)definite `A`.
///
/// Tries a Cholesky factorization first. If a pivot drops below
/// `1e-12·‖A + ridge·I‖_F` the system is re-solved with partially pivoted LU,
/// which reports [`Error::Singular`] when its own pivots vanish.
pub fn solve_hermitian(a: &ComplexMatrix, b: &ComplexMatrix, ridge: f64) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::shape(
            "solve_hermitian",
            format!("{}x{} is not square", a.rows, a.cols),
        ));
    }
    if a.rows != b.rows {
        return Err(Error::shape(
            "solve_hermitian",
            format!("{}x{} system with {} right-hand rows", a.rows, a.cols, b.rows),
        ));
    }
    if !(ridge >= 0.0) || !ridge.is_finite() {
        return Err(Error::config("ridge", "a finite value >= 0", ridge));
    }
    let m = a.add_scaled_identity(ridge)?;
    match cholesky(&m) {
        Some(l) => Ok(cholesky_solve(&l, b)),
        None => lu_solve(&m, b),
    }
}

/// Lower Cholesky factor, or `None` when a pivot is too small.
fn cholesky(m: &ComplexMatrix) -> Option<ComplexMatrix> {
    let n = m.rows;
    let tol = CHOLESKY_PIVOT_TOL * m.frobenius_norm();
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > tol) {
            return None;
        }
        let ljj = d.sqrt();
        l[(j, j)] = Complex64::new(ljj, 0.0);
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / ljj;
        }
    }
    Some(l)
}

fn cholesky_solve(l: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let n = l.rows;
    let mut x = b.clone();
    for col in 0..b.cols {
        // L y = b
        for i in 0..n {
            let mut s = x[(i, col)];
            for k in 0..i {
                s -= l[(i, k)] * x[(k, col)];
            }
            x[(i, col)] = s / l[(i, i)].re;
        }
        // L^H x = y
        for i in (0..n).rev() {
            let mut s = x[(i, col)];
            for k in i + 1..n {
                s -= l[(k, i)].conj() * x[(k, col)];
            }
            x[(i, col)] = s / l[(i, i)].re;
        }
    }
    x
}

fn lu_solve(m: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = m.rows;
    let tol = LU_PIVOT_TOL * m.frobenius_norm();
    let mut lu = m.clone();
    let mut x = b.clone();
    for k in 0..n {
        let (p, pivot) =
            (k..n)
                .map(|r| (r, lu[(r, k)].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if !(pivot > tol) {
            return Err(Error::Singular {
                pivot: pivot.max(0.0),
                index: k,
            });
        }
        if p != k {
            for c in 0..n {
                let tmp = lu[(k, c)];
                lu[(k, c)] = lu[(p, c)];
                lu[(p, c)] = tmp;
            }
            for c in 0..x.cols {
                let tmp = x[(k, c)];
                x[(k, c)] = x[(p, c)];
                x[(p, c)] = tmp;
            }
        }
        let d = lu[(k, k)];
        for r in k + 1..n {
            let f = lu[(r, k)] / d;
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for c in k..n {
                let v = lu[(k, c)];
                lu[(r, c)] -= f * v;
            }
            for c in 0..x.cols {
                let v = x[(k, c)];
                x[(r, c)] -= f * v;
            }
        }
    }
    for col in 0..x.cols {
        for i in (0..n).rev() {
            let mut s = x[(i, col)];
            for k in i + 1..n {
                s -= lu[(i, k)] * x[(k, col)];
            }
            x[(i, col)] = s / lu[(i, i)];
        }
    }
    Ok(x)
}

/// Moore–Penrose pseudo-inverse of a matrix with full column or row rank.
///
/// Tall and square inputs use `(A^H A)^{-1} A^H`; wide inputs use
/// `A^H (A A^H)^{-1}`. A square input that fails the first route is retried
/// with the second before reporting singularity.
pub fn pseudo_inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let ah = a.hermitian();
    let column_form = || -> Result<ComplexMatrix> {
        let gram = ah.matmul(a)?;
        solve_hermitian(&gram, &ah, 0.0)
    };
    let row_form = || -> Result<ComplexMatrix> {
        let gram = a.matmul(&ah)?;
        // A^H (A A^H)^{-1} = ((A A^H)^{-1} A)^H since A A^H is Hermitian.
        Ok(solve_hermitian(&gram, a, 0.0)?.hermitian())
    };
    if a.rows > a.cols {
        column_form()
    } else if a.rows < a.cols {
        row_form()
    } else {
        column_form().or_else(|_| row_form())
    }
}
