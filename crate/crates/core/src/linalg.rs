//! Dense complex linear algebra: LU with partial pivoting, singular values by
//! one-sided Jacobi, and Matrix Market export.

use std::io::Write;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

const MAX_JACOBI_SWEEPS: usize = 80;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("right-hand side has length {actual}, expected {expected}")]
    RhsLength { expected: usize, actual: usize },
    #[error("matrix is singular: zero pivot in column {column}")]
    Singular { column: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
}

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl DenseComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let n = rows.len();
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self { rows: n, cols, data: rows.concat() }
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn conj_transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|a| **a != ZERO).count()
    }

    /// Writes the matrix in Matrix Market coordinate format (complex, general).
    pub fn write_matrix_market<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate complex general")?;
        writeln!(w, "{} {} {}", self.rows, self.cols, self.nnz())?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a != ZERO {
                    writeln!(w, "{} {} {:.17e} {:.17e}", i + 1, j + 1, a.re, a.im)?;
                }
            }
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for DenseComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}

/// `P A = L U` with unit lower-triangular `L`, stored in place.
#[derive(Debug, Clone)]
pub struct LuFactorization {
    lu: DenseComplexMatrix,
    perm: Vec<usize>,
    /// Last nonzero column of each row of `U`.
    row_end: Vec<usize>,
}

impl LuFactorization {
    /// Gaussian elimination with partial pivoting. Zero multipliers are skipped
    /// and row updates stop at the last nonzero of the pivot row, so banded and
    /// block-sparse matrices factor in roughly `O(n b²)`.
    pub fn new(a: &DenseComplexMatrix) -> Result<Self, LinalgError> {
        if !a.is_square() {
            return Err(LinalgError::NotSquare { rows: a.rows, cols: a.cols });
        }
        if a.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut row_end = vec![0; n];
        for k in 0..n {
            let (p, pivot_abs) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot_abs == 0.0 {
                return Err(LinalgError::Singular { column: k });
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let end = (k..n).rev().find(|&j| lu[(k, j)] != ZERO).unwrap_or(k);
            row_end[k] = end;
            let inv_pivot = ONE / lu[(k, k)];
            for i in k + 1..n {
                let a_ik = lu[(i, k)];
                if a_ik == ZERO {
                    continue;
                }
                let l = a_ik * inv_pivot;
                lu[(i, k)] = l;
                let (upper, lower) = lu.data.split_at_mut(i * n);
                let pivot_row = &upper[k * n + k + 1..k * n + end + 1];
                let target = &mut lower[k + 1..end + 1];
                for (t, &u) in target.iter_mut().zip(pivot_row) {
                    *t -= l * u;
                }
            }
        }
        Ok(Self { lu, perm, row_end })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows
    }

    /// `min |u_kk| / max |u_kk|`, a cheap reciprocal-condition indicator.
    pub fn pivot_ratio(&self) -> f64 {
        let d: Vec<f64> = (0..self.dim()).map(|k| self.lu[(k, k)].norm()).collect();
        let max = d.iter().copied().fold(0.0, f64::max);
        let min = d.iter().copied().fold(f64::INFINITY, f64::min);
        if max == 0.0 {
            0.0
        } else {
            min / max
        }
    }

    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>, LinalgError> {
        let n = self.dim();
        if b.len() != n {
            return Err(LinalgError::RhsLength { expected: n, actual: b.len() });
        }
        let mut y: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let mut s = y[i];
            for j in 0..i {
                if row[j] != ZERO {
                    s -= row[j] * y[j];
                }
            }
            y[i] = s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let mut s = y[i];
            for j in i + 1..=self.row_end[i].max(i) {
                s -= row[j] * y[j];
            }
            y[i] = s / row[i];
        }
        Ok(y)
    }
}

pub fn solve_lu(a: &DenseComplexMatrix, b: &[Complex64]) -> Result<Vec<Complex64>, LinalgError> {
    if b.len() != a.rows {
        return Err(LinalgError::RhsLength { expected: a.rows, actual: b.len() });
    }
    LuFactorization::new(a)?.solve(b)
}

/// `‖Ax − b‖ / (‖A‖_F ‖x‖ + ‖b‖)`
pub fn relative_residual(a: &DenseComplexMatrix, x: &[Complex64], b: &[Complex64]) -> f64 {
    let r: Vec<Complex64> = a.matvec(x).iter().zip(b).map(|(ax, b)| ax - b).collect();
    let denom = a.frobenius_norm() * norm2(x) + norm2(b);
    if denom == 0.0 {
        0.0
    } else {
        norm2(&r) / denom
    }
}

/// Singular values in descending order (one-sided Jacobi on the columns).
pub fn singular_values(a: &DenseComplexMatrix) -> Vec<f64> {
    let (m, n) = (a.rows, a.cols);
    // Column-major working copy.
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| (0..m).map(|i| a[(i, j)]).collect()).collect();
    let mut norms: Vec<f64> = cols.iter().map(|c| c.iter().map(Complex64::norm_sqr).sum()).collect();
    let tol = f64::EPSILON * (m.max(1) as f64).sqrt();

    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta) = (norms[p], norms[q]);
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let (left, right) = cols.split_at_mut(q);
                let (u, v) = (&mut left[p], &mut right[0]);
                let gamma: Complex64 = u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                let g = gamma.norm();
                if g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let s_conj_phase = phase.conj() * s;
                let s_phase = phase * s;
                let (mut nu, mut nv) = (0.0, 0.0);
                for (a, b) in u.iter_mut().zip(v.iter_mut()) {
                    let (x, y) = (*a, *b);
                    *a = x * c - y * s_conj_phase;
                    *b = x * s_phase + y * c;
                    nu += a.norm_sqr();
                    nv += b.norm_sqr();
                }
                norms[p] = nu;
                norms[q] = nv;
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = norms.iter().map(|s| s.sqrt()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// `σ_max / σ_min`, infinite for singular matrices.
pub fn cond2(a: &DenseComplexMatrix) -> f64 {
    let sv = singular_values(a);
    match (sv.first(), sv.last()) {
        (Some(&max), Some(&min)) if min > 0.0 => max / min,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}
