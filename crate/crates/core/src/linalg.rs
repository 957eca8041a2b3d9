//! Dense row-major matrices and the few kernels the toolkit needs.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Dot product with four accumulators so the loop vectorizes.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let i = c * 4;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut sum = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in chunks * 4..a.len() {
        sum += a[i] * b[i];
    }
    sum
}

/// `y += alpha * x`
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn norm(v: &[f64]) -> f64 {
    libm::sqrt(dot(v, v))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let out_row = &mut out.data[r * other.cols..(r + 1) * other.cols];
            for k in 0..self.cols {
                axpy(self[(r, k)], other.row(k), out_row);
            }
        }
        Ok(out)
    }

    /// `self · x`
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::DimMismatch {
                expected: self.cols,
                found: x.len(),
            });
        }
        Ok((0..self.rows).map(|r| dot(self.row(r), x)).collect())
    }

    pub fn frobenius_distance(&self, other: &Matrix) -> f64 {
        libm::sqrt(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| (a - b) * (a - b))
                .sum(),
        )
    }

    /// Largest absolute entry of `selfᵀ·self − I`.
    pub fn orthogonality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.cols {
            for j in 0..self.cols {
                let mut s = 0.0;
                for r in 0..self.rows {
                    s += self[(r, i)] * self[(r, j)];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max(libm::fabs(s - target));
            }
        }
        worst
    }
}

impl core::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.cols + c]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.cols + c]
    }
}

/// `a = u · diag(s) · vᵀ`
pub struct Svd {
    pub u: Matrix,
    pub singular_values: Vec<f64>,
    pub v: Matrix,
}

const MAX_ITERATIONS: usize = 10_000;

/// Singular value decomposition of a square matrix.
pub fn svd(a: &Matrix) -> Result<Svd> {
    let n = a.cols();
    if a.rows() != n {
        return Err(Error::DimMismatch {
            expected: n,
            found: a.rows(),
        });
    }
    let m = nalgebra::DMatrix::from_row_slice(n, n, a.as_slice());
    let d = m
        .try_svd(true, true, f64::EPSILON, MAX_ITERATIONS)
        .ok_or_else(|| Error::Numeric("SVD did not converge".to_string()))?;
    let (Some(u), Some(v_t)) = (d.u, d.v_t) else {
        return Err(Error::Numeric("SVD factors missing".to_string()));
    };
    if d.singular_values.iter().any(|s| !s.is_finite()) {
        return Err(Error::Numeric("non-finite singular value".to_string()));
    }
    let mut um = Matrix::zeros(n, n);
    let mut vm = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            um[(i, j)] = u[(i, j)];
            vm[(i, j)] = v_t[(j, i)];
        }
    }
    Ok(Svd {
        u: um,
        singular_values: d.singular_values.iter().copied().collect(),
        v: vm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(n: usize, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Matrix::from_vec(
            n,
            n,
            (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect(),
        )
        .unwrap()
    }

    fn reconstruct(svd: &Svd) -> Matrix {
        let n = svd.u.rows();
        let mut us = svd.u.clone();
        for i in 0..n {
            for j in 0..n {
                us[(i, j)] *= svd.singular_values[j];
            }
        }
        us.matmul(&svd.v.transpose()).unwrap()
    }

    #[test]
    fn svd_reconstructs_random_matrices() {
        for (n, seed) in [(1, 1), (2, 2), (5, 3), (17, 4)] {
            let a = random_matrix(n, seed);
            let d = svd(&a).unwrap();
            assert!(reconstruct(&d).frobenius_distance(&a) < 1e-12, "n={n}");
            assert!(d.u.orthogonality_error() < 1e-12);
            assert!(d.v.orthogonality_error() < 1e-12);
        }
    }

    #[test]
    fn svd_of_rank_deficient_matrix_has_orthogonal_u() {
        let mut a = random_matrix(4, 9);
        for i in 0..4 {
            a[(i, 3)] = a[(i, 0)] * 2.0;
            a[(i, 2)] = 0.0;
        }
        let d = svd(&a).unwrap();
        assert!(d.u.orthogonality_error() < 1e-12);
        assert!(reconstruct(&d).frobenius_distance(&a) < 1e-12);
    }

    #[test]
    fn svd_converges_on_hard_matrix() {
        let a = Matrix::from_vec(
            5,
            5,
            vec![
                0.16905400141721838,
                0.8575693700168845,
                0.6558752488319879,
                -0.6720352727516126,
                -0.7334478103311817,
                -0.3087545274611969,
                -0.7914302880332054,
                0.097771668614274,
                -0.22761812392072978,
                -0.9043418059958612,
                0.950772109219467,
                0.29806257372116374,
                0.8168059178883103,
                -0.9692952141687394,
                0.8454563486345443,
                -0.9844074480828073,
                0.7962189851587702,
                -0.2085159647053283,
                -0.016087760320237177,
                -0.979367101409788,
                0.9412259524375437,
                -0.5760262123451851,
                0.9412364473822761,
                -0.56591349390074,
                -0.1983416519082115,
            ],
        )
        .unwrap();
        let d = svd(&a).unwrap();
        assert!(reconstruct(&d).frobenius_distance(&a) < 1e-12);
    }

    #[test]
    fn dot_handles_tails() {
        let a: Vec<f64> = (0..7).map(f64::from).collect();
        assert_eq!(dot(&a, &a), 91.0);
    }
}
