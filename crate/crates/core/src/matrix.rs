//! Dense row-major matrices and a small symmetric solver.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

// unused when std is linked somewhere in the build
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Stacks equally long rows; an empty iterator yields a `0 x 0` matrix.
    pub fn from_rows<R, I>(rows: I) -> Result<Self>
    where
        R: AsRef<[f64]>,
        I: IntoIterator<Item = R>,
    {
        let mut data = Vec::new();
        let mut n_rows = 0;
        let mut cols = None;
        for row in rows {
            let row = row.as_ref();
            match cols {
                None => cols = Some(row.len()),
                Some(c) if c != row.len() => {
                    return Err(Error::DimensionMismatch {
                        expected: c,
                        got: row.len(),
                    })
                }
                _ => {}
            }
            data.extend_from_slice(row);
            n_rows += 1;
        }
        Ok(Self {
            rows: n_rows,
            cols: cols.unwrap_or(0),
            data,
        })
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
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn column(&self, j: usize) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.rows).map(move |i| self.data[i * self.cols + j])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Concatenates the columns of `self` and `other` row by row.
    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: other.rows,
            });
        }
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        Ok(Matrix {
            rows: self.rows,
            cols,
            data,
        })
    }

    /// Appends the rows of `other` below `self`.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows == 0 {
            return Ok(other.clone());
        }
        if other.rows == 0 {
            return Ok(self.clone());
        }
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.cols,
            });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Solution of a symmetric positive semi-definite system `A x = b`.
#[derive(Debug, Clone)]
pub struct SymmetricSolution {
    pub x: Vec<f64>,
    /// Ratio of the largest to the smallest eigenvalue magnitude; infinite when singular.
    pub condition: f64,
    /// Number of eigenvalues kept as nonzero.
    pub rank: usize,
    /// Condition number over the kept eigenvalues only.
    pub effective_condition: f64,
}

/// Solves `A x = b` for symmetric `A` (row-major, `n x n`) by cyclic Jacobi
/// eigendecomposition.
///
/// Eigenvalues below `n * eps * max_eig` are treated as zero and the solution
/// is the minimum-norm one over the remaining subspace.
pub fn solve_symmetric(a: &[f64], b: &[f64]) -> Result<SymmetricSolution> {
    let n = b.len();
    if a.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            got: a.len(),
        });
    }
    let (eigenvalues, eigenvectors) = jacobi_eigen(a, n);
    let max_abs = eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let min_abs = eigenvalues.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    let condition = if max_abs == 0.0 || min_abs == 0.0 {
        f64::INFINITY
    } else {
        max_abs / min_abs
    };

    // x = V diag(1/lambda) V^T b
    let mut x = vec![0.0; n];
    let mut rank = 0;
    let mut min_kept = f64::INFINITY;
    for k in 0..n {
        let lambda = eigenvalues[k];
        if lambda.abs() <= max_abs * n as f64 * f64::EPSILON || lambda == 0.0 {
            continue;
        }
        rank += 1;
        min_kept = min_kept.min(lambda.abs());
        let proj: f64 = (0..n).map(|i| eigenvectors[i * n + k] * b[i]).sum();
        let coef = proj / lambda;
        for i in 0..n {
            x[i] += coef * eigenvectors[i * n + k];
        }
    }
    let effective_condition = if rank == 0 { f64::INFINITY } else { max_abs / min_kept };
    Ok(SymmetricSolution {
        x,
        condition,
        rank,
        effective_condition,
    })
}

/// Returns eigenvalues and the row-major matrix whose columns are eigenvectors.
fn jacobi_eigen(a: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut m = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum();
        let diag: f64 = (0..n).map(|i| m[i * n + i] * m[i * n + i]).sum();
        if off <= diag * f64::EPSILON * f64::EPSILON || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let eigenvalues = (0..n).map(|i| m[i * n + i]).collect();
    (eigenvalues, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_well_conditioned_system() {
        // [[4,1],[1,3]] x = [1,2] -> x = [1/11, 7/11]
        let sol = solve_symmetric(&[4.0, 1.0, 1.0, 3.0], &[1.0, 2.0]).unwrap();
        assert!((sol.x[0] - 1.0 / 11.0).abs() < 1e-14);
        assert!((sol.x[1] - 7.0 / 11.0).abs() < 1e-14);
        assert!(sol.condition > 1.0 && sol.condition < 10.0);
    }

    #[test]
    fn singular_system_reports_large_condition() {
        let sol = solve_symmetric(&[1.0, 1.0, 1.0, 1.0], &[2.0, 2.0]).unwrap();
        assert!(sol.condition > 1e12);
        // minimum-norm solution over the kept direction (1, 1)
        assert_eq!(sol.rank, 1);
        assert!((sol.effective_condition - 1.0).abs() < 1e-12);
        assert!((sol.x[0] - 1.0).abs() < 1e-12 && (sol.x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn three_by_three_against_hand_solution() {
        // A = [[2,-1,0],[-1,2,-1],[0,-1,2]], x = [1,2,3] -> b = [0,0,4]
        let a = [2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0];
        let sol = solve_symmetric(&a, &[0.0, 0.0, 4.0]).unwrap();
        for (got, want) in sol.x.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn stacking() {
        let a = Matrix::from_rows([[1.0, 2.0], [3.0, 4.0]]).unwrap();
        let b = Matrix::from_rows([[5.0], [6.0]]).unwrap();
        let h = a.hstack(&b).unwrap();
        assert_eq!(h.row(1), &[3.0, 4.0, 6.0]);
        let v = a.vstack(&a).unwrap();
        assert_eq!(v.rows(), 4);
        assert!(a.hstack(&Matrix::zeros(3, 1)).is_err());
        assert!(Matrix::from_rows([vec![1.0], vec![1.0, 2.0]]).is_err());
    }
}
