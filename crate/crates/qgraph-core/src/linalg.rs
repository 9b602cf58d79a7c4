//! Minimal dense linear algebra: LU with partial pivoting for the small
//! square systems produced by the characteristic-matrix assembler (order
//! `2g`, a few dozen at most).

use alloc::vec;
use alloc::vec::Vec;

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: vec![0.0; n * n] }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut m = Matrix::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "rows must form a square matrix");
            m.data[i * n..(i + 1) * n].copy_from_slice(row);
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Determinant via LU with partial pivoting.  Returns 0 when a pivot
    /// vanishes exactly.
    pub fn det(&self) -> f64 {
        let n = self.n;
        if n == 0 {
            return 1.0;
        }
        let mut a = self.data.clone();
        let mut det = 1.0f64;
        for k in 0..n {
            // Pivot: largest magnitude in column k at or below the diagonal.
            let mut p = k;
            let mut best = libm::fabs(a[k * n + k]);
            for i in (k + 1)..n {
                let v = libm::fabs(a[i * n + k]);
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return 0.0;
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                det = -det;
            }
            let pivot = a[k * n + k];
            det *= pivot;
            for i in (k + 1)..n {
                let f = a[i * n + k] / pivot;
                if f != 0.0 {
                    for j in (k + 1)..n {
                        a[i * n + j] -= f * a[k * n + j];
                    }
                }
            }
        }
        det
    }

    /// Solve `self * x = b`.  `None` when the matrix is numerically singular
    /// (zero pivot).
    pub fn solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        let n = self.n;
        assert_eq!(b.len(), n, "right-hand side length must match");
        if n == 0 {
            return Some(Vec::new());
        }
        let mut a = self.data.clone();
        let mut x: Vec<f64> = b.to_vec();
        for k in 0..n {
            let mut p = k;
            let mut best = libm::fabs(a[k * n + k]);
            for i in (k + 1)..n {
                let v = libm::fabs(a[i * n + k]);
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return None;
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                x.swap(k, p);
            }
            let pivot = a[k * n + k];
            for i in (k + 1)..n {
                let f = a[i * n + k] / pivot;
                if f != 0.0 {
                    for j in (k + 1)..n {
                        a[i * n + j] -= f * a[k * n + j];
                    }
                    x[i] -= f * x[k];
                }
            }
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= a[i * n + j] * x[j];
            }
            x[i] = s / a[i * n + i];
        }
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_of_known_matrices() {
        let m = Matrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 3.0]]);
        assert_eq!(m.det(), 6.0);
        let m = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(m.det(), -1.0);
        let m = Matrix::from_rows(&[
            vec![1.0, 2.0, 3.0],
            vec![4.0, 5.0, 6.0],
            vec![7.0, 8.0, 10.0],
        ]);
        assert!((m.det() + 3.0).abs() < 1e-12);
    }

    #[test]
    fn empty_matrix_has_unit_det() {
        assert_eq!(Matrix::zeros(0).det(), 1.0);
    }

    #[test]
    fn solve_round_trip() {
        let m = Matrix::from_rows(&[
            vec![3.0, 1.0, -1.0],
            vec![1.0, -4.0, 2.0],
            vec![2.0, 1.0, 5.0],
        ]);
        let x_true = [1.5, -2.0, 0.25];
        let mut b = [0.0; 3];
        for i in 0..3 {
            for j in 0..3 {
                b[i] += m.get(i, j) * x_true[j];
            }
        }
        let x = m.solve(&b).unwrap();
        for i in 0..3 {
            assert!((x[i] - x_true[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_matrix_detected() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert_eq!(m.det(), 0.0);
        assert!(m.solve(&[1.0, 1.0]).is_none());
    }
}
