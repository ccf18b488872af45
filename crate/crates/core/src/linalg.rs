//! Small dense helpers: fraction-free complex determinants and integer matrices.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Determinant by Bareiss elimination with partial pivoting.
///
/// Every division is exact in exact arithmetic, so integer-valued inputs whose
/// minors stay below 2^53 produce the exact integer determinant.
pub fn det_bareiss(mut a: Vec<Vec<Complex64>>) -> Complex64 {
    let n = a.len();
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut negate = false;
    let mut prev = Complex64::new(1.0, 0.0);
    for k in 0..n - 1 {
        let pivot = (k..n)
            .max_by(|&i, &j| a[i][k].norm().total_cmp(&a[j][k].norm()))
            .unwrap();
        if a[pivot][k].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != k {
            a.swap(pivot, k);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    let det = a[n - 1][n - 1];
    if negate {
        -det
    } else {
        det
    }
}

/// Square integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    n: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        IntMatrix { n, data }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Option<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return None;
        }
        Some(IntMatrix {
            n,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.data.chunks(self.n.max(1)).map(<[i64]>::to_vec).collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == IntMatrix::identity(self.n)
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = IntMatrix { n, data: vec![0; n * n] };
        for i in 0..n {
            for j in 0..n {
                let s = (0..n).map(|t| self.get(i, t) * other.get(t, j)).sum();
                out.set(i, j, s);
            }
        }
        out
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        IntMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// Exact determinant by fraction-free elimination in i128.
    pub fn det(&self) -> i64 {
        let n = self.n;
        if n == 0 {
            return 1;
        }
        let mut a: Vec<Vec<i128>> = self.rows().into_iter().map(|r| r.into_iter().map(i128::from).collect()).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&i| a[i][k] != 0) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
            }
            prev = a[k][k];
        }
        (sign * a[n - 1][n - 1]) as i64
    }

    /// Diagonalizes by unimodular row and column operations: returns `(u, d, v)`
    /// with `u · self · v = diag(d)`.
    pub fn diagonalize(&self) -> (IntMatrix, Vec<i64>, IntMatrix) {
        let n = self.n;
        let mut a = self.clone();
        let mut u = IntMatrix::identity(n);
        let mut v = IntMatrix::identity(n);
        for t in 0..n {
            loop {
                // smallest nonzero entry of the trailing block becomes the pivot
                let mut best: Option<(usize, usize)> = None;
                for i in t..n {
                    for j in t..n {
                        let x = a.get(i, j);
                        if x != 0 && best.is_none_or(|(bi, bj)| x.abs() < a.get(bi, bj).abs()) {
                            best = Some((i, j));
                        }
                    }
                }
                let Some((pi, pj)) = best else {
                    return (u, (0..n).map(|i| a.get(i, i)).collect(), v);
                };
                a.swap_rows(t, pi);
                u.swap_rows(t, pi);
                a.swap_cols(t, pj);
                v.swap_cols(t, pj);
                let p = a.get(t, t);
                let mut clean = true;
                for i in t + 1..n {
                    let q = a.get(i, t).div_euclid(p);
                    if q != 0 {
                        a.add_row(i, t, -q);
                        u.add_row(i, t, -q);
                    }
                    clean &= a.get(i, t) == 0;
                }
                for j in t + 1..n {
                    let q = a.get(t, j).div_euclid(p);
                    if q != 0 {
                        a.add_col(j, t, -q);
                        v.add_col(j, t, -q);
                    }
                    clean &= a.get(t, j) == 0;
                }
                if clean {
                    break;
                }
            }
        }
        (u, (0..n).map(|i| a.get(i, i)).collect(), v)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i != j {
            for c in 0..self.n {
                self.data.swap(i * self.n + c, j * self.n + c);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i != j {
            for r in 0..self.n {
                self.data.swap(r * self.n + i, r * self.n + j);
            }
        }
    }

    /// row_i += q · row_j
    fn add_row(&mut self, i: usize, j: usize, q: i64) {
        for c in 0..self.n {
            let v = self.get(i, c) + q * self.get(j, c);
            self.set(i, c, v);
        }
    }

    /// col_i += q · col_j
    fn add_col(&mut self, i: usize, j: usize, q: i64) {
        for r in 0..self.n {
            let v = self.get(r, i) + q * self.get(r, j);
            self.set(r, i, v);
        }
    }
}
