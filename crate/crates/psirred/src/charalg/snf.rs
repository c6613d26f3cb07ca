//! Fraction-free Smith normal form over the integers.
//!
//! The decomposition is computed with arbitrary-precision integers and keeps
//! both unimodular transformation matrices, so that `left * a * right` equals
//! the diagonal form exactly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// A dense integer matrix stored row-major.
pub type IntMatrix = Vec<Vec<BigInt>>;

/// The result of a Smith normal form computation `left * a * right = diag`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    /// Invariant factors `d_0 | d_1 | ...`, padded with zeros to the row count.
    pub diag: Vec<BigInt>,
    /// Unimodular row transformation (rows x rows).
    pub left: IntMatrix,
    /// Inverse of `left`.
    pub left_inv: IntMatrix,
    /// Unimodular column transformation (cols x cols).
    pub right: IntMatrix,
    /// Number of non-zero invariant factors.
    pub rank: usize,
}

/// Returns the `n x n` identity matrix.
pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// Multiplies two dense matrices; `a` is `r x s` and `b` is `s x t`.
pub fn mat_mul(a: &IntMatrix, b: &IntMatrix, inner: usize, cols: usize) -> IntMatrix {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = BigInt::zero();
                    for (l, x) in row.iter().enumerate().take(inner) {
                        if !x.is_zero() {
                            acc += x * &b[l][j];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Multiplies a matrix by a column vector.
pub fn mat_vec(a: &IntMatrix, v: &[BigInt]) -> Vec<BigInt> {
    a.iter()
        .map(|row| {
            let mut acc = BigInt::zero();
            for (x, y) in row.iter().zip(v) {
                if !x.is_zero() && !y.is_zero() {
                    acc += x * y;
                }
            }
            acc
        })
        .collect()
}

struct Work {
    a: IntMatrix,
    left: IntMatrix,
    left_inv: IntMatrix,
    right: IntMatrix,
    rows: usize,
    cols: usize,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        if i != j {
            self.a.swap(i, j);
            self.left.swap(i, j);
            for row in self.left_inv.iter_mut() {
                row.swap(i, j);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i != j {
            for row in self.a.iter_mut() {
                row.swap(i, j);
            }
            for row in self.right.iter_mut() {
                row.swap(i, j);
            }
        }
    }

    /// row_i <- row_i - q * row_j
    fn sub_row(&mut self, i: usize, j: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let t = &self.a[j][c] * q;
            self.a[i][c] -= t;
        }
        for c in 0..self.rows {
            let t = &self.left[j][c] * q;
            self.left[i][c] -= t;
        }
        for r in 0..self.rows {
            let t = &self.left_inv[r][i] * q;
            self.left_inv[r][j] += t;
        }
    }

    /// col_i <- col_i - q * col_j
    fn sub_col(&mut self, i: usize, j: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let t = &self.a[r][j] * q;
            self.a[r][i] -= t;
        }
        for r in 0..self.cols {
            let t = &self.right[r][j] * q;
            self.right[r][i] -= t;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut() {
            *x = -&*x;
        }
        for x in self.left[i].iter_mut() {
            *x = -&*x;
        }
        for row in self.left_inv.iter_mut() {
            row[i] = -&row[i];
        }
    }

    /// Position of a non-zero entry of minimal absolute value in the
    /// lower-right block starting at `t`.
    fn min_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.rows {
            for j in t..self.cols {
                let x = &self.a[i][j];
                if x.is_zero() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if self.a[bi][bj].abs() <= x.abs() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }
}

/// Computes the Smith normal form of an `rows x cols` integer matrix.
///
/// `a` must have exactly `rows` rows of length `cols`; `cols` may be zero.
pub fn smith_normal_form(a: &IntMatrix, rows: usize, cols: usize) -> SmithForm {
    let mut w = Work {
        a: a.clone(),
        left: identity(rows),
        left_inv: identity(rows),
        right: identity(cols),
        rows,
        cols,
    };
    let mut rank = 0;
    for t in 0..rows.min(cols) {
        let Some((pi, pj)) = w.min_pivot(t) else {
            break;
        };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            // Clear column t below the pivot.
            let mut dirty = false;
            for i in (t + 1)..rows {
                if w.a[i][t].is_zero() {
                    continue;
                }
                let q = w.a[i][t].div_floor(&w.a[t][t]);
                w.sub_row(i, t, &q);
                if !w.a[i][t].is_zero() {
                    dirty = true;
                }
            }
            // Clear row t right of the pivot.
            for j in (t + 1)..cols {
                if w.a[t][j].is_zero() {
                    continue;
                }
                let q = w.a[t][j].div_floor(&w.a[t][t]);
                w.sub_col(j, t, &q);
                if !w.a[t][j].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // A smaller remainder exists in row or column t: move it to the pivot.
                let (pi, pj) = w.min_pivot_in_cross(t);
                w.swap_rows(t, pi);
                w.swap_cols(t, pj);
                continue;
            }
            // Enforce divisibility of the remaining block by the pivot.
            let mut fix = None;
            'search: for i in (t + 1)..rows {
                for j in (t + 1)..cols {
                    if !w.a[i][j].is_multiple_of(&w.a[t][t]) {
                        fix = Some(i);
                        break 'search;
                    }
                }
            }
            match fix {
                Some(i) => {
                    // row_t <- row_t + row_i, then continue reducing.
                    w.sub_row(t, i, &-BigInt::one());
                }
                None => break,
            }
        }
        if w.a[t][t].is_negative() {
            w.negate_row(t);
        }
        rank += 1;
    }
    let diag = (0..rows)
        .map(|i| {
            if i < cols {
                w.a[i][i].clone()
            } else {
                BigInt::zero()
            }
        })
        .collect();
    SmithForm {
        diag,
        left: w.left,
        left_inv: w.left_inv,
        right: w.right,
        rank,
    }
}

impl Work {
    /// Minimal non-zero entry among the pivot row and pivot column.
    fn min_pivot_in_cross(&self, t: usize) -> (usize, usize) {
        let mut best = (t, t);
        let mut best_abs = self.a[t][t].abs();
        for i in (t + 1)..self.rows {
            let x = self.a[i][t].abs();
            if !x.is_zero() && x < best_abs {
                best = (i, t);
                best_abs = x;
            }
        }
        for j in (t + 1)..self.cols {
            let x = self.a[t][j].abs();
            if !x.is_zero() && x < best_abs {
                best = (t, j);
                best_abs = x;
            }
        }
        best
    }
}

/// Determinant of a small square integer matrix (Bareiss elimination).
pub fn determinant(m: &IntMatrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(r) = ((k + 1)..n).find(|&r| !a[r][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, r);
            sign = -sign;
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    fn check(a: &IntMatrix, rows: usize, cols: usize) -> SmithForm {
        let s = smith_normal_form(a, rows, cols);
        let prod = mat_mul(&mat_mul(&s.left, a, rows, cols), &s.right, cols, cols);
        for (i, row) in prod.iter().enumerate().take(rows) {
            for (j, x) in row.iter().enumerate().take(cols) {
                let expect = if i == j {
                    s.diag[i].clone()
                } else {
                    BigInt::zero()
                };
                assert_eq!(*x, expect, "entry ({i},{j})");
            }
        }
        for w in s.diag.windows(2) {
            if !w[1].is_zero() {
                assert!(w[1].is_multiple_of(&w[0]));
            }
        }
        assert_eq!(determinant(&s.left).abs(), BigInt::one());
        assert_eq!(mat_mul(&s.left, &s.left_inv, rows, rows), identity(rows));
        if cols > 0 {
            assert_eq!(determinant(&s.right).abs(), BigInt::one());
        }
        s
    }

    #[test]
    fn classic_example() {
        let a = m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = check(&a, 3, 3);
        assert_eq!(s.diag, vec![2.into(), 6.into(), 12.into()]);
    }

    #[test]
    fn non_coprime_orders_merge() {
        // Z/4 x Z/6 = Z/2 x Z/12
        let a = m(&[&[4, 0], &[0, 6]]);
        let s = check(&a, 2, 2);
        assert_eq!(s.diag, vec![2.into(), 12.into()]);
    }

    #[test]
    fn rectangular_and_free_part() {
        let a = m(&[&[2], &[0], &[0]]);
        let s = check(&a, 3, 1);
        assert_eq!(s.diag, vec![2.into(), 0.into(), 0.into()]);
        assert_eq!(s.rank, 1);
        let empty: IntMatrix = vec![vec![]; 2];
        let s = check(&empty, 2, 0);
        assert_eq!(s.rank, 0);
    }

    #[test]
    fn large_entries_do_not_overflow() {
        let big = BigInt::from(i64::MAX) * BigInt::from(i64::MAX);
        let a = vec![
            vec![big.clone(), BigInt::from(3)],
            vec![BigInt::from(7), big.clone() + 1],
        ];
        check(&a, 2, 2);
    }
}
