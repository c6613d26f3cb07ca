//! Small exact linear algebra over the rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Exact rational numbers.
pub type Q = BigRational;

/// Rational from an integer.
pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Rational `n / d`.
pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Converts an integer vector to rationals.
pub fn to_q(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| q(x)).collect()
}

/// Standard dot product.
pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

/// Dot product of a rational vector with an integer vector.
pub fn dot_int(a: &[Q], b: &[i64]) -> Q {
    a.iter()
        .zip(b)
        .filter(|(_, &y)| y != 0)
        .fold(Q::zero(), |acc, (x, &y)| acc + x * q(y))
}

/// Reduced row echelon form in place; returns pivot columns.
fn rref(m: &mut [Vec<Q>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = Q::one() / m[row][col].clone();
        for x in m[row].iter_mut() {
            *x *= &inv;
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..m[r].len() {
                    let t = &m[row][c] * &f;
                    m[r][c] -= t;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    pivots
}

/// Rank of a family of vectors.
pub fn rank(vectors: &[Vec<Q>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let n = vectors[0].len();
    let mut m: Vec<Vec<Q>> = vectors.to_vec();
    rref(&mut m, n).len()
}

/// Finds coefficients `c` with `sum_j c_j cols[j] = target`, assuming the
/// columns are linearly independent. Returns `None` if `target` is not in
/// their span.
pub fn solve_in_span(cols: &[Vec<Q>], target: &[Q]) -> Option<Vec<Q>> {
    let k = cols.len();
    let n = target.len();
    let mut m: Vec<Vec<Q>> = (0..n)
        .map(|i| {
            let mut row: Vec<Q> = cols.iter().map(|c| c[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let pivots = rref(&mut m, k + 1);
    if pivots.contains(&k) {
        return None;
    }
    let mut out = vec![Q::zero(); k];
    for (r, &p) in pivots.iter().enumerate() {
        out[p] = m[r][k].clone();
    }
    Some(out)
}

/// Orthogonal projection of `v` onto the span of `basis` (any spanning set).
pub fn project_onto_span(basis: &[Vec<Q>], v: &[Q]) -> Vec<Q> {
    if basis.is_empty() {
        return vec![Q::zero(); v.len()];
    }
    // Extract an independent subfamily.
    let mut indep: Vec<Vec<Q>> = Vec::new();
    for b in basis {
        let mut trial = indep.clone();
        trial.push(b.clone());
        if rank(&trial) == trial.len() {
            indep = trial;
        }
    }
    let k = indep.len();
    let gram: Vec<Vec<Q>> = (0..k)
        .map(|i| (0..k).map(|j| dot(&indep[i], &indep[j])).collect())
        .collect();
    let rhs: Vec<Q> = indep.iter().map(|b| dot(b, v)).collect();
    let coeffs = solve_in_span(
        &(0..k)
            .map(|j| (0..k).map(|i| gram[i][j].clone()).collect())
            .collect::<Vec<_>>(),
        &rhs,
    )
    .expect("Gram matrix of independent vectors is invertible");
    let mut out = vec![Q::zero(); v.len()];
    for (c, b) in coeffs.iter().zip(&indep) {
        for (o, x) in out.iter_mut().zip(b) {
            *o += c * x;
        }
    }
    out
}
