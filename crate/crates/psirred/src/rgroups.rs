//! `F_2`-linear algebra counting the size `2^r` of R-groups of unitary
//! principal series of the similitude groups `GSO(2n)` and `GSO*(2n)`.
//!
//! Characters of order dividing two are mapped to their coordinates in the
//! `F_2`-basis of the 2-torsion subgroup read off from the Smith form of the
//! character group; the counting problems become kernels of `F_2`-matrices.

use serde::Serialize;

use crate::charalg::{SmoothCharGroup, SmoothCharacter};
use crate::error::{invalid, Result};

/// Largest input size accepted by the brute-force oracles.
pub const BRUTE_FORCE_LIMIT: usize = 20;

/// Rank of a family of `F_2` vectors (all of the same length).
pub fn f2_rank(rows: &[Vec<bool>]) -> usize {
    let mut m: Vec<Vec<bool>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| m[i][c]) else {
            continue;
        };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && m[i][c] {
                let pivot = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot) {
                    *x ^= *y;
                }
            }
        }
        r += 1;
    }
    r
}

/// Basis of the kernel `{x in F_2^k : M x = 0}` of an `F_2` matrix given by
/// rows of length `k`.
pub fn f2_kernel(rows: &[Vec<bool>], k: usize) -> Vec<Vec<bool>> {
    let mut m: Vec<Vec<bool>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..k {
        let Some(p) = (r..m.len()).find(|&i| m[i][c]) else {
            continue;
        };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && m[i][c] {
                let pivot = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot) {
                    *x ^= *y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..k).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![false; k];
            x[f] = true;
            for (row, &pc) in pivots.iter().enumerate() {
                if m[row][f] {
                    x[pc] = true;
                }
            }
            x
        })
        .collect()
}

/// The lexicographically smallest non-empty index set in the span of a
/// kernel basis (exhaustive when the kernel has dimension at most 20).
pub fn min_lex_nonzero(basis: &[Vec<bool>]) -> Option<Vec<usize>> {
    if basis.is_empty() {
        return None;
    }
    let to_idx = |v: &[bool]| -> Vec<usize> {
        v.iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i)
            .collect()
    };
    if basis.len() > BRUTE_FORCE_LIMIT {
        return basis.iter().map(|v| to_idx(v)).min();
    }
    let k = basis[0].len();
    let mut best: Option<Vec<usize>> = None;
    for mask in 1u64..(1u64 << basis.len()) {
        let mut v = vec![false; k];
        for (j, b) in basis.iter().enumerate() {
            if mask >> j & 1 == 1 {
                for (x, y) in v.iter_mut().zip(b) {
                    *x ^= *y;
                }
            }
        }
        let idx = to_idx(&v);
        if best.as_ref().is_none_or(|b| idx < *b) {
            best = Some(idx);
        }
    }
    best
}

/// Result of an R-group count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RGroupCount {
    /// `r` with `|R| = 2^r`.
    pub rank: usize,
    /// Positions (0-based, first occurrence) of the distinct characters used.
    pub considered: Vec<usize>,
    /// A lexicographically minimal non-empty qualifying subset, as positions.
    pub witness: Option<Vec<usize>>,
    /// Rank obtained when the trivial character is excluded from the set, if
    /// that differs from `rank`.
    pub rank_without_trivial: Option<usize>,
}

impl RGroupCount {
    /// `|R| = 2^r` (saturating).
    pub fn size(&self) -> u128 {
        if self.rank >= 128 {
            u128::MAX
        } else {
            1u128 << self.rank
        }
    }
}

/// Positions of the first occurrences of distinct characters satisfying `keep`.
fn distinct_positions(
    chars: &[SmoothCharacter],
    mut keep: impl FnMut(&SmoothCharacter) -> bool,
) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for (i, c) in chars.iter().enumerate() {
        if keep(c) && !out.iter().any(|&j| chars[j] == *c) {
            out.push(i);
        }
    }
    out
}

fn check_group(g: &SmoothCharGroup, chars: &[SmoothCharacter]) -> Result<()> {
    if chars.iter().all(|c| g.owns(c)) {
        Ok(())
    } else {
        Err(crate::Error::GroupMismatch)
    }
}

/// Kernel of `x -> (sum x_i v_i [+ (sum x_i) w], [sum x_i])`: columns are the
/// 2-torsion bit vectors, with an optional parity row.
fn kernel_count(
    columns: &[Vec<bool>],
    bits: usize,
    parity_row: bool,
) -> (usize, Option<Vec<usize>>) {
    let k = columns.len();
    let mut rows: Vec<Vec<bool>> = (0..bits)
        .map(|b| columns.iter().map(|c| c[b]).collect())
        .collect();
    if parity_row {
        rows.push(vec![true; k]);
    }
    let basis = f2_kernel(&rows, k);
    let rank = basis.len();
    (rank, min_lex_nonzero(&basis))
}

fn gso_core(
    g: &SmoothCharGroup,
    chars: &[SmoothCharacter],
    positions: &[usize],
) -> (usize, Option<Vec<usize>>) {
    let cols: Vec<Vec<bool>> = positions
        .iter()
        .map(|&i| g.two_torsion_bits(&chars[i]).expect("2-torsion element"))
        .collect();
    let (rank, w) = kernel_count(&cols, g.two_rank(), true);
    (
        rank,
        w.map(|s| s.into_iter().map(|j| positions[j]).collect()),
    )
}

/// `r` such that `2^r` counts the subsets of `{chi_i : chi_i^2 = 1}` (distinct
/// characters, the trivial character included) of even size with trivial
/// product.
pub fn rgroup_rank_gso(g: &SmoothCharGroup, chars: &[SmoothCharacter]) -> Result<RGroupCount> {
    check_group(g, chars)?;
    let positions = distinct_positions(chars, |c| g.order(c).divides(2));
    let (rank, witness) = gso_core(g, chars, &positions);
    let nontrivial: Vec<usize> = positions
        .iter()
        .copied()
        .filter(|&i| !g.is_trivial(&chars[i]))
        .collect();
    let (rank_nt, _) = gso_core(g, chars, &nontrivial);
    Ok(RGroupCount {
        rank,
        considered: positions,
        witness,
        rank_without_trivial: (rank_nt != rank).then_some(rank_nt),
    })
}

/// Even-size subsets with trivial product of a given set of characters of
/// order dividing two (no filtering): the rank of the solution space.
pub fn even_trivial_product_rank(
    g: &SmoothCharGroup,
    chars: &[SmoothCharacter],
) -> Result<RGroupCount> {
    check_group(g, chars)?;
    if chars.iter().any(|c| !g.order(c).divides(2)) {
        return invalid("all characters must satisfy chi^2 = 1");
    }
    let positions = distinct_positions(chars, |_| true);
    let (rank, witness) = gso_core(g, chars, &positions);
    Ok(RGroupCount {
        rank,
        considered: positions,
        witness,
        rank_without_trivial: None,
    })
}

/// Subsets (of any size) of a set of characters of order dividing two with
/// trivial product: rank 0 means the distinct characters are `F_2`-independent.
pub fn trivial_product_rank(g: &SmoothCharGroup, chars: &[SmoothCharacter]) -> Result<RGroupCount> {
    check_group(g, chars)?;
    if chars.iter().any(|c| !g.order(c).divides(2)) {
        return invalid("all characters must satisfy chi^2 = 1");
    }
    let positions = distinct_positions(chars, |_| true);
    let cols: Vec<Vec<bool>> = positions
        .iter()
        .map(|&i| g.two_torsion_bits(&chars[i]).expect("2-torsion element"))
        .collect();
    let (rank, witness) = kernel_count(&cols, g.two_rank(), false);
    Ok(RGroupCount {
        rank,
        considered: positions.clone(),
        witness: witness.map(|s| s.into_iter().map(|j| positions[j]).collect()),
        rank_without_trivial: None,
    })
}

/// Eligible positions for the `GSO*(2n)` count: distinct `chi_i` with
/// `chi_i^2 = 1` and `(chi_i o N) chi_n^{c-1} != 1`.
pub fn gso_star_eligible(
    g: &SmoothCharGroup,
    chars: &[SmoothCharacter],
    chi_n: &SmoothCharacter,
) -> Result<Vec<usize>> {
    check_group(g, chars)?;
    let w = g.c_minus_one(chi_n)?;
    let mut norms = Vec::with_capacity(chars.len());
    for c in chars {
        norms.push(g.norm_pullback(c)?);
    }
    let mut out: Vec<usize> = Vec::new();
    for (i, c) in chars.iter().enumerate() {
        if !g.order(c).divides(2) {
            continue;
        }
        if g.is_trivial(&g.mul_unchecked(&norms[i], &w)) {
            continue;
        }
        if !out.iter().any(|&j| chars[j] == *c) {
            out.push(i);
        }
    }
    Ok(out)
}

/// Count for `GSO*(2n)`: subsets `S` of the eligible characters with
/// `prod_{i in S} chi_i o N` equal to `chi_n^{1-c}` when `|S|` is odd and to
/// `1` when `|S|` is even. The parity is carried by an auxiliary variable
/// `t = sum x_i`.
pub fn rgroup_rank_gso_star(
    g: &SmoothCharGroup,
    chars: &[SmoothCharacter],
    chi_n: &SmoothCharacter,
) -> Result<RGroupCount> {
    let positions = gso_star_eligible(g, chars, chi_n)?;
    let w = g.c_minus_one(chi_n)?;
    let bits = g.two_rank();
    let mut cols = Vec::with_capacity(positions.len());
    for &i in &positions {
        let n = g.norm_pullback(&chars[i])?;
        cols.push(
            g.two_torsion_bits(&n)
                .expect("norm of a 2-torsion character"),
        );
    }
    let (rank, witness) = match g.two_torsion_bits(&w) {
        Some(wb) => {
            // sum x_i (v_i + w) = 0, with t = sum x_i substituted.
            let shifted: Vec<Vec<bool>> = cols
                .iter()
                .map(|c| c.iter().zip(&wb).map(|(a, b)| a ^ b).collect())
                .collect();
            kernel_count(&shifted, bits, false)
        }
        // chi_n^{1-c} is not 2-torsion: only even subsets can qualify.
        None => kernel_count(&cols, bits, true),
    };
    Ok(RGroupCount {
        rank,
        considered: positions.clone(),
        witness: witness.map(|s| s.into_iter().map(|j| positions[j]).collect()),
        rank_without_trivial: None,
    })
}

/// Brute-force oracle for [`rgroup_rank_gso`]: number of qualifying subsets.
pub fn brute_force_gso(g: &SmoothCharGroup, chars: &[SmoothCharacter]) -> Result<u64> {
    let positions = distinct_positions(chars, |c| g.order(c).divides(2));
    if positions.len() > BRUTE_FORCE_LIMIT {
        return invalid("too many characters for brute force");
    }
    let mut count = 0;
    for mask in 0u64..(1u64 << positions.len()) {
        if mask.count_ones() % 2 != 0 {
            continue;
        }
        let mut prod = g.trivial();
        for (j, &i) in positions.iter().enumerate() {
            if mask >> j & 1 == 1 {
                prod = g.mul(&prod, &chars[i])?;
            }
        }
        if g.is_trivial(&prod) {
            count += 1;
        }
    }
    Ok(count)
}

/// Brute-force oracle for [`rgroup_rank_gso_star`]: number of qualifying subsets.
pub fn brute_force_gso_star(
    g: &SmoothCharGroup,
    chars: &[SmoothCharacter],
    chi_n: &SmoothCharacter,
) -> Result<u64> {
    let positions = gso_star_eligible(g, chars, chi_n)?;
    if positions.len() > BRUTE_FORCE_LIMIT {
        return invalid("too many characters for brute force");
    }
    let one_minus_c = g.inv(&g.c_minus_one(chi_n)?);
    let mut count = 0;
    for mask in 0u64..(1u64 << positions.len()) {
        let mut prod = g.trivial();
        for (j, &i) in positions.iter().enumerate() {
            if mask >> j & 1 == 1 {
                prod = g.mul(&prod, &g.norm_pullback(&chars[i])?)?;
            }
        }
        let target = if mask.count_ones() % 2 == 1 {
            one_minus_c.clone()
        } else {
            g.trivial()
        };
        if g.equal(&prod, &target)? {
            count += 1;
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charalg::{GeneratorSpec, GroupSpec};

    fn group(orders: &[u64]) -> SmoothCharGroup {
        SmoothCharGroup::new(GroupSpec {
            generators: orders
                .iter()
                .enumerate()
                .map(|(i, &o)| GeneratorSpec {
                    name: format!("g{i}"),
                    order: o,
                })
                .collect(),
            involution: Some(
                (0..orders.len())
                    .map(|i| (0..orders.len()).map(|j| i64::from(i == j)).collect())
                    .collect(),
            ),
            norm_pullback: Some(
                (0..orders.len())
                    .map(|i| (0..orders.len()).map(|j| i64::from(i == j)).collect())
                    .collect(),
            ),
            ..Default::default()
        })
        .unwrap()
    }

    #[test]
    fn three_independent_quadratic_characters() {
        let g = group(&[2, 2, 2]);
        let chars: Vec<_> = (0..3).map(|i| g.generator(i)).collect();
        assert_eq!(rgroup_rank_gso(&g, &chars).unwrap().rank, 0);
    }

    #[test]
    fn dependent_triple_gives_rank_one() {
        let g = group(&[2, 2]);
        let a = g.generator(0);
        let b = g.generator(1);
        let ab = g.mul(&a, &b).unwrap();
        // {a, b, ab} has no even subset with trivial product; adding the
        // trivial character creates the subset {1, a, b, ab}.
        let r = rgroup_rank_gso(&g, &[a.clone(), b.clone(), ab.clone()]).unwrap();
        assert_eq!(r.rank, 0);
        let with_one = rgroup_rank_gso(&g, &[g.trivial(), a, b, ab]).unwrap();
        assert_eq!(with_one.rank, 1);
        assert_eq!(with_one.rank_without_trivial, Some(0));
        assert_eq!(with_one.witness, Some(vec![0, 1, 2, 3]));
    }

    #[test]
    fn brute_force_agrees_on_small_example() {
        let g = group(&[2, 2, 4]);
        let chars = vec![
            g.generator(0),
            g.generator(1),
            g.element(&[1, 1, 2]).unwrap(),
            g.element(&[0, 0, 2]).unwrap(),
            g.trivial(),
            g.generator(2),
        ];
        let r = rgroup_rank_gso(&g, &chars).unwrap();
        assert_eq!(1u64 << r.rank, brute_force_gso(&g, &chars).unwrap());
        let chi_n = g.element(&[0, 0, 1]).unwrap();
        let s = rgroup_rank_gso_star(&g, &chars, &chi_n).unwrap();
        assert_eq!(
            1u64 << s.rank,
            brute_force_gso_star(&g, &chars, &chi_n).unwrap()
        );
    }

    #[test]
    fn kernel_and_rank() {
        let rows = vec![vec![true, true, false], vec![false, true, true]];
        assert_eq!(f2_rank(&rows), 2);
        let k = f2_kernel(&rows, 3);
        assert_eq!(k, vec![vec![true, true, true]]);
        assert_eq!(min_lex_nonzero(&k), Some(vec![0, 1, 2]));
    }
}
