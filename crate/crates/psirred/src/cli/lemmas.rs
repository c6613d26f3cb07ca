//! Invariant suites exposed through `psirred verify-lemmas`.
//!
//! Each suite checks a structural identity of the library against an
//! independent computation (closed formulas, brute-force enumeration) over
//! all preset groups up to a given torus rank.

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::charalg::{GeneratorSpec, GroupSpec, SmoothCharGroup, SmoothCharacter};
use crate::error::Result;
use crate::linalg::{q, Q};
use crate::rgroups::{
    brute_force_gso, brute_force_gso_star, rgroup_rank_gso, rgroup_rank_gso_star,
};
use crate::rootdata::{build_root_datum, Extension, Family, FieldData, ParabolicSubset, RootDatum};

/// Outcome of one suite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaResult {
    /// Suite name.
    pub name: String,
    /// Number of cases checked.
    pub cases: u64,
    /// Descriptions of failing cases (empty on success).
    pub failures: Vec<String>,
}

impl LemmaResult {
    fn new(name: &str) -> LemmaResult {
        LemmaResult {
            name: name.into(),
            cases: 0,
            failures: Vec::new(),
        }
    }

    /// Whether every case passed.
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.failures.len() < 20 {
            self.failures.push(what());
        }
    }
}

/// Every preset `(family, size)` whose torus has rank at most `max_rank`.
pub fn presets(max_rank: usize) -> Vec<(Family, u32)> {
    let mut v = Vec::new();
    let m = max_rank as u32;
    for n in 1..=m {
        v.push((Family::Gl, n));
        v.push((Family::GlD { d: 2 }, n));
        if n >= 2 {
            v.push((Family::Sl, n));
            v.push((Family::SoEven, 2 * n));
            v.push((Family::SoStar, 2 * n));
        }
        v.push((Family::Sp, 2 * n));
        v.push((Family::SoOdd, 2 * n + 1));
        v.push((Family::UEven, 2 * n));
        if n >= 2 {
            // U(2n-1) has n torus coordinates.
            v.push((Family::UOdd, 2 * n - 1));
        }
    }
    v
}

/// Field data for a preset with restriction of scalars of the given degree.
pub fn preset_field(family: Family, scaling: u32) -> FieldData {
    FieldData {
        p: 3,
        q: 3,
        degree: scaling,
        restriction_of_scalars: scaling > 1,
        extension: family.needs_extension().then_some(Extension { e: 1, f: 2 }),
    }
}

/// Builds every preset root datum up to `max_rank` for the given scaling.
pub fn preset_data(max_rank: usize, scaling: u32) -> Result<Vec<RootDatum>> {
    presets(max_rank)
        .into_iter()
        .map(|(f, s)| build_root_datum(f, s, preset_field(f, scaling)))
        .collect()
}

/// `<rho, alpha^vee> >= n_alpha` for every reduced positive root, with
/// equality exactly for the simple roots.
pub fn rho_lemma(max_rank: usize, scalings: &[u32]) -> Result<LemmaResult> {
    let mut res = LemmaResult::new("rho-pairing");
    for &k in scalings {
        for rd in preset_data(max_rank, k)? {
            let rho = rd.rho_weighted();
            for (r, root) in rd.roots().iter().enumerate() {
                let pair = rd.pairing(&rho, r);
                let n = q(i64::from(root.multiplicity));
                let simple = root.simple_coeffs.iter().sum::<i64>() == 1;
                let ok = pair >= n && ((pair == n) == simple);
                res.check(ok, || {
                    format!(
                        "{} (scaling {k}), root {:?}: <rho, alpha^vee> = {pair}, n_alpha = {n}",
                        rd.label(),
                        root.vector
                    )
                });
            }
        }
    }
    Ok(res)
}

fn factorial(n: u128) -> u128 {
    (1..=n).product()
}

/// Closed-form order of the Weyl group of a preset.
fn weyl_order_formula(rd: &RootDatum) -> u128 {
    let k = rd.simple_roots().len() as u128;
    match rd.family() {
        Family::Gl | Family::Sl | Family::GlD { .. } => factorial(k + 1),
        Family::SoEven => (1u128 << (k - 1)) * factorial(k),
        _ => (1u128 << k) * factorial(k),
    }
}

/// The enumerated Weyl group has the closed-form order, its lengths equal
/// the number of positive roots made negative, and the structural order
/// computation agrees.
pub fn weyl_lemma(max_rank: usize, budget: u64) -> Result<LemmaResult> {
    let mut res = LemmaResult::new("weyl-group");
    for rd in preset_data(max_rank, 1)? {
        if rd.simple_roots().is_empty() {
            continue;
        }
        let expected = weyl_order_formula(&rd);
        res.check(rd.weyl_order(&rd.full_subset()) == expected, || {
            format!("{}: structural order differs from {expected}", rd.label())
        });
        if expected > u128::from(budget) {
            continue;
        }
        let w = rd.weyl_elements(&rd.full_subset(), budget)?;
        res.check(w.elements.len() as u128 == expected, || {
            format!(
                "{}: enumerated {} elements, expected {expected}",
                rd.label(),
                w.elements.len()
            )
        });
        for (x, &l) in w.elements.iter().zip(&w.lengths) {
            let inversions = (0..rd.roots().len())
                .filter(|&r| rd.sends_negative(x, r))
                .count();
            res.check(inversions == l, || {
                format!(
                    "{}: w = {x} has BFS length {l} but {inversions} inversions",
                    rd.label()
                )
            });
        }
    }
    Ok(res)
}

/// For every subset `I` and simple root `alpha` outside `I`: the coroot
/// decomposes with positive `alpha_L^vee` coefficient and non-positive
/// coefficients on the simple coroots of `I`, and `alpha_L` is orthogonal
/// to `I`.
pub fn levi_lemma(max_rank: usize) -> Result<LemmaResult> {
    let mut res = LemmaResult::new("levi-decomposition");
    for rd in preset_data(max_rank, 1)? {
        let k = rd.simple_roots().len();
        for mask in 0u32..(1u32 << k) {
            let subset: ParabolicSubset = (0..k).filter(|i| mask >> i & 1 == 1).collect();
            for (pos, &r) in rd.simple_roots().iter().enumerate() {
                if subset.contains(&pos) {
                    continue;
                }
                let d = rd.coroot_levi_decompose(&subset, r)?;
                let orth = subset.iter().all(|&s| {
                    let beta = &rd.simple_root(s).vector;
                    d.alpha_l
                        .iter()
                        .zip(beta)
                        .fold(Q::zero(), |acc, (a, &b)| acc + a * q(b))
                        .is_zero()
                });
                let ok = d.lambda.is_positive()
                    && d.levi_coeffs.values().all(|c| !c.is_positive())
                    && orth;
                res.check(ok, || {
                    format!(
                        "{}: I = {subset:?}, root {:?}: lambda = {}, coefficients {:?}",
                        rd.label(),
                        rd.roots()[r].vector,
                        d.lambda,
                        d.levi_coeffs
                    )
                });
            }
        }
    }
    Ok(res)
}

/// A random character group together with characters of order dividing
/// two (and some of other orders), for oracle comparisons.
pub struct RandomPresentation {
    /// The group.
    pub group: SmoothCharGroup,
    /// The characters.
    pub chars: Vec<SmoothCharacter>,
    /// A distinguished character for the `GSO*` count.
    pub chi_n: SmoothCharacter,
}

/// Draws a random presentation with at most `max_chars` characters.
pub fn random_presentation(rng: &mut impl Rng, max_chars: usize) -> Result<RandomPresentation> {
    const ORDERS: [u64; 6] = [0, 2, 2, 4, 6, 8];
    let m = rng.gen_range(1..=4);
    let orders: Vec<u64> = (0..m)
        .map(|_| ORDERS[rng.gen_range(0..ORDERS.len())])
        .collect();
    // Involution and norm: signed involutive permutations of generators of
    // equal order preserve the relation lattice.
    let mut perm: Vec<usize> = (0..m).collect();
    for i in 0..m {
        if perm[i] != i {
            continue;
        }
        if let Some(j) = (i + 1..m).find(|&j| perm[j] == j && orders[j] == orders[i]) {
            if rng.gen_bool(0.5) {
                perm.swap(i, j);
            }
        }
    }
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    let matrix = |s: i64| -> Vec<Vec<i64>> {
        (0..m)
            .map(|i| (0..m).map(|j| if perm[i] == j { s } else { 0 }).collect())
            .collect()
    };
    let spec = GroupSpec {
        generators: orders
            .iter()
            .enumerate()
            .map(|(i, &o)| GeneratorSpec {
                name: format!("g{}", i + 1),
                order: o,
            })
            .collect(),
        involution: Some(matrix(sign)),
        norm_pullback: Some(if rng.gen_bool(0.5) {
            matrix(1)
        } else {
            matrix(sign)
        }),
        ..Default::default()
    };
    let group = SmoothCharGroup::new(spec)?;
    let k = rng.gen_range(0..=max_chars);
    let mut chars = Vec::with_capacity(k);
    for _ in 0..k {
        let coords: Vec<i64> = orders
            .iter()
            .map(|&o| {
                if rng.gen_bool(0.85) {
                    // 2-torsion part: o/2 for even o, 0 otherwise.
                    if o != 0 && o % 2 == 0 && rng.gen_bool(0.5) {
                        (o / 2) as i64
                    } else {
                        0
                    }
                } else {
                    rng.gen_range(-3..=3)
                }
            })
            .collect();
        chars.push(group.element(&coords)?);
    }
    let chi_coords: Vec<i64> = orders.iter().map(|_| rng.gen_range(-2..=2)).collect();
    let chi_n = group.element(&chi_coords)?;
    Ok(RandomPresentation {
        group,
        chars,
        chi_n,
    })
}

/// `2^r` equals the brute-force subset count, for both counting problems.
pub fn rgroup_lemma(samples: usize, seed: u64) -> Result<LemmaResult> {
    let mut res = LemmaResult::new("rgroup-oracle");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for sample in 0..samples {
        let p = random_presentation(&mut rng, 12)?;
        let r = rgroup_rank_gso(&p.group, &p.chars)?;
        let b = brute_force_gso(&p.group, &p.chars)?;
        res.check(r.size() == u128::from(b), || {
            format!("sample {sample}: GSO rank {} but {b} subsets", r.rank)
        });
        let r = rgroup_rank_gso_star(&p.group, &p.chars, &p.chi_n)?;
        let b = brute_force_gso_star(&p.group, &p.chars, &p.chi_n)?;
        res.check(r.size() == u128::from(b), || {
            format!("sample {sample}: GSO* rank {} but {b} subsets", r.rank)
        });
    }
    Ok(res)
}

/// All suites.
pub fn run_all(max_rank: usize, budget: u64) -> Result<Vec<LemmaResult>> {
    Ok(vec![
        rho_lemma(max_rank, &[1, 2, 3])?,
        weyl_lemma(max_rank, budget.min(100_000))?,
        levi_lemma(max_rank.min(5))?,
        rgroup_lemma(500, 0x5eed)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        for r in run_all(3, 10_000).unwrap() {
            assert!(r.passed(), "{}: {:?}", r.name, r.failures);
            assert!(r.cases > 0, "{}", r.name);
        }
    }
}
