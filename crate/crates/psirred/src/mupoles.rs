//! Bookkeeping for the Plancherel density: the product-formula index set,
//! the window for the real reducibility exponent, `G`-regularity, and the
//! candidate pole sets of the rank-one cases.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::charalg::{fmt_q, weyl_fixes, ContinuousCharacter, SmoothCharGroup};
use crate::error::{invalid, Error, Result};
use crate::linalg::{qf, Q};
use crate::rootdata::{ParabolicSubset, RootDatum, WeylElement};

/// Isomorphism classes of rank-one Levi data with a non-trivial pole set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RankOneCase {
    /// Inner forms of `GL_2`; the parameter is the degree `d >= 1`.
    I {
        /// Degree of the division algebra.
        d: u32,
    },
    /// Case ii3.
    Ii3,
    /// Case ii4.
    Ii4,
    /// Case iii1.
    Iii1,
    /// Case iii2.
    Iii2,
    /// Case iv4.
    Iv4,
    /// Case iv5.
    Iv5,
}

impl RankOneCase {
    /// Parses `i`, `ii3`, `ii4`, `iii1`, `iii2`, `iv4` or `iv5`; case `i`
    /// needs `d`.
    pub fn parse(name: &str, d: Option<u32>) -> Result<RankOneCase> {
        Ok(match name {
            "i" => match d {
                Some(d) if d >= 1 => RankOneCase::I { d },
                _ => return invalid("case i requires d >= 1"),
            },
            "ii3" => RankOneCase::Ii3,
            "ii4" => RankOneCase::Ii4,
            "iii1" => RankOneCase::Iii1,
            "iii2" => RankOneCase::Iii2,
            "iv4" => RankOneCase::Iv4,
            "iv5" => RankOneCase::Iv5,
            other => return invalid(format!("unknown rank-one case {other:?}")),
        })
    }

    /// The lattice denominator `k` with all candidate poles in `(1/k) Z`.
    pub fn denominator(self, refined: bool) -> u32 {
        match self {
            RankOneCase::I { d } => 2 * d,
            RankOneCase::Ii3 => 4,
            RankOneCase::Ii4 | RankOneCase::Iii1 => 6,
            RankOneCase::Iii2 | RankOneCase::Iv4 => {
                if refined {
                    10
                } else {
                    20
                }
            }
            RankOneCase::Iv5 => {
                if refined {
                    14
                } else {
                    28
                }
            }
        }
    }
}

impl fmt::Display for RankOneCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankOneCase::I { d } => write!(f, "i(d={d})"),
            RankOneCase::Ii3 => f.write_str("ii3"),
            RankOneCase::Ii4 => f.write_str("ii4"),
            RankOneCase::Iii1 => f.write_str("iii1"),
            RankOneCase::Iii2 => f.write_str("iii2"),
            RankOneCase::Iv4 => f.write_str("iv4"),
            RankOneCase::Iv5 => f.write_str("iv5"),
        }
    }
}

impl FromStr for RankOneCase {
    type Err = Error;

    /// Accepts the bare names, plus `i:D` for case `i`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            Some(("i", d)) => RankOneCase::parse(
                "i",
                Some(
                    d.parse()
                        .map_err(|_| Error::Invalid(format!("bad degree {d:?}")))?,
                ),
            ),
            _ => RankOneCase::parse(s, None),
        }
    }
}

/// Whether `|s| <= 1/2`.
pub fn silberger_window_check(s: &Q) -> bool {
    s.abs() <= qf(1, 2)
}

/// `(1/k) Z` intersected with `[-1/2, 1/2]`.
fn lattice_in_window(k: u32) -> BTreeSet<Q> {
    let k = i64::from(k);
    let m = k / 2;
    (-m..=m).map(|j| qf(j, k)).collect()
}

/// Candidate reducibility exponents `s_0` (symmetric set) for a rank-one case.
pub fn rank1_pole_set(case: RankOneCase, refined: bool) -> BTreeSet<Q> {
    let set: BTreeSet<Q> = match case {
        RankOneCase::I { d } => (1..=d)
            .filter(|e| d % e == 0)
            .flat_map(|e| {
                let x = qf(1, 2 * i64::from(e));
                [x.clone(), -x]
            })
            .collect(),
        RankOneCase::Iii1 => [0, 1, -1, 3, -3].iter().map(|&j| qf(j, 6)).collect(),
        other => lattice_in_window(other.denominator(refined)),
    };
    set.into_iter().filter(silberger_window_check).collect()
}

/// The candidates with `0 <= s_0 <= 1/2`.
pub fn s0_candidates(case: RankOneCase, refined: bool) -> BTreeSet<Q> {
    rank1_pole_set(case, refined)
        .into_iter()
        .filter(|s| !s.is_negative())
        .collect()
}

/// Formats a set of rationals as `["-1/2", ...]` strings.
pub fn fmt_set(set: &BTreeSet<Q>) -> Vec<String> {
    set.iter().map(fmt_q).collect()
}

/// One factor of the product formula: the roots restricting to a common
/// ray of `a_L^*`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MuFactor {
    /// Canonical representative of the ray (first non-zero entry `+-1`).
    pub ray: Vec<String>,
    /// The reduced positive roots restricting to the ray.
    pub roots: Vec<Vec<i64>>,
}

/// Index set of the product formula for the parabolic of `I`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MuFactorization {
    /// Factors grouped by restriction to `A_L`.
    pub factors: Vec<MuFactor>,
    /// Number of reduced positive roots outside `L_I`.
    pub cardinality: usize,
}

/// Reduced positive roots outside `L_I`, grouped by the ray of their
/// restriction to `A_L`.
pub fn mu_factorization(rd: &RootDatum, subset: &ParabolicSubset) -> MuFactorization {
    let mut factors: Vec<(Vec<Q>, Vec<Vec<i64>>)> = Vec::new();
    let mut count = 0;
    for (r, root) in rd.roots().iter().enumerate() {
        if rd.in_levi(r, subset) {
            continue;
        }
        count += 1;
        let v: Vec<Q> = root
            .vector
            .iter()
            .map(|&x| Q::from_integer(x.into()))
            .collect();
        let p = rd.levi_projection(&v, subset);
        let lead = p
            .iter()
            .find(|x| !x.is_zero())
            .map(|x| x.abs())
            .unwrap_or_else(Q::one);
        let ray: Vec<Q> = p.iter().map(|x| x / &lead).collect();
        match factors.iter_mut().find(|(r0, _)| *r0 == ray) {
            Some((_, roots)) => roots.push(root.vector.clone()),
            None => factors.push((ray, vec![root.vector.clone()])),
        }
    }
    MuFactorization {
        factors: factors
            .into_iter()
            .map(|(ray, roots)| MuFactor {
                ray: ray.iter().map(fmt_q).collect(),
                roots,
            })
            .collect(),
        cardinality: count,
    }
}

/// Result of [`is_g_regular`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Regularity {
    /// No non-identity Weyl element fixes the character.
    pub regular: bool,
    /// The first fixing element in enumeration order.
    pub witness: Option<WeylElement>,
}

/// Whether no non-identity element of the Weyl group fixes `chi`.
pub fn is_g_regular(
    rd: &RootDatum,
    g: &SmoothCharGroup,
    chi: &ContinuousCharacter,
    budget: u64,
) -> Result<Regularity> {
    let w = rd.weyl_elements(&rd.full_subset(), budget)?;
    for x in w.elements.iter().filter(|x| !x.is_identity()) {
        if weyl_fixes(rd, g, x, chi)? {
            return Ok(Regularity {
                regular: false,
                witness: Some(x.clone()),
            });
        }
    }
    Ok(Regularity {
        regular: true,
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charalg::{CoordinateCharacter, GeneratorSpec, GroupSpec};
    use crate::linalg::q;
    use crate::rootdata::{build_root_datum, Family, FieldData};

    fn set(v: &[(i64, i64)]) -> BTreeSet<Q> {
        v.iter().map(|&(a, b)| qf(a, b)).collect()
    }

    #[test]
    fn pole_tables() {
        assert_eq!(
            rank1_pole_set(RankOneCase::Iii1, false),
            set(&[(0, 1), (1, 6), (-1, 6), (1, 2), (-1, 2)])
        );
        assert_eq!(
            rank1_pole_set(RankOneCase::I { d: 2 }, false),
            set(&[(1, 2), (-1, 2), (1, 4), (-1, 4)])
        );
        assert_eq!(
            rank1_pole_set(RankOneCase::Ii3, false),
            set(&[(0, 1), (1, 4), (-1, 4), (1, 2), (-1, 2)])
        );
        assert_eq!(s0_candidates(RankOneCase::Iii2, false).len(), 11);
        assert_eq!(s0_candidates(RankOneCase::Iv5, false).len(), 15);
        assert_eq!(rank1_pole_set(RankOneCase::Iv5, true).len(), 15);
    }

    #[test]
    fn window() {
        assert!(silberger_window_check(&q(0)));
        assert!(silberger_window_check(&qf(1, 2)));
        assert!(!silberger_window_check(&qf(3, 4)));
    }

    #[test]
    fn factorization_counts() {
        let a2 = build_root_datum(Family::Gl, 3, FieldData::qp(3)).unwrap();
        assert_eq!(mu_factorization(&a2, &a2.full_subset()).cardinality, 0);
        assert_eq!(
            mu_factorization(&a2, &ParabolicSubset::new()).cardinality,
            3
        );
        let c2 = build_root_datum(Family::Sp, 4, FieldData::qp(3)).unwrap();
        let m = mu_factorization(&c2, &ParabolicSubset::new());
        assert_eq!(m.cardinality, 4);
        assert_eq!(m.factors.len(), 4);
        // Siegel parabolic (I = {e1 - e2}): A_L is one-dimensional, so all
        // three remaining roots restrict to one ray.
        let m = mu_factorization(&c2, &[0].into_iter().collect());
        assert_eq!(m.cardinality, 3);
        assert_eq!(m.factors.len(), 1);
        // Klingen parabolic (I = {2 e2}): e1 -+ e2 and 2 e1 restrict to
        // e1 and 2 e1, again a single ray.
        let m = mu_factorization(&c2, &[1].into_iter().collect());
        assert_eq!(m.cardinality, 3);
        assert_eq!(m.factors.len(), 1);
    }

    #[test]
    fn regularity() {
        let g = SmoothCharGroup::new(GroupSpec {
            generators: vec![GeneratorSpec {
                name: "eta".into(),
                order: 2,
            }],
            ..Default::default()
        })
        .unwrap();
        let gl2 = build_root_datum(Family::Gl, 2, FieldData::qp(3)).unwrap();
        let chi = ContinuousCharacter {
            coords: vec![
                CoordinateCharacter::trivial(&g, 1),
                CoordinateCharacter::smooth(g.generator(0), 1),
            ],
        };
        assert!(is_g_regular(&gl2, &g, &chi, 100).unwrap().regular);
        let chi = ContinuousCharacter {
            coords: vec![CoordinateCharacter::trivial(&g, 1); 2],
        };
        assert!(!is_g_regular(&gl2, &g, &chi, 100).unwrap().regular);
        let sp4 = build_root_datum(Family::Sp, 4, FieldData::qp(3)).unwrap();
        let chi = ContinuousCharacter {
            coords: vec![
                CoordinateCharacter::smooth(g.generator(0), 1),
                CoordinateCharacter::twisted(g.trivial(), qf(1, 3), 1),
            ],
        };
        let r = is_g_regular(&sp4, &g, &chi, 100).unwrap();
        assert_eq!(r.witness.unwrap().to_string(), "[-1,2]");
    }
}
