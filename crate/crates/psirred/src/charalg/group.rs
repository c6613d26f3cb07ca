//! Finitely presented abelian groups of smooth unitary characters.
//!
//! A group is presented as `Z^m / R` where the columns of `R` are relations.
//! Elements are stored in the coordinates of the Smith basis, where the group
//! is a direct sum of cyclic factors `Z/d_i` (with `d_i = 0` meaning `Z`).
//! Equality, orders and 2-torsion coordinates are then read off
//! componentwise.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::snf::{mat_mul, mat_vec, smith_normal_form, IntMatrix};
use crate::error::{invalid, Error, Result};

static NEXT_GROUP_ID: AtomicU64 = AtomicU64::new(1);

/// One generator of a character group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    /// Display name.
    pub name: String,
    /// Order of the generator; `0` means no relation of this form.
    #[serde(default)]
    pub order: u64,
}

/// Declarative description of a character group and its structure maps.
///
/// Matrices act on column vectors of generator coordinates and are given as
/// lists of rows. Every map must be an endomorphism of `Z^m` preserving the
/// relation lattice.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    /// Generators with optional orders.
    pub generators: Vec<GeneratorSpec>,
    /// Additional relations, each a vector of length `m`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub relations: Vec<Vec<i64>>,
    /// Galois conjugation `chi -> chi^c`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub involution: Option<Vec<Vec<i64>>>,
    /// Pullback along the norm, `chi -> chi o N_{E/F}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_pullback: Option<Vec<Vec<i64>>>,
    /// Restriction of characters of `E^x` to `F^x`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restriction: Option<Vec<Vec<i64>>>,
    /// The quadratic character attached to `E/F`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_ef: Option<Vec<i64>>,
}

/// A finitely presented abelian group of smooth unitary characters.
#[derive(Debug, Clone)]
pub struct SmoothCharGroup {
    id: u64,
    spec: GroupSpec,
    /// Kept invariant factors (those different from 1).
    factors: Vec<BigInt>,
    /// Rows of the Smith left transform for the kept factors, reduced.
    to_smith: IntMatrix,
    /// Columns of the inverse transform for the kept factors.
    from_smith: IntMatrix,
    involution: Option<IntMatrix>,
    norm_pullback: Option<IntMatrix>,
    restriction: Option<IntMatrix>,
    omega: Option<SmoothCharacter>,
}

/// An element of a [`SmoothCharGroup`], stored in reduced Smith coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SmoothCharacter {
    group: u64,
    coords: Vec<BigInt>,
}

/// Order of a smooth character.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CharOrder {
    /// Finite order.
    Finite(u64),
    /// Infinite order (or finite but larger than `u64::MAX`).
    Infinite,
}

impl CharOrder {
    /// True if the order divides `n`.
    pub fn divides(self, n: u64) -> bool {
        matches!(self, CharOrder::Finite(k) if n.is_multiple_of(k))
    }
}

fn to_big(m: &[Vec<i64>]) -> IntMatrix {
    m.iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

impl SmoothCharGroup {
    /// Builds and validates a group from its declarative description.
    pub fn new(spec: GroupSpec) -> Result<Self> {
        let m = spec.generators.len();
        let mut cols: Vec<Vec<BigInt>> = Vec::new();
        for (i, g) in spec.generators.iter().enumerate() {
            if g.order > 0 {
                let mut c = vec![BigInt::zero(); m];
                c[i] = BigInt::from(g.order);
                cols.push(c);
            }
        }
        for (k, r) in spec.relations.iter().enumerate() {
            if r.len() != m {
                return invalid(format!(
                    "relation {k} has length {} but the group has {m} generators",
                    r.len()
                ));
            }
            cols.push(r.iter().map(|&x| BigInt::from(x)).collect());
        }
        let k = cols.len();
        let rel: IntMatrix = (0..m)
            .map(|i| cols.iter().map(|c| c[i].clone()).collect())
            .collect();
        let snf = smith_normal_form(&rel, m, k);
        let mut factors = Vec::new();
        let mut to_smith = Vec::new();
        let mut from_cols = Vec::new();
        for i in 0..m {
            let d = snf.diag[i].clone();
            if d.is_one() {
                continue;
            }
            let row: Vec<BigInt> = snf.left[i]
                .iter()
                .map(|x| {
                    if d.is_zero() {
                        x.clone()
                    } else {
                        x.mod_floor(&d)
                    }
                })
                .collect();
            to_smith.push(row);
            from_cols.push(
                (0..m)
                    .map(|r| snf.left_inv[r][i].clone())
                    .collect::<Vec<_>>(),
            );
            factors.push(d);
        }
        let from_smith: IntMatrix = (0..m)
            .map(|r| from_cols.iter().map(|c| c[r].clone()).collect())
            .collect();
        let id = NEXT_GROUP_ID.fetch_add(1, Ordering::Relaxed);
        let mut g = SmoothCharGroup {
            id,
            spec: spec.clone(),
            factors,
            to_smith,
            from_smith,
            involution: None,
            norm_pullback: None,
            restriction: None,
            omega: None,
        };
        g.involution = g.load_map("involution", spec.involution.as_deref(), &cols)?;
        g.norm_pullback = g.load_map("norm_pullback", spec.norm_pullback.as_deref(), &cols)?;
        g.restriction = g.load_map("restriction", spec.restriction.as_deref(), &cols)?;
        if let Some(c) = &g.involution {
            // c o c must be the identity on the group.
            for i in 0..m {
                let mut e = vec![BigInt::zero(); m];
                e[i] = BigInt::one();
                let x = g.element_big(&e);
                let y = g.apply(c, &g.apply(c, &x));
                if x != y {
                    return invalid("involution does not square to the identity modulo relations");
                }
            }
        }
        if let Some(w) = &spec.omega_ef {
            let w = g.element(w)?;
            if g.is_trivial(&w) || !g.order(&w).divides(2) {
                return invalid("omega_ef must be a non-trivial character of order 2");
            }
            g.omega = Some(w);
        }
        Ok(g)
    }

    fn load_map(
        &self,
        name: &str,
        m: Option<&[Vec<i64>]>,
        relation_cols: &[Vec<BigInt>],
    ) -> Result<Option<IntMatrix>> {
        let Some(m) = m else { return Ok(None) };
        let n = self.generator_count();
        if m.len() != n || m.iter().any(|r| r.len() != n) {
            return invalid(format!("{name} must be a {n}x{n} matrix"));
        }
        let big = to_big(m);
        for (k, c) in relation_cols.iter().enumerate() {
            let image = mat_vec(&big, c);
            if !self.is_trivial(&self.element_big(&image)) {
                return invalid(format!(
                    "{name} does not preserve the relation lattice (relation {k})"
                ));
            }
        }
        // Pre-compose with the Smith transforms: smith -> smith.
        let nk = self.factors.len();
        let tmp = mat_mul(&big, &self.from_smith, n, nk);
        let full = mat_mul(&self.to_smith, &tmp, n, nk);
        Ok(Some(full))
    }

    /// Unique identifier of this group instance.
    pub fn id(&self) -> u64 {
        self.id
    }

    /// The declarative description the group was built from.
    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    /// Number of generators `m`.
    pub fn generator_count(&self) -> usize {
        self.spec.generators.len()
    }

    /// Invariant factors different from 1 (0 denotes a free factor).
    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.factors
    }

    /// Whether the group is finite.
    pub fn is_finite(&self) -> bool {
        self.factors.iter().all(|d| !d.is_zero())
    }

    fn reduce(&self, mut coords: Vec<BigInt>) -> Vec<BigInt> {
        for (x, d) in coords.iter_mut().zip(&self.factors) {
            if !d.is_zero() {
                *x = x.mod_floor(d);
            }
        }
        coords
    }

    fn element_big(&self, v: &[BigInt]) -> SmoothCharacter {
        SmoothCharacter {
            group: self.id,
            coords: self.reduce(mat_vec(&self.to_smith, v)),
        }
    }

    /// The element with the given generator coordinates.
    pub fn element(&self, v: &[i64]) -> Result<SmoothCharacter> {
        if v.len() != self.generator_count() {
            return invalid(format!(
                "character has {} coordinates but the group has {} generators",
                v.len(),
                self.generator_count()
            ));
        }
        let v: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        Ok(self.element_big(&v))
    }

    /// The trivial character.
    pub fn trivial(&self) -> SmoothCharacter {
        SmoothCharacter {
            group: self.id,
            coords: vec![BigInt::zero(); self.factors.len()],
        }
    }

    /// The `i`-th generator.
    pub fn generator(&self, i: usize) -> SmoothCharacter {
        let mut e = vec![BigInt::zero(); self.generator_count()];
        e[i] = BigInt::one();
        self.element_big(&e)
    }

    /// The distinguished quadratic character of `E/F`, if declared.
    pub fn omega(&self) -> Option<&SmoothCharacter> {
        self.omega.as_ref()
    }

    /// A representative in generator coordinates.
    pub fn coordinates(&self, a: &SmoothCharacter) -> Vec<BigInt> {
        mat_vec(&self.from_smith, &a.coords)
    }

    fn check(&self, a: &SmoothCharacter) -> Result<()> {
        if a.group == self.id {
            Ok(())
        } else {
            Err(Error::GroupMismatch)
        }
    }

    /// Whether `a` belongs to this group.
    pub fn owns(&self, a: &SmoothCharacter) -> bool {
        a.group == self.id
    }

    /// Product `a * b`.
    pub fn mul(&self, a: &SmoothCharacter, b: &SmoothCharacter) -> Result<SmoothCharacter> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul_unchecked(a, b))
    }

    pub(crate) fn mul_unchecked(
        &self,
        a: &SmoothCharacter,
        b: &SmoothCharacter,
    ) -> SmoothCharacter {
        let coords = a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect();
        SmoothCharacter {
            group: self.id,
            coords: self.reduce(coords),
        }
    }

    /// Power `a^k`.
    pub fn pow(&self, a: &SmoothCharacter, k: &BigInt) -> SmoothCharacter {
        let coords = a.coords.iter().map(|x| x * k).collect();
        SmoothCharacter {
            group: self.id,
            coords: self.reduce(coords),
        }
    }

    /// Inverse `a^{-1}`.
    pub fn inv(&self, a: &SmoothCharacter) -> SmoothCharacter {
        self.pow(a, &-BigInt::one())
    }

    /// Quotient `a * b^{-1}`.
    pub fn div(&self, a: &SmoothCharacter, b: &SmoothCharacter) -> Result<SmoothCharacter> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul_unchecked(a, &self.inv(b)))
    }

    /// Equality in the group (difference lies in the relation lattice).
    pub fn equal(&self, a: &SmoothCharacter, b: &SmoothCharacter) -> Result<bool> {
        self.check(a)?;
        self.check(b)?;
        Ok(a.coords == b.coords)
    }

    /// Whether `a` is the trivial character.
    pub fn is_trivial(&self, a: &SmoothCharacter) -> bool {
        a.coords.iter().all(Zero::is_zero)
    }

    /// Order of `a`.
    pub fn order(&self, a: &SmoothCharacter) -> CharOrder {
        let mut l = BigInt::one();
        for (x, d) in a.coords.iter().zip(&self.factors) {
            if x.is_zero() {
                continue;
            }
            if d.is_zero() {
                return CharOrder::Infinite;
            }
            let o = d / d.gcd(x);
            l = l.lcm(&o);
        }
        l.to_u64().map_or(CharOrder::Infinite, CharOrder::Finite)
    }

    /// Coordinates of a 2-torsion element in the `F_2`-basis of the 2-torsion
    /// subgroup, or `None` if `a^2 != 1`.
    pub fn two_torsion_bits(&self, a: &SmoothCharacter) -> Option<Vec<bool>> {
        let two = BigInt::from(2);
        let mut bits = Vec::new();
        for (x, d) in a.coords.iter().zip(&self.factors) {
            if d.is_zero() || d.is_odd() {
                if !x.is_zero() {
                    return None;
                }
                continue;
            }
            if x.is_zero() {
                bits.push(false);
            } else if (x * &two) == *d {
                bits.push(true);
            } else {
                return None;
            }
        }
        Some(bits)
    }

    /// Number of coordinates returned by [`Self::two_torsion_bits`].
    pub fn two_rank(&self) -> usize {
        self.factors
            .iter()
            .filter(|d| !d.is_zero() && d.is_even())
            .count()
    }

    fn apply(&self, m: &IntMatrix, a: &SmoothCharacter) -> SmoothCharacter {
        SmoothCharacter {
            group: self.id,
            coords: self.reduce(mat_vec(m, &a.coords)),
        }
    }

    fn apply_named(
        &self,
        name: &str,
        m: &Option<IntMatrix>,
        a: &SmoothCharacter,
    ) -> Result<SmoothCharacter> {
        self.check(a)?;
        match m {
            Some(m) => Ok(self.apply(m, a)),
            None => Err(Error::Invalid(format!(
                "the character group declares no {name} map"
            ))),
        }
    }

    /// Galois conjugate `a^c`.
    pub fn conjugate(&self, a: &SmoothCharacter) -> Result<SmoothCharacter> {
        self.apply_named("involution", &self.involution, a)
    }

    /// Norm pullback `a o N_{E/F}`.
    pub fn norm_pullback(&self, a: &SmoothCharacter) -> Result<SmoothCharacter> {
        self.apply_named("norm_pullback", &self.norm_pullback, a)
    }

    /// Restriction `a|_{F^x}`.
    pub fn restrict(&self, a: &SmoothCharacter) -> Result<SmoothCharacter> {
        self.apply_named("restriction", &self.restriction, a)
    }

    /// The character `a^{c-1}: x -> a(conj(x) / x)`.
    pub fn c_minus_one(&self, a: &SmoothCharacter) -> Result<SmoothCharacter> {
        let c = self.conjugate(a)?;
        Ok(self.mul_unchecked(&c, &self.inv(a)))
    }

    /// Human-readable rendering of an element in generator names.
    pub fn describe(&self, a: &SmoothCharacter) -> String {
        let coords = self.coordinates(a);
        let terms: Vec<String> = coords
            .iter()
            .zip(&self.spec.generators)
            .filter(|(x, _)| !x.is_zero())
            .map(|(x, g)| {
                if x.is_one() {
                    g.name.clone()
                } else {
                    format!("{}^{}", g.name, x)
                }
            })
            .collect();
        if terms.is_empty() {
            "1".to_string()
        } else {
            terms.join("*")
        }
    }

    /// Map from generator names to indices.
    pub fn generator_index(&self) -> BTreeMap<&str, usize> {
        self.spec
            .generators
            .iter()
            .enumerate()
            .map(|(i, g)| (g.name.as_str(), i))
            .collect()
    }
}

impl SmoothCharacter {
    /// Identifier of the owning group.
    pub fn group_id(&self) -> u64 {
        self.group
    }

    /// Reduced Smith coordinates (canonical form).
    pub fn smith_coords(&self) -> &[BigInt] {
        &self.coords
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclic(orders: &[u64]) -> SmoothCharGroup {
        SmoothCharGroup::new(GroupSpec {
            generators: orders
                .iter()
                .enumerate()
                .map(|(i, &o)| GeneratorSpec {
                    name: format!("g{i}"),
                    order: o,
                })
                .collect(),
            ..Default::default()
        })
        .unwrap()
    }

    #[test]
    fn z4_order_and_equality() {
        let g = cyclic(&[4]);
        let x = g.element(&[1]).unwrap();
        assert_eq!(g.order(&x), CharOrder::Finite(4));
        assert_eq!(g.order(&g.pow(&x, &2.into())), CharOrder::Finite(2));
        let y = g.pow(&x, &4.into());
        assert!(g.equal(&y, &g.trivial()).unwrap());
        assert_eq!(g.element(&[5]).unwrap(), x);
    }

    #[test]
    fn free_generator_has_infinite_order() {
        let g = cyclic(&[0, 2]);
        assert_eq!(g.order(&g.generator(0)), CharOrder::Infinite);
        assert_eq!(g.order(&g.generator(1)), CharOrder::Finite(2));
    }

    #[test]
    fn relation_identifies_generators() {
        // Z^2 / <(1, -1)> : both generators are equal.
        let g = SmoothCharGroup::new(GroupSpec {
            generators: vec![
                GeneratorSpec {
                    name: "a".into(),
                    order: 0,
                },
                GeneratorSpec {
                    name: "b".into(),
                    order: 0,
                },
            ],
            relations: vec![vec![1, -1]],
            ..Default::default()
        })
        .unwrap();
        assert!(g.equal(&g.generator(0), &g.generator(1)).unwrap());
    }

    #[test]
    fn mismatched_groups_are_rejected() {
        let g = cyclic(&[2]);
        let h = cyclic(&[2]);
        assert_eq!(
            g.equal(&g.generator(0), &h.generator(0)),
            Err(Error::GroupMismatch)
        );
    }

    #[test]
    fn invalid_involution_is_rejected() {
        // Multiplication by 2 on Z/3 squares to 4 = 1 mod 3: fine.
        let ok = SmoothCharGroup::new(GroupSpec {
            generators: vec![GeneratorSpec {
                name: "a".into(),
                order: 3,
            }],
            involution: Some(vec![vec![2]]),
            ..Default::default()
        });
        assert!(ok.is_ok());
        // Multiplication by 2 on Z/5 squares to 4 != 1.
        let bad = SmoothCharGroup::new(GroupSpec {
            generators: vec![GeneratorSpec {
                name: "a".into(),
                order: 5,
            }],
            involution: Some(vec![vec![2]]),
            ..Default::default()
        });
        assert!(bad.is_err());
    }

    #[test]
    fn omega_must_have_order_two() {
        let bad = SmoothCharGroup::new(GroupSpec {
            generators: vec![GeneratorSpec {
                name: "a".into(),
                order: 4,
            }],
            omega_ef: Some(vec![1]),
            ..Default::default()
        });
        assert!(bad.is_err());
        let ok = SmoothCharGroup::new(GroupSpec {
            generators: vec![GeneratorSpec {
                name: "a".into(),
                order: 4,
            }],
            omega_ef: Some(vec![2]),
            ..Default::default()
        });
        assert!(ok.is_ok());
    }

    #[test]
    fn two_torsion_coordinates() {
        let g = cyclic(&[4, 6]);
        // Z/4 x Z/6 = Z/2 x Z/12 : 2-rank 2.
        assert_eq!(g.two_rank(), 2);
        let a = g.element(&[2, 0]).unwrap();
        let b = g.element(&[0, 3]).unwrap();
        let ab = g.mul(&a, &b).unwrap();
        let ba = g.two_torsion_bits(&a).unwrap();
        let bb = g.two_torsion_bits(&b).unwrap();
        let bab = g.two_torsion_bits(&ab).unwrap();
        let xor: Vec<bool> = ba.iter().zip(&bb).map(|(x, y)| x ^ y).collect();
        assert_eq!(xor, bab);
        assert!(g.two_torsion_bits(&g.element(&[1, 0]).unwrap()).is_none());
    }
}
