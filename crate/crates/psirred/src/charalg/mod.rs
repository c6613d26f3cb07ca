//! Exact arithmetic on continuous characters of tori.
//!
//! A character of a torus coordinate is modelled as a product
//! `psi * |.|^s * prod_kappa kappa^{a_kappa}` of
//!
//! * a smooth unitary character `psi`, an element of a finitely presented
//!   abelian group ([`SmoothCharGroup`]);
//! * an unramified twist `|.|^s` with `s` rational (in the normalized
//!   absolute value of the coordinate's own field);
//! * exponents `a_kappa` along the embeddings `kappa` of the field into `C_p`
//!   (the derivative data). Exponents are exact rationals plus an optional
//!   linear combination of symbolic *generic* values, which are treated as
//!   algebraically independent transcendentals (so never integral).
//!
//! Under the declared unitarity of the smooth part this decomposition is
//! unique, so equality of characters is componentwise.

pub mod group;
pub mod snf;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub use group::{CharOrder, GeneratorSpec, GroupSpec, SmoothCharGroup, SmoothCharacter};

use crate::error::{invalid, Error, Result};
use crate::linalg::{q, Q};
use crate::rootdata::{CoordField, Family, RootDatum, Weight, WeylElement};

/// An exponent `c + sum_j q_j x_j` with `x_j` generic symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct AlgExp {
    constant: Q,
    generic: BTreeMap<String, Q>,
}

impl AlgExp {
    /// The zero exponent.
    pub fn zero() -> AlgExp {
        AlgExp::default()
    }

    /// An exact rational exponent.
    pub fn exact(c: Q) -> AlgExp {
        AlgExp {
            constant: c,
            generic: BTreeMap::new(),
        }
    }

    /// A generic (transcendental) exponent with the given symbol name.
    pub fn generic(name: impl Into<String>) -> AlgExp {
        let mut generic = BTreeMap::new();
        generic.insert(name.into(), Q::one());
        AlgExp {
            constant: Q::zero(),
            generic,
        }
    }

    /// Whether the exponent is generic (has a symbolic part).
    pub fn is_generic(&self) -> bool {
        !self.generic.is_empty()
    }

    /// The exact value, if the exponent is not generic.
    pub fn as_rational(&self) -> Option<&Q> {
        if self.generic.is_empty() {
            Some(&self.constant)
        } else {
            None
        }
    }

    /// Whether the exponent is zero.
    pub fn is_zero(&self) -> bool {
        self.generic.is_empty() && self.constant.is_zero()
    }

    /// Whether the exponent is an integer.
    pub fn is_integer(&self) -> bool {
        self.generic.is_empty() && self.constant.is_integer()
    }

    /// Whether the exponent is a non-positive integer.
    pub fn is_nonpositive_integer(&self) -> bool {
        self.is_integer() && !self.constant.is_positive()
    }

    /// Sum of two exponents.
    pub fn add(&self, other: &AlgExp) -> AlgExp {
        let mut out = self.clone();
        out.constant += &other.constant;
        for (k, v) in &other.generic {
            let e = out.generic.entry(k.clone()).or_insert_with(Q::zero);
            *e += v;
        }
        out.generic.retain(|_, v| !v.is_zero());
        out
    }

    /// Scalar multiple.
    pub fn scale(&self, c: &Q) -> AlgExp {
        if c.is_zero() {
            return AlgExp::zero();
        }
        AlgExp {
            constant: &self.constant * c,
            generic: self
                .generic
                .iter()
                .map(|(k, v)| (k.clone(), v * c))
                .collect(),
        }
    }
}

impl fmt::Display for AlgExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.generic.is_empty() {
            return write!(f, "{}", self.constant);
        }
        let mut parts = Vec::new();
        if !self.constant.is_zero() {
            parts.push(self.constant.to_string());
        }
        for (k, v) in &self.generic {
            if v.is_one() {
                parts.push(format!("generic:{k}"));
            } else {
                parts.push(format!("{v}*generic:{k}"));
            }
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// A continuous character of one torus coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoordinateCharacter {
    /// Smooth unitary part.
    pub smooth: SmoothCharacter,
    /// Exponent of the unramified twist `|.|^s`.
    pub unram: Q,
    /// Exponents along the embeddings of the coordinate's field.
    pub alg: Vec<AlgExp>,
}

impl CoordinateCharacter {
    /// The smooth character `psi` (no twist, no derivative).
    pub fn smooth(psi: SmoothCharacter, embeddings: usize) -> CoordinateCharacter {
        CoordinateCharacter {
            smooth: psi,
            unram: Q::zero(),
            alg: vec![AlgExp::zero(); embeddings],
        }
    }

    /// The trivial character.
    pub fn trivial(g: &SmoothCharGroup, embeddings: usize) -> CoordinateCharacter {
        Self::smooth(g.trivial(), embeddings)
    }

    /// The character `psi |.|^s`.
    pub fn twisted(psi: SmoothCharacter, s: Q, embeddings: usize) -> CoordinateCharacter {
        CoordinateCharacter {
            smooth: psi,
            unram: s,
            alg: vec![AlgExp::zero(); embeddings],
        }
    }

    /// Whether all derivative exponents vanish.
    pub fn is_smooth(&self) -> bool {
        self.alg.iter().all(AlgExp::is_zero)
    }

    /// Whether the character is trivial.
    pub fn is_trivial(&self, g: &SmoothCharGroup) -> bool {
        g.is_trivial(&self.smooth) && self.unram.is_zero() && self.is_smooth()
    }

    /// Whether the character equals `|.|^s` exactly.
    pub fn is_abs_power(&self, g: &SmoothCharGroup, s: &Q) -> bool {
        g.is_trivial(&self.smooth) && &self.unram == s && self.is_smooth()
    }

    /// Whether the character equals `|.|^s * prod kappa^{a_kappa}` with all
    /// `a_kappa` non-positive integers (and trivial smooth part and `s = 0`).
    pub fn is_nonpositive_algebraic(&self, g: &SmoothCharGroup) -> bool {
        g.is_trivial(&self.smooth)
            && self.unram.is_zero()
            && self.alg.iter().all(AlgExp::is_nonpositive_integer)
    }

    /// Product of two characters.
    pub fn mul(
        &self,
        g: &SmoothCharGroup,
        other: &CoordinateCharacter,
    ) -> Result<CoordinateCharacter> {
        if self.alg.len() != other.alg.len() {
            return invalid("characters of different coordinate fields cannot be multiplied");
        }
        Ok(CoordinateCharacter {
            smooth: g.mul(&self.smooth, &other.smooth)?,
            unram: &self.unram + &other.unram,
            alg: self
                .alg
                .iter()
                .zip(&other.alg)
                .map(|(a, b)| a.add(b))
                .collect(),
        })
    }

    /// Integer power.
    pub fn pow(&self, g: &SmoothCharGroup, k: i64) -> CoordinateCharacter {
        let kq = q(k);
        CoordinateCharacter {
            smooth: g.pow(&self.smooth, &BigInt::from(k)),
            unram: &self.unram * &kq,
            alg: self.alg.iter().map(|a| a.scale(&kq)).collect(),
        }
    }

    /// Inverse character.
    pub fn inv(&self, g: &SmoothCharGroup) -> CoordinateCharacter {
        self.pow(g, -1)
    }

    /// Quotient `self * other^{-1}`.
    pub fn div(
        &self,
        g: &SmoothCharGroup,
        other: &CoordinateCharacter,
    ) -> Result<CoordinateCharacter> {
        self.mul(g, &other.inv(g))
    }

    /// Whether two characters are equal.
    pub fn equal(&self, g: &SmoothCharGroup, other: &CoordinateCharacter) -> Result<bool> {
        if !g.owns(&self.smooth) || !g.owns(&other.smooth) {
            return Err(Error::GroupMismatch);
        }
        Ok(self == other)
    }

    /// Human-readable rendering.
    pub fn describe(&self, g: &SmoothCharGroup) -> String {
        let mut parts = vec![g.describe(&self.smooth)];
        if !self.unram.is_zero() {
            parts.push(format!("|.|^({})", self.unram));
        }
        if !self.is_smooth() {
            let a: Vec<String> = self.alg.iter().map(|x| x.to_string()).collect();
            parts.push(format!("kappa^({})", a.join(",")));
        }
        parts.join(" * ")
    }
}

/// A continuous character of the torus, one coordinate per torus factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ContinuousCharacter {
    /// Coordinate characters.
    pub coords: Vec<CoordinateCharacter>,
}

impl ContinuousCharacter {
    /// Number of coordinates.
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    /// Whether there are no coordinates.
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Whether every coordinate is smooth.
    pub fn is_smooth(&self) -> bool {
        self.coords.iter().all(CoordinateCharacter::is_smooth)
    }

    /// The smooth unitary parts.
    pub fn smooth_parts(&self) -> Vec<SmoothCharacter> {
        self.coords.iter().map(|c| c.smooth.clone()).collect()
    }
}

/// Number of embeddings `kappa` carried by a coordinate of the given field.
pub fn embedding_count(rd: &RootDatum, field: CoordField) -> usize {
    let d = rd.field().degree as usize;
    match field {
        CoordField::Base => d,
        CoordField::Quadratic => 2 * d,
        CoordField::NormOne | CoordField::Division => 0,
    }
}

/// Validates the shape of a character against a root datum, padding missing
/// derivative exponents with zeros.
pub fn normalize_character(
    rd: &RootDatum,
    g: &SmoothCharGroup,
    mut chi: ContinuousCharacter,
) -> Result<ContinuousCharacter> {
    if chi.len() != rd.rank() {
        return invalid(format!(
            "{} has {} torus coordinates but the character has {}",
            rd.label(),
            rd.rank(),
            chi.len()
        ));
    }
    for (i, (c, &f)) in chi.coords.iter_mut().zip(rd.coord_fields()).enumerate() {
        if !g.owns(&c.smooth) {
            return Err(Error::GroupMismatch);
        }
        let k = embedding_count(rd, f);
        if f == CoordField::NormOne && !c.unram.is_zero() {
            return invalid(format!(
                "coordinate {} lives on the norm-one torus and has no unramified exponent",
                i + 1
            ));
        }
        if c.alg.len() > k {
            if c.alg[k..].iter().any(|a| !a.is_zero()) {
                return invalid(format!(
                    "coordinate {} carries {} derivative exponents but its field has {} embeddings",
                    i + 1,
                    c.alg.len(),
                    k
                ));
            }
            c.alg.truncate(k);
        }
        while c.alg.len() < k {
            c.alg.push(AlgExp::zero());
        }
    }
    Ok(chi)
}

/// The character `chi o c` of `F^x` for an integer cocharacter `c`.
///
/// All coordinates with non-zero coefficient must live over the same field.
pub fn compose_with_cochar(
    rd: &RootDatum,
    g: &SmoothCharGroup,
    chi: &ContinuousCharacter,
    c: &[i64],
) -> Result<CoordinateCharacter> {
    if c.len() != chi.len() {
        return invalid("cocharacter and character have different lengths");
    }
    let mut field: Option<CoordField> = None;
    let mut out: Option<CoordinateCharacter> = None;
    for (i, &ci) in c.iter().enumerate() {
        if ci == 0 {
            continue;
        }
        let f = rd.coord_fields()[i];
        match field {
            None => field = Some(f),
            Some(f0) if f0 != f => {
                return invalid("cocharacter mixes coordinates over different fields")
            }
            _ => {}
        }
        let term = chi.coords[i].pow(g, ci);
        out = Some(match out {
            None => term,
            Some(acc) => acc.mul(g, &term)?,
        });
    }
    Ok(out.unwrap_or_else(|| {
        let k = chi.coords.first().map_or(0, |c| c.alg.len());
        CoordinateCharacter::trivial(g, k)
    }))
}

fn field_degree(rd: &RootDatum, f: CoordField) -> Option<Q> {
    match f {
        CoordField::Base => Some(Q::one()),
        CoordField::Quadratic => Some(q(2)),
        CoordField::Division => match rd.family() {
            Family::GlD { d } => Some(q(i64::from(d))),
            _ => Some(Q::one()),
        },
        CoordField::NormOne => None,
    }
}

/// Multiplies `chi` by `delta_B^power`, where `delta_B` is the modulus
/// character of the Borel subgroup.
///
/// The exponent added to coordinate `i` is `power * (2 rho)_i`, converted to
/// the normalized absolute value of the coordinate's own field.
pub fn twist_by_delta(rd: &RootDatum, chi: &ContinuousCharacter, power: &Q) -> ContinuousCharacter {
    let rho = rd.rho_weighted();
    let scale = q(i64::from(rd.field().restriction_degree()));
    let mut out = chi.clone();
    for ((c, r), &f) in out.coords.iter_mut().zip(&rho).zip(rd.coord_fields()) {
        if let Some(deg) = field_degree(rd, f) {
            c.unram += power * q(2) * r / (&scale * deg);
        }
    }
    out
}

/// The real weight `e(chi)` defined by `|chi(t)|_{C_p} = chi_e(t)`.
///
/// For a coordinate `psi |.|^s prod kappa^{a_kappa}` over `F^x` this is
/// `-s + (sum a_kappa) / [F:Q_p]`: the unramified character `|.|_F`, viewed
/// with `C_p` values, has `|q^{-1}|_{C_p} = q`, while an embedding `kappa`
/// contributes `|x|_F^{1/[F:Q_p]}`.
pub fn e_parameter(rd: &RootDatum, chi: &ContinuousCharacter) -> Result<Weight> {
    let deg = q(i64::from(rd.field().degree));
    let mut out = Vec::with_capacity(chi.len());
    for (i, (c, &f)) in chi.coords.iter().zip(rd.coord_fields()).enumerate() {
        let Some(fd) = field_degree(rd, f) else {
            out.push(Q::zero());
            continue;
        };
        let mut sum = Q::zero();
        for a in &c.alg {
            match a.as_rational() {
                Some(x) => sum += x,
                None => {
                    return invalid(format!(
                        "coordinate {} has a generic derivative exponent; e(chi) is undefined",
                        i + 1
                    ))
                }
            }
        }
        out.push(-(&c.unram) * fd + sum / &deg);
    }
    Ok(out)
}

/// Action of a Weyl group element on a character: `(w chi)` has coordinate
/// `perm[i]` equal to `chi_i` or its sign-twisted conjugate.
pub fn act_on_character(
    rd: &RootDatum,
    g: &SmoothCharGroup,
    w: &WeylElement,
    chi: &ContinuousCharacter,
) -> Result<ContinuousCharacter> {
    let mut coords = chi.coords.clone();
    for (i, c) in chi.coords.iter().enumerate() {
        let img = if w.signs[i] > 0 {
            c.clone()
        } else {
            match rd.coord_fields()[i] {
                CoordField::Base | CoordField::Division | CoordField::NormOne => c.inv(g),
                CoordField::Quadratic => {
                    if !c.is_smooth() {
                        return Err(Error::Unsupported(
                            "Weyl action on non-smooth characters of E^x".into(),
                        ));
                    }
                    let conj = g.conjugate(&c.smooth)?;
                    CoordinateCharacter {
                        smooth: g.inv(&conj),
                        unram: -c.unram.clone(),
                        alg: c.alg.clone(),
                    }
                }
            }
        };
        coords[w.perm[i]] = img;
    }
    Ok(ContinuousCharacter { coords })
}

/// Whether `w chi = chi` as characters of the torus of the group.
///
/// For `SL(n)` the `e_i` coordinates describe a character only up to a
/// common factor, so equality is tested modulo the diagonal.
pub fn weyl_fixes(
    rd: &RootDatum,
    g: &SmoothCharGroup,
    w: &WeylElement,
    chi: &ContinuousCharacter,
) -> Result<bool> {
    let img = act_on_character(rd, g, w, chi)?;
    if rd.family() == Family::Sl {
        let diffs: Vec<CoordinateCharacter> = img
            .coords
            .iter()
            .zip(&chi.coords)
            .map(|(a, b)| a.div(g, b))
            .collect::<Result<_>>()?;
        Ok(diffs.windows(2).all(|p| p[0] == p[1]))
    } else {
        Ok(img == *chi)
    }
}

/// Formats a rational as `p/q` (or `p` for integers).
pub fn fmt_q(x: &Q) -> String {
    x.to_string()
}

/// Parses a rational from `p/q`, `p` or a decimal-free integer string.
pub fn parse_q(s: &str) -> Result<Q> {
    let t = s.trim();
    let parse_int = |x: &str| -> Result<BigInt> {
        x.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Invalid(format!("'{s}' is not a rational of the form p/q")))
    };
    match t.split_once('/') {
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d.is_zero() {
                return invalid(format!("'{s}' has zero denominator"));
            }
            Ok(Q::new(parse_int(n)?, d))
        }
        None => Ok(Q::from_integer(parse_int(t)?)),
    }
}
