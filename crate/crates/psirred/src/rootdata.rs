//! Relative root data of the supported group families.
//!
//! All weights and roots are written in the standard coordinates `e_i` of the
//! maximal split torus (one coordinate per torus factor). Weyl groups act by
//! signed permutations of these coordinates.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{dot, dot_int, project_onto_span, q, rank, solve_in_span, to_q, Q};

/// Default upper bound on the number of Weyl group elements enumerated.
pub const DEFAULT_WEYL_BUDGET: u64 = 10_000_000;

/// Environment variable overriding [`DEFAULT_WEYL_BUDGET`].
pub const WEYL_BUDGET_ENV: &str = "PSIRRED_WEYL_BUDGET";

/// Returns the Weyl budget from the environment, or the default.
pub fn weyl_budget_from_env() -> u64 {
    std::env::var(WEYL_BUDGET_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_WEYL_BUDGET)
}

/// Supported group families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    /// `GL(n)`.
    Gl,
    /// `SL(n)`.
    Sl,
    /// `Sp(2n)`.
    Sp,
    /// `SO(2n+1)`.
    SoOdd,
    /// Split `SO(2n)`.
    SoEven,
    /// Quasi-split non-split `SO*(2n)` attached to a quadratic extension.
    SoStar,
    /// Quasi-split unitary group `U(2n)`.
    UEven,
    /// Quasi-split unitary group `U(2n+1)`.
    UOdd,
    /// `GL_n(D)` for a central division algebra `D` of index `d`.
    GlD {
        /// Index of the division algebra.
        d: u32,
    },
}

impl Family {
    /// Whether the group is split over the base field.
    pub fn is_split(self) -> bool {
        matches!(
            self,
            Family::Gl | Family::Sl | Family::Sp | Family::SoOdd | Family::SoEven
        )
    }

    /// Whether the family is one of the classical groups with a dedicated
    /// smooth and Banach criterion (Sp, SO, SO*, U).
    pub fn is_classical(self) -> bool {
        matches!(
            self,
            Family::Sp
                | Family::SoOdd
                | Family::SoEven
                | Family::SoStar
                | Family::UEven
                | Family::UOdd
        )
    }

    /// Whether the family needs a quadratic extension `E/F`.
    pub fn needs_extension(self) -> bool {
        matches!(self, Family::SoStar | Family::UEven | Family::UOdd)
    }

    /// Parses a family name together with the matrix size.
    pub fn from_name(name: &str, size: u32, d: Option<u32>) -> Result<Family> {
        let n = name.trim();
        let fam = match n.to_ascii_lowercase().as_str() {
            "gl" => Family::Gl,
            "sl" => Family::Sl,
            "sp" => Family::Sp,
            "so" => {
                if size % 2 == 1 {
                    Family::SoOdd
                } else {
                    Family::SoEven
                }
            }
            "sostar" | "so*" => Family::SoStar,
            "u" => {
                if size.is_multiple_of(2) {
                    Family::UEven
                } else {
                    Family::UOdd
                }
            }
            "gld" => match d {
                Some(d) if d >= 1 => Family::GlD { d },
                _ => return invalid("family GLD requires an index d >= 1"),
            },
            _ => return invalid(format!("unknown group family '{n}'")),
        };
        Ok(fam)
    }

    /// Short name used in labels.
    pub fn name(self) -> &'static str {
        match self {
            Family::Gl => "GL",
            Family::Sl => "SL",
            Family::Sp => "Sp",
            Family::SoOdd | Family::SoEven => "SO",
            Family::SoStar => "SOstar",
            Family::UEven | Family::UOdd => "U",
            Family::GlD { .. } => "GLD",
        }
    }
}

/// The field over which a torus coordinate lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoordField {
    /// `F^x`.
    Base,
    /// `E^x` for the quadratic extension `E/F`.
    Quadratic,
    /// The norm-one torus `E^1`.
    NormOne,
    /// `D^x` for a division algebra.
    Division,
}

/// A quadratic extension `E/F`, described by ramification and inertia.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Extension {
    /// Ramification index.
    pub e: u32,
    /// Inertia degree.
    pub f: u32,
}

/// The p-adic base field `F` and optional quadratic extension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldData {
    /// Residue characteristic.
    pub p: u64,
    /// Residue field cardinality of `F`.
    pub q: u64,
    /// Degree `[F : Q_p]`.
    #[serde(default = "one_u32")]
    pub degree: u32,
    /// Whether the group is viewed as a `Q_p`-group by restriction of scalars
    /// (root multiplicities are then multiplied by `[F : Q_p]`).
    #[serde(default)]
    pub restriction_of_scalars: bool,
    /// Quadratic extension `E/F`, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extension: Option<Extension>,
}

fn one_u32() -> u32 {
    1
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldData {
    /// A field `F` of degree one over `Q_p` with no extension.
    pub fn qp(p: u64) -> FieldData {
        FieldData {
            p,
            q: p,
            degree: 1,
            restriction_of_scalars: false,
            extension: None,
        }
    }

    /// Validates the arithmetic consistency of the field data.
    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.p) {
            return invalid(format!("p = {} is not prime", self.p));
        }
        if self.degree == 0 {
            return invalid("[F:Q_p] must be positive");
        }
        let mut f = 0u32;
        let mut x = self.q;
        while x > 1 && x.is_multiple_of(self.p) {
            x /= self.p;
            f += 1;
        }
        if x != 1 || f == 0 {
            return invalid(format!("q = {} is not a power of p = {}", self.q, self.p));
        }
        if !self.degree.is_multiple_of(f) {
            return invalid(format!(
                "residue degree {f} does not divide [F:Q_p] = {}",
                self.degree
            ));
        }
        if let Some(ext) = self.extension {
            if ext.e * ext.f != 2 {
                return invalid("a quadratic extension needs e * f = 2");
            }
        }
        Ok(())
    }

    /// Multiplier applied to root multiplicities.
    pub fn restriction_degree(&self) -> u32 {
        if self.restriction_of_scalars {
            self.degree
        } else {
            1
        }
    }
}

/// A reduced positive root with its coroot and multiplicity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Root {
    /// Root in `e_i` coordinates.
    pub vector: Vec<i64>,
    /// Coroot in `e_i` coordinates.
    pub coroot: Vec<i64>,
    /// `n_alpha = dim U_alpha + dim U_{2 alpha}`, scaled by restriction of scalars.
    pub multiplicity: u32,
    /// Whether `2 alpha` is also a root.
    pub doubled: bool,
    /// Coefficients in the basis of simple roots.
    pub simple_coeffs: Vec<i64>,
}

/// A standard parabolic subset, given by indices into the simple roots.
pub type ParabolicSubset = BTreeSet<usize>;

/// A weight in `X^*(Z) (x) Q`, in `e_i` coordinates.
pub type Weight = Vec<Q>;

/// Relative root datum of a group, in `e_i` coordinates.
#[derive(Debug, Clone)]
pub struct RootDatum {
    family: Family,
    size: u32,
    field: FieldData,
    coord_fields: Vec<CoordField>,
    roots: Vec<Root>,
    simple: Vec<usize>,
    index: HashMap<Vec<i64>, usize>,
}

/// A signed permutation: `w(e_i) = signs[i] * e_{perm[i]}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct WeylElement {
    /// Image index of each coordinate.
    pub perm: Vec<usize>,
    /// Sign of each image.
    pub signs: Vec<i8>,
}

impl WeylElement {
    /// The identity on `n` coordinates.
    pub fn identity(n: usize) -> WeylElement {
        WeylElement {
            perm: (0..n).collect(),
            signs: vec![1; n],
        }
    }

    /// Whether this is the identity.
    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p) && self.signs.iter().all(|&s| s == 1)
    }

    /// Composition `self o other`.
    pub fn compose(&self, other: &WeylElement) -> WeylElement {
        let n = self.perm.len();
        let mut perm = vec![0; n];
        let mut signs = vec![1; n];
        for i in 0..n {
            let j = other.perm[i];
            perm[i] = self.perm[j];
            signs[i] = other.signs[i] * self.signs[j];
        }
        WeylElement { perm, signs }
    }

    /// Inverse element.
    pub fn inverse(&self) -> WeylElement {
        let n = self.perm.len();
        let mut perm = vec![0; n];
        let mut signs = vec![1; n];
        for i in 0..n {
            perm[self.perm[i]] = i;
            signs[self.perm[i]] = self.signs[i];
        }
        WeylElement { perm, signs }
    }

    /// Action on an integer vector.
    pub fn act_int(&self, v: &[i64]) -> Vec<i64> {
        let mut out = vec![0; v.len()];
        for i in 0..v.len() {
            out[self.perm[i]] = i64::from(self.signs[i]) * v[i];
        }
        out
    }

    /// Action on a rational vector.
    pub fn act(&self, v: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); v.len()];
        for i in 0..v.len() {
            out[self.perm[i]] = if self.signs[i] < 0 {
                -v[i].clone()
            } else {
                v[i].clone()
            };
        }
        out
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // One-line notation: the image of e_i is listed in position i.
        let parts: Vec<String> = self
            .perm
            .iter()
            .zip(&self.signs)
            .map(|(&p, &s)| {
                if s < 0 {
                    format!("-{}", p + 1)
                } else {
                    format!("{}", p + 1)
                }
            })
            .collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// An enumerated Weyl group together with word lengths.
#[derive(Debug, Clone)]
pub struct WeylEnumeration {
    /// Elements, identity first, in breadth-first order.
    pub elements: Vec<WeylElement>,
    /// Word length of each element in the chosen generators.
    pub lengths: Vec<usize>,
}

fn unit(n: usize, i: usize, c: i64) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = c;
    v
}

fn pair(n: usize, i: usize, a: i64, j: usize, b: i64) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = a;
    v[j] = b;
    v
}

/// Builds the root datum of a family with the given matrix size.
///
/// `size` is the `n` in `GL(n)`, `SL(n)`, `GLD(n,d)`, and the matrix size
/// `2n`, `2n+1` for the symplectic, orthogonal and unitary families.
pub fn build_root_datum(family: Family, size: u32, field: FieldData) -> Result<RootDatum> {
    field.validate()?;
    if family.needs_extension() && field.extension.is_none() {
        return invalid(format!(
            "family {} requires a quadratic extension E/F",
            family.name()
        ));
    }
    let s = size as usize;
    // (kind, rank, coordinate fields)
    let (rank, fields) = match family {
        Family::Gl => {
            if s < 1 {
                return invalid("GL(n) needs n >= 1");
            }
            (s, vec![CoordField::Base; s])
        }
        Family::Sl => {
            if s < 2 {
                return invalid("SL(n) needs n >= 2");
            }
            (s, vec![CoordField::Base; s])
        }
        Family::GlD { .. } => {
            if s < 1 {
                return invalid("GLD(n,d) needs n >= 1");
            }
            (s, vec![CoordField::Division; s])
        }
        Family::Sp => {
            if s < 2 || !s.is_multiple_of(2) {
                return invalid("Sp(2n) needs an even size >= 2");
            }
            (s / 2, vec![CoordField::Base; s / 2])
        }
        Family::SoOdd => {
            if s < 3 {
                return invalid("SO(2n+1) needs size >= 3");
            }
            (s / 2, vec![CoordField::Base; s / 2])
        }
        Family::SoEven => {
            if s < 4 {
                return invalid("SO(2n) needs size >= 4");
            }
            (s / 2, vec![CoordField::Base; s / 2])
        }
        Family::SoStar => {
            if s < 4 || !s.is_multiple_of(2) {
                return invalid("SOstar(2n) needs an even size >= 4");
            }
            let n = s / 2;
            let mut f = vec![CoordField::Base; n - 1];
            f.push(CoordField::NormOne);
            (n, f)
        }
        Family::UEven => {
            if s < 2 {
                return invalid("U(2n) needs size >= 2");
            }
            (s / 2, vec![CoordField::Quadratic; s / 2])
        }
        Family::UOdd => {
            if s < 3 {
                return invalid("U(2n+1) needs size >= 3");
            }
            let n = s / 2;
            let mut f = vec![CoordField::Quadratic; n];
            f.push(CoordField::NormOne);
            (n + 1, f)
        }
    };
    let scale = field.restriction_degree();
    let mut roots: Vec<(Vec<i64>, Vec<i64>, u32, bool)> = Vec::new();
    let mut simple_vectors: Vec<Vec<i64>> = Vec::new();
    // Number of coordinates carrying roots.
    let r = match family {
        Family::SoStar => rank - 1,
        Family::UOdd => rank - 1,
        _ => rank,
    };
    let short_mult: u32 = match family {
        Family::UEven | Family::UOdd => 2,
        Family::GlD { d } => d * d,
        _ => 1,
    };
    // Roots e_i - e_j (all families), e_i + e_j (all but type A).
    for i in 0..r {
        for j in (i + 1)..r {
            let v = pair(rank, i, 1, j, -1);
            roots.push((v.clone(), v, short_mult, false));
        }
    }
    let type_a = matches!(family, Family::Gl | Family::Sl | Family::GlD { .. });
    if !type_a {
        for i in 0..r {
            for j in (i + 1)..r {
                let v = pair(rank, i, 1, j, 1);
                roots.push((v.clone(), v, short_mult, false));
            }
        }
        for i in 0..r {
            match family {
                Family::Sp => roots.push((unit(rank, i, 2), unit(rank, i, 1), 1, false)),
                Family::UEven => roots.push((unit(rank, i, 2), unit(rank, i, 1), 1, false)),
                Family::SoOdd => roots.push((unit(rank, i, 1), unit(rank, i, 2), 1, false)),
                Family::SoStar => roots.push((unit(rank, i, 1), unit(rank, i, 2), 2, false)),
                Family::UOdd => roots.push((unit(rank, i, 1), unit(rank, i, 2), 3, true)),
                _ => {}
            }
        }
    }
    for i in 0..r.saturating_sub(1) {
        simple_vectors.push(pair(rank, i, 1, i + 1, -1));
    }
    if r >= 1 {
        match family {
            Family::Sp | Family::UEven => simple_vectors.push(unit(rank, r - 1, 2)),
            Family::SoOdd | Family::SoStar | Family::UOdd => {
                simple_vectors.push(unit(rank, r - 1, 1))
            }
            Family::SoEven => simple_vectors.push(pair(rank, r - 2, 1, r - 1, 1)),
            _ => {}
        }
    }
    let simple_q: Vec<Vec<Q>> = simple_vectors.iter().map(|v| to_q(v)).collect();
    let mut out = Vec::new();
    let mut index = HashMap::new();
    for (k, (v, c, m, doubled)) in roots.into_iter().enumerate() {
        let coeffs = solve_in_span(&simple_q, &to_q(&v))
            .ok_or_else(|| Error::Invariant(format!("root {v:?} not in span of simple roots")))?;
        let coeffs: Vec<i64> = coeffs
            .iter()
            .map(|x| {
                if x.is_integer() && !x.is_negative() {
                    Ok(x.to_integer().try_into().unwrap_or(i64::MAX))
                } else {
                    Err(Error::Invariant(format!(
                        "root {v:?} has non-integral simple expansion"
                    )))
                }
            })
            .collect::<Result<_>>()?;
        index.insert(v.clone(), k);
        out.push(Root {
            vector: v,
            coroot: c,
            multiplicity: m * scale,
            doubled,
            simple_coeffs: coeffs,
        });
    }
    let simple = simple_vectors.iter().map(|v| index[v]).collect::<Vec<_>>();
    Ok(RootDatum {
        family,
        size,
        field,
        coord_fields: fields,
        roots: out,
        simple,
        index,
    })
}

impl RootDatum {
    /// The family of the group.
    pub fn family(&self) -> Family {
        self.family
    }

    /// The matrix size parameter.
    pub fn size(&self) -> u32 {
        self.size
    }

    /// Human-readable label such as `Sp(4)`.
    pub fn label(&self) -> String {
        match self.family {
            Family::GlD { d } => format!("GLD({},{})", self.size, d),
            f => format!("{}({})", f.name(), self.size),
        }
    }

    /// Base and extension fields.
    pub fn field(&self) -> &FieldData {
        &self.field
    }

    /// Number of torus coordinates.
    pub fn rank(&self) -> usize {
        self.coord_fields.len()
    }

    /// Field of each torus coordinate.
    pub fn coord_fields(&self) -> &[CoordField] {
        &self.coord_fields
    }

    /// Reduced positive roots.
    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    /// All positive roots, including the non-reduced `2 alpha`.
    pub fn all_positive_roots(&self) -> Vec<Vec<i64>> {
        let mut v: Vec<Vec<i64>> = self.roots.iter().map(|r| r.vector.clone()).collect();
        for r in &self.roots {
            if r.doubled {
                v.push(r.vector.iter().map(|x| 2 * x).collect());
            }
        }
        v
    }

    /// Indices of the simple roots into [`Self::roots`], in Dynkin order.
    pub fn simple_roots(&self) -> &[usize] {
        &self.simple
    }

    /// The simple root with the given position in Dynkin order.
    pub fn simple_root(&self, k: usize) -> &Root {
        &self.roots[self.simple[k]]
    }

    /// The full set of simple-root positions.
    pub fn full_subset(&self) -> ParabolicSubset {
        (0..self.simple.len()).collect()
    }

    /// Index of a reduced positive root given by its vector.
    pub fn root_index(&self, v: &[i64]) -> Option<usize> {
        self.index.get(v).copied()
    }

    /// Sign and index of a (possibly negative) reduced root.
    pub fn signed_root_index(&self, v: &[i64]) -> Option<(i8, usize)> {
        if let Some(i) = self.root_index(v) {
            return Some((1, i));
        }
        let neg: Vec<i64> = v.iter().map(|x| -x).collect();
        self.root_index(&neg).map(|i| (-1, i))
    }

    /// Whether a reduced positive root (by index) belongs to the Levi of `I`.
    pub fn in_levi(&self, root: usize, subset: &ParabolicSubset) -> bool {
        self.roots[root]
            .simple_coeffs
            .iter()
            .enumerate()
            .all(|(k, &c)| c == 0 || subset.contains(&k))
    }

    /// Reduced positive roots of the Levi `L_I`.
    pub fn levi_roots(&self, subset: &ParabolicSubset) -> Vec<usize> {
        (0..self.roots.len())
            .filter(|&r| self.in_levi(r, subset))
            .collect()
    }

    /// Pairing `<lambda, alpha^vee>` with a reduced positive root.
    pub fn pairing(&self, lambda: &[Q], root: usize) -> Q {
        dot_int(lambda, &self.roots[root].coroot)
    }

    /// Pairing with the coroot of an arbitrary positive root vector,
    /// including non-reduced roots `2 alpha` (whose coroot is `alpha^vee / 2`).
    pub fn pairing_vector(&self, lambda: &[Q], alpha: &[i64]) -> Result<Q> {
        if let Some(i) = self.root_index(alpha) {
            return Ok(self.pairing(lambda, i));
        }
        if alpha.iter().all(|x| x % 2 == 0) {
            let half: Vec<i64> = alpha.iter().map(|x| x / 2).collect();
            if let Some(i) = self.root_index(&half) {
                if self.roots[i].doubled {
                    return Ok(self.pairing(lambda, i) / q(2));
                }
            }
        }
        invalid(format!(
            "{alpha:?} is not a positive root of {}",
            self.label()
        ))
    }

    /// Weighted half sum `rho = 1/2 sum n_alpha alpha` over reduced positive
    /// roots of the Levi of `subset`.
    pub fn rho_of(&self, subset: &ParabolicSubset) -> Weight {
        let mut rho = vec![Q::zero(); self.rank()];
        for r in self.levi_roots(subset) {
            let root = &self.roots[r];
            for (x, &c) in rho.iter_mut().zip(&root.vector) {
                *x += q(i64::from(root.multiplicity) * c);
            }
        }
        rho.iter().map(|x| x / q(2)).collect()
    }

    /// Weighted half sum over all reduced positive roots.
    pub fn rho_weighted(&self) -> Weight {
        self.rho_of(&self.full_subset())
    }

    /// `<2 rho_I, alpha^vee>`: the exponent of the modulus character of
    /// `B cap L_I` along `alpha^vee`.
    pub fn delta_pairing(&self, root: usize, subset: &ParabolicSubset) -> i64 {
        let rho = self.rho_of(subset);
        (self.pairing(&rho, root) * q(2))
            .to_integer()
            .try_into()
            .unwrap_or(i64::MAX)
    }

    /// Simple reflection as a signed permutation, for a reduced root.
    pub fn reflection(&self, root: usize) -> WeylElement {
        let n = self.rank();
        let r = &self.roots[root];
        let mut perm = vec![0; n];
        let mut signs = vec![1i8; n];
        for k in 0..n {
            // s(e_k) = e_k - coroot_k * alpha
            let mut img = vec![0i64; n];
            img[k] = 1;
            for (x, &a) in img.iter_mut().zip(&r.vector) {
                *x -= r.coroot[k] * a;
            }
            let (pos, val) = img
                .iter()
                .enumerate()
                .find(|(_, &x)| x != 0)
                .map(|(i, &x)| (i, x))
                .expect("reflection image is non-zero");
            perm[k] = pos;
            signs[k] = if val < 0 { -1 } else { 1 };
        }
        let mut w = WeylElement { perm, signs };
        self.fix_norm_one_sign(&mut w);
        w
    }

    /// In `SO*(2n)` the relative Weyl group is the centralizer of the Galois
    /// action in `W(D_n)`: every sign change of an `F^x` coordinate is paired
    /// with inversion on the norm-one coordinate.
    fn fix_norm_one_sign(&self, w: &mut WeylElement) {
        if self.family == Family::SoStar {
            let n = self.rank();
            let prod: i8 = w.signs[..n - 1].iter().product();
            w.signs[n - 1] = prod;
        }
    }

    /// Whether `w` sends the reduced positive root `root` to a negative root.
    pub fn sends_negative(&self, w: &WeylElement, root: usize) -> bool {
        let img = w.act_int(&self.roots[root].vector);
        matches!(self.signed_root_index(&img), Some((-1, _)))
    }

    /// Coxeter length: number of reduced positive roots sent to negative roots.
    pub fn length(&self, w: &WeylElement) -> usize {
        (0..self.roots.len())
            .filter(|&r| self.sends_negative(w, r))
            .count()
    }

    /// Order of the reflection subgroup generated by the given reduced
    /// positive roots (which must form a closed subsystem).
    pub fn reflection_subgroup_order(&self, roots: &[usize]) -> u128 {
        // Connected components under non-orthogonality.
        let n = roots.len();
        let mut comp = vec![usize::MAX; n];
        let mut ncomp = 0;
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            comp[s] = ncomp;
            while let Some(a) = stack.pop() {
                for b in 0..n {
                    if comp[b] == usize::MAX {
                        let ip: i64 = self.roots[roots[a]]
                            .vector
                            .iter()
                            .zip(&self.roots[roots[b]].vector)
                            .map(|(x, y)| x * y)
                            .sum();
                        if ip != 0 {
                            comp[b] = ncomp;
                            stack.push(b);
                        }
                    }
                }
            }
            ncomp += 1;
        }
        let mut order: u128 = 1;
        for c in 0..ncomp {
            let members: Vec<Vec<Q>> = (0..n)
                .filter(|&i| comp[i] == c)
                .map(|i| to_q(&self.roots[roots[i]].vector))
                .collect();
            let count = members.len() as u128;
            let k = rank(&members) as u128;
            let fact = (1..=k).fold(1u128, |a, b| a.saturating_mul(b));
            let o = if count == k * (k + 1) / 2 {
                fact.saturating_mul(k + 1)
            } else if count == k * k {
                fact.saturating_mul(1u128 << k.min(120))
            } else {
                // Type D_k (k >= 4 here; smaller D are caught above).
                fact.saturating_mul(1u128 << (k - 1).min(120))
            };
            order = order.saturating_mul(o);
        }
        order
    }

    /// Order of the parabolic subgroup `W_I`.
    pub fn weyl_order(&self, subset: &ParabolicSubset) -> u128 {
        self.reflection_subgroup_order(&self.levi_roots(subset))
    }

    /// Enumerates `W_I` breadth-first from the identity, generated by the
    /// simple reflections of `subset`.
    pub fn weyl_elements(&self, subset: &ParabolicSubset, budget: u64) -> Result<WeylEnumeration> {
        let gens: Vec<usize> = subset.iter().map(|&k| self.simple[k]).collect();
        self.enumerate_generated(&gens, budget, self.weyl_order(subset))
    }

    /// Enumerates the subgroup generated by reflections in the given reduced
    /// positive roots.
    pub fn reflection_subgroup(&self, roots: &[usize], budget: u64) -> Result<WeylEnumeration> {
        let closed = self.closure(roots);
        let order = self.reflection_subgroup_order(&closed);
        self.enumerate_generated(roots, budget, order)
    }

    /// Smallest set of reduced positive roots containing `roots` and closed
    /// under the reflections in its members.
    fn closure(&self, roots: &[usize]) -> Vec<usize> {
        let mut set: BTreeSet<usize> = roots.iter().copied().collect();
        loop {
            let mut added = false;
            let current: Vec<usize> = set.iter().copied().collect();
            for &a in &current {
                let s = self.reflection(a);
                for &b in &current {
                    let img = s.act_int(&self.roots[b].vector);
                    if let Some((_, i)) = self.signed_root_index(&img) {
                        if set.insert(i) {
                            added = true;
                        }
                    }
                }
            }
            if !added {
                return set.into_iter().collect();
            }
        }
    }

    fn enumerate_generated(
        &self,
        gens: &[usize],
        budget: u64,
        expected: u128,
    ) -> Result<WeylEnumeration> {
        if expected > u128::from(budget) {
            return Err(Error::WeylBudget { budget });
        }
        let refl: Vec<WeylElement> = gens.iter().map(|&g| self.reflection(g)).collect();
        let id = WeylElement::identity(self.rank());
        let mut seen: HashSet<WeylElement> = HashSet::new();
        seen.insert(id.clone());
        let mut elements = vec![id.clone()];
        let mut lengths = vec![0];
        let mut queue = VecDeque::from([(id, 0usize)]);
        while let Some((w, l)) = queue.pop_front() {
            for s in &refl {
                let x = s.compose(&w);
                if !seen.contains(&x) {
                    if elements.len() as u64 >= budget {
                        return Err(Error::WeylBudget { budget });
                    }
                    seen.insert(x.clone());
                    elements.push(x.clone());
                    lengths.push(l + 1);
                    queue.push_back((x, l + 1));
                }
            }
        }
        Ok(WeylEnumeration { elements, lengths })
    }

    /// Orthogonal projection of a weight onto `a_L^*` (the orthogonal
    /// complement of the span of the simple roots in `subset`).
    pub fn levi_projection(&self, lambda: &[Q], subset: &ParabolicSubset) -> Weight {
        let basis: Vec<Vec<Q>> = subset
            .iter()
            .map(|&k| to_q(&self.simple_root(k).vector))
            .collect();
        let p = project_onto_span(&basis, lambda);
        lambda.iter().zip(&p).map(|(a, b)| a - b).collect()
    }

    /// Whether `<lambda, alpha^vee> >= 0` for all simple roots in `subset`.
    pub fn is_dominant(&self, lambda: &[Q], subset: &ParabolicSubset) -> bool {
        subset
            .iter()
            .all(|&k| !self.pairing(lambda, self.simple[k]).is_negative())
    }

    /// Decomposes `alpha^vee = lambda * alpha_L^vee + sum_{beta in I} lambda_beta beta^vee`
    /// for a reduced positive root `alpha` outside `L_I`.
    pub fn coroot_levi_decompose(
        &self,
        subset: &ParabolicSubset,
        root: usize,
    ) -> Result<CorootDecomposition> {
        if self.in_levi(root, subset) {
            return invalid("the root lies in the Levi subgroup of I");
        }
        let alpha = to_q(&self.roots[root].vector);
        let alpha_co = to_q(&self.roots[root].coroot);
        let simple_co: Vec<Vec<Q>> = subset
            .iter()
            .map(|&k| to_q(&self.simple_root(k).coroot))
            .collect();
        let proj = project_onto_span(&simple_co, &alpha_co);
        let coeffs = if simple_co.is_empty() {
            Vec::new()
        } else {
            solve_in_span(&simple_co, &proj)
                .ok_or_else(|| Error::Invariant("projection not in coroot span".into()))?
        };
        // alpha_L and its coroot 2 alpha_L / (alpha_L, alpha_L).
        let simple_r: Vec<Vec<Q>> = subset
            .iter()
            .map(|&k| to_q(&self.simple_root(k).vector))
            .collect();
        let p = project_onto_span(&simple_r, &alpha);
        let alpha_l: Vec<Q> = alpha.iter().zip(&p).map(|(a, b)| a - b).collect();
        let norm = dot(&alpha_l, &alpha_l);
        let alpha_l_co: Vec<Q> = alpha_l.iter().map(|x| x * q(2) / &norm).collect();
        let rest: Vec<Q> = alpha_co.iter().zip(&proj).map(|(a, b)| a - b).collect();
        let lambda = dot(&rest, &alpha_l_co) / dot(&alpha_l_co, &alpha_l_co);
        let mut map = BTreeMap::new();
        for (&k, c) in subset.iter().zip(coeffs) {
            map.insert(k, c);
        }
        Ok(CorootDecomposition {
            lambda,
            levi_coeffs: map,
            alpha_l,
        })
    }
}

/// Result of [`RootDatum::coroot_levi_decompose`].
#[derive(Debug, Clone, PartialEq)]
pub struct CorootDecomposition {
    /// Coefficient of `alpha_L^vee` (always positive).
    pub lambda: Q,
    /// Coefficients of the simple coroots of `I` (always non-positive).
    pub levi_coeffs: BTreeMap<usize, Q>,
    /// The restriction `alpha_L` of `alpha` to `A_L`.
    pub alpha_l: Vec<Q>,
}

/// Warning when the residue characteristic violates the standing
/// assumption on `p` for groups with components of type B or C.
pub fn check_assumption_p(rd: &RootDatum) -> Option<String> {
    let bc = matches!(rd.family, Family::Sp | Family::SoOdd) && rd.rank() >= 2;
    if bc && rd.field.p == 2 {
        Some(format!(
            "{} has absolute root system of type {} and p = 2: results require p > 2",
            rd.label(),
            if rd.family == Family::Sp { "C" } else { "B" }
        ))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rd(f: Family, n: u32) -> RootDatum {
        let field = if f.needs_extension() {
            FieldData {
                extension: Some(Extension { e: 1, f: 2 }),
                ..FieldData::qp(3)
            }
        } else {
            FieldData::qp(3)
        };
        build_root_datum(f, n, field).unwrap()
    }

    #[test]
    fn gl3_is_a2() {
        let r = rd(Family::Gl, 3);
        let vs: BTreeSet<Vec<i64>> = r.roots().iter().map(|x| x.vector.clone()).collect();
        let expect: BTreeSet<Vec<i64>> = [vec![1, -1, 0], vec![1, 0, -1], vec![0, 1, -1]]
            .into_iter()
            .collect();
        assert_eq!(vs, expect);
        assert_eq!(
            r.roots().iter().map(|x| x.multiplicity).collect::<Vec<_>>(),
            vec![1, 1, 1]
        );
        assert_eq!(
            r.weyl_elements(&r.full_subset(), 100)
                .unwrap()
                .elements
                .len(),
            6
        );
    }

    #[test]
    fn sp4_is_c2() {
        let r = rd(Family::Sp, 4);
        let vs: BTreeSet<Vec<i64>> = r.roots().iter().map(|x| x.vector.clone()).collect();
        let expect: BTreeSet<Vec<i64>> = [vec![1, -1], vec![0, 2], vec![1, 1], vec![2, 0]]
            .into_iter()
            .collect();
        assert_eq!(vs, expect);
        let simple: Vec<Vec<i64>> = r
            .simple_roots()
            .iter()
            .map(|&i| r.roots()[i].vector.clone())
            .collect();
        assert_eq!(simple, vec![vec![1, -1], vec![0, 2]]);
    }

    #[test]
    fn u4_is_c2_with_short_multiplicity_two() {
        let r = rd(Family::UEven, 4);
        for root in r.roots() {
            let long = root.vector.iter().any(|&x| x.abs() == 2);
            assert_eq!(root.multiplicity, if long { 1 } else { 2 });
            assert!(!root.doubled);
        }
    }

    #[test]
    fn u5_is_bc2() {
        let r = rd(Family::UOdd, 5);
        assert_eq!(r.rank(), 3);
        assert_eq!(r.all_positive_roots().len(), 6);
        let e1 = r.root_index(&[1, 0, 0]).unwrap();
        assert!(r.roots()[e1].doubled);
        assert_eq!(r.roots()[e1].multiplicity, 3);
        let rho = r.rho_weighted();
        assert_eq!(
            r.pairing_vector(&rho, &[2, 0, 0]).unwrap(),
            r.pairing(&rho, e1) / q(2)
        );
    }

    #[test]
    fn restriction_of_scalars_scales_multiplicities() {
        let field = FieldData {
            p: 3,
            q: 9,
            degree: 2,
            restriction_of_scalars: true,
            extension: None,
        };
        let r = build_root_datum(Family::Gl, 2, field).unwrap();
        assert_eq!(r.roots()[0].multiplicity, 2);
    }

    #[test]
    fn b3_weyl_group_has_48_elements() {
        let r = rd(Family::SoOdd, 7);
        let e = r.weyl_elements(&r.full_subset(), 1000).unwrap();
        assert_eq!(e.elements.len(), 48);
        assert!(e.elements[0].is_identity());
        for (w, &l) in e.elements.iter().zip(&e.lengths) {
            assert_eq!(r.length(w), l);
        }
        let i: ParabolicSubset = [0].into_iter().collect();
        assert_eq!(r.weyl_elements(&i, 1000).unwrap().elements.len(), 2);
        assert_eq!(
            r.weyl_elements(&ParabolicSubset::new(), 1000)
                .unwrap()
                .elements
                .len(),
            1
        );
    }

    #[test]
    fn budget_is_enforced() {
        let r = rd(Family::Sp, 16);
        assert_eq!(
            r.weyl_elements(&r.full_subset(), 1000).unwrap_err(),
            Error::WeylBudget { budget: 1000 }
        );
    }

    #[test]
    fn delta_pairing_examples() {
        let field = FieldData {
            p: 5,
            q: 5,
            degree: 3,
            restriction_of_scalars: true,
            extension: None,
        };
        let r = build_root_datum(Family::Sl, 2, field).unwrap();
        assert_eq!(r.delta_pairing(0, &r.full_subset()), 6);
        assert_eq!(r.delta_pairing(0, &ParabolicSubset::new()), 0);
    }

    #[test]
    fn coroot_decomposition_a2() {
        let r = rd(Family::Gl, 3);
        let i: ParabolicSubset = [1].into_iter().collect();
        let a = r.root_index(&[1, -1, 0]).unwrap();
        let d = r.coroot_levi_decompose(&i, a).unwrap();
        assert_eq!(d.levi_coeffs[&1], crate::linalg::qf(-1, 2));
        assert_eq!(d.lambda, crate::linalg::qf(3, 4));
        let d0 = r.coroot_levi_decompose(&ParabolicSubset::new(), a).unwrap();
        assert_eq!(d0.lambda, q(1));
        assert!(d0.levi_coeffs.is_empty());
    }

    #[test]
    fn p_assumption() {
        let f = FieldData::qp(2);
        let sp = build_root_datum(Family::Sp, 4, f.clone()).unwrap();
        assert!(check_assumption_p(&sp).is_some());
        let gl = build_root_datum(Family::Gl, 4, f).unwrap();
        assert!(check_assumption_p(&gl).is_none());
    }

    #[test]
    fn invalid_fields_are_rejected() {
        assert!(build_root_datum(Family::Gl, 2, FieldData::qp(4)).is_err());
        let bad_q = FieldData {
            q: 9,
            ..FieldData::qp(3)
        };
        assert!(build_root_datum(Family::Gl, 2, bad_q).is_err());
        assert!(build_root_datum(Family::UEven, 4, FieldData::qp(3)).is_err());
    }
}
