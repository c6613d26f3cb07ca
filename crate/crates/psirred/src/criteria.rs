//! Irreducibility engines.
//!
//! Every engine returns a [`Verdict`] carrying a complete trace: each
//! hypothesis of the underlying criterion appears exactly once, with its
//! truth value and, when it fails, a witness. One-directional criteria (the
//! Banach sufficient conditions) never report [`Status::Reducible`]; they
//! report [`Status::Inconclusive`] when a hypothesis fails.
//!
//! Indices in witnesses are 1-based, matching the usual notation `chi_1, ...,
//! chi_n`.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::charalg::{
    compose_with_cochar, e_parameter, twist_by_delta, weyl_fixes, AlgExp, ContinuousCharacter,
    CoordinateCharacter, SmoothCharGroup, SmoothCharacter,
};
use crate::error::{invalid, Result};
use crate::linalg::{q, qf, Q};
use crate::rgroups;
use crate::rootdata::{check_assumption_p, CoordField, Family, ParabolicSubset, RootDatum};

/// Outcome of an engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Status {
    /// The induced representation is (absolutely) irreducible.
    Irreducible,
    /// The induced representation is reducible (iff criteria only).
    Reducible,
    /// A hypothesis of a sufficient criterion fails.
    Inconclusive,
    /// A standing hypothesis of the engine does not hold.
    PreconditionFailed,
}

/// Evidence attached to a failing condition.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A pair of coordinates `(i, j)`.
    Pair {
        /// First index.
        i: usize,
        /// Second index.
        j: usize,
    },
    /// A pair together with the sign of the exponent of `chi_j`.
    SignedPair {
        /// First index.
        i: usize,
        /// Second index.
        j: usize,
        /// `+1` or `-1`.
        sign: i8,
    },
    /// A single coordinate.
    Index {
        /// The index.
        i: usize,
    },
    /// A root, in `e_i` coordinates.
    Root {
        /// The root vector.
        root: Vec<i64>,
    },
    /// A Weyl group element in one-line signed notation.
    Weyl {
        /// Images of `e_1, ..., e_n`.
        element: String,
    },
    /// A set of coordinates.
    Subset {
        /// The indices.
        indices: Vec<usize>,
    },
    /// A chain of segment positions.
    Chain {
        /// The positions.
        indices: Vec<usize>,
    },
}

/// One evaluated hypothesis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceRecord {
    /// Stable identifier of the condition.
    pub condition_id: String,
    /// Human-readable statement.
    pub text: String,
    /// Whether the condition holds.
    pub holds: bool,
    /// Witness of failure.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

/// Result of an engine run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    /// Outcome.
    pub status: Status,
    /// Identifier of the criterion applied.
    pub theorem_id: String,
    /// The witness explaining a non-irreducible outcome.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// Evaluated hypotheses, in the criterion's order.
    pub trace: Vec<TraceRecord>,
    /// Remarks that do not change the outcome.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Verdict {
    /// All witnesses of failing conditions, in trace order.
    pub fn failing_witnesses(&self) -> Vec<&Witness> {
        self.trace
            .iter()
            .filter(|r| !r.holds)
            .filter_map(|r| r.witness.as_ref())
            .collect()
    }
}

/// Accumulates trace records.
#[derive(Debug, Default)]
struct Trace {
    records: Vec<TraceRecord>,
    notes: Vec<String>,
}

impl Trace {
    fn push(
        &mut self,
        id: impl Into<String>,
        text: impl Into<String>,
        holds: bool,
        witness: Option<Witness>,
    ) {
        self.records.push(TraceRecord {
            condition_id: id.into(),
            text: text.into(),
            holds,
            witness: if holds { None } else { witness },
        });
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    /// Pushes a condition given as "the first failing instance, if any".
    fn check(&mut self, id: &str, text: &str, failure: Option<Witness>) {
        let holds = failure.is_none();
        self.push(id, text, holds, failure);
    }

    /// Final verdict: `iff` criteria report `Reducible` on failure, sufficient
    /// criteria `Inconclusive`.
    fn conclude(self, theorem: &str, iff: bool) -> Verdict {
        let failing = self.records.iter().find(|r| !r.holds);
        let (status, witness) = match failing {
            None => (Status::Irreducible, None),
            Some(r) => (
                if iff {
                    Status::Reducible
                } else {
                    Status::Inconclusive
                },
                r.witness.clone(),
            ),
        };
        Verdict {
            status,
            theorem_id: theorem.to_string(),
            witness,
            trace: self.records,
            notes: self.notes,
        }
    }

    fn precondition_failed(self, theorem: &str) -> Verdict {
        let witness = self
            .records
            .iter()
            .rev()
            .find(|r| !r.holds)
            .and_then(|r| r.witness.clone());
        Verdict {
            status: Status::PreconditionFailed,
            theorem_id: theorem.to_string(),
            witness,
            trace: self.records,
            notes: self.notes,
        }
    }
}

fn root_witness(rd: &RootDatum, r: usize) -> Witness {
    Witness::Root {
        root: rd.roots()[r].vector.clone(),
    }
}

fn fmt_root(v: &[i64]) -> String {
    let mut s = String::new();
    for (i, &c) in v.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let sign = if c < 0 {
            "-"
        } else if s.is_empty() {
            ""
        } else {
            "+"
        };
        let mag = c.abs();
        if mag == 1 {
            s.push_str(&format!("{sign}e{}", i + 1));
        } else {
            s.push_str(&format!("{sign}{mag}e{}", i + 1));
        }
    }
    if s.is_empty() {
        "0".into()
    } else {
        s
    }
}

fn family_precondition(trace: &mut Trace, ok: bool, text: &str) -> bool {
    trace.push("family", text, ok, None);
    ok
}

fn smooth_precondition(trace: &mut Trace, chi: &ContinuousCharacter) -> bool {
    let bad = chi.coords.iter().position(|c| !c.is_smooth());
    trace.push(
        "smooth",
        "the character is smooth (all derivative exponents vanish)",
        bad.is_none(),
        bad.map(|i| Witness::Index { i: i + 1 }),
    );
    bad.is_none()
}

// ---------------------------------------------------------------------------
// GL(n) and SL(n)
// ---------------------------------------------------------------------------

/// Sufficient criterion for irreducibility of the locally analytic principal
/// series `Ind_B^G chi` of `GL(n)` or `SL(n)`.
///
/// The conclusion is `Irreducible` unless some pair `i < j` satisfies both
///
/// * `a_{k,kappa} - a_{k+1,kappa}` is a non-positive integer for all
///   `i <= k < j` and all embeddings `kappa`, and
/// * `chi_i chi_j^{-1} = |.|^{j-i-1} prod_kappa kappa^{a_{i,kappa} - a_{j,kappa}}`.
///
/// Every pair is recorded; the verdict's witness is the widest witnessing
/// pair (ties broken lexicographically), which exhibits the longest chain.
pub fn check_gln_banach(
    rd: &RootDatum,
    g: &SmoothCharGroup,
    chi: &ContinuousCharacter,
) -> Result<Verdict> {
    let theorem = "gln-banach";
    let mut trace = Trace::default();
    if !family_precondition(
        &mut trace,
        matches!(rd.family(), Family::Gl | Family::Sl),
        "the group is GL(n) or SL(n)",
    ) {
        return Ok(trace.precondition_failed(theorem));
    }
    let n = chi.len();
    let step_ok: Vec<bool> = (0..n.saturating_sub(1))
        .map(|k| {
            chi.coords[k]
                .alg
                .iter()
                .zip(&chi.coords[k + 1].alg)
                .all(|(a, b)| a.add(&b.scale(&q(-1))).is_nonpositive_integer())
        })
        .collect();
    let mut best: Option<(usize, usize)> = None;
    for i in 0..n {
        for j in (i + 1)..n {
            let chain = step_ok[i..j].iter().all(|&b| b);
            let a = &chi.coords[i];
            let b = &chi.coords[j];
            let ratio =
                g.equal(&a.smooth, &b.smooth)? && &a.unram - &b.unram == q((j - i - 1) as i64);
            let witness = chain && ratio;
            let text = format!(
                "not both: integral non-positive weight steps on [{}, {}] ({}) and \
                 chi_{}/chi_{} = |.|^{} times the algebraic ratio ({})",
                i + 1,
                j + 1,
                if chain { "yes" } else { "no" },
                i + 1,
                j + 1,
                j - i - 1,
                if ratio { "yes" } else { "no" }
            );
            trace.push(
                format!("pair({},{})", i + 1, j + 1),
                text,
                !witness,
                Some(Witness::Pair { i: i + 1, j: j + 1 }),
            );
            if witness {
                let better = match best {
                    None => true,
                    Some((bi, bj)) => j - i > bj - bi,
                };
                if better {
                    best = Some((i, j));
                }
            }
        }
    }
    let mut v = trace.conclude(theorem, false);
    if let Some((i, j)) = best {
        v.witness = Some(Witness::Pair { i: i + 1, j: j + 1 });
    }
    Ok(v)
}

// ---------------------------------------------------------------------------
// Split groups
// ---------------------------------------------------------------------------

fn alg_pairing(chi: &ContinuousCharacter, coroot: &[i64], kappa: usize) -> AlgExp {
    let mut acc = AlgExp::zero();
    for (c, &x) in chi.coords.iter().zip(coroot) {
        if x != 0 {
            acc = acc.add(&c.alg[kappa].scale(&q(x)));
        }
    }
    acc
}

/// The largest standard parabolic subset `I` such that `<d chi_kappa,
/// alpha^vee>` is a non-positive integer for every simple root in `I` and
/// every embedding `kappa` (then the same holds for all positive roots of
/// `L_I`).
pub fn maximal_parabolic(rd: &RootDatum, chi: &ContinuousCharacter) -> ParabolicSubset {
    let embeddings = chi.coords.first().map_or(0, |c| c.alg.len());
    (0..rd.simple_roots().len())
        .filter(|&k| {
            let co = &rd.simple_root(k).coroot;
            (0..embeddings).all(|kappa| alg_pairing(chi, co, kappa).is_nonpositive_integer())
        })
        .collect()
}

/// Sufficient criterion for irreducibility of `Ind_B^G chi` for split `G`.
///
/// With `I` the maximal parabolic subset of [`maximal_parabolic`] and
/// `psi = chi delta_B^{-1/2}`, the engine requires the regularity hypothesis
/// that every non-identity `w` in `W_I` moves some `psi o alpha^vee`
/// (alpha in `L_I`) off its algebraic prediction, and then reports
/// `Irreducible` unless some positive root `alpha` of `L_I` has
/// `psi o alpha^vee = |.|^{-1} prod kappa^{<d chi_kappa, alpha^vee>}`.
pub fn check_split_banach(
    rd: &RootDatum,
    g: &SmoothCharGroup,
    chi: &ContinuousCharacter,
    budget: u64,
) -> Result<Verdict> {
    let theorem = "split-banach";
    let mut trace = Trace::default();
    if !family_precondition(&mut trace, rd.family().is_split(), "the group is split") {
        return Ok(trace.precondition_failed(theorem));
    }
    if let Some(w) = check_assumption_p(rd) {
        trace.note(w);
    }
    let subset = maximal_parabolic(rd, chi);
    let names: Vec<String> = subset
        .iter()
        .map(|&k| fmt_root(&rd.simple_root(k).vector))
        .collect();
    trace.note(format!(
        "maximal parabolic subset I = {{{}}}",
        names.join(", ")
    ));
    let psi = twist_by_delta(rd, chi, &qf(-1, 2));
    let levi = rd.levi_roots(&subset);
    let weyl = rd.weyl_elements(&subset, budget)?;
    let mut values = Vec::with_capacity(levi.len());
    for &r in &levi {
        values.push(compose_with_cochar(rd, g, &psi, &rd.roots()[r].coroot)?);
    }
    let mut irregular = None;
    for w in weyl.elements.iter().skip(1) {
        let winv = w.inverse();
        let mut moved = false;
        for (idx, &r) in levi.iter().enumerate() {
            let img = winv.act_int(&rd.roots()[r].coroot);
            let a = compose_with_cochar(rd, g, &psi, &img)?;
            let b = &values[idx];
            if a.smooth != b.smooth || a.unram != b.unram {
                moved = true;
                break;
            }
        }
        if !moved {
            irregular = Some(w.clone());
            break;
        }
    }
    trace.check(
        "regular",
        "every non-identity w in W_I changes some (chi delta^{-1/2})(alpha^vee) beyond the algebraic ratio",
        irregular.map(|w| Witness::Weyl {
            element: w.to_string(),
        }),
    );
    if !trace.records.last().is_none_or(|r| r.holds) {
        return Ok(trace.precondition_failed(theorem));
    }
    for (idx, &r) in levi.iter().enumerate() {
        let v = &values[idx];
        let pole = g.is_trivial(&v.smooth) && v.unram == q(-1);
        trace.push(
            format!("no-pole({})", fmt_root(&rd.roots()[r].vector)),
            format!(
                "(chi delta^{{-1/2}})(alpha^vee) != |.|^-1 times the algebraic part, alpha = {}",
                fmt_root(&rd.roots()[r].vector)
            ),
            !pole,
            Some(root_witness(rd, r)),
        );
    }
    Ok(trace.conclude(theorem, false))
}

// ---------------------------------------------------------------------------
// Classical groups
// ---------------------------------------------------------------------------

/// A smooth character `psi |.|^s` of one coordinate's field.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Ch {
    psi: SmoothCharacter,
    s: Q,
}

struct Classical<'a> {
    g: &'a SmoothCharGroup,
    c: Vec<Ch>,
}

impl<'a> Classical<'a> {
    fn new(g: &'a SmoothCharGroup, chi: &ContinuousCharacter) -> Self {
        Classical {
            g,
            c: chi
                .coords
                .iter()
                .map(|c| Ch {
                    psi: c.smooth.clone(),
                    s: c.unram.clone(),
                })
                .collect(),
        }
    }

    fn mul(&self, a: &Ch, b: &Ch) -> Ch {
        Ch {
            psi: self.g.mul_unchecked(&a.psi, &b.psi),
            s: &a.s + &b.s,
        }
    }

    fn inv(&self, a: &Ch) -> Ch {
        Ch {
            psi: self.g.inv(&a.psi),
            s: -a.s.clone(),
        }
    }

    fn conj(&self, a: &Ch) -> Result<Ch> {
        Ok(Ch {
            psi: self.g.conjugate(&a.psi)?,
            s: a.s.clone(),
        })
    }

    fn norm(&self, a: &Ch) -> Result<Ch> {
        Ok(Ch {
            psi: self.g.norm_pullback(&a.psi)?,
            s: a.s.clone(),
        })
    }

    /// `chi^{c-1}` for a norm-one coordinate.
    fn c_minus_one(&self, a: &Ch) -> Result<Ch> {
        Ok(Ch {
            psi: self.g.c_minus_one(&a.psi)?,
            s: Q::zero(),
        })
    }

    fn restrict(&self, a: &Ch) -> Result<Ch> {
        Ok(Ch {
            psi: self.g.restrict(&a.psi)?,
            s: &a.s * q(2),
        })
    }

    fn omega(&self) -> Result<SmoothCharacter> {
        self.g
            .omega()
            .cloned()
            .ok_or_else(|| crate::Error::Invalid("the character group declares no omega_ef".into()))
    }

    fn is_abs(&self, a: &Ch, exps: &[Q]) -> bool {
        self.g.is_trivial(&a.psi) && exps.contains(&a.s)
    }

    fn is_trivial(&self, a: &Ch) -> bool {
        self.g.is_trivial(&a.psi) && a.s.is_zero()
    }

    fn squares_trivial(&self, a: &Ch) -> bool {
        a.s.is_zero() && self.g.order(&a.psi).divides(2)
    }

    fn exact_order_two(&self, a: &Ch) -> bool {
        a.s.is_zero() && self.g.order(&a.psi) == crate::charalg::CharOrder::Finite(2)
    }

    fn distinct(&self, idx: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for &i in idx {
            if !out.iter().any(|&j| self.c[j] == self.c[i]) {
                out.push(i);
            }
        }
        out
    }

    /// First pair `i < j` (or `i <= j`) with `chi_i chi_j^{sign}` in `|.|^{exps}`.
    fn pair_condition(
        &self,
        range: usize,
        diag: bool,
        signs: &[i8],
        exps: &[Q],
    ) -> Option<Witness> {
        for i in 0..range {
            let start = if diag { i } else { i + 1 };
            for j in start..range {
                for &sign in signs {
                    let cj = if sign > 0 {
                        self.c[j].clone()
                    } else {
                        self.inv(&self.c[j])
                    };
                    if self.is_abs(&self.mul(&self.c[i], &cj), exps) {
                        return Some(Witness::SignedPair {
                            i: i + 1,
                            j: j + 1,
                            sign,
                        });
                    }
                }
            }
        }
        None
    }
}

fn fmt_exps(exps: &[Q]) -> String {
    let v: Vec<String> = exps.iter().map(|e| e.to_string()).collect();
    if v.len() == 1 {
        v[0].clone()
    } else {
        format!("{{{}}}", v.join(", "))
    }
}

fn classical_conditions(
    rd: &RootDatum,
    g: &SmoothCharGroup,
    chi: &ContinuousCharacter,
    smooth: bool,
    trace: &mut Trace,
) -> Result<()> {
    let cl = Classical::new(g, chi);
    let one: Vec<Q> = if smooth {
        vec![q(-1), q(1)]
    } else {
        vec![q(-1)]
    };
    let half: Vec<Q> = if smooth {
        vec![qf(-1, 2), qf(1, 2)]
    } else {
        vec![qf(-1, 2)]
    };
    let e1 = fmt_exps(&one);
    let eh = fmt_exps(&half);
    let n = chi.len();
    match rd.family() {
        Family::Sp => {
            trace.check(
                "pairs",
                &format!("chi_i chi_j^(+-1) != |.|^{e1} for i < j"),
                cl.pair_condition(n, false, &[1, -1], &one),
            );
            let w = (0..n).find(|&i| cl.is_abs(&cl.c[i], &one));
            trace.check(
                "singles",
                &format!("chi_i != |.|^{e1}"),
                w.map(|i| Witness::Index { i: i + 1 }),
            );
            if smooth {
                let w = (0..n).find(|&i| cl.exact_order_two(&cl.c[i]));
                trace.check(
                    "order-two",
                    "no chi_i has order 2",
                    w.map(|i| Witness::Index { i: i + 1 }),
                );
            } else {
                quadratic_independence(&cl, trace, n, false)?;
            }
        }
        Family::SoOdd => {
            trace.check(
                "pairs",
                &format!("chi_i chi_j^(+-1) != |.|^{e1} for i <= j"),
                cl.pair_condition(n, true, &[1, -1], &one),
            );
        }
        Family::SoEven => {
            trace.check(
                "pairs",
                &format!("chi_i chi_j^(+-1) != |.|^{e1} for i < j"),
                cl.pair_condition(n, false, &[1, -1], &one),
            );
            if smooth {
                let sq: Vec<usize> = (0..n).filter(|&i| cl.squares_trivial(&cl.c[i])).collect();
                let d = cl.distinct(&sq);
                trace.check(
                    "quadratic-set",
                    "{chi_i : chi_i^2 = 1} has at most one element",
                    (d.len() > 1).then(|| Witness::Subset {
                        indices: d[..2].iter().map(|i| i + 1).collect(),
                    }),
                );
            } else {
                quadratic_independence(&cl, trace, n, true)?;
            }
        }
        Family::SoStar => {
            let m = n - 1;
            let last = cl.c[m].clone();
            trace.check(
                "pairs",
                &format!("chi_i chi_j^(+-1) != |.|_F^{e1} for i < j < n"),
                cl.pair_condition(m, false, &[1, -1], &one),
            );
            let w = cl.c_minus_one(&last)?;
            let last_sq = g.order(&last.psi).divides(2);
            let mut twisted = Vec::with_capacity(m);
            for i in 0..m {
                twisted.push(cl.mul(&cl.norm(&cl.c[i])?, &w));
            }
            let fail = if last_sq {
                (0..m).find(|&i| cl.is_abs(&twisted[i], &one))
            } else {
                None
            };
            trace.check(
                "norm-twist",
                &format!("if chi_n^2 = 1: (chi_i o N) chi_n^(c-1) != |.|_E^{e1} for i < n"),
                fail.map(|i| Witness::Index { i: i + 1 }),
            );
            if smooth {
                let fail = if !last_sq {
                    let sq: Vec<usize> = (0..m).filter(|&i| cl.squares_trivial(&cl.c[i])).collect();
                    let d = cl.distinct(&sq);
                    (d.len() > 1).then(|| Witness::Subset {
                        indices: d[..2].iter().map(|i| i + 1).collect(),
                    })
                } else {
                    (0..m)
                        .find(|&i| cl.squares_trivial(&cl.c[i]) && !cl.is_trivial(&twisted[i]))
                        .map(|i| Witness::Index { i: i + 1 })
                };
                trace.check(
                    "quadratic-set",
                    "if chi_n^2 != 1: at most one distinct chi_i (i < n) with chi_i^2 = 1; \
                     if chi_n^2 = 1: every i < n has chi_i^2 != 1 or (chi_i o N) chi_n^(c-1) = 1",
                    fail,
                );
            } else {
                // Only coordinates with chi_i^2 = 1 (so s_i = 0) can enter.
                let pos: Vec<usize> = (0..m).filter(|&i| cl.c[i].s.is_zero()).collect();
                let psis: Vec<SmoothCharacter> = pos.iter().map(|&i| cl.c[i].psi.clone()).collect();
                let r = rgroups::rgroup_rank_gso_star(g, &psis, &last.psi)?;
                trace.check(
                    "quadratic-subsets",
                    "no non-empty subset S of {chi_i : chi_i^2 = 1, (chi_i o N) chi_n^(c-1) != 1} has \
                     prod chi_i o N = chi_n^(1-c) (|S| odd) or 1 (|S| even)",
                    (r.rank > 0).then(|| Witness::Subset {
                        indices: r
                            .witness
                            .unwrap_or_default()
                            .into_iter()
                            .map(|j| pos[j] + 1)
                            .collect(),
                    }),
                );
            }
        }
        Family::UEven | Family::UOdd => {
            let odd = rd.family() == Family::UOdd;
            let m = if odd { n - 1 } else { n };
            trace.check(
                "pairs",
                &format!("chi_i chi_j^-1 != |.|_E^{e1} for i < j"),
                cl.pair_condition(m, false, &[-1], &one),
            );
            let mut fail = None;
            'outer: for i in 0..m {
                for j in (i + 1)..m {
                    if cl.is_abs(&cl.mul(&cl.c[i], &cl.conj(&cl.c[j])?), &one) {
                        fail = Some(Witness::Pair { i: i + 1, j: j + 1 });
                        break 'outer;
                    }
                }
            }
            trace.check(
                "conjugate-pairs",
                &format!("chi_i chi_j^c != |.|_E^{e1} for i < j"),
                fail,
            );
            let omega = cl.omega()?;
            if !odd {
                let mut fail = None;
                for i in 0..n {
                    let eta_trivial = g.is_trivial(&g.restrict(&cl.c[i].psi)?);
                    if half.contains(&cl.c[i].s) && eta_trivial {
                        fail = Some(Witness::Index { i: i + 1 });
                        break;
                    }
                }
                trace.check(
                    "half-twists",
                    &format!("chi_i != eta |.|_E^{eh} with eta|_F = 1"),
                    fail,
                );
                let mut hits = Vec::new();
                for i in 0..n {
                    let r = cl.restrict(&cl.c[i])?;
                    if r.s.is_zero() && r.psi == omega {
                        hits.push(i);
                    }
                }
                if smooth {
                    trace.check(
                        "omega-restriction",
                        "chi_i|_F != omega_{E/F} for all i",
                        hits.first().map(|&i| Witness::Index { i: i + 1 }),
                    );
                } else {
                    let d = cl.distinct(&hits);
                    trace.check(
                        "omega-restriction",
                        "{chi_i : chi_i|_F = omega_{E/F}} has at most one element",
                        (d.len() > 1).then(|| Witness::Subset {
                            indices: d[..2].iter().map(|i| i + 1).collect(),
                        }),
                    );
                }
            } else {
                let w = cl.c_minus_one(&cl.c[m])?;
                let phi: Vec<Ch> = (0..m).map(|i| cl.mul(&cl.c[i], &w)).collect();
                let fail = (0..m).find(|&i| cl.is_abs(&phi[i], &one));
                trace.check(
                    "norm-one-twist",
                    &format!("chi_i chi_{{n+1}}^(c-1) != |.|_E^{e1}"),
                    fail.map(|i| Witness::Index { i: i + 1 }),
                );
                let mut fail = None;
                for (i, p) in phi.iter().enumerate() {
                    if half.contains(&p.s) && g.restrict(&p.psi)? == omega {
                        fail = Some(Witness::Index { i: i + 1 });
                        break;
                    }
                }
                trace.check(
                    "norm-one-half-twist",
                    &format!(
                        "chi_i chi_{{n+1}}^(c-1) != eta |.|_E^{eh} with eta|_F = omega_{{E/F}}"
                    ),
                    fail,
                );
                let mut fail = None;
                for (i, p) in phi.iter().enumerate() {
                    let r = cl.restrict(p)?;
                    if !cl.is_trivial(p) && cl.is_trivial(&r) {
                        fail = Some(Witness::Index { i: i + 1 });
                        break;
                    }
                }
                trace.check(
                    "norm-one-restriction",
                    "chi_i chi_{n+1}^(c-1) = 1 or its restriction to F^x is non-trivial",
                    fail,
                );
            }
        }
        _ => {}
    }
    Ok(())
}

/// Banach condition on the characters of order two: for Sp(2n) they must be
/// `F_2`-independent; for SO(2n) no non-empty even-size subset may have
/// trivial product.
fn quadratic_independence(
    cl: &Classical<'_>,
    trace: &mut Trace,
    n: usize,
    even_only: bool,
) -> Result<()> {
    let pos: Vec<usize> = cl.distinct(
        &(0..n)
            .filter(|&i| cl.exact_order_two(&cl.c[i]))
            .collect::<Vec<_>>(),
    );
    let psis: Vec<SmoothCharacter> = pos.iter().map(|&i| cl.c[i].psi.clone()).collect();
    let r = if even_only {
        rgroups::even_trivial_product_rank(cl.g, &psis)?
    } else {
        rgroups::trivial_product_rank(cl.g, &psis)?
    };
    let text = if even_only {
        "no non-empty even-size subset of the distinct chi_i of order 2 has trivial product"
    } else {
        "the distinct chi_i of order 2 are linearly independent over Z/2"
    };
    trace.check(
        "order-two-set",
        text,
        (r.rank > 0).then(|| Witness::Subset {
            indices: r
                .witness
                .unwrap_or_default()
                .into_iter()
                .map(|j| pos[j] + 1)
                .collect(),
        }),
    );
    let order_four: Vec<usize> = (0..n)
        .filter(|&i| {
            cl.c[i].s.is_zero() && cl.g.order(&cl.c[i].psi) == crate::charalg::CharOrder::Finite(4)
        })
        .collect();
    if !order_four.is_empty() {
        let idx: Vec<String> = order_four.iter().map(|i| (i + 1).to_string()).collect();
        trace.note(format!(
            "coordinates {} have order 4 (their squares have order two); they are not part of the \
             order-two set under the reading 'chi_i of order two'",
            idx.join(", ")
        ));
    }
    Ok(())
}

fn classical_family(rd: &RootDatum) -> Option<&'static str> {
    match rd.family() {
        Family::Sp => Some("Sp"),
        Family::SoOdd => Some("SO-odd"),
        Family::SoEven => Some("SO-even"),
        Family::SoStar => Some("SOstar"),
        Family::UEven => Some("U-even"),
        Family::UOdd => Some("U-odd"),
        _ => None,
    }
}

/// Sufficient criteria for absolute irreducibility of the continuous
/// induction of `chi delta_B^{1/2}` for smooth `chi` on the classical groups.
pub fn check_classical_banach(
    rd: &RootDatum,
    g: &SmoothCharGroup,
    chi: &ContinuousCharacter,
) -> Result<Verdict> {
    let name = classical_family(rd);
    let theorem = format!("classical-banach/{}", name.unwrap_or("unsupported"));
    let mut trace = Trace::default();
    if !family_precondition(
        &mut trace,
        name.is_some(),
        "the group is Sp, SO, SOstar or U",
    ) {
        return Ok(trace.precondition_failed(&theorem));
    }
    if matches!(rd.family(), Family::Sp | Family::SoOdd) {
        let ok = rd.field().p > 2;
        trace.push("p-odd", "p > 2", ok, None);
        if !ok {
            return Ok(trace.precondition_failed(&theorem));
        }
    }
    if !smooth_precondition(&mut trace, chi) {
        return Ok(trace.precondition_failed(&theorem));
    }
    classical_conditions(rd, g, chi, false, &mut trace)?;
    Ok(trace.conclude(&theorem, false))
}

/// Necessary and sufficient criteria for irreducibility of the smooth
/// normalized induction of smooth `chi` on the classical groups.
pub fn check_classical_smooth_iff(
    rd: &RootDatum,
    g: &SmoothCharGroup,
    chi: &ContinuousCharacter,
) -> Result<Verdict> {
    let name = classical_family(rd);
    let theorem = format!("classical-smooth/{}", name.unwrap_or("unsupported"));
    let mut trace = Trace::default();
    if !family_precondition(
        &mut trace,
        name.is_some(),
        "the group is Sp, SO, SOstar or U",
    ) {
        return Ok(trace.precondition_failed(&theorem));
    }
    if !smooth_precondition(&mut trace, chi) {
        return Ok(trace.precondition_failed(&theorem));
    }
    classical_conditions(rd, g, chi, true, &mut trace)?;
    Ok(trace.conclude(&theorem, true))
}

// ---------------------------------------------------------------------------
// Unitary-type criterion for split tori
// ---------------------------------------------------------------------------

/// Domain of validity for [`check_unitary_split`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConeMode {
    /// Require `e(chi)` to be dominant.
    Dominant,
    /// Require `<e(chi), alpha^vee> > -2 n_alpha / k_alpha` for each simple
    /// root, where `k_alpha` (one per simple root, even and positive) bounds
    /// the denominators of the rank-one reducibility points.
    Relaxed(Vec<u32>),
}

/// Necessary and sufficient criterion for `B`-principal series of split
/// groups when `e(chi)` is dominant (or in the relaxed cone): reducible iff
/// `chi o alpha^vee` is trivial for some simple root `alpha`.
pub fn check_unitary_split(
    rd: &RootDatum,
    g: &SmoothCharGroup,
    chi: &ContinuousCharacter,
    mode: &ConeMode,
) -> Result<Verdict> {
    let theorem = "unitary-split";
    let mut trace = Trace::default();
    if !family_precondition(&mut trace, rd.family().is_split(), "the group is split") {
        return Ok(trace.precondition_failed(theorem));
    }
    let e = e_parameter(rd, chi)?;
    let scale = q(i64::from(rd.field().restriction_degree()));
    let mut fail = None;
    let text = match mode {
        ConeMode::Dominant => {
            for (k, &r) in rd.simple_roots().iter().enumerate() {
                if rd.pairing(&e, r).is_negative() {
                    fail = Some(k);
                    break;
                }
            }
            "e(chi) is dominant".to_string()
        }
        ConeMode::Relaxed(ks) => {
            if ks.len() != rd.simple_roots().len() {
                return invalid("one k_alpha per simple root is required");
            }
            if ks.iter().any(|&k| k == 0 || k % 2 != 0) {
                return invalid("k_alpha must be a positive even integer");
            }
            for (k, &r) in rd.simple_roots().iter().enumerate() {
                let n = q(i64::from(rd.roots()[r].multiplicity)) / &scale;
                let bound = -(n * q(2)) / q(i64::from(ks[k]));
                if rd.pairing(&e, r) <= bound {
                    fail = Some(k);
                    break;
                }
            }
            "<e(chi), alpha^vee> > -2 n_alpha / k_alpha for every simple root".to_string()
        }
    };
    trace.check(
        "cone",
        &text,
        fail.map(|k| root_witness(rd, rd.simple_roots()[k])),
    );
    if fail.is_some() {
        return Ok(trace.precondition_failed(theorem));
    }
    for &r in rd.simple_roots() {
        let v = compose_with_cochar(rd, g, chi, &rd.roots()[r].coroot)?;
        trace.push(
            format!("nontrivial({})", fmt_root(&rd.roots()[r].vector)),
            format!(
                "chi o alpha^vee is non-trivial, alpha = {}",
                fmt_root(&rd.roots()[r].vector)
            ),
            !v.is_trivial(g),
            Some(root_witness(rd, r)),
        );
    }
    Ok(trace.conclude(theorem, true))
}

// ---------------------------------------------------------------------------
// Rank one
// ---------------------------------------------------------------------------

/// Rank-one split criterion on the character `psi = chi o alpha^vee` of
/// `F^x`: reducible iff `psi = prod kappa^{a_kappa}` with every `a_kappa` a
/// non-positive integer.
pub fn check_rank1_character(g: &SmoothCharGroup, psi: &CoordinateCharacter) -> Verdict {
    let mut trace = Trace::default();
    trace.check(
        "non-algebraic",
        "chi o alpha^vee is not a non-positive algebraic character",
        psi.is_nonpositive_algebraic(g)
            .then_some(Witness::Index { i: 1 }),
    );
    trace.conclude("rank1-split", true)
}

/// Rank-one split criterion for a split group of semisimple rank one.
pub fn check_rank1_split(
    rd: &RootDatum,
    g: &SmoothCharGroup,
    chi: &ContinuousCharacter,
) -> Result<Verdict> {
    let mut trace = Trace::default();
    let ok = rd.family().is_split() && rd.simple_roots().len() == 1;
    if !family_precondition(&mut trace, ok, "the group is split of semisimple rank one") {
        return Ok(trace.precondition_failed("rank1-split"));
    }
    let r = rd.simple_roots()[0];
    let psi = compose_with_cochar(rd, g, chi, &rd.roots()[r].coroot)?;
    let mut v = check_rank1_character(g, &psi);
    if let Some(Witness::Index { .. }) = v.witness {
        v.witness = Some(root_witness(rd, r));
        for rec in v.trace.iter_mut() {
            if rec.witness.is_some() {
                rec.witness = Some(root_witness(rd, r));
            }
        }
    }
    Ok(v)
}

// ---------------------------------------------------------------------------
// Smooth irreducibility through rank-one Levi subgroups
// ---------------------------------------------------------------------------

/// Rank-one reducibility verdicts supplied by the caller, keyed by reduced
/// positive root vectors (`true` = reducible).
pub type Rank1Table = BTreeMap<Vec<i64>, bool>;

/// Whether the rank-one Levi of a root admits the built-in split rule.
fn builtin_rank1_applies(rd: &RootDatum, r: usize) -> bool {
    match rd.family() {
        f if f.is_split() => true,
        Family::SoStar => rd.roots()[r].multiplicity == rd.field().restriction_degree(),
        _ => false,
    }
}

/// Smooth irreducibility of `nInd_B^G chi` for smooth `chi = psi chi_nu`:
/// irreducible iff every rank-one induction along a reduced positive root is
/// irreducible and the unitary principal series of the Levi `L` cut out by
/// `nu` is irreducible. Also reports whether the generic socle condition
/// (`<nu, alpha^vee> >= 0` on rank-one reducibility roots) holds.
///
/// For split rank-one Levis the built-in rule is: reducible iff
/// `chi o alpha^vee = |.|^{+-1}`, or `s_alpha chi = chi` with
/// `chi o alpha^vee != 1`. Non-split roots require entries in `table`.
pub fn check_smooth_via_rank1(
    rd: &RootDatum,
    g: &SmoothCharGroup,
    chi: &ContinuousCharacter,
    table: &Rank1Table,
    budget: u64,
) -> Result<Verdict> {
    let theorem = "smooth-rank1";
    let mut trace = Trace::default();
    if !family_precondition(
        &mut trace,
        !matches!(rd.family(), Family::GlD { .. }),
        "the group has a character principal series (not GLD)",
    ) {
        return Ok(trace.precondition_failed(theorem));
    }
    if !smooth_precondition(&mut trace, chi) {
        return Ok(trace.precondition_failed(theorem));
    }
    // nu in F-units pairs with coroots through the unramified exponents.
    let nu: Vec<Q> = chi
        .coords
        .iter()
        .zip(rd.coord_fields())
        .map(|(c, f)| match f {
            CoordField::Quadratic => &c.unram * q(2),
            CoordField::NormOne => Q::zero(),
            _ => c.unram.clone(),
        })
        .collect();
    let mut psi = chi.clone();
    for c in psi.coords.iter_mut() {
        c.unram = Q::zero();
    }
    let mut reducible_roots = Vec::new();
    for (r, root) in rd.roots().iter().enumerate() {
        let red = match table.get(&root.vector) {
            Some(&b) => b,
            None if builtin_rank1_applies(rd, r) => {
                let v = compose_with_cochar(rd, g, chi, &root.coroot)?;
                let s = rd.reflection(r);
                v.is_abs_power(g, &q(1))
                    || v.is_abs_power(g, &q(-1))
                    || (weyl_fixes(rd, g, &s, chi)? && !v.is_trivial(g))
            }
            None => {
                return invalid(format!(
                    "no rank-one verdict supplied for the non-split root {}",
                    fmt_root(&root.vector)
                ))
            }
        };
        trace.push(
            format!("rank1({})", fmt_root(&root.vector)),
            format!(
                "the rank-one induction for alpha = {} is irreducible",
                fmt_root(&root.vector)
            ),
            !red,
            Some(root_witness(rd, r)),
        );
        if red {
            reducible_roots.push(r);
        }
    }
    let socle_fail = reducible_roots
        .iter()
        .copied()
        .find(|&r| rd.pairing(&nu, r).is_negative());
    trace.note(format!(
        "socle condition (<nu, alpha^vee> >= 0 wherever the rank-one induction is reducible) {}",
        match socle_fail {
            None => "holds".to_string(),
            Some(r) => format!("fails at {}", fmt_root(&rd.roots()[r].vector)),
        }
    ));
    // The Levi L of nu and the stabilizer of psi in W_L.
    let levi: Vec<usize> = (0..rd.roots().len())
        .filter(|&r| rd.pairing(&nu, r).is_zero())
        .collect();
    let wl = rd.reflection_subgroup(&levi, budget)?;
    let mut stab = Vec::new();
    for w in &wl.elements {
        if weyl_fixes(rd, g, w, &psi)? {
            stab.push(w.clone());
        }
    }
    let (l_holds, l_witness, undetermined) = if stab.len() == 1 {
        (true, None, false)
    } else if rd.family().is_split() {
        let zeros: Vec<usize> = levi
            .iter()
            .copied()
            .filter(|&r| {
                compose_with_cochar(rd, g, &psi, &rd.roots()[r].coroot)
                    .map(|v| v.is_trivial(g))
                    .unwrap_or(false)
            })
            .collect();
        let w0 = rd.reflection_subgroup(&zeros, budget)?;
        let nontrivial_r = stab.len() != w0.elements.len();
        let witness = stab
            .iter()
            .find(|w| !w0.elements.contains(w))
            .map(|w| Witness::Weyl {
                element: w.to_string(),
            });
        (!nontrivial_r, witness, false)
    } else {
        let witness = stab.get(1).map(|w| Witness::Weyl {
            element: w.to_string(),
        });
        (false, witness, true)
    };
    trace.push(
        "levi-part",
        if undetermined {
            "the unitary principal series of L is irreducible (undetermined: psi has a non-trivial \
             stabilizer in W_L and L is not split)"
        } else {
            "the unitary principal series of L is irreducible (trivial R-group)"
        },
        l_holds,
        l_witness,
    );
    let rank1_red = trace
        .records
        .iter()
        .any(|r| r.condition_id.starts_with("rank1(") && !r.holds);
    if undetermined && !rank1_red {
        let witness = trace.records.last().and_then(|r| r.witness.clone());
        return Ok(Verdict {
            status: Status::Inconclusive,
            theorem_id: theorem.into(),
            witness,
            trace: trace.records,
            notes: trace.notes,
        });
    }
    Ok(trace.conclude(theorem, true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charalg::{GeneratorSpec, GroupSpec};
    use crate::rootdata::{build_root_datum, FieldData};

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
            ..Default::default()
        })
        .unwrap()
    }

    fn unram(g: &SmoothCharGroup, s: &[Q]) -> ContinuousCharacter {
        ContinuousCharacter {
            coords: s
                .iter()
                .map(|x| CoordinateCharacter::twisted(g.trivial(), x.clone(), 1))
                .collect(),
        }
    }

    #[test]
    fn gln_examples() {
        let g = group(&[]);
        let gl2 = build_root_datum(Family::Gl, 2, FieldData::qp(3)).unwrap();
        let v = check_gln_banach(&gl2, &g, &unram(&g, &[q(0), q(0)])).unwrap();
        assert_eq!(v.status, Status::Inconclusive);
        assert_eq!(v.witness, Some(Witness::Pair { i: 1, j: 2 }));
        let v = check_gln_banach(&gl2, &g, &unram(&g, &[q(0), q(1)])).unwrap();
        assert_eq!(v.status, Status::Irreducible);
        let gl3 = build_root_datum(Family::Gl, 3, FieldData::qp(3)).unwrap();
        let v = check_gln_banach(&gl3, &g, &unram(&g, &[q(0), q(0), q(-1)])).unwrap();
        assert_eq!(v.status, Status::Inconclusive);
        assert_eq!(v.witness, Some(Witness::Pair { i: 1, j: 3 }));
    }

    #[test]
    fn split_gl2_examples() {
        let g = group(&[3]);
        let gl2 = build_root_datum(Family::Gl, 2, FieldData::qp(3)).unwrap();
        let v = check_split_banach(&gl2, &g, &unram(&g, &[q(0), q(0)]), 100).unwrap();
        assert_eq!(v.status, Status::Inconclusive);
        assert_eq!(v.witness, Some(Witness::Root { root: vec![1, -1] }));
        let chi = ContinuousCharacter {
            coords: vec![
                CoordinateCharacter::trivial(&g, 1),
                CoordinateCharacter::smooth(g.generator(0), 1),
            ],
        };
        let v = check_split_banach(&gl2, &g, &chi, 100).unwrap();
        assert_eq!(v.status, Status::Irreducible);
    }

    #[test]
    fn sp2_smooth_criterion() {
        let g = group(&[2]);
        let sp2 = build_root_datum(Family::Sp, 2, FieldData::qp(3)).unwrap();
        let eta = ContinuousCharacter {
            coords: vec![CoordinateCharacter::smooth(g.generator(0), 1)],
        };
        assert_eq!(
            check_classical_smooth_iff(&sp2, &g, &eta).unwrap().status,
            Status::Reducible
        );
        let triv = unram(&g, &[q(0)]);
        assert_eq!(
            check_classical_smooth_iff(&sp2, &g, &triv).unwrap().status,
            Status::Irreducible
        );
        let abs = unram(&g, &[q(1)]);
        assert_eq!(
            check_classical_smooth_iff(&sp2, &g, &abs).unwrap().status,
            Status::Reducible
        );
    }

    #[test]
    fn so4_with_equal_quadratic_characters_is_irreducible() {
        let g = group(&[2]);
        let so4 = build_root_datum(Family::SoEven, 4, FieldData::qp(3)).unwrap();
        let eta = CoordinateCharacter::smooth(g.generator(0), 1);
        let chi = ContinuousCharacter {
            coords: vec![eta.clone(), eta],
        };
        assert_eq!(
            check_classical_smooth_iff(&so4, &g, &chi).unwrap().status,
            Status::Irreducible
        );
    }

    #[test]
    fn banach_needs_odd_p_for_sp() {
        let g = group(&[]);
        let sp4 = build_root_datum(Family::Sp, 4, FieldData::qp(2)).unwrap();
        let v = check_classical_banach(&sp4, &g, &unram(&g, &[q(0), q(0)])).unwrap();
        assert_eq!(v.status, Status::PreconditionFailed);
    }

    #[test]
    fn unitary_split_examples() {
        let g = group(&[2]);
        let sl2 = build_root_datum(Family::Sl, 2, FieldData::qp(3)).unwrap();
        let v =
            check_unitary_split(&sl2, &g, &unram(&g, &[q(0), q(0)]), &ConeMode::Dominant).unwrap();
        assert_eq!(v.status, Status::Reducible);
        let sp4 = build_root_datum(Family::Sp, 4, FieldData::qp(3)).unwrap();
        let chi = ContinuousCharacter {
            coords: vec![
                CoordinateCharacter::smooth(g.generator(0), 1),
                CoordinateCharacter::trivial(&g, 1),
            ],
        };
        let v = check_unitary_split(&sp4, &g, &chi, &ConeMode::Dominant).unwrap();
        assert_eq!(v.status, Status::Reducible);
        assert_eq!(v.witness, Some(Witness::Root { root: vec![0, 2] }));
    }

    #[test]
    fn rank1_examples() {
        let g = group(&[5]);
        let sl2 = build_root_datum(Family::Sl, 2, FieldData::qp(3)).unwrap();
        let chi = unram(&g, &[q(0), q(0)]);
        assert_eq!(
            check_rank1_split(&sl2, &g, &chi).unwrap().status,
            Status::Reducible
        );
        let chi = ContinuousCharacter {
            coords: vec![
                CoordinateCharacter::smooth(g.generator(0), 1),
                CoordinateCharacter::trivial(&g, 1),
            ],
        };
        assert_eq!(
            check_rank1_split(&sl2, &g, &chi).unwrap().status,
            Status::Irreducible
        );
    }

    #[test]
    fn smooth_rank1_examples() {
        let g = group(&[0, 0]);
        let gl2 = build_root_datum(Family::Gl, 2, FieldData::qp(3)).unwrap();
        let chi = ContinuousCharacter {
            coords: vec![
                CoordinateCharacter::smooth(g.generator(0), 1),
                CoordinateCharacter::smooth(g.generator(1), 1),
            ],
        };
        let v = check_smooth_via_rank1(&gl2, &g, &chi, &Rank1Table::new(), 100).unwrap();
        assert_eq!(v.status, Status::Irreducible);
        let v =
            check_smooth_via_rank1(&gl2, &g, &unram(&g, &[q(0), q(1)]), &Rank1Table::new(), 100)
                .unwrap();
        assert_eq!(v.status, Status::Reducible);
        assert!(v.notes.iter().any(|n| n.contains("fails")));
    }
}
