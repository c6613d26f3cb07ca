//! Segment combinatorics for principal series of `GL_n(D)` induced from
//! cuspidal representations of `D^x`.
//!
//! A cuspidal `sigma_i` is described by the label of its `nu`-class, an
//! integer shift `k` with `sigma_i = zeta nu_zeta^k`, and the step `s(sigma)`
//! with `nu_sigma = |Nrd|^{s(sigma)}`. Twisting by `nu` is therefore integer
//! arithmetic on `k`, and a chain of length `e = d / s(sigma)` is an
//! increasing index sequence inside one class whose shifts are
//! `k_0, k_0 + 1, ..., k_0 + e`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::criteria::{Status, TraceRecord, Verdict, Witness};
use crate::error::{invalid, Error, Result};

/// One cuspidal representation of `D^x` in the inducing datum.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentDatum {
    /// Label of the `nu`-equivalence class.
    pub class_id: String,
    /// Integer shift inside the class.
    pub k: i64,
    /// The step `s(sigma)`, a positive divisor of `d`.
    pub step: u32,
    /// The reduced degree `d` of `D`.
    pub d: u32,
}

impl SegmentDatum {
    /// Chain length parameter `e = d / s(sigma)`.
    pub fn e(&self) -> u32 {
        self.d / self.step
    }
}

/// Checks that steps divide `d`, that `d` is common to all entries and that
/// every class uses a single step.
pub fn validate_segments(segments: &[SegmentDatum]) -> Result<()> {
    let mut steps: BTreeMap<&str, u32> = BTreeMap::new();
    let d0 = segments.first().map(|s| s.d);
    for (i, s) in segments.iter().enumerate() {
        if s.d == 0 || s.step == 0 {
            return invalid(format!("segment {}: d and step must be positive", i + 1));
        }
        if s.d % s.step != 0 {
            return invalid(format!(
                "segment {}: step {} does not divide d = {}",
                i + 1,
                s.step,
                s.d
            ));
        }
        if Some(s.d) != d0 {
            return invalid(format!(
                "segment {}: all segments must share the same d",
                i + 1
            ));
        }
        match steps.get(s.class_id.as_str()) {
            Some(&st) if st != s.step => {
                return invalid(format!(
                    "segment {}: class {:?} is used with steps {} and {}",
                    i + 1,
                    s.class_id,
                    st,
                    s.step
                ))
            }
            _ => {
                steps.insert(&s.class_id, s.step);
            }
        }
    }
    Ok(())
}

/// The lexicographically first chain `i_0 < i_1 < ... < i_e` (0-based
/// positions) inside one class with shifts `k_0, k_0 + 1, ..., k_0 + e`.
pub fn detect_bad_chain(segments: &[SegmentDatum]) -> Option<Vec<usize>> {
    // For a fixed start, taking the earliest admissible successor at every
    // step is optimal: a later successor has a subset of the continuations.
    for start in 0..segments.len() {
        let s0 = &segments[start];
        let e = s0.e() as usize;
        let mut chain = vec![start];
        let mut pos = start;
        while chain.len() <= e {
            let want = segments[pos].k + 1;
            match (pos + 1..segments.len())
                .find(|&j| segments[j].class_id == s0.class_id && segments[j].k == want)
            {
                Some(j) => {
                    chain.push(j);
                    pos = j;
                }
                None => break,
            }
        }
        if chain.len() == e + 1 {
            return Some(chain);
        }
    }
    None
}

/// Output of [`normalize_segments`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Normalization {
    /// The reordered segments.
    pub segments: Vec<SegmentDatum>,
    /// `perm[l]` is the input position of output position `l`.
    pub perm: Vec<usize>,
    /// Transpositions of consecutive inequivalent entries.
    pub class_swaps: u64,
    /// Transpositions of consecutive equivalent entries with shift gap >= 2.
    pub gap_swaps: u64,
}

/// Reorders the segments by adjacent transpositions that do not change
/// chain existence: first consecutive entries of different classes are
/// swapped until every class occupies a contiguous block (blocks ordered by
/// first appearance), then within a block `k(l) , k(l+1)` is swapped whenever
/// `k(l+1) - k(l) >= 2`. Each swap of the second kind strictly decreases
/// `sum_l l * k(l)`, so the process terminates with `k(l+1) - k(l) <= 1`
/// inside every block.
pub fn normalize_segments(segments: &[SegmentDatum]) -> Normalization {
    let mut rank: BTreeMap<&str, usize> = BTreeMap::new();
    for s in segments {
        let next = rank.len();
        rank.entry(s.class_id.as_str()).or_insert(next);
    }
    let mut perm: Vec<usize> = (0..segments.len()).collect();
    let key = |i: usize| rank[segments[i].class_id.as_str()];
    let mut class_swaps = 0u64;
    // Stable bubble sort by block rank: only inequivalent neighbours move.
    let n = perm.len();
    for pass in 0..n {
        let mut changed = false;
        for l in 0..n.saturating_sub(1 + pass) {
            if key(perm[l]) > key(perm[l + 1]) {
                perm.swap(l, l + 1);
                class_swaps += 1;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut gap_swaps = 0u64;
    loop {
        let mut changed = false;
        for l in 0..n.saturating_sub(1) {
            let (a, b) = (&segments[perm[l]], &segments[perm[l + 1]]);
            if a.class_id == b.class_id && b.k - a.k >= 2 {
                perm.swap(l, l + 1);
                gap_swaps += 1;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Normalization {
        segments: perm.iter().map(|&i| segments[i].clone()).collect(),
        perm,
        class_swaps,
        gap_swaps,
    }
}

/// Upper bound `sum_l l * (max k - min k)` for the number of gap swaps.
pub fn gap_swap_bound(segments: &[SegmentDatum]) -> u64 {
    let (Some(lo), Some(hi)) = (
        segments.iter().map(|s| s.k).min(),
        segments.iter().map(|s| s.k).max(),
    ) else {
        return 0;
    };
    let n = segments.len() as u64;
    n * (n + 1) / 2 * (hi - lo) as u64
}

fn chain_record(id: &str, text: &str, chain: &Option<Vec<usize>>) -> TraceRecord {
    TraceRecord {
        condition_id: id.into(),
        text: text.into(),
        holds: chain.is_none(),
        witness: chain.as_ref().map(|c| Witness::Chain {
            indices: c.iter().map(|i| i + 1).collect(),
        }),
    }
}

/// Sufficient criterion: the continuous induction is irreducible when no
/// chain exists. Chain detection runs on the input and on its normal form
/// and the two answers must agree.
pub fn check_glnd_banach(segments: &[SegmentDatum]) -> Result<Verdict> {
    validate_segments(segments)?;
    let before = detect_bad_chain(segments);
    let norm = normalize_segments(segments);
    let after = detect_bad_chain(&norm.segments);
    if before.is_some() != after.is_some() {
        return Err(Error::Invariant(
            "normalization changed the existence of a chain".into(),
        ));
    }
    let trace = vec![
        chain_record(
            "no-chain",
            "no i_0 < ... < i_e with sigma_{i_j} = sigma_{i_0} nu^j and nu^e = |Nrd|^d",
            &before,
        ),
        chain_record(
            "no-chain-normalized",
            "the same condition after normalizing the order of the segments",
            &after,
        ),
    ];
    let notes = vec![format!(
        "normalization used {} class transpositions and {} gap transpositions",
        norm.class_swaps, norm.gap_swaps
    )];
    let witness = trace[0].witness.clone();
    Ok(Verdict {
        status: if before.is_none() {
            Status::Irreducible
        } else {
            Status::Inconclusive
        },
        theorem_id: "glnd-banach".into(),
        witness,
        trace,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(class: &str, k: i64, step: u32, d: u32) -> SegmentDatum {
        SegmentDatum {
            class_id: class.into(),
            k,
            step,
            d,
        }
    }

    #[test]
    fn chain_examples() {
        assert_eq!(
            detect_bad_chain(&[seg("a", 0, 1, 1), seg("b", 1, 1, 1)]),
            None
        );
        assert_eq!(
            detect_bad_chain(&[seg("a", 0, 1, 1), seg("a", 1, 1, 1)]),
            Some(vec![0, 1])
        );
        let v: Vec<_> = [0, 1, 1, 2].iter().map(|&k| seg("a", k, 2, 4)).collect();
        assert_eq!(detect_bad_chain(&v), Some(vec![0, 1, 3]));
    }

    #[test]
    fn normalization_examples() {
        let v = vec![seg("a", 0, 2, 4), seg("a", 3, 2, 4)];
        let n = normalize_segments(&v);
        assert_eq!(
            n.segments.iter().map(|s| s.k).collect::<Vec<_>>(),
            vec![3, 0]
        );
        assert_eq!(detect_bad_chain(&n.segments), None);
        let v: Vec<_> = [0, 1, 2].iter().map(|&k| seg("a", k, 2, 4)).collect();
        let n = normalize_segments(&v);
        assert_eq!(n.segments, v);
        assert_eq!(detect_bad_chain(&n.segments), Some(vec![0, 1, 2]));
    }

    #[test]
    fn verdicts() {
        assert_eq!(
            check_glnd_banach(&[seg("a", 0, 1, 1)]).unwrap().status,
            Status::Irreducible
        );
        let v = check_glnd_banach(&[seg("a", 0, 1, 1), seg("a", 1, 1, 1)]).unwrap();
        assert_eq!(v.status, Status::Inconclusive);
        assert_eq!(
            v.witness,
            Some(Witness::Chain {
                indices: vec![1, 2]
            })
        );
        let v =
            check_glnd_banach(&[seg("a", 0, 1, 1), seg("b", 0, 1, 1), seg("c", 1, 1, 1)]).unwrap();
        assert_eq!(v.status, Status::Irreducible);
    }

    #[test]
    fn validation() {
        assert!(validate_segments(&[seg("a", 0, 3, 4)]).is_err());
        assert!(validate_segments(&[seg("a", 0, 1, 2), seg("a", 0, 2, 2)]).is_err());
        assert!(validate_segments(&[seg("a", 0, 1, 2), seg("b", 0, 1, 4)]).is_err());
    }
}
