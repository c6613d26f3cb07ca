//! Input documents, engine dispatch, batch execution and deterministic
//! reports.
//!
//! Reports contain no timing or other run-dependent data; timing is added by
//! the binary in a separate envelope when requested.

pub mod input;
pub mod lemmas;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::charalg::ContinuousCharacter;
use crate::criteria::{
    check_classical_banach, check_classical_smooth_iff, check_gln_banach, check_rank1_split,
    check_smooth_via_rank1, check_split_banach, check_unitary_split, ConeMode, Status, TraceRecord,
    Verdict, Witness,
};
use crate::error::{Error, Result};
use crate::glnd::check_glnd_banach;
use crate::mupoles::{fmt_set, rank1_pole_set, s0_candidates, RankOneCase};
use crate::rgroups::{rgroup_rank_gso, rgroup_rank_gso_star, RGroupCount};
use crate::rootdata::{check_assumption_p, weyl_budget_from_env, Family};

pub use input::{parse_input, prepare, InputDocument, Prepared, SCHEMA_VERSION};

/// Engine selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Selector {
    /// Pick the first applicable engine.
    Auto,
    /// `GL(n)` / `SL(n)` sufficient criterion.
    Gln,
    /// Split-group sufficient criterion.
    Split,
    /// Classical groups, smooth iff criterion.
    ClassicalSmooth,
    /// Classical groups, Banach sufficient criterion.
    ClassicalBanach,
    /// Unitary-type iff criterion for split groups.
    Unitary,
    /// Semisimple rank one, split.
    Rank1,
    /// `GL_n(D)` segment criterion.
    Glnd,
    /// R-group count for `GSO(2n)` / `GSO*(2n)`.
    Rgroup,
    /// Rank-one pole tables.
    Poles,
    /// Smooth irreducibility through rank-one Levi subgroups.
    SmoothRank1,
}

impl Selector {
    /// All selectors, in documentation order.
    pub const ALL: [Selector; 11] = [
        Selector::Auto,
        Selector::Gln,
        Selector::Split,
        Selector::ClassicalSmooth,
        Selector::ClassicalBanach,
        Selector::Unitary,
        Selector::Rank1,
        Selector::Glnd,
        Selector::Rgroup,
        Selector::Poles,
        Selector::SmoothRank1,
    ];

    /// Command-line name.
    pub fn name(self) -> &'static str {
        match self {
            Selector::Auto => "auto",
            Selector::Gln => "gln",
            Selector::Split => "split",
            Selector::ClassicalSmooth => "classical-smooth",
            Selector::ClassicalBanach => "classical-banach",
            Selector::Unitary => "unitary",
            Selector::Rank1 => "rank1",
            Selector::Glnd => "glnd",
            Selector::Rgroup => "rgroup",
            Selector::Poles => "poles",
            Selector::SmoothRank1 => "smooth-rank1",
        }
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Selector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Selector::ALL
            .iter()
            .copied()
            .find(|x| x.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Selector::ALL.iter().map(|x| x.name()).collect();
                Error::Invalid(format!(
                    "unknown theorem '{s}' (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

/// Pole table payload.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PolesReport {
    /// The rank-one case.
    pub case: String,
    /// Whether refined denominators were used.
    pub refined: bool,
    /// Lattice denominator.
    pub denominator: u32,
    /// Candidate poles in `[-1/2, 1/2]`, ascending.
    pub poles: Vec<String>,
    /// The candidates with `0 <= s_0 <= 1/2`.
    pub s0_candidates: Vec<String>,
}

/// Pole table for a case.
pub fn poles_report(case: RankOneCase, refined: bool) -> PolesReport {
    PolesReport {
        case: case.to_string(),
        refined,
        denominator: case.denominator(refined),
        poles: fmt_set(&rank1_pole_set(case, refined)),
        s0_candidates: fmt_set(&s0_candidates(case, refined)),
    }
}

/// An engine tried by `auto`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Attempt {
    /// Selector name.
    pub theorem: String,
    /// Resulting status (absent for pole tables).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub status: Option<Status>,
}

/// Result of running one document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    /// Report format version.
    pub schema_version: u32,
    /// The document's `name`, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Group label, e.g. `Sp(4)`.
    pub group: String,
    /// The requested selector.
    pub selector: String,
    /// Engine verdict.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    /// Pole table, for the poles engine.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub poles: Option<PolesReport>,
    /// R-group count, for the rgroup engine.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rgroup: Option<RGroupCount>,
    /// Engines tried by `auto`, in order.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub auto_attempts: Vec<Attempt>,
    /// Standing-assumption warnings.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl Report {
    /// Status of the verdict, if the engine produced one.
    pub fn status(&self) -> Option<Status> {
        self.verdict.as_ref().map(|v| v.status)
    }

    /// Drops the trace records (keeping status, theorem and witness).
    pub fn without_trace(mut self) -> Report {
        if let Some(v) = self.verdict.as_mut() {
            v.trace.clear();
        }
        self
    }
}

/// Options from the command line that override the document.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Selector override.
    pub theorem: Option<Selector>,
    /// Force refined pole denominators.
    pub refined: bool,
    /// Weyl budget override.
    pub weyl_budget: Option<u64>,
}

struct Outcome {
    verdict: Option<Verdict>,
    poles: Option<PolesReport>,
    rgroup: Option<RGroupCount>,
}

impl Outcome {
    fn verdict(v: Verdict) -> Outcome {
        Outcome {
            verdict: Some(v),
            poles: None,
            rgroup: None,
        }
    }
}

/// Turns an engine error into a `PreconditionFailed` verdict.
fn error_verdict(theorem: &str, e: &Error) -> Verdict {
    Verdict {
        status: Status::PreconditionFailed,
        theorem_id: theorem.to_string(),
        witness: None,
        trace: vec![TraceRecord {
            condition_id: "engine".into(),
            text: e.to_string(),
            holds: false,
            witness: None,
        }],
        notes: Vec::new(),
    }
}

fn is_unitary_smooth(p: &Prepared) -> bool {
    p.chi
        .coords
        .iter()
        .all(|c| c.is_smooth() && c.unram == num_traits::Zero::zero())
}

fn run_rgroup(p: &Prepared) -> Result<Outcome> {
    let theorem;
    let count = match p.rd.family() {
        Family::SoEven => {
            theorem = "rgroup-gso";
            Some(rgroup_rank_gso(&p.g, &p.chi.smooth_parts())?)
        }
        Family::SoStar => {
            theorem = "rgroup-gso-star";
            let parts = p.chi.smooth_parts();
            let (last, rest) = parts.split_last().expect("rank >= 2");
            Some(rgroup_rank_gso_star(&p.g, rest, last)?)
        }
        _ => {
            theorem = "rgroup";
            None
        }
    };
    let mut trace = vec![TraceRecord {
        condition_id: "family".into(),
        text: "the group is SO(2n) or SOstar(2n) (similitude R-groups)".into(),
        holds: count.is_some(),
        witness: None,
    }];
    let Some(count) = count else {
        return Ok(Outcome::verdict(Verdict {
            status: Status::PreconditionFailed,
            theorem_id: theorem.into(),
            witness: None,
            trace,
            notes: Vec::new(),
        }));
    };
    let unitary = is_unitary_smooth(p);
    trace.push(TraceRecord {
        condition_id: "unitary".into(),
        text: "the character is smooth and unitary (all exponents vanish)".into(),
        holds: unitary,
        witness: None,
    });
    if !unitary {
        return Ok(Outcome::verdict(Verdict {
            status: Status::PreconditionFailed,
            theorem_id: theorem.into(),
            witness: None,
            trace,
            notes: Vec::new(),
        }));
    }
    let witness = count.witness.as_ref().map(|w| Witness::Subset {
        indices: w.iter().map(|i| i + 1).collect(),
    });
    trace.push(TraceRecord {
        condition_id: "trivial-r-group".into(),
        text: format!("the R-group is trivial (|R| = 2^{})", count.rank),
        holds: count.rank == 0,
        witness: witness.clone(),
    });
    let mut notes = Vec::new();
    if let Some(r) = count.rank_without_trivial {
        notes.push(format!(
            "excluding the trivial character from the set would give rank {r}"
        ));
    }
    Ok(Outcome {
        verdict: Some(Verdict {
            status: if count.rank == 0 {
                Status::Irreducible
            } else {
                Status::Reducible
            },
            theorem_id: theorem.into(),
            witness,
            trace,
            notes,
        }),
        poles: None,
        rgroup: Some(count),
    })
}

fn run_engine(sel: Selector, p: &Prepared, opts: &RunOptions, budget: u64) -> Result<Outcome> {
    let (rd, g, chi): (_, _, &ContinuousCharacter) = (&p.rd, &p.g, &p.chi);
    let v = match sel {
        Selector::Gln => check_gln_banach(rd, g, chi)?,
        Selector::Split => check_split_banach(rd, g, chi, budget)?,
        Selector::ClassicalSmooth => check_classical_smooth_iff(rd, g, chi)?,
        Selector::ClassicalBanach => check_classical_banach(rd, g, chi)?,
        Selector::Unitary => {
            let mode = match &p.doc.options.k_alpha {
                Some(k) => ConeMode::Relaxed(k.clone()),
                None => ConeMode::Dominant,
            };
            check_unitary_split(rd, g, chi, &mode)?
        }
        Selector::Rank1 => check_rank1_split(rd, g, chi)?,
        Selector::SmoothRank1 => check_smooth_via_rank1(rd, g, chi, &p.rank1, budget)?,
        Selector::Glnd => match &p.segments {
            Some(s) => check_glnd_banach(s)?,
            None => return Err(Error::Invalid("no segments block".into())),
        },
        Selector::Rgroup => return run_rgroup(p),
        Selector::Poles => {
            let case = RankOneCase::parse(
                p.doc.options.poles_case.as_deref().unwrap_or_default(),
                p.doc.options.poles_d,
            )?;
            return Ok(Outcome {
                verdict: None,
                poles: Some(poles_report(case, p.doc.options.refined || opts.refined)),
                rgroup: None,
            });
        }
        Selector::Auto => unreachable!("auto is resolved before dispatch"),
    };
    Ok(Outcome::verdict(v))
}

/// Engines `auto` tries, in order.
pub fn auto_candidates(p: &Prepared) -> Vec<Selector> {
    let mut v = Vec::new();
    if p.segments.is_some() {
        v.push(Selector::Glnd);
    }
    if p.doc.options.poles_case.is_some() {
        v.push(Selector::Poles);
    }
    if p.doc.options.unitary {
        v.push(Selector::Unitary);
    }
    let family = p.rd.family();
    if family.is_classical() && p.chi.is_smooth() {
        v.push(Selector::ClassicalSmooth);
    }
    if matches!(family, Family::Gl | Family::Sl) {
        v.push(Selector::Gln);
    }
    if family.is_split() {
        v.push(Selector::Split);
    }
    for s in [
        Selector::ClassicalBanach,
        Selector::Rank1,
        Selector::SmoothRank1,
        Selector::Gln,
        Selector::Split,
        Selector::Unitary,
    ] {
        if !v.contains(&s) {
            v.push(s);
        }
    }
    v
}

/// Runs the selected engine on a prepared document.
pub fn run(p: &Prepared, opts: &RunOptions) -> Report {
    let budget = opts
        .weyl_budget
        .or(p.doc.options.weyl_budget)
        .unwrap_or_else(weyl_budget_from_env);
    let selector = opts.theorem.unwrap_or(p.selector);
    let mut warnings = Vec::new();
    if let Some(w) = check_assumption_p(&p.rd) {
        warnings.push(w);
    }
    let mut attempts = Vec::new();
    let outcome = if selector == Selector::Auto {
        let mut chosen = None;
        let mut first_failure = None;
        for s in auto_candidates(p) {
            let out = run_engine(s, p, opts, budget)
                .unwrap_or_else(|e| Outcome::verdict(error_verdict(s.name(), &e)));
            let status = out.verdict.as_ref().map(|v| v.status);
            attempts.push(Attempt {
                theorem: s.name().into(),
                status,
            });
            if status != Some(Status::PreconditionFailed) {
                chosen = Some(out);
                break;
            }
            first_failure.get_or_insert(out);
        }
        chosen.or(first_failure).expect("at least one candidate")
    } else {
        run_engine(selector, p, opts, budget)
            .unwrap_or_else(|e| Outcome::verdict(error_verdict(selector.name(), &e)))
    };
    Report {
        schema_version: SCHEMA_VERSION,
        name: p.doc.name.clone(),
        group: p.rd.label(),
        selector: selector.name().into(),
        verdict: outcome.verdict,
        poles: outcome.poles,
        rgroup: outcome.rgroup,
        auto_attempts: attempts,
        warnings,
    }
}

/// Parses, validates and runs a document given as text.
pub fn run_text(text: &str, opts: &RunOptions) -> Result<Report> {
    let doc = parse_input(text)?;
    let p = prepare(doc, opts.theorem)?;
    Ok(run(&p, opts))
}

/// Reads and runs one file.
pub fn run_file(path: &Path, opts: &RunOptions) -> Result<Report> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    run_text(&text, opts)
}

/// One batch entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BatchEntry {
    /// Path of the input.
    pub source: String,
    /// The report, on success.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<Report>,
    /// The error, on failure.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Counts per outcome.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BatchSummary {
    /// Number of entries.
    pub total: usize,
    /// Entries per verdict status (`Table` for pole reports).
    pub by_status: BTreeMap<String, usize>,
    /// Entries that failed to parse or validate.
    pub errors: usize,
}

/// Result of a batch run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BatchReport {
    /// Report format version.
    pub schema_version: u32,
    /// Entries in input order.
    pub entries: Vec<BatchEntry>,
    /// Summary counts.
    pub summary: BatchSummary,
}

/// Expands directories into their `*.json` files (sorted); files are kept
/// as given.
pub fn expand_inputs(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut files: Vec<PathBuf> = std::fs::read_dir(p)
                .map_err(|e| Error::Io(format!("{}: {e}", p.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "json"))
                .collect();
            files.sort();
            out.extend(files);
        } else if p.exists() {
            out.push(p.clone());
        } else {
            return Err(Error::Io(format!(
                "{}: no such file or directory",
                p.display()
            )));
        }
    }
    Ok(out)
}

/// Runs many files in parallel; entries keep the input order.
pub fn run_batch(files: &[PathBuf], opts: &RunOptions) -> BatchReport {
    let entries: Vec<BatchEntry> = files
        .par_iter()
        .map(|f| {
            let source = f.display().to_string();
            match run_file(f, opts) {
                Ok(r) => BatchEntry {
                    source,
                    report: Some(r),
                    error: None,
                },
                Err(e) => BatchEntry {
                    source,
                    report: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let mut summary = BatchSummary {
        total: entries.len(),
        ..Default::default()
    };
    for e in &entries {
        match &e.report {
            Some(r) => {
                let key = match r.status() {
                    Some(s) => format!("{s:?}"),
                    None => "Table".into(),
                };
                *summary.by_status.entry(key).or_default() += 1;
            }
            None => summary.errors += 1,
        }
    }
    BatchReport {
        schema_version: SCHEMA_VERSION,
        entries,
        summary,
    }
}

fn witness_text(w: &Witness) -> String {
    match w {
        Witness::Pair { i, j } => format!("({i},{j})"),
        Witness::SignedPair { i, j, sign } => {
            format!("({i},{j}) sign {}", if *sign > 0 { "+" } else { "-" })
        }
        Witness::Index { i } => format!("i = {i}"),
        Witness::Root { root } => format!("root {root:?}"),
        Witness::Weyl { element } => format!("w = {element}"),
        Witness::Subset { indices } => format!("{{{}}}", join(indices)),
        Witness::Chain { indices } => format!("chain {}", join(indices)),
    }
}

fn join(v: &[usize]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Human-readable rendering of a report.
pub fn render_table(r: &Report) -> String {
    let mut out = String::new();
    let title = match &r.name {
        Some(n) => format!("{n} — {}", r.group),
        None => r.group.clone(),
    };
    out.push_str(&format!("{title}  [selector: {}]\n", r.selector));
    for w in &r.warnings {
        out.push_str(&format!("warning: {w}\n"));
    }
    if !r.auto_attempts.is_empty() {
        let tried: Vec<String> = r
            .auto_attempts
            .iter()
            .map(|a| match a.status {
                Some(s) => format!("{} ({s:?})", a.theorem),
                None => a.theorem.clone(),
            })
            .collect();
        out.push_str(&format!("auto: {}\n", tried.join(" -> ")));
    }
    if let Some(v) = &r.verdict {
        out.push_str(&format!(
            "theorem: {}\nstatus:  {:?}\n",
            v.theorem_id, v.status
        ));
        if let Some(w) = &v.witness {
            out.push_str(&format!("witness: {}\n", witness_text(w)));
        }
        if !v.trace.is_empty() {
            let width = v
                .trace
                .iter()
                .map(|t| t.condition_id.len())
                .max()
                .unwrap_or(0)
                .max(9);
            out.push_str(&format!(
                "{:<width$}  {:<5}  {}\n",
                "condition", "holds", "statement"
            ));
            for t in &v.trace {
                let mut line = format!(
                    "{:<width$}  {:<5}  {}",
                    t.condition_id,
                    if t.holds { "yes" } else { "NO" },
                    t.text
                );
                if let Some(w) = &t.witness {
                    line.push_str(&format!("  [{}]", witness_text(w)));
                }
                out.push_str(&line);
                out.push('\n');
            }
        }
        for n in &v.notes {
            out.push_str(&format!("note: {n}\n"));
        }
    }
    if let Some(p) = &r.poles {
        out.push_str(&format!(
            "case {}{}: poles in (1/{})Z within [-1/2, 1/2]\n  {{{}}}\n  s_0 >= 0: {{{}}}\n",
            p.case,
            if p.refined { " (refined)" } else { "" },
            p.denominator,
            p.poles.join(", "),
            p.s0_candidates.join(", ")
        ));
    }
    if let Some(c) = &r.rgroup {
        out.push_str(&format!("R-group: (Z/2)^{}\n", c.rank));
    }
    out
}

/// Human-readable rendering of a batch summary.
pub fn render_batch_table(b: &BatchReport) -> String {
    let mut out = String::new();
    for e in &b.entries {
        let outcome = match (&e.report, &e.error) {
            (Some(r), _) => match &r.verdict {
                Some(v) => format!("{:?} ({})", v.status, v.theorem_id),
                None => "table".into(),
            },
            (None, Some(err)) => format!("error: {err}"),
            _ => String::new(),
        };
        out.push_str(&format!("{}  {}\n", e.source, outcome));
    }
    out.push_str(&format!("total {}", b.summary.total));
    for (k, v) in &b.summary.by_status {
        out.push_str(&format!(", {k} {v}"));
    }
    out.push_str(&format!(", errors {}\n", b.summary.errors));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_json(s: &str) -> Report {
        run_text(s, &RunOptions::default()).unwrap()
    }

    #[test]
    fn auto_gl2_trivial() {
        let r = run_json(r#"{"group": {"family": "GL", "size": 2}}"#);
        let v = r.verdict.unwrap();
        assert_eq!(v.theorem_id, "gln-banach");
        assert_eq!(v.status, Status::Inconclusive);
        assert_eq!(v.witness, Some(Witness::Pair { i: 1, j: 2 }));
    }

    #[test]
    fn sp2_order_two_is_reducible() {
        let r = run_json(
            r#"{"group": {"family": "Sp", "size": 2},
                "smooth_group": {"generators": [{"name": "eta", "order": 2}]},
                "character": [{"smooth": [1]}],
                "options": {"theorem": "classical-smooth"}}"#,
        );
        let v = r.verdict.unwrap();
        assert_eq!(v.status, Status::Reducible);
        assert!(v
            .trace
            .iter()
            .any(|t| t.condition_id == "order-two" && !t.holds));
    }

    #[test]
    fn poles_iii1() {
        let r = run_json(
            r#"{"group": {"family": "GL", "size": 2}, "options": {"theorem": "poles", "poles_case": "iii1"}}"#,
        );
        assert_eq!(
            r.poles.unwrap().poles,
            vec!["-1/2", "-1/6", "0", "1/6", "1/2"]
        );
    }

    #[test]
    fn selectors_round_trip() {
        for s in Selector::ALL {
            assert_eq!(s.name().parse::<Selector>().unwrap(), s);
        }
        assert!("nope".parse::<Selector>().is_err());
    }

    #[test]
    fn empty_batch() {
        let b = run_batch(&[], &RunOptions::default());
        assert_eq!(b.summary, BatchSummary::default());
    }
}
