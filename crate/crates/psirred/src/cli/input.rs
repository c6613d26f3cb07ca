//! Input documents: JSON schema, parsing and validation.
//!
//! A document describes a group, a finitely presented group of smooth
//! characters, a continuous character of the torus and engine options. All
//! rationals are strings of the form `"p/q"` or `"p"`; floats are rejected.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::charalg::{
    normalize_character, parse_q, AlgExp, ContinuousCharacter, CoordinateCharacter, GroupSpec,
    SmoothCharGroup,
};
use crate::criteria::Rank1Table;
use crate::error::{Error, Result};
use crate::glnd::SegmentDatum;
use crate::rootdata::{build_root_datum, Family, FieldData, RootDatum};

use super::Selector;

/// Version written to and accepted from documents.
pub const SCHEMA_VERSION: u32 = 1;

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

fn default_field() -> FieldData {
    FieldData::qp(3)
}

fn zero_string() -> String {
    "0".into()
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// The group block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupBlock {
    /// `GL`, `SL`, `Sp`, `SO`, `SOstar`, `U` or `GLD`.
    pub family: String,
    /// Matrix size (`n` for `GL(n)`, `2n` for `Sp(2n)`, ...).
    pub size: u32,
    /// Degree of the division algebra for `GLD`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
    /// The base field and, when needed, the quadratic extension.
    #[serde(default = "default_field")]
    pub field: FieldData,
}

/// One torus coordinate of the character.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacterEntry {
    /// Coordinates of the smooth part in the generators of `smooth_group`
    /// (empty means trivial).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub smooth: Vec<i64>,
    /// Exponent `s` of `|.|^s`.
    #[serde(default = "zero_string")]
    pub unram: String,
    /// Derivative exponents, one per embedding: `"p/q"`, `"generic"` or
    /// `"generic:NAME"`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alg: Vec<String>,
}

/// One cuspidal datum for `GL_n(D)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentEntry {
    /// Label of the `nu`-class.
    pub class_id: String,
    /// Integer shift inside the class.
    pub k: i64,
    /// The step `s(sigma)` dividing `d`.
    pub step: u32,
}

/// Caller-supplied rank-one verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rank1Entry {
    /// Reduced positive root in `e_i` coordinates.
    pub root: Vec<i64>,
    /// Whether the rank-one induction along the root is reducible.
    pub reducible: bool,
}

/// Engine options.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// Engine selector (default `auto`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theorem: Option<String>,
    /// Use the refined pole denominators.
    #[serde(default, skip_serializing_if = "is_false")]
    pub refined: bool,
    /// Maximal number of Weyl group elements to enumerate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weyl_budget: Option<u64>,
    /// Request the unitary-type criterion.
    #[serde(default, skip_serializing_if = "is_false")]
    pub unitary: bool,
    /// Denominator bounds `k_alpha` (one per simple root) for the relaxed cone.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_alpha: Option<Vec<u32>>,
    /// Rank-one case for the pole tables.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poles_case: Option<String>,
    /// Parameter `d` of the rank-one case `i`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poles_d: Option<u32>,
    /// Rank-one verdicts for roots not covered by the built-in rule.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rank1_table: Vec<Rank1Entry>,
}

/// A complete input document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    /// Must equal [`SCHEMA_VERSION`].
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    /// Optional label copied into the report.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// The group.
    pub group: GroupBlock,
    /// The group of smooth characters (default: trivial).
    #[serde(default)]
    pub smooth_group: GroupSpec,
    /// One entry per torus coordinate (empty means trivial).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub character: Vec<CharacterEntry>,
    /// Cuspidal data for `GL_n(D)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segments: Option<Vec<SegmentEntry>>,
    /// Engine options.
    #[serde(default)]
    pub options: Options,
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema {
        path: path.into(),
        message: message.into(),
    }
}

/// Parses a document, reporting the path of the first offending field.
pub fn parse_input(text: &str) -> Result<InputDocument> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: InputDocument = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        schema(
            if path == "." { String::new() } else { path },
            e.inner().to_string(),
        )
    })?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(schema(
            "schema_version",
            format!(
                "unsupported version {} (expected {SCHEMA_VERSION})",
                doc.schema_version
            ),
        ));
    }
    Ok(doc)
}

/// A validated document, ready for the engines.
#[derive(Debug, Clone)]
pub struct Prepared {
    /// The source document.
    pub doc: InputDocument,
    /// Root datum of the group.
    pub rd: RootDatum,
    /// The smooth character group.
    pub g: SmoothCharGroup,
    /// The character, normalized to the coordinate fields.
    pub chi: ContinuousCharacter,
    /// Segment data, if present.
    pub segments: Option<Vec<SegmentDatum>>,
    /// Rank-one table.
    pub rank1: Rank1Table,
    /// The selected engine.
    pub selector: Selector,
}

fn parse_alg(path: &str, s: &str, auto_name: String) -> Result<AlgExp> {
    let t = s.trim();
    if t == "generic" {
        return Ok(AlgExp::generic(auto_name));
    }
    if let Some(name) = t.strip_prefix("generic:") {
        if name.is_empty() {
            return Err(schema(path, "generic exponent needs a name after ':'"));
        }
        return Ok(AlgExp::generic(name));
    }
    parse_q(t)
        .map(AlgExp::exact)
        .map_err(|e| schema(path, e.to_string()))
}

/// Structure maps consulted by the engines that may run on this document.
fn required_maps(family: Family, selector: Selector) -> Vec<&'static str> {
    let classical = matches!(
        selector,
        Selector::Auto | Selector::ClassicalSmooth | Selector::ClassicalBanach | Selector::Rgroup
    );
    let mut v = Vec::new();
    if family.needs_extension() {
        v.push("involution");
    }
    if classical {
        match family {
            Family::SoStar => v.push("norm_pullback"),
            Family::UEven | Family::UOdd => {
                v.push("restriction");
                v.push("omega_ef");
            }
            _ => {}
        }
    }
    v
}

/// Validates a parsed document and builds the objects the engines need.
///
/// `selector_override` (from the command line) takes precedence over
/// `options.theorem`.
pub fn prepare(doc: InputDocument, selector_override: Option<Selector>) -> Result<Prepared> {
    let selector = match selector_override {
        Some(s) => s,
        None => match &doc.options.theorem {
            Some(t) => t
                .parse()
                .map_err(|e: Error| schema("options.theorem", e.to_string()))?,
            None => Selector::Auto,
        },
    };
    let family = Family::from_name(&doc.group.family, doc.group.size, doc.group.d)
        .map_err(|e| schema("group.family", e.to_string()))?;
    let rd = build_root_datum(family, doc.group.size, doc.group.field.clone())
        .map_err(|e| schema("group", e.to_string()))?;
    for map in required_maps(family, selector) {
        let spec = &doc.smooth_group;
        let present = match map {
            "involution" => spec.involution.is_some(),
            "norm_pullback" => spec.norm_pullback.is_some(),
            "restriction" => spec.restriction.is_some(),
            _ => spec.omega_ef.is_some(),
        };
        if !present {
            return Err(schema(
                format!("smooth_group.{map}"),
                format!(
                    "{} requires the map '{map}' for the selected engine",
                    rd.label()
                ),
            ));
        }
    }
    let g = SmoothCharGroup::new(doc.smooth_group.clone())
        .map_err(|e| schema("smooth_group", e.to_string()))?;

    let chi = if doc.character.is_empty() {
        ContinuousCharacter {
            coords: vec![CoordinateCharacter::trivial(&g, 0); rd.rank()],
        }
    } else {
        if doc.character.len() != rd.rank() {
            return Err(schema(
                "character",
                format!(
                    "{} has {} torus coordinates but {} were given",
                    rd.label(),
                    rd.rank(),
                    doc.character.len()
                ),
            ));
        }
        let mut coords = Vec::with_capacity(doc.character.len());
        for (i, c) in doc.character.iter().enumerate() {
            let smooth = if c.smooth.is_empty() {
                g.trivial()
            } else {
                g.element(&c.smooth)
                    .map_err(|e| schema(format!("character[{i}].smooth"), e.to_string()))?
            };
            let unram = parse_q(&c.unram)
                .map_err(|e| schema(format!("character[{i}].unram"), e.to_string()))?;
            let mut alg = Vec::with_capacity(c.alg.len());
            for (k, a) in c.alg.iter().enumerate() {
                alg.push(parse_alg(
                    &format!("character[{i}].alg[{k}]"),
                    a,
                    format!("a{}_{}", i + 1, k + 1),
                )?);
            }
            coords.push(CoordinateCharacter { smooth, unram, alg });
        }
        ContinuousCharacter { coords }
    };
    let chi = normalize_character(&rd, &g, chi).map_err(|e| schema("character", e.to_string()))?;

    let segments = match &doc.segments {
        None => None,
        Some(list) => {
            let d = match family {
                Family::GlD { d } => d,
                Family::Gl => 1,
                _ => {
                    return Err(schema(
                        "segments",
                        "segments are only meaningful for GL or GLD",
                    ))
                }
            };
            if list.len() != doc.group.size as usize {
                return Err(schema(
                    "segments",
                    format!("expected {} segments, found {}", doc.group.size, list.len()),
                ));
            }
            let segs: Vec<SegmentDatum> = list
                .iter()
                .map(|s| SegmentDatum {
                    class_id: s.class_id.clone(),
                    k: s.k,
                    step: s.step,
                    d,
                })
                .collect();
            crate::glnd::validate_segments(&segs).map_err(|e| schema("segments", e.to_string()))?;
            Some(segs)
        }
    };

    let mut rank1 = Rank1Table::new();
    let roots: BTreeSet<&[i64]> = rd.roots().iter().map(|r| r.vector.as_slice()).collect();
    for (i, e) in doc.options.rank1_table.iter().enumerate() {
        if !roots.contains(e.root.as_slice()) {
            return Err(schema(
                format!("options.rank1_table[{i}].root"),
                format!(
                    "{:?} is not a reduced positive root of {}",
                    e.root,
                    rd.label()
                ),
            ));
        }
        rank1.insert(e.root.clone(), e.reducible);
    }
    if let Some(k) = &doc.options.k_alpha {
        if k.len() != rd.simple_roots().len() {
            return Err(schema(
                "options.k_alpha",
                format!(
                    "expected {} entries, one per simple root",
                    rd.simple_roots().len()
                ),
            ));
        }
        if k.iter().any(|&x| x == 0 || x % 2 != 0) {
            return Err(schema(
                "options.k_alpha",
                "entries must be positive even integers",
            ));
        }
    }
    if selector == Selector::Poles && doc.options.poles_case.is_none() {
        return Err(schema(
            "options.poles_case",
            "the poles engine needs a rank-one case",
        ));
    }
    if let Some(c) = &doc.options.poles_case {
        crate::mupoles::RankOneCase::parse(c, doc.options.poles_d)
            .map_err(|e| schema("options.poles_case", e.to_string()))?;
    }
    if selector == Selector::Glnd && segments.is_none() {
        return Err(schema("segments", "the glnd engine needs a segments block"));
    }
    Ok(Prepared {
        doc,
        rd,
        g,
        chi,
        segments,
        rank1,
        selector,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document() {
        let doc = parse_input(r#"{"group": {"family": "GL", "size": 2}}"#).unwrap();
        let p = prepare(doc, None).unwrap();
        assert_eq!(p.rd.rank(), 2);
        assert!(p.chi.coords.iter().all(|c| c.is_trivial(&p.g)));
    }

    #[test]
    fn rationals_are_exact() {
        let doc = parse_input(
            r#"{"group": {"family": "GL", "size": 1}, "character": [{"unram": "-1/2"}]}"#,
        )
        .unwrap();
        let p = prepare(doc, None).unwrap();
        assert_eq!(p.chi.coords[0].unram, crate::linalg::qf(-1, 2));
        let bad = parse_input(
            r#"{"group": {"family": "GL", "size": 1}, "character": [{"unram": "0.5"}]}"#,
        )
        .unwrap();
        match prepare(bad, None) {
            Err(Error::Schema { path, .. }) => assert_eq!(path, "character[0].unram"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_map_is_named() {
        let doc = parse_input(
            r#"{"group": {"family": "SOstar", "size": 4,
                 "field": {"p": 3, "q": 3, "extension": {"e": 1, "f": 2}}},
                "smooth_group": {"generators": [], "involution": []}}"#,
        )
        .unwrap();
        match prepare(doc, Some(Selector::ClassicalSmooth)) {
            Err(Error::Schema { path, .. }) => assert_eq!(path, "smooth_group.norm_pullback"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_fields_rejected_with_path() {
        match parse_input(r#"{"group": {"family": "GL", "size": 2, "rank": 3}}"#) {
            Err(Error::Schema { path, .. }) => assert_eq!(path, "group.rank"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
