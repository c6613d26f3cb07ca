//! Property tests for structural invariants of the library.

use std::collections::BTreeSet;

use num_traits::ToPrimitive;
use proptest::prelude::*;

use psirred::charalg::{
    act_on_character, ContinuousCharacter, CoordinateCharacter, GeneratorSpec, GroupSpec,
    SmoothCharGroup,
};
use psirred::cli::input::parse_input;
use psirred::criteria::{check_gln_banach, check_split_banach, Status};
use psirred::glnd::{check_glnd_banach, detect_bad_chain, SegmentDatum};
use psirred::linalg::qf;
use psirred::mupoles::is_g_regular;
use psirred::rgroups::rgroup_rank_gso;
use psirred::rootdata::{build_root_datum, Family, FieldData, RootDatum};

fn group_with(orders: &[u64], relations: Vec<Vec<i64>>) -> SmoothCharGroup {
    SmoothCharGroup::new(GroupSpec {
        generators: orders
            .iter()
            .enumerate()
            .map(|(i, &o)| GeneratorSpec {
                name: format!("g{}", i + 1),
                order: o,
            })
            .collect(),
        relations,
        ..Default::default()
    })
    .expect("valid group")
}

fn gl(n: u32) -> RootDatum {
    build_root_datum(Family::Gl, n, FieldData::qp(3)).unwrap()
}

/// Split-group characters built from `(smooth coordinates, 4 * exponent)`.
fn character(g: &SmoothCharGroup, entries: &[(Vec<i64>, i64)]) -> ContinuousCharacter {
    ContinuousCharacter {
        coords: entries
            .iter()
            .map(|(v, s)| CoordinateCharacter::twisted(g.element(v).unwrap(), qf(*s, 4), 1))
            .collect(),
    }
}

fn entries(n: usize) -> impl Strategy<Value = Vec<(Vec<i64>, i64)>> {
    prop::collection::vec((prop::collection::vec(0i64..6, 2), -8i64..=8), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The number of distinct elements obtained from all coordinate vectors
    /// in the box of generator orders equals the order predicted by the
    /// Smith invariant factors.
    #[test]
    fn smith_order_matches_enumeration(
        orders in prop::collection::vec(1u64..7, 1..4),
        rel in prop::collection::vec(-3i64..4, 3),
    ) {
        let m = orders.len();
        let relation: Vec<i64> = rel.into_iter().take(m).chain(std::iter::repeat(0)).take(m).collect();
        let g = group_with(&orders, vec![relation]);
        let mut seen = BTreeSet::new();
        let total: u64 = orders.iter().product();
        for code in 0..total {
            let mut c = code;
            let v: Vec<i64> = orders.iter().map(|&o| { let x = c % o; c /= o; x as i64 }).collect();
            seen.insert(g.element(&v).unwrap());
        }
        let predicted: u64 = g.invariant_factors().iter().map(|f| f.to_u64().unwrap()).product();
        prop_assert!(g.is_finite());
        prop_assert_eq!(seen.len() as u64, predicted);
    }

    /// Multiplying every coordinate by one fixed character changes neither
    /// the status nor the failing witnesses of the GL(n) engine.
    #[test]
    fn gln_central_twist_invariance(
        chi in (2usize..6).prop_flat_map(entries),
        twist in (prop::collection::vec(0i64..6, 2), -8i64..=8),
    ) {
        let g = group_with(&[2, 3], vec![]);
        let rd = gl(chi.len() as u32);
        let base = character(&g, &chi);
        let shifted: Vec<(Vec<i64>, i64)> = chi
            .iter()
            .map(|(v, s)| (v.iter().zip(&twist.0).map(|(a, b)| a + b).collect(), s + twist.1))
            .collect();
        let a = check_gln_banach(&rd, &g, &base).unwrap();
        let b = check_gln_banach(&rd, &g, &character(&g, &shifted)).unwrap();
        prop_assert_eq!(a.status, b.status);
        prop_assert_eq!(a.failing_witnesses(), b.failing_witnesses());
    }

    /// One-directional engines never claim reducibility.
    #[test]
    fn sufficient_engines_never_reducible(chi in (2usize..5).prop_flat_map(entries)) {
        let g = group_with(&[2, 3], vec![]);
        let rd = gl(chi.len() as u32);
        let c = character(&g, &chi);
        prop_assert_ne!(check_gln_banach(&rd, &g, &c).unwrap().status, Status::Reducible);
        prop_assert_ne!(check_split_banach(&rd, &g, &c, 10_000).unwrap().status, Status::Reducible);
    }

    /// G-regularity is a property of the Weyl orbit.
    #[test]
    fn regularity_is_weyl_invariant(chi in entries(2), pick in 0usize..8) {
        let g = group_with(&[2, 3], vec![]);
        let rd = build_root_datum(Family::Sp, 4, FieldData::qp(3)).unwrap();
        let c = character(&g, &chi);
        let w = rd.weyl_elements(&rd.full_subset(), 100).unwrap();
        let x = &w.elements[pick % w.elements.len()];
        let moved = act_on_character(&rd, &g, x, &c).unwrap();
        prop_assert_eq!(
            is_g_regular(&rd, &g, &c, 100).unwrap().regular,
            is_g_regular(&rd, &g, &moved, 100).unwrap().regular
        );
    }

    /// The R-group rank depends only on the set of characters.
    #[test]
    fn rgroup_rank_is_a_set_function(
        coords in prop::collection::vec(prop::collection::vec(0i64..2, 3), 0..8),
        perm_seed in any::<u64>(),
    ) {
        let g = group_with(&[2, 2, 4], vec![]);
        let chars: Vec<_> = coords
            .iter()
            .map(|v| g.element(&[v[0], v[1], 2 * v[2]]).unwrap())
            .collect();
        let mut shuffled = chars.clone();
        if !shuffled.is_empty() {
            shuffled.rotate_left((perm_seed as usize) % chars.len());
            shuffled.reverse();
            shuffled.push(shuffled[0].clone());
        }
        prop_assert_eq!(
            rgroup_rank_gso(&g, &chars).unwrap().rank,
            rgroup_rank_gso(&g, &shuffled).unwrap().rank
        );
    }

    /// Every Weyl group element permutes the reduced roots up to sign and
    /// preserves multiplicities.
    #[test]
    fn weyl_action_preserves_multiplicities(family in 0usize..4, pick in any::<usize>()) {
        let (f, s) = [(Family::Sp, 6), (Family::SoOdd, 7), (Family::UOdd, 5), (Family::SoEven, 8)][family];
        let field = FieldData {
            extension: f.needs_extension().then_some(psirred::rootdata::Extension { e: 1, f: 2 }),
            ..FieldData::qp(3)
        };
        let rd = build_root_datum(f, s, field).unwrap();
        let w = rd.weyl_elements(&rd.full_subset(), 10_000).unwrap();
        let x = &w.elements[pick % w.elements.len()];
        for root in rd.roots() {
            let img = x.act_int(&root.vector);
            let (_, j) = rd.signed_root_index(&img).expect("image is a root");
            prop_assert_eq!(rd.roots()[j].multiplicity, root.multiplicity);
            prop_assert_eq!(rd.roots()[j].doubled, root.doubled);
        }
    }

    /// The GL(n, D) engine concludes `Irreducible` exactly when no chain
    /// exists, and never fails on valid data.
    #[test]
    fn glnd_verdict_matches_chain(
        segs in prop::collection::vec((0usize..2, 0i64..5), 1..8),
        step in prop::sample::select(vec![1u32, 2, 4]),
    ) {
        let data: Vec<SegmentDatum> = segs
            .iter()
            .map(|&(c, k)| SegmentDatum { class_id: ["x", "y"][c].into(), k, step, d: 4 })
            .collect();
        let v = check_glnd_banach(&data).unwrap();
        prop_assert_eq!(v.status == Status::Irreducible, detect_bad_chain(&data).is_none());
    }
}

/// Serializing a parsed document and parsing it again is the identity.
#[test]
fn corpus_documents_round_trip() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let doc = parse_input(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let again = parse_input(&serde_json::to_string(&doc).unwrap()).unwrap();
        assert_eq!(doc, again, "{}", path.display());
        n += 1;
    }
    assert!(n >= 20);
}
