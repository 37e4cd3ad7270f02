use isopair::algebra::axioms::expand_bracket;
use isopair::algebra::pair::PairDocument;
use isopair::algebra::{to_alts, verify_alts, verify_anti_jordan, verify_isotopic_pair};
use isopair::oscillator::{build_pair, resolve_params};
use isopair::scalar::{int, rat, Rational};
use isopair::superalgebra::{build_super, hom_pair, verify_super};
use isopair::{IsotopicPair, Side};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=6).prop_map(|(n, d)| rat(n, d))
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    rational().prop_filter("nonzero", |r| *r != int(0))
}

fn unit(n: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![int(0); n];
    v[i] = int(1);
    v
}

fn sub(x: Vec<Rational>, y: &[Rational]) -> Vec<Rational> {
    x.into_iter().zip(y).map(|(a, b)| a - b).collect()
}

fn add(x: Vec<Rational>, y: &[Rational]) -> Vec<Rational> {
    x.into_iter().zip(y).map(|(a, b)| a + b).collect()
}

/// `[X,Y]_{[A,B]_Z} - [[X,Z]_A,Y]_B - [[Z,Y]_A,X]_B + [[X,Y]_B,Z]_A`, expanded densely.
fn anti_jordan_dense(
    pair: &IsotopicPair<Rational>,
    side: Side,
    x: &[Rational],
    y: &[Rational],
    z: &[Rational],
    a: &[Rational],
    b: &[Rational],
) -> Vec<Rational> {
    let br = |s: Side, i: &[Rational], u: &[Rational], v: &[Rational]| expand_bracket(pair, s, i, u, v);
    let ab_z = br(side.other(), z, a, b);
    let lhs = br(side, &ab_z, x, y);
    let t1 = br(side, b, &br(side, a, x, z), y);
    let t2 = br(side, b, &br(side, a, z, y), x);
    let t3 = br(side, a, &br(side, b, x, y), z);
    add(sub(sub(lhs, &t1), &t2), &t3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn oscillator_pairs_satisfy_all_axioms_exactly(e1 in rational(), e2 in nonzero_rational(), e3 in nonzero_rational()) {
        let pair = build_pair(&resolve_params(e1, e2, e3).unwrap()).unwrap().pair;
        let iso = verify_isotopic_pair(&pair, 0.0);
        prop_assert!(iso.passed, "{}", iso.summary());
        prop_assert!(verify_anti_jordan(&pair, 0.0).passed);
        prop_assert!(verify_alts(&to_alts(&pair), 0.0).passed);
    }

    #[test]
    fn sparse_bracket_agrees_with_dense_expansion(
        e1 in rational(), e2 in nonzero_rational(), e3 in nonzero_rational(),
        a in prop::collection::vec(rational(), 3),
        x in prop::collection::vec(rational(), 3),
        y in prop::collection::vec(rational(), 3),
    ) {
        let pair = build_pair(&resolve_params(e1, e2, e3).unwrap()).unwrap().pair;
        for side in [Side::V1, Side::V2] {
            let fast = pair.isobracket(side, &a, &x, &y).unwrap();
            prop_assert_eq!(&fast, &expand_bracket(&pair, side, &a, &x, &y));
            let swapped = pair.isobracket(side, &a, &y, &x).unwrap();
            prop_assert!(fast.iter().zip(&swapped).all(|(u, v)| u.clone() + v.clone() == int(0)));
        }
    }

    #[test]
    fn anti_jordan_report_agrees_with_dense_identity(
        e1 in rational(), e2 in nonzero_rational(), e3 in nonzero_rational(),
        iso in 0usize..3, out in 0usize..3, bump in rational(),
        v in prop::collection::vec(rational(), 15),
    ) {
        let mut pair = build_pair(&resolve_params(e1, e2, e3).unwrap()).unwrap().pair;
        let old = pair.m1().get(iso, 0, 1, out).clone();
        pair.set(Side::V1, iso, 0, 1, out, old + bump);
        let report = verify_anti_jordan(&pair, 0.0);
        match report.worst_failure() {
            None => {
                for side in [Side::V1, Side::V2] {
                    let r = anti_jordan_dense(&pair, side, &v[0..3], &v[3..6], &v[6..9], &v[9..12], &v[12..15]);
                    prop_assert!(r.iter().all(|c| *c == int(0)));
                }
            }
            Some(check) => {
                let side = if check.name.ends_with("V1") { Side::V1 } else { Side::V2 };
                let w = &check.witness.as_ref().unwrap().indices;
                let (n, m) = (pair.dim(side), pair.dim(side.other()));
                let r = anti_jordan_dense(&pair, side, &unit(n, w[0]), &unit(n, w[1]), &unit(n, w[2]), &unit(m, w[3]), &unit(m, w[4]));
                prop_assert!(r.iter().any(|c| *c != int(0)));
            }
        }
    }

    #[test]
    fn pair_document_round_trip(e1 in rational(), e2 in nonzero_rational(), e3 in nonzero_rational()) {
        let pair = build_pair(&resolve_params(e1, e2, e3).unwrap()).unwrap().pair;
        let doc = PairDocument::from_pair(&pair).unwrap();
        let text = serde_json::to_string(&doc).unwrap();
        let back: PairDocument = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.into_pair().unwrap(), pair);
    }
}

#[test]
fn oscillator_superalgebra_shape_at_generic_points() {
    for (e1, e2, e3) in [(int(1), int(3), int(3)), (rat(2, 3), int(5), int(7)), (int(-2), int(1), rat(1, 2))] {
        let pair = build_pair(&resolve_params(e1, e2, e3).unwrap()).unwrap().pair;
        let sa = build_super(&to_alts(&pair), 0.0).unwrap();
        assert_eq!(sa.superdimension(), (6, 6));
        assert!(verify_super(&sa, 0.0).passed);
    }
}

#[test]
fn hom_pairs_give_consistent_superalgebras() {
    for (n, m) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
        let pair = hom_pair(n, m).unwrap();
        assert!(verify_isotopic_pair(&pair, 0.0).passed, "hom({n},{m})");
        let sa = build_super(&to_alts(&pair), 0.0).unwrap();
        assert_eq!(sa.superdimension().1, 2 * n * m);
        assert!(verify_super(&sa, 0.0).passed);
    }
}

/// The even part is the image of `sl(n|m)_0` acting on the odd part: `n^2 + m^2 - 1`,
/// less one more when `n = m` and the identity acts trivially.
#[test]
fn hom_pair_even_part_dimensions() {
    let dims: Vec<_> = [(1, 1), (2, 1), (2, 2)]
        .iter()
        .map(|&(n, m)| build_super(&to_alts(&hom_pair(n, m).unwrap()), 0.0).unwrap().superdimension())
        .collect();
    assert_eq!(dims, [(0, 2), (4, 4), (6, 8)]);
}

#[test]
fn oscillator_brackets_match_generators() {
    let pair = build_pair(&resolve_params(int(1), int(3), int(3)).unwrap()).unwrap().pair;
    // [p, r]_a = e2 r
    assert_eq!(pair.isobracket(Side::V1, &unit(3, 0), &unit(3, 0), &unit(3, 2)).unwrap(), vec![int(0), int(0), int(3)]);
    // [a, b]_r = t3 c
    assert_eq!(pair.isobracket(Side::V2, &unit(3, 2), &unit(3, 0), &unit(3, 1)).unwrap(), vec![int(0), int(0), int(1)]);
}
