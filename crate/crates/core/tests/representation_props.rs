use isopair::bunches::{
    cross_check_isorep, enlarge_bunch, i_pair, isorep_to_representations, split_structure_check, representation_to_isoreps,
    standard_isorep, verify_bunch, verify_isorep, verify_lie_representation, BunchDocument, LieAlgebraDocument, LieAlgebraSpec,
    LieBunch,
};
use isopair::linalg::{inverse, Matrix};
use isopair::oscillator::{build_pair, resolve_params};
use isopair::quantum::representation::{from_blocks, hom_tautological, zero_extension};
use isopair::quantum::{
    find_representation, hidden_hamiltonian_audit, integrate_quantum, split_double, verify_representation, PairRepresentation,
    RepresentationDocument, SearchConfig,
};
use isopair::scalar::{int, rat, Rational};
use isopair::superalgebra::hom_pair;
use proptest::prelude::*;

fn small_int() -> impl Strategy<Value = Rational> {
    (-3i64..=3).prop_map(int)
}

fn invertible3() -> impl Strategy<Value = Matrix<Rational>> {
    prop::collection::vec(small_int(), 9)
        .prop_map(|v| Matrix::from_row_major(3, 3, v).unwrap())
        .prop_filter("invertible", |m| inverse(m, 0.0).is_ok())
}

fn scaled(rep: &PairRepresentation<Rational>, lambda: &Rational) -> PairRepresentation<Rational> {
    let inv = int(1) / lambda.clone();
    PairRepresentation::new(
        rep.dim_w,
        rep.t1.iter().map(|m| m.scale(lambda)).collect(),
        rep.t2.iter().map(|m| m.scale(&inv)).collect(),
        rep.grading,
    )
    .unwrap()
}

/// The hand-built `(2|1)` representation of the `{p,q},{a,b}` sub-pair, zero on `r`, `c`.
fn oscillator_rep(e1: Rational) -> PairRepresentation<Rational> {
    let two_e1 = int(2) * e1;
    let u = vec![Matrix::unit(1, 2, 0, 0), Matrix::unit(1, 2, 0, 1)];
    let v = vec![Matrix::unit(2, 1, 0, 0).scale(&two_e1), Matrix::unit(2, 1, 1, 0).scale(&-two_e1.clone())];
    zero_extension(&from_blocks(2, 1, &u, &v).unwrap(), 3, 3, &[0, 1], &[0, 1]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// `T1 -> l T1`, `T2 -> T2 / l` maps representations to representations.
    #[test]
    fn rescaled_tautological_rep_stays_valid(n in 1usize..3, m in 1usize..3, num in 1i64..5, den in 1i64..5, neg: bool) {
        let lambda = rat(if neg { -num } else { num }, den);
        let rep = scaled(&hom_tautological(n, m).unwrap(), &lambda);
        let r = verify_representation(&rep, &hom_pair(n, m).unwrap(), 0.0).unwrap();
        prop_assert!(r.passed && r.flags["split"] && r.flags["nilpotent"]);
        prop_assert!(verify_representation(&split_double(&rep), &hom_pair(n, m).unwrap(), 0.0).unwrap().passed);
    }

    #[test]
    fn scaling_one_side_alone_breaks_the_rep(num in 2i64..5) {
        let rep = hom_tautological(2, 1).unwrap();
        let bad = PairRepresentation::new(rep.dim_w, rep.t1.iter().map(|x| x.scale(&int(num))).collect(), rep.t2.clone(), rep.grading).unwrap();
        let r = verify_representation(&bad, &hom_pair(2, 1).unwrap(), 0.0).unwrap();
        prop_assert!(!r.passed);
        prop_assert!(r.worst_failure().unwrap().witness.is_some());
    }

    #[test]
    fn oscillator_sub_rep_is_exact_for_every_coupling(e1 in (-6i64..=6, 1i64..=4), e2 in 1i64..=5, e3 in 1i64..=5) {
        let e1 = rat(e1.0, e1.1);
        let pair = build_pair(&resolve_params(e1.clone(), int(e2), int(e3)).unwrap()).unwrap().pair;
        let r = verify_representation(&oscillator_rep(e1), &pair, 0.0).unwrap();
        prop_assert!(r.passed && r.flags["split"] && r.flags["nilpotent"]);
    }

    #[test]
    fn isoreps_from_adjoint_and_invertible_q(q in invertible3()) {
        let g = LieAlgebraSpec::<Rational>::sl2();
        let (plus, minus) = representation_to_isoreps(&g.adjoint(), &q, 0.0).unwrap();
        for iso in [&plus, &minus] {
            let cc = cross_check_isorep(iso, &g, 0.0).unwrap();
            prop_assert!(cc.direct.passed && cc.via_pair.passed && cc.agree);
        }
        // Q T+ and T- Q give back ad
        let (back, _) = isorep_to_representations(&plus);
        prop_assert_eq!(back, g.adjoint());
        let (_, back) = isorep_to_representations(&minus);
        prop_assert_eq!(back, g.adjoint());
    }

    #[test]
    fn corrupted_isoreps_fail_on_both_routes(q in invertible3(), gen in 0usize..3, i in 0usize..3, j in 0usize..3) {
        let g = LieAlgebraSpec::<Rational>::sl2();
        let (mut iso, _) = representation_to_isoreps(&g.adjoint(), &q, 0.0).unwrap();
        let mut t = iso.t[gen].clone();
        t[(i, j)] = t[(i, j)].clone() + int(1);
        iso.t[gen] = t;
        let cc = cross_check_isorep(&iso, &g, 0.0).unwrap();
        prop_assert!(cc.agree);
    }
}

#[test]
fn search_recovers_hom_pair_class_deterministically() {
    let pair = hom_pair(2, 1).unwrap().to_f64();
    let cfg = SearchConfig { seeds: 16, ..Default::default() };
    let a = find_representation(&pair, 2, 1, &cfg).unwrap();
    let b = find_representation(&pair, 2, 1, &cfg).unwrap();
    assert!(a.success && a.residual < 1e-10);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let r = verify_representation(&a.rep, &pair, 1e-10).unwrap();
    assert!(r.flags["split"] && r.flags["nilpotent"]);
}

#[test]
fn search_rejects_empty_requests() {
    let pair = hom_pair(1, 1).unwrap().to_f64();
    assert!(find_representation(&pair, 0, 1, &SearchConfig::default()).is_err());
    let cfg = SearchConfig { seeds: 0, ..Default::default() };
    assert!(find_representation(&pair, 1, 1, &cfg).is_err());
}

#[test]
fn quantum_flow_preserves_relations_of_exact_rep() {
    let e = resolve_params(1.0, 3.0, 3.0).unwrap();
    let rep = oscillator_rep(int(1)).to_f64();
    let traj = integrate_quantum(&rep, &e, 0.5, 1e-3).unwrap();
    assert_eq!(traj.initial_residual, 0.0);
    assert!(traj.drift < 1e-9, "{}", traj.drift);
    let mut csv = Vec::new();
    traj.write_csv(&mut csv, 100).unwrap();
    let mut reader = csv::Reader::from_reader(csv.as_slice());
    let header = reader.headers().unwrap().clone();
    assert_eq!(header.len(), 2 + 18);
    assert_eq!(&header[2], "[p,q]_a");
    assert_eq!(reader.records().count(), 6);
}

#[test]
fn hidden_hamiltonian_generates_the_flow_of_the_sub_rep() {
    let e = resolve_params(1.0, 3.0, 3.0).unwrap();
    let audit = hidden_hamiltonian_audit(&oscillator_rep(int(1)).to_f64(), &e, 1e-8).unwrap();
    assert!(audit.confirmed && audit.normalized);
    assert_eq!(audit.residuals.len(), 6);
}

#[test]
fn representation_document_round_trip_is_exact() {
    let rep = oscillator_rep(rat(-3, 2));
    let doc = RepresentationDocument::from_rep(&rep);
    let text = serde_json::to_string(&doc).unwrap();
    let back: RepresentationDocument = serde_json::from_str(&text).unwrap();
    assert_eq!(back.to_rational().unwrap(), rep);
    assert!(serde_json::from_str::<RepresentationDocument>(r#"{"dimW":1,"t1":[],"t2":[],"extra":1}"#).is_err());
}

#[test]
fn standard_isorep_and_split_structure_for_sl2() {
    let g = LieAlgebraSpec::<Rational>::sl2();
    let std = standard_isorep(&g);
    assert!(verify_isorep(&std, &g, 0.0).unwrap().passed);
    let s = split_structure_check(&std, &g, 0.0).unwrap();
    assert!(s.consistent && s.q_is_isomorphism);
    assert!(s.rho1_is_representation && s.rho2_is_representation);
    assert!(verify_lie_representation(&g.adjoint(), &g, 0.0).unwrap().passed);
}

#[test]
fn i_pair_of_sl2_and_zero_bunch_enlargement_agree() {
    let g = LieAlgebraSpec::<Rational>::sl2();
    let direct = i_pair(&g).unwrap();
    let via = enlarge_bunch(&LieBunch::zero(g.clone()), 0.0).unwrap();
    assert_eq!(direct, via);
    let (report, _) = verify_bunch(&LieBunch::zero(g), 0.0).unwrap();
    assert!(report.report.passed && report.complete);
}

#[test]
fn json_documents_for_lie_algebras_and_bunches() {
    let g = LieAlgebraSpec::<Rational>::sl2();
    let doc = LieAlgebraDocument::from_spec(&g).unwrap();
    let back: LieAlgebraDocument = serde_json::from_str(&serde_json::to_string(&doc).unwrap()).unwrap();
    assert_eq!(back.into_spec().unwrap().constants, g.constants);

    let text = r#"{"g": {"dim": 1, "constants": []}, "dim": 2, "action": [], "brackets": [[0, 0, 1, 0, 0, 1]]}"#;
    let bunch: BunchDocument = serde_json::from_str(text).unwrap();
    let bunch = bunch.into_bunch().unwrap();
    let (report, _) = verify_bunch(&bunch, 0.0).unwrap();
    assert!(report.report.passed);
}
