use isopair::classical::{
    integrate_full, invariants, lie_poisson_rhs, reduce_and_integrate, rhs_full, ClassicalState, OSCILLATOR_WEIGHTS,
};
use isopair::errata::{chi_rate, theta_rate};
use isopair::linalg::Matrix;
use isopair::ode::Method;
use isopair::oscillator::{build_pair, resolve_params, EpsilonParams};
use isopair::quantum::dynamics::{quantum_rhs_from_pair, relation_defects, relation_ids, Operators};
use isopair::quantum::quantum_rhs;
use proptest::prelude::*;

fn params() -> impl Strategy<Value = EpsilonParams<f64>> {
    (-2.0f64..2.0, 0.5f64..3.0, 0.5f64..3.0).prop_filter_map("regular point", |(e1, e2, e3)| {
        let e = resolve_params(e1, e2, e3).ok()?;
        ((e.eps2 + e.eps_t2).abs() > 0.1 && (e.eps3 + e.eps_t3).abs() > 0.1).then_some(e)
    })
}

fn state() -> impl Strategy<Value = ClassicalState> {
    prop::array::uniform6(-2.0f64..2.0).prop_map(ClassicalState::from_array)
}

fn positive_state() -> impl Strategy<Value = ClassicalState> {
    (prop::array::uniform6(-2.0f64..2.0), 0.2f64..2.0, 0.2f64..2.0).prop_map(|(mut v, r, c)| {
        v[2] = r;
        v[5] = c;
        ClassicalState::from_array(v)
    })
}

fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= 1e-9 * scale.max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn displayed_equations_equal_lie_poisson_flow(e in params(), s in state()) {
        let pair = build_pair(&e).unwrap().pair;
        let v = s.to_array();
        let (dx, dy) = lie_poisson_rhs(&pair, &OSCILLATOR_WEIGHTS, &OSCILLATOR_WEIGHTS, &v[..3], &v[3..]);
        let d = rhs_full(&s, &e).to_array();
        for (k, g) in dx.iter().chain(&dy).enumerate() {
            prop_assert!(close(*g, d[k], d[k].abs()), "component {k}: {g} vs {}", d[k]);
        }
    }

    #[test]
    fn amplitudes_and_mixed_integral_are_stationary(e in params(), s in positive_state()) {
        let d = rhs_full(&s, &e);
        let k = (e.eps2 + e.eps_t2) / (e.eps3 + e.eps_t3);
        let i1 = 2.0 * (s.p * d.p + s.q * d.q);
        let i2 = 2.0 * (s.a * d.a + s.b * d.b);
        let l = d.r * s.c + s.r * d.c - k * (d.q * s.a + s.q * d.a + d.p * s.b + s.p * d.b);
        let scale = s.to_array().iter().map(|x| x.abs()).fold(1.0, f64::max).powi(4) * 100.0;
        prop_assert!(close(i1, 0.0, scale) && close(i2, 0.0, scale) && close(l, 0.0, scale), "{i1} {i2} {l}");
    }

    #[test]
    fn lambda_is_stationary_by_chain_rule(e in params(), s in positive_state()) {
        let d = rhs_full(&s, &e);
        // d/dt (t2 ln R - e2 ln C)
        let rate = e.eps_t2 * d.r / s.r - e.eps2 * d.c / s.c;
        prop_assert!(close(rate, 0.0, 100.0 * (d.r / s.r).abs().max((d.c / s.c).abs())));
        let inv = invariants(&s, &e).unwrap();
        prop_assert!(inv.lambda.unwrap() > 0.0);
    }

    #[test]
    fn angle_laws_match_equations_of_motion(e in params(), s in state()) {
        let i1 = s.p.hypot(s.q);
        let i2 = s.a.hypot(s.b);
        prop_assume!(i1 > 0.1 && i2 > 0.1);
        let theta = s.q.atan2(s.p) + s.b.atan2(s.a);
        let rc = s.r * s.c;
        let expected_theta = 2.0 * (e.eps3 + e.eps_t3) * rc + 4.0 * (e.eps1 + e.eps_t1) * i1 * i2 * theta.sin();
        let expected_chi = 4.0 * (e.eps3 * e.eps_t1 - e.eps_t3 * e.eps1) * i1 * i2 * theta.sin();
        prop_assert!(close(theta_rate(&s, &e).unwrap(), expected_theta, 100.0));
        prop_assert!(close(chi_rate(&s, &e).unwrap(), expected_chi, 100.0));
    }

    #[test]
    fn scalar_operators_reduce_to_classical_flow(e in params(), s in state()) {
        let ops: Operators = s.to_array().map(|x| Matrix::from_row_major(1, 1, vec![x]).unwrap());
        let d = quantum_rhs(&ops, &e).unwrap();
        let c = rhs_full(&s, &e).to_array();
        for k in 0..6 {
            prop_assert!(close(d[k][(0, 0)], c[k], c[k].abs()));
        }
    }

    #[test]
    fn operator_equations_equal_structure_constant_route(
        e in params(),
        entries in prop::collection::vec(-1.0f64..1.0, 6 * 9),
    ) {
        let ops: Operators = std::array::from_fn(|k| Matrix::from_row_major(3, 3, entries[9 * k..9 * k + 9].to_vec()).unwrap());
        let pair = build_pair(&e).unwrap().pair;
        let d = quantum_rhs(&ops, &e).unwrap();
        let (d1, d2) = quantum_rhs_from_pair(&pair, &OSCILLATOR_WEIGHTS, &OSCILLATOR_WEIGHTS, &ops[..3], &ops[3..]);
        for (a, b) in d.iter().zip(d1.iter().chain(&d2)) {
            prop_assert!(a.sub(b).max_abs() < 1e-9);
        }
    }
}

#[test]
fn sign_of_r_and_c_is_preserved() {
    let e = resolve_params(1.0, 3.0, 3.0).unwrap();
    for s0 in [[0.3, -0.8, 0.5, 1.2, 0.1, -0.4], [1.0, 1.0, -2.0, -1.0, 0.5, 0.7]] {
        let traj = integrate_full(&ClassicalState::from_array(s0), &e, 2.0, 1e-3, Method::Rk4).unwrap();
        let d = traj.drift(&e).unwrap();
        assert!(d.r_sign_preserved && d.c_sign_preserved);
        assert!(d.lambda.is_none(), "Lambda needs R, C > 0");
        assert!(d.i1sq < 1e-9 && d.i2sq < 1e-9 && d.l < 1e-9, "{d:?}");
    }
}

#[test]
fn zero_state_is_a_fixed_point() {
    let e = resolve_params(1.0, 3.0, 3.0).unwrap();
    let traj = integrate_full(&ClassicalState::ZERO, &e, 1.0, 0.1, Method::Rk4).unwrap();
    assert!(traj.states.iter().all(|s| *s == ClassicalState::ZERO));
}

#[test]
fn adaptive_and_fixed_step_agree() {
    let e = resolve_params(1.0, 3.0, 3.0).unwrap();
    let s0 = ClassicalState::from_array([1.0, 0.0, 1.0, 0.0, 1.0, 1.0]);
    let a = integrate_full(&s0, &e, 5.0, 0.01, Method::Rk45).unwrap();
    let b = integrate_full(&s0, &e, 5.0, 0.001, Method::Rk4).unwrap();
    let last_a = a.states.last().unwrap().to_array();
    let last_b = b.states.last().unwrap().to_array();
    let gap = last_a.iter().zip(last_b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(gap < 1e-6, "{gap}");
    assert!(a.drift(&e).unwrap().max_conserved() < 1e-6);
}

#[test]
fn reduction_reconstructs_off_the_worked_example() {
    let e = resolve_params(0.5, 2.0, 1.5).unwrap();
    let s0 = ClassicalState::from_array([0.8, 0.3, 0.6, -0.2, 0.9, 1.1]);
    let red = reduce_and_integrate(&s0, &e, 3.0, 1e-3).unwrap();
    assert!(red.reconstruction_error < 1e-8, "{}", red.reconstruction_error);
    // RC = L + k I1 I2 sin(theta) along the reduced solution
    let k = (e.eps2 + e.eps_t2) / (e.eps3 + e.eps_t3);
    let l0 = invariants(&s0, &e).unwrap().l;
    for st in &red.states {
        let rc = st.r * st.c;
        assert!((rc - l0 - k * red.i1 * red.i2 * st.theta.sin()).abs() < 1e-8);
    }
}

#[test]
fn relation_defects_vanish_for_commuting_scalars() {
    let e = resolve_params(1.0, 3.0, 3.0).unwrap();
    let pair = build_pair(&e).unwrap().pair;
    let ops: Operators = [0.3, -1.0, 2.0, 0.5, 0.1, 4.0].map(|x| Matrix::from_row_major(1, 1, vec![x]).unwrap());
    let ids = relation_ids(&pair);
    assert_eq!(ids.len(), 18);
    // XAY - YAX vanishes for scalars, so each defect is minus the image of the bracket
    let defects = relation_defects(&pair, &ids, &ops);
    let nonzero = defects.iter().filter(|d| d.max_abs() > 0.0).count();
    assert_eq!(nonzero, 10);
}
