//! Audit of printed formulas against values recomputed from the oscillator pair.
//!
//! Exact items (bracket coefficients) are compared on the rational backend.
//! Dynamical items are evaluated in `f64` at a fixed generic probe state.

use num::Zero;
use serde::Serialize;

use crate::algebra::{to_alts, Side};
use crate::classical::{rhs_full, ClassicalState};
use crate::oscillator::{audit_structure_table, build_pair, format_combination, EpsilonParams, LineStatus};
use crate::scalar::{Rational, Scalar};
use crate::superalgebra::build_super;
use crate::{Error, Result};

/// Generic state with `R, C > 0` and `PA - QB != 0`, so none of the rates vanish by accident.
pub const PROBE_STATE: ClassicalState = ClassicalState {
    p: 0.6,
    q: -0.3,
    r: 1.1,
    a: 0.4,
    b: 0.8,
    c: 0.7,
};

const RATE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Erratum {
    pub id: String,
    pub subject: String,
    pub printed: String,
    /// The value recomputed from the pair or from the equations of motion.
    pub computed: String,
    pub printed_value: Option<f64>,
    pub computed_value: Option<f64>,
    pub flagged: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrataReport {
    pub params: [String; 6],
    pub probe_state: [f64; 6],
    pub items: Vec<Erratum>,
    pub flagged: usize,
}

impl ErrataReport {
    pub fn get(&self, id: &str) -> Option<&Erratum> {
        self.items.iter().find(|e| e.id == id)
    }
}

/// One printed relation `X Y Z - Z Y X = coef * W` among the conserved operator relations.
struct PrintedRelation {
    side: Side,
    iso: usize,
    x: usize,
    y: usize,
    out: Option<usize>,
    coef: fn(&EpsilonParams<Rational>) -> Rational,
    coef_text: &'static str,
}

fn printed_relations() -> Vec<PrintedRelation> {
    use Side::{V1, V2};
    type Coef = fn(&EpsilonParams<Rational>) -> Rational;
    fn line(side: Side, iso: usize, x: usize, y: usize, out: Option<usize>, coef: Coef, coef_text: &'static str) -> PrintedRelation {
        PrintedRelation {
            side,
            iso,
            x,
            y,
            out,
            coef,
            coef_text,
        }
    }
    fn two(x: &Rational) -> Rational {
        Rational::from_integer(2.into()) * x
    }
    let zero: Coef = |_| Rational::zero();
    vec![
        line(V1, 0, 0, 1, Some(1), |e| two(&e.eps1), "2 e1"),
        line(V1, 0, 0, 2, Some(2), |e| e.eps2.clone(), "e2"),
        line(V1, 0, 1, 2, None, zero, "0"),
        line(V1, 1, 0, 1, Some(0), |e| two(&e.eps1), "2 e1"),
        line(V1, 1, 0, 2, None, zero, "0"),
        line(V1, 1, 1, 2, Some(2), |e| -two(&e.eps2), "-2 e2"),
        line(V1, 2, 0, 1, Some(2), |e| e.eps3.clone(), "e3"),
        line(V1, 2, 0, 2, None, zero, "0"),
        line(V1, 2, 1, 2, None, zero, "0"),
        line(V2, 0, 0, 1, Some(1), |e| two(&e.eps_t1), "2 t1"),
        line(V2, 0, 0, 2, Some(2), |e| e.eps_t2.clone(), "t2"),
        line(V2, 0, 1, 2, None, zero, "0"),
        line(V2, 1, 0, 1, Some(0), |e| two(&e.eps_t1), "2 t1"),
        line(V2, 1, 0, 2, None, zero, "0"),
        line(V2, 1, 1, 2, Some(2), |e| -e.eps_t2.clone(), "-t2"),
        line(V2, 2, 0, 1, Some(2), |e| e.eps_t3.clone(), "t3"),
        line(V2, 2, 1, 2, None, zero, "0"),
        line(V2, 2, 0, 2, None, zero, "0"),
    ]
}

fn upper(labels: &[&str], i: usize) -> String {
    labels[i].to_uppercase()
}

/// Mixed coupling ratio `(e2 + t2) / (e3 + t3)`.
fn kappa(e: &EpsilonParams<f64>) -> f64 {
    (e.eps2 + e.eps_t2) / (e.eps3 + e.eps_t3)
}

fn amplitudes(s: &ClassicalState) -> Result<(f64, f64, f64)> {
    let i1 = s.p.hypot(s.q);
    let i2 = s.a.hypot(s.b);
    if i1 == 0.0 || i2 == 0.0 {
        return Err(Error::Precondition("angle rates need nonzero amplitudes".into()));
    }
    let theta = s.q.atan2(s.p) + s.b.atan2(s.a);
    Ok((i1, i2, theta))
}

/// `theta'` obtained from the equations of motion.
pub fn theta_rate(s: &ClassicalState, e: &EpsilonParams<f64>) -> Result<f64> {
    let (i1, i2, _) = amplitudes(s)?;
    let d = rhs_full(s, e);
    let phi = (s.p * d.q - s.q * d.p) / (i1 * i1);
    let psi = (s.a * d.b - s.b * d.a) / (i2 * i2);
    Ok(phi + psi)
}

/// `chi' = e3 psi' - t3 phi'` obtained from the equations of motion.
pub fn chi_rate(s: &ClassicalState, e: &EpsilonParams<f64>) -> Result<f64> {
    let (i1, i2, _) = amplitudes(s)?;
    let d = rhs_full(s, e);
    let phi = (s.p * d.q - s.q * d.p) / (i1 * i1);
    let psi = (s.a * d.b - s.b * d.a) / (i2 * i2);
    Ok(e.eps3 * psi - e.eps_t3 * phi)
}

/// The printed closed law `theta' = -2 L (e3+t3) - 2 I1 I2 (e2+t2) sin(theta)`
/// with the printed `L`.
pub fn printed_theta_rate(s: &ClassicalState, e: &EpsilonParams<f64>) -> Result<f64> {
    let (i1, i2, theta) = amplitudes(s)?;
    let l = s.r * s.c + kappa(e) * (s.q * s.a + s.p * s.b);
    Ok(-2.0 * l * (e.eps3 + e.eps_t3) - 2.0 * i1 * i2 * (e.eps2 + e.eps_t2) * theta.sin())
}

/// Runs every audit item at `params`, probing dynamics at [`PROBE_STATE`].
pub fn errata_audit(params: &EpsilonParams<Rational>) -> Result<ErrataReport> {
    let osc = build_pair(params)?;
    let e = osc.params.to_f64();
    let s = PROBE_STATE;
    let d = rhs_full(&s, &e);
    let mut items = Vec::new();
    let exact = |v: &Rational| v.to_string();

    // Integral Lambda: logarithmic derivative of R^t2 C^(-+e2).
    let log_rate = |sign: f64| (e.eps_t2 * d.r / s.r + sign * e.eps2 * d.c / s.c) / (e.eps2 + e.eps_t2);
    let (printed_rate, corrected_rate) = (log_rate(1.0), log_rate(-1.0));
    let exponent = -osc.params.eps2.clone() / (osc.params.eps2.clone() + osc.params.eps_t2.clone());
    items.push(Erratum {
        id: "lambda_exponent".into(),
        subject: "exponent of C in the integral Lambda".into(),
        printed: "Lambda = R^(t2/(e2+t2)) C^(+e2/(e2+t2))".into(),
        computed: format!(
            "Lambda = R^(t2/(e2+t2)) C^(-e2/(e2+t2)); C exponent = {}; d/dt ln Lambda = {corrected_rate:e} (printed form: {printed_rate:e})",
            exact(&exponent)
        ),
        printed_value: Some(printed_rate),
        computed_value: Some(corrected_rate),
        flagged: printed_rate.abs() > RATE_TOL && corrected_rate.abs() <= RATE_TOL,
    });

    // Conserved operator relations, line by line against the pair's own brackets.
    for line in printed_relations() {
        let (labels, iso_labels): (&[&str], &[&str]) = match line.side {
            Side::V1 => (&["p", "q", "r"], &["a", "b", "c"]),
            Side::V2 => (&["a", "b", "c"], &["p", "q", "r"]),
        };
        let column = osc.pair.tensor(line.side).column(line.iso, line.x, line.y).to_vec();
        let mut expected = vec![Rational::zero(); 3];
        if let Some(o) = line.out {
            expected[o] = (line.coef)(&osc.params);
        }
        if column == expected {
            continue;
        }
        let (x, y, w) = (upper(labels, line.x), upper(labels, line.y), upper(iso_labels, line.iso));
        let label_strings: Vec<String> = labels.iter().map(|l| l.to_uppercase()).collect();
        let out_label = line.out.map(|o| label_strings[o].clone()).unwrap_or_default();
        let coefficient = |v: &[Rational]| line.out.map(|o| v[o].to_f64()).unwrap_or(0.0);
        items.push(Erratum {
            id: format!("relation_{}{}{}", labels[line.x], iso_labels[line.iso], labels[line.y]),
            subject: "conserved operator relation".into(),
            printed: format!("{x}{w}{y} - {y}{w}{x} = {} {out_label}", line.coef_text),
            computed: format!(
                "{x}{w}{y} - {y}{w}{x} = {}",
                format_combination(&column, &label_strings)
            ),
            printed_value: Some(coefficient(&expected)),
            computed_value: Some(coefficient(&column)),
            flagged: true,
        });
    }

    // Printed bracket table of g(V).
    let table = audit_structure_table(&osc.params)?;
    let sa = build_super(&to_alts(&osc.pair), Rational::default_tolerance())?;
    let dup: Vec<_> = table.lines.iter().filter(|l| l.printed.starts_with("[R_{p,a},R_{p,b}]_-")).collect();
    if let (Some(x), Some(y)) = (sa.index_of("R[p,a]"), sa.index_of("R[p,b]")) {
        let computed = format_combination(sa.constants.column(x, y), &sa.labels);
        let matching = dup.iter().filter(|l| l.status == LineStatus::Match).count();
        items.push(Erratum {
            id: "duplicate_pa_pb".into(),
            subject: "bracket [R_{p,a},R_{p,b}] printed twice with different values".into(),
            printed: dup.iter().map(|l| l.printed.as_str()).collect::<Vec<_>>().join("; "),
            computed: format!("[R_{{p,a}},R_{{p,b}}]_- = {computed}; {matching} of {} printed lines match", dup.len()),
            printed_value: None,
            computed_value: None,
            flagged: dup.len() > 1 && matching < dup.len(),
        });
    }
    for line in &table.lines {
        if line.printed.starts_with("[R_{p,a},R_{p,b}]_-") {
            continue;
        }
        if let LineStatus::Mismatch { computed } = &line.status {
            items.push(Erratum {
                id: format!("table {}", line.printed),
                subject: "bracket table entry".into(),
                printed: line.printed.clone(),
                computed: computed.clone(),
                printed_value: None,
                computed_value: None,
                flagged: true,
            });
        }
    }

    // Mixed integral L.
    let k = kappa(&e);
    let mixed = s.q * s.a + s.p * s.b;
    let mixed_dot = d.q * s.a + s.q * d.a + d.p * s.b + s.p * d.b;
    let rc_dot = d.r * s.c + s.r * d.c;
    let (printed_l, corrected_l) = (rc_dot + k * mixed_dot, rc_dot - k * mixed_dot);
    items.push(Erratum {
        id: "mixed_integral_sign".into(),
        subject: "sign of the mixed term in the integral L".into(),
        printed: "L = RC + ((e2+t2)/(e3+t3)) (QA+PB)".into(),
        computed: format!("L = RC - ((e2+t2)/(e3+t3)) (QA+PB); dL/dt = {corrected_l:e} (printed form: {printed_l:e})"),
        printed_value: Some(printed_l),
        computed_value: Some(corrected_l),
        flagged: printed_l.abs() > RATE_TOL && corrected_l.abs() <= RATE_TOL,
    });

    // Angle and amplitude laws.
    let (i1, i2, theta) = amplitudes(&s)?;
    let true_theta = theta_rate(&s, &e)?;
    let printed_theta = printed_theta_rate(&s, &e)?;
    items.push(Erratum {
        id: "theta_rate".into(),
        subject: "closed law for theta'".into(),
        printed: "theta' = -2 L (e3+t3) - 2 I1 I2 (e2+t2) sin(theta)".into(),
        computed: format!("theta' = 2 (e3+t3) RC = 2 L (e3+t3) + 2 I1 I2 (e2+t2) sin(theta), L corrected; value {true_theta}"),
        printed_value: Some(printed_theta),
        computed_value: Some(true_theta),
        flagged: (printed_theta - true_theta).abs() > RATE_TOL,
    });
    let printed_phi = -2.0 * e.eps3 * s.r * s.c - 4.0 * e.eps1 * i1 * i2 * theta.sin();
    let true_phi = (s.p * d.q - s.q * d.p) / (i1 * i1);
    items.push(Erratum {
        id: "phi_rate".into(),
        subject: "law for phi'".into(),
        printed: "phi' = -2 e3 RC - 4 e1 I1 I2 sin(phi+psi)".into(),
        computed: format!("phi' = 2 e3 RC + 4 e1 I1 I2 sin(phi+psi); value {true_phi}"),
        printed_value: Some(printed_phi),
        computed_value: Some(true_phi),
        flagged: (printed_phi - true_phi).abs() > RATE_TOL,
    });
    let printed_chi = 4.0 * e.eps1 * i1 * i2 * (e.eps3 - e.eps_t3) * theta.sin();
    let true_chi = chi_rate(&s, &e)?;
    items.push(Erratum {
        id: "chi_rate".into(),
        subject: "law for chi'".into(),
        printed: "chi' = 4 e1 I1 I2 (e3 - t3) sin(theta)".into(),
        computed: format!("chi' = 4 (e3 t1 - t3 e1) I1 I2 sin(theta); value {true_chi}"),
        printed_value: Some(printed_chi),
        computed_value: Some(true_chi),
        flagged: (printed_chi - true_chi).abs() > RATE_TOL,
    });
    let printed_r = 2.0 * e.eps2 * theta.cos() * s.r;
    items.push(Erratum {
        id: "r_rate_amplitude".into(),
        subject: "amplitude factor in R' and C'".into(),
        printed: "R' = 2 e2 cos(phi+psi) R, C' = 2 t2 cos(phi+psi) C".into(),
        computed: format!("R' = 2 e2 I1 I2 cos(phi+psi) R, C' = 2 t2 I1 I2 cos(phi+psi) C; R' = {}", d.r),
        printed_value: Some(printed_r),
        computed_value: Some(d.r),
        flagged: (printed_r - d.r).abs() > RATE_TOL,
    });

    // xi law: the printed combination is not affine in t.
    let l_printed = s.r * s.c + k * mixed;
    let l = s.r * s.c - k * mixed;
    let predicted = 4.0 * l_printed * (e.eps_t3 * e.eps_t3 - e.eps3 * e.eps3) * e.eps1;
    let xi_dot = (e.eps2 + e.eps_t2) * true_chi + 2.0 * e.eps1 * (e.eps3 - e.eps_t3) * true_theta;
    let w = e.eps1 * e.eps_t3 - e.eps_t1 * e.eps3;
    let derived = 4.0 * w * (e.eps3 + e.eps_t3) * l;
    items.push(Erratum {
        id: "xi_law".into(),
        subject: "linear law for xi = (e2+t2) chi + 2 e1 (e3-t3) theta".into(),
        printed: "xi = 4 L (t3^2 - e3^2) e1 t + xi0".into(),
        computed: format!(
            "xi' = 4 e1 (e3^2 - t3^2) L - 8 e1 t3 (e2+t2) I1 I2 sin(theta) = {xi_dot} (printed slope {predicted}); \
             (e2+t2) chi + 2 (e1 t3 - t1 e3) theta has constant slope 4 (e1 t3 - t1 e3)(e3+t3) L = {derived}"
        ),
        printed_value: Some(predicted),
        computed_value: Some(xi_dot),
        flagged: (predicted - xi_dot).abs() > RATE_TOL,
    });

    let flagged = items.iter().filter(|i| i.flagged).count();
    Ok(ErrataReport {
        params: osc.params.as_array().map(|v| v.to_string()),
        probe_state: s.to_array(),
        items,
        flagged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oscillator::resolve_params;
    use crate::scalar::int;

    fn report() -> ErrataReport {
        errata_audit(&resolve_params(int(1), int(3), int(3)).unwrap()).unwrap()
    }

    #[test]
    fn required_items_are_flagged() {
        let r = report();
        let lambda = r.get("lambda_exponent").unwrap();
        assert!(lambda.flagged && lambda.computed.contains("C exponent = -3/4"));
        let qbr = r.get("relation_qbr").unwrap();
        assert!(qbr.flagged);
        assert_eq!((qbr.printed_value, qbr.computed_value), (Some(-6.0), Some(-3.0)));
        let dup = r.get("duplicate_pa_pb").unwrap();
        assert!(dup.flagged && dup.computed.contains("-2 R[p,b]"), "{}", dup.computed);
    }

    #[test]
    fn only_the_qbr_relation_is_wrong() {
        let r = report();
        let ids: Vec<_> = r.items.iter().filter(|i| i.id.starts_with("relation_")).map(|i| i.id.as_str()).collect();
        assert_eq!(ids, ["relation_qbr"]);
    }

    #[test]
    fn theta_law_at_worked_example() {
        let e = resolve_params(int(1), int(3), int(3)).unwrap().to_f64();
        let s = ClassicalState::from_array([1.0, 0.0, 1.0, 0.0, 1.0, 1.0]);
        assert_eq!(printed_theta_rate(&s, &e).unwrap(), -24.0);
        assert!((theta_rate(&s, &e).unwrap() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn dynamical_items_flagged() {
        let r = report();
        for id in ["mixed_integral_sign", "theta_rate", "phi_rate", "chi_rate", "r_rate_amplitude", "xi_law"] {
            assert!(r.get(id).unwrap().flagged, "{id}");
        }
        assert_eq!(r.flagged, r.items.len());
    }
}
