//! Operator equations of the quantized oscillator pair, conservation of the
//! pair relations along the flow, and the hidden-hamiltonian audit.

use std::io::Write;

use serde::Serialize;

use crate::algebra::pair::{IsotopicPair, Side};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::ode::{integrate_rk4, uniform_grid};
use crate::oscillator::{build_pair, resolve_params, EpsilonParams, OscillatorPair};
use crate::quantum::representation::{relation_defect, PairRepresentation};
use crate::scalar::Scalar;

/// `[P, Q, R, A, B, C]`.
pub type Operators = [Matrix<f64>; 6];

pub const OPERATOR_LABELS: [&str; 6] = ["P", "Q", "R", "A", "B", "C"];

pub fn operators_of(rep: &PairRepresentation<f64>) -> Result<Operators> {
    if rep.t1.len() != 3 || rep.t2.len() != 3 {
        return Err(Error::dimension("oscillator representation", 6, rep.t1.len() + rep.t2.len()));
    }
    Ok([
        rep.t1[0].clone(),
        rep.t1[1].clone(),
        rep.t1[2].clone(),
        rep.t2[0].clone(),
        rep.t2[1].clone(),
        rep.t2[2].clone(),
    ])
}

fn sym(x: &Matrix<f64>, y: &Matrix<f64>, z: &Matrix<f64>) -> Matrix<f64> {
    Matrix::product(&[x, y, z]).add(&Matrix::product(&[z, y, x]))
}

/// The six cubic operator equations, e.g.
/// `P' = -2 e1 (PBQ + QBP + 2 QAQ) - e3 (RCQ + QCR)`.
pub fn quantum_rhs(ops: &Operators, e: &EpsilonParams<f64>) -> Result<Operators> {
    let n = ops[0].rows();
    if let Some(m) = ops.iter().find(|m| m.rows() != n || m.cols() != n) {
        return Err(Error::dimension("operator size", n, m.rows().max(m.cols())));
    }
    let [p, q, r, a, b, c] = ops;
    let qaq = Matrix::product(&[q, a, q]);
    let pbp = Matrix::product(&[p, b, p]);
    let bpb = Matrix::product(&[b, p, b]);
    let aqa = Matrix::product(&[a, q, a]);
    Ok([
        sym(p, b, q).add(&qaq.scale(&2.0)).scale(&(-2.0 * e.eps1)).sub(&sym(r, c, q).scale(&e.eps3)),
        sym(p, a, q).add(&pbp.scale(&2.0)).scale(&(2.0 * e.eps1)).add(&sym(r, c, p).scale(&e.eps3)),
        sym(p, a, r).sub(&sym(q, b, r)).scale(&e.eps2),
        sym(a, q, b).add(&bpb.scale(&2.0)).scale(&(-2.0 * e.eps_t1)).sub(&sym(c, r, b).scale(&e.eps_t3)),
        sym(a, p, b).add(&aqa.scale(&2.0)).scale(&(2.0 * e.eps_t1)).add(&sym(c, r, a).scale(&e.eps_t3)),
        sym(a, p, c).sub(&sym(b, q, c)).scale(&e.eps_t2),
    ])
}

/// Symmetric quantization of `x' = {H1, x}_y` read off the structure constants:
/// `X_k' = sum h_i m(a; i, k, o) (X_i Y_a X_o + X_o Y_a X_i)`.
pub fn quantum_rhs_from_pair(pair: &IsotopicPair<f64>, h1: &[f64], h2: &[f64], t1: &[Matrix<f64>], t2: &[Matrix<f64>]) -> (Vec<Matrix<f64>>, Vec<Matrix<f64>>) {
    let flow = |side: Side, h: &[f64], own: &[Matrix<f64>], other: &[Matrix<f64>]| {
        let fam = pair.tensor(side);
        (0..own.len())
            .map(|k| {
                let mut acc = Matrix::zeros(own[k].rows(), own[k].cols());
                for (i, hi) in h.iter().enumerate().filter(|(_, h)| **h != 0.0) {
                    for (a, ya) in other.iter().enumerate() {
                        for (o, xo) in own.iter().enumerate() {
                            let m = *fam.get(a, i, k, o);
                            if m != 0.0 {
                                acc.add_scaled(&(hi * m), &sym(&own[i], ya, xo));
                            }
                        }
                    }
                }
                acc
            })
            .collect()
    };
    (flow(Side::V1, h1, t1, t2), flow(Side::V2, h2, t2, t1))
}

/// One defining relation, identified by side, isotope and basis pair `i < j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationId {
    pub side: Side,
    pub iso: usize,
    pub i: usize,
    pub j: usize,
    pub label: String,
}

/// All relations of a pair in a fixed order (18 for the oscillator).
pub fn relation_ids(pair: &IsotopicPair<f64>) -> Vec<RelationId> {
    let mut out = Vec::new();
    for side in [Side::V1, Side::V2] {
        let (own, other) = (pair.labels(side), pair.labels(side.other()));
        for iso in 0..other.len() {
            for i in 0..own.len() {
                for j in i + 1..own.len() {
                    out.push(RelationId {
                        side,
                        iso,
                        i,
                        j,
                        label: format!("[{},{}]_{}", own[i], own[j], other[iso]),
                    });
                }
            }
        }
    }
    out
}

fn split_ops(ops: &Operators) -> (&[Matrix<f64>], &[Matrix<f64>]) {
    (&ops[..3], &ops[3..])
}

/// Defect matrices of every relation at the given operators.
pub fn relation_defects(pair: &IsotopicPair<f64>, ids: &[RelationId], ops: &Operators) -> Vec<Matrix<f64>> {
    let (t1, t2) = split_ops(ops);
    ids.iter()
        .map(|id| match id.side {
            Side::V1 => relation_defect(pair.m1(), t1, t2, id.iso, id.i, id.j),
            Side::V2 => relation_defect(pair.m2(), t2, t1, id.iso, id.i, id.j),
        })
        .collect()
}

/// Time derivative of a relation defect along the flow, by the product rule.
pub fn relation_rate(pair: &IsotopicPair<f64>, id: &RelationId, ops: &Operators, dots: &Operators) -> Matrix<f64> {
    let (t1, t2) = split_ops(ops);
    let (d1, d2) = split_ops(dots);
    let (fam, own, other, down, dother) = match id.side {
        Side::V1 => (pair.m1(), t1, t2, d1, d2),
        Side::V2 => (pair.m2(), t2, t1, d2, d1),
    };
    let (x, a, y) = (&own[id.i], &other[id.iso], &own[id.j]);
    let (dx, da, dy) = (&down[id.i], &dother[id.iso], &down[id.j]);
    let d_xay = Matrix::product(&[dx, a, y]).add(&Matrix::product(&[x, da, y])).add(&Matrix::product(&[x, a, dy]));
    let d_yax = Matrix::product(&[dy, a, x]).add(&Matrix::product(&[y, da, x])).add(&Matrix::product(&[y, a, dx]));
    let mut lin = Matrix::zeros(x.rows(), x.cols());
    for (o, m) in down.iter().enumerate() {
        let c = *fam.get(id.iso, id.i, id.j, o);
        if c != 0.0 {
            lin.add_scaled(&c, m);
        }
    }
    lin.sub(&d_xay.sub(&d_yax))
}

fn flatten(ops: &Operators) -> Vec<f64> {
    ops.iter().flat_map(|m| m.as_slice().iter().copied()).collect()
}

fn unflatten(y: &[f64], n: usize) -> Operators {
    std::array::from_fn(|k| Matrix::from_row_major(n, n, y[k * n * n..(k + 1) * n * n].to_vec()).expect("block size"))
}

#[derive(Clone, Debug, Serialize)]
pub struct QuantumTrajectory {
    pub times: Vec<f64>,
    #[serde(skip)]
    pub states: Vec<Operators>,
    pub relations: Vec<RelationId>,
    /// `residuals[k][r]`: max-abs defect of relation `r` at sample `k`.
    pub residuals: Vec<Vec<f64>>,
    /// Largest relation defect at `t = 0`.
    pub initial_residual: f64,
    /// `max_k max_r |defect_r(t_k) - defect_r(0)|`.
    pub drift: f64,
    /// Largest product-rule rate of change of any relation at `t = 0`.
    pub initial_rate: f64,
}

/// RK4 on the operator equations starting from the representation matrices,
/// with the relation defects recorded at every grid point. Relations are the
/// representation relations of the pair built from `e`.
pub fn integrate_quantum(rep: &PairRepresentation<f64>, e: &EpsilonParams<f64>, t_end: f64, dt: f64) -> Result<QuantumTrajectory> {
    let pair = build_pair(e)?.pair;
    let ops0 = operators_of(rep)?;
    let n = rep.dim_w;
    let grid = uniform_grid(t_end, dt)?;
    let params = e.clone();
    let field = move |y: &[f64]| flatten(&quantum_rhs(&unflatten(y, n), &params).expect("square operators"));
    let raw = integrate_rk4(field, &flatten(&ops0), &grid)?;
    let states: Vec<Operators> = raw.iter().map(|y| unflatten(y, n)).collect();
    let ids = relation_ids(&pair);
    let d0 = relation_defects(&pair, &ids, &ops0);
    let mut residuals = Vec::with_capacity(states.len());
    let mut drift = 0.0f64;
    for ops in &states {
        let d = relation_defects(&pair, &ids, ops);
        residuals.push(d.iter().map(Matrix::max_abs).collect());
        for (dk, d0k) in d.iter().zip(&d0) {
            drift = drift.max(dk.sub(d0k).max_abs());
        }
    }
    let dots = quantum_rhs(&ops0, e)?;
    let initial_rate = ids
        .iter()
        .map(|id| relation_rate(&pair, id, &ops0, &dots).max_abs())
        .fold(0.0, f64::max);
    Ok(QuantumTrajectory {
        times: grid,
        states,
        relations: ids,
        initial_residual: d0.iter().map(Matrix::max_abs).fold(0.0, f64::max),
        residuals,
        drift,
        initial_rate,
    })
}

impl QuantumTrajectory {
    /// `t,max_residual,<one column per relation>`, every `stride`-th sample plus the last.
    pub fn write_csv<W: Write>(&self, out: W, stride: usize) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string(), "max_residual".to_string()];
        header.extend(self.relations.iter().map(|r| r.label.clone()));
        w.write_record(&header)?;
        let last = self.times.len() - 1;
        for k in (0..self.times.len()).filter(|k| k % stride.max(1) == 0 || *k == last) {
            let row = &self.residuals[k];
            let mut rec = vec![format!("{:.17e}", self.times[k]), format!("{:.17e}", row.iter().copied().fold(0.0, f64::max))];
            rec.extend(row.iter().map(|v| format!("{v:.17e}")));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// One JSON object per kept sample: `{"t": .., "P": [[..]], ...}`.
    pub fn write_matrices_jsonl<W: Write>(&self, mut out: W, stride: usize) -> Result<()> {
        let last = self.times.len() - 1;
        for k in (0..self.times.len()).filter(|k| k % stride.max(1) == 0 || *k == last) {
            let mut obj = serde_json::Map::new();
            obj.insert("t".into(), serde_json::json!(self.times[k]));
            for (label, m) in OPERATOR_LABELS.iter().zip(&self.states[k]) {
                let rows: Vec<Vec<f64>> = (0..m.rows()).map(|r| m.row(r).to_vec()).collect();
                obj.insert((*label).into(), serde_json::json!(rows));
            }
            serde_json::to_writer(&mut out, &obj)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Rescales `c` by `e2/e3` so that `R_{p,c} = R_{b,r}` and `R_{q,c} = R_{a,r}`.
/// The result coincides with the oscillator pair at `(e1, e2, e3' = e2)`.
pub fn renormalize_rc<S: Scalar>(osc: &OscillatorPair<S>) -> Result<OscillatorPair<S>> {
    let e = &osc.params;
    if e.eps2.is_zero() || e.eps3.is_zero() {
        return Err(Error::Params("renormalization needs e2 != 0 and e3 != 0".into()));
    }
    let one = S::from_ratio(1, 1);
    let ratio = e.eps2.clone() / e.eps3.clone();
    let pair = osc
        .pair
        .rescaled(&[one.clone(), one.clone(), one.clone()], &[one.clone(), one, ratio])?;
    let params = resolve_params(e.eps1.clone(), e.eps2.clone(), e.eps2.clone())?;
    Ok(OscillatorPair { pair, params })
}

/// The six even generators `(x, alpha)` entering the hidden hamiltonian, as
/// `(index in V1, index in V2)`: `(q,a), (p,b), (q,b), (p,a), (p,c), (q,c)`.
pub const HIDDEN_PAIRS: [(usize, usize); 6] = [(1, 0), (0, 1), (1, 1), (0, 0), (0, 2), (1, 2)];

#[derive(Clone, Debug, Serialize)]
pub struct HiddenAudit {
    /// `max |quantum_rhs(G) - [H, T(G)]|` per odd generator `P..C`.
    pub residuals: Vec<(String, f64)>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub confirmed: bool,
    /// Whether `e2 = e3`, i.e. the pair is already renormalized.
    pub normalized: bool,
    #[serde(skip)]
    pub hamiltonian: Matrix<f64>,
}

/// `H = sum (T(x)T(alpha) + T(alpha)T(x))^2` over [`HIDDEN_PAIRS`], compared
/// generator by generator against the operator equations.
pub fn hidden_hamiltonian_audit(rep: &PairRepresentation<f64>, e: &EpsilonParams<f64>, tol: f64) -> Result<HiddenAudit> {
    let pair = build_pair(e)?.pair;
    let report = crate::quantum::representation::verify_representation(rep, &pair, tol)?;
    if !report.flags["split"] {
        return Err(Error::Precondition("hidden-hamiltonian audit needs a split representation".into()));
    }
    let ops = operators_of(rep)?;
    let n = rep.dim_w;
    let mut h = Matrix::zeros(n, n);
    for &(x, alpha) in &HIDDEN_PAIRS {
        let r = ops[x].anticommutator(&ops[3 + alpha]);
        h = h.add(&r.matmul(&r));
    }
    let rhs = quantum_rhs(&ops, e)?;
    let residuals: Vec<(String, f64)> = OPERATOR_LABELS
        .iter()
        .zip(ops.iter().zip(&rhs))
        .map(|(l, (g, d))| (l.to_string(), d.sub(&h.commutator(g)).max_abs()))
        .collect();
    let max_residual = residuals.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(HiddenAudit {
        residuals,
        max_residual,
        tolerance: tol,
        confirmed: max_residual < tol,
        normalized: e.eps2 == e.eps3,
        hamiltonian: h,
    })
}

/// Max-abs distance between `exp(tH) F(0) exp(-tH)` and the integrated
/// operators, over every `stride`-th sample.
pub fn similarity_flow_deviation(h: &Matrix<f64>, traj: &QuantumTrajectory, stride: usize) -> f64 {
    let hn = h.to_nalgebra();
    let f0: Vec<_> = traj.states[0].iter().map(Matrix::to_nalgebra).collect();
    let last = traj.times.len() - 1;
    (0..traj.times.len())
        .filter(|k| k % stride.max(1) == 0 || *k == last)
        .map(|k| {
            let t = traj.times[k];
            let u = (&hn * t).exp();
            let u_inv = (&hn * -t).exp();
            traj.states[k]
                .iter()
                .zip(&f0)
                .map(|(fk, f)| (&u * f * &u_inv - fk.to_nalgebra()).amax())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{rhs_full, ClassicalState, OSCILLATOR_WEIGHTS};
    use crate::quantum::representation::{from_blocks, verify_representation, zero_extension};

    fn e_example() -> EpsilonParams<f64> {
        resolve_params(1.0, 3.0, 3.0).unwrap()
    }

    fn scalar_ops(v: [f64; 6]) -> Operators {
        v.map(|x| Matrix::from_row_major(1, 1, vec![x]).unwrap())
    }

    pub(crate) fn sub_rep(e1: f64) -> PairRepresentation<f64> {
        let u = vec![Matrix::unit(1, 2, 0, 0), Matrix::unit(1, 2, 0, 1)];
        let v = vec![Matrix::unit(2, 1, 0, 0).scale(&(2.0 * e1)), Matrix::unit(2, 1, 1, 0).scale(&(-2.0 * e1))];
        zero_extension(&from_blocks(2, 1, &u, &v).unwrap(), 3, 3, &[0, 1], &[0, 1]).unwrap()
    }

    #[test]
    fn scalar_operators_reduce_to_classical() {
        let e = e_example();
        let s = [1.0, 0.0, 1.0, 0.0, 1.0, 1.0];
        let d = quantum_rhs(&scalar_ops(s), &e).unwrap();
        let got: Vec<f64> = d.iter().map(|m| m[(0, 0)]).collect();
        assert_eq!(got, rhs_full(&ClassicalState::from_array(s), &e).to_array().to_vec());
        let z = quantum_rhs(&scalar_ops([0.0; 6]), &e).unwrap();
        assert!(z.iter().all(|m| m.max_abs() == 0.0));
    }

    #[test]
    fn displayed_equations_match_structure_constants() {
        let e = resolve_params(0.7, -1.3, 2.1).unwrap();
        let pair = build_pair(&e).unwrap().pair;
        let ops: Operators = std::array::from_fn(|k| Matrix::from_fn(3, 3, |i, j| ((k * 9 + i * 3 + j) as f64 * 0.37).sin()));
        let d = quantum_rhs(&ops, &e).unwrap();
        let (d1, d2) = quantum_rhs_from_pair(&pair, &OSCILLATOR_WEIGHTS, &OSCILLATOR_WEIGHTS, &ops[..3], &ops[3..]);
        for (a, b) in d.iter().zip(d1.iter().chain(&d2)) {
            assert!(a.sub(b).max_abs() < 1e-12);
        }
    }

    #[test]
    fn split_grading_is_respected() {
        let rep = sub_rep(1.0);
        let d = quantum_rhs(&operators_of(&rep).unwrap(), &e_example()).unwrap();
        let moved = PairRepresentation::new(3, d[..3].to_vec(), d[3..].to_vec(), rep.grading).unwrap();
        let pair = build_pair(&e_example()).unwrap().pair;
        assert!(verify_representation(&moved, &pair, 1e-12).unwrap().flags["split"]);
    }

    #[test]
    fn relations_are_stationary_at_a_representation() {
        let e = e_example();
        let traj = integrate_quantum(&sub_rep(e.eps1), &e, 0.2, 0.01).unwrap();
        assert_eq!(traj.relations.len(), 18);
        assert!(traj.initial_residual < 1e-14);
        assert!(traj.initial_rate < 1e-12);
        assert!(traj.drift < 1e-6);
    }

    #[test]
    fn relation_rate_matches_finite_difference() {
        let e = resolve_params(0.7, -1.3, 2.1).unwrap();
        let pair = build_pair(&e).unwrap().pair;
        let ops: Operators = std::array::from_fn(|k| Matrix::from_fn(2, 2, |i, j| ((k * 4 + i * 2 + j) as f64 * 0.91).cos()));
        let dots = quantum_rhs(&ops, &e).unwrap();
        let h = 1e-6;
        let shift = |s: f64| -> Operators { std::array::from_fn(|k| ops[k].add(&dots[k].scale(&s))) };
        let ids = relation_ids(&pair);
        let plus = relation_defects(&pair, &ids, &shift(h));
        let minus = relation_defects(&pair, &ids, &shift(-h));
        for (k, id) in ids.iter().enumerate() {
            let fd = plus[k].sub(&minus[k]).scale(&(0.5 / h));
            assert!(fd.sub(&relation_rate(&pair, id, &ops, &dots)).max_abs() < 1e-6, "{}", id.label);
        }
    }

    #[test]
    fn renormalization_aligns_r_operators() {
        use crate::algebra::alts::to_alts;
        use crate::scalar::{int, rat};
        let p = resolve_params(rat(1, 2), int(6), int(3)).unwrap();
        let osc = build_pair(&p).unwrap();
        let ren = renormalize_rc(&osc).unwrap();
        let alts = to_alts(&ren.pair);
        // global indices: p,q,r = 0,1,2; a,b,c = 3,4,5
        assert_eq!(alts.r_operator(0, 5), alts.r_operator(4, 2));
        assert_eq!(alts.r_operator(1, 5), alts.r_operator(3, 2));
        assert_ne!(to_alts(&osc.pair).r_operator(0, 5), to_alts(&osc.pair).r_operator(4, 2));
        assert_eq!(ren.pair.m1(), build_pair(&ren.params).unwrap().pair.m1());
        assert_eq!(ren.pair.m2(), build_pair(&ren.params).unwrap().pair.m2());
    }

    #[test]
    fn hidden_audit_on_zero_rep_and_non_split() {
        let e = e_example();
        let zero = PairRepresentation::<f64>::zero(3, 3, 2, Some((1, 1))).unwrap();
        let a = hidden_hamiltonian_audit(&zero, &e, 1e-8).unwrap();
        assert!(a.confirmed && a.max_residual == 0.0);
        let plain = PairRepresentation::<f64>::zero(3, 3, 2, None).unwrap();
        assert!(matches!(hidden_hamiltonian_audit(&plain, &e, 1e-8), Err(Error::Precondition(_))));
    }
}
