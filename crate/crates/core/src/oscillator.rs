//! The isotopic pair of noncanonically coupled oscillators.
//!
//! `V1 = span(p, q, r)`, `V2 = span(a, b, c)`, with six couplings subject to
//! `e1 + t1 = 0`, `e2 - t2 = e1 - t1`, `e3 t3 = e2 t2` (`t` for the tilded
//! couplings). The three free parameters `(e1, e2, e3)` determine the rest.

use serde::{Deserialize, Serialize};

use crate::algebra::alts::to_alts;
use crate::algebra::pair::{IsotopicPair, Side};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{parse_rational, Rational, Scalar};
use crate::superalgebra::{build_super, LieSuperalgebra};

pub const V1_LABELS: [&str; 3] = ["p", "q", "r"];
pub const V2_LABELS: [&str; 3] = ["a", "b", "c"];

/// The six couplings `(e1, e2, e3, t1, t2, t3)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonParams<S> {
    pub eps1: S,
    pub eps2: S,
    pub eps3: S,
    pub eps_t1: S,
    pub eps_t2: S,
    pub eps_t3: S,
}

/// Non-fatal degeneracy flags; the closed-form classical formulas divide by
/// each of these quantities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Genericity {
    pub eps2_nonzero: bool,
    pub eps3_nonzero: bool,
    pub eps2_sum_nonzero: bool,
    pub eps3_sum_nonzero: bool,
}

impl Genericity {
    pub fn all(&self) -> bool {
        self.eps2_nonzero && self.eps3_nonzero && self.eps2_sum_nonzero && self.eps3_sum_nonzero
    }
}

impl<S: Scalar> EpsilonParams<S> {
    /// Accepts six couplings, rejecting any that violate the constraints.
    pub fn new(values: [S; 6]) -> Result<Self> {
        let [eps1, eps_t1, eps2, eps_t2, eps3, eps_t3] = values;
        let p = Self {
            eps1,
            eps2,
            eps3,
            eps_t1,
            eps_t2,
            eps_t3,
        };
        let tol = S::default_tolerance();
        if p.constraint_residuals().iter().any(|r| !r.is_negligible(tol)) {
            return Err(Error::Params(format!("couplings {p} violate the constraints")));
        }
        Ok(p)
    }

    /// Residuals of the three constraints.
    pub fn constraint_residuals(&self) -> [S; 3] {
        [
            self.eps1.clone() + self.eps_t1.clone(),
            (self.eps2.clone() - self.eps_t2.clone()) - (self.eps1.clone() - self.eps_t1.clone()),
            self.eps3.clone() * self.eps_t3.clone() - self.eps2.clone() * self.eps_t2.clone(),
        ]
    }

    pub fn genericity(&self) -> Genericity {
        let tol = S::default_tolerance();
        let nz = |x: S| !x.is_negligible(tol);
        Genericity {
            eps2_nonzero: nz(self.eps2.clone()),
            eps3_nonzero: nz(self.eps3.clone()),
            eps2_sum_nonzero: nz(self.eps2.clone() + self.eps_t2.clone()),
            eps3_sum_nonzero: nz(self.eps3.clone() + self.eps_t3.clone()),
        }
    }

    /// `(e1, t1, e2, t2, e3, t3)`.
    pub fn as_array(&self) -> [S; 6] {
        [
            self.eps1.clone(),
            self.eps_t1.clone(),
            self.eps2.clone(),
            self.eps_t2.clone(),
            self.eps3.clone(),
            self.eps_t3.clone(),
        ]
    }

    pub fn to_f64(&self) -> EpsilonParams<f64> {
        EpsilonParams {
            eps1: self.eps1.to_f64(),
            eps2: self.eps2.to_f64(),
            eps3: self.eps3.to_f64(),
            eps_t1: self.eps_t1.to_f64(),
            eps_t2: self.eps_t2.to_f64(),
            eps_t3: self.eps_t3.to_f64(),
        }
    }

    /// `(e2 + t2) / (e3 + t3)`, the coefficient in the mixed integral.
    pub fn kappa(&self) -> Result<S> {
        let den = self.eps3.clone() + self.eps_t3.clone();
        if den.is_negligible(S::default_tolerance()) {
            return Err(Error::Params("e3 + t3 = 0".into()));
        }
        Ok((self.eps2.clone() + self.eps_t2.clone()) / den)
    }
}

impl<S: Scalar> std::fmt::Display for EpsilonParams<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "(e1={}, t1={}, e2={}, t2={}, e3={}, t3={})",
            self.eps1, self.eps_t1, self.eps2, self.eps_t2, self.eps3, self.eps_t3
        )
    }
}

/// Solves the constraints for the tilded couplings.
pub fn resolve_params<S: Scalar>(eps1: S, eps2: S, eps3: S) -> Result<EpsilonParams<S>> {
    let tol = S::default_tolerance();
    if eps2.is_negligible(tol) || eps3.is_negligible(tol) {
        return Err(Error::Params("e2 and e3 must be nonzero".into()));
    }
    let two = S::from_ratio(2, 1);
    let eps_t1 = -eps1.clone();
    let eps_t2 = eps2.clone() - two * eps1.clone();
    let eps_t3 = eps2.clone() * eps_t2.clone() / eps3.clone();
    Ok(EpsilonParams {
        eps1,
        eps2,
        eps3,
        eps_t1,
        eps_t2,
        eps_t3,
    })
}

/// JSON form `{"eps1": .., "eps2": .., "eps3": ..}`; values may be numbers or
/// strings such as `"3/2"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsDocument {
    pub eps1: serde_json::Value,
    pub eps2: serde_json::Value,
    pub eps3: serde_json::Value,
}

impl ParamsDocument {
    pub fn resolve(&self) -> Result<EpsilonParams<Rational>> {
        resolve_params(value_to_rational(&self.eps1)?, value_to_rational(&self.eps2)?, value_to_rational(&self.eps3)?)
    }
}

/// Parses a JSON number or string as an exact rational (decimals taken literally).
pub fn value_to_rational(v: &serde_json::Value) -> Result<Rational> {
    let text = match v {
        serde_json::Value::Number(n) => n.to_string(),
        serde_json::Value::String(s) => s.clone(),
        other => return Err(Error::Input(format!("expected a number, found {other}"))),
    };
    parse_scalar_text(&text)
}

/// Parses `"3"`, `"-3/4"`, `"0.25"` or `"1e-3"` as an exact rational.
pub fn parse_scalar_text(text: &str) -> Result<Rational> {
    if let Some(r) = parse_rational(text) {
        return Ok(r);
    }
    text.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .and_then(crate::scalar::rational_from_f64)
        .ok_or_else(|| Error::Input(format!("cannot parse '{text}' as a number")))
}

/// The oscillator pair together with the couplings that generated it.
#[derive(Clone, Debug, PartialEq)]
pub struct OscillatorPair<S> {
    pub pair: IsotopicPair<S>,
    pub params: EpsilonParams<S>,
}

pub fn build_pair<S: Scalar>(params: &EpsilonParams<S>) -> Result<OscillatorPair<S>> {
    let p = EpsilonParams::new(params.as_array())?;
    let two = S::from_ratio(2, 1);
    let (pp, q, r) = (0, 1, 2);
    let (a, b, c) = (0, 1, 2);
    let mut pair = IsotopicPair::zeros(3, 3);
    pair.set(Side::V1, a, pp, q, q, two.clone() * p.eps1.clone());
    pair.set(Side::V1, a, pp, r, r, p.eps2.clone());
    pair.set(Side::V1, b, pp, q, pp, two.clone() * p.eps1.clone());
    pair.set(Side::V1, b, q, r, r, -p.eps2.clone());
    pair.set(Side::V1, c, pp, q, r, p.eps3.clone());
    pair.set(Side::V2, pp, a, b, b, two.clone() * p.eps_t1.clone());
    pair.set(Side::V2, pp, a, c, c, p.eps_t2.clone());
    pair.set(Side::V2, q, a, b, a, two * p.eps_t1.clone());
    pair.set(Side::V2, q, b, c, c, -p.eps_t2.clone());
    pair.set(Side::V2, r, a, b, c, p.eps_t3.clone());
    let labels = |l: [&str; 3]| l.iter().map(|s| s.to_string()).collect();
    let pair = pair.with_labels(labels(V1_LABELS), labels(V2_LABELS))?;
    Ok(OscillatorPair { pair, params: p })
}

/// One `R_{y,z}` block: the operator computed from the triple product next to
/// the printed matrix.
#[derive(Clone, Debug)]
pub struct RMatrixComparison<S> {
    pub label: String,
    /// `"(q,p,r)"` or `"(a,b,c)"`.
    pub basis: &'static str,
    pub computed: Matrix<S>,
    pub printed: Matrix<S>,
    pub matches: bool,
}

#[derive(Clone, Debug)]
pub struct RMatrices<S> {
    pub v1: Vec<RMatrixComparison<S>>,
    pub v2: Vec<RMatrixComparison<S>>,
    /// Largest entry of any `R_{y,z}` (for `y` in `V1`, `z` in `V2`) mixing the two parts.
    pub off_block: f64,
}

impl<S: Scalar> RMatrices<S> {
    pub fn mismatches(&self) -> Vec<&RMatrixComparison<S>> {
        self.v1.iter().chain(&self.v2).filter(|c| !c.matches).collect()
    }
}

pub const R_LABELS: [(&str, &str); 6] = [("p", "a"), ("p", "b"), ("q", "a"), ("q", "b"), ("p", "c"), ("q", "c")];

fn m3<S: Scalar>(rows: [[S; 3]; 3]) -> Matrix<S> {
    Matrix::from_rows(rows.into_iter().map(|r| r.to_vec()).collect()).expect("3x3")
}

/// The printed matrices, in the order of [`R_LABELS`]: first in basis `(q,p,r)`,
/// then in basis `(a,b,c)`.
pub fn printed_r_matrices<S: Scalar>(p: &EpsilonParams<S>) -> (Vec<Matrix<S>>, Vec<Matrix<S>>) {
    let z = S::zero;
    let two = S::from_ratio(2, 1);
    let e1 = two.clone() * p.eps1.clone();
    let t1 = two * p.eps_t1.clone();
    let (e2, e3, t2) = (p.eps2.clone(), p.eps3.clone(), p.eps_t2.clone());
    let v1 = vec![
        m3([[e1.clone(), z(), z()], [z(), z(), z()], [z(), z(), e2.clone()]]),
        m3([[z(), z(), z()], [e1.clone(), z(), z()], [z(), z(), z()]]),
        m3([[z(), -e1.clone(), z()], [z(), z(), z()], [z(), z(), z()]]),
        m3([[z(), z(), z()], [z(), -e1.clone(), z()], [z(), z(), -e2]]),
        m3([[z(), z(), z()], [z(), z(), z()], [e3.clone(), z(), z()]]),
        m3([[z(), z(), z()], [z(), z(), z()], [z(), -e3, z()]]),
    ];
    let v2 = vec![
        m3([[z(), z(), z()], [z(), t1.clone(), z()], [z(), z(), t2.clone()]]),
        m3([[z(), z(), z()], [-t1.clone(), z(), z()], [z(), z(), z()]]),
        m3([[z(), t1.clone(), z()], [z(), z(), z()], [z(), z(), z()]]),
        m3([[-t1, z(), z()], [z(), z(), z()], [z(), z(), -t2.clone()]]),
        m3([[z(), z(), z()], [z(), z(), z()], [-t2.clone(), z(), z()]]),
        m3([[z(), z(), z()], [z(), z(), z()], [z(), t2, z()]]),
    ];
    (v1, v2)
}

/// Computes `R_{y,z} x = [x y z]` for the six generators and compares each
/// block with the printed one.
pub fn r_matrices<S: Scalar>(params: &EpsilonParams<S>) -> Result<RMatrices<S>> {
    let osc = build_pair(params)?;
    let alts = to_alts(&osc.pair);
    let (pv1, pv2) = printed_r_matrices(&osc.params);
    let tol = S::default_tolerance();
    let qpr = [1usize, 0, 2];
    let abc = [3usize, 4, 5];
    let mut v1 = Vec::new();
    let mut v2 = Vec::new();
    let mut off_block = 0.0f64;
    for (k, (y, z)) in R_LABELS.iter().enumerate() {
        let yi = V1_LABELS.iter().position(|l| l == y).expect("label");
        let zi = 3 + V2_LABELS.iter().position(|l| l == z).expect("label");
        let full = alts.r_operator(yi, zi);
        off_block = off_block
            .max(full.block(3, 0, 3, 3).max_abs())
            .max(full.block(0, 3, 3, 3).max_abs());
        let label = format!("R[{y},{z}]");
        let c1 = Matrix::from_fn(3, 3, |i, j| full[(qpr[i], qpr[j])].clone());
        let c2 = Matrix::from_fn(3, 3, |i, j| full[(abc[i], abc[j])].clone());
        v1.push(RMatrixComparison {
            matches: c1.sub(&pv1[k]).is_negligible(tol),
            label: label.clone(),
            basis: "(q,p,r)",
            computed: c1,
            printed: pv1[k].clone(),
        });
        v2.push(RMatrixComparison {
            matches: c2.sub(&pv2[k]).is_negligible(tol),
            label,
            basis: "(a,b,c)",
            computed: c2,
            printed: pv2[k].clone(),
        });
    }
    Ok(RMatrices { v1, v2, off_block })
}

/// Classification of one printed bracket line.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LineStatus {
    Match,
    Mismatch { computed: String },
    NotComparable { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditLine {
    pub printed: String,
    #[serde(flatten)]
    pub status: LineStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableAudit {
    pub lines: Vec<AuditLine>,
    pub matches: usize,
    pub mismatches: usize,
    pub not_comparable: usize,
}

impl TableAudit {
    pub fn find(&self, printed: &str) -> Vec<&AuditLine> {
        self.lines.iter().filter(|l| l.printed == printed).collect()
    }
}

/// A printed bracket `[x, y] = sum coef * label` with coefficients in the couplings.
struct Printed<S> {
    text: String,
    x: String,
    y: String,
    rhs: Vec<(S, String)>,
}

fn printed_table<S: Scalar>(p: &EpsilonParams<S>) -> Vec<Printed<S>> {
    let two = S::from_ratio(2, 1);
    let e1 = p.eps1.clone();
    let (e2, e3) = (p.eps2.clone(), p.eps3.clone());
    let (t1, t2) = (p.eps_t1.clone(), p.eps_t2.clone());
    let ratio = e2.clone() / e3.clone();
    let r = |y: &str, z: &str| format!("R[{y},{z}]");
    let mut out: Vec<Printed<S>> = Vec::new();
    let mut push = |text: &str, x: String, y: String, rhs: Vec<(S, String)>| {
        out.push(Printed {
            text: text.to_string(),
            x,
            y,
            rhs,
        })
    };
    let s = |x: &str| x.to_string();

    for (x, y) in [("q", "p"), ("q", "r"), ("p", "r"), ("a", "b"), ("a", "c"), ("b", "c"), ("r", "c")] {
        push(&format!("[{x},{y}]_+ = 0"), s(x), s(y), vec![]);
    }
    for (x, y) in [("p", "a"), ("q", "a"), ("p", "b"), ("q", "b"), ("p", "c"), ("q", "c")] {
        push(&format!("[{x},{y}]_+ = R_{{{x},{y}}}"), s(x), s(y), vec![(S::one(), r(x, y))]);
    }
    push("[r,a]_+ = (e2/e3) R_{q,c}", s("r"), s("a"), vec![(ratio.clone(), r("q", "c"))]);
    push("[r,b]_+ = (e2/e3) R_{p,c}", s("r"), s("b"), vec![(ratio, r("p", "c"))]);

    let two_e1 = two.clone() * e1.clone();
    let two_t1 = two.clone() * t1.clone();
    let act: Vec<(&str, &str, &str, Vec<(S, &str)>)> = vec![
        ("[R_{p,a},q]_- = 2e1 q", "R[p,a]", "q", vec![(two_e1.clone(), "q")]),
        ("[R_{p,a},p]_- = 0", "R[p,a]", "p", vec![]),
        ("[R_{p,a},r]_- = e2 r", "R[p,a]", "r", vec![(e2.clone(), "r")]),
        ("[R_{q,a},q]_- = 0", "R[q,a]", "q", vec![]),
        ("[R_{q,a},p]_- = -2e1 q", "R[q,a]", "p", vec![(-two_e1.clone(), "q")]),
        ("[R_{q,a},r]_- = 0", "R[q,a]", "r", vec![]),
        ("[R_{p,b},q]_- = 2e1 p", "R[p,b]", "q", vec![(two_e1.clone(), "p")]),
        ("[R_{p,b},p]_- = 0", "R[p,b]", "p", vec![]),
        ("[R_{p,b},r]_- = 0", "R[p,b]", "r", vec![]),
        ("[R_{q,b},q]_- = 0", "R[q,b]", "q", vec![]),
        ("[R_{q,b},p]_- = -2e1 p", "R[q,b]", "p", vec![(-two_e1.clone(), "p")]),
        ("[R_{q,b},r]_- = -e2 r", "R[q,b]", "r", vec![(-e2.clone(), "r")]),
        ("[R_{p,c},q]_- = e3 r", "R[p,c]", "q", vec![(e3.clone(), "r")]),
        ("[R_{p,c},p]_- = 0", "R[p,c]", "p", vec![]),
        ("[R_{p,c},r]_- = 0", "R[p,c]", "r", vec![]),
        ("[R_{q,c},q]_- = 0", "R[q,c]", "q", vec![]),
        ("[R_{q,c},p]_- = -e3 r", "R[q,c]", "p", vec![(-e3.clone(), "r")]),
        ("[R_{q,c},r]_- = 0", "R[q,c]", "r", vec![]),
        ("[R_{p,a},a]_- = 0", "R[p,a]", "a", vec![]),
        ("[R_{p,a},b]_- = 2t1 b", "R[p,a]", "b", vec![(two_t1.clone(), "b")]),
        ("[R_{p,a},c]_- = t2 c", "R[p,a]", "c", vec![(t2.clone(), "c")]),
        ("[R_{q,a},a]_- = 0", "R[q,a]", "a", vec![]),
        ("[R_{q,a},b]_- = 2t1 a", "R[q,a]", "b", vec![(two_t1.clone(), "a")]),
        ("[R_{q,a},c]_- = 0", "R[q,a]", "c", vec![]),
        ("[R_{p,b},a]_- = -2t1 b", "R[p,b]", "a", vec![(-two_t1.clone(), "b")]),
        ("[R_{p,b},b]_- = 0", "R[p,b]", "b", vec![]),
        ("[R_{p,b},c]_- = 0", "R[p,b]", "c", vec![]),
        ("[R_{q,b},a]_- = -2t1 a", "R[q,b]", "a", vec![(-two_t1.clone(), "a")]),
        ("[R_{q,b},b]_- = 0", "R[q,b]", "b", vec![]),
        ("[R_{q,b},c]_- = -t2 c", "R[q,b]", "c", vec![(-t2.clone(), "c")]),
        ("[R_{p,c},a]_- = -t2 c", "R[p,c]", "a", vec![(-t2.clone(), "c")]),
        ("[R_{p,c},b]_- = 0", "R[p,c]", "b", vec![]),
        ("[R_{p,c},c]_- = 0", "R[p,c]", "c", vec![]),
        ("[R_{q,c},a]_- = 0", "R[q,c]", "a", vec![]),
        ("[R_{q,c},b]_- = t2 c", "R[q,c]", "b", vec![(t2.clone(), "c")]),
        ("[R_{q,c},c]_- = 0", "R[q,c]", "c", vec![]),
        ("[R_{p,a},R_{p,b}]_- = -2e1 R_{p,b}", "R[p,a]", "R[p,b]", vec![(-two_e1.clone(), "R[p,b]")]),
        ("[R_{p,a},R_{q,a}]_- = 2e1 R_{q,a}", "R[p,a]", "R[q,a]", vec![(two_e1.clone(), "R[q,a]")]),
        ("[R_{p,a},R_{p,b}]_- = 0", "R[p,a]", "R[p,b]", vec![]),
        ("[R_{p,a},R_{p,c}]_- = t2 R_{p,c}", "R[p,a]", "R[p,c]", vec![(t2.clone(), "R[p,c]")]),
        ("[R_{p,a},R_{q,c}]_- = e2 R_{q,c}", "R[p,a]", "R[q,c]", vec![(e2.clone(), "R[q,c]")]),
        (
            "[R_{p,b},R_{q,a}]_- = 2e1 (R_{q,b} + R_{p,a})",
            "R[p,b]",
            "R[q,a]",
            vec![(two_e1.clone(), "R[q,b]"), (two_e1.clone(), "R[p,a]")],
        ),
        ("[R_{p,b},R_{q,b}]_- = 2e1 R_{p,b}", "R[p,b]", "R[q,b]", vec![(two_e1.clone(), "R[p,b]")]),
        ("[R_{p,b},R_{p,c}]_- = 0", "R[p,b]", "R[p,c]", vec![]),
        ("[R_{p,b},R_{q,c}]_- = 2e1 R_{p,c}", "R[p,b]", "R[q,c]", vec![(two_e1.clone(), "R[p,c]")]),
        ("[R_{q,a},R_{q,b}]_- = -2e1 R_{q,a}", "R[q,a]", "R[q,b]", vec![(-two_e1.clone(), "R[q,a]")]),
        ("[R_{q,a},R_{p,c}]_- = -2e1 R_{p,c}", "R[q,a]", "R[p,c]", vec![(-two_e1.clone(), "R[p,c]")]),
        ("[R_{q,a},R_{q,c}]_- = 0", "R[q,a]", "R[q,c]", vec![]),
        ("[R_{q,b},R_{p,c}]_- = -e2 R_{p,c}", "R[q,b]", "R[p,c]", vec![(-e2.clone(), "R[p,c]")]),
        ("[R_{q,b},R_{q,c}]_- = -t2 R_{q,c}", "R[q,b]", "R[q,c]", vec![(-t2, "R[q,c]")]),
        ("[R_{p,c},R_{q,c}]_- = 0", "R[p,c]", "R[q,c]", vec![]),
    ];
    for (text, x, y, rhs) in act {
        push(text, s(x), s(y), rhs.into_iter().map(|(c, l)| (c, s(l))).collect());
    }
    out
}

/// Formats a coordinate vector as `c1 x1 + c2 x2 ...`.
pub fn format_combination<S: Scalar>(v: &[S], labels: &[String]) -> String {
    let terms: Vec<String> = v
        .iter()
        .zip(labels)
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, l)| format!("{c} {l}"))
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

/// Recomputes every printed bracket of `g(V)` and classifies each line.
pub fn audit_structure_table<S: Scalar>(params: &EpsilonParams<S>) -> Result<TableAudit> {
    let osc = build_pair(params)?;
    let tol = S::default_tolerance();
    let sa: LieSuperalgebra<S> = build_super(&to_alts(&osc.pair), tol)?;
    let mut lines = Vec::new();
    for line in printed_table(&osc.params) {
        let status = classify(&sa, &line, tol);
        lines.push(AuditLine {
            printed: line.text,
            status,
        });
    }
    let count = |f: fn(&LineStatus) -> bool| lines.iter().filter(|l| f(&l.status)).count();
    Ok(TableAudit {
        matches: count(|s| matches!(s, LineStatus::Match)),
        mismatches: count(|s| matches!(s, LineStatus::Mismatch { .. })),
        not_comparable: count(|s| matches!(s, LineStatus::NotComparable { .. })),
        lines,
    })
}

fn classify<S: Scalar>(sa: &LieSuperalgebra<S>, line: &Printed<S>, tol: f64) -> LineStatus {
    let missing = |l: &str| LineStatus::NotComparable {
        reason: format!("{l} is not a basis element at these couplings"),
    };
    let Some(xi) = sa.index_of(&line.x) else {
        return missing(&line.x);
    };
    let Some(yi) = sa.index_of(&line.y) else {
        return missing(&line.y);
    };
    let mut expected = vec![S::zero(); sa.dim()];
    for (c, l) in &line.rhs {
        let Some(k) = sa.index_of(l) else {
            return missing(l);
        };
        expected[k] = expected[k].clone() + c.clone();
    }
    let computed = sa.constants.column(xi, yi).to_vec();
    let ok = computed
        .iter()
        .zip(&expected)
        .all(|(a, b)| (a.clone() - b.clone()).is_negligible(tol));
    if ok {
        LineStatus::Match
    } else {
        LineStatus::Mismatch {
            computed: format_combination(&computed, &sa.labels),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    #[test]
    fn resolves_worked_example() {
        let p = resolve_params(int(1), int(3), int(3)).unwrap();
        assert_eq!(p.as_array(), [int(1), int(-1), int(3), int(1), int(3), int(1)]);
        assert!(p.genericity().all());
    }

    #[test]
    fn symmetric_degenerate_point() {
        let p = resolve_params(int(0), int(1), int(1)).unwrap();
        assert_eq!(p.as_array(), [int(0), int(0), int(1), int(1), int(1), int(1)]);
    }

    #[test]
    fn zero_divisors_rejected() {
        assert!(resolve_params(int(1), int(0), int(1)).is_err());
        assert!(resolve_params(int(1), int(1), int(0)).is_err());
    }

    #[test]
    fn degenerate_combinations_are_flagged() {
        // e2 = 1, e1 = 1 gives t2 = -1, so e2 + t2 = 0
        let p = resolve_params(int(1), int(1), int(1)).unwrap();
        let g = p.genericity();
        assert!(!g.eps2_sum_nonzero);
        assert!(!g.all());
    }

    #[test]
    fn build_rejects_constraint_violations() {
        let mut p = resolve_params(int(1), int(3), int(3)).unwrap();
        p.eps_t3 = int(2);
        assert!(build_pair(&p).is_err());
    }

    #[test]
    fn structure_constants_at_worked_example() {
        let p = resolve_params(int(1), int(3), int(3)).unwrap();
        let o = build_pair(&p).unwrap();
        let e = |i: usize| {
            let mut v = vec![int(0); 3];
            v[i] = int(1);
            v
        };
        let br = |iso, x, y| o.pair.isobracket(Side::V1, &e(iso), &e(x), &e(y)).unwrap();
        assert_eq!(br(0, 0, 2), vec![int(0), int(0), int(3)]);
        assert_eq!(br(1, 1, 2), vec![int(0), int(0), int(-3)]);
        assert_eq!(br(2, 0, 1), vec![int(0), int(0), int(3)]);
        assert_eq!(br(0, 1, 2), vec![int(0); 3]);
        assert_eq!(br(0, 0, 1), vec![int(0), int(2), int(0)]);
    }

    #[test]
    fn printed_r_matrices_agree_with_triple_product() {
        let p = resolve_params(rat(2, 3), int(5), int(7)).unwrap();
        let r = r_matrices(&p).unwrap();
        assert!(r.mismatches().is_empty());
        assert_eq!(r.off_block, 0.0);
        assert_eq!(r.v1[0].computed, Matrix::from_fn(3, 3, |i, j| {
            if i != j {
                int(0)
            } else {
                [rat(4, 3), int(0), int(5)][i].clone()
            }
        }));
    }

    #[test]
    fn params_document_accepts_strings_and_decimals() {
        let d: ParamsDocument = serde_json::from_str(r#"{"eps1": "1/2", "eps2": 3, "eps3": 0.5}"#).unwrap();
        let p = d.resolve().unwrap();
        assert_eq!(p.eps1, rat(1, 2));
        assert_eq!(p.eps3, rat(1, 2));
        assert!(serde_json::from_str::<ParamsDocument>(r#"{"eps1":1,"eps2":1,"eps3":1,"x":0}"#).is_err());
    }
}
