//! Representations `(T1, T2)` of an isotopic pair on a space `W`:
//! `T1([X,Y]_A) = T1(X) T2(A) T1(Y) - T1(Y) T2(A) T1(X)` and the same with
//! the roles of `V1` and `V2` exchanged.

use serde::{Deserialize, Serialize};

use crate::algebra::pair::{IsotopicPair, Side};
use crate::algebra::tensor::IsoTensor;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::oscillator::value_to_rational;
use crate::report::{AxiomReport, ResidualTracker};
use crate::scalar::{Rational, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct PairRepresentation<S> {
    pub dim_w: usize,
    pub t1: Vec<Matrix<S>>,
    pub t2: Vec<Matrix<S>>,
    /// `(d1, d2)` with `W = W1 + W2`, `dim W1 = d1` listed first.
    pub grading: Option<(usize, usize)>,
}

impl<S: Scalar> PairRepresentation<S> {
    pub fn new(dim_w: usize, t1: Vec<Matrix<S>>, t2: Vec<Matrix<S>>, grading: Option<(usize, usize)>) -> Result<Self> {
        for m in t1.iter().chain(&t2) {
            if m.rows() != dim_w || m.cols() != dim_w {
                return Err(Error::dimension("representation matrix", dim_w, m.rows().max(m.cols())));
            }
        }
        if let Some((d1, d2)) = grading {
            if d1 + d2 != dim_w {
                return Err(Error::dimension("grading d1 + d2", dim_w, d1 + d2));
            }
        }
        Ok(Self { dim_w, t1, t2, grading })
    }

    pub fn zero(n1: usize, n2: usize, dim_w: usize, grading: Option<(usize, usize)>) -> Result<Self> {
        let z = Matrix::zeros(dim_w, dim_w);
        Self::new(dim_w, vec![z.clone(); n1], vec![z; n2], grading)
    }

    pub fn side(&self, side: Side) -> &[Matrix<S>] {
        match side {
            Side::V1 => &self.t1,
            Side::V2 => &self.t2,
        }
    }

    /// Image of a coordinate vector of `V1` or `V2`.
    pub fn image(&self, side: Side, coords: &[S]) -> Matrix<S> {
        let mut out = Matrix::zeros(self.dim_w, self.dim_w);
        for (c, m) in coords.iter().zip(self.side(side)) {
            if !c.is_zero() {
                out.add_scaled(c, m);
            }
        }
        out
    }

    pub fn to_f64(&self) -> PairRepresentation<f64> {
        PairRepresentation {
            dim_w: self.dim_w,
            t1: self.t1.iter().map(Matrix::to_f64).collect(),
            t2: self.t2.iter().map(Matrix::to_f64).collect(),
            grading: self.grading,
        }
    }

    /// Sum of squared entries of all matrices.
    pub fn norm_sq(&self) -> f64 {
        self.t1
            .iter()
            .chain(&self.t2)
            .flat_map(|m| m.as_slice().iter().map(|v| v.to_f64().powi(2)))
            .sum()
    }
}

/// `T([x,y]_a) - T(x) T'(a) T(y) + T(y) T'(a) T(x)` for one basis triple.
pub(crate) fn relation_defect<S: Scalar>(
    family: &IsoTensor<S>,
    own: &[Matrix<S>],
    other: &[Matrix<S>],
    iso: usize,
    i: usize,
    j: usize,
) -> Matrix<S> {
    let mut lhs = Matrix::zeros(own[0].rows(), own[0].cols());
    for (out, m) in own.iter().enumerate() {
        let c = family.get(iso, i, j, out);
        if !c.is_zero() {
            lhs.add_scaled(c, m);
        }
    }
    let a = &other[iso];
    let xay = Matrix::product(&[&own[i], a, &own[j]]);
    let yax = Matrix::product(&[&own[j], a, &own[i]]);
    lhs.sub(&xay.sub(&yax))
}

/// Checks the defining relations over all basis triples and reports the
/// flags `valid`, `nilpotent` and `split`.
pub fn verify_representation<S: Scalar>(rep: &PairRepresentation<S>, pair: &IsotopicPair<S>, tol: f64) -> Result<AxiomReport> {
    if rep.t1.len() != pair.n1() || rep.t2.len() != pair.n2() {
        return Err(Error::dimension("representation vs pair", pair.n1() + pair.n2(), rep.t1.len() + rep.t2.len()));
    }
    let mut report = AxiomReport::for_scalar::<S>("pair representation", tol);
    for side in [Side::V1, Side::V2] {
        let own = rep.side(side);
        let other = rep.side(side.other());
        let family = pair.tensor(side);
        let name = format!("relations.{side:?}");
        let mut tr = ResidualTracker::new(&name);
        if own.is_empty() || other.is_empty() || rep.dim_w == 0 {
            report.push(tr);
            continue;
        }
        for iso in 0..other.len() {
            for i in 0..own.len() {
                for j in i + 1..own.len() {
                    let d = relation_defect(family, own, other, iso, i, j);
                    tr.record(d.max_abs(), &[iso, i, j], || {
                        let (l_own, l_other) = (pair.labels(side), pair.labels(side.other()));
                        vec![l_other[iso].clone(), l_own[i].clone(), l_own[j].clone()]
                    });
                }
            }
        }
        report.push(tr);
    }
    let zero_tol = if S::EXACT { 0.0 } else { tol };
    let valid = report.passed;
    let nilpotent = [&rep.t1, &rep.t2]
        .iter()
        .all(|fam| fam.iter().all(|x| fam.iter().all(|y| x.matmul(y).is_negligible(zero_tol))));
    let split = rep.grading.is_some_and(|g| is_split_shape(rep, g, zero_tol));
    report.flag("valid", valid);
    report.flag("nilpotent", nilpotent);
    report.flag("split", split);
    Ok(report)
}

/// `T1` maps `W1 -> W2` and kills `W2`; `T2` maps `W2 -> W1` and kills `W1`.
fn is_split_shape<S: Scalar>(rep: &PairRepresentation<S>, (d1, d2): (usize, usize), tol: f64) -> bool {
    rep.t1.iter().all(|m| m.max_abs_outside(d1, 0, d2, d1) <= tol) && rep.t2.iter().all(|m| m.max_abs_outside(0, d1, d1, d2) <= tol)
}

/// `T1^s(X) = [[0,0],[T1(X),0]]`, `T2^s(A) = [[0,T2(A)],[0,0]]` on `W + W`.
pub fn split_double<S: Scalar>(rep: &PairRepresentation<S>) -> PairRepresentation<S> {
    let k = rep.dim_w;
    let embed = |m: &Matrix<S>, r0: usize, c0: usize| {
        let mut out = Matrix::zeros(2 * k, 2 * k);
        out.set_block(r0, c0, m);
        out
    };
    PairRepresentation {
        dim_w: 2 * k,
        t1: rep.t1.iter().map(|m| embed(m, k, 0)).collect(),
        t2: rep.t2.iter().map(|m| embed(m, 0, k)).collect(),
        grading: Some((k, k)),
    }
}

/// Builds a split representation from its off-diagonal blocks:
/// `u[i]` is the `d2 x d1` block of `T1(e_i)`, `v[a]` the `d1 x d2` block of `T2(f_a)`.
pub fn from_blocks<S: Scalar>(d1: usize, d2: usize, u: &[Matrix<S>], v: &[Matrix<S>]) -> Result<PairRepresentation<S>> {
    let n = d1 + d2;
    let mut t1 = Vec::with_capacity(u.len());
    for b in u {
        if (b.rows(), b.cols()) != (d2, d1) {
            return Err(Error::dimension("T1 block rows*cols", d2 * d1, b.rows() * b.cols()));
        }
        let mut m = Matrix::zeros(n, n);
        m.set_block(d1, 0, b);
        t1.push(m);
    }
    let mut t2 = Vec::with_capacity(v.len());
    for b in v {
        if (b.rows(), b.cols()) != (d1, d2) {
            return Err(Error::dimension("T2 block rows*cols", d1 * d2, b.rows() * b.cols()));
        }
        let mut m = Matrix::zeros(n, n);
        m.set_block(0, d1, b);
        t2.push(m);
    }
    PairRepresentation::new(n, t1, t2, Some((d1, d2)))
}

/// The defining representation of `hom_pair(n, m)` on `H1 + H2 = C^n + C^m`.
pub fn hom_tautological(n: usize, m: usize) -> Result<PairRepresentation<Rational>> {
    let (v1, v2) = crate::superalgebra::hom_blocks(n, m);
    from_blocks(n, m, &v1, &v2)
}

/// Extends a representation of the sub-pair on `keep1`, `keep2` by zero on the
/// remaining basis vectors.
pub fn zero_extension<S: Scalar>(
    sub: &PairRepresentation<S>,
    n1: usize,
    n2: usize,
    keep1: &[usize],
    keep2: &[usize],
) -> Result<PairRepresentation<S>> {
    let place = |family: &[Matrix<S>], keep: &[usize], n: usize| -> Result<Vec<Matrix<S>>> {
        if keep.len() != family.len() || keep.iter().any(|&k| k >= n) {
            return Err(Error::Input("zero extension: index list does not match the sub-representation".into()));
        }
        let mut out = vec![Matrix::zeros(sub.dim_w, sub.dim_w); n];
        for (m, &k) in family.iter().zip(keep) {
            out[k] = m.clone();
        }
        Ok(out)
    };
    PairRepresentation::new(sub.dim_w, place(&sub.t1, keep1, n1)?, place(&sub.t2, keep2, n2)?, sub.grading)
}

/// JSON form: `{"dimW": k, "grading": [d1, d2] | null, "t1": [...], "t2": [...]}`
/// with each matrix a list of rows. Entries are numbers or rational strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentationDocument {
    #[serde(rename = "dimW")]
    pub dim_w: usize,
    #[serde(default)]
    pub grading: Option<[usize; 2]>,
    pub t1: Vec<Vec<Vec<serde_json::Value>>>,
    pub t2: Vec<Vec<Vec<serde_json::Value>>>,
}

impl RepresentationDocument {
    pub fn from_rep<S: Scalar>(rep: &PairRepresentation<S>) -> Self {
        let cell = |v: &S| {
            if S::EXACT {
                serde_json::Value::String(v.to_string())
            } else {
                serde_json::Number::from_f64(v.to_f64()).map_or(serde_json::Value::Null, serde_json::Value::Number)
            }
        };
        let rows = |m: &Matrix<S>| (0..m.rows()).map(|r| m.row(r).iter().map(cell).collect()).collect();
        Self {
            dim_w: rep.dim_w,
            grading: rep.grading.map(|(a, b)| [a, b]),
            t1: rep.t1.iter().map(rows).collect(),
            t2: rep.t2.iter().map(rows).collect(),
        }
    }

    pub fn to_rational(&self) -> Result<PairRepresentation<Rational>> {
        let conv = |fam: &Vec<Vec<Vec<serde_json::Value>>>| -> Result<Vec<Matrix<Rational>>> {
            fam.iter()
                .map(|rows| {
                    let rows = rows
                        .iter()
                        .map(|r| r.iter().map(value_to_rational).collect::<Result<Vec<_>>>())
                        .collect::<Result<Vec<_>>>()?;
                    if rows.len() != self.dim_w || rows.iter().any(|r| r.len() != self.dim_w) {
                        return Err(Error::Input(format!("every matrix must be {0}x{0}", self.dim_w)));
                    }
                    Matrix::from_rows(rows)
                })
                .collect()
        };
        PairRepresentation::new(self.dim_w, conv(&self.t1)?, conv(&self.t2)?, self.grading.map(|[a, b]| (a, b)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oscillator::{build_pair, resolve_params};
    use crate::scalar::{int, rat};
    use crate::superalgebra::hom_pair;

    #[test]
    fn zero_rep_is_valid_nilpotent_split() {
        let pair = hom_pair(2, 1).unwrap();
        let rep = PairRepresentation::<Rational>::zero(2, 2, 3, Some((2, 1))).unwrap();
        let r = verify_representation(&rep, &pair, 0.0).unwrap();
        assert!(r.passed);
        assert!(r.flags["valid"] && r.flags["nilpotent"] && r.flags["split"]);
        let d = split_double(&rep);
        assert_eq!(d.dim_w, 6);
        assert!(d.t1.iter().all(|m| m.is_negligible(0.0)));
    }

    #[test]
    fn tautological_and_its_double() {
        for (n, m) in [(1, 1), (2, 1), (2, 2)] {
            let pair = hom_pair(n, m).unwrap();
            let rep = hom_tautological(n, m).unwrap();
            let r = verify_representation(&rep, &pair, 0.0).unwrap();
            assert!(r.flags["valid"] && r.flags["split"] && r.flags["nilpotent"], "{n},{m}");
            let d = verify_representation(&split_double(&rep), &pair, 0.0).unwrap();
            assert!(d.flags["valid"] && d.flags["split"]);
        }
    }

    #[test]
    fn broken_entry_is_caught() {
        let pair = hom_pair(2, 1).unwrap();
        let mut rep = hom_tautological(2, 1).unwrap();
        rep.t1[0][(2, 0)] = int(2);
        let r = verify_representation(&rep, &pair, 0.0).unwrap();
        assert!(!r.flags["valid"]);
        assert!(r.flags["split"]);
    }

    #[test]
    fn oscillator_zero_extension() {
        let p = resolve_params(rat(2, 3), int(5), int(7)).unwrap();
        let osc = build_pair(&p).unwrap();
        let sub = osc.pair.restrict(&[0, 1], &[0, 1]).unwrap();
        let two_e1 = int(2) * p.eps1.clone();
        let u = vec![Matrix::unit(1, 2, 0, 0), Matrix::unit(1, 2, 0, 1)];
        let v = vec![Matrix::unit(2, 1, 0, 0).scale(&two_e1), Matrix::unit(2, 1, 1, 0).scale(&-two_e1)];
        let rep = from_blocks(2, 1, &u, &v).unwrap();
        assert!(verify_representation(&rep, &sub, 0.0).unwrap().flags["valid"]);
        let full = zero_extension(&rep, 3, 3, &[0, 1], &[0, 1]).unwrap();
        let r = verify_representation(&full, &osc.pair, 0.0).unwrap();
        assert!(r.flags["valid"] && r.flags["split"]);
    }

    #[test]
    fn document_round_trip() {
        let rep = hom_tautological(2, 1).unwrap();
        let doc = RepresentationDocument::from_rep(&rep);
        let json = serde_json::to_string(&doc).unwrap();
        assert!(json.contains("\"dimW\":3"));
        let back: RepresentationDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_rational().unwrap(), rep);
        let bad = json.replace("\"dimW\":3", "\"dimW\":4");
        let bad: RepresentationDocument = serde_json::from_str(&bad).unwrap();
        assert!(bad.to_rational().is_err());
    }
}
