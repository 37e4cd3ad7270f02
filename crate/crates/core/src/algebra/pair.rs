use num::Zero;
use serde::{Deserialize, Serialize};

use super::tensor::IsoTensor;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, SpanSolver};
use crate::scalar::{to_i64_pair, Rational, Scalar};

/// Which half of a pair a vector lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    V1,
    V2,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::V1 => Side::V2,
            Side::V2 => Side::V1,
        }
    }
}

/// Two spaces, each carrying a linear family of brackets indexed by the other.
///
/// `m1` holds `[e_i, e_j]_{f_a}` on `V1` (isotope `f_a` from `V2`), `m2` holds
/// `[f_i, f_j]_{e_a}` on `V2`.
#[derive(Clone, Debug, PartialEq)]
pub struct IsotopicPair<S> {
    m1: IsoTensor<S>,
    m2: IsoTensor<S>,
    labels1: Vec<String>,
    labels2: Vec<String>,
}

impl<S: Scalar> IsotopicPair<S> {
    pub fn zeros(n1: usize, n2: usize) -> Self {
        Self {
            m1: IsoTensor::zeros(n2, n1),
            m2: IsoTensor::zeros(n1, n2),
            labels1: default_labels("e", n1),
            labels2: default_labels("f", n2),
        }
    }

    pub fn from_tensors(m1: IsoTensor<S>, m2: IsoTensor<S>) -> Result<Self> {
        if m1.iso_dim() != m2.dim() || m2.iso_dim() != m1.dim() {
            return Err(Error::dimension("pair tensors", m2.dim(), m1.iso_dim()));
        }
        let (n1, n2) = (m1.dim(), m2.dim());
        Ok(Self {
            m1,
            m2,
            labels1: default_labels("e", n1),
            labels2: default_labels("f", n2),
        })
    }

    pub fn with_labels(mut self, labels1: Vec<String>, labels2: Vec<String>) -> Result<Self> {
        if labels1.len() != self.n1() || labels2.len() != self.n2() {
            return Err(Error::dimension("labels", self.n1() + self.n2(), labels1.len() + labels2.len()));
        }
        self.labels1 = labels1;
        self.labels2 = labels2;
        Ok(self)
    }

    pub fn n1(&self) -> usize {
        self.m1.dim()
    }

    pub fn n2(&self) -> usize {
        self.m2.dim()
    }

    pub fn dim(&self, side: Side) -> usize {
        match side {
            Side::V1 => self.n1(),
            Side::V2 => self.n2(),
        }
    }

    pub fn m1(&self) -> &IsoTensor<S> {
        &self.m1
    }

    pub fn m2(&self) -> &IsoTensor<S> {
        &self.m2
    }

    /// The bracket family acting on `side`.
    pub fn tensor(&self, side: Side) -> &IsoTensor<S> {
        match side {
            Side::V1 => &self.m1,
            Side::V2 => &self.m2,
        }
    }

    pub fn tensor_mut(&mut self, side: Side) -> &mut IsoTensor<S> {
        match side {
            Side::V1 => &mut self.m1,
            Side::V2 => &mut self.m2,
        }
    }

    pub fn labels(&self, side: Side) -> &[String] {
        match side {
            Side::V1 => &self.labels1,
            Side::V2 => &self.labels2,
        }
    }

    /// Labels of `V1` followed by `V2`, the order used on `V1 + V2`.
    pub fn all_labels(&self) -> Vec<String> {
        self.labels1.iter().chain(&self.labels2).cloned().collect()
    }

    /// Sets `[x_i, x_j]_{iso} = value * x_out` on `side`, with the antisymmetric partner.
    pub fn set(&mut self, side: Side, iso: usize, i: usize, j: usize, out: usize, value: S) {
        self.tensor_mut(side).set_antisymmetric(iso, i, j, out, value);
    }

    /// `[x, y]_isotope` on `side`, where `isotope` is a vector of the other side.
    pub fn isobracket(&self, side: Side, isotope: &[S], x: &[S], y: &[S]) -> Result<Vec<S>> {
        self.tensor(side).apply(isotope, x, y)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> IsotopicPair<T> {
        IsotopicPair {
            m1: self.m1.map(f),
            m2: self.m2.map(f),
            labels1: self.labels1.clone(),
            labels2: self.labels2.clone(),
        }
    }

    pub fn to_f64(&self) -> IsotopicPair<f64> {
        self.map(|x| x.to_f64())
    }

    /// Pair realized inside an associative matrix algebra by `[X,Y]_A = XAY - YAX`.
    ///
    /// `v1` and `v2` are matrices such that `XAY` lands back in `span(v1)` for
    /// `X, Y` in `v1` and `A` in `v2`, and symmetrically. Shapes may be
    /// rectangular (`v1: p x q`, `v2: q x p`).
    pub fn from_associative(v1: &[Matrix<S>], v2: &[Matrix<S>], tol: f64) -> Result<Self> {
        let m1 = associative_family(v1, v2, tol, "V1")?;
        let m2 = associative_family(v2, v1, tol, "V2")?;
        Self::from_tensors(m1, m2)
    }

    /// The same pair in the rescaled bases `e'_i = s1[i] e_i`, `f'_a = s2[a] f_a`.
    pub fn rescaled(&self, s1: &[S], s2: &[S]) -> Result<Self> {
        if s1.len() != self.n1() || s2.len() != self.n2() {
            return Err(Error::dimension("rescaling", self.n1() + self.n2(), s1.len() + s2.len()));
        }
        if s1.iter().chain(s2).any(|s| s.is_zero()) {
            return Err(Error::Params("rescaling factors must be nonzero".into()));
        }
        let scale = |t: &IsoTensor<S>, s: &[S], iso: &[S]| {
            let mut out = IsoTensor::zeros(t.iso_dim(), t.dim());
            for a in 0..t.iso_dim() {
                for i in 0..t.dim() {
                    for j in 0..t.dim() {
                        for k in 0..t.dim() {
                            let v = t.get(a, i, j, k);
                            if !v.is_zero() {
                                let f = iso[a].clone() * s[i].clone() * s[j].clone() / s[k].clone();
                                out.set_raw(a, i, j, k, v.clone() * f);
                            }
                        }
                    }
                }
            }
            out
        };
        Ok(Self {
            m1: scale(&self.m1, s1, s2),
            m2: scale(&self.m2, s2, s1),
            labels1: self.labels1.clone(),
            labels2: self.labels2.clone(),
        })
    }

    /// Sub-pair on the given basis indices, which must be closed under all brackets.
    pub fn restrict(&self, keep1: &[usize], keep2: &[usize]) -> Result<Self> {
        let m1 = restrict_family(&self.m1, keep1, keep2, &self.labels1)?;
        let m2 = restrict_family(&self.m2, keep2, keep1, &self.labels2)?;
        Ok(Self {
            m1,
            m2,
            labels1: keep1.iter().map(|&i| self.labels1[i].clone()).collect(),
            labels2: keep2.iter().map(|&i| self.labels2[i].clone()).collect(),
        })
    }
}

fn default_labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn associative_family<S: Scalar>(
    space: &[Matrix<S>],
    isotopes: &[Matrix<S>],
    tol: f64,
    what: &str,
) -> Result<IsoTensor<S>> {
    let flat: Vec<Vec<S>> = space.iter().map(|m| m.as_slice().to_vec()).collect();
    let solver = SpanSolver::new(flat, tol)?;
    if solver.dim() != space.len() {
        return Err(Error::Precondition(format!("{what} basis matrices are linearly dependent")));
    }
    let mut t = IsoTensor::zeros(isotopes.len(), space.len());
    for (a, iso) in isotopes.iter().enumerate() {
        for i in 0..space.len() {
            for j in (i + 1)..space.len() {
                let xay = Matrix::product(&[&space[i], iso, &space[j]]);
                let yax = Matrix::product(&[&space[j], iso, &space[i]]);
                let v = xay.sub(&yax);
                let coords = solver.solve(v.as_slice()).ok_or_else(|| Error::NotClosed {
                    what: what.to_string(),
                    detail: format!("XAY - YAX leaves the span at (A={a}, X={i}, Y={j})"),
                })?;
                for (k, c) in coords.into_iter().enumerate() {
                    if !c.is_zero() {
                        t.set_antisymmetric(a, i, j, k, c);
                    }
                }
            }
        }
    }
    Ok(t)
}

fn restrict_family<S: Scalar>(
    t: &IsoTensor<S>,
    keep: &[usize],
    keep_iso: &[usize],
    labels: &[String],
) -> Result<IsoTensor<S>> {
    if keep.iter().any(|&k| k >= t.dim()) || keep_iso.iter().any(|&k| k >= t.iso_dim()) {
        return Err(Error::Input("basis index out of range".into()));
    }
    let mut out = IsoTensor::zeros(keep_iso.len(), keep.len());
    for (na, &a) in keep_iso.iter().enumerate() {
        for (ni, &i) in keep.iter().enumerate() {
            for (nj, &j) in keep.iter().enumerate() {
                let col = t.column(a, i, j);
                for (k, v) in col.iter().enumerate() {
                    if v.is_zero() {
                        continue;
                    }
                    let Some(nk) = keep.iter().position(|&x| x == k) else {
                        return Err(Error::NotClosed {
                            what: "sub-pair".into(),
                            detail: format!("a bracket of ({}, {}) has a component along {}", labels[i], labels[j], labels[k]),
                        });
                    };
                    out.set_raw(na, ni, nj, nk, v.clone());
                }
            }
        }
    }
    Ok(out)
}

/// JSON document: rational entries `[isotope, i, j, out, num, den]`.
///
/// Only one of `(i, j)` and `(j, i)` needs to be listed; the other follows by
/// antisymmetry. Listing both with inconsistent values is an error.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairDocument {
    pub n1: usize,
    pub n2: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels1: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels2: Option<Vec<String>>,
    pub m1: Vec<[i64; 6]>,
    pub m2: Vec<[i64; 6]>,
}

impl PairDocument {
    pub fn into_pair(self) -> Result<IsotopicPair<Rational>> {
        let mut pair = IsotopicPair::<Rational>::zeros(self.n1, self.n2);
        fill(&mut pair, Side::V1, &self.m1, "m1")?;
        fill(&mut pair, Side::V2, &self.m2, "m2")?;
        let labels1 = self.labels1.unwrap_or_else(|| pair.labels1.clone());
        let labels2 = self.labels2.unwrap_or_else(|| pair.labels2.clone());
        pair.with_labels(labels1, labels2)
    }

    /// Exports entries with `i < j` only. Fails if a constant does not fit `i64`.
    pub fn from_pair(pair: &IsotopicPair<Rational>) -> Result<Self> {
        Ok(Self {
            n1: pair.n1(),
            n2: pair.n2(),
            labels1: Some(pair.labels1.clone()),
            labels2: Some(pair.labels2.clone()),
            m1: entries(pair.m1())?,
            m2: entries(pair.m2())?,
        })
    }
}

fn fill(pair: &mut IsotopicPair<Rational>, side: Side, rows: &[[i64; 6]], name: &str) -> Result<()> {
    let n = pair.dim(side);
    let n_iso = pair.dim(side.other());
    let mut seen = std::collections::HashMap::new();
    for (row_no, &[a, i, j, k, num, den]) in rows.iter().enumerate() {
        let loc = format!("{name}[{row_no}]");
        let idx = |v: i64, bound: usize| usize::try_from(v).ok().filter(|&u| u < bound);
        let (Some(a), Some(i), Some(j), Some(k)) = (idx(a, n_iso), idx(i, n), idx(j, n), idx(k, n)) else {
            return Err(Error::Input(format!("{loc}: index out of range")));
        };
        if den == 0 {
            return Err(Error::Input(format!("{loc}: zero denominator")));
        }
        let value = Rational::from_ratio(num, den);
        if i == j {
            if value.is_zero() {
                continue;
            }
            return Err(Error::Input(format!("{loc}: nonzero diagonal entry [x{i}, x{i}]")));
        }
        let (key, signed) = if i < j {
            ((a, i, j, k), value.clone())
        } else {
            ((a, j, i, k), -value.clone())
        };
        if let Some(prev) = seen.insert(key, signed.clone()) {
            if prev != signed {
                return Err(Error::Input(format!("{loc}: conflicts with an earlier entry")));
            }
        }
        pair.set(side, a, i, j, k, value);
    }
    Ok(())
}

fn entries(t: &IsoTensor<Rational>) -> Result<Vec<[i64; 6]>> {
    let mut out = Vec::new();
    for a in 0..t.iso_dim() {
        for i in 0..t.dim() {
            for j in (i + 1)..t.dim() {
                for (k, v) in t.column(a, i, j).iter().enumerate() {
                    if v.is_zero() {
                        continue;
                    }
                    let (num, den) = to_i64_pair(v)
                        .ok_or_else(|| Error::Input("structure constant does not fit in i64".into()))?;
                    out.push([a as i64, i as i64, j as i64, k as i64, num, den]);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn tiny() -> IsotopicPair<Rational> {
        let mut p = IsotopicPair::zeros(2, 1);
        p.set(Side::V1, 0, 0, 1, 1, int(3));
        p
    }

    #[test]
    fn isobracket_is_antisymmetric() {
        let p = tiny();
        let x = vec![int(1), int(0)];
        let y = vec![int(0), int(1)];
        let a = vec![int(2)];
        let xy = p.isobracket(Side::V1, &a, &x, &y).unwrap();
        let yx = p.isobracket(Side::V1, &a, &y, &x).unwrap();
        assert_eq!(xy, vec![int(0), int(6)]);
        assert_eq!(yx, vec![int(0), int(-6)]);
        assert!(p.isobracket(Side::V1, &a, &x, &x).unwrap().iter().all(|v| v == &int(0)));
    }

    #[test]
    fn isobracket_rejects_bad_lengths() {
        let p = tiny();
        let x = vec![int(1), int(0)];
        assert!(p.isobracket(Side::V1, &[int(1), int(1)], &x, &x).is_err());
        assert!(p.isobracket(Side::V1, &[int(1)], &x, &[int(1)]).is_err());
    }

    #[test]
    fn json_fills_antisymmetric_partner() {
        let doc: PairDocument = serde_json::from_str(
            r#"{"n1":2,"n2":1,"m1":[[0,1,0,1,-3,1]],"m2":[]}"#,
        )
        .unwrap();
        let p = doc.into_pair().unwrap();
        assert_eq!(p, tiny().with_labels(p.labels1.clone(), p.labels2.clone()).unwrap());
        let back = PairDocument::from_pair(&p).unwrap();
        assert_eq!(back.m1, vec![[0, 0, 1, 1, 3, 1]]);
    }

    #[test]
    fn json_rejects_conflicts_and_diagonal() {
        let conflict = r#"{"n1":2,"n2":1,"m1":[[0,0,1,1,3,1],[0,1,0,1,3,1]],"m2":[]}"#;
        let doc: PairDocument = serde_json::from_str(conflict).unwrap();
        assert!(doc.into_pair().is_err());
        let diag = r#"{"n1":2,"n2":1,"m1":[[0,0,0,1,3,1]],"m2":[]}"#;
        let doc: PairDocument = serde_json::from_str(diag).unwrap();
        assert!(doc.into_pair().is_err());
        let unknown = r#"{"n1":2,"n2":1,"m1":[],"m2":[],"m3":[]}"#;
        assert!(serde_json::from_str::<PairDocument>(unknown).is_err());
    }

    #[test]
    fn restrict_detects_leaks() {
        let p = tiny();
        assert!(p.restrict(&[0], &[0]).is_ok());
        let mut q = IsotopicPair::<Rational>::zeros(3, 1);
        q.set(Side::V1, 0, 0, 1, 2, int(1));
        assert!(q.restrict(&[0, 1], &[0]).is_err());
    }
}
