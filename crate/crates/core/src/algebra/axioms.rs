//! Identity checks for isotopic and anti-Jordan pairs.

use rayon::prelude::*;

use super::pair::{IsotopicPair, Side};
use super::tensor::{unit, SparseIso, SparseVec};
use crate::report::{AxiomReport, ResidualTracker};
use crate::scalar::Scalar;

/// Sparse views of both bracket families.
pub(crate) struct PairView<'a, S> {
    pub pair: &'a IsotopicPair<S>,
    m1: SparseIso<S>,
    m2: SparseIso<S>,
}

impl<'a, S: Scalar> PairView<'a, S> {
    pub fn new(pair: &'a IsotopicPair<S>) -> Self {
        Self {
            pair,
            m1: pair.m1().sparse(),
            m2: pair.m2().sparse(),
        }
    }

    pub fn family(&self, side: Side) -> &SparseIso<S> {
        match side {
            Side::V1 => &self.m1,
            Side::V2 => &self.m2,
        }
    }

    pub fn br(&self, side: Side, iso: &SparseVec<S>, x: &SparseVec<S>, y: &SparseVec<S>) -> SparseVec<S> {
        self.family(side).apply(iso, x, y)
    }

    /// Accumulates `coef * [x, y]_iso` into a dense buffer.
    pub fn acc(&self, side: Side, coef: &S, iso: &SparseVec<S>, x: &SparseVec<S>, y: &SparseVec<S>, out: &mut [S]) {
        self.family(side).accumulate(coef, iso, x, y, out);
    }

    fn label(&self, side: Side, i: usize) -> String {
        self.pair.labels(side)[i].clone()
    }
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::V1 => "V1",
        Side::V2 => "V2",
    }
}

fn antisymmetry<S: Scalar>(pair: &IsotopicPair<S>, side: Side) -> ResidualTracker {
    let mut t = ResidualTracker::new(format!("antisymmetry.{}", side_name(side)));
    let (defect, at) = pair.tensor(side).antisymmetry_defect();
    let n = pair.dim(side);
    let n_iso = pair.dim(side.other());
    let at = at.unwrap_or([0, 0, 0]);
    let labels = || {
        vec![
            pair.labels(side.other())[at[0]].clone(),
            pair.labels(side)[at[1]].clone(),
            pair.labels(side)[at[2]].clone(),
        ]
    };
    if n > 0 && n_iso > 0 {
        t.record(defect, &at, labels);
    }
    t
}

/// Jacobi identity for each basis isotope and for each polarized pair of
/// basis isotopes. Together these cover every isotope in the span, since the
/// Jacobiator is quadratic in the isotope.
fn jacobi<S: Scalar>(view: &PairView<'_, S>, side: Side) -> (ResidualTracker, ResidualTracker) {
    let n = view.pair.dim(side);
    let n_iso = view.pair.dim(side.other());
    let name = side_name(side);
    let iso_pairs: Vec<(usize, usize)> = (0..n_iso).flat_map(|a| (a..n_iso).map(move |b| (a, b))).collect();
    let trackers: Vec<(ResidualTracker, ResidualTracker)> = iso_pairs
        .par_iter()
        .map(|&(a, b)| {
            let mut plain = ResidualTracker::new(format!("jacobi.{name}"));
            let mut mixed = ResidualTracker::new(format!("polarized_jacobi.{name}"));
            let (ea, eb) = (unit::<S>(a), unit::<S>(b));
            for i in 0..n {
                for j in (i + 1)..n {
                    for k in (j + 1)..n {
                        let (x, y, z) = (unit::<S>(i), unit::<S>(j), unit::<S>(k));
                        let mut out = vec![S::zero(); n];
                        let one = S::one();
                        for (u, v, w) in [(&x, &y, &z), (&y, &z, &x), (&z, &x, &y)] {
                            let uv_a = view.br(side, &ea, u, v);
                            view.acc(side, &one, &eb, &uv_a, w, &mut out);
                            if a != b {
                                let uv_b = view.br(side, &eb, u, v);
                                view.acc(side, &one, &ea, &uv_b, w, &mut out);
                            }
                        }
                        let r = crate::report::vec_residual(&out);
                        let labels = || {
                            vec![
                                view.label(side.other(), a),
                                view.label(side.other(), b),
                                view.label(side, i),
                                view.label(side, j),
                                view.label(side, k),
                            ]
                        };
                        if a == b {
                            plain.record(r, &[a, i, j, k], || {
                                let mut l = labels();
                                l.remove(1);
                                l
                            });
                        } else {
                            mixed.record(r, &[a, b, i, j, k], labels);
                        }
                    }
                }
            }
            (plain, mixed)
        })
        .collect();
    let mut plain = ResidualTracker::new(format!("jacobi.{name}"));
    let mut mixed = ResidualTracker::new(format!("polarized_jacobi.{name}"));
    for (p, m) in trackers {
        plain = plain.merge(p);
        mixed = mixed.merge(m);
    }
    (plain, mixed)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Compat {
    Isotopic,
    AntiJordan,
}

/// Sweeps `[X,Y]_{[A,B]_Z}` against the chosen right-hand side over all basis
/// tuples with `X, Y, Z` on `side` and `A, B` on the other side.
fn compatibility<S: Scalar>(view: &PairView<'_, S>, side: Side, kind: Compat, name: String) -> ResidualTracker {
    let n = view.pair.dim(side);
    let m = view.pair.dim(side.other());
    let other = side.other();
    let half = S::half();
    let one = S::one();
    let trackers: Vec<ResidualTracker> = (0..n)
        .into_par_iter()
        .map(|xi| {
            let mut t = ResidualTracker::new(name.clone());
            let x = unit::<S>(xi);
            for yi in 0..n {
                let y = unit::<S>(yi);
                for zi in 0..n {
                    let z = unit::<S>(zi);
                    for ai in 0..m {
                        let a = unit::<S>(ai);
                        let xz_a = view.br(side, &a, &x, &z);
                        let xy_a = view.br(side, &a, &x, &y);
                        let zy_a = view.br(side, &a, &z, &y);
                        for bi in 0..m {
                            let b = unit::<S>(bi);
                            let ab_z = view.br(other, &z, &a, &b);
                            let mut out = vec![S::zero(); n];
                            view.acc(side, &one, &ab_z, &x, &y, &mut out);
                            match kind {
                                Compat::Isotopic => {
                                    let xz_b = view.br(side, &b, &x, &z);
                                    let xy_b = view.br(side, &b, &x, &y);
                                    let zy_b = view.br(side, &b, &z, &y);
                                    let mhalf = -half.clone();
                                    view.acc(side, &mhalf, &b, &xz_a, &y, &mut out);
                                    view.acc(side, &mhalf, &b, &xy_a, &z, &mut out);
                                    view.acc(side, &mhalf, &b, &zy_a, &x, &mut out);
                                    view.acc(side, &half, &a, &xz_b, &y, &mut out);
                                    view.acc(side, &half, &a, &xy_b, &z, &mut out);
                                    view.acc(side, &half, &a, &zy_b, &x, &mut out);
                                }
                                Compat::AntiJordan => {
                                    let xy_b = view.br(side, &b, &x, &y);
                                    let mone = -one.clone();
                                    view.acc(side, &mone, &b, &xz_a, &y, &mut out);
                                    view.acc(side, &mone, &b, &zy_a, &x, &mut out);
                                    view.acc(side, &one, &a, &xy_b, &z, &mut out);
                                }
                            }
                            let r = crate::report::vec_residual(&out);
                            t.record(r, &[xi, yi, zi, ai, bi], || {
                                vec![
                                    view.label(side, xi),
                                    view.label(side, yi),
                                    view.label(side, zi),
                                    view.label(other, ai),
                                    view.label(other, bi),
                                ]
                            });
                        }
                    }
                }
            }
            t
        })
        .collect();
    trackers
        .into_iter()
        .fold(ResidualTracker::new(name), ResidualTracker::merge)
}

/// Checks every condition for an isotopic pair: antisymmetry, Jacobi for
/// basis and polarized isotopes, and both compatibility identities.
pub fn verify_isotopic_pair<S: Scalar>(pair: &IsotopicPair<S>, tol: f64) -> AxiomReport {
    let mut report = AxiomReport::for_scalar::<S>("isotopic pair", tol);
    let view = PairView::new(pair);
    for side in [Side::V1, Side::V2] {
        report.push(antisymmetry(pair, side));
        let (plain, mixed) = jacobi(&view, side);
        report.push(plain);
        report.push(mixed);
        let name = format!("compatibility.{}", side_name(side));
        report.push(compatibility(&view, side, Compat::Isotopic, name));
    }
    report
}

/// Checks the two anti-Jordan compatibility identities (plus antisymmetry).
pub fn verify_anti_jordan<S: Scalar>(pair: &IsotopicPair<S>, tol: f64) -> AxiomReport {
    let mut report = AxiomReport::for_scalar::<S>("anti-Jordan pair", tol);
    let view = PairView::new(pair);
    for side in [Side::V1, Side::V2] {
        report.push(antisymmetry(pair, side));
        let name = format!("anti_jordan.{}", side_name(side));
        report.push(compatibility(&view, side, Compat::AntiJordan, name));
    }
    report
}

/// Brute-force `[x, y]_a` on dense vectors by expanding over basis tuples.
/// Independent of the sparse machinery; used as a test oracle.
pub fn expand_bracket<S: Scalar>(pair: &IsotopicPair<S>, side: Side, iso: &[S], x: &[S], y: &[S]) -> Vec<S> {
    let t = pair.tensor(side);
    let n = t.dim();
    let mut out = vec![S::zero(); n];
    for (a, ca) in iso.iter().enumerate() {
        for (i, xi) in x.iter().enumerate() {
            for (j, yj) in y.iter().enumerate() {
                for (k, o) in out.iter_mut().enumerate() {
                    *o = o.clone() + ca.clone() * xi.clone() * yj.clone() * t.get(a, i, j, k).clone();
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::scalar::{int, Rational};

    fn hom11() -> IsotopicPair<Rational> {
        let e12 = Matrix::unit(2, 2, 0, 1);
        let e21 = Matrix::unit(2, 2, 1, 0);
        IsotopicPair::from_associative(&[e12], &[e21], 0.0).unwrap()
    }

    #[test]
    fn zero_pair_passes_both() {
        let p = IsotopicPair::<Rational>::zeros(3, 2);
        assert!(verify_isotopic_pair(&p, 0.0).passed);
        assert!(verify_anti_jordan(&p, 0.0).passed);
    }

    #[test]
    fn associative_realization_passes() {
        let e = |i, j| Matrix::<Rational>::unit(3, 3, i, j);
        let v1 = vec![e(2, 0), e(2, 1)];
        let v2 = vec![e(0, 2), e(1, 2)];
        let p = IsotopicPair::from_associative(&v1, &v2, 0.0).unwrap();
        let r = verify_isotopic_pair(&p, 0.0);
        assert!(r.passed, "{}", r.summary());
        assert!(verify_anti_jordan(&p, 0.0).passed);
        assert!(!p.m1().is_zero());
        assert!(hom11().m1().is_zero());
    }

    #[test]
    fn corrupted_constant_produces_witness() {
        let e = |i, j| Matrix::<Rational>::unit(3, 3, i, j);
        let mut p = IsotopicPair::from_associative(&[e(2, 0), e(2, 1)], &[e(0, 2), e(1, 2)], 0.0).unwrap();
        let old = p.m1().get(0, 0, 1, 0).clone();
        p.set(Side::V1, 0, 0, 1, 0, old + int(1));
        let r = verify_isotopic_pair(&p, 0.0);
        assert!(!r.passed);
        let w = r.worst_failure().unwrap();
        assert!(w.witness.is_some());
        assert!(!verify_anti_jordan(&p, 0.0).passed);
    }

    #[test]
    fn asymmetric_tensor_fails_antisymmetry() {
        let mut p = IsotopicPair::<Rational>::zeros(2, 1);
        p.tensor_mut(Side::V1).set_raw(0, 0, 1, 0, int(1));
        let r = verify_isotopic_pair(&p, 0.0);
        assert!(!r.check("antisymmetry.V1").unwrap().passed);
    }
}
