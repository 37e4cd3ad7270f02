//! The Lie algebra `g0(V)` of operators `R_{yz}` and the Lie superalgebra
//! `g(V) = g0(V) + V` attached to a polarized anti-Lie triple system.

use serde::Serialize;

use crate::algebra::alts::AltsTensor;
use crate::algebra::diamond::is_lie;
use crate::algebra::pair::IsotopicPair;
use crate::algebra::tensor::BracketTensor;
use crate::error::{Error, Result};
use crate::linalg::{independent_subset, Matrix, SpanSolver};
use crate::report::{vec_residual, AxiomReport, ResidualTracker};
use crate::scalar::{Rational, Scalar};

/// A Lie algebra given by a basis of matrices and the structure constants of
/// their commutators.
#[derive(Clone, Debug)]
pub struct LieAlgebraRealization<S> {
    pub basis: Vec<Matrix<S>>,
    pub labels: Vec<String>,
    /// `[b_i, b_j] = sum_k c[i][j][k] b_k`.
    pub constants: BracketTensor<S>,
    /// Commutator closure and Lie axioms of `constants`.
    pub closure: AxiomReport,
}

impl<S: Scalar> LieAlgebraRealization<S> {
    /// Builds the realization from spanning matrices, keeping a greedy basis in
    /// input order.
    pub fn from_spanning(matrices: &[Matrix<S>], labels: &[String], tol: f64) -> Result<Self> {
        let flat: Vec<Vec<S>> = matrices.iter().map(|m| m.as_slice().to_vec()).collect();
        let keep = independent_subset(&flat, tol);
        let basis: Vec<Matrix<S>> = keep.iter().map(|&i| matrices[i].clone()).collect();
        let labels: Vec<String> = keep.iter().map(|&i| labels[i].clone()).collect();
        let solver = SpanSolver::new(keep.iter().map(|&i| flat[i].clone()).collect(), tol)?;
        let d = basis.len();
        let mut constants = BracketTensor::zeros(d);
        let mut closure = ResidualTracker::new("commutator_closure");
        for i in 0..d {
            for j in 0..d {
                let c = basis[i].commutator(&basis[j]);
                let (coords, res) = solver.solve_with_residual(c.as_slice());
                closure.record(res, &[i, j], || vec![labels[i].clone(), labels[j].clone()]);
                for (k, v) in coords.into_iter().enumerate() {
                    constants.set(i, j, k, v);
                }
            }
        }
        let mut report = AxiomReport::for_scalar::<S>("matrix Lie algebra", tol);
        report.push(closure);
        report.absorb("constants", is_lie(&constants, tol));
        Ok(Self {
            basis,
            labels,
            constants,
            closure: report,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of a matrix in the basis, if it lies in the span.
    pub fn coordinates(&self, m: &Matrix<S>, tol: f64) -> Option<Vec<S>> {
        let flat: Vec<Vec<S>> = self.basis.iter().map(|b| b.as_slice().to_vec()).collect();
        SpanSolver::new(flat, tol).ok()?.solve(m.as_slice())
    }
}

/// `g0(V)`: span of all `R_{yz}`, with a basis chosen greedily over pairs
/// `y <= z` in basis order.
pub fn build_g0<S: Scalar>(alts: &AltsTensor<S>, tol: f64) -> Result<LieAlgebraRealization<S>> {
    let (mats, labels) = r_family(alts);
    LieAlgebraRealization::from_spanning(&mats, &labels, tol)
}

fn r_family<S: Scalar>(alts: &AltsTensor<S>) -> (Vec<Matrix<S>>, Vec<String>) {
    let n = alts.dim();
    let mut mats = Vec::new();
    let mut labels = Vec::new();
    for y in 0..n {
        for z in y..n {
            mats.push(alts.r_operator(y, z));
            labels.push(format!("R[{},{}]", alts.labels()[y], alts.labels()[z]));
        }
    }
    (mats, labels)
}

/// Lie superalgebra on a homogeneous basis: even elements first, then odd.
#[derive(Clone, Debug)]
pub struct LieSuperalgebra<S> {
    pub labels: Vec<String>,
    /// `true` for odd basis elements.
    pub parity: Vec<bool>,
    /// `[x_i, x_j] = sum_k c[i][j][k] x_k`.
    pub constants: BracketTensor<S>,
    /// Polarization part (1 or 2) of each odd element, indexed like `parity`.
    pub polarization: Option<Vec<u8>>,
}

impl<S: Scalar> LieSuperalgebra<S> {
    pub fn dim(&self) -> usize {
        self.parity.len()
    }

    /// `(even dimension, odd dimension)`.
    pub fn superdimension(&self) -> (usize, usize) {
        let odd = self.parity.iter().filter(|&&p| p).count();
        (self.dim() - odd, odd)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn bracket(&self, x: &[S], y: &[S]) -> Vec<S> {
        self.constants.apply(x, y)
    }

    pub fn basis_vector(&self, i: usize) -> Vec<S> {
        let mut v = vec![S::zero(); self.dim()];
        v[i] = S::one();
        v
    }

    /// Purely even superalgebra, i.e. an ordinary Lie algebra.
    pub fn even(constants: BracketTensor<S>, labels: Vec<String>) -> Self {
        let n = constants.dim();
        Self {
            labels,
            parity: vec![false; n],
            constants,
            polarization: None,
        }
    }
}

/// `g(V)` with `[g0, v] = R v`, `[v, w] = R_{v,w}` and the commutator on `g0`.
pub fn build_super<S: Scalar>(alts: &AltsTensor<S>, tol: f64) -> Result<LieSuperalgebra<S>> {
    let g0 = build_g0(alts, tol)?;
    super_from_g0(alts, &g0, tol)
}

pub fn super_from_g0<S: Scalar>(alts: &AltsTensor<S>, g0: &LieAlgebraRealization<S>, tol: f64) -> Result<LieSuperalgebra<S>> {
    let e = g0.dim();
    let n = alts.dim();
    let total = e + n;
    let mut c = BracketTensor::zeros(total);
    for i in 0..e {
        for j in 0..e {
            for k in 0..e {
                c.set(i, j, k, g0.constants.get(i, j, k).clone());
            }
        }
        for v in 0..n {
            for k in 0..n {
                let val = g0.basis[i][(k, v)].clone();
                c.set(e + v, i, e + k, -val.clone());
                c.set(i, e + v, e + k, val);
            }
        }
    }
    let flat: Vec<Vec<S>> = g0.basis.iter().map(|b| b.as_slice().to_vec()).collect();
    let solver = SpanSolver::new(flat, tol)?;
    for v in 0..n {
        for w in v..n {
            let r = alts.r_operator(v, w);
            let coords = solver.solve(r.as_slice()).ok_or_else(|| Error::NotClosed {
                what: "g0".into(),
                detail: format!("R[{},{}] lies outside the span", alts.labels()[v], alts.labels()[w]),
            })?;
            for (k, val) in coords.into_iter().enumerate() {
                c.set(e + v, e + w, k, val.clone());
                c.set(e + w, e + v, k, val);
            }
        }
    }
    let mut labels = g0.labels.clone();
    labels.extend(alts.labels().iter().cloned());
    let mut parity = vec![false; e];
    parity.extend(std::iter::repeat(true).take(n));
    let mut polarization = vec![0u8; e];
    polarization.extend((0..n).map(|i| if alts.in_first(i) { 1 } else { 2 }));
    Ok(LieSuperalgebra {
        labels,
        parity,
        constants: c,
        polarization: Some(polarization),
    })
}

fn sign(odd: bool) -> i64 {
    if odd {
        -1
    } else {
        1
    }
}

/// Graded antisymmetry and graded Jacobi over all basis triples, plus the
/// polarization conditions when a polarization is declared.
pub fn verify_super<S: Scalar>(sa: &LieSuperalgebra<S>, tol: f64) -> AxiomReport {
    let mut report = AxiomReport::for_scalar::<S>("Lie superalgebra", tol);
    let n = sa.dim();
    let p = &sa.parity;
    let lab = |ix: &[usize]| ix.iter().map(|&i| sa.labels[i].clone()).collect::<Vec<_>>();

    let mut anti = ResidualTracker::new("graded_antisymmetry");
    for i in 0..n {
        for j in i..n {
            let s = S::from_ratio(sign(p[i] && p[j]), 1);
            let d: Vec<S> = sa
                .constants
                .column(i, j)
                .iter()
                .zip(sa.constants.column(j, i))
                .map(|(x, y)| x.clone() + s.clone() * y.clone())
                .collect();
            anti.record(vec_residual(&d), &[i, j], || lab(&[i, j]));
        }
    }
    report.push(anti);

    let mut jac = ResidualTracker::new("graded_jacobi");
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                // (-1)^{|x||z|}[x,[y,z]] + (-1)^{|y||x|}[y,[z,x]] + (-1)^{|z||y|}[z,[x,y]]
                let mut out = vec![S::zero(); n];
                for (a, b, c, s) in [
                    (i, j, k, sign(p[i] && p[k])),
                    (j, k, i, sign(p[j] && p[i])),
                    (k, i, j, sign(p[k] && p[j])),
                ] {
                    let inner = sa.constants.column(b, c);
                    let t = sa.constants.apply(&sa.basis_vector(a), inner);
                    let s = S::from_ratio(s, 1);
                    for (o, v) in out.iter_mut().zip(t) {
                        *o = o.clone() + s.clone() * v;
                    }
                }
                jac.record(vec_residual(&out), &[i, j, k], || lab(&[i, j, k]));
            }
        }
    }
    report.push(jac);

    let mut parity_ok = ResidualTracker::new("parity_preserved");
    for i in 0..n {
        for j in 0..n {
            let want = p[i] != p[j];
            let off: Vec<S> = sa
                .constants
                .column(i, j)
                .iter()
                .enumerate()
                .filter(|(k, _)| p[*k] != want)
                .map(|(_, v)| v.clone())
                .collect();
            parity_ok.record(vec_residual(&off), &[i, j], || lab(&[i, j]));
        }
    }
    report.push(parity_ok);

    if let Some(pol) = &sa.polarization {
        let mut same = ResidualTracker::new("polarized_anticommutator");
        let mut stable = ResidualTracker::new("polarized_action");
        for i in 0..n {
            for j in 0..n {
                if !p[j] {
                    continue;
                }
                let col = sa.constants.column(i, j);
                if p[i] && pol[i] == pol[j] {
                    same.record(vec_residual(col), &[i, j], || lab(&[i, j]));
                }
                let leak: Vec<S> = col
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| p[*k] && pol[*k] != pol[j])
                    .map(|(_, v)| v.clone())
                    .collect();
                stable.record(vec_residual(&leak), &[i, j], || lab(&[i, j]));
            }
        }
        report.push(same);
        report.push(stable);
    }
    report
}

/// Largest component of `[x, s]` outside `span(subspace)`, over basis `x`
/// of the ambient algebra and `s` of the subspace. Zero iff the span is an ideal.
pub fn ideal_residual<S: Scalar>(constants: &BracketTensor<S>, subspace: &[Vec<S>], tol: f64) -> Result<f64> {
    let solver = SpanSolver::new(subspace.to_vec(), tol)?;
    let n = constants.dim();
    let mut worst = 0.0f64;
    for i in 0..n {
        let mut e = vec![S::zero(); n];
        e[i] = S::one();
        for s in subspace {
            let (_, r) = solver.solve_with_residual(&constants.apply(&e, s));
            worst = worst.max(r);
        }
    }
    Ok(worst)
}

/// Largest component of `[s, t]` over the subspace. Zero iff abelian.
pub fn abelian_residual<S: Scalar>(constants: &BracketTensor<S>, subspace: &[Vec<S>]) -> f64 {
    let mut worst = 0.0f64;
    for s in subspace {
        for t in subspace {
            worst = worst.max(vec_residual(&constants.apply(s, t)));
        }
    }
    worst
}

/// The pair `(Hom(H1,H2), Hom(H2,H1))`, `dim H1 = n`, `dim H2 = m`, with
/// isocommutators `XAY - YAX`.
pub fn hom_pair(n: usize, m: usize) -> Result<IsotopicPair<Rational>> {
    if n == 0 || m == 0 {
        return Err(Error::Params("hom_pair needs n, m >= 1".into()));
    }
    let (v1, v2) = hom_blocks(n, m);
    let l1 = (0..m).flat_map(|r| (0..n).map(move |c| format!("x{}{}", r + 1, c + 1))).collect();
    let l2 = (0..n).flat_map(|r| (0..m).map(move |c| format!("a{}{}", r + 1, c + 1))).collect();
    IsotopicPair::from_associative(&v1, &v2, 0.0)?.with_labels(l1, l2)
}

/// Unit matrices of `Hom(H1,H2)` (`m x n`) and `Hom(H2,H1)` (`n x m`) in row-major order.
pub fn hom_blocks(n: usize, m: usize) -> (Vec<Matrix<Rational>>, Vec<Matrix<Rational>>) {
    let v1 = (0..m * n).map(|k| Matrix::unit(m, n, k / n, k % n)).collect();
    let v2 = (0..n * m).map(|k| Matrix::unit(n, m, k / m, k % m)).collect();
    (v1, v2)
}

/// JSON export of a superalgebra's structure constants.
#[derive(Clone, Debug, Serialize)]
pub struct SuperDocument {
    pub even_dim: usize,
    pub odd_dim: usize,
    pub labels: Vec<String>,
    pub parity: Vec<&'static str>,
    /// `[i, j, k, value]` for nonzero `c[i][j][k]`.
    pub constants: Vec<(usize, usize, usize, String)>,
}

impl SuperDocument {
    pub fn new<S: Scalar>(sa: &LieSuperalgebra<S>) -> Self {
        let (even_dim, odd_dim) = sa.superdimension();
        let n = sa.dim();
        let mut constants = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = sa.constants.get(i, j, k);
                    if !v.is_zero() {
                        constants.push((i, j, k, v.to_string()));
                    }
                }
            }
        }
        Self {
            even_dim,
            odd_dim,
            labels: sa.labels.clone(),
            parity: sa.parity.iter().map(|&p| if p { "odd" } else { "even" }).collect(),
            constants,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::alts::to_alts;
    use crate::scalar::int;

    #[test]
    fn zero_alts_has_trivial_g0() {
        let alts = AltsTensor::<Rational>::zeros(2, 2);
        assert_eq!(build_g0(&alts, 0.0).unwrap().dim(), 0);
        let sa = build_super(&alts, 0.0).unwrap();
        assert_eq!(sa.superdimension(), (0, 4));
        assert!(verify_super(&sa, 0.0).passed);
    }

    #[test]
    fn hom_pair_two_one_superalgebra_is_consistent() {
        let pair = hom_pair(2, 1).unwrap();
        let sa = build_super(&to_alts(&pair), 0.0).unwrap();
        let r = verify_super(&sa, 0.0);
        assert!(r.passed, "{}", r.summary());
        assert_eq!(sa.superdimension().1, 4);
    }

    #[test]
    fn purely_even_reduces_to_jacobi() {
        let so3 = BracketTensor::from_fn(3, |i, j, k| {
            int(((j as i64 - i as i64) * (k as i64 - i as i64) * (k as i64 - j as i64)) / 2)
        });
        let sa = LieSuperalgebra::even(so3.clone(), vec!["x".into(), "y".into(), "z".into()]);
        assert!(verify_super(&sa, 0.0).passed);
        let mut bad = so3;
        // [x, y] = z + x
        bad.set(0, 1, 0, int(1));
        bad.set(1, 0, 0, int(-1));
        let sa = LieSuperalgebra::even(bad, vec!["x".into(), "y".into(), "z".into()]);
        let r = verify_super(&sa, 0.0);
        assert!(!r.check("graded_jacobi").unwrap().passed);
        assert!(r.check("graded_antisymmetry").unwrap().passed);
    }

    #[test]
    fn hom_pair_rejects_zero() {
        assert!(hom_pair(0, 1).is_err());
    }
}
