//! Polarized anti-Lie triple systems.

use rayon::prelude::*;

use super::pair::IsotopicPair;
use super::tensor::{sparsify, unit, SparseVec};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::report::{vec_residual, AxiomReport, ResidualTracker};
use crate::scalar::Scalar;

/// Ternary product `[xyz]` on `V = V1 + V2`, stored densely as `P[x][y][z][out]`.
#[derive(Clone, Debug)]
pub struct AltsTensor<S> {
    n: usize,
    /// Size of the first polarization part; basis `0..n1` is `V1`.
    n1: usize,
    data: Vec<S>,
    sparse: Vec<SparseVec<S>>,
    labels: Vec<String>,
}

impl<S: Scalar> PartialEq for AltsTensor<S> {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.n1 == other.n1 && self.data == other.data
    }
}

impl<S: Scalar> AltsTensor<S> {
    pub fn from_dense(n: usize, n1: usize, data: Vec<S>, labels: Vec<String>) -> Result<Self> {
        if data.len() != n * n * n * n {
            return Err(Error::dimension("ternary product", n * n * n * n, data.len()));
        }
        if labels.len() != n || n1 > n {
            return Err(Error::dimension("triple system labels", n, labels.len()));
        }
        let sparse = data.chunks(n.max(1)).map(sparsify).collect();
        Ok(Self {
            n,
            n1,
            data,
            sparse,
            labels,
        })
    }

    pub fn zeros(n1: usize, n2: usize) -> Self {
        let n = n1 + n2;
        let labels = (0..n).map(|i| format!("v{i}")).collect();
        Self::from_dense(n, n1, vec![S::zero(); n * n * n * n], labels).expect("consistent sizes")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `(dim V1, dim V2)`.
    pub fn parts(&self) -> (usize, usize) {
        (self.n1, self.n - self.n1)
    }

    /// `true` for basis vectors of `V1`.
    pub fn in_first(&self, i: usize) -> bool {
        i < self.n1
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    fn offset(&self, x: usize, y: usize, z: usize) -> usize {
        (x * self.n + y) * self.n + z
    }

    /// `[e_x e_y e_z]` as a dense vector.
    pub fn product(&self, x: usize, y: usize, z: usize) -> &[S] {
        let o = self.offset(x, y, z) * self.n;
        &self.data[o..o + self.n]
    }

    fn sparse_product(&self, x: usize, y: usize, z: usize) -> &SparseVec<S> {
        &self.sparse[self.offset(x, y, z)]
    }

    /// Trilinear product of sparse vectors.
    pub fn apply_sparse(&self, x: &SparseVec<S>, y: &SparseVec<S>, z: &SparseVec<S>) -> SparseVec<S> {
        let mut out = vec![S::zero(); self.n];
        for (i, xi) in x {
            for (j, yj) in y {
                for (k, zk) in z {
                    let col = self.sparse_product(*i, *j, *k);
                    if col.is_empty() {
                        continue;
                    }
                    let c = xi.clone() * yj.clone() * zk.clone();
                    for (o, v) in col {
                        out[*o] = out[*o].clone() + c.clone() * v.clone();
                    }
                }
            }
        }
        sparsify(&out)
    }

    pub fn apply(&self, x: &[S], y: &[S], z: &[S]) -> Vec<S> {
        let s = self.apply_sparse(&sparsify(x), &sparsify(y), &sparsify(z));
        let mut out = vec![S::zero(); self.n];
        for (i, v) in s {
            out[i] = v;
        }
        out
    }

    /// The operator `R_{yz}: x -> [xyz]` as an `n x n` matrix (columns indexed by `x`).
    pub fn r_operator(&self, y: usize, z: usize) -> Matrix<S> {
        Matrix::from_fn(self.n, self.n, |out, x| self.product(x, y, z)[out].clone())
    }

    /// `R_{yz}` for arbitrary vectors `y`, `z`.
    pub fn r_operator_of(&self, y: &[S], z: &[S]) -> Matrix<S> {
        let mut m = Matrix::zeros(self.n, self.n);
        for (j, yj) in y.iter().enumerate() {
            if yj.is_zero() {
                continue;
            }
            for (k, zk) in z.iter().enumerate() {
                if zk.is_zero() {
                    continue;
                }
                m.add_scaled(&(yj.clone() * zk.clone()), &self.r_operator(j, k));
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn to_f64(&self) -> AltsTensor<f64> {
        AltsTensor::from_dense(self.n, self.n1, self.data.iter().map(|v| v.to_f64()).collect(), self.labels.clone())
            .expect("same shape")
    }
}

/// Polarized triple system of a pair: `[xyz] = [z,x]_y` when `z` shares the
/// part of `x`, `[xyz] = [y,x]_z` when `y` does, zero otherwise.
pub fn to_alts<S: Scalar>(pair: &IsotopicPair<S>) -> AltsTensor<S> {
    let (n1, n2) = (pair.n1(), pair.n2());
    let n = n1 + n2;
    let mut data = vec![S::zero(); n * n * n * n];
    // (global index of basis vector, local index, offset of its part)
    let locate = |g: usize| if g < n1 { (true, g) } else { (false, g - n1) };
    for x in 0..n {
        let (x1, xl) = locate(x);
        for y in 0..n {
            let (y1, yl) = locate(y);
            for z in 0..n {
                let (z1, zl) = locate(z);
                if y1 == z1 {
                    continue;
                }
                let (t, shift) = if x1 { (pair.m1(), 0) } else { (pair.m2(), n1) };
                let col = if z1 == x1 {
                    t.column(yl, zl, xl)
                } else {
                    t.column(zl, yl, xl)
                };
                let o = ((x * n + y) * n + z) * n + shift;
                for (k, v) in col.iter().enumerate() {
                    data[o + k] = v.clone();
                }
            }
        }
    }
    AltsTensor::from_dense(n, n1, data, pair.all_labels()).expect("consistent sizes")
}

/// Checks the three triple-system axioms and the polarization condition.
pub fn verify_alts<S: Scalar>(alts: &AltsTensor<S>, tol: f64) -> AxiomReport {
    let mut report = AxiomReport::for_scalar::<S>("anti-Lie triple system", tol);
    let n = alts.dim();
    let lab = |ix: &[usize]| ix.iter().map(|&i| alts.labels()[i].clone()).collect::<Vec<_>>();

    let mut sym = ResidualTracker::new("symmetry");
    let mut cyc = ResidualTracker::new("cyclic");
    let mut pol = ResidualTracker::new("polarization");
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let d: Vec<S> = alts
                    .product(x, y, z)
                    .iter()
                    .zip(alts.product(x, z, y))
                    .map(|(a, b)| a.clone() - b.clone())
                    .collect();
                sym.record(vec_residual(&d), &[x, y, z], || lab(&[x, y, z]));
                let c: Vec<S> = (0..n)
                    .map(|k| {
                        alts.product(x, y, z)[k].clone()
                            + alts.product(z, x, y)[k].clone()
                            + alts.product(y, z, x)[k].clone()
                    })
                    .collect();
                cyc.record(vec_residual(&c), &[x, y, z], || lab(&[x, y, z]));
                if alts.in_first(y) == alts.in_first(z) {
                    pol.record(vec_residual(alts.product(x, y, z)), &[x, y, z], || lab(&[x, y, z]));
                }
            }
        }
    }
    report.push(sym);
    report.push(cyc);
    report.push(pol);

    let trackers: Vec<ResidualTracker> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut t = ResidualTracker::new("derivation");
            let ex = unit::<S>(x);
            for y in 0..n {
                let ey = unit::<S>(y);
                for z in 0..n {
                    let ez = unit::<S>(z);
                    let xyz = alts.apply_sparse(&ex, &ey, &ez);
                    for u in 0..n {
                        let eu = unit::<S>(u);
                        for v in 0..n {
                            let ev = unit::<S>(v);
                            let mut out = vec![S::zero(); n];
                            add(&mut out, &alts.apply_sparse(&xyz, &eu, &ev), 1);
                            let xuv = alts.apply_sparse(&ex, &eu, &ev);
                            add(&mut out, &alts.apply_sparse(&xuv, &ey, &ez), -1);
                            let yvu = alts.apply_sparse(&ey, &ev, &eu);
                            add(&mut out, &alts.apply_sparse(&ex, &yvu, &ez), -1);
                            let zuv = alts.apply_sparse(&ez, &eu, &ev);
                            add(&mut out, &alts.apply_sparse(&ex, &ey, &zuv), -1);
                            t.record(vec_residual(&out), &[x, y, z, u, v], || lab(&[x, y, z, u, v]));
                        }
                    }
                }
            }
            t
        })
        .collect();
    report.push(
        trackers
            .into_iter()
            .fold(ResidualTracker::new("derivation"), ResidualTracker::merge),
    );
    report
}

fn add<S: Scalar>(out: &mut [S], v: &SparseVec<S>, sign: i64) {
    for (i, x) in v {
        out[*i] = if sign > 0 {
            out[*i].clone() + x.clone()
        } else {
            out[*i].clone() - x.clone()
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn zero_system_passes() {
        let a = AltsTensor::<Rational>::zeros(2, 3);
        assert!(verify_alts(&a, 0.0).passed);
        assert!(to_alts(&IsotopicPair::<Rational>::zeros(2, 3)).is_zero());
    }

    #[test]
    fn broken_symmetry_is_caught() {
        let n = 2;
        let mut data = vec![Rational::from_ratio(0, 1); n * n * n * n];
        // [e0 e0 e1] = e0 but [e0 e1 e0] = 0
        let (x, y, z, out) = (0, 0, 1, 0);
        data[((x * n + y) * n + z) * n + out] = Rational::from_ratio(1, 1);
        let a = AltsTensor::from_dense(n, 1, data, vec!["x".into(), "y".into()]).unwrap();
        let r = verify_alts(&a, 0.0);
        assert!(!r.check("symmetry").unwrap().passed);
    }
}
