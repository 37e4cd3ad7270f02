use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sparse vector: `(index, value)` pairs with nonzero values, sorted by index.
pub type SparseVec<S> = Vec<(usize, S)>;

pub fn sparsify<S: Scalar>(v: &[S]) -> SparseVec<S> {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

pub fn unit<S: Scalar>(i: usize) -> SparseVec<S> {
    vec![(i, S::one())]
}

/// Dense tensor `T[iso][i][j][out]`: a linear family, indexed by an isotope,
/// of bilinear maps `V x V -> V`. Both isocommutator families of an isotopic
/// pair and the bracket families of a Lie bunch use this layout.
#[derive(Clone, Debug, PartialEq)]
pub struct IsoTensor<S> {
    n_iso: usize,
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> IsoTensor<S> {
    pub fn zeros(n_iso: usize, n: usize) -> Self {
        Self {
            n_iso,
            n,
            data: vec![S::zero(); n_iso * n * n * n],
        }
    }

    /// Dimension of the space the brackets act on.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Dimension of the isotope space.
    pub fn iso_dim(&self) -> usize {
        self.n_iso
    }

    fn offset(&self, iso: usize, i: usize, j: usize) -> usize {
        ((iso * self.n + i) * self.n + j) * self.n
    }

    pub fn get(&self, iso: usize, i: usize, j: usize, out: usize) -> &S {
        &self.data[self.offset(iso, i, j) + out]
    }

    /// Output vector of `[e_i, e_j]_{e_iso}`.
    pub fn column(&self, iso: usize, i: usize, j: usize) -> &[S] {
        let o = self.offset(iso, i, j);
        &self.data[o..o + self.n]
    }

    /// Sets `[e_i, e_j]_{iso}` at `out` and `[e_j, e_i]_{iso}` to the negative.
    pub fn set_antisymmetric(&mut self, iso: usize, i: usize, j: usize, out: usize, value: S) {
        let o = self.offset(iso, j, i) + out;
        self.data[o] = -value.clone();
        let o = self.offset(iso, i, j) + out;
        self.data[o] = value;
    }

    pub(crate) fn set_raw(&mut self, iso: usize, i: usize, j: usize, out: usize, value: S) {
        let o = self.offset(iso, i, j) + out;
        self.data[o] = value;
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> IsoTensor<T> {
        IsoTensor {
            n_iso: self.n_iso,
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Largest violation of `T[a][i][j] = -T[a][j][i]`.
    pub fn antisymmetry_defect(&self) -> (f64, Option<[usize; 3]>) {
        let mut worst = (0.0, None);
        for a in 0..self.n_iso {
            for i in 0..self.n {
                for j in i..self.n {
                    let d = self
                        .column(a, i, j)
                        .iter()
                        .zip(self.column(a, j, i))
                        .map(|(x, y)| (x.clone() + y.clone()).magnitude())
                        .fold(0.0, f64::max);
                    if d > worst.0 {
                        worst = (d, Some([a, i, j]));
                    }
                }
            }
        }
        worst
    }

    /// Precomputes sparse output columns for fast repeated evaluation.
    pub fn sparse(&self) -> SparseIso<S> {
        let mut cols = Vec::with_capacity(self.n_iso * self.n * self.n);
        for a in 0..self.n_iso {
            for i in 0..self.n {
                for j in 0..self.n {
                    cols.push(sparsify(self.column(a, i, j)));
                }
            }
        }
        SparseIso {
            n_iso: self.n_iso,
            n: self.n,
            cols,
        }
    }

    /// `[x, y]_iso` for dense inputs.
    pub fn apply(&self, iso: &[S], x: &[S], y: &[S]) -> Result<Vec<S>> {
        if iso.len() != self.n_iso {
            return Err(Error::dimension("isotope", self.n_iso, iso.len()));
        }
        if x.len() != self.n || y.len() != self.n {
            return Err(Error::dimension("bracket argument", self.n, x.len().max(y.len())));
        }
        Ok(self.sparse_view_apply(&sparsify(iso), &sparsify(x), &sparsify(y)))
    }

    fn sparse_view_apply(&self, iso: &SparseVec<S>, x: &SparseVec<S>, y: &SparseVec<S>) -> Vec<S> {
        let mut out = vec![S::zero(); self.n];
        for (a, ca) in iso {
            for (i, xi) in x {
                for (j, yj) in y {
                    if i == j {
                        continue;
                    }
                    let coef = ca.clone() * xi.clone() * yj.clone();
                    for (o, v) in out.iter_mut().zip(self.column(*a, *i, *j)) {
                        if !v.is_zero() {
                            *o = o.clone() + coef.clone() * v.clone();
                        }
                    }
                }
            }
        }
        out
    }

    /// The single bilinear map `[., .]_iso` as a bracket tensor.
    pub fn at(&self, iso: &[S]) -> BracketTensor<S> {
        let mut b = BracketTensor::zeros(self.n);
        for (a, ca) in iso.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for i in 0..self.n {
                for j in 0..self.n {
                    for k in 0..self.n {
                        let v = self.get(a, i, j, k);
                        if !v.is_zero() {
                            let slot: &mut S = &mut b.data[(i * self.n + j) * self.n + k];
                            *slot = slot.clone() + ca.clone() * v.clone();
                        }
                    }
                }
            }
        }
        b
    }
}

/// Sparse-column view of an [`IsoTensor`].
#[derive(Clone, Debug)]
pub struct SparseIso<S> {
    n_iso: usize,
    n: usize,
    cols: Vec<SparseVec<S>>,
}

impl<S: Scalar> SparseIso<S> {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn iso_dim(&self) -> usize {
        self.n_iso
    }

    pub fn column(&self, iso: usize, i: usize, j: usize) -> &SparseVec<S> {
        &self.cols[(iso * self.n + i) * self.n + j]
    }

    /// Accumulates `coef * [x, y]_iso` into `out`.
    pub fn accumulate(
        &self,
        coef: &S,
        iso: &SparseVec<S>,
        x: &SparseVec<S>,
        y: &SparseVec<S>,
        out: &mut [S],
    ) {
        for (a, ca) in iso {
            for (i, xi) in x {
                for (j, yj) in y {
                    let col = self.column(*a, *i, *j);
                    if col.is_empty() {
                        continue;
                    }
                    let c = coef.clone() * ca.clone() * xi.clone() * yj.clone();
                    for (k, v) in col {
                        out[*k] = out[*k].clone() + c.clone() * v.clone();
                    }
                }
            }
        }
    }

    pub fn apply(&self, iso: &SparseVec<S>, x: &SparseVec<S>, y: &SparseVec<S>) -> SparseVec<S> {
        let mut out = vec![S::zero(); self.n];
        self.accumulate(&S::one(), iso, x, y, &mut out);
        sparsify(&out)
    }
}

/// A single bilinear map `V x V -> V`, stored as `B[i][j][out]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BracketTensor<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> BracketTensor<S> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![S::zero(); n * n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    data.push(f(i, j, k));
                }
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &S {
        &self.data[(i * self.n + j) * self.n + k]
    }

    pub fn column(&self, i: usize, j: usize) -> &[S] {
        let o = (i * self.n + j) * self.n;
        &self.data[o..o + self.n]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: S) {
        self.data[(i * self.n + j) * self.n + k] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn apply(&self, x: &[S], y: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.n];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let c = xi.clone() * yj.clone();
                for (o, v) in out.iter_mut().zip(self.column(i, j)) {
                    if !v.is_zero() {
                        *o = o.clone() + c.clone() * v.clone();
                    }
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|a| a.clone() * s.clone()).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }
}
