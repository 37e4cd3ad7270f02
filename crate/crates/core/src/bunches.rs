//! Lie g-bunches and their enlargement to isotopic pairs; isorepresentations
//! `(T, Q)` of a Lie algebra, i.e. representations of the pair `I(g) = (C, g)`.

use num::Zero;
use serde::{Deserialize, Serialize};

use crate::algebra::diamond::{diamond_bracket, is_lie};
use crate::algebra::pair::IsotopicPair;
use crate::algebra::tensor::{BracketTensor, IsoTensor};
use crate::error::{Error, Result};
use crate::linalg::{inverse, nullspace, rank, Matrix, SpanSolver};
use crate::quantum::representation::{verify_representation, PairRepresentation};
use crate::report::{vec_residual, AxiomReport, ResidualTracker};
use crate::scalar::{Rational, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebraSpec<S> {
    pub labels: Vec<String>,
    /// `[e_i, e_j] = sum_k c[i][j][k] e_k`.
    pub constants: BracketTensor<S>,
}

impl<S: Scalar> LieAlgebraSpec<S> {
    pub fn new(labels: Vec<String>, constants: BracketTensor<S>) -> Result<Self> {
        if labels.len() != constants.dim() {
            return Err(Error::dimension("Lie algebra labels", constants.dim(), labels.len()));
        }
        Ok(Self { labels, constants })
    }

    /// `[h,e] = 2e`, `[h,f] = -2f`, `[e,f] = h`.
    pub fn sl2() -> Self {
        let mut c = BracketTensor::zeros(3);
        let two = S::from_ratio(2, 1);
        let (h, e, f) = (0, 1, 2);
        c.set(h, e, e, two.clone());
        c.set(e, h, e, -two.clone());
        c.set(h, f, f, -two.clone());
        c.set(f, h, f, two);
        c.set(e, f, h, S::one());
        c.set(f, e, h, -S::one());
        Self {
            labels: vec!["h".into(), "e".into(), "f".into()],
            constants: c,
        }
    }

    pub fn abelian(n: usize) -> Self {
        Self {
            labels: (0..n).map(|i| format!("x{i}")).collect(),
            constants: BracketTensor::zeros(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.constants.dim()
    }

    pub fn verify(&self, tol: f64) -> AxiomReport {
        is_lie(&self.constants, tol)
    }

    /// `ad(e_i)`, with `ad(e_i)[k][j] = c[i][j][k]`.
    pub fn adjoint(&self) -> Vec<Matrix<S>> {
        let n = self.dim();
        (0..n)
            .map(|i| Matrix::from_fn(n, n, |k, j| self.constants.get(i, j, k).clone()))
            .collect()
    }

    /// `T([e_i, e_j])` for a linear map given on the basis.
    pub fn image_of_bracket(&self, t: &[Matrix<S>], i: usize, j: usize) -> Matrix<S> {
        let mut out = Matrix::zeros(t[0].rows(), t[0].cols());
        for (k, m) in t.iter().enumerate() {
            let c = self.constants.get(i, j, k);
            if !c.is_zero() {
                out.add_scaled(c, m);
            }
        }
        out
    }

    pub fn to_f64(&self) -> LieAlgebraSpec<f64> {
        LieAlgebraSpec {
            labels: self.labels.clone(),
            constants: BracketTensor::from_fn(self.dim(), |i, j, k| self.constants.get(i, j, k).to_f64()),
        }
    }
}

/// `[T(X), T(Y)] = T([X,Y])` on all basis pairs.
pub fn verify_lie_representation<S: Scalar>(t: &[Matrix<S>], g: &LieAlgebraSpec<S>, tol: f64) -> Result<AxiomReport> {
    if t.len() != g.dim() {
        return Err(Error::dimension("representation", g.dim(), t.len()));
    }
    let mut report = AxiomReport::for_scalar::<S>("Lie algebra representation", tol);
    let mut tr = ResidualTracker::new("homomorphism");
    for i in 0..t.len() {
        for j in i + 1..t.len() {
            let d = t[i].commutator(&t[j]).sub(&g.image_of_bracket(t, i, j));
            tr.record(d.max_abs(), &[i, j], || vec![g.labels[i].clone(), g.labels[j].clone()]);
        }
    }
    report.push(tr);
    Ok(report)
}

/// A `g`-module `V` with a family of brackets `[.,.]_A` on `V` indexed by `g`.
#[derive(Clone, Debug, PartialEq)]
pub struct LieBunch<S> {
    pub g: LieAlgebraSpec<S>,
    pub labels: Vec<String>,
    /// `action[a]`: the operator of `e_a` on `V`.
    pub action: Vec<Matrix<S>>,
    pub brackets: IsoTensor<S>,
}

impl<S: Scalar> LieBunch<S> {
    pub fn new(g: LieAlgebraSpec<S>, action: Vec<Matrix<S>>, brackets: IsoTensor<S>) -> Result<Self> {
        let n = brackets.dim();
        if brackets.iso_dim() != g.dim() || action.len() != g.dim() {
            return Err(Error::dimension("bunch index space", g.dim(), brackets.iso_dim().min(action.len())));
        }
        if action.iter().any(|m| m.rows() != n || m.cols() != n) {
            return Err(Error::Dimension {
                context: "bunch action matrix".into(),
                expected: n,
                found: action.iter().map(|m| m.rows().max(m.cols())).find(|&d| d != n).unwrap_or(n),
            });
        }
        Ok(Self {
            g,
            labels: (0..n).map(|i| format!("v{i}")).collect(),
            action,
            brackets,
        })
    }

    /// `V = 0`.
    pub fn zero(g: LieAlgebraSpec<S>) -> Self {
        let k = g.dim();
        Self {
            action: vec![Matrix::zeros(0, 0); k],
            brackets: IsoTensor::zeros(k, 0),
            labels: Vec::new(),
            g,
        }
    }

    pub fn dim(&self) -> usize {
        self.brackets.dim()
    }

    pub fn bracket_at(&self, a: usize) -> BracketTensor<S> {
        let n = self.dim();
        BracketTensor::from_fn(n, |i, j, k| self.brackets.get(a, i, j, k).clone())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BunchReport {
    pub report: AxiomReport,
    pub complete: bool,
    /// First basis triple `(a, b, z)` with no solution, if any.
    pub failing_triple: Option<[usize; 3]>,
}

/// Checks the bunch: each bracket is Lie (plus the polarized Jacobi identity),
/// the action is a representation of `g`, the family is infinitesimally
/// equivariant, and completeness under the diamond composition.
pub fn verify_bunch<S: Scalar>(bunch: &LieBunch<S>, tol: f64) -> Result<(BunchReport, Option<DiamondTable<S>>)> {
    let k = bunch.g.dim();
    let n = bunch.dim();
    let mut report = AxiomReport::for_scalar::<S>("Lie g-bunch", tol);
    report.absorb("g", bunch.g.verify(tol));
    if k > 0 && n > 0 {
        report.absorb("module", verify_lie_representation(&bunch.action, &bunch.g, tol)?);
    }
    let brs: Vec<BracketTensor<S>> = (0..k).map(|a| bunch.bracket_at(a)).collect();
    let mut anti = ResidualTracker::new("antisymmetry");
    let mut jac = ResidualTracker::new("jacobi");
    let mut pol = ResidualTracker::new("polarized_jacobi");
    let mut equi = ResidualTracker::new("equivariance");
    let basis = |i: usize| {
        let mut v = vec![S::zero(); n];
        v[i] = S::one();
        v
    };
    for a in 0..k {
        let lie = is_lie(&brs[a], tol);
        if let Some(c) = lie.check("antisymmetry") {
            anti.record(c.max_residual, &[a], || vec![bunch.g.labels[a].clone()]);
        }
        if let Some(c) = lie.check("jacobi") {
            jac.record(c.max_residual, &[a], || vec![bunch.g.labels[a].clone()]);
        }
        for b in a + 1..k {
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        let (ex, ey, ez) = (basis(x), basis(y), basis(z));
                        let term = |p: &BracketTensor<S>, q: &BracketTensor<S>, u: &[S], v: &[S], w: &[S]| q.apply(&p.apply(u, v), w);
                        let mut s = vec![S::zero(); n];
                        for (p, q) in [(&brs[a], &brs[b]), (&brs[b], &brs[a])] {
                            for t in [term(p, q, &ex, &ey, &ez), term(p, q, &ey, &ez, &ex), term(p, q, &ez, &ex, &ey)] {
                                for (si, ti) in s.iter_mut().zip(t) {
                                    *si = si.clone() + ti;
                                }
                            }
                        }
                        pol.record(vec_residual(&s), &[a, b, x, y, z], Vec::new);
                    }
                }
            }
        }
    }
    // X.[u,v]_A = [X.u, v]_A + [u, X.v]_A + [u, v]_{[X,A]}
    for xg in 0..k {
        let rho = &bunch.action[xg];
        for a in 0..k {
            let mut twisted = vec![S::zero(); k];
            for (c, tw) in twisted.iter_mut().enumerate() {
                *tw = bunch.g.constants.get(xg, a, c).clone();
            }
            for u in 0..n {
                for v in 0..n {
                    let uv = brs[a].apply(&basis(u), &basis(v));
                    let lhs = mat_vec(rho, &uv);
                    let xu = rho.column(u);
                    let xv = rho.column(v);
                    let r1 = brs[a].apply(&xu, &basis(v));
                    let r2 = brs[a].apply(&basis(u), &xv);
                    let r3 = bunch.brackets.apply(&twisted, &basis(u), &basis(v))?;
                    let d: Vec<S> = (0..n)
                        .map(|i| lhs[i].clone() - r1[i].clone() - r2[i].clone() - r3[i].clone())
                        .collect();
                    equi.record(vec_residual(&d), &[xg, a, u, v], Vec::new);
                }
            }
        }
    }
    for t in [anti, jac, pol, equi] {
        report.push(t);
    }
    let (complete, failing, table) = completeness(bunch, &brs, tol)?;
    report.flag("complete", complete);
    Ok((
        BunchReport {
            report,
            complete,
            failing_triple: failing,
        },
        table,
    ))
}

fn mat_vec<S: Scalar>(m: &Matrix<S>, v: &[S]) -> Vec<S> {
    (0..m.rows())
        .map(|i| m.row(i).iter().zip(v).fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone()))
        .collect()
}

/// `table[a][b][z]` = coordinates in `g` of `e_a <>_{v_z} e_b`.
pub type DiamondTable<S> = Vec<Vec<Vec<Vec<S>>>>;

fn completeness<S: Scalar>(bunch: &LieBunch<S>, brs: &[BracketTensor<S>], tol: f64) -> Result<(bool, Option<[usize; 3]>, Option<DiamondTable<S>>)> {
    let k = bunch.g.dim();
    let n = bunch.dim();
    if n == 0 {
        return Ok((true, None, Some(vec![vec![Vec::new(); k]; k])));
    }
    let columns: Vec<Vec<S>> = brs.iter().map(|b| b.as_slice().to_vec()).collect();
    let scale = columns.iter().flat_map(|c| c.iter().map(|v| v.to_f64().abs())).fold(0.0, f64::max).max(1.0);
    let rank_tol = if S::EXACT { 0.0 } else { tol.max(1e-10 * scale) };
    // The span solver works on an independent subset; map its coordinates back.
    let independent = crate::linalg::independent_subset(&columns, rank_tol);
    let solver = SpanSolver::new(independent.iter().map(|&i| columns[i].clone()).collect(), rank_tol)?;
    let mut table = vec![vec![vec![Vec::new(); n]; k]; k];
    for a in 0..k {
        for b in 0..k {
            for z in 0..n {
                let mut ez = vec![S::zero(); n];
                ez[z] = S::one();
                let target = diamond_bracket(&brs[a], &brs[b], &ez)?;
                let coords = if target.is_zero() {
                    Some(vec![S::zero(); independent.len()])
                } else {
                    solver.solve(target.as_slice())
                };
                match coords {
                    Some(c) => {
                        let mut full = vec![S::zero(); k];
                        for (slot, v) in independent.iter().zip(c) {
                            full[*slot] = v;
                        }
                        table[a][b][z] = full;
                    }
                    None => return Ok((false, Some([a, b, z]), None)),
                }
            }
        }
    }
    Ok((true, None, Some(table)))
}

/// The pair `(V + C, g)` of a complete bunch:
/// `[(X,l),(Y,m)]_A = ([X,Y]_A + l A(Y) - m A(X), 0)` and
/// `[A,B]_(X,l) = A <>_X B + l [A,B]`.
pub fn enlarge_bunch<S: Scalar>(bunch: &LieBunch<S>, tol: f64) -> Result<IsotopicPair<S>> {
    let (rep, table) = verify_bunch(bunch, tol)?;
    let Some(table) = table else {
        let [a, b, z] = rep.failing_triple.expect("incomplete bunch names a triple");
        return Err(Error::NotClosed {
            what: "bunch diamond composition".into(),
            detail: format!("{} <>_{} {} is not a bracket of the family", bunch.g.labels[a], bunch.labels[z], bunch.g.labels[b]),
        });
    };
    let n = bunch.dim();
    let k = bunch.g.dim();
    let one = n;
    let mut pair = IsotopicPair::zeros(n + 1, k);
    let m1 = pair.tensor_mut(crate::algebra::pair::Side::V1);
    for a in 0..k {
        for i in 0..n {
            for j in i + 1..n {
                for o in 0..n {
                    let v = bunch.brackets.get(a, i, j, o);
                    if !v.is_zero() {
                        m1.set_antisymmetric(a, i, j, o, v.clone());
                    }
                }
            }
            // [(e_i, 0), (0, 1)]_A = -A(e_i)
            for o in 0..n {
                let v = bunch.action[a][(o, i)].clone();
                if !v.is_zero() {
                    m1.set_antisymmetric(a, i, one, o, -v);
                }
            }
        }
    }
    let m2 = pair.tensor_mut(crate::algebra::pair::Side::V2);
    for a in 0..k {
        for b in a + 1..k {
            for (z, coords) in table[a][b].iter().enumerate() {
                for (c, v) in coords.iter().enumerate() {
                    if !v.is_zero() {
                        m2.set_antisymmetric(z, a, b, c, v.clone());
                    }
                }
            }
            for c in 0..k {
                let v = bunch.g.constants.get(a, b, c);
                if !v.is_zero() {
                    m2.set_antisymmetric(one, a, b, c, v.clone());
                }
            }
        }
    }
    let mut labels1 = bunch.labels.clone();
    labels1.push("1".into());
    pair.with_labels(labels1, bunch.g.labels.clone())
}

/// `I(g) = (C, g)` with `[A,B]_l = l [A,B]`.
pub fn i_pair<S: Scalar>(g: &LieAlgebraSpec<S>) -> Result<IsotopicPair<S>> {
    enlarge_bunch(&LieBunch::zero(g.clone()), 0.0)
}

/// `T(X) Q T(Y) - T(Y) Q T(X) = T([X,Y])`.
#[derive(Clone, Debug, PartialEq)]
pub struct Isorep<S> {
    pub t: Vec<Matrix<S>>,
    pub q: Matrix<S>,
    /// `(d1, d2)` for a split isorepresentation: `Q: W1 -> W2`, `T(X): W2 -> W1`.
    pub grading: Option<(usize, usize)>,
}

impl<S: Scalar> Isorep<S> {
    pub fn dim(&self) -> usize {
        self.q.rows()
    }

    /// The same data as a representation of `I(g)`: `T1(1) = Q`, `T2 = T`.
    pub fn as_pair_representation(&self) -> Result<PairRepresentation<S>> {
        PairRepresentation::new(self.dim(), vec![self.q.clone()], self.t.clone(), self.grading)
    }
}

pub fn verify_isorep<S: Scalar>(iso: &Isorep<S>, g: &LieAlgebraSpec<S>, tol: f64) -> Result<AxiomReport> {
    let n = iso.dim();
    if iso.t.len() != g.dim() {
        return Err(Error::dimension("isorep generators", g.dim(), iso.t.len()));
    }
    if iso.q.cols() != n || iso.t.iter().any(|m| m.rows() != n || m.cols() != n) {
        return Err(Error::Dimension {
            context: "isorep matrices must share one square size".into(),
            expected: n,
            found: iso.q.cols(),
        });
    }
    let mut report = AxiomReport::for_scalar::<S>("isorepresentation", tol);
    let mut tr = ResidualTracker::new("isorep");
    for i in 0..iso.t.len() {
        for j in i + 1..iso.t.len() {
            let lhs = Matrix::product(&[&iso.t[i], &iso.q, &iso.t[j]]).sub(&Matrix::product(&[&iso.t[j], &iso.q, &iso.t[i]]));
            let d = lhs.sub(&g.image_of_bracket(&iso.t, i, j));
            tr.record(d.max_abs(), &[i, j], || vec![g.labels[i].clone(), g.labels[j].clone()]);
        }
    }
    report.push(tr);
    Ok(report)
}

/// Both routes: the direct relation and the pair representation of `I(g)`.
#[derive(Clone, Debug, Serialize)]
pub struct IsorepCrossCheck {
    pub direct: AxiomReport,
    pub via_pair: AxiomReport,
    pub agree: bool,
}

pub fn cross_check_isorep<S: Scalar>(iso: &Isorep<S>, g: &LieAlgebraSpec<S>, tol: f64) -> Result<IsorepCrossCheck> {
    let direct = verify_isorep(iso, g, tol)?;
    let pair = i_pair(g)?;
    let via_pair = verify_representation(&iso.as_pair_representation()?, &pair, tol)?;
    let agree = direct.passed == via_pair.passed
        && (direct.max_residual() - via_pair.max_residual()).abs() <= 1e-12 * direct.max_residual().max(1.0);
    Ok(IsorepCrossCheck { direct, via_pair, agree })
}

/// `T+(X) = Q T(X)`, `T-(X) = T(X) Q`.
pub fn isorep_to_representations<S: Scalar>(iso: &Isorep<S>) -> (Vec<Matrix<S>>, Vec<Matrix<S>>) {
    (
        iso.t.iter().map(|t| iso.q.matmul(t)).collect(),
        iso.t.iter().map(|t| t.matmul(&iso.q)).collect(),
    )
}

/// `T+_Q(X) = Q^-1 T(X)`, `T-_Q(X) = T(X) Q^-1`; needs `Q` invertible.
pub fn representation_to_isoreps<S: Scalar>(t: &[Matrix<S>], q: &Matrix<S>, tol: f64) -> Result<(Isorep<S>, Isorep<S>)> {
    let q_inv = inverse(q, tol)?;
    let plus = Isorep {
        t: t.iter().map(|m| q_inv.matmul(m)).collect(),
        q: q.clone(),
        grading: None,
    };
    let minus = Isorep {
        t: t.iter().map(|m| m.matmul(&q_inv)).collect(),
        q: q.clone(),
        grading: None,
    };
    Ok((plus, minus))
}

/// `V = ad + ad`, `Q = [[0,0],[E,0]]`, `T(X) = [[0, ad X],[0,0]]`.
pub fn standard_isorep<S: Scalar>(g: &LieAlgebraSpec<S>) -> Isorep<S> {
    let k = g.dim();
    let mut q = Matrix::zeros(2 * k, 2 * k);
    q.set_block(k, 0, &Matrix::identity(k));
    let t = g
        .adjoint()
        .iter()
        .map(|ad| {
            let mut m = Matrix::zeros(2 * k, 2 * k);
            m.set_block(0, k, ad);
            m
        })
        .collect();
    Isorep { t, q, grading: Some((k, k)) }
}

/// The two-dimensional isorepresentation of the one-dimensional algebra:
/// `Q = [[0,0],[1,0]]`, generator `[[0,1],[0,0]]`.
pub fn two_dim_example() -> (LieAlgebraSpec<Rational>, Isorep<Rational>) {
    let q = Matrix::unit(2, 2, 1, 0);
    let t = Matrix::unit(2, 2, 0, 1);
    (LieAlgebraSpec::abelian(1), Isorep { t: vec![t], q, grading: Some((1, 1)) })
}

/// Structure of a split isorepresentation: `Q` restricted to `W1` as a map
/// into `W2`, the induced actions `rho1(X) = t_X q` on `W1` and
/// `rho2(X) = q t_X` on `W2`, and their intertwiners.
#[derive(Clone, Debug, Serialize)]
pub struct SplitStructure {
    pub split_shape: bool,
    pub d1: usize,
    pub d2: usize,
    pub q_block_rank: usize,
    pub q_is_isomorphism: bool,
    pub rho1_is_representation: bool,
    pub rho2_is_representation: bool,
    /// `q rho1(X) = rho2(X) q` for all `X`.
    pub q_intertwines: bool,
    /// Dimension of `{M : M rho1(X) = rho2(X) M for all X}`.
    pub intertwiner_dim: usize,
    pub consistent: bool,
}

pub fn split_structure_check<S: Scalar>(iso: &Isorep<S>, g: &LieAlgebraSpec<S>, tol: f64) -> Result<SplitStructure> {
    let Some((d1, d2)) = iso.grading else {
        return Err(Error::Precondition("structure check needs a split grading".into()));
    };
    if d1 + d2 != iso.dim() {
        return Err(Error::dimension("grading d1 + d2", iso.dim(), d1 + d2));
    }
    let zt = if S::EXACT { 0.0 } else { tol };
    let split_shape = iso.q.max_abs_outside(d1, 0, d2, d1) <= zt && iso.t.iter().all(|m| m.max_abs_outside(0, d1, d1, d2) <= zt);
    let qb = iso.q.block(d1, 0, d2, d1);
    let tb: Vec<Matrix<S>> = iso.t.iter().map(|m| m.block(0, d1, d1, d2)).collect();
    let rho1: Vec<Matrix<S>> = tb.iter().map(|t| t.matmul(&qb)).collect();
    let rho2: Vec<Matrix<S>> = tb.iter().map(|t| qb.matmul(t)).collect();
    let q_block_rank = rank(&qb, zt);
    let q_is_isomorphism = d1 == d2 && q_block_rank == d1;
    let rep_ok = |r: &[Matrix<S>]| -> Result<bool> {
        if r.is_empty() || r[0].rows() == 0 {
            return Ok(true);
        }
        Ok(verify_lie_representation(r, g, tol)?.passed)
    };
    let q_intertwines = rho1
        .iter()
        .zip(&rho2)
        .all(|(r1, r2)| qb.matmul(r1).sub(&r2.matmul(&qb)).is_negligible(zt));
    // M (d2 x d1) in row-major unknowns: (M r1 - r2 M)[i][j] = 0.
    let unknowns = d2 * d1;
    let mut rows: Vec<Vec<S>> = Vec::new();
    for (r1, r2) in rho1.iter().zip(&rho2) {
        for i in 0..d2 {
            for j in 0..d1 {
                let mut row = vec![S::zero(); unknowns];
                for l in 0..d1 {
                    let idx = i * d1 + l;
                    row[idx] = row[idx].clone() + r1[(l, j)].clone();
                }
                for l in 0..d2 {
                    let idx = l * d1 + j;
                    row[idx] = row[idx].clone() - r2[(i, l)].clone();
                }
                rows.push(row);
            }
        }
    }
    let intertwiner_dim = if rows.is_empty() {
        unknowns
    } else {
        nullspace(&Matrix::from_rows(rows)?, zt).len()
    };
    let rho1_is_representation = rep_ok(&rho1)?;
    let rho2_is_representation = rep_ok(&rho2)?;
    Ok(SplitStructure {
        split_shape,
        d1,
        d2,
        q_block_rank,
        q_is_isomorphism,
        rho1_is_representation,
        rho2_is_representation,
        q_intertwines,
        intertwiner_dim,
        consistent: split_shape && q_is_isomorphism && q_intertwines && rho1_is_representation && rho2_is_representation,
    })
}

/// `{"labels": [...]?, "dim": k, "constants": [[i, j, k, num, den], ...]}`;
/// antisymmetric partners are filled in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LieAlgebraDocument {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub constants: Vec<[i64; 5]>,
}

impl LieAlgebraDocument {
    pub fn into_spec(self) -> Result<LieAlgebraSpec<Rational>> {
        let mut c = BracketTensor::zeros(self.dim);
        let mut seen = std::collections::HashMap::new();
        for (row_no, &[i, j, k, num, den]) in self.constants.iter().enumerate() {
            let idx = |v: i64| usize::try_from(v).ok().filter(|&u| u < self.dim);
            let (Some(i), Some(j), Some(k)) = (idx(i), idx(j), idx(k)) else {
                return Err(Error::Input(format!("constants[{row_no}]: index out of range")));
            };
            if den == 0 {
                return Err(Error::Input(format!("constants[{row_no}]: zero denominator")));
            }
            let v = Rational::from_ratio(num, den);
            if i == j {
                if v.is_zero() {
                    continue;
                }
                return Err(Error::Input(format!("constants[{row_no}]: nonzero diagonal entry")));
            }
            let (key, signed) = if i < j { ((i, j, k), v.clone()) } else { ((j, i, k), -v.clone()) };
            if let Some(prev) = seen.insert(key, signed.clone()) {
                if prev != signed {
                    return Err(Error::Input(format!("constants[{row_no}]: conflicts with an earlier entry")));
                }
            }
            c.set(i, j, k, v.clone());
            c.set(j, i, k, -v);
        }
        let labels = self.labels.unwrap_or_else(|| (0..self.dim).map(|i| format!("x{i}")).collect());
        LieAlgebraSpec::new(labels, c)
    }

    pub fn from_spec(g: &LieAlgebraSpec<Rational>) -> Result<Self> {
        let mut constants = Vec::new();
        for i in 0..g.dim() {
            for j in i + 1..g.dim() {
                for k in 0..g.dim() {
                    let v = g.constants.get(i, j, k);
                    if !v.is_zero() {
                        let (n, d) = crate::scalar::to_i64_pair(v).ok_or_else(|| Error::Input("constant does not fit i64".into()))?;
                        constants.push([i as i64, j as i64, k as i64, n, d]);
                    }
                }
            }
        }
        Ok(Self {
            dim: g.dim(),
            labels: Some(g.labels.clone()),
            constants,
        })
    }
}

/// `{"g": {...}, "dim": n, "labels"?: [...], "action": [[a, row, col, num, den]],
/// "brackets": [[a, i, j, k, num, den]]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BunchDocument {
    pub g: LieAlgebraDocument,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default)]
    pub action: Vec<[i64; 5]>,
    #[serde(default)]
    pub brackets: Vec<[i64; 6]>,
}

impl BunchDocument {
    pub fn into_bunch(self) -> Result<LieBunch<Rational>> {
        let g = self.g.into_spec()?;
        let (k, n) = (g.dim(), self.dim);
        let idx = |v: i64, bound: usize| usize::try_from(v).ok().filter(|&u| u < bound);
        let mut action = vec![Matrix::zeros(n, n); k];
        for (row_no, &[a, r, c, num, den]) in self.action.iter().enumerate() {
            let (Some(a), Some(r), Some(c)) = (idx(a, k), idx(r, n), idx(c, n)) else {
                return Err(Error::Input(format!("action[{row_no}]: index out of range")));
            };
            if den == 0 {
                return Err(Error::Input(format!("action[{row_no}]: zero denominator")));
            }
            action[a][(r, c)] = Rational::from_ratio(num, den);
        }
        let mut brackets = IsoTensor::<Rational>::zeros(k, n);
        for (row_no, &[a, i, j, o, num, den]) in self.brackets.iter().enumerate() {
            let (Some(a), Some(i), Some(j), Some(o)) = (idx(a, k), idx(i, n), idx(j, n), idx(o, n)) else {
                return Err(Error::Input(format!("brackets[{row_no}]: index out of range")));
            };
            if den == 0 || i == j {
                return Err(Error::Input(format!("brackets[{row_no}]: zero denominator or diagonal entry")));
            }
            let v = Rational::from_ratio(num, den);
            let existing = brackets.get(a, i, j, o).clone();
            if !existing.is_zero() && existing != v {
                return Err(Error::Input(format!("brackets[{row_no}]: conflicts with an earlier entry")));
            }
            brackets.set_antisymmetric(a, i, j, o, v);
        }
        let mut bunch = LieBunch::new(g, action, brackets)?;
        if let Some(l) = self.labels {
            if l.len() != n {
                return Err(Error::dimension("bunch labels", n, l.len()));
            }
            bunch.labels = l;
        }
        Ok(bunch)
    }
}

/// `{"q": [[..]], "t": [[[..]], ...], "grading"?: [d1, d2]}`; entries are numbers
/// or rational strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsorepDocument {
    pub q: Vec<Vec<serde_json::Value>>,
    pub t: Vec<Vec<Vec<serde_json::Value>>>,
    #[serde(default)]
    pub grading: Option<[usize; 2]>,
}

impl IsorepDocument {
    pub fn into_isorep(self) -> Result<Isorep<Rational>> {
        let matrix = |rows: &[Vec<serde_json::Value>], what: &str| -> Result<Matrix<Rational>> {
            let rows = rows
                .iter()
                .map(|r| r.iter().map(crate::oscillator::value_to_rational).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::Input(format!("{what}: {e}")))?;
            Matrix::from_rows(rows)
        };
        let q = matrix(&self.q, "q")?;
        let t = self
            .t
            .iter()
            .enumerate()
            .map(|(i, m)| matrix(m, &format!("t[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let n = q.rows();
        if q.cols() != n || t.iter().any(|m| m.rows() != n || m.cols() != n) {
            return Err(Error::Input(format!("isorep matrices must all be {n}x{n}")));
        }
        if let Some([d1, d2]) = self.grading {
            if d1 + d2 != n {
                return Err(Error::dimension("isorep grading", n, d1 + d2));
            }
        }
        Ok(Isorep {
            t,
            q,
            grading: self.grading.map(|[a, b]| (a, b)),
        })
    }

    pub fn from_isorep(iso: &Isorep<Rational>) -> Self {
        let rows = |m: &Matrix<Rational>| {
            (0..m.rows())
                .map(|r| m.row(r).iter().map(|v| serde_json::Value::String(v.to_string())).collect())
                .collect()
        };
        Self {
            q: rows(&iso.q),
            t: iso.t.iter().map(rows).collect(),
            grading: iso.grading.map(|(a, b)| [a, b]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::axioms::verify_isotopic_pair;
    use crate::scalar::int;

    #[test]
    fn isorep_document_round_trip() {
        let (_, iso) = two_dim_example();
        let doc = IsorepDocument::from_isorep(&iso);
        let back: IsorepDocument = serde_json::from_str(&serde_json::to_string(&doc).unwrap()).unwrap();
        assert_eq!(back.into_isorep().unwrap(), iso);
        let bad: IsorepDocument = serde_json::from_str(r#"{"q": [[0, 1]], "t": []}"#).unwrap();
        assert!(bad.into_isorep().is_err());
    }

    fn sl2() -> LieAlgebraSpec<Rational> {
        LieAlgebraSpec::sl2()
    }

    #[test]
    fn sl2_is_lie_and_adjoint_is_a_representation() {
        let g = sl2();
        assert!(g.verify(0.0).passed);
        assert!(verify_lie_representation(&g.adjoint(), &g, 0.0).unwrap().passed);
    }

    #[test]
    fn i_pair_of_sl2() {
        let p = i_pair(&sl2()).unwrap();
        assert_eq!((p.n1(), p.n2()), (1, 3));
        assert!(verify_isotopic_pair(&p, 0.0).passed);
        // [e, f]_1 = h
        assert_eq!(p.isobracket(crate::algebra::pair::Side::V2, &[int(1)], &[int(0), int(1), int(0)], &[int(0), int(0), int(1)]).unwrap(), vec![int(1), int(0), int(0)]);
    }

    #[test]
    fn zero_bracket_bunch_is_complete_and_enlarges() {
        let g = sl2();
        let bunch = LieBunch::new(g.clone(), g.adjoint(), IsoTensor::zeros(3, 3)).unwrap();
        let (rep, table) = verify_bunch(&bunch, 0.0).unwrap();
        assert!(rep.report.passed && rep.complete);
        assert!(table.unwrap().iter().flatten().flatten().flatten().all(|v| v.is_zero()));
        let pair = enlarge_bunch(&bunch, 0.0).unwrap();
        assert!(verify_isotopic_pair(&pair, 0.0).passed);
    }

    #[test]
    fn adjoint_bracket_bunch() {
        // [u,v]_h = [u,v], [u,v]_e = [u,v]_f = 0 on V = sl2
        let g = sl2();
        let mut br = IsoTensor::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let v = g.constants.get(i, j, k).clone();
                    if i < j && !v.is_zero() {
                        br.set_antisymmetric(0, i, j, k, v);
                    }
                }
            }
        }
        let bunch = LieBunch::new(g.clone(), g.adjoint(), br).unwrap();
        let (rep, _) = verify_bunch(&bunch, 0.0).unwrap();
        // [e,h] = -2e, yet [.,.]_e vanishes
        assert!(!rep.report.check("equivariance").unwrap().passed);
    }

    #[test]
    fn compatible_but_incomplete_family() {
        let mut br = IsoTensor::zeros(2, 3);
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            br.set_antisymmetric(0, i, j, k, int(1));
        }
        br.set_antisymmetric(1, 0, 1, 2, int(1));
        let bunch = LieBunch::new(LieAlgebraSpec::abelian(2), vec![Matrix::zeros(3, 3); 2], br).unwrap();
        let (rep, table) = verify_bunch(&bunch, 0.0).unwrap();
        assert!(rep.report.passed);
        assert!(!rep.complete && table.is_none());
        assert_eq!(rep.failing_triple, Some([0, 1, 0]));
        assert!(matches!(enlarge_bunch(&bunch, 0.0), Err(Error::NotClosed { .. })));
    }

    #[test]
    fn superalgebra_of_i_sl2() {
        use crate::algebra::alts::to_alts;
        let sa = crate::superalgebra::build_super(&to_alts(&i_pair(&sl2()).unwrap()), 0.0).unwrap();
        assert_eq!(sa.superdimension(), (3, 4));
        // even part kills the unit (trivial module) and acts on g-part like ad
        let unit = sa.basis_vector(3);
        let mut acts = Vec::new();
        for i in 0..3 {
            assert!(sa.bracket(&sa.basis_vector(i), &unit).iter().all(|v| v.is_zero()));
            let m = Matrix::from_fn(3, 3, |r, c| sa.bracket(&sa.basis_vector(i), &sa.basis_vector(4 + c))[4 + r].clone());
            acts.push(m.into_vec());
        }
        let mut all = acts.clone();
        all.extend(sl2().adjoint().into_iter().map(Matrix::into_vec));
        assert_eq!(crate::linalg::independent_subset(&acts, 0.0).len(), 3);
        assert_eq!(crate::linalg::independent_subset(&all, 0.0).len(), 3);
    }

    #[test]
    fn isoreps() {
        let g = sl2();
        let std = standard_isorep(&g);
        assert_eq!(std.dim(), 6);
        assert!(verify_isorep(&std, &g, 0.0).unwrap().passed);
        let cc = cross_check_isorep(&std, &g, 0.0).unwrap();
        assert!(cc.agree && cc.via_pair.flags["split"] && cc.via_pair.flags["nilpotent"]);
        let (a, ex) = two_dim_example();
        assert!(verify_isorep(&ex, &a, 0.0).unwrap().passed);
        let s = split_structure_check(&ex, &a, 0.0).unwrap();
        assert!(s.consistent && s.q_block_rank == 1);
        let s = split_structure_check(&std, &g, 0.0).unwrap();
        assert!(s.consistent && s.intertwiner_dim >= 1);
        let mut bad = std.clone();
        bad.q[(3, 0)] = int(0);
        assert!(!split_structure_check(&bad, &g, 0.0).unwrap().consistent);
    }

    #[test]
    fn conversions_round_trip() {
        let g = sl2();
        let ad = g.adjoint();
        let q = Matrix::from_rows(vec![vec![int(1), int(2), int(0)], vec![int(0), int(1), int(3)], vec![int(1), int(0), int(1)]]).unwrap();
        let (plus, minus) = representation_to_isoreps(&ad, &q, 0.0).unwrap();
        assert!(verify_isorep(&plus, &g, 0.0).unwrap().passed);
        assert!(verify_isorep(&minus, &g, 0.0).unwrap().passed);
        let (tp, tm) = isorep_to_representations(&plus);
        assert_eq!(tp, ad);
        assert!(verify_lie_representation(&tm, &g, 0.0).unwrap().passed);
        let (_, tm2) = isorep_to_representations(&minus);
        assert_eq!(tm2, ad);
        assert!(matches!(representation_to_isoreps(&ad, &Matrix::zeros(3, 3), 0.0), Err(Error::Singular(_))));
        let id = Matrix::identity(3);
        let (p2, _) = representation_to_isoreps(&ad, &id, 0.0).unwrap();
        assert_eq!(p2.t, ad);
    }

    #[test]
    fn lie_document_round_trip() {
        let doc = LieAlgebraDocument::from_spec(&sl2()).unwrap();
        let json = serde_json::to_string(&doc).unwrap();
        let back: LieAlgebraDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(back.into_spec().unwrap(), sl2());
    }
}
