//! Numerical search for split representations by Levenberg-Marquardt on the
//! defining relations, restarted from random seeds.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::pair::IsotopicPair;
use crate::algebra::tensor::IsoTensor;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::quantum::representation::{from_blocks, verify_representation, PairRepresentation, RepresentationDocument};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchConfig {
    pub seeds: usize,
    pub max_iters: usize,
    /// Success threshold on the largest relation defect.
    pub tol: f64,
    /// Candidates with `sum |T|^2` below this are treated as trivial.
    pub min_norm_sq: f64,
    /// Lower bound on `|T(x)|^2` for every basis vector `x`; `0` disables it.
    pub min_generator_norm_sq: f64,
    pub penalty_weight: f64,
    pub base_seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            seeds: 64,
            max_iters: 500,
            tol: 1e-10,
            min_norm_sq: 1.0,
            min_generator_norm_sq: 0.0,
            penalty_weight: 1.0,
            base_seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SeedRun {
    pub seed: u64,
    pub residual: f64,
    pub norm_sq: f64,
    pub min_generator_norm_sq: f64,
    pub objective: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    pub d1: usize,
    pub d2: usize,
    pub success: bool,
    /// Largest relation defect of `rep`, recomputed by `verify_representation`.
    pub residual: f64,
    pub norm_sq: f64,
    /// Final least-squares objective, including the nontriviality penalty.
    pub objective: f64,
    pub iterations: usize,
    pub seed: u64,
    pub successes: usize,
    pub runs: Vec<SeedRun>,
    #[serde(serialize_with = "ser_rep")]
    pub rep: PairRepresentation<f64>,
}

fn ser_rep<S: serde::Serializer>(rep: &PairRepresentation<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    RepresentationDocument::from_rep(rep).serialize(s)
}

struct Problem<'a> {
    pair: &'a IsotopicPair<f64>,
    d1: usize,
    d2: usize,
    cfg: SearchConfig,
}

impl Problem<'_> {
    fn n_params(&self) -> usize {
        (self.pair.n1() + self.pair.n2()) * self.d1 * self.d2
    }

    fn n_generators(&self) -> usize {
        self.pair.n1() + self.pair.n2()
    }

    fn n_relations(&self) -> usize {
        let (n1, n2) = (self.pair.n1(), self.pair.n2());
        (n2 * n1 * n1.saturating_sub(1) / 2 + n1 * n2 * n2.saturating_sub(1) / 2) * self.d1 * self.d2
    }

    fn blocks(&self, theta: &[f64]) -> (Vec<DMatrix<f64>>, Vec<DMatrix<f64>>) {
        let blk = self.d1 * self.d2;
        let n1 = self.pair.n1();
        let u = (0..n1)
            .map(|i| DMatrix::from_row_slice(self.d2, self.d1, &theta[i * blk..(i + 1) * blk]))
            .collect();
        let v = (0..self.pair.n2())
            .map(|a| DMatrix::from_row_slice(self.d1, self.d2, &theta[(n1 + a) * blk..(n1 + a + 1) * blk]))
            .collect();
        (u, v)
    }

    /// Residual vector (relations, then the penalty) and its Jacobian.
    fn evaluate(&self, theta: &[f64], with_jac: bool) -> (DVector<f64>, Option<DMatrix<f64>>) {
        let rows = self.n_relations() + 1 + self.n_generators();
        let np = self.n_params();
        let mut r = DVector::zeros(rows);
        let mut jac = with_jac.then(|| DMatrix::zeros(rows, np));
        let (u, v) = self.blocks(theta);
        let blk = self.d1 * self.d2;
        let off_v = self.pair.n1() * blk;
        let mut row = 0;
        side_terms(self.pair.m1(), &u, &v, 0, off_v, &mut r, jac.as_mut(), &mut row);
        side_terms(self.pair.m2(), &v, &u, off_v, 0, &mut r, jac.as_mut(), &mut row);
        let norm_sq: f64 = theta.iter().map(|x| x * x).sum();
        let w = self.cfg.penalty_weight.sqrt();
        let gap = self.cfg.min_norm_sq - norm_sq;
        if gap > 0.0 {
            r[row] = w * gap;
            if let Some(j) = jac.as_mut() {
                for (k, t) in theta.iter().enumerate() {
                    j[(row, k)] = -2.0 * w * t;
                }
            }
        }
        for g in 0..self.n_generators() {
            let row = row + 1 + g;
            let block = &theta[g * blk..(g + 1) * blk];
            let gap = self.cfg.min_generator_norm_sq - block.iter().map(|x| x * x).sum::<f64>();
            if gap > 0.0 {
                r[row] = w * gap;
                if let Some(j) = jac.as_mut() {
                    for (k, t) in block.iter().enumerate() {
                        j[(row, g * blk + k)] = -2.0 * w * t;
                    }
                }
            }
        }
        (r, jac)
    }

    fn relation_max(&self, r: &DVector<f64>) -> f64 {
        r.rows(0, self.n_relations()).amax()
    }

    fn run(&self, seed: u64) -> (Vec<f64>, usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let np = self.n_params();
        let mut theta: Vec<f64> = (0..np).map(|_| StandardNormal.sample(&mut rng)).collect();
        let (mut r, _) = self.evaluate(&theta, false);
        let mut cost = r.norm_squared();
        let mut lambda = 1e-3;
        let mut iters = 0;
        while iters < self.cfg.max_iters {
            iters += 1;
            let (_, jac) = self.evaluate(&theta, true);
            let j = jac.expect("jacobian requested");
            let jt = j.transpose();
            let jtj = &jt * &j;
            let g = &jt * &r;
            let mut accepted = false;
            while lambda < 1e16 {
                let mut a = jtj.clone();
                for k in 0..np {
                    a[(k, k)] += lambda * (jtj[(k, k)] + 1e-9);
                }
                let Some(ch) = a.cholesky() else {
                    lambda *= 10.0;
                    continue;
                };
                let step = ch.solve(&(-&g));
                let trial: Vec<f64> = theta.iter().zip(step.iter()).map(|(t, s)| t + s).collect();
                let (r_new, _) = self.evaluate(&trial, false);
                let c_new = r_new.norm_squared();
                if c_new.is_finite() && c_new < cost {
                    theta = trial;
                    r = r_new;
                    cost = c_new;
                    lambda = (lambda / 3.0).max(1e-12);
                    accepted = true;
                    break;
                }
                lambda *= 4.0;
            }
            let penalties = r.rows(self.n_relations(), 1 + self.n_generators()).amax();
            let done = self.relation_max(&r) < 1e-2 * self.cfg.tol && penalties == 0.0;
            if !accepted || done {
                break;
            }
        }
        (theta, iters)
    }
}

#[allow(clippy::too_many_arguments)]
fn side_terms(
    fam: &IsoTensor<f64>,
    own: &[DMatrix<f64>],
    other: &[DMatrix<f64>],
    own_off: usize,
    other_off: usize,
    r: &mut DVector<f64>,
    mut jac: Option<&mut DMatrix<f64>>,
    row: &mut usize,
) {
    if own.is_empty() {
        return;
    }
    let (ro, co) = own[0].shape();
    let blk = ro * co;
    for (iso, a) in other.iter().enumerate() {
        for i in 0..own.len() {
            for j in i + 1..own.len() {
                let (x, y) = (&own[i], &own[j]);
                let mut d = -(x * a * y) + y * a * x;
                for (o, m) in own.iter().enumerate() {
                    let c = *fam.get(iso, i, j, o);
                    if c != 0.0 {
                        d += m * c;
                    }
                }
                for uu in 0..ro {
                    for vv in 0..co {
                        r[*row + uu * co + vv] = d[(uu, vv)];
                    }
                }
                if let Some(jm) = jac.as_deref_mut() {
                    let ay = a * y;
                    let ya = y * a;
                    let xa = x * a;
                    let ax = a * x;
                    let at = |uu: usize, vv: usize| *row + uu * co + vv;
                    for o in 0..own.len() {
                        let c = *fam.get(iso, i, j, o);
                        if c != 0.0 {
                            for k in 0..blk {
                                jm[(at(k / co, k % co), own_off + o * blk + k)] += c;
                            }
                        }
                    }
                    // X = own[i]: -E_st A Y + Y A E_st
                    for s in 0..ro {
                        for t in 0..co {
                            let col = own_off + i * blk + s * co + t;
                            for vv in 0..co {
                                jm[(at(s, vv), col)] -= ay[(t, vv)];
                            }
                            for uu in 0..ro {
                                jm[(at(uu, t), col)] += ya[(uu, s)];
                            }
                        }
                    }
                    // Y = own[j]: -X A E_st + E_st A X
                    for s in 0..ro {
                        for t in 0..co {
                            let col = own_off + j * blk + s * co + t;
                            for uu in 0..ro {
                                jm[(at(uu, t), col)] -= xa[(uu, s)];
                            }
                            for vv in 0..co {
                                jm[(at(s, vv), col)] += ax[(t, vv)];
                            }
                        }
                    }
                    // A = other[iso]
                    for s in 0..co {
                        for t in 0..ro {
                            let col = other_off + iso * blk + s * ro + t;
                            for uu in 0..ro {
                                for vv in 0..co {
                                    jm[(at(uu, vv), col)] += -x[(uu, s)] * y[(t, vv)] + y[(uu, s)] * x[(t, vv)];
                                }
                            }
                        }
                    }
                }
                *row += blk;
            }
        }
    }
}

fn to_rep(p: &Problem<'_>, theta: &[f64]) -> Result<PairRepresentation<f64>> {
    let (u, v) = p.blocks(theta);
    let conv = |m: &DMatrix<f64>| Matrix::from_nalgebra(m);
    from_blocks(p.d1, p.d2, &u.iter().map(conv).collect::<Vec<_>>(), &v.iter().map(conv).collect::<Vec<_>>())
}

/// Searches for a split representation with `dim W1 = d1`, `dim W2 = d2`.
/// Failure is reported in the result, not as an error.
pub fn find_representation(pair: &IsotopicPair<f64>, d1: usize, d2: usize, cfg: &SearchConfig) -> Result<SearchResult> {
    if d1 == 0 || d2 == 0 {
        return Err(Error::Params("search needs d1, d2 >= 1".into()));
    }
    if cfg.seeds == 0 {
        return Err(Error::Params("search needs at least one seed".into()));
    }
    let problem = Problem { pair, d1, d2, cfg: *cfg };
    let outcomes: Vec<Result<(SeedRun, PairRepresentation<f64>, f64)>> = (0..cfg.seeds as u64)
        .into_par_iter()
        .map(|s| {
            let seed = cfg.base_seed.wrapping_add(s);
            let (theta, iterations) = problem.run(seed);
            let rep = to_rep(&problem, &theta)?;
            let residual = verify_representation(&rep, pair, cfg.tol)?.max_residual();
            let (r, _) = problem.evaluate(&theta, false);
            let norm_sq = rep.norm_sq();
            let min_generator_norm_sq = rep
                .t1
                .iter()
                .chain(&rep.t2)
                .map(|m| m.as_slice().iter().map(|x| x * x).sum::<f64>())
                .fold(f64::INFINITY, f64::min);
            let run = SeedRun {
                seed,
                residual,
                norm_sq,
                min_generator_norm_sq,
                objective: r.norm_squared(),
                iterations,
            };
            Ok((run, rep, norm_sq))
        })
        .collect();
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    let ok = |run: &SeedRun| {
        run.residual < cfg.tol && run.norm_sq >= cfg.min_norm_sq * (1.0 - 1e-9) && run.min_generator_norm_sq >= cfg.min_generator_norm_sq * (1.0 - 1e-9)
    };
    let successes = outcomes.iter().filter(|o| ok(&o.0)).count();
    let best = outcomes
        .iter()
        .min_by(|a, b| {
            ok(&b.0)
                .cmp(&ok(&a.0))
                .then(a.0.objective.total_cmp(&b.0.objective))
                .then(a.0.seed.cmp(&b.0.seed))
        })
        .expect("at least one seed");
    let (run, rep, _) = best.clone();
    Ok(SearchResult {
        d1,
        d2,
        success: ok(&run),
        residual: run.residual,
        norm_sq: run.norm_sq,
        objective: run.objective,
        iterations: run.iterations,
        seed: run.seed,
        successes,
        runs: outcomes.into_iter().map(|o| o.0).collect(),
        rep,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oscillator::{build_pair, resolve_params};
    use crate::superalgebra::hom_pair;

    #[test]
    fn jacobian_matches_finite_differences() {
        let pair = build_pair(&resolve_params(0.7, 1.9, -1.1).unwrap()).unwrap().pair;
        let p = Problem {
            pair: &pair,
            d1: 2,
            d2: 1,
            cfg: SearchConfig { min_norm_sq: 100.0, ..Default::default() },
        };
        let theta: Vec<f64> = (0..p.n_params()).map(|k| (k as f64 * 1.3).sin()).collect();
        let (_, j) = p.evaluate(&theta, true);
        let j = j.unwrap();
        let h = 1e-6;
        for k in 0..p.n_params() {
            let mut tp = theta.clone();
            let mut tm = theta.clone();
            tp[k] += h;
            tm[k] -= h;
            let fd = (p.evaluate(&tp, false).0 - p.evaluate(&tm, false).0) / (2.0 * h);
            assert!((fd - j.column(k)).amax() < 1e-6, "param {k}");
        }
    }

    #[test]
    fn recovers_hom_21() {
        let pair = hom_pair(2, 1).unwrap().to_f64();
        let cfg = SearchConfig { seeds: 8, ..Default::default() };
        let res = find_representation(&pair, 2, 1, &cfg).unwrap();
        assert!(res.success, "residual {}", res.residual);
        assert!(res.residual < 1e-10);
        let again = find_representation(&pair, 2, 1, &cfg).unwrap();
        assert_eq!(res.seed, again.seed);
        assert_eq!(res.rep, again.rep);
    }

    #[test]
    fn one_by_one_oscillator_subpair_fails() {
        let pair = build_pair(&resolve_params(1.0, 3.0, 3.0).unwrap()).unwrap().pair;
        let sub = pair.restrict(&[0, 1], &[0, 1]).unwrap();
        let cfg = SearchConfig { seeds: 8, ..Default::default() };
        let res = find_representation(&sub, 1, 1, &cfg).unwrap();
        assert!(!res.success);
        assert!(res.objective > 1e-3);
    }
}
