use super::tensor::BracketTensor;
use crate::error::{Error, Result};
use crate::report::{vec_residual, AxiomReport, ResidualTracker};
use crate::scalar::Scalar;

/// The composed bracket
/// `[X,Y] = 1/2([[X,Z]_a,Y]_b + [[X,Y]_a,Z]_b + [[Z,Y]_a,X]_b - (a <-> b))`.
pub fn diamond_bracket<S: Scalar>(a: &BracketTensor<S>, b: &BracketTensor<S>, z: &[S]) -> Result<BracketTensor<S>> {
    let n = a.dim();
    if b.dim() != n || z.len() != n {
        return Err(Error::dimension("diamond bracket", n, b.dim().max(z.len())));
    }
    let half = S::half();
    let e = |i: usize| {
        let mut v = vec![S::zero(); n];
        v[i] = S::one();
        v
    };
    let mut out = BracketTensor::zeros(n);
    for i in 0..n {
        let x = e(i);
        for j in 0..n {
            let y = e(j);
            let part = |p: &BracketTensor<S>, q: &BracketTensor<S>| -> Vec<S> {
                let t1 = q.apply(&p.apply(&x, z), &y);
                let t2 = q.apply(&p.apply(&x, &y), z);
                let t3 = q.apply(&p.apply(z, &y), &x);
                (0..n).map(|k| t1[k].clone() + t2[k].clone() + t3[k].clone()).collect()
            };
            let ab = part(a, b);
            let ba = part(b, a);
            for k in 0..n {
                out.set(i, j, k, half.clone() * (ab[k].clone() - ba[k].clone()));
            }
        }
    }
    Ok(out)
}

/// Antisymmetry and Jacobi for a single bracket.
pub fn is_lie<S: Scalar>(bracket: &BracketTensor<S>, tol: f64) -> AxiomReport {
    let mut report = AxiomReport::for_scalar::<S>("Lie bracket", tol);
    let n = bracket.dim();
    let lab = |ix: &[usize]| ix.iter().map(|i| format!("e{i}")).collect::<Vec<_>>();
    let mut anti = ResidualTracker::new("antisymmetry");
    for i in 0..n {
        for j in i..n {
            let d: Vec<S> = bracket
                .column(i, j)
                .iter()
                .zip(bracket.column(j, i))
                .map(|(x, y)| x.clone() + y.clone())
                .collect();
            anti.record(vec_residual(&d), &[i, j], || lab(&[i, j]));
        }
    }
    report.push(anti);
    let mut jac = ResidualTracker::new("jacobi");
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let r = jacobiator(bracket, i, j, k);
                jac.record(vec_residual(&r), &[i, j, k], || lab(&[i, j, k]));
            }
        }
    }
    report.push(jac);
    report
}

/// `[[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j]`.
pub fn jacobiator<S: Scalar>(b: &BracketTensor<S>, i: usize, j: usize, k: usize) -> Vec<S> {
    let n = b.dim();
    let e = |i: usize| {
        let mut v = vec![S::zero(); n];
        v[i] = S::one();
        v
    };
    let mut out = vec![S::zero(); n];
    for (p, q, r) in [(i, j, k), (j, k, i), (k, i, j)] {
        let t = b.apply(b.column(p, q), &e(r));
        for (o, v) in out.iter_mut().zip(t) {
            *o = o.clone() + v;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, Rational};

    fn so3() -> BracketTensor<Rational> {
        BracketTensor::from_fn(3, |i, j, k| {
            // Levi-Civita
            let s = ((j as i64 - i as i64) * (k as i64 - i as i64) * (k as i64 - j as i64)) / 2;
            int(s)
        })
    }

    #[test]
    fn levi_civita_is_lie() {
        assert!(is_lie(&so3(), 0.0).passed);
    }

    #[test]
    fn zero_second_bracket_gives_zero() {
        let z = vec![int(1), int(2), int(3)];
        let d = diamond_bracket(&so3(), &BracketTensor::zeros(3), &z).unwrap();
        assert!(d.is_zero());
        let d = diamond_bracket(&so3(), &so3(), &z).unwrap();
        assert!(d.is_zero());
    }

    #[test]
    fn non_lie_detected() {
        let mut b = so3();
        b.set(0, 1, 2, int(5));
        assert!(!is_lie(&b, 0.0).passed);
    }
}
