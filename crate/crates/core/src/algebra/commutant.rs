use crate::error::{Error, Result};
use crate::linalg::{independent_subset, nullspace, Matrix};
use crate::scalar::Scalar;

/// Basis of `{X : AXB - BXA lies in span(A) for all A, B in the span}`.
///
/// Membership in `span(generators)` is encoded by the rows of the annihilator
/// of the span, so the whole condition is one homogeneous linear system in
/// the entries of `X`.
pub fn iso_commutant<S: Scalar>(generators: &[Matrix<S>], tol: f64) -> Result<Vec<Matrix<S>>> {
    let first = generators
        .first()
        .ok_or_else(|| Error::Precondition("iso-commutant of an empty generator list".into()))?;
    let d = first.rows();
    if generators.iter().any(|g| g.rows() != d || g.cols() != d) {
        return Err(Error::Precondition("generators must be square of equal size".into()));
    }
    let flat: Vec<Vec<S>> = generators.iter().map(|g| g.as_slice().to_vec()).collect();
    let keep = independent_subset(&flat, tol);
    let basis: Vec<&Matrix<S>> = keep.iter().map(|&i| &generators[i]).collect();
    let span_rows = Matrix::from_rows(keep.iter().map(|&i| flat[i].clone()).collect())?;
    let annihilator = nullspace(&span_rows, tol);
    if annihilator.is_empty() {
        return Ok((0..d * d).map(|k| Matrix::unit(d, d, k / d, k % d)).collect());
    }

    let n = d * d;
    let mut rows: Vec<Vec<S>> = Vec::new();
    for (ai, a) in basis.iter().enumerate() {
        for b in basis.iter().skip(ai + 1) {
            // column k of the constraint block is the image of the unit matrix E_k
            let images: Vec<Vec<S>> = (0..n)
                .map(|k| {
                    let e = Matrix::unit(d, d, k / d, k % d);
                    Matrix::product(&[a, &e, b]).sub(&Matrix::product(&[b, &e, a])).into_vec()
                })
                .collect();
            for w in &annihilator {
                rows.push(
                    images
                        .iter()
                        .map(|img| {
                            img.iter()
                                .zip(w)
                                .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
                        })
                        .collect(),
                );
            }
        }
    }
    if rows.is_empty() {
        return Ok((0..n).map(|k| Matrix::unit(d, d, k / d, k % d)).collect());
    }
    let system = Matrix::from_rows(rows)?;
    nullspace(&system, tol)
        .into_iter()
        .map(|v| Matrix::from_row_major(d, d, v))
        .collect()
}

/// Largest residual of `AXB - BXA` outside `span(generators)` over basis
/// elements `A, B` of the generators and `X` of `candidates`.
pub fn commutant_residual<S: Scalar>(generators: &[Matrix<S>], candidates: &[Matrix<S>], tol: f64) -> Result<f64> {
    let flat: Vec<Vec<S>> = generators.iter().map(|g| g.as_slice().to_vec()).collect();
    let keep = independent_subset(&flat, tol);
    let solver = crate::linalg::SpanSolver::new(keep.iter().map(|&i| flat[i].clone()).collect(), tol)?;
    let mut worst = 0.0f64;
    for a in generators {
        for b in generators {
            for x in candidates {
                let v = Matrix::product(&[a, x, b]).sub(&Matrix::product(&[b, x, a]));
                let (_, r) = solver.solve_with_residual(v.as_slice());
                worst = worst.max(r);
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn full_algebra_is_its_own_commutant() {
        let gens: Vec<Matrix<Rational>> = (0..4).map(|k| Matrix::unit(2, 2, k / 2, k % 2)).collect();
        assert_eq!(iso_commutant(&gens, 0.0).unwrap().len(), 4);
    }

    #[test]
    fn empty_generators_rejected() {
        assert!(iso_commutant::<Rational>(&[], 0.0).is_err());
    }

    #[test]
    fn upper_triangular_commutant_is_closed() {
        let gens = vec![Matrix::<Rational>::unit(2, 2, 0, 1)];
        let comm = iso_commutant(&gens, 0.0).unwrap();
        assert_eq!(comm.len(), 4);
        assert_eq!(commutant_residual(&gens, &comm, 0.0).unwrap(), 0.0);
    }
}
