//! Shared fixtures for the benchmarks.

use isopair::classical::ClassicalState;
use isopair::oscillator::{build_pair, resolve_params, EpsilonParams};
use isopair::quantum::representation::{from_blocks, zero_extension};
use isopair::quantum::PairRepresentation;
use isopair::scalar::{int, Rational};
use isopair::{IsotopicPair, Matrix};

pub fn params() -> EpsilonParams<f64> {
    resolve_params(1.0, 3.0, 3.0).expect("generic couplings")
}

pub fn exact_pair() -> IsotopicPair<Rational> {
    build_pair(&resolve_params(int(1), int(3), int(3)).expect("generic couplings")).expect("pair").pair
}

pub fn initial_state() -> ClassicalState {
    ClassicalState::from_array([1.0, 0.0, 1.0, 0.0, 1.0, 1.0])
}

/// The `(2|1)` representation of the `{p,q},{a,b}` sub-pair, extended by zero.
pub fn sub_pair_rep() -> PairRepresentation<f64> {
    let u = vec![Matrix::unit(1, 2, 0, 0), Matrix::unit(1, 2, 0, 1)];
    let v = vec![Matrix::unit(2, 1, 0, 0).scale(&int(2)), Matrix::unit(2, 1, 1, 0).scale(&int(-2))];
    let sub = from_blocks(2, 1, &u, &v).expect("blocks");
    zero_extension(&sub, 3, 3, &[0, 1], &[0, 1]).expect("extension").to_f64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use isopair::quantum::verify_representation;

    #[test]
    fn fixtures_are_valid() {
        let rep = sub_pair_rep();
        assert!(verify_representation(&rep, &exact_pair().to_f64(), 1e-12).unwrap().passed);
    }
}
