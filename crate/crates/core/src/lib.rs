//! Isotopic pairs, anti-Lie triple systems and Lie superalgebras, with the
//! classical and quantum dynamics of the coupled oscillator model.

pub mod algebra;
pub mod bunches;
pub mod classical;
pub mod errata;
pub mod error;
pub mod linalg;
pub mod ode;
pub mod oscillator;
pub mod quantum;
pub mod report;
pub mod scalar;
pub mod superalgebra;

pub use algebra::{IsotopicPair, Side};
pub use error::{Error, Result};
pub use linalg::Matrix;
pub use report::AxiomReport;
pub use scalar::{Rational, Scalar};
