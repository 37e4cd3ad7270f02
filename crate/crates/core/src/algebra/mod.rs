//! Isotopic pairs, their identities, and the derived triple systems.

pub mod alts;
pub mod axioms;
pub mod commutant;
pub mod diamond;
pub mod pair;
pub mod tensor;

pub use alts::{to_alts, verify_alts, AltsTensor};
pub use axioms::{verify_anti_jordan, verify_isotopic_pair};
pub use commutant::iso_commutant;
pub use diamond::{diamond_bracket, is_lie};
pub use pair::{IsotopicPair, PairDocument, Side};
pub use tensor::{BracketTensor, IsoTensor};
