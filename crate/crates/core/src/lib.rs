//! Exact Hodge data of irreducible hypergeometric D-modules on 𝔾_m.
//!
//! Two engines compute the same [`HodgeProfile`]: a closed-form
//! combinatorial one ([`closed_form`]) and an inductive one that peels
//! rank-one factors off with middle multiplicative convolution
//! ([`recursion`]). [`sweep`] cross-checks them over many parameter sets.

pub mod closed_form;
pub mod combinatorics;
pub mod convolution;
pub mod error;
pub mod numbers;
pub mod params;
pub mod profile;
pub mod recursion;
pub mod sweep;
pub mod table;

pub use error::{Error, Result};
pub use numbers::{GammaRep, Rational, Residue};
pub use params::HypergeometricParams;
pub use profile::HodgeProfile;
pub use table::{LocalHodgeTable, SingularPoint, TableKind};
