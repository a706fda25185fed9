//! Exact computations for homology stability of symplectic groups over
//! finite local rings: unimodular sequences and their complexes, the reduced
//! monoid ring and its limit calculus, group homology of small symplectic
//! groups, and Milnor and Milnor-Witt K-group presentations.

pub mod abelian;
pub mod admissible;
pub mod complexes;
pub mod error;
pub mod gamma;
pub mod group;
pub mod grouphomology;
pub mod homology;
pub mod intmatrix;
pub mod matrix;
pub mod module;
pub mod mwk;
pub mod monoidring;
pub mod ring;
pub mod rng;
pub mod sparse;
pub mod sphomology;
pub mod suites;
pub mod symplectic;
pub mod unimodular;

pub use error::{Error, Result};
