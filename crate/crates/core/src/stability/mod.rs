//! Stability operators, the quadratic form Q, weighted Galerkin spectra,
//! the Hermite apparatus on planes and the sphere index.

pub mod form;
pub mod hermite;
pub mod identities;
pub mod index;
pub mod operator;
pub mod spectrum;
pub mod witness;

pub use operator::{OperatorMode, StabilityOperator};
