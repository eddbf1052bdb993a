//! Numerical laboratory for ξ-submanifolds of Euclidean space: immersions
//! whose normal field H + x⊥ is parallel in the normal bundle.
//!
//! The crate certifies the defining equation on closed-form examples,
//! evaluates the weighted volume functionals with their first and second
//! variations, computes stability spectra in weighted L², and integrates the
//! planar ξ-curve ODE.

pub mod acceptance;
pub mod catalog;
pub mod cli;
pub mod config;
pub mod curves;
pub mod error;
pub mod fd;
pub mod fields;
pub mod functionals;
pub mod geometry;
pub mod immersion;
pub mod quadrature;
pub mod report;
pub mod stability;
pub mod xi;

pub use error::{Error, Result};
