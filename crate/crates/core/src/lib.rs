//! Modified Borel summation of divergent asymptotic series at arbitrary precision, with the
//! anharmonic-oscillator machinery built on it: exact perturbative series, energy and coupling
//! resummation, boundary-condition tuning of eigenvalues, and location of the singularities that
//! limit the resummation.
//!
//! Layout: [`series`] generates exact rational coefficients, [`resum`] holds the summation kernels
//! and the alpha/lambda selection rules, [`spectrum`] turns them into energies, [`singularity`]
//! finds zeros and poles and corrects for them, and [`tables`] regenerates reference tables.
//!
//! The `parallel` feature (on by default) spreads independent kernel evaluations over rayon.

pub mod error;
pub mod exact;
pub mod gamma;
pub mod real;
pub mod series;

pub use error::{Error, Result};
pub use exact::ExactRational;
pub use real::BigReal;
pub mod par;
pub mod resum;
pub mod singularity;
pub mod spectrum;
pub mod tables;
