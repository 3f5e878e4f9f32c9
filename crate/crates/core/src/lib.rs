//! Asymptotic-preserving IMEX Runge-Kutta solver for the one-dimensional
//! semiconductor Boltzmann equation written in even/odd parities.

pub mod boundary;
pub mod cli;
pub mod collision;
pub mod driver;
pub mod error;
pub mod field;
pub mod imex;
pub mod linalg;
pub mod quadrature;
pub mod refsolver;
pub mod scenarios;
pub mod spatial;

pub use error::{Error, Result};
