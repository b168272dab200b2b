//! Numerical laboratory for the value distribution of the argument of the
//! Riemann zeta function on the critical line.

pub mod dirichlet;
pub mod error;
pub mod primes;
pub mod quad;
pub mod report;
pub mod selftest;
pub mod series;
pub mod signapprox;
pub mod specfun;
pub mod valuedist;
pub mod zetaline;

pub use error::{Error, Result};
