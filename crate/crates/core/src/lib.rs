//! Numerical laboratory for quantitative Trotter approximation.
//!
//! Discrete evolutions (random walks and magnetic transition operators on
//! lattices) are compared against their continuum semigroups, and the
//! measured sup-norm errors are checked against explicit a-priori bounds.
//!
//! Module map:
//! - [`grid`]: finitely supported lattice functions, stencil operators and
//!   discrete evolution (powers, Poisson smoothing, resolvents).
//! - [`lattice`]: constructors for the simple walk, the Harper operator and
//!   magnetic operators built from a linear vector potential.
//! - [`continuum`]: Hermite-Gaussian test functions, certified sup-norms,
//!   heat and constant-field magnetic semigroups, and a finite-difference
//!   reference solver.
//! - [`bounds`]: the computable right-hand sides of the rate estimate.
//! - [`crystal`]: quotient graphs of crystal lattices, invariant measures,
//!   harmonic realizations and limit covariances.
//! - [`lab`]: experiment configuration, runners, slope fits and reports.

pub mod bounds;
pub mod continuum;
pub mod crystal;
mod error;
pub mod grid;
pub mod lab;
pub mod lattice;
pub mod linalg;

pub use error::{Error, Result};
pub use num_complex::Complex64;
