//! Continuum side: test functions, limit generators and their semigroups.

mod generator;
pub mod quadrature;
mod reference;
mod semigroup;
mod seminorm;
mod test_function;

pub use generator::{generator_apply, resolvent_argument, semigroup_generator_apply, GeneratorKind, GeneratorSpec};
pub use reference::{dense_reference, fd_operator, RefGrid, ReferenceSolution, DENSE_LIMIT};
pub use semigroup::{heat_evolve, magnetic_evolve, HeatEvolution, MagneticEvolution, KERNEL_VALIDATION_LIMIT};
pub use seminorm::{sup_norm, third_seminorm, SUP_REL_ACCURACY};
pub use test_function::{Term, TestFunction, MAX_DERIVATIVE_ORDER};
