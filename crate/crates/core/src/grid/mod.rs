//! Lattice functions and their discrete evolution.

mod evolve;
mod function;
mod stencil;

pub use evolve::{
    apply, discrete_generator, discrete_resolvent, discrete_resolvent_with, iterate, iterate_with, poisson_smooth,
    poisson_smooth_with, poisson_window, EvolveLimits,
};
pub use function::{embed, embed_radius, sample_scaled, sup_distance, Block, GridFunction, Interval};
pub use stencil::{PhaseFn, PhaseRule, StencilOperator};

pub(crate) use stencil::PROB_SUM_TOL;
