//! Kernel constructions: finite matrices and their lazy versions, grid
//! discretizations of a density, grid Metropolis-Hastings and Gibbs kernels,
//! the continuous ball walk, and dominated restrictions.

mod ball_walk;
mod density;
mod finite;
mod gibbs;
mod grid;
mod mh;
mod restrict;

pub use ball_walk::BallWalk;
pub use density::{DensityKind, DensitySpec};
pub use finite::{FiniteKernel, StateSet};
pub use gibbs::{gibbs_grid_kernel, GibbsTable};
pub use grid::{birth_death_chain, lazy_srw, GridStep};
pub use mh::{mh_grid_kernel, mh_grid_kernel_density};
pub use restrict::{restrict, DominatedKernel, Restriction, RestrictionVariant};
