//! Convection heat transfer between heated parallel plates, solved column by
//! column through binarized least squares.
//!
//! The finite-difference marching scheme in [`mesh`] turns the steady
//! channel-flow energy equation into one small banded linear system per
//! x-step. Each system is either solved directly ([`classical`]) or rewritten
//! as `‖A·s − b‖²` over fixed-point binary variables ([`qubo`]) and minimized
//! by exhaustive enumeration or by a warm-started QAOA statevector
//! simulation ([`qaoa`], [`optimizer`]). [`pipeline`] strings the steps
//! together and compares the two routes.

// Matrix code indexes rows and columns symmetrically.
#![allow(clippy::needless_range_loop)]

pub mod band;
pub mod classical;
pub mod error;
pub mod mesh;
pub mod optimizer;
pub mod pipeline;
pub mod qaoa;
pub mod qubo;

pub use classical::{march, solve_banded, TemperatureField};
pub use error::{Error, Result};
pub use mesh::{
    assemble_system, r_coefficient, velocity, InletProfile, MarchingSystem, Mesh, PhysicalParams,
};
pub use optimizer::{minimize, OptimizationTrace, OptimizerConfig};
pub use pipeline::{run, ComparisonReport, RunConfig, RunOutput, SolverMode};
pub use qaoa::{EnergyTable, QaoaParams, Statevector};
pub use qubo::{BitWeighting, IsingInstance, QuboInstance};
