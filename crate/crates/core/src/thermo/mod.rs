//! The thermoelastic problem: projection, modal solves, reconstruction and
//! diagnostics.

pub mod convergence;
pub mod diagnostics;
pub mod norms;
pub mod projection;
pub mod reconstruct;
pub mod solve;

pub use convergence::{convergence_study, ConvergenceEntry, ConvergenceReport};
pub use diagnostics::{continuous_dependence_check, residual_check, DependenceCheck, Residuals};
pub use projection::{project_data, ModalData};
pub use reconstruct::{reconstruct, FieldSolution};
pub use solve::{build_systems, classical_reference, solve_all, solve_mode};

use crate::model::ProblemSpec;
use crate::Result;

/// Solves the problem on its own output grids (`t ∈ [0, T]`).
pub fn simulate(spec: &ProblemSpec, parallel: bool) -> Result<FieldSolution> {
    let x_grid = spec.grids.x_grid(spec.l());
    let t_grid = spec.grids.t_grid(spec.horizon);
    simulate_on(spec, &x_grid, &t_grid, parallel)
}

/// Solves the problem and samples it on caller-chosen grids; `t_grid` may
/// reach back to `−τ` and must contain `0`.
pub fn simulate_on(
    spec: &ProblemSpec,
    x_grid: &[f64],
    t_grid: &[f64],
    parallel: bool,
) -> Result<FieldSolution> {
    let systems = build_systems(spec)?;
    let data = project_data(spec)?;
    let trajectories = solve_all(&systems, &data, spec.tau, t_grid, parallel)?;
    reconstruct(spec, trajectories, x_grid, t_grid)
}
