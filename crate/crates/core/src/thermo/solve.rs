//! Per-mode delayed and classical solves.

use rayon::prelude::*;

use crate::delay_ode::{solve_closed_form_with, solve_duhamel, DelayIvp, SolverPath, Trajectory};
use crate::modal::ModalSystem;
use crate::model::ProblemSpec;
use crate::thermo::projection::ModalData;
use crate::{Error, Result};

/// Modal systems `0..n_modes` of the problem.
pub fn build_systems(spec: &ProblemSpec) -> Result<Vec<ModalSystem>> {
    (0..spec.n_modes)
        .map(|n| ModalSystem::build(n, &spec.coeffs, spec.l()))
        .collect()
}

fn horizon_of(t_grid: &[f64], tau: f64) -> f64 {
    t_grid.iter().copied().fold(tau, f64::max)
}

/// Solves `V̇_n + B_n V_n(t − τ) = F_n` in closed form on `t_grid`.
pub fn solve_mode(
    n: usize,
    sys: &ModalSystem,
    data: &ModalData,
    tau: f64,
    t_grid: &[f64],
) -> Result<Trajectory> {
    if sys.n != n || n >= data.n_modes() {
        return Err(Error::Input(format!("no system or data for mode {n}")));
    }
    let ivp = DelayIvp::new(
        sys.matrix.clone(),
        tau,
        data.initial_vec(n),
        data.prehistory[n].clone(),
        data.forcing[n].clone(),
        horizon_of(t_grid, tau),
    )?;
    let kernel = sys.kernel(tau)?;
    let path = if sys.diagonalizable {
        SolverPath::ClosedFormDiagonal
    } else {
        SolverPath::ClosedFormDirect
    };
    solve_closed_form_with(&ivp, kernel.as_ref(), path, t_grid)
}

/// All modes, in ascending order. With `parallel` the modes are solved on
/// the rayon pool; the result is identical either way.
pub fn solve_all(
    systems: &[ModalSystem],
    data: &ModalData,
    tau: f64,
    t_grid: &[f64],
    parallel: bool,
) -> Result<Vec<Trajectory>> {
    let one = |sys: &ModalSystem| solve_mode(sys.n, sys, data, tau, t_grid);
    if parallel {
        systems.par_iter().map(one).collect()
    } else {
        systems.iter().map(one).collect()
    }
}

/// Classical (`τ = 0`) trajectories by Duhamel's formula with the ordinary
/// matrix exponential.
pub fn classical_reference(
    systems: &[ModalSystem],
    data: &ModalData,
    t_grid: &[f64],
) -> Result<Vec<Trajectory>> {
    systems
        .iter()
        .map(|sys| solve_duhamel(&sys.matrix, &data.initial_vec(sys.n), &data.forcing[sys.n], t_grid))
        .collect()
}
