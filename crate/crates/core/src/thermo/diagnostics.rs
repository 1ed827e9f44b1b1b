//! PDE residuals and the continuous-dependence inequality.

use crate::delay_ode::Trajectory;
use crate::linalg::CVec;
use crate::modal::ModalSystem;
use crate::model::ProblemSpec;
use crate::quadrature::GaussLegendre;
use crate::thermo::norms::{x_inf_norm, SERIES_TOL};
use crate::thermo::projection::{evaluate_spatial, ModalData};
use crate::thermo::reconstruct::FieldSolution;
use crate::{Error, Result};

/// Largest absolute residual of each equation over the interior points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    pub res1: f64,
    pub res2: f64,
    pub res3: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.res1.max(self.res2).max(self.res3)
    }
}

fn uniform_step(grid: &[f64], what: &str) -> Result<f64> {
    if grid.len() < 2 {
        return Err(Error::Input(format!("{what} needs at least two points")));
    }
    let h = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
    if grid.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h) {
        return Err(Error::Input(format!("{what} must be uniform")));
    }
    Ok(h)
}

/// Central-difference residuals of
///
/// ```text
/// ∂t V¹ − a ∂x V²(t−τ) + b ∂x V³(t−τ) = F¹
/// ∂t V² −   ∂x V¹(t−τ)                = F²
/// ∂t V³ + d ∂x V¹(t−τ) − c ∂xx V³(t−τ) = F³
/// ```
///
/// at interior points with `t > 0`. The time grid must start at `−τ` with a
/// step dividing `τ`. Points `t = jτ`, where `V` has a kink in its second
/// time derivative, are skipped.
pub fn residual_check(field: &FieldSolution, spec: &ProblemSpec) -> Result<Residuals> {
    let tau = spec.tau;
    let dt = uniform_step(&field.t_grid, "t_grid")?;
    let dx = uniform_step(&field.x_grid, "x_grid")?;
    if (field.t_grid[0] + tau).abs() > 1e-9 * tau {
        return Err(Error::Input("t_grid must start at -tau".into()));
    }
    let m = (tau / dt).round() as usize;
    if m == 0 || (m as f64 * dt - tau).abs() > 1e-9 * tau {
        return Err(Error::Input("the time step must divide tau".into()));
    }
    let (nt, nx) = (field.nt(), field.nx());
    let times: Vec<usize> = (m + 1..nt.saturating_sub(1)).filter(|it| !(it - m).is_multiple_of(m)).collect();
    if nx < 7 || times.len() < 5 {
        return Err(Error::Input("grid too coarse: fewer than 5 interior points".into()));
    }

    let basis = spec.basis();
    let scale = spec.physical.forcing_scale();
    let crate::model::DerivedCoefficients { a, b, c, d } = spec.coeffs;
    let v = |it: usize, ix: usize| field.v_at(it, ix);
    let mut res = Residuals {
        res1: 0.0,
        res2: 0.0,
        res3: 0.0,
    };
    for &it in &times {
        let t = field.t_grid[it];
        let forcing = spec.forcing.at(t, spec.n_modes);
        let back = it - m;
        for ix in 1..nx - 1 {
            let f = evaluate_spatial(&forcing, &basis, field.x_grid[ix]);
            let f: [f64; 3] = std::array::from_fn(|k| f[k] * scale[k]);
            let dvdt: [f64; 3] =
                std::array::from_fn(|k| (v(it + 1, ix)[k] - v(it - 1, ix)[k]) / (2.0 * dt));
            let dvdx: [f64; 3] =
                std::array::from_fn(|k| (v(back, ix + 1)[k] - v(back, ix - 1)[k]) / (2.0 * dx));
            let d2v3 = (v(back, ix + 1)[2] - 2.0 * v(back, ix)[2] + v(back, ix - 1)[2]) / (dx * dx);
            let r1 = dvdt[0] - a * dvdx[1] + b * dvdx[2] - f[0];
            let r2 = dvdt[1] - dvdx[0] - f[1];
            let r3 = dvdt[2] + d * dvdx[0] - c * d2v3 - f[2];
            res.res1 = res.res1.max(r1.abs());
            res.res2 = res.res2.max(r2.abs());
            res.res3 = res.res3.max(r3.abs());
        }
    }
    Ok(res)
}

/// Both sides of
/// `sup_t ‖V(t)‖∞ ≤ e^T ‖V⁰‖∞ + τ e^T sup ‖V⁰_τ‖∞ + √T e^T ‖F‖_{L²(0,T;X∞)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DependenceCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

/// Norm ingredients of the continuous-dependence inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DependenceNorms {
    pub solution_sup: f64,
    pub initial: f64,
    pub history_sup: f64,
    pub forcing_l2: f64,
}

pub fn continuous_dependence_check(norms: &DependenceNorms, horizon: f64, tau: f64) -> DependenceCheck {
    let e = horizon.exp();
    let rhs = e * norms.initial + tau * e * norms.history_sup + horizon.sqrt() * e * norms.forcing_l2;
    let lhs = norms.solution_sup;
    DependenceCheck {
        lhs,
        rhs,
        satisfied: lhs <= rhs * (1.0 + 1e-12),
    }
}

/// Samples across `[−τ, 0]` used for the history supremum.
const HISTORY_SAMPLES: usize = 64;
/// Panels of the 16-point rule for the forcing `L²` norm.
const FORCING_PANELS: usize = 16;

/// Truncated X∞ norms of the data and of the delayed solution on its grid.
pub fn dependence_norms(
    systems: &[ModalSystem],
    data: &ModalData,
    trajectories: &[Trajectory],
    spec: &ProblemSpec,
) -> DependenceNorms {
    let basis = spec.basis();
    let mats: Vec<_> = systems.iter().map(|s| &s.matrix).collect();
    let norm = |vals: &[CVec]| x_inf_norm(vals, &mats, &basis, SERIES_TOL);
    let at = |t: f64, signals: &[crate::delay_ode::Signal]| -> Vec<CVec> {
        signals.iter().map(|s| s.eval(t, 3)).collect()
    };

    let n_times = trajectories.first().map_or(0, |t| t.times.len());
    let solution_sup = (0..n_times)
        .filter(|&i| trajectories[0].times[i] >= 0.0)
        .map(|i| {
            let vals: Vec<CVec> = trajectories.iter().map(|tr| tr.states[i].clone()).collect();
            norm(&vals)
        })
        .fold(0.0, f64::max);
    let initial: Vec<CVec> = (0..data.n_modes()).map(|n| data.initial_vec(n)).collect();
    let history_sup = (0..=HISTORY_SAMPLES)
        .map(|i| -spec.tau + spec.tau * i as f64 / HISTORY_SAMPLES as f64)
        .map(|s| norm(&at(s, &data.prehistory)))
        .fold(0.0, f64::max);
    let forcing_l2 = if data.forcing.iter().all(|f| f.is_zero()) {
        0.0
    } else {
        GaussLegendre::order16()
            .integrate_composite(0.0, spec.horizon, FORCING_PANELS, |t| {
                norm(&at(t, &data.forcing)).powi(2)
            })
            .sqrt()
    };
    DependenceNorms {
        solution_sup,
        initial: norm(&initial),
        history_sup,
        forcing_l2,
    }
}
