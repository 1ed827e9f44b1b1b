//! Space-time reconstruction of `V`, `u` and `θ` from modal trajectories.

use crate::delay_ode::Trajectory;
use crate::linalg::CompensatedSum;
use crate::model::ProblemSpec;
use crate::{Error, Result, C64};

/// Fields sampled on `t_grid × x_grid`, stored row-major in time.
#[derive(Debug, Clone)]
pub struct FieldSolution {
    pub x_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    /// `(∂t u, ∂x u, θ)` at each sample.
    pub v: Vec<[f64; 3]>,
    pub u: Vec<f64>,
    pub theta: Vec<f64>,
    pub trajectories: Vec<Trajectory>,
}

impl FieldSolution {
    pub fn nx(&self) -> usize {
        self.x_grid.len()
    }

    pub fn nt(&self) -> usize {
        self.t_grid.len()
    }

    pub fn index(&self, it: usize, ix: usize) -> usize {
        it * self.x_grid.len() + ix
    }

    pub fn v_at(&self, it: usize, ix: usize) -> [f64; 3] {
        self.v[self.index(it, ix)]
    }

    pub fn u_at(&self, it: usize, ix: usize) -> f64 {
        self.u[self.index(it, ix)]
    }

    pub fn theta_at(&self, it: usize, ix: usize) -> f64 {
        self.theta[self.index(it, ix)]
    }
}

/// Imaginary parts above this (relative to the field magnitude) indicate an
/// inconsistent eigen-path.
pub const IMAGINARY_TOL: f64 = 1e-10;

/// Sums `V_n(t) Φ_n(x)` over ascending `n` with compensated accumulation,
/// rebuilds `u` from `u⁰` and a trapezoid rule in time, and sets `θ = V³`.
/// `t_grid` must contain `t = 0`.
pub fn reconstruct(
    spec: &ProblemSpec,
    trajectories: Vec<Trajectory>,
    x_grid: &[f64],
    t_grid: &[f64],
) -> Result<FieldSolution> {
    if trajectories.len() != spec.n_modes {
        return Err(Error::Input("one trajectory per retained mode is required".into()));
    }
    if trajectories.iter().any(|tr| tr.times != t_grid) {
        return Err(Error::Input("trajectories are not sampled on t_grid".into()));
    }
    let i0 = t_grid
        .iter()
        .position(|&t| t == 0.0)
        .ok_or_else(|| Error::Input("t_grid must contain t = 0".into()))?;
    let basis = spec.basis();
    let l = basis.l();
    if x_grid.iter().any(|&x| x < -1e-12 * l || x > l * (1.0 + 1e-12)) {
        return Err(Error::Domain("x_grid must lie in [0, l]".into()));
    }
    let phi: Vec<Vec<[f64; 3]>> = (0..spec.n_modes)
        .map(|n| x_grid.iter().map(|&x| basis.eval_unchecked(n, x)).collect())
        .collect();

    let (nt, nx) = (t_grid.len(), x_grid.len());
    let mut v = vec![[0.0; 3]; nt * nx];
    let mut max_abs = 0.0f64;
    let mut max_imag = 0.0f64;
    for it in 0..nt {
        for ix in 0..nx {
            let mut out = [0.0; 3];
            for k in 0..3 {
                let mut acc = CompensatedSum::default();
                for (n, tr) in trajectories.iter().enumerate() {
                    acc.add(tr.states[it][k] * C64::new(phi[n][ix][k], 0.0));
                }
                let z = acc.value();
                max_abs = max_abs.max(z.re.abs());
                max_imag = max_imag.max(z.im.abs());
                out[k] = z.re;
            }
            v[it * nx + ix] = out;
        }
    }
    if !(max_imag <= IMAGINARY_TOL * (1.0 + max_abs)) {
        return Err(Error::Numeric(format!(
            "reconstructed field has imaginary part {max_imag:.3e}"
        )));
    }

    let u0: Vec<f64> = x_grid
        .iter()
        .map(|&x| {
            let mut acc = CompensatedSum::default();
            for (n, tr) in trajectories.iter().enumerate() {
                acc.add(tr.states[i0][1] * C64::new(basis.cos_antiderivative(n, x), 0.0));
            }
            acc.value().re
        })
        .collect();
    let mut u = vec![0.0; nt * nx];
    u[i0 * nx..(i0 + 1) * nx].copy_from_slice(&u0);
    for it in i0 + 1..nt {
        let h = t_grid[it] - t_grid[it - 1];
        for ix in 0..nx {
            u[it * nx + ix] = u[(it - 1) * nx + ix]
                + 0.5 * h * (v[(it - 1) * nx + ix][0] + v[it * nx + ix][0]);
        }
    }
    for it in (0..i0).rev() {
        let h = t_grid[it + 1] - t_grid[it];
        for ix in 0..nx {
            u[it * nx + ix] = u[(it + 1) * nx + ix]
                - 0.5 * h * (v[(it + 1) * nx + ix][0] + v[it * nx + ix][0]);
        }
    }
    let theta = v.iter().map(|s| s[2]).collect();
    Ok(FieldSolution {
        x_grid: x_grid.to_vec(),
        t_grid: t_grid.to_vec(),
        v,
        u,
        theta,
        trajectories,
    })
}
