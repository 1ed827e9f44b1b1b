//! Distance between delayed and classical solutions as `τ → 0`.

use std::f64::consts::E;

use crate::linalg::CVec;
use crate::model::{uniform_grid, ProblemSpec, TemporalData};
use crate::quadrature::GaussLegendre;
use crate::thermo::norms::{mode_x_inf_norm_sq, weighted_norm_sq, x_inf_norm, SERIES_TOL};
use crate::thermo::projection::project_data;
use crate::thermo::solve::{build_systems, classical_reference, solve_all};
use crate::{Error, Result};

/// Output time steps per delay in the study.
pub const STEPS_PER_DELAY: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceEntry {
    pub tau: f64,
    /// `max_t ‖V_τ(t) − V̄(t)‖` in the X norm.
    pub sup_error: f64,
    /// Same in the X∞ norm.
    pub sup_error_inf: f64,
    /// `τ e^T (‖V⁰‖∞ + (1+τ)‖V⁰_τ‖_{L¹(−τ,0;X∞)} + T ‖F‖_{L∞(0,T;X∞)})`.
    pub bound: f64,
    pub bound_holds: bool,
    /// X-norm sup error of each mode.
    pub per_mode: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub entries: Vec<ConvergenceEntry>,
    /// Least-squares slope of `log e` against `log τ`; `None` when an error
    /// vanishes.
    pub slope: Option<f64>,
    pub slope_inf: Option<f64>,
}

/// Least-squares slope through `(ln x, ln y)`; `None` unless every `y > 0`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 || xs.len() != ys.len() || ys.iter().any(|&y| !(y > 0.0) || !y.is_finite()) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

/// Runs the problem for every delay in `tau_list` (strictly decreasing, at
/// least three entries) with `dt = τ/20` and compares against the classical
/// solution on the same grid.
pub fn convergence_study(
    spec: &ProblemSpec,
    tau_list: &[f64],
    parallel: bool,
) -> Result<ConvergenceReport> {
    if tau_list.len() < 3 {
        return Err(Error::Input("tau_list needs at least three entries".into()));
    }
    if tau_list.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::Domain("tau must be > 0".into()));
    }
    if tau_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Input("tau_list must be strictly decreasing".into()));
    }
    if matches!(spec.prehistory, TemporalData::Sampled { .. }) {
        return Err(Error::Input(
            "sampled prehistory is tied to one delay; use a closed-form prehistory".into(),
        ));
    }
    let systems = build_systems(spec)?;
    let basis = spec.basis();
    let weights: Vec<[f64; 3]> = (0..spec.n_modes).map(|n| basis.component_weights(n)).collect();
    let mats: Vec<_> = systems.iter().map(|s| &s.matrix).collect();
    let xinf = |vals: &[CVec]| x_inf_norm(vals, &mats, &basis, SERIES_TOL);
    let t_final = spec.horizon;

    let mut entries = Vec::with_capacity(tau_list.len());
    for &tau in tau_list {
        let mut run = spec.clone();
        run.tau = tau;
        run.grids.dt = tau / STEPS_PER_DELAY as f64;
        let data = project_data(&run)?;
        let t_grid = uniform_grid(0.0, t_final, run.grids.dt);
        let delayed = solve_all(&systems, &data, tau, &t_grid, parallel)?;
        let classical = classical_reference(&systems, &data, &t_grid)?;

        let mut per_mode = vec![0.0f64; spec.n_modes];
        let (mut sup_x, mut sup_inf) = (0.0f64, 0.0f64);
        for i in 0..t_grid.len() {
            let (mut x_sq, mut inf_sq) = (0.0, 0.0);
            for n in 0..spec.n_modes {
                let diff = &delayed[n].states[i] - &classical[n].states[i];
                let e = weighted_norm_sq(&diff, &weights[n]);
                per_mode[n] = per_mode[n].max(e.sqrt());
                x_sq += e;
                inf_sq += mode_x_inf_norm_sq(&systems[n].matrix, &diff, &weights[n], SERIES_TOL);
            }
            sup_x = sup_x.max(x_sq.sqrt());
            sup_inf = sup_inf.max(inf_sq.sqrt());
        }

        let initial: Vec<CVec> = (0..spec.n_modes).map(|n| data.initial_vec(n)).collect();
        let history_l1 = GaussLegendre::order16().integrate_composite(-tau, 0.0, 4, |s| {
            let vals: Vec<CVec> = data.prehistory.iter().map(|p| p.eval(s, 3)).collect();
            xinf(&vals)
        });
        let forcing_sup = t_grid
            .iter()
            .map(|&t| {
                let vals: Vec<CVec> = data.forcing.iter().map(|f| f.eval(t, 3)).collect();
                xinf(&vals)
            })
            .fold(0.0, f64::max);
        let bound = tau
            * E.powf(t_final)
            * (xinf(&initial) + (1.0 + tau) * history_l1 + t_final * forcing_sup);
        entries.push(ConvergenceEntry {
            tau,
            sup_error: sup_x,
            sup_error_inf: sup_inf,
            bound,
            bound_holds: sup_inf <= bound,
            per_mode,
        });
    }
    let taus: Vec<f64> = entries.iter().map(|e| e.tau).collect();
    let errs: Vec<f64> = entries.iter().map(|e| e.sup_error).collect();
    let errs_inf: Vec<f64> = entries.iter().map(|e| e.sup_error_inf).collect();
    Ok(ConvergenceReport {
        slope: loglog_slope(&taus, &errs),
        slope_inf: loglog_slope(&taus, &errs_inf),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{PhysicalParameters, SpatialData};

    #[test]
    fn slope_of_exact_power_law() {
        let xs = [0.4, 0.2, 0.1];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powi(2)).collect();
        assert!((loglog_slope(&xs, &ys).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(loglog_slope(&xs, &[1.0, 0.0, 1.0]), None);
    }

    #[test]
    fn mode_zero_data_has_no_delay_error() {
        let spec = ProblemSpec::new(
            PhysicalParameters::unit(),
            0.1,
            1.0,
            3,
            SpatialData::Modal(vec![[0.0, 1.0, 2.0]]),
        )
        .unwrap();
        let r = convergence_study(&spec, &[0.2, 0.1, 0.05], false).unwrap();
        assert!(r.entries.iter().all(|e| e.sup_error == 0.0));
        assert_eq!(r.slope, None);
    }

    #[test]
    fn rejects_bad_delay_lists() {
        let spec = ProblemSpec::new(PhysicalParameters::unit(), 0.1, 1.0, 2, SpatialData::Zero).unwrap();
        assert!(convergence_study(&spec, &[0.1, 0.2, 0.05], false).is_err());
        assert!(convergence_study(&spec, &[0.2, 0.1], false).is_err());
    }
}
