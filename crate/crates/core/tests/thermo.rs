use std::f64::consts::PI;

use delaytherm::linalg::CVec;
use delaytherm::model::{
    uniform_grid, validate_problem, DerivedCoefficients, PhysicalParameters, ProblemSpec,
    SpatialData, TemporalData,
};
use delaytherm::thermo::diagnostics::{continuous_dependence_check, dependence_norms};
use delaytherm::thermo::norms::x_norm;
use delaytherm::thermo::{
    build_systems, convergence_study, project_data, residual_check, simulate, simulate_on,
    solve_all,
};
use delaytherm::C64;

fn unit_spec(n_modes: usize, initial: SpatialData) -> ProblemSpec {
    ProblemSpec::new(PhysicalParameters::unit(), 0.1, 1.0, n_modes, initial).unwrap()
}

#[test]
fn initial_field_is_reproduced_and_traces_hold() {
    let coeffs = vec![[0.0, 0.3, -0.2], [1.0, 1.0, 1.0], [0.0, 0.0, 0.0], [-0.5, 0.25, 0.75]];
    let spec = validate_problem(unit_spec(6, SpatialData::Modal(coeffs.clone()))).unwrap();
    let field = simulate(&spec, false).unwrap();
    let basis = spec.basis();
    for (ix, &x) in field.x_grid.iter().enumerate() {
        let mut want = [0.0; 3];
        let mut u0 = 0.0;
        for (n, c) in coeffs.iter().enumerate() {
            let phi = basis.eval(n, x).unwrap();
            for k in 0..3 {
                want[k] += c[k] * phi[k];
            }
            u0 += c[1] * basis.cos_antiderivative(n, x);
        }
        let got = field.v_at(0, ix);
        for k in 0..3 {
            assert!((got[k] - want[k]).abs() < 1e-10);
        }
        assert!((field.u_at(0, ix) - u0).abs() < 1e-12);
        assert_eq!(field.theta_at(0, ix), got[2]);
    }
    let last = field.nx() - 1;
    for it in 0..field.nt() {
        assert!(field.v_at(it, 0)[0].abs() <= 1e-10);
        assert!(field.v_at(it, last)[0].abs() <= 1e-10);
    }
}

#[test]
fn displacement_is_static_without_velocity() {
    let spec = unit_spec(3, SpatialData::Modal(vec![[0.0, 0.7, 0.4]]));
    let field = simulate(&spec, false).unwrap();
    for it in 0..field.nt() {
        for ix in 0..field.nx() {
            assert_eq!(field.v_at(it, ix)[0], 0.0);
            assert_eq!(field.u_at(it, ix), field.u_at(0, ix));
        }
    }
}

#[test]
fn temperature_is_continuous_across_zero() {
    let spec = unit_spec(4, SpatialData::Modal(vec![[0.0, 0.0, 0.3], [1.0, -1.0, 0.5]]))
        .with_prehistory(TemporalData::modal(|n, t| match n {
            0 => [0.0, 0.0, 0.3 + t],
            1 => [1.0 + t * t, -1.0, 0.5 - t],
            _ => [0.0; 3],
        }));
    let spec = validate_problem(spec).unwrap();
    let x_grid = uniform_grid(0.0, PI, PI / 16.0);
    let field = simulate_on(&spec, &x_grid, &[-1e-12, 0.0, 1e-12], false).unwrap();
    for ix in 0..field.nx() {
        assert!((field.theta_at(0, ix) - field.theta_at(2, ix)).abs() < 1e-9);
    }
}

#[test]
fn modes_decouple() {
    let initial = SpatialData::Modal(vec![[0.0, 1.0, 0.5], [0.2, 0.3, 0.4], [1.0, 0.0, -1.0]]);
    let small = unit_spec(4, initial.clone())
        .with_forcing(TemporalData::modal(|n, t| [(n as f64 * t).cos(), 0.0, 0.1]));
    let mut large = small.clone();
    large.n_modes = 12;
    let t_grid = uniform_grid(0.0, 1.0, 0.05);
    let run = |spec: &ProblemSpec| {
        let systems = build_systems(spec).unwrap();
        let data = project_data(spec).unwrap();
        solve_all(&systems, &data, spec.tau, &t_grid, false).unwrap()
    };
    let (a, b) = (run(&small), run(&large));
    for n in 0..4 {
        assert_eq!(a[n].states, b[n].states);
    }
}

#[test]
fn truncation_does_not_change_low_mode_data() {
    let coeffs: Vec<[f64; 3]> = (0..=8)
        .map(|n| {
            let s = 1.0 / (1.0 + n as f64);
            [if n == 0 { 0.0 } else { s }, -s, 0.5 * s]
        })
        .collect();
    let physical = PhysicalParameters::unit();
    let reference = ProblemSpec::new(physical, 0.1, 1.0, 9, SpatialData::Modal(coeffs.clone())).unwrap();
    let basis = reference.basis();
    let data_fn = {
        let data = SpatialData::Modal(coeffs.clone());
        move |x: f64| delaytherm::thermo::projection::evaluate_spatial(&data, &basis, x)
    };
    for n_modes in [9, 12, 20] {
        let spec = ProblemSpec::new(physical, 0.1, 1.0, n_modes, SpatialData::evaluator(data_fn.clone()))
            .unwrap();
        let data = project_data(&spec).unwrap();
        let diff: Vec<CVec> = (0..n_modes)
            .map(|n| {
                let want = coeffs.get(n).copied().unwrap_or([0.0; 3]);
                CVec::from_iterator(3, (0..3).map(|k| C64::new(data.initial[n][k] - want[k], 0.0)))
            })
            .collect();
        assert!(x_norm(&diff, &spec.basis()) <= 1e-10, "N={n_modes}");
    }
}

#[test]
fn delay_error_is_first_order() {
    let spec = unit_spec(2, SpatialData::Modal(vec![[0.0; 3], [1.0, 1.0, 1.0]]));
    let mut spec = spec;
    spec.coeffs = DerivedCoefficients::new(1.0, 1.0, 1.0, 1.0);
    let report = convergence_study(&spec, &[0.2, 0.1, 0.05, 0.025], false).unwrap();
    let slope = report.slope.unwrap();
    assert!((0.85..=1.15).contains(&slope), "slope {slope}");
    for e in &report.entries {
        assert!(e.bound_holds, "{e:?}");
    }
}

/// Single-mode solution `V_1(t) = (sin 2t, cos t, e^{−t})` on `[−τ, T]` with
/// the forcing that makes it exact.
fn manufactured(tau: f64) -> ProblemSpec {
    let physical = PhysicalParameters::unit();
    let coeffs = delaytherm::model::derive_coefficients(&physical).unwrap();
    let b1 = delaytherm::modal::modal_matrix(1, &coeffs, physical.l).unwrap();
    let state = |t: f64| [(2.0 * t).sin(), t.cos(), (-t).exp()];
    let rate = |t: f64| [2.0 * (2.0 * t).cos(), -t.sin(), -(-t).exp()];
    let spec = ProblemSpec::new(physical, tau, 0.6, 2, SpatialData::Modal(vec![[0.0; 3], state(0.0)]))
        .unwrap()
        .with_prehistory(TemporalData::modal(move |n, t| if n == 1 { state(t) } else { [0.0; 3] }))
        .with_forcing(TemporalData::modal(move |n, t| {
            if n != 1 {
                return [0.0; 3];
            }
            let d = state(t - tau);
            let r = rate(t);
            std::array::from_fn(|k| r[k] + (0..3).map(|j| b1[(k, j)] * d[j]).sum::<f64>())
        }));
    validate_problem(spec).unwrap()
}

#[test]
fn manufactured_residuals_are_second_order() {
    let tau = 0.2;
    let spec = manufactured(tau);
    let run = |nx: usize, per_delay: usize| {
        let x_grid = uniform_grid(0.0, PI, PI / nx as f64);
        let t_grid = uniform_grid(-tau, 0.6, tau / per_delay as f64);
        let field = simulate_on(&spec, &x_grid, &t_grid, false).unwrap();
        residual_check(&field, &spec).unwrap()
    };
    let coarse = run(32, 10);
    let fine = run(64, 20);
    for (c, f) in [(coarse.res1, fine.res1), (coarse.res2, fine.res2), (coarse.res3, fine.res3)] {
        let ratio = c / f;
        assert!((2.8..=5.2).contains(&ratio), "ratio {ratio} ({c} / {f})");
    }
}

#[test]
fn wrong_delay_is_detected_by_the_residual() {
    let spec = manufactured(0.2);
    let x_grid = uniform_grid(0.0, PI, PI / 64.0);
    let t_grid = uniform_grid(-0.2, 0.6, 0.01);
    let field = simulate_on(&spec, &x_grid, &t_grid, false).unwrap();
    let good = residual_check(&field, &spec).unwrap();
    // same field and forcing, residual operator shifted by the wrong delay
    let mut other = spec.clone();
    other.tau = 0.1;
    let t_short: Vec<f64> = field.t_grid.iter().copied().filter(|&t| t >= -0.1 - 1e-12).collect();
    let skip = field.nt() - t_short.len();
    let mut shifted = field.clone();
    shifted.t_grid = t_short;
    shifted.v.drain(..skip * field.nx());
    let bad = residual_check(&shifted, &other).unwrap();
    assert!(bad.max() > 100.0 * good.max(), "{bad:?} vs {good:?}");
}

#[test]
fn coarse_grids_are_rejected() {
    let spec = manufactured(0.2);
    let field = simulate_on(&spec, &[0.0, 1.0, 2.0, 3.0], &uniform_grid(-0.2, 0.2, 0.1), false).unwrap();
    assert!(residual_check(&field, &spec).is_err());
}

#[test]
fn zero_problem_satisfies_dependence_inequality() {
    let spec = unit_spec(4, SpatialData::Zero);
    let systems = build_systems(&spec).unwrap();
    let data = project_data(&spec).unwrap();
    let t_grid = spec.grids.t_grid(spec.horizon);
    let tr = solve_all(&systems, &data, spec.tau, &t_grid, false).unwrap();
    let check = continuous_dependence_check(&dependence_norms(&systems, &data, &tr, &spec), spec.horizon, spec.tau);
    assert_eq!((check.lhs, check.rhs), (0.0, 0.0));
    assert!(check.satisfied);
}

#[test]
fn forcing_only_problem_satisfies_dependence_inequality() {
    let mut physical = PhysicalParameters::unit();
    physical.l = 40.0;
    let spec = ProblemSpec::new(physical, 0.1, 1.0, 2, SpatialData::Zero)
        .unwrap()
        .with_forcing(TemporalData::modal(|n, t| if n == 1 { [t.cos(), 0.5, -0.2] } else { [0.0; 3] }));
    let systems = build_systems(&spec).unwrap();
    let data = project_data(&spec).unwrap();
    let t_grid = spec.grids.t_grid(spec.horizon);
    let tr = solve_all(&systems, &data, spec.tau, &t_grid, false).unwrap();
    let norms = dependence_norms(&systems, &data, &tr, &spec);
    let check = continuous_dependence_check(&norms, spec.horizon, spec.tau);
    assert!(check.lhs > 0.0 && check.satisfied, "{check:?}");
}
