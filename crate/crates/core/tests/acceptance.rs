//! Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero when
//! any criterion fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector, Matrix3};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use delaytherm::delay_ode::{solve_closed_form, solve_method_of_steps, trajectory_distance, DelayIvp, Signal};
use delaytherm::delayed_exp::{delayed_exp_matrix_direct, delayed_exp_scalar, step_differences};
use delaytherm::modal::{cubic_eigenvalues, FourierBasis, ModalSystem};
use delaytherm::model::{
    derive_coefficients, uniform_grid, DerivedCoefficients, PhysicalParameters, ProblemSpec,
    SpatialData, TemporalData,
};
use delaytherm::thermo::{build_systems, convergence_study, project_data, residual_check, simulate_on, solve_all};

type CMat = DMatrix<C64>;
type CVec = DVector<C64>;

struct Outcome {
    id: &'static str,
    title: &'static str,
    passed: bool,
    detail: String,
}

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn fro(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn random_matrix(rng: &mut ChaCha8Rng, d: usize, norm: f64) -> CMat {
    let m = CMat::from_fn(d, d, |_, _| c(rng.gen_range(-1.0..1.0)));
    let f = fro(&m);
    m * c(norm / f)
}

/// Largest entry-wise distance after the best pairing of two 3-sets.
fn set_gap(a: &[C64], b: &[C64]) -> f64 {
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    perms
        .iter()
        .map(|p| (0..3).map(|i| (a[i] - b[p[i]]).norm()).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min)
}

/// `Σ_k ‖B^k v‖²_w / k!` summed until the terms are negligible.
fn xinf_sq(b: &CMat, v: &CVec, w: &[f64; 3]) -> f64 {
    let wn = |x: &CVec| (0..3).map(|k| w[k] * x[k].norm_sqr()).sum::<f64>();
    let mut term_vec = v.clone();
    let mut sum = wn(&term_vec);
    let mut k: f64 = 1.0;
    while k < 400.0 {
        term_vec = (b * term_vec) / c(k.sqrt());
        let t = wn(&term_vec);
        sum += t;
        if t < 1e-18 * sum {
            break;
        }
        k += 1.0;
    }
    sum
}

fn c1_definition() -> Outcome {
    let start = Instant::now();
    let cases = [
        (5.0, 1.0, -2.0, 0.0),
        (1.0, 1.0, -1.0, 1.0),
        (1.0, 1.0, -0.5, 1.0),
        (1.0, 1.0, 0.0, 1.0),
        (1.0, 1.0, 1.0, 2.0),
        (1.0, 1.0, 2.0, 3.5),
    ];
    let worst = cases
        .iter()
        .map(|&(l, tau, t, want)| (delayed_exp_scalar(c(l), tau, t).unwrap() - c(want)).norm())
        .fold(0.0, f64::max);
    let elapsed = start.elapsed();
    Outcome {
        id: "1",
        title: "delayed exponential definition values",
        passed: worst <= 1e-14 && elapsed < Duration::from_secs(1),
        detail: format!("max error {worst:.2e} (limit 1e-14), {elapsed:?} (limit 1 s)"),
    }
}

fn c2_derivative(rng: &mut ChaCha8Rng) -> Outcome {
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let norm = rng.gen_range(0.1..2.0);
        let m = random_matrix(rng, 3, norm);
        let tau = rng.gen_range(0.2..1.0);
        for i in 0..50 {
            // interior points of (kτ, (k+1)τ), k = -1..3, away from the kinks
            let k = (i % 5) as f64 - 1.0;
            let t = tau * (k + 0.02 + 0.96 * (i / 5) as f64 / 9.0);
            let fd = (delayed_exp_matrix_direct(&m, tau, t + h).unwrap()
                - delayed_exp_matrix_direct(&m, tau, t - h).unwrap())
                / c(2.0 * h);
            let exact = &m * delayed_exp_matrix_direct(&m, tau, t - tau).unwrap();
            worst = worst.max(fro(&(fd - &exact)) / fro(&exact).max(1e-300));
        }
    }
    Outcome {
        id: "2",
        title: "derivative identity d/dt exp_tau(M,t) = M exp_tau(M,t-tau)",
        passed: worst <= 1e-6,
        detail: format!("max relative error {worst:.2e} (limit 1e-6)"),
    }
}

fn c3_similarity(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let s = random_matrix(rng, 3, 1.0) + CMat::identity(3, 3) * c(rng.gen_range(0.8..2.0));
        let s_inv = s.clone().try_inverse().unwrap();
        let kappa = fro(&s) * fro(&s_inv);
        let norm = rng.gen_range(0.1..2.0);
        let m = random_matrix(rng, 3, norm);
        let tau = rng.gen_range(0.1..1.0);
        let conj = &s * &m * &s_inv;
        for i in 0..=30 {
            let t = -tau + 4.0 * i as f64 / 30.0;
            let lhs = &s * delayed_exp_matrix_direct(&m, tau, t).unwrap() * &s_inv;
            let rhs = delayed_exp_matrix_direct(&conj, tau, t).unwrap();
            worst = worst.max(fro(&(lhs - &rhs)) / (kappa * fro(&rhs)));
        }
    }
    Outcome {
        id: "3",
        title: "similarity invariance",
        passed: worst <= 1e-11,
        detail: format!("max gap / (kappa(S) |exp|) {worst:.2e} (limit 1e-11)"),
    }
}

fn c4_method_of_steps(rng: &mut ChaCha8Rng) -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for case in 0..100 {
        let d = if case % 2 == 0 { 1 } else { 3 };
        let norm = rng.gen_range(0.1..3.0);
        let m = random_matrix(rng, d, norm);
        let tau = rng.gen_range(0.1..1.0);
        let x0 = CVec::from_fn(d, |_, _| c(rng.gen_range(-1.0..1.0)));
        let drift = CVec::from_fn(d, |_, _| c(rng.gen_range(-1.0..1.0)));
        let (p0, p1) = (x0.clone(), drift.clone());
        let prehistory = Signal::function(move |t| &p0 + &p1 * c(t));
        let freq = rng.gen_range(0.5..3.0);
        let forcing = Signal::function(move |t| CVec::from_element(d, c((freq * t).cos())));
        let ivp = DelayIvp::new(m, tau, x0, prehistory, forcing, 5.0 * tau).unwrap();
        let grid = uniform_grid(0.0, 5.0 * tau, tau / 10.0);
        let closed = solve_closed_form(&ivp, &grid).unwrap();
        let steps = solve_method_of_steps(&ivp, &grid, tau / 200.0).unwrap();
        worst = worst.max(trajectory_distance(&closed, &steps).unwrap() / (1.0 + closed.max_norm()));
    }
    let elapsed = start.elapsed();
    Outcome {
        id: "4",
        title: "closed form vs method of steps",
        passed: worst <= 1e-7 && elapsed < Duration::from_secs(30),
        detail: format!("max scaled distance {worst:.2e} (limit 1e-7), {elapsed:.1?} (limit 30 s)"),
    }
}

fn c5_eigenvalues(rng: &mut ChaCha8Rng) -> Outcome {
    let (mut gap, mut sym): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let (a, b, cc, d) = (
            rng.gen_range(0.1..3.0),
            rng.gen_range(0.1..3.0),
            rng.gen_range(0.1..3.0),
            rng.gen_range(0.1..3.0),
        );
        let n = rng.gen_range(1..=10);
        let nu = n as f64;
        let mu = cubic_eigenvalues(n, &DerivedCoefficients::new(a, b, cc, d), PI).unwrap();
        // companion matrix of μ³ − cν²μ² + (a+bd)ν²μ − acν⁴
        let (p2, p1, p0) = (-cc * nu * nu, (a + b * d) * nu * nu, -a * cc * nu.powi(4));
        let comp = Matrix3::new(0.0, 0.0, -p0, 1.0, 0.0, -p1, 0.0, 1.0, -p2);
        let oracle = comp.complex_eigenvalues();
        gap = gap.max(set_gap(&mu, oracle.as_slice()));
        let trace = mu[0] + mu[1] + mu[2];
        let pairs = mu[0] * mu[1] + mu[0] * mu[2] + mu[1] * mu[2];
        let product = mu[0] * mu[1] * mu[2];
        for (got, want) in [(trace, -p2), (pairs, p1), (product, -p0)] {
            sym = sym.max((got - c(want)).norm() / want.abs());
        }
    }
    Outcome {
        id: "5",
        title: "Cardano eigenvalues vs companion oracle",
        passed: gap <= 1e-9 && sym <= 1e-10,
        detail: format!("set gap {gap:.2e} (limit 1e-9), symmetric functions {sym:.2e} (limit 1e-10)"),
    }
}

fn c6_eigenvectors(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst: f64 = 0.0;
    for set in 0..20 {
        let b = match set {
            0 => 0.0,
            1 => 1e-13,
            2 => 1e-8,
            _ => rng.gen_range(0.1..3.0),
        };
        let k = DerivedCoefficients::new(rng.gen_range(0.1..3.0), b, rng.gen_range(0.1..3.0), rng.gen_range(0.1..3.0));
        let l = rng.gen_range(0.5..4.0);
        for n in 0..=32 {
            let sys = ModalSystem::build(n, &k, l).unwrap();
            let bn = fro(&sys.matrix).max(f64::MIN_POSITIVE);
            for (j, mu) in sys.eigenvalues.iter().enumerate() {
                let v = sys.s.column(j).into_owned();
                let r = ((CMat::identity(3, 3) * *mu - &sys.matrix) * v).norm();
                worst = worst.max(if n == 0 { r } else { r / bn });
            }
        }
    }
    Outcome {
        id: "6",
        title: "eigenvector residuals incl. b -> 0",
        passed: worst <= 1e-10,
        detail: format!("max |(mu I - B_n) v| / |B_n| {worst:.2e} (limit 1e-10)"),
    }
}

fn c7a_classical_gap(rng: &mut ChaCha8Rng) -> Outcome {
    let horizon: f64 = 2.0;
    let grid = uniform_grid(0.0, horizon, 0.01);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let norm = rng.gen_range(0.1..1.0);
        let m = random_matrix(rng, 3, norm);
        let neg = -&m;
        for tau in [0.5, 0.2, 0.1] {
            for &t in &grid {
                let delayed = delayed_exp_matrix_direct(&neg, tau, t - tau).unwrap();
                let classical = (&neg * c(t)).exp();
                worst = worst.max(fro(&(delayed - classical)) / (tau * horizon.exp()));
            }
        }
    }
    Outcome {
        id: "7a",
        title: "|exp_tau(-M,t-tau) - exp(-Mt)| <= tau e^T",
        passed: worst <= 1.0,
        detail: format!("max gap / (tau e^T) {worst:.3} (limit 1)"),
    }
}

fn c7b_step_difference(rng: &mut ChaCha8Rng) -> Outcome {
    let (mut literal, mut newest): (f64, f64) = (0.0, 0.0);
    for _ in 0..20 {
        let norm = rng.gen_range(0.1..1.0);
        let m = random_matrix(rng, 3, norm);
        for tau in [0.5, 0.2, 0.1] {
            for row in step_differences(&m, tau, 6, 32).unwrap() {
                literal = literal.max(row.shift_difference / row.bound);
                newest = newest.max(row.newest_term / row.bound);
            }
        }
    }
    Outcome {
        id: "7b",
        title: "|exp_tau(M,t) - exp_tau(M,t-tau)| <= tau^(k+1)/(k+1)!, k <= 6",
        passed: literal <= 1.0,
        detail: format!(
            "max ratio {literal:.3e} (limit 1); newest polynomial term alone: max ratio {newest:.3} (limit 1)"
        ),
    }
}

fn c8_order(rng: &mut ChaCha8Rng) -> Outcome {
    let _ = rng;
    let mut spec = ProblemSpec::new(
        PhysicalParameters::unit(),
        0.1,
        1.0,
        2,
        SpatialData::Modal(vec![[0.0; 3], [1.0, 1.0, 1.0]]),
    )
    .unwrap();
    spec.coeffs = DerivedCoefficients::new(1.0, 1.0, 1.0, 1.0);
    let taus = [0.2, 0.1, 0.05, 0.025];
    let report = convergence_study(&spec, &taus, false).unwrap();

    // independent route: method of steps against the matrix exponential
    let b = CMat::from_row_slice(3, 3, &[0.0, 1.0, -1.0, -1.0, 0.0, 0.0, 1.0, 0.0, 1.0].map(c));
    let w = [1.0 / 3.0; 3];
    let v0 = CVec::from_element(3, c(1.0));
    let mut oracle_err = Vec::new();
    let mut bound_ok = true;
    let mut worst_bound: f64 = 0.0;
    for &tau in &taus {
        let ivp = DelayIvp::new(b.clone(), tau, v0.clone(), Signal::Constant(v0.clone()), Signal::Zero, 1.0).unwrap();
        let grid = uniform_grid(0.0, 1.0, tau / 20.0);
        let steps = solve_method_of_steps(&ivp, &grid, tau / 400.0).unwrap();
        let (mut e_x, mut e_inf): (f64, f64) = (0.0, 0.0);
        for (t, x) in grid.iter().zip(&steps.states) {
            let diff = x - (&b * c(-t)).exp() * &v0;
            e_x = e_x.max((0..3).map(|k| w[k] * diff[k].norm_sqr()).sum::<f64>().sqrt());
            e_inf = e_inf.max(xinf_sq(&b, &diff, &w).sqrt());
        }
        let data = xinf_sq(&b, &v0, &w).sqrt();
        let bound = tau * 1f64.exp() * (data + (1.0 + tau) * tau * data);
        bound_ok &= e_inf <= bound;
        worst_bound = worst_bound.max(e_inf / bound);
        oracle_err.push(e_x);
    }
    let agree = report
        .entries
        .iter()
        .zip(&oracle_err)
        .map(|(e, o)| (e.sup_error - o).abs() / o)
        .fold(0.0, f64::max);
    let slope = report.slope.unwrap_or(f64::NAN);
    let lib_bound = report.entries.iter().all(|e| e.bound_holds);
    Outcome {
        id: "8",
        title: "O(tau) convergence to the classical solution",
        passed: (0.85..=1.15).contains(&slope) && bound_ok && lib_bound && agree <= 1e-6,
        detail: format!(
            "slope {slope:.4} (band [0.85, 1.15]); bound ratio {worst_bound:.3} (limit 1); \
             library vs oracle errors {agree:.1e}"
        ),
    }
}

/// Exact single-mode solution `V_1(t) = (sin 2t, cos t, e^{-t})` and its spec.
fn manufactured(tau: f64) -> (ProblemSpec, impl Fn(f64, f64) -> [f64; 3]) {
    let physical = PhysicalParameters::unit();
    let k = derive_coefficients(&physical).unwrap();
    let b1 = [[0.0, k.a, -k.b], [-1.0, 0.0, 0.0], [k.d, 0.0, k.c]];
    let state = |t: f64| [(2.0 * t).sin(), t.cos(), (-t).exp()];
    let rate = |t: f64| [2.0 * (2.0 * t).cos(), -t.sin(), -(-t).exp()];
    let spec = ProblemSpec::new(physical, tau, 0.6, 2, SpatialData::Modal(vec![[0.0; 3], state(0.0)]))
        .unwrap()
        .with_prehistory(TemporalData::modal(move |n, t| if n == 1 { state(t) } else { [0.0; 3] }))
        .with_forcing(TemporalData::modal(move |n, t| {
            if n != 1 {
                return [0.0; 3];
            }
            let (d, r) = (state(t - tau), rate(t));
            std::array::from_fn(|i| r[i] + (0..3).map(|j| b1[i][j] * d[j]).sum::<f64>())
        }));
    // normalized basis on [0, π]: s = sqrt(2 / (π (1 + a + b/d)))
    let s = (2.0 / (PI * (1.0 + k.a + k.b / k.d))).sqrt();
    let exact = move |x: f64, t: f64| {
        let v = state(t);
        [s * v[0] * x.sin(), s * v[1] * x.cos(), s * v[2] * x.cos()]
    };
    (spec, exact)
}

fn c9_residual() -> Outcome {
    let tau = 0.2;
    let (spec, exact) = manufactured(tau);
    let mut field_err: f64 = 0.0;
    let mut run = |nx: usize, per_delay: usize| {
        let x_grid = uniform_grid(0.0, PI, PI / nx as f64);
        let t_grid = uniform_grid(-tau, 0.6, tau / per_delay as f64);
        let field = simulate_on(&spec, &x_grid, &t_grid, false).unwrap();
        for (it, &t) in t_grid.iter().enumerate() {
            for (ix, &x) in x_grid.iter().enumerate() {
                let (got, want) = (field.v_at(it, ix), exact(x, t));
                for k in 0..3 {
                    field_err = field_err.max((got[k] - want[k]).abs());
                }
            }
        }
        residual_check(&field, &spec).unwrap()
    };
    let coarse = run(32, 10);
    let fine = run(64, 20);
    let ratios = [coarse.res1 / fine.res1, coarse.res2 / fine.res2, coarse.res3 / fine.res3];
    let ok = ratios.iter().all(|r| (r / 4.0 - 1.0).abs() <= 0.3);
    Outcome {
        id: "9",
        title: "PDE residuals shrink 4x when both steps halve",
        passed: ok && field_err <= 1e-9,
        detail: format!(
            "ratios {:.3} {:.3} {:.3} (target 4 +/- 30%); field vs exact {field_err:.1e}",
            ratios[0], ratios[1], ratios[2]
        ),
    }
}

fn c10_dependence(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let k = DerivedCoefficients::new(
            rng.gen_range(0.2..2.0),
            rng.gen_range(0.2..2.0),
            rng.gen_range(0.2..2.0),
            rng.gen_range(0.2..2.0),
        );
        let w = [1.0, k.a, k.b / k.d];
        // ν small enough that the weighted Frobenius norm of B_1 is below 1
        let frob = |nu: f64| {
            let bw = [
                [0.0, k.a * nu * (w[0] / w[1]).sqrt(), -k.b * nu * (w[0] / w[2]).sqrt()],
                [-nu * (w[1] / w[0]).sqrt(), 0.0, 0.0],
                [k.d * nu * (w[2] / w[0]).sqrt(), 0.0, k.c * nu * nu],
            ];
            bw.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
        };
        let mut nu = 1.0;
        while frob(nu) > 0.95 {
            nu *= 0.9;
        }
        nu *= rng.gen_range(0.3..1.0);
        let physical = PhysicalParameters {
            l: PI / nu,
            ..PhysicalParameters::unit()
        };
        let init: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let force: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-0.5..0.5));
        let tau = rng.gen_range(0.05..0.5);
        let horizon = 1.0;
        let mut spec = ProblemSpec::new(physical, tau, horizon, 2, SpatialData::Modal(vec![[0.0; 3], init]))
            .unwrap()
            .with_forcing(TemporalData::Steady(SpatialData::Modal(vec![[0.0; 3], force])));
        spec.coeffs = k;
        let systems = build_systems(&spec).unwrap();
        let data = project_data(&spec).unwrap();
        let grid = uniform_grid(0.0, horizon, tau / 20.0);
        let tr = solve_all(&systems, &data, tau, &grid, false).unwrap();

        let basis = spec.basis();
        let om = basis.component_weights(1);
        let b = &systems[1].matrix;
        let lhs = tr[1].states.iter().map(|v| xinf_sq(b, v, &om).sqrt()).fold(0.0, f64::max);
        let v0 = CVec::from_iterator(3, init.iter().map(|&x| c(x)));
        let f = CVec::from_iterator(3, force.iter().map(|&x| c(x)));
        let e = horizon.exp();
        let n0 = xinf_sq(b, &v0, &om).sqrt();
        let rhs = e * n0 + tau * e * n0 + horizon.sqrt() * e * (horizon * xinf_sq(b, &f, &om)).sqrt();
        worst = worst.max(lhs / rhs);
    }
    Outcome {
        id: "10",
        title: "continuous dependence inequality",
        passed: worst <= 1.0,
        detail: format!("max lhs/rhs {worst:.3} (limit 1)"),
    }
}

fn c11_projection(rng: &mut ChaCha8Rng) -> Outcome {
    let (a, b, cc, d): (f64, f64, f64, f64) = (2.0, 1.0, 1.0, 1.0);
    let l: f64 = 2.5;
    let coeffs: Vec<[f64; 3]> = (0..=8)
        .map(|n| {
            let mut v: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            if n == 0 {
                v[0] = 0.0;
            }
            v
        })
        .collect();
    // basis written out independently of the library
    let norm = move |n: usize| {
        if n == 0 {
            (1.0 / (l * (a + b / d))).sqrt()
        } else {
            (2.0 / (l * (1.0 + a + b / d))).sqrt()
        }
    };
    let phi = move |n: usize, x: f64| {
        let (s, nu) = (norm(n), PI * n as f64 / l);
        if n == 0 {
            [0.0, s, s]
        } else {
            [s * (nu * x).sin(), s * (nu * x).cos(), s * (nu * x).cos()]
        }
    };
    let field = {
        let coeffs = coeffs.clone();
        move |x: f64| {
            let mut v = [0.0; 3];
            for (n, cn) in coeffs.iter().enumerate() {
                let p = phi(n, x);
                for k in 0..3 {
                    v[k] += cn[k] * p[k];
                }
            }
            v
        }
    };

    let physical = PhysicalParameters {
        rho: 1.0,
        bulk: 1.0,
        shear: 0.75,
        alpha: 1.0,
        kappa: 1.0,
        c_rho: 1.0,
        theta0: 1.0,
        l,
    };
    let _ = cc;
    let mut worst: f64 = 0.0;
    for n_modes in [9, 12, 20, 33] {
        let spec = ProblemSpec::new(physical, 0.1, 0.2, n_modes, SpatialData::evaluator(field.clone())).unwrap();
        let x_grid = uniform_grid(0.0, l, l / 64.0);
        let out = simulate_on(&spec, &x_grid, &[0.0], false).unwrap();
        // X norm of the reconstruction error by Simpson's rule on a fine grid
        let samples = 4000;
        let h = l / samples as f64;
        let w = [1.0, a, b / d];
        let err_at = |x: f64| {
            let mut rec = [0.0; 3];
            for (n, tr) in out.trajectories.iter().enumerate() {
                let p = phi(n, x);
                for k in 0..3 {
                    rec[k] += tr.states[0][k].re * p[k];
                }
            }
            let want = field(x);
            (0..3).map(|k| w[k] * (rec[k] - want[k]).powi(2)).sum::<f64>()
        };
        let mut integral = err_at(0.0) + err_at(l);
        for i in 1..samples {
            integral += err_at(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        worst = worst.max((integral * h / 3.0).max(0.0).sqrt());
    }

    let basis = FourierBasis::new(l, DerivedCoefficients::new(a, b, cc, d));
    let mut gram: f64 = 0.0;
    let samples = 4000;
    let h = l / samples as f64;
    let w = [1.0, a, b / d];
    for n in 0..=8 {
        for m in 0..=8 {
            let f = |x: f64| {
                let (p, q) = (basis.eval(n, x).unwrap(), basis.eval(m, x).unwrap());
                (0..3).map(|k| w[k] * p[k] * q[k]).sum::<f64>()
            };
            let mut s = f(0.0) + f(l);
            for i in 1..samples {
                s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            let want = if n == m { 1.0 } else { 0.0 };
            gram = gram.max((s * h / 3.0 - want).abs());
        }
    }
    Outcome {
        id: "11",
        title: "projection/reconstruction and Gram matrix",
        passed: worst <= 1e-10 && gram <= 1e-10,
        detail: format!("reconstruction X-norm error {worst:.1e} (limit 1e-10), Gram {gram:.1e} (limit 1e-10)"),
    }
}

fn c12_cli() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_delaytherm");
    let golden_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let config = golden_dir.join("simulate_n4.json");
    let expected = std::fs::read(golden_dir.join("field_n4.csv")).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    let mut same = true;
    for (i, parallel) in [false, false, true].into_iter().enumerate() {
        let out = tmp.path().join(format!("run{i}"));
        let mut cmd = Command::new(bin);
        cmd.args(["simulate", "--config"]).arg(&config).arg("--output").arg(&out);
        if parallel {
            cmd.arg("--parallel");
        }
        let status = cmd.output().unwrap().status;
        same &= status.success() && std::fs::read(out.join("field.csv")).unwrap_or_default() == expected;
    }
    let start = Instant::now();
    let status = Command::new(bin)
        .args(["validate", "--seed", "7", "--output"])
        .arg(tmp.path().join("validate"))
        .output()
        .unwrap()
        .status;
    let elapsed = start.elapsed();
    Outcome {
        id: "12",
        title: "CLI golden determinism and validate runtime",
        passed: same && status.success() && elapsed < Duration::from_secs(120),
        detail: format!("golden identical (2 serial + 1 parallel): {same}; validate exit {:?} in {elapsed:.1?} (limit 120 s)", status.code()),
    }
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(20240601);
    let outcomes = vec![
        c1_definition(),
        c2_derivative(&mut rng),
        c3_similarity(&mut rng),
        c4_method_of_steps(&mut rng),
        c5_eigenvalues(&mut rng),
        c6_eigenvectors(&mut rng),
        c7a_classical_gap(&mut rng),
        c7b_step_difference(&mut rng),
        c8_order(&mut rng),
        c9_residual(),
        c10_dependence(&mut rng),
        c11_projection(&mut rng),
        c12_cli(),
    ];
    let mut failures = 0;
    for o in &outcomes {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("criterion {:<3} {tag}  {}: {}", o.id, o.title, o.detail);
        failures += usize::from(!o.passed);
    }
    println!("acceptance: {} passed, {failures} failed", outcomes.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
