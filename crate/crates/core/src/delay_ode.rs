//! Linear pure-delay Cauchy problems `ẋ(t) + M x(t − τ) = f(t)`.
//!
//! Two independent routes are provided: the closed-form representation
//! through the delayed exponential, and a method-of-steps integrator used as
//! an oracle for it.

use std::fmt;
use std::sync::Arc;

use crate::delayed_exp::{classical_exp_matrix, DelayedExpEvaluator, DelayedExpKernel};
use crate::linalg::{vec_norm, CMat, CVec};
use crate::quadrature::{integrate_vector, integrate_vector_with_floor, GaussLegendre, ORDER};
use crate::{Error, Result, C64};

/// Relative tolerance of the adaptive quadrature used by the solvers.
pub const QUADRATURE_REL_TOL: f64 = 1e-13;

pub type VectorFn = Arc<dyn Fn(f64) -> CVec + Send + Sync>;

/// A vector-valued function of time: prehistory or forcing.
#[derive(Clone)]
pub enum Signal {
    Zero,
    Constant(CVec),
    /// Closed-form evaluator; `knots` lists points where it is not smooth.
    Function { f: VectorFn, knots: Vec<f64> },
}

impl Signal {
    pub fn function<F: Fn(f64) -> CVec + Send + Sync + 'static>(f: F) -> Self {
        Signal::Function {
            f: Arc::new(f),
            knots: Vec::new(),
        }
    }

    pub fn eval(&self, t: f64, dim: usize) -> CVec {
        match self {
            Signal::Zero => CVec::zeros(dim),
            Signal::Constant(v) => v.clone(),
            Signal::Function { f, .. } => f(t),
        }
    }

    pub fn knots(&self) -> &[f64] {
        match self {
            Signal::Function { knots, .. } => knots,
            _ => &[],
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Signal::Zero)
    }
}

impl fmt::Debug for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Signal::Zero => write!(f, "Zero"),
            Signal::Constant(v) => f.debug_tuple("Constant").field(&v.as_slice()).finish(),
            Signal::Function { knots, .. } => {
                f.debug_struct("Function").field("knots", knots).finish()
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct DelayIvp {
    pub matrix: CMat,
    pub tau: f64,
    pub x0: CVec,
    pub prehistory: Signal,
    pub forcing: Signal,
    pub horizon: f64,
}

impl DelayIvp {
    pub fn new(
        matrix: CMat,
        tau: f64,
        x0: CVec,
        prehistory: Signal,
        forcing: Signal,
        horizon: f64,
    ) -> Result<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::Domain("tau must be > 0".into()));
        }
        if !(horizon > 0.0) {
            return Err(Error::Domain("horizon must be > 0".into()));
        }
        if !matrix.is_square() || matrix.nrows() != x0.len() {
            return Err(Error::Input("matrix and initial state dimensions differ".into()));
        }
        if let Signal::Constant(v) = &prehistory {
            if v.len() != x0.len() {
                return Err(Error::Input("prehistory dimension differs".into()));
            }
        }
        if let Signal::Constant(v) = &forcing {
            if v.len() != x0.len() {
                return Err(Error::Input("forcing dimension differs".into()));
            }
        }
        Ok(Self {
            matrix,
            tau,
            x0,
            prehistory,
            forcing,
            horizon,
        })
    }

    pub fn dim(&self) -> usize {
        self.x0.len()
    }

    /// `‖prehistory(0) − x0‖`, to be compared against 1e-12 when a classical
    /// solution is required.
    pub fn compatibility_gap(&self) -> f64 {
        vec_norm(&(self.prehistory.eval(0.0, self.dim()) - &self.x0))
    }

    pub fn check_classical(&self) -> Result<()> {
        let gap = self.compatibility_gap();
        if gap > 1e-12 * vec_norm(&self.x0).max(1.0) {
            return Err(Error::Compatibility { mismatch: gap });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolverPath {
    ClosedFormDirect,
    ClosedFormDiagonal,
    MethodOfSteps { step: f64 },
    ClassicalDuhamel,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryMeta {
    pub path: SolverPath,
    pub quadrature_order: usize,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<CVec>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, states: Vec<CVec>, meta: TrajectoryMeta) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::Input("times and states differ in length".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Input("times must be strictly increasing".into()));
        }
        if states.iter().any(|s| s.iter().any(|z| !z.is_finite())) {
            return Err(Error::Numeric("non-finite state in trajectory".into()));
        }
        Ok(Self {
            times,
            states,
            meta,
        })
    }

    pub fn max_norm(&self) -> f64 {
        self.states.iter().map(vec_norm).fold(0.0, f64::max)
    }
}

fn check_grid(ivp: &DelayIvp, t_grid: &[f64]) -> Result<()> {
    if t_grid.iter().any(|&t| t < -ivp.tau || !t.is_finite()) {
        return Err(Error::Input("time grid must start at or after -tau".into()));
    }
    Ok(())
}

/// Points `t − jτ` (for `j ≥ 0`) lying in `(lo, hi)`.
fn shifted_breaks(t: f64, tau: f64, lo: f64, hi: f64, extra: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = extra.iter().copied().filter(|&s| s > lo && s < hi).collect();
    let mut j = 0usize;
    loop {
        let s = t - j as f64 * tau;
        if s <= lo {
            break;
        }
        if s < hi {
            out.push(s);
        }
        j += 1;
    }
    out
}

/// Closed-form solution using the direct-series delayed exponential.
pub fn solve_closed_form(ivp: &DelayIvp, t_grid: &[f64]) -> Result<Trajectory> {
    let kernel = DelayedExpEvaluator::new(-&ivp.matrix, ivp.tau)?;
    solve_closed_form_with(ivp, &kernel, SolverPath::ClosedFormDirect, t_grid)
}

/// Closed-form solution with a caller-supplied evaluator of `exp_τ(−M, ·)`.
pub fn solve_closed_form_with(
    ivp: &DelayIvp,
    kernel: &dyn DelayedExpKernel,
    path: SolverPath,
    t_grid: &[f64],
) -> Result<Trajectory> {
    check_grid(ivp, t_grid)?;
    if kernel.dim() != ivp.dim() || (kernel.tau() - ivp.tau).abs() > 0.0 {
        return Err(Error::Input("kernel does not match the problem".into()));
    }
    let states = t_grid
        .iter()
        .map(|&t| closed_form_at(ivp, kernel, t))
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(
        t_grid.to_vec(),
        states,
        TrajectoryMeta {
            path,
            quadrature_order: ORDER,
        },
    )
}

fn closed_form_at(ivp: &DelayIvp, kernel: &dyn DelayedExpKernel, t: f64) -> Result<CVec> {
    let (tau, dim) = (ivp.tau, ivp.dim());
    if t < 0.0 {
        return Ok(ivp.prehistory.eval(t, dim));
    }
    if t == 0.0 {
        return Ok(ivp.x0.clone());
    }
    let mut x = kernel.apply(t - tau, &ivp.x0);

    // The history kernel vanishes once its argument t − 2τ − s drops below −τ.
    let hi = (t - tau).min(0.0);
    if hi > -tau && !ivp.prehistory.is_zero() {
        let breaks = shifted_breaks(t, tau, -tau, hi, ivp.prehistory.knots());
        let floor = rounding_floor(kernel, t - tau, -tau, hi, &ivp.prehistory, dim);
        let hist = integrate_vector_with_floor(-tau, hi, &breaks, dim, QUADRATURE_REL_TOL, floor, |s| {
            kernel.apply(t - 2.0 * tau - s, &ivp.prehistory.eval(s, dim))
        })?;
        x -= &ivp.matrix * hist;
    }

    if !ivp.forcing.is_zero() {
        let breaks = shifted_breaks(t, tau, 0.0, t, ivp.forcing.knots());
        let floor = rounding_floor(kernel, t - tau, 0.0, t, &ivp.forcing, dim);
        x += integrate_vector_with_floor(0.0, t, &breaks, dim, QUADRATURE_REL_TOL, floor, |s| {
            kernel.apply(t - tau - s, &ivp.forcing.eval(s, dim))
        })?;
    }
    Ok(x)
}

/// Rounding level of `∫ exp_τ(−M, ·) g` over `[lo, hi]` when the kernel
/// argument never exceeds `top`. For large `|M| t / τ` the alternating series
/// cancels heavily and this dominates the requested relative tolerance.
fn rounding_floor(kernel: &dyn DelayedExpKernel, top: f64, lo: f64, hi: f64, g: &Signal, dim: usize) -> f64 {
    let data = GaussLegendre::order16().integrate(lo, hi, |s| vec_norm(&g.eval(s, dim)));
    64.0 * f64::EPSILON * kernel.magnitude(top) * data
}

/// Stored nodes of the method-of-steps integrator.
struct StepHistory<'a> {
    ivp: &'a DelayIvp,
    h: f64,
    states: Vec<CVec>,
    slopes: Vec<CVec>,
}

impl StepHistory<'_> {
    /// State at `s ≥ −τ`: prehistory before 0, Hermite cubic afterwards.
    fn state(&self, s: f64) -> CVec {
        if s < 0.0 {
            return self.ivp.prehistory.eval(s, self.ivp.dim());
        }
        let pos = s / self.h;
        let j = pos.floor() as usize;
        let theta = pos - j as f64;
        if theta == 0.0 || j + 1 >= self.states.len() {
            return self.states[j.min(self.states.len() - 1)].clone();
        }
        hermite(
            &self.states[j],
            &self.slopes[j],
            &self.states[j + 1],
            &self.slopes[j + 1],
            self.h,
            theta,
        )
    }

    /// Right-hand side `f(t) − M x(t − τ)`; independent of the current state.
    fn rhs(&self, t: f64) -> CVec {
        let delayed = self.state(t - self.ivp.tau);
        self.ivp.forcing.eval(t, self.ivp.dim()) - &self.ivp.matrix * delayed
    }
}

fn hermite(x0: &CVec, d0: &CVec, x1: &CVec, d1: &CVec, h: f64, s: f64) -> CVec {
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    x0 * C64::new(h00, 0.0)
        + d0 * C64::new(h10 * h, 0.0)
        + x1 * C64::new(h01, 0.0)
        + d1 * C64::new(h11 * h, 0.0)
}

/// Method of steps with a classical fourth-order step. The delayed term is
/// read from a Hermite cubic through the stored states and slopes. The step
/// is shortened so that it divides τ.
pub fn solve_method_of_steps(ivp: &DelayIvp, t_grid: &[f64], step: f64) -> Result<Trajectory> {
    check_grid(ivp, t_grid)?;
    if !(step > 0.0) || step > ivp.tau / 50.0 * (1.0 + 1e-12) {
        return Err(Error::Input("method-of-steps step must be in (0, tau/50]".into()));
    }
    let per_delay = (ivp.tau / step - 1e-9).ceil().max(1.0) as usize;
    let h = ivp.tau / per_delay as f64;
    let t_end = t_grid.iter().copied().fold(0.0, f64::max);
    let n_steps = (t_end / h - 1e-9).ceil().max(0.0) as usize;

    let mut hist = StepHistory {
        ivp,
        h,
        states: Vec::with_capacity(n_steps + 1),
        slopes: Vec::with_capacity(n_steps + 1),
    };
    hist.states.push(ivp.x0.clone());
    let d0 = hist.rhs(0.0);
    hist.slopes.push(d0);
    for i in 0..n_steps {
        let t = i as f64 * h;
        // Since ẋ depends only on t here, the RK4 stages collapse to Simpson's rule.
        let k1 = hist.slopes[i].clone();
        let k2 = hist.rhs(t + 0.5 * h);
        let k4 = hist.rhs(t + h);
        let next = &hist.states[i] + (k1 + k2 * C64::new(4.0, 0.0) + &k4) * C64::new(h / 6.0, 0.0);
        if next.iter().any(|z| !z.is_finite()) {
            return Err(Error::Numeric("method of steps diverged".into()));
        }
        hist.states.push(next);
        hist.slopes.push(k4);
    }

    let states = t_grid
        .iter()
        .map(|&t| if t == 0.0 { ivp.x0.clone() } else { hist.state(t) })
        .collect();
    Trajectory::new(
        t_grid.to_vec(),
        states,
        TrajectoryMeta {
            path: SolverPath::MethodOfSteps { step: h },
            quadrature_order: 0,
        },
    )
}

/// Classical variation-of-constants solution of `ẋ + M x = f`, `x(0) = x0`.
pub fn solve_duhamel(m: &CMat, x0: &CVec, forcing: &Signal, t_grid: &[f64]) -> Result<Trajectory> {
    let dim = x0.len();
    let neg = -m;
    let states = t_grid
        .iter()
        .map(|&t| {
            if t < 0.0 {
                return Err(Error::Input("classical reference is defined for t >= 0".into()));
            }
            let mut x = classical_exp_matrix(&neg, t)? * x0;
            if !forcing.is_zero() && t > 0.0 {
                let mut breaks: Vec<f64> = forcing.knots().to_vec();
                let pieces = (t / 0.5).ceil() as usize;
                breaks.extend((1..pieces).map(|k| t * k as f64 / pieces as f64));
                let mut failure = None;
                let v = integrate_vector(0.0, t, &breaks, dim, QUADRATURE_REL_TOL, |s| {
                    match classical_exp_matrix(&neg, t - s) {
                        Ok(e) => e * forcing.eval(s, dim),
                        Err(err) => {
                            failure.get_or_insert(err);
                            CVec::zeros(dim)
                        }
                    }
                })?;
                if let Some(err) = failure {
                    return Err(err);
                }
                x += v;
            }
            Ok(x)
        })
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(
        t_grid.to_vec(),
        states,
        TrajectoryMeta {
            path: SolverPath::ClassicalDuhamel,
            quadrature_order: ORDER,
        },
    )
}

/// Largest Euclidean distance between states on an identical time grid.
pub fn trajectory_distance(a: &Trajectory, b: &Trajectory) -> Result<f64> {
    if a.times != b.times {
        return Err(Error::Input("trajectories are sampled on different grids".into()));
    }
    Ok(a.states
        .iter()
        .zip(&b.states)
        .map(|(x, y)| vec_norm(&(x - y)))
        .fold(0.0, f64::max))
}
