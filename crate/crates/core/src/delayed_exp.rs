//! The delayed exponential `exp_τ(M, t)` and the classical matrix exponential.
//!
//! `exp_τ(M, t)` is the zero matrix for `t < −τ`, the identity on `[−τ, 0)`,
//! and on every later interval the finite sum
//!
//! ```text
//! I + Σ_{k=1}^{⌊t/τ⌋+1} (t − (k−1)τ)^k M^k / k!
//! ```
//!
//! It solves `ẋ(t) = M x(t − τ)` with the identity as prehistory, so
//! `d/dt exp_τ(M, t) = M exp_τ(M, t − τ)` away from the breakpoints `kτ`.

use std::sync::{OnceLock, RwLock};

use crate::linalg::{condition_frobenius, frobenius, CMat, CVec, CompensatedMatrixSum, CompensatedSum};
use crate::{Error, Result, C64};

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain("tau must be > 0".into()))
    }
}

/// Index of the last term in the delayed-exponential sum at time `t`, or
/// `None` when `t < −τ`.
fn top_degree(tau: f64, t: f64) -> Option<usize> {
    if t < -tau {
        None
    } else {
        Some(((t / tau).floor() + 1.0).max(0.0) as usize)
    }
}

/// `(t − (k−1)τ)^k / k!` built as a running product.
fn series_coeff(tau: f64, t: f64, k: usize) -> f64 {
    let s = t - (k as f64 - 1.0) * tau;
    (1..=k).fold(1.0, |acc, j| acc * s / j as f64)
}

pub fn delayed_exp_scalar(lambda: C64, tau: f64, t: f64) -> Result<C64> {
    check_tau(tau)?;
    let Some(top) = top_degree(tau, t) else {
        return Ok(C64::new(0.0, 0.0));
    };
    let mut sum = CompensatedSum::default();
    sum.add(C64::new(1.0, 0.0));
    let inv_fact = inverse_factorials();
    for k in 1..=top {
        let z = lambda * (t - (k as f64 - 1.0) * tau);
        let fast = inv_fact.get(k).map(|&f| z.powu(k as u32) * f);
        let term = match fast {
            Some(v) if v.is_finite() => v,
            // z^k overflowed or 1/k! is out of range: use the running product.
            _ => (1..=k).fold(C64::new(1.0, 0.0), |acc, j| acc * z / j as f64),
        };
        sum.add(term);
    }
    Ok(sum.value())
}

fn inverse_factorials() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut v = vec![1.0; 171];
        for k in 1..v.len() {
            v[k] = v[k - 1] / k as f64;
        }
        v
    })
}

/// Anything that can apply `exp_τ(op, t)` to a vector.
pub trait DelayedExpKernel: Send + Sync {
    fn dim(&self) -> usize;
    fn tau(&self) -> f64;
    fn matrix(&self, t: f64) -> CMat;
    fn apply(&self, t: f64, v: &CVec) -> CVec {
        self.matrix(t) * v
    }
    /// Upper bound on the summed magnitudes of the series terms at `t`. The
    /// rounding error of an evaluation is a small multiple of `ε` times this.
    fn magnitude(&self, t: f64) -> f64;
}

/// `exp_τ(r, t)` for `r ≥ 0`: every term is nonnegative, so this bounds the
/// term magnitudes of any operand with norm `r`.
fn magnitude_bound(r: f64, tau: f64, t: f64) -> f64 {
    delayed_exp_scalar(C64::new(r, 0.0), tau, t).map_or(0.0, |z| z.re)
}

/// Direct-series evaluator with a monotonically grown cache of operand powers.
#[derive(Debug)]
pub struct DelayedExpEvaluator {
    operand: CMat,
    tau: f64,
    powers: RwLock<Vec<CMat>>,
}

impl DelayedExpEvaluator {
    pub fn new(operand: CMat, tau: f64) -> Result<Self> {
        check_tau(tau)?;
        if !operand.is_square() {
            return Err(Error::Input("operand must be square".into()));
        }
        let n = operand.nrows();
        Ok(Self {
            powers: RwLock::new(vec![CMat::identity(n, n), operand.clone()]),
            operand,
            tau,
        })
    }

    pub fn operand(&self) -> &CMat {
        &self.operand
    }

    /// Number of cached powers (`M^0 ..`).
    pub fn cached_powers(&self) -> usize {
        self.powers.read().expect("power cache poisoned").len()
    }

    fn ensure_powers(&self, top: usize) {
        if self.cached_powers() > top {
            return;
        }
        let mut powers = self.powers.write().expect("power cache poisoned");
        while powers.len() <= top {
            let next = powers.last().expect("non-empty cache") * &self.operand;
            powers.push(next);
        }
    }

    pub fn eval(&self, t: f64) -> CMat {
        let n = self.operand.nrows();
        let Some(top) = top_degree(self.tau, t) else {
            return CMat::zeros(n, n);
        };
        self.ensure_powers(top);
        let powers = self.powers.read().expect("power cache poisoned");
        let mut acc = CompensatedMatrixSum::new(n, n);
        acc.add_identity();
        for (k, p) in powers.iter().enumerate().take(top + 1).skip(1) {
            acc.add_scaled(series_coeff(self.tau, t, k), p);
        }
        acc.finish()
    }
}

impl DelayedExpKernel for DelayedExpEvaluator {
    fn dim(&self) -> usize {
        self.operand.nrows()
    }

    fn tau(&self) -> f64 {
        self.tau
    }

    fn matrix(&self, t: f64) -> CMat {
        self.eval(t)
    }

    fn magnitude(&self, t: f64) -> f64 {
        magnitude_bound(frobenius(&self.operand), self.tau, t)
    }
}

pub fn delayed_exp_matrix_direct(m: &CMat, tau: f64, t: f64) -> Result<CMat> {
    Ok(DelayedExpEvaluator::new(m.clone(), tau)?.eval(t))
}

/// `S · diag(exp_τ(λ_i, t)) · S⁻¹` for a diagonalized operand.
#[derive(Debug, Clone)]
pub struct DiagonalizedExp {
    s: CMat,
    s_inv: CMat,
    eigenvalues: Vec<C64>,
    tau: f64,
}

impl DiagonalizedExp {
    pub fn new(s: CMat, eigenvalues: Vec<C64>, s_inv: CMat, tau: f64) -> Result<Self> {
        check_tau(tau)?;
        let n = s.nrows();
        if !s.is_square() || s_inv.shape() != s.shape() || eigenvalues.len() != n {
            return Err(Error::Input("S, S⁻¹ and the eigenvalues must agree in size".into()));
        }
        let residual = frobenius(&(&s * &s_inv - CMat::identity(n, n)));
        if !(residual <= 1e-12 * condition_frobenius(&s, &s_inv)) {
            return Err(Error::Input(format!(
                "S_inv is not the inverse of S (residual {residual:.3e})"
            )));
        }
        Ok(Self {
            s,
            s_inv,
            eigenvalues,
            tau,
        })
    }

    fn diagonal(&self, t: f64) -> Vec<C64> {
        self.eigenvalues
            .iter()
            .map(|&l| delayed_exp_scalar(l, self.tau, t).expect("tau checked"))
            .collect()
    }
}

impl DelayedExpKernel for DiagonalizedExp {
    fn dim(&self) -> usize {
        self.s.nrows()
    }

    fn tau(&self) -> f64 {
        self.tau
    }

    fn matrix(&self, t: f64) -> CMat {
        let e = self.diagonal(t);
        let mut scaled = self.s.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= e[j];
        }
        scaled * &self.s_inv
    }

    fn apply(&self, t: f64, v: &CVec) -> CVec {
        let mut w = &self.s_inv * v;
        for (wi, ei) in w.iter_mut().zip(self.diagonal(t)) {
            *wi *= ei;
        }
        &self.s * w
    }

    fn magnitude(&self, t: f64) -> f64 {
        let top = self
            .eigenvalues
            .iter()
            .map(|l| magnitude_bound(l.norm(), self.tau, t))
            .fold(0.0, f64::max);
        condition_frobenius(&self.s, &self.s_inv) * top
    }
}

pub fn delayed_exp_matrix_diag(s: &CMat, d: &CMat, s_inv: &CMat, tau: f64, t: f64) -> Result<CMat> {
    if !d.is_square() {
        return Err(Error::Input("D must be square".into()));
    }
    for i in 0..d.nrows() {
        for j in 0..d.ncols() {
            if i != j && d[(i, j)] != C64::new(0.0, 0.0) {
                return Err(Error::Input("D must be diagonal".into()));
            }
        }
    }
    let eig = d.diagonal().iter().copied().collect();
    Ok(DiagonalizedExp::new(s.clone(), eig, s_inv.clone(), tau)?.matrix(t))
}

/// `exp(M t)` by scaling, a truncated Taylor series, and repeated squaring.
pub fn classical_exp_matrix(m: &CMat, t: f64) -> Result<CMat> {
    if !m.is_square() {
        return Err(Error::Input("operand must be square".into()));
    }
    let n = m.nrows();
    let a = m * C64::new(t, 0.0);
    let norm = frobenius(&a);
    if !norm.is_finite() {
        return Err(Error::Numeric("non-finite matrix exponential argument".into()));
    }
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = &a * C64::new(0.5f64.powi(squarings), 0.0);
    let mut acc = CompensatedMatrixSum::new(n, n);
    acc.add_identity();
    let mut term = CMat::identity(n, n);
    for k in 1..=40 {
        term = &term * &scaled / C64::new(k as f64, 0.0);
        acc.add_scaled(1.0, &term);
        if frobenius(&term) <= 1e-18 {
            break;
        }
    }
    let mut result = acc.finish();
    for _ in 0..squarings {
        result = &result * &result;
    }
    if result.iter().all(|z| z.is_finite()) {
        Ok(result)
    } else {
        Err(Error::Numeric("matrix exponential overflowed".into()))
    }
}

/// Outcome of comparing `exp_τ(−M, t − τ)` against `exp(−M t)` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpComparisonReport {
    pub max_gap: f64,
    pub bound: f64,
    pub satisfied: bool,
}

/// Checks `‖exp_τ(−M, t − τ) − exp(−M t)‖ ≤ τ e^T` on `grid ⊂ [0, T]`.
/// Norms are Frobenius, an upper bound for the operator norm.
pub fn exp_comparison_report(
    m: &CMat,
    tau: f64,
    horizon: f64,
    grid: &[f64],
) -> Result<ExpComparisonReport> {
    check_tau(tau)?;
    let norm = frobenius(m);
    if norm > 1.0 + 1e-12 {
        return Err(Error::Precondition(format!(
            "operator norm estimate {norm:.6} exceeds 1"
        )));
    }
    if grid.iter().any(|&t| t < 0.0 || t > horizon) {
        return Err(Error::Input("grid must lie in [0, T]".into()));
    }
    let neg = -m;
    let delayed = DelayedExpEvaluator::new(neg.clone(), tau)?;
    let mut max_gap: f64 = 0.0;
    for &t in grid {
        let gap = frobenius(&(delayed.eval(t - tau) - classical_exp_matrix(&neg, t)?));
        max_gap = max_gap.max(gap);
    }
    let bound = tau * horizon.exp();
    Ok(ExpComparisonReport {
        max_gap,
        bound,
        satisfied: max_gap <= bound,
    })
}

/// Per-interval measurements on `(kτ, (k+1)τ]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDifference {
    pub k: usize,
    /// `max ‖exp_τ(M, t) − exp_τ(M, t − τ)‖` over the interval.
    pub shift_difference: f64,
    /// `max ‖(t − kτ)^{k+1} M^{k+1} / (k+1)!‖`, the term that first appears
    /// on this interval.
    pub newest_term: f64,
    /// `τ^{k+1} / (k+1)!`.
    pub bound: f64,
}

pub fn step_differences(
    m: &CMat,
    tau: f64,
    k_max: usize,
    samples_per_interval: usize,
) -> Result<Vec<StepDifference>> {
    check_tau(tau)?;
    let eval = DelayedExpEvaluator::new(m.clone(), tau)?;
    let mut out = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        eval.ensure_powers(k + 1);
        let top_power = eval.powers.read().expect("power cache poisoned")[k + 1].clone();
        let top_norm = frobenius(&top_power);
        let mut shift: f64 = 0.0;
        let mut newest: f64 = 0.0;
        for i in 1..=samples_per_interval {
            let t = tau * (k as f64 + i as f64 / samples_per_interval as f64);
            shift = shift.max(frobenius(&(eval.eval(t) - eval.eval(t - tau))));
            newest = newest.max(series_coeff(tau, t, k + 1).abs() * top_norm);
        }
        let bound = (1..=k + 1).fold(1.0, |acc, j| acc * tau / j as f64);
        out.push(StepDifference {
            k,
            shift_difference: shift,
            newest_term: newest,
            bound,
        });
    }
    Ok(out)
}
