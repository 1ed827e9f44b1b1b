//! Trigonometric basis, modal matrices and their eigenstructure.
//!
//! Mode `n` carries `Φ_n(x) = s_n (sin ν_n x, cos ν_n x, cos ν_n x)` with
//! `ν_n = πn/l`; on it the operator `B` acts as the 3×3 matrix
//!
//! ```text
//!        ⎡  0     aν   −bν ⎤
//! B_n =  ⎢ −ν     0     0  ⎥
//!        ⎣  dν    0    cν² ⎦
//! ```
//!
//! whose characteristic polynomial is `μ³ − cν²μ² + (a+bd)ν²μ − acν⁴`.

use std::f64::consts::PI;

use nalgebra::Matrix3;

use crate::delayed_exp::{DelayedExpEvaluator, DelayedExpKernel, DiagonalizedExp};
use crate::linalg::{
    adjugate_inverse3, condition_frobenius, det3, frobenius, null_vector, real_to_complex,
    vec_norm, CMat, CVec,
};
use crate::model::DerivedCoefficients;
use crate::{Error, Result, C64};

pub fn wavenumber(n: usize, l: f64) -> Result<f64> {
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::Domain("l must be > 0".into()));
    }
    Ok(PI * n as f64 / l)
}

/// Basis `Φ_n` normalized to unit norm in the weighted inner product
/// `⟨V, W⟩ = ⟨V¹, W¹⟩ + a⟨V², W²⟩ + (b/d)⟨V³, W³⟩` on `[0, l]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierBasis {
    l: f64,
    coeffs: DerivedCoefficients,
}

impl FourierBasis {
    pub fn new(l: f64, coeffs: DerivedCoefficients) -> Self {
        Self { l, coeffs }
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn coeffs(&self) -> &DerivedCoefficients {
        &self.coeffs
    }

    pub fn nu(&self, n: usize) -> f64 {
        PI * n as f64 / self.l
    }

    /// `∫_0^l trig_k(ν_n x)² dx` for the unscaled component `k`.
    pub fn trig_norm_sq(&self, n: usize, k: usize) -> f64 {
        match (n, k) {
            (0, 0) => 0.0,
            (0, _) => self.l,
            _ => 0.5 * self.l,
        }
    }

    /// Per-component scales; equal across components so that `B` maps
    /// `Φ_n v` to `Φ_n B_n v`.
    pub fn normalization(&self, n: usize) -> [f64; 3] {
        let w = self.coeffs.weights();
        let energy: f64 = (0..3).map(|k| w[k] * self.trig_norm_sq(n, k)).sum();
        let s = 1.0 / energy.sqrt();
        [s; 3]
    }

    /// Weights `ω_{n,k}` with `‖Σ_k v_k Φ_n^k e_k‖² = Σ_k ω_{n,k} |v_k|²`.
    pub fn component_weights(&self, n: usize) -> [f64; 3] {
        let w = self.coeffs.weights();
        let s = self.normalization(n);
        std::array::from_fn(|k| w[k] * s[k] * s[k] * self.trig_norm_sq(n, k))
    }

    pub fn eval(&self, n: usize, x: f64) -> Result<[f64; 3]> {
        let tol = 1e-12 * self.l;
        if !(x >= -tol && x <= self.l + tol) {
            return Err(Error::Domain(format!("x = {x} lies outside [0, l]")));
        }
        Ok(self.eval_unchecked(n, x))
    }

    pub(crate) fn eval_unchecked(&self, n: usize, x: f64) -> [f64; 3] {
        let s = self.normalization(n);
        if n == 0 {
            return [0.0, s[1], s[2]];
        }
        let (sin, cos) = sin_cos_pi(n as f64 * (x / self.l));
        [s[0] * sin, s[1] * cos, s[2] * cos]
    }

    /// `∫_0^x Φ_n²(y) dy`, used to rebuild `u⁰` from `∂x u⁰`.
    pub fn cos_antiderivative(&self, n: usize, x: f64) -> f64 {
        let s = self.normalization(n)[1];
        if n == 0 {
            s * x
        } else {
            s * sin_cos_pi(n as f64 * (x / self.l)).0 / self.nu(n)
        }
    }
}

/// `(sin πr, cos πr)` with `r` reduced to the nearest integer first, so that
/// integer `r` gives exact zeros of the sine.
fn sin_cos_pi(r: f64) -> (f64, f64) {
    let k = r.round();
    let (s, c) = (PI * (r - k)).sin_cos();
    if k.rem_euclid(2.0) == 0.0 {
        (s, c)
    } else {
        (-s, -c)
    }
}

pub fn modal_matrix(n: usize, coeffs: &DerivedCoefficients, l: f64) -> Result<Matrix3<f64>> {
    let nu = wavenumber(n, l)?;
    let DerivedCoefficients { a, b, c, d } = *coeffs;
    Ok(Matrix3::new(
        0.0,
        a * nu,
        -b * nu,
        -nu,
        0.0,
        0.0,
        d * nu,
        0.0,
        c * nu * nu,
    ))
}

/// Monic coefficients `[c2, c1, c0]` of `μ³ + c2 μ² + c1 μ + c0` for mode `n`.
pub fn characteristic_polynomial(n: usize, coeffs: &DerivedCoefficients, l: f64) -> Result<[f64; 3]> {
    let nu = wavenumber(n, l)?;
    let DerivedCoefficients { a, b, c, d } = *coeffs;
    let nu2 = nu * nu;
    Ok([-c * nu2, (a + b * d) * nu2, -a * c * nu2 * nu2])
}

/// Closed-form (Cardano) eigenvalues of `B_n`, sorted by real then
/// imaginary part.
pub fn cubic_eigenvalues(n: usize, coeffs: &DerivedCoefficients, l: f64) -> Result<[C64; 3]> {
    let nu = wavenumber(n, l)?;
    if n == 0 {
        return Ok([C64::new(0.0, 0.0); 3]);
    }
    let DerivedCoefficients { a, b, c, d } = *coeffs;
    let (nu2, nu4) = (nu * nu, nu.powi(4));
    let delta0 = c * c * nu4 - 3.0 * (a + b * d) * nu2;
    let delta1 = -2.0 * c.powi(3) * nu.powi(6) + 9.0 * c * (a + b * d) * nu4 - 27.0 * a * c * nu4;
    let disc = delta1 * delta1 - 4.0 * delta0.powi(3);
    let mut sq = C64::new(disc, 0.0).sqrt();
    // Both square roots give the same three roots; take the one that adds to
    // Δ1 rather than cancelling it.
    if delta1 * sq.re < 0.0 {
        sq = -sq;
    }
    let cc = ((C64::new(delta1, 0.0) + sq) * 0.5).cbrt();

    let mut roots = if cc.norm() < 1e-12 * (1.0 + delta1.abs()).cbrt() {
        companion_roots_oracle(characteristic_polynomial(n, coeffs, l)?)?
    } else {
        let omega = C64::from_polar(1.0, 2.0 * PI / 3.0);
        let trace = C64::new(c * nu2, 0.0);
        std::array::from_fn(|k| {
            let w = omega.powi(k as i32);
            (trace - cc * w - w.conj() * delta0 / cc) / 3.0
        })
    };
    clean_conjugate_pair(&mut roots);
    sort_eigenvalues(&mut roots);
    Ok(roots)
}

/// Zeroes the imaginary part of the most nearly real root and makes the
/// other two exact conjugates when they are conjugate up to roundoff.
fn clean_conjugate_pair(roots: &mut [C64; 3]) {
    let scale = 1.0 + roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let real_idx = (0..3)
        .min_by(|&i, &j| roots[i].im.abs().total_cmp(&roots[j].im.abs()))
        .expect("three roots");
    if roots[real_idx].im.abs() <= 1e-8 * scale {
        roots[real_idx].im = 0.0;
    }
    let others: Vec<usize> = (0..3).filter(|&i| i != real_idx).collect();
    let (p, q) = (roots[others[0]], roots[others[1]]);
    if (p - q.conj()).norm() <= 1e-8 * scale {
        let mid = (p + q.conj()) * 0.5;
        roots[others[0]] = mid;
        roots[others[1]] = mid.conj();
    }
}

fn sort_eigenvalues(roots: &mut [C64; 3]) {
    roots.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
}

/// Smallest, over the six pairings, of the largest distance between paired
/// entries.
pub fn set_distance(a: &[C64; 3], b: &[C64; 3]) -> f64 {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    PERMS
        .iter()
        .map(|p| (0..3).map(|i| (a[i] - b[p[i]]).norm()).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min)
}

/// Roots of `μ³ + c2 μ² + c1 μ + c0` as eigenvalues of the companion
/// matrix, computed with a shifted-QR real Schur decomposition.
pub fn companion_roots_oracle(p: [f64; 3]) -> Result<[C64; 3]> {
    let [c2, c1, c0] = p;
    let companion = Matrix3::new(0.0, 0.0, -c0, 1.0, 0.0, -c1, 0.0, 1.0, -c2);
    let schur = companion
        .try_schur(f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numeric("companion eigenvalue iteration did not converge".into()))?;
    let ev = schur.complex_eigenvalues();
    let mut roots = [ev[0], ev[1], ev[2]];
    sort_eigenvalues(&mut roots);
    Ok(roots)
}

/// Unit eigenvector of `B_n` for eigenvalue `mu`. For `n = 0` the standard
/// basis vector `e_k` is returned.
pub fn eigenvector(
    mu: C64,
    k: usize,
    n: usize,
    coeffs: &DerivedCoefficients,
    l: f64,
) -> Result<CVec> {
    if n == 0 {
        if k >= 3 {
            return Err(Error::Input("eigenvector index must be 0, 1 or 2".into()));
        }
        let mut e = CVec::zeros(3);
        e[k] = C64::new(1.0, 0.0);
        return Ok(e);
    }
    let nu = wavenumber(n, l)?;
    let DerivedCoefficients { a, b, .. } = *coeffs;
    let bn = real_to_complex(&modal_matrix(n, coeffs, l)?);
    let b_norm = frobenius(&bn);
    let shifted = CMat::identity(3, 3) * mu - &bn;
    let residual = |v: &CVec| vec_norm(&(&shifted * v));

    let closed = CVec::from_vec(vec![
        -mu * (b * nu),
        C64::new(b * nu * nu, 0.0),
        mu * mu + a * nu * nu,
    ]);
    let closed_norm = vec_norm(&closed);
    let degenerate = closed_norm < 1e-10 * (1.0 + mu.norm_sqr() + nu * nu);
    let mut v = if degenerate {
        null_vector(&shifted)
    } else {
        closed / C64::new(closed_norm, 0.0)
    };
    // The closed form loses digits by cancellation in aν² + μ² when b is
    // small; the pivoted null vector does not.
    if degenerate || residual(&v) > 1e-11 * b_norm {
        let alt = null_vector(&shifted);
        let alt = &alt / C64::new(vec_norm(&alt), 0.0);
        if degenerate || residual(&alt) < residual(&v) {
            v = alt;
        }
    } else {
        v /= C64::new(vec_norm(&v), 0.0);
    }
    let norm = vec_norm(&v);
    if !(norm > 0.0) {
        return Err(Error::Numeric("eigenvector vanished".into()));
    }
    v /= C64::new(norm, 0.0);
    let r = residual(&v);
    if r > 1e-8 * b_norm {
        return Err(Error::Numeric(format!(
            "eigenvector residual {r:.3e} exceeds tolerance for mode {n}"
        )));
    }
    Ok(v)
}

/// Eigen-decomposition `B_n = S D S⁻¹` of one mode.
#[derive(Debug, Clone)]
pub struct ModalSystem {
    pub n: usize,
    pub nu: f64,
    pub matrix: CMat,
    pub eigenvalues: [C64; 3],
    pub s: CMat,
    pub s_inv: CMat,
    pub d: CMat,
    pub diagonalizable: bool,
    /// Frobenius condition number of `S`; infinite when `S` is singular.
    pub condition: f64,
}

impl ModalSystem {
    pub fn build(n: usize, coeffs: &DerivedCoefficients, l: f64) -> Result<Self> {
        let nu = wavenumber(n, l)?;
        let matrix = real_to_complex(&modal_matrix(n, coeffs, l)?);
        let eigenvalues = cubic_eigenvalues(n, coeffs, l)?;
        diagonalize(n, nu, matrix, eigenvalues, coeffs, l)
    }

    /// Evaluator of `exp_τ(−B_n, ·)`: the diagonal shortcut when available,
    /// the direct series otherwise.
    pub fn kernel(&self, tau: f64) -> Result<Box<dyn DelayedExpKernel>> {
        if self.diagonalizable {
            let neg: Vec<C64> = self.eigenvalues.iter().map(|m| -m).collect();
            Ok(Box::new(DiagonalizedExp::new(
                self.s.clone(),
                neg,
                self.s_inv.clone(),
                tau,
            )?))
        } else {
            Ok(Box::new(DelayedExpEvaluator::new(-&self.matrix, tau)?))
        }
    }

    pub fn direct_kernel(&self, tau: f64) -> Result<DelayedExpEvaluator> {
        DelayedExpEvaluator::new(-&self.matrix, tau)
    }
}

/// Assembles `S` from unit eigenvectors, inverts it by the adjugate formula
/// and decides whether the diagonal path is trustworthy.
pub fn diagonalize(
    n: usize,
    nu: f64,
    matrix: CMat,
    eigenvalues: [C64; 3],
    coeffs: &DerivedCoefficients,
    l: f64,
) -> Result<ModalSystem> {
    let d = CMat::from_diagonal(&CVec::from_vec(eigenvalues.to_vec()));
    if n == 0 {
        return Ok(ModalSystem {
            n,
            nu,
            matrix,
            eigenvalues,
            s: CMat::identity(3, 3),
            s_inv: CMat::identity(3, 3),
            d,
            diagonalizable: true,
            condition: 3.0,
        });
    }
    let mut s = CMat::zeros(3, 3);
    for (k, &mu) in eigenvalues.iter().enumerate() {
        s.set_column(k, &eigenvector(mu, k, n, coeffs, l)?);
    }
    let max_mu = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let min_gap = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .map(|&(i, j)| (eigenvalues[i] - eigenvalues[j]).norm())
        .fold(f64::INFINITY, f64::min);
    let det = det3(&s);
    let s_norm = frobenius(&s);
    let inverse = adjugate_inverse3(&s);
    let well_separated = min_gap >= 1e-8 * (1.0 + max_mu);
    let invertible = det.norm() >= 1e-12 * s_norm.powi(3);
    let (s_inv, condition, diagonalizable) = match inverse {
        Some(inv) if well_separated && invertible => {
            let cond = condition_frobenius(&s, &inv);
            (inv, cond, true)
        }
        Some(inv) => {
            let cond = condition_frobenius(&s, &inv);
            (inv, cond, false)
        }
        None => (CMat::zeros(3, 3), f64::INFINITY, false),
    };
    Ok(ModalSystem {
        n,
        nu,
        matrix,
        eigenvalues,
        s,
        s_inv,
        d,
        diagonalizable,
        condition,
    })
}
