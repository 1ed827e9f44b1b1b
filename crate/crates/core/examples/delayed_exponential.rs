//! Delayed matrix exponential: scalar values, the shifted derivative identity,
//! and how `exp_τ(−M, t − τ)` approaches `exp(−M t)` as the delay shrinks.

use delaytherm::delayed_exp::{classical_exp_matrix, delayed_exp_matrix_direct, delayed_exp_scalar};
use delaytherm::linalg::CMat;
use delaytherm::C64;

fn main() -> delaytherm::Result<()> {
    for t in [-0.5, 0.5, 1.5, 2.5] {
        let v = delayed_exp_scalar(C64::new(1.0, 0.0), 1.0, t)?;
        println!("exp_1(1, {t:4.1}) = {:.6}", v.re);
    }

    let m = CMat::from_row_slice(2, 2, &[0.0, 0.5, -0.5, 0.2].map(|x| C64::new(x, 0.0)));
    let (tau, t, h) = (0.3, 0.8, 1e-6);
    let fd = (delayed_exp_matrix_direct(&m, tau, t + h)? - delayed_exp_matrix_direct(&m, tau, t - h)?)
        / C64::new(2.0 * h, 0.0);
    let identity = &m * delayed_exp_matrix_direct(&m, tau, t - tau)?;
    println!("derivative identity gap: {:.2e}", (fd - identity).norm());

    let neg = -&m;
    for tau in [0.2, 0.1, 0.05, 0.025] {
        let gap = (delayed_exp_matrix_direct(&neg, tau, 1.0 - tau)? - classical_exp_matrix(&neg, 1.0)?).norm();
        println!("tau = {tau:<6} |exp_tau(-M, 1 - tau) - exp(-M)| = {gap:.3e}");
    }
    Ok(())
}
