//! Eigenvalues, eigenvector residuals and conditioning of the first modal
//! matrices for unit material parameters.

use delaytherm::linalg::CMat;
use delaytherm::modal::ModalSystem;
use delaytherm::model::{derive_coefficients, PhysicalParameters};

fn main() -> delaytherm::Result<()> {
    let physical = PhysicalParameters::unit();
    let coeffs = derive_coefficients(&physical)?;
    println!("a = {}, b = {}, c = {}, d = {}", coeffs.a, coeffs.b, coeffs.c, coeffs.d);
    for n in 1..=6 {
        let sys = ModalSystem::build(n, &coeffs, physical.l)?;
        let residual = (0..3)
            .map(|j| {
                let v = sys.s.column(j).into_owned();
                ((CMat::identity(3, 3) * sys.eigenvalues[j] - &sys.matrix) * v).norm()
            })
            .fold(0.0, f64::max);
        let mu: Vec<String> = sys.eigenvalues.iter().map(|z| format!("{:+.4}{:+.4}i", z.re, z.im)).collect();
        println!(
            "n = {n}  mu = [{}]  residual {residual:.1e}  cond(S) {:.2}",
            mu.join(", "),
            sys.condition
        );
    }
    Ok(())
}
