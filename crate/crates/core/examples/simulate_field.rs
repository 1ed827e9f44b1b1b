//! Full simulation from a localized initial temperature, reporting a few
//! samples of the reconstructed displacement and temperature. The delay is
//! kept small relative to the fastest retained mode, which would otherwise
//! grow.

use delaytherm::model::{PhysicalParameters, ProblemSpec, SpatialData};
use delaytherm::thermo::simulate;

fn main() -> delaytherm::Result<()> {
    let physical = PhysicalParameters::unit();
    let l = physical.l;
    let initial = SpatialData::evaluator(move |x| {
        let bump = (-((x - 0.5 * l) / 0.3).powi(2)).exp();
        [0.0, 0.0, bump]
    });
    let spec = ProblemSpec::new(physical, 0.01, 0.5, 8, initial)?;
    let field = simulate(&spec, true)?;
    println!("{} x {} samples", field.nt(), field.nx());
    let mid = field.nx() / 2;
    for it in (0..field.nt()).step_by(field.nt() / 5) {
        println!(
            "t = {:.3}  u(l/2) = {:+.6e}  theta(l/2) = {:+.6e}",
            field.t_grid[it],
            field.u_at(it, mid),
            field.theta_at(it, mid)
        );
    }
    Ok(())
}
