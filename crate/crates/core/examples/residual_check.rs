//! PDE residuals of a reconstructed field on two grids; halving both steps
//! should cut them by about four.

use delaytherm::model::{uniform_grid, PhysicalParameters, ProblemSpec, SpatialData};
use delaytherm::thermo::{residual_check, simulate_on};

fn main() -> delaytherm::Result<()> {
    let tau = 0.2;
    let physical = PhysicalParameters::unit();
    let initial = SpatialData::Modal(vec![[0.0; 3], [1.0, 0.0, 0.5], [0.0, 0.3, 0.0]]);
    let spec = ProblemSpec::new(physical, tau, 0.6, 3, initial)?;
    let mut previous = None;
    for (nx, per_delay) in [(32, 10), (64, 20), (128, 40)] {
        let x_grid = uniform_grid(0.0, physical.l, physical.l / nx as f64);
        let t_grid = uniform_grid(-tau, spec.horizon, tau / per_delay as f64);
        let field = simulate_on(&spec, &x_grid, &t_grid, false)?;
        let r = residual_check(&field, &spec)?;
        let ratio = previous.map_or(String::new(), |p: f64| format!("  ratio {:.2}", p / r.max()));
        println!("nx = {nx:<4} residuals {:.3e} {:.3e} {:.3e}{ratio}", r.res1, r.res2, r.res3);
        previous = Some(r.max());
    }
    Ok(())
}
