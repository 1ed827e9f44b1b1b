//! Error of the delayed solution against the classical one for a sequence of
//! delays, with the fitted log-log slope.

use delaytherm::model::{PhysicalParameters, ProblemSpec, SpatialData};
use delaytherm::thermo::convergence_study;

fn main() -> delaytherm::Result<()> {
    // A long bar keeps the first modal matrix small, where the error bound applies.
    let physical = PhysicalParameters {
        l: 4.0 * std::f64::consts::PI,
        ..PhysicalParameters::unit()
    };
    let initial = SpatialData::Modal(vec![[0.0; 3], [1.0, 0.5, -0.5]]);
    let spec = ProblemSpec::new(physical, 0.1, 1.0, 2, initial)?;
    let report = convergence_study(&spec, &[0.2, 0.1, 0.05, 0.025], true)?;
    for e in &report.entries {
        println!(
            "tau = {:<6} error {:.4e}  bound {:.4e}  holds {}",
            e.tau, e.sup_error_inf, e.bound, e.bound_holds
        );
    }
    println!("slope {:.3}", report.slope.unwrap_or(f64::NAN));
    Ok(())
}
