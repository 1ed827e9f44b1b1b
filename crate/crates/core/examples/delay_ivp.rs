//! A forced linear delay system solved in closed form and by the method of
//! steps on the same grid.

use delaytherm::delay_ode::{solve_closed_form, solve_method_of_steps, trajectory_distance, DelayIvp, Signal};
use delaytherm::linalg::{CMat, CVec};
use delaytherm::model::uniform_grid;
use delaytherm::C64;

fn main() -> delaytherm::Result<()> {
    let c = |x: f64| C64::new(x, 0.0);
    let m = CMat::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.3].map(c));
    let tau = 0.4;
    let x0 = CVec::from_vec(vec![c(1.0), c(0.0)]);
    let history = Signal::function(move |t| CVec::from_vec(vec![c(1.0 + t), c(0.5 * t)]));
    let forcing = Signal::function(move |t| CVec::from_vec(vec![c(0.0), c(t.sin())]));
    let ivp = DelayIvp::new(m, tau, x0, history, forcing, 2.0)?;

    let grid = uniform_grid(0.0, 2.0, 0.1);
    let closed = solve_closed_form(&ivp, &grid)?;
    let steps = solve_method_of_steps(&ivp, &grid, tau / 200.0)?;
    for (t, x) in closed.times.iter().zip(&closed.states).step_by(4) {
        println!("t = {t:.1}  x = ({:+.6}, {:+.6})", x[0].re, x[1].re);
    }
    println!("closed form vs method of steps: {:.2e}", trajectory_distance(&closed, &steps)?);
    Ok(())
}
