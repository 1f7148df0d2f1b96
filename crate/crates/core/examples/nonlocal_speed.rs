//! Follows a nonlocal front as the cutoff level goes to zero and the domain grows.
//!
//! Usage: `cargo run --example nonlocal_speed -- [a] [b] [lambda]`

use std::time::Instant;

use frontlab::nonlocal::{continue_theta_alpha, ContinuationSchedule, SolverOptions};
use frontlab::ModelParams;

fn main() -> frontlab::Result<()> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .map(|s| s.parse().expect("numeric argument"))
        .collect();
    let (a, b, lambda) = match args.as_slice() {
        [a, b, l] => (*a, *b, *l),
        _ => (1.0, 1.0, 2.0),
    };
    let p = ModelParams::new(a, b, lambda)?;
    let start = Instant::now();
    let rep = continue_theta_alpha(
        &p,
        &ContinuationSchedule::default(),
        &SolverOptions::default(),
    )?;
    println!(
        "{:>8} {:>10} {:>14} {:>7} {:>7}",
        "alpha", "theta", "sigma", "newton", "picard"
    );
    for e in &rep.table {
        println!(
            "{:>8} {:>10.1e} {:>14.8} {:>7} {:>7}",
            e.alpha, e.theta, e.sigma, e.newton, e.picard
        );
    }
    println!("sigma at the deepest level: {:.6}", rep.sigma);
    if let Some(x) = rep.extrapolated {
        println!("extrapolated to theta = 0:  {x:.6}");
    }
    for w in &rep.warnings {
        println!("warning: {w}");
    }
    println!("elapsed: {:.1} s", start.elapsed().as_secs_f64());
    Ok(())
}
