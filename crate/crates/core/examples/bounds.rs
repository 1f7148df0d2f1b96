//! Prints the closed-form speed bounds along `a` for the three panels
//! `b = 0, 5, 40`, and the breakpoint `a*` of the `b = 0` upper bound.

use frontlab::bounds::{a_star, sigma_bounds, verify_subsolution};
use frontlab::ModelParams;

fn main() -> frontlab::Result<()> {
    let root = a_star(1e-14)?;
    println!(
        "a* = {:.12} (cubic residual {:.1e})",
        root.value, root.residual
    );
    for b in [0.0, 5.0, 40.0] {
        println!("\nb = {b}");
        println!("{:>5} {:>10} {:>10}  branches", "a", "lower", "upper");
        for a in (0..=40).step_by(5) {
            let s = sigma_bounds(&ModelParams::local(a as f64, b)?);
            println!(
                "{a:>5} {:>10.6} {:>10.6}  {} / {}",
                s.lower, s.upper, s.lower_branch, s.upper_branch
            );
        }
    }
    let sub = verify_subsolution(&ModelParams::local(1.0, 1.0)?, 2.0, 1.0, 400)?;
    println!(
        "\nsubsolution at a = b = 1, sigma = 2: holds = {}, margin {:.3e}",
        sub.holds, sub.worst_margin
    );
    Ok(())
}
