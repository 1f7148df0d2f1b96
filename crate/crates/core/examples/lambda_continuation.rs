//! Nonlocal speed for shrinking screening length, next to the local
//! critical speed.
//!
//! Usage: `cargo run --release --example lambda_continuation -- [a] [b]`

use frontlab::nonlocal::{lambda_continuation, ContinuationSchedule, SolverOptions};

fn main() -> frontlab::Result<()> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .map(|s| s.parse().expect("numeric argument"))
        .collect();
    let (a, b) = match args.as_slice() {
        [a, b] => (*a, *b),
        _ => (1.0, 0.0),
    };
    let t = lambda_continuation(
        a,
        b,
        &[1.0, 0.5, 0.25, 0.1],
        &ContinuationSchedule::default(),
        &SolverOptions::default(),
    )?;
    println!("local sigma* = {:.8}", t.sigma_local);
    println!(
        "{:>7} {:>12} {:>14} {:>12}",
        "lambda", "sigma", "extrapolated", "|distance|"
    );
    for r in &t.rows {
        let x = r
            .extrapolated
            .map(|x| format!("{x:.8}"))
            .unwrap_or_default();
        println!(
            "{:>7} {:>12.8} {:>14} {:>12.3e}",
            r.lambda, r.sigma, x, r.distance
        );
    }
    for s in &t.skipped {
        println!("skipped lambda = {}: {}", s.lambda, s.reason);
    }
    println!("distance strictly decreasing: {}", t.distance_decreasing);
    Ok(())
}
