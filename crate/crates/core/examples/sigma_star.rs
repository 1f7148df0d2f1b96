//! Critical speed of the local model by shooting, compared with its bounds.
//!
//! Usage: `cargo run --example sigma_star -- [a] [b] [tol]`

use frontlab::shooting::{classify, sigma_star, ShootOptions};
use frontlab::ModelParams;

fn main() -> frontlab::Result<()> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .map(|s| s.parse().expect("numeric argument"))
        .collect();
    let (a, b, tol) = match args.as_slice() {
        [a, b, t] => (*a, *b, *t),
        [a, b] => (*a, *b, 1e-6),
        _ => (20.0, 0.0, 1e-6),
    };
    let p = ModelParams::local(a, b)?;
    let opts = ShootOptions::default();
    let r = sigma_star(&p, tol, &opts)?;
    let bounds = r.bounds_check.bounds;
    println!("a = {a}, b = {b}");
    println!(
        "sigma* = {:.8}  bracket [{:.8}, {:.8}]  ({} shots)",
        r.sigma_star, r.bracket[0], r.bracket[1], r.evaluations
    );
    println!(
        "bounds [{:.8}, {:.8}] ({} / {}): {}",
        bounds.lower,
        bounds.upper,
        bounds.lower_branch,
        bounds.upper_branch,
        if r.bounds_check.holds {
            "inside"
        } else {
            "VIOLATED"
        }
    );
    for s in [r.bracket[0] - 0.05, r.bracket[1] + 0.05] {
        println!("classify({s:.4}) = {:?}", classify(&p, s, &opts)?.kind);
    }
    Ok(())
}
