//! Front profile of the local model at its critical speed, written as CSV.
//!
//! Usage: `cargo run --example profile -- [a] [b] > profile.csv`

use frontlab::io::profile_to_csv;
use frontlab::shooting::{profile_from_shot, sigma_star, ShootOptions};
use frontlab::{Grid1D, ModelParams};

fn main() -> frontlab::Result<()> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .map(|s| s.parse().expect("numeric argument"))
        .collect();
    let (a, b) = match args.as_slice() {
        [a, b] => (*a, *b),
        _ => (10.0, 5.0),
    };
    let p = ModelParams::local(a, b)?;
    let opts = ShootOptions::default();
    let sigma = sigma_star(&p, 1e-6, &opts)?.bracket[1];
    let prof = profile_from_shot(&p, sigma, &Grid1D::with_spacing(20.0, 0.05)?, &opts)?;
    let check = prof.check_invariants(1e-12);
    eprintln!(
        "sigma = {sigma:.6}, monotone = {}, bounded = {}",
        check.monotone, check.bounded
    );
    print!("{}", profile_to_csv(&prof)?);
    Ok(())
}
