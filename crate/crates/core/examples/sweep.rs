//! Numeric critical speed against its bounds for `a = 0..40` and
//! `b = 0, 5, 40`. Writes `sweep.csv` in the working directory.

use frontlab::io::{Format, Record};
use frontlab::nonlocal::{ContinuationSchedule, SolverOptions};
use frontlab::shooting::ShootOptions;
use frontlab::sweep::{run_sweep, SweepSpec};
use frontlab::Mode;

fn main() -> frontlab::Result<()> {
    let spec = SweepSpec {
        a_range: (0.0, 40.0, 1.0),
        b_values: vec![0.0, 5.0, 40.0],
        mode: Mode::Local,
        lambda: None,
        output: "sweep.csv".into(),
        format: Format::Csv,
    };
    let rows = run_sweep(
        &spec,
        1e-4,
        &ShootOptions::default(),
        &ContinuationSchedule::default(),
        &SolverOptions::default(),
    )?;
    let worst = rows
        .iter()
        .filter_map(|r| {
            r.sigma_star
                .map(|s| (s - r.sigma_lower).min(r.sigma_upper - s))
        })
        .fold(f64::INFINITY, f64::min);
    println!(
        "{} points, {} not ok, smallest distance to a bound {worst:.2e}",
        rows.len(),
        rows.iter().filter(|r| r.status != "ok").count()
    );
    std::fs::write(
        &spec.output,
        frontlab::io::serialize(Record::Sweep(&rows), spec.format)?,
    )?;
    println!("wrote {}", spec.output.display());
    Ok(())
}
