//! Critical speed over a grid of `(a, b)`, evaluated in parallel.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{sigma_bounds, theorem3_speed_cap};
use crate::error::{Error, Result};
use crate::io::{Format, SweepRow};
use crate::model::{Mode, ModelParams};
use crate::nonlocal::{continue_theta_alpha, ContinuationSchedule, SolverOptions};
use crate::shooting::{sigma_star, ShootOptions};

/// Environment variable capping the number of sweep threads.
pub const THREADS_ENV: &str = "FRONTLAB_THREADS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    /// `(start, stop, step)`, both ends included.
    pub a_range: (f64, f64, f64),
    pub b_values: Vec<f64>,
    pub mode: Mode,
    pub lambda: Option<f64>,
    pub output: PathBuf,
    pub format: Format,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let (start, stop, step) = self.a_range;
        if ![start, stop, step].iter().all(|x| x.is_finite()) || !(step > 0.0) || stop < start {
            return Err(Error::InvalidArgument(format!(
                "a range needs step > 0 and stop >= start, got {start}:{stop}:{step}"
            )));
        }
        if self.b_values.is_empty() {
            return Err(Error::InvalidArgument(
                "at least one b value is required".into(),
            ));
        }
        let lambda = match (self.mode, self.lambda) {
            (Mode::Nonlocal, None) => {
                return Err(Error::InvalidArgument(
                    "nonlocal sweeps require lambda".into(),
                ))
            }
            (Mode::Local, Some(l)) if l != 0.0 => {
                return Err(Error::LocalRequiresZeroLambda { lambda: l })
            }
            (_, l) => l.unwrap_or(0.0),
        };
        // every point must be admissible so rows never carry undefined bounds
        for &b in &self.b_values {
            ModelParams::new(start, b, lambda)?.validate(self.mode)?;
        }
        Ok(())
    }

    /// Values of `a`, computed as `start + k step` so they do not drift.
    pub fn a_values(&self) -> Vec<f64> {
        let (start, stop, step) = self.a_range;
        let count = ((stop - start) / step + 1e-9).floor() as usize;
        (0..=count).map(|k| start + k as f64 * step).collect()
    }

    /// Points in output order: `b` outer, `a` inner.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let a = self.a_values();
        self.b_values
            .iter()
            .flat_map(|&b| a.iter().map(move |&a| (a, b)))
            .collect()
    }
}

/// Thread count from [`THREADS_ENV`], if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .filter(|&n| n > 0)
}

fn local_row(a: f64, b: f64, tol: f64, opts: &ShootOptions) -> SweepRow {
    let row = |bounds: Option<crate::bounds::SigmaBounds>, star: Option<f64>, status: String| {
        let (lo, hi, lb, ub) = match bounds {
            Some(s) => (
                s.lower,
                s.upper,
                s.lower_branch.to_string(),
                s.upper_branch.to_string(),
            ),
            None => (f64::NAN, f64::NAN, String::new(), String::new()),
        };
        SweepRow {
            a,
            b,
            sigma_lower: lo,
            sigma_upper: hi,
            sigma_star: star,
            lower_branch: lb,
            upper_branch: ub,
            status,
        }
    };
    let p = match ModelParams::local(a, b) {
        Ok(p) => p,
        Err(e) => return row(None, None, format!("invalid: {e}")),
    };
    let bounds = sigma_bounds(&p);
    match sigma_star(&p, tol, opts) {
        Ok(r) if r.bounds_check.holds => row(Some(bounds), Some(r.sigma_star), "ok".into()),
        Ok(r) => row(Some(bounds), Some(r.sigma_star), "sandwich-violated".into()),
        Err(e @ Error::InconclusiveRegion { .. }) => {
            row(Some(bounds), None, format!("inconclusive: {e}"))
        }
        Err(e) => row(Some(bounds), None, format!("failed: {e}")),
    }
}

/// Nonlocal rows carry the range `[2, cap]` with the speed ceiling as upper end.
fn nonlocal_row(
    a: f64,
    b: f64,
    lambda: f64,
    schedule: &ContinuationSchedule,
    opts: &SolverOptions,
) -> SweepRow {
    let mut row = SweepRow {
        a,
        b,
        sigma_lower: 2.0,
        sigma_upper: f64::NAN,
        sigma_star: None,
        lower_branch: "trivial-2".into(),
        upper_branch: "nonlocal-cap".into(),
        status: String::new(),
    };
    let p = match ModelParams::new(a, b, lambda).and_then(|p| p.validate(Mode::Nonlocal)) {
        Ok(p) => p,
        Err(e) => {
            row.status = format!("invalid: {e}");
            return row;
        }
    };
    row.sigma_upper = theorem3_speed_cap(&p).unwrap_or(f64::NAN);
    match continue_theta_alpha(&p, schedule, opts) {
        Ok(r) => {
            row.sigma_star = Some(r.sigma);
            row.status = if r.warnings.is_empty() {
                "ok".into()
            } else {
                format!("warning: {}", r.warnings.join("; "))
            };
        }
        Err(e) => row.status = format!("failed: {e}"),
    }
    row
}

/// Evaluates every point of `spec`; failures are recorded per row.
/// Rows come back in the order of [`SweepSpec::points`] regardless of the
/// thread count.
pub fn run_sweep(
    spec: &SweepSpec,
    tol: f64,
    shoot: &ShootOptions,
    schedule: &ContinuationSchedule,
    solver: &SolverOptions,
) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let points = spec.points();
    let eval = |&(a, b): &(f64, f64)| match (spec.mode, spec.lambda) {
        (Mode::Nonlocal, Some(l)) => nonlocal_row(a, b, l, schedule, solver),
        _ => local_row(a, b, tol, shoot),
    };
    let run = || points.par_iter().map(eval).collect::<Vec<_>>();
    match thread_cap() {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Io(e.to_string()))?;
            Ok(pool.install(run))
        }
        None => Ok(run()),
    }
}
