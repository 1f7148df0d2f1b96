use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::helmholtz::{potential_from_phi, velocity};
use crate::interp::MonotoneCubic;
use crate::model::ModelParams;
use crate::profile::WaveProfile;
use crate::shooting::{sigma_star, ShootOptions};

use super::solve::{solve_truncated_with, Seed};
use super::{validate_nonlocal, NonlocalSolveReport, SolverOptions, TruncationConfig};

/// Pin levels used by default: coarse steps down to 0.01, then decades down
/// to 1e-30. The speed deficit of the cutoff decays only like `1/ln^2(theta)`,
/// so the deep levels are what bring `sigma` close to its limit.
pub fn default_thetas() -> Vec<f64> {
    vec![
        0.2, 0.1, 0.05, 0.02, 0.01, 1e-3, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12, 1e-15, 1e-18, 1e-21,
        1e-24, 1e-27, 1e-30,
    ]
}

/// `theta` levels (decreasing), half-widths (increasing) and grid spacing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuationSchedule {
    pub thetas: Vec<f64>,
    pub alphas: Vec<f64>,
    pub h: f64,
    /// Cutoff ramp width as a multiple of `theta`.
    pub ramp_ratio: f64,
}

impl Default for ContinuationSchedule {
    fn default() -> Self {
        Self {
            thetas: default_thetas(),
            alphas: vec![40.0, 80.0, 130.0],
            h: 0.01,
            ramp_ratio: 1.0,
        }
    }
}

impl ContinuationSchedule {
    pub fn new(thetas: Vec<f64>, alphas: Vec<f64>, h: f64) -> Result<Self> {
        let s = Self {
            thetas,
            alphas,
            h,
            ramp_ratio: 1.0,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.thetas.is_empty() || self.alphas.is_empty() {
            return Err(Error::InvalidArgument(
                "continuation schedules must be nonempty".into(),
            ));
        }
        if let Some(&t) = self.thetas.iter().find(|t| !(**t > 0.0 && **t < 1.0 / 3.0)) {
            return Err(Error::ThetaOutOfRange { theta: t });
        }
        if self.thetas.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::InvalidArgument(
                "theta schedule must be strictly decreasing".into(),
            ));
        }
        if self.alphas.windows(2).any(|w| !(w[1] > w[0])) || !(self.alphas[0] > 0.0) {
            return Err(Error::InvalidArgument(
                "alpha schedule must be positive and strictly increasing".into(),
            ));
        }
        if !(self.h.is_finite() && self.h > 0.0) || !(self.ramp_ratio > 0.0) {
            return Err(Error::InvalidArgument(
                "grid spacing and ramp ratio must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Whether `(theta, alpha)` is solved. Beyond the hard requirement
    /// `alpha > max(-ln theta, (lambda/2) ln 3)`, the front needs room on both
    /// sides of the pin: about `-ln theta` between the pin and the front center,
    /// and roughly 25 units for the left tail to reach 1.
    pub fn admits(&self, theta: f64, alpha: f64, lambda: f64) -> bool {
        alpha > TruncationConfig::min_alpha(theta, lambda) && alpha >= -theta.ln() + 25.0
    }

    fn config(&self, theta: f64, alpha: f64) -> TruncationConfig {
        let width = (self.ramp_ratio * theta).min(1.0 - theta);
        TruncationConfig::new(theta, alpha).with_smoothing(width)
    }

    /// Same schedule with half the grid spacing.
    pub fn refined(&self) -> Self {
        Self {
            h: 0.5 * self.h,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaEntry {
    pub theta: f64,
    pub alpha: f64,
    pub sigma: f64,
    pub newton: usize,
    pub picard: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuationReport {
    pub params: ModelParams,
    pub table: Vec<SigmaEntry>,
    /// Solve at the deepest `theta` of the largest `alpha`.
    pub final_report: NonlocalSolveReport,
    /// The final profile translated so that `phi(0) = 1/2`, with `u` recomputed.
    pub centered: WaveProfile,
    /// Speed at the deepest `theta` of the largest `alpha`.
    pub sigma: f64,
    /// Two-point extrapolation of `sigma` to `theta = 0`, see [`extrapolate_sigma`].
    pub extrapolated: Option<f64>,
    /// First solve of the schedule, reusable as a starting point elsewhere.
    pub initial: Seed,
    pub warnings: Vec<String>,
}

impl ContinuationReport {
    pub fn sigma_at(&self, theta: f64, alpha: f64) -> Option<f64> {
        self.table
            .iter()
            .find(|e| e.theta == theta && e.alpha == alpha)
            .map(|e| e.sigma)
    }
}

/// Extrapolates `sigma(theta)` to `theta = 0` assuming
/// `sigma(theta) = sigma_0 - c / ln^2(theta)`, from two levels.
pub fn extrapolate_sigma(theta1: f64, sigma1: f64, theta2: f64, sigma2: f64) -> f64 {
    let x1 = theta1.ln().powi(-2);
    let x2 = theta2.ln().powi(-2);
    sigma2 + (sigma2 - sigma1) * x2 / (x1 - x2)
}

/// Solves at `theta`, and on failure retries through geometric midpoints
/// between the seed level and `theta`.
fn solve_step(
    p: &ModelParams,
    schedule: &ContinuationSchedule,
    grid: &Grid1D,
    theta: f64,
    seed: Option<&Seed>,
    opts: &SolverOptions,
    depth: usize,
    extra: &mut Vec<NonlocalSolveReport>,
) -> Result<NonlocalSolveReport> {
    let cfg = schedule.config(theta, grid.alpha());
    match solve_truncated_with(p, &cfg, grid, seed, opts) {
        Ok(r) => Ok(r),
        Err(e) => match seed {
            Some(s) if depth < 4 && s.theta > theta * (1.0 + 1e-12) => {
                let mid = (s.theta * theta).sqrt();
                let r_mid = solve_step(p, schedule, grid, mid, seed, opts, depth + 1, extra)?;
                let next = Seed::from_report(&r_mid);
                extra.push(r_mid);
                solve_step(
                    p,
                    schedule,
                    grid,
                    theta,
                    Some(&next),
                    opts,
                    depth + 1,
                    extra,
                )
            }
            _ => Err(e),
        },
    }
}

/// Translates `prof` so that it crosses 1/2 at the grid midpoint.
fn recenter(p: &ModelParams, prof: &WaveProfile, opts: &SolverOptions) -> Result<WaveProfile> {
    let grid = prof.grid;
    let curve = MonotoneCubic::new(grid.nodes(), prof.phi.clone(), None)?;
    let i = prof
        .phi
        .windows(2)
        .position(|w| w[0] >= 0.5 && w[1] < 0.5)
        .ok_or_else(|| Error::InvalidArgument("profile never crosses 1/2".into()))?;
    let (mut lo, mut hi) = (grid.xi(i), grid.xi(i + 1));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if curve.eval(mid) >= 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let c = 0.5 * (lo + hi);
    let mut phi: Vec<f64> = grid.nodes().iter().map(|x| curve.eval(x + c)).collect();
    phi[grid.mid()] = 0.5;
    let field = potential_from_phi(p, &grid, &phi, opts.convolution)?;
    let v = velocity(&field);
    WaveProfile::new(grid, phi, prof.sigma, prof.theta)?.with_potential(field.u, v)
}

/// [`continue_theta_alpha_from`] without a starting solution.
pub fn continue_theta_alpha(
    p: &ModelParams,
    schedule: &ContinuationSchedule,
    opts: &SolverOptions,
) -> Result<ContinuationReport> {
    continue_theta_alpha_from(p, schedule, opts, None)
}

/// Follows the truncated solution over the schedule: `alpha` increases in
/// the outer loop, `theta` decreases in the inner loop. Each solve starts
/// from the same `theta` at the previous `alpha` when available, else from
/// the previous `theta`, else from `seed`, else cold.
pub fn continue_theta_alpha_from(
    p: &ModelParams,
    schedule: &ContinuationSchedule,
    opts: &SolverOptions,
    seed: Option<&Seed>,
) -> Result<ContinuationReport> {
    let p = validate_nonlocal(p)?;
    schedule.validate()?;
    let mut table = Vec::new();
    let mut warnings = Vec::new();
    let mut per_theta: Vec<Option<Seed>> = vec![None; schedule.thetas.len()];
    let mut initial: Option<Seed> = None;
    let mut last: Option<NonlocalSolveReport> = None;
    for &alpha in &schedule.alphas {
        let grid = Grid1D::with_spacing(alpha, schedule.h)?;
        let mut prev: Option<Seed> = None;
        for (k, &theta) in schedule.thetas.iter().enumerate() {
            if !schedule.admits(theta, alpha, p.lambda) {
                continue;
            }
            let start = per_theta[k]
                .as_ref()
                .or(prev.as_ref())
                .or(if initial.is_none() { seed } else { None });
            let mut extra = Vec::new();
            let report = solve_step(&p, schedule, &grid, theta, start, opts, 0, &mut extra)
                .map_err(|e| Error::ContinuationBroken {
                    stage: format!("theta = {theta:e}, alpha = {alpha}"),
                    reason: e.to_string(),
                })?;
            for r in extra.iter().chain(std::iter::once(&report)) {
                table.push(SigmaEntry {
                    theta: r.config.theta,
                    alpha,
                    sigma: r.sigma,
                    newton: r.iterations.newton,
                    picard: r.iterations.picard,
                });
            }
            let s = Seed::from_report(&report);
            if initial.is_none() {
                initial = Some(s.clone());
            }
            per_theta[k] = Some(s.clone());
            prev = Some(s);
            last = Some(report);
        }
    }
    let final_report = last.ok_or_else(|| {
        Error::InvalidArgument("no admissible (theta, alpha) pair in the schedule".into())
    })?;
    let final_alpha = final_report.config.alpha;
    let mut at_final: Vec<SigmaEntry> = table
        .iter()
        .copied()
        .filter(|e| e.alpha == final_alpha)
        .collect();
    at_final.sort_by(|a, b| b.theta.partial_cmp(&a.theta).unwrap());
    if at_final.windows(2).any(|w| w[1].sigma < w[0].sigma - 1e-6) {
        warnings.push(format!("NonmonotoneSigma: sigma(theta) at alpha = {final_alpha} does not increase as theta decreases"));
    }
    let extrapolated = match at_final.as_slice() {
        [.., e1, e2] => Some(extrapolate_sigma(e1.theta, e1.sigma, e2.theta, e2.sigma)),
        _ => None,
    };
    for d in final_report.failed() {
        warnings.push(format!(
            "diagnostic `{}` fails: {:e} > {:e}",
            d.name, d.lhs, d.rhs
        ));
    }
    let centered = recenter(&p, &final_report.profile, opts)?;
    Ok(ContinuationReport {
        params: p,
        table,
        sigma: final_report.sigma,
        centered,
        final_report,
        extrapolated,
        initial: initial.expect("at least one solve"),
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaRow {
    pub lambda: f64,
    pub sigma: f64,
    pub extrapolated: Option<f64>,
    /// `|sigma - sigma_local|`.
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedLambda {
    pub lambda: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaTable {
    pub a: f64,
    pub b: f64,
    /// Critical speed of the local model from shooting.
    pub sigma_local: f64,
    pub rows: Vec<LambdaRow>,
    pub skipped: Vec<SkippedLambda>,
    /// Whether `|sigma(lambda) - sigma_local|` strictly decreases along the rows.
    pub distance_decreasing: bool,
}

/// Runs the `(theta, alpha)` continuation for each screening length in
/// `lambdas` (strictly decreasing), starting each from the previous one.
/// Lengths with `b / (2 lambda^2) >= 1` are skipped with a reason.
pub fn lambda_continuation(
    a: f64,
    b: f64,
    lambdas: &[f64],
    schedule: &ContinuationSchedule,
    opts: &SolverOptions,
) -> Result<LambdaTable> {
    let local = ModelParams::local(a, b)?;
    if lambdas.is_empty() || lambdas.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidArgument(
            "lambda list must be nonempty and strictly decreasing".into(),
        ));
    }
    let sigma_local = sigma_star(&local, 1e-6, &ShootOptions::default())?.sigma_star;
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    let mut seed: Option<Seed> = None;
    for &lambda in lambdas {
        let p = ModelParams::new(a, b, lambda)?;
        if !p.is_nonlocal_solvable() {
            skipped.push(SkippedLambda {
                lambda,
                reason: format!("b/(2 lambda^2) = {} is not below 1", p.nonlocal_ratio()),
            });
            continue;
        }
        let report =
            match continue_theta_alpha_from(&p, schedule, opts, seed.as_ref()) {
                Ok(r) => r,
                Err(first) => continue_theta_alpha_from(&p, &schedule.refined(), opts, None)
                    .map_err(|e| Error::ContinuationBroken {
                        stage: format!("lambda = {lambda}"),
                        reason: format!("{first}; retry with h = {}: {e}", 0.5 * schedule.h),
                    })?,
            };
        seed = Some(report.initial.clone());
        rows.push(LambdaRow {
            lambda,
            sigma: report.sigma,
            extrapolated: report.extrapolated,
            distance: (report.sigma - sigma_local).abs(),
        });
    }
    let distance_decreasing = rows.windows(2).all(|w| w[1].distance < w[0].distance);
    Ok(LambdaTable {
        a,
        b,
        sigma_local,
        rows,
        skipped,
        distance_decreasing,
    })
}
