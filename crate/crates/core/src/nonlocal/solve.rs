use serde::{Deserialize, Serialize};

use crate::bounds::theorem3_speed_cap;
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::helmholtz::{potential_from_phi, sup_norm, velocity, PotentialField};
use crate::interp::MonotoneCubic;
use crate::model::ModelParams;
use crate::profile::{central_derivative, trapezoid, Theta, WaveProfile, FLAT_TAIL_TOL};
use crate::shooting::{sigma_star, ShootOptions};

use super::discrete::{bordered_newton, log_newton, LogOperator, NewtonOutcome, Operator};
use super::{
    validate_nonlocal, Diagnostic, Formulation, IterationCounts, NonlocalSolveReport,
    SolverOptions, TruncationConfig,
};

/// A previous solution used to start a new solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Seed {
    pub grid: Grid1D,
    pub phi: Vec<f64>,
    pub sigma: f64,
    pub theta: f64,
}

/// Solution of `phi'' + sigma phi' = 0` with `phi(0) = theta`, `phi(alpha) = 0`.
pub(crate) fn linear_tail(theta: f64, sigma: f64, alpha: f64, xi: f64) -> f64 {
    if (sigma * alpha).abs() < 1e-8 {
        return theta * (1.0 - xi / alpha);
    }
    let e_alpha = (-sigma * alpha).exp();
    theta * ((-sigma * xi).exp() - e_alpha) / (1.0 - e_alpha)
}

impl Seed {
    pub fn from_report(r: &NonlocalSolveReport) -> Self {
        Self {
            grid: r.profile.grid,
            phi: r.profile.phi.clone(),
            sigma: r.sigma,
            theta: r.config.theta,
        }
    }

    /// Decay rate of the front just above the pin level, `-(ln phi)'`.
    fn decay_rate(&self) -> f64 {
        let m = self.grid.mid();
        // both levels above the cutoff ramp and below the bulk of the front
        let upper = (20.0 * self.theta).min(0.5);
        let lower = (5.0 * self.theta).min(0.5 * upper);
        let hi = self.phi[..m].iter().rposition(|&f| f >= upper);
        let lo = self.phi[..m].iter().rposition(|&f| f >= lower);
        let fallback = (0.5 * self.sigma).clamp(0.2, 5.0);
        match (hi, lo) {
            (Some(i), Some(j)) if j > i => {
                let rate = (self.phi[i] / self.phi[j]).ln() / (self.grid.xi(j) - self.grid.xi(i));
                if rate.is_finite() {
                    rate.clamp(0.2, 5.0)
                } else {
                    fallback
                }
            }
            _ => fallback,
        }
    }

    /// Initial guess on `grid` pinned at `theta`: the front part is shifted so
    /// that its extrapolated exponential tail passes through `theta` at 0,
    /// and the part right of the pin is replaced by the exact linear tail.
    pub fn transfer(&self, grid: &Grid1D, theta: f64) -> Result<Vec<f64>> {
        let m = self.grid.mid();
        let kappa = self.decay_rate();
        let shift = (self.theta / theta).ln() / kappa;
        let xs: Vec<f64> = (0..=m).map(|i| self.grid.xi(i)).collect();
        let ys: Vec<f64> = self.phi[..=m]
            .iter()
            .map(|f| f.clamp(f64::MIN_POSITIVE, 1.0).ln())
            .collect();
        let log_front = MonotoneCubic::new(xs, ys, None)?;
        let alpha = grid.alpha();
        let mut phi: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&xi| {
                if xi >= 0.0 {
                    linear_tail(theta, self.sigma, alpha, xi)
                } else {
                    let x = xi + shift;
                    if x <= 0.0 {
                        log_front.eval(x).exp().min(1.0)
                    } else {
                        self.theta * (-kappa * x).exp()
                    }
                }
            })
            .collect();
        phi[0] = 1.0;
        let last = phi.len() - 1;
        phi[last] = 0.0;
        Ok(phi)
    }
}

fn cold_guess(grid: &Grid1D, theta: f64, sigma: f64) -> Vec<f64> {
    let center = -((1.0 - theta) / theta).ln();
    let alpha = grid.alpha();
    let mut phi: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&xi| {
            if xi >= 0.0 {
                linear_tail(theta, sigma, alpha, xi)
            } else {
                1.0 / (1.0 + (xi - center).exp())
            }
        })
        .collect();
    phi[0] = 1.0;
    let last = phi.len() - 1;
    phi[last] = 0.0;
    phi
}

/// Starting speed: the local critical speed when shooting finds it, else 2.
fn initial_sigma(p: &ModelParams) -> f64 {
    ModelParams::local(p.a, p.b)
        .and_then(|q| sigma_star(&q, 1e-6, &ShootOptions::default()))
        .map(|r| r.sigma_star)
        .unwrap_or(2.0)
}

/// Solves one truncated problem from a cold start.
pub fn solve_truncated(
    p: &ModelParams,
    cfg: &TruncationConfig,
    grid: &Grid1D,
) -> Result<NonlocalSolveReport> {
    solve_truncated_with(p, cfg, grid, None, &SolverOptions::default())
}

/// Solves one truncated problem: Picard iteration on `u` around a pinned
/// Newton solve for `(phi, sigma)`.
pub fn solve_truncated_with(
    p: &ModelParams,
    cfg: &TruncationConfig,
    grid: &Grid1D,
    seed: Option<&Seed>,
    opts: &SolverOptions,
) -> Result<NonlocalSolveReport> {
    let p = validate_nonlocal(p)?;
    cfg.validate(&p)?;
    if (cfg.alpha - grid.alpha()).abs() > 1e-12 * cfg.alpha {
        return Err(Error::InvalidArgument(format!(
            "grid half-width {} does not match the configuration ({})",
            grid.alpha(),
            cfg.alpha
        )));
    }
    let theta = cfg.theta;
    let (mut phi, mut sigma) = match seed {
        Some(s) => (s.transfer(grid, theta)?, s.sigma),
        None => {
            let s0 = initial_sigma(&p);
            (cold_guess(grid, theta, s0), s0)
        }
    };
    let m = grid.mid();
    let mut pinned = Pinned::new(cfg, grid, opts.formulation, &phi)?;
    let start = potential_from_phi(&p, grid, &phi, opts.convolution)?;
    let (mut u, mut du) = (start.u, start.du);
    let mut counts = IterationCounts::default();
    let mut change = f64::INFINITY;
    let omega = opts.omega;
    for k in 0..opts.picard_max_iter {
        let out = pinned.newton(&mut phi, &mut sigma, &du, m, opts)?;
        counts.newton += out.iterations;
        counts.sigma_updates += out.iterations;
        counts.picard = k + 1;
        let fresh = potential_from_phi(&p, grid, &phi, opts.convolution)?;
        change = fresh
            .u
            .iter()
            .zip(&u)
            .fold(0.0_f64, |c, (a, b)| c.max((a - b).abs()));
        if change < opts.picard_tol {
            break;
        }
        for i in 0..u.len() {
            u[i] += omega * (fresh.u[i] - u[i]);
            du[i] += omega * (fresh.du[i] - du[i]);
        }
    }
    if !(change < opts.picard_tol) {
        return Err(Error::PicardNotContracting {
            iterations: counts.picard,
            change,
        });
    }
    if !sigma.is_finite() || phi.iter().any(|f| !f.is_finite()) {
        return Err(Error::NonFiniteValue {
            field: "phi".into(),
        });
    }

    let field = potential_from_phi(&p, grid, &phi, opts.convolution)?;
    let v = velocity(&field);
    let profile = WaveProfile::new(*grid, phi, sigma, Theta::new(theta)?)?
        .with_potential(field.u.clone(), v)?;
    let (energy_lhs, energy_rhs, diagnostics) = diagnose(&p, cfg, &profile, &field)?;
    Ok(NonlocalSolveReport {
        params: p,
        config: *cfg,
        profile,
        sigma,
        iterations: counts,
        energy_lhs,
        energy_rhs,
        diagnostics,
    })
}

/// The pinned Newton solve in either formulation.
enum Pinned {
    Direct {
        op: Operator,
        floor: f64,
    },
    LogTail {
        op: LogOperator,
        w: Vec<f64>,
        theta: f64,
    },
}

impl Pinned {
    fn new(cfg: &TruncationConfig, grid: &Grid1D, form: Formulation, phi: &[f64]) -> Result<Self> {
        let g = cfg.g()?;
        Ok(match form {
            Formulation::Direct => Pinned::Direct {
                op: Operator { g, h: grid.h() },
                floor: 1e-3 * cfg.theta,
            },
            Formulation::LogTail => {
                let m = grid.mid();
                let mut w: Vec<f64> = phi[..=m]
                    .iter()
                    .map(|f| f.clamp(cfg.theta, 1.0).ln())
                    .collect();
                w[0] = 0.0;
                w[m] = cfg.theta.ln();
                for i in 1..m {
                    w[i] = w[i].min(w[i - 1]);
                }
                Pinned::LogTail {
                    op: LogOperator {
                        g,
                        h: grid.h(),
                        alpha: cfg.alpha,
                    },
                    w,
                    theta: cfg.theta,
                }
            }
        })
    }

    fn newton(
        &mut self,
        phi: &mut [f64],
        sigma: &mut f64,
        du: &[f64],
        m: usize,
        opts: &SolverOptions,
    ) -> Result<NewtonOutcome> {
        match self {
            Pinned::Direct { op, floor } => bordered_newton(op, phi, sigma, du, m, *floor, opts),
            Pinned::LogTail { op, w, theta } => {
                let out = log_newton(op, w, sigma, &du[..=m], opts)?;
                let n = phi.len() - 1;
                let h = op.h;
                for i in 0..=m {
                    phi[i] = w[i].exp();
                }
                phi[m] = *theta;
                for i in m + 1..n {
                    phi[i] = linear_tail(*theta, *sigma, op.alpha, (i - m) as f64 * h);
                }
                phi[n] = 0.0;
                Ok(out)
            }
        }
    }
}

/// Checks the a-priori inequalities a solution of the truncated problem
/// must satisfy.
fn diagnose(
    p: &ModelParams,
    cfg: &TruncationConfig,
    prof: &WaveProfile,
    field: &PotentialField,
) -> Result<(f64, f64, Vec<Diagnostic>)> {
    let grid = prof.grid;
    let h = grid.h();
    let (theta, alpha, lam) = (cfg.theta, cfg.alpha, p.lambda);
    let sigma = prof.sigma;
    let g = cfg.g()?;
    let phi = &prof.phi;
    let dphi = central_derivative(phi, h);
    let grad_sq = trapezoid(&dphi.iter().map(|d| d * d).collect::<Vec<_>>(), h);
    let reaction = trapezoid(
        &phi.iter()
            .map(|&f| g.eval(f) * f * (1.0 - f).powi(2))
            .collect::<Vec<_>>(),
        h,
    );
    let energy_lhs = (1.0 - p.nonlocal_ratio()) * grad_sq + reaction;
    let energy_rhs = 2.0 + p.a / lam + theta / alpha;
    let (u_sup, du_sup) = (field.u_sup(), field.du_sup());
    let check = prof.check_invariants(0.0);
    let m = grid.mid();
    let tail_dev = (m..grid.len())
        .map(|i| (phi[i] - linear_tail(theta, sigma, alpha, grid.xi(i))).abs())
        .fold(0.0_f64, f64::max)
        / theta;
    let tol = 1e-8;
    let diagnostics = vec![
        Diagnostic::new("energy", energy_lhs, energy_rhs, 10.0 * h * h),
        Diagnostic::new("sigma_lower", -1.2 * theta / alpha, sigma, tol),
        Diagnostic::new("theorem3_cap", sigma, theorem3_speed_cap(p)?, tol),
        Diagnostic::new("sigma_vs_potential", sigma, 2.0 + du_sup, tol),
        Diagnostic::new(
            "derivative_bound",
            sup_norm(&dphi),
            1.5 * (sigma.abs() + du_sup) + 0.75 * lam + 1.5 / lam,
            tol,
        ),
        Diagnostic::new(
            "potential_bound",
            u_sup,
            p.a + p.b / (4.0 * lam) * grad_sq,
            tol,
        ),
        Diagnostic::new("potential_slope", du_sup, u_sup / lam, tol),
        Diagnostic::new("monotone", check.max_increase, FLAT_TAIL_TOL, 0.0),
        Diagnostic::new("nonnegative", -check.min_phi, 0.0, 1e-12),
        Diagnostic::new("at_most_one", check.max_phi, 1.0, 1e-12),
        Diagnostic::new("pin", (phi[m] - theta).abs(), 1e-8, 0.0),
        Diagnostic::new("linear_tail", tail_dev, sigma * sigma * h * h, 0.0),
    ];
    Ok((energy_lhs, energy_rhs, diagnostics))
}
