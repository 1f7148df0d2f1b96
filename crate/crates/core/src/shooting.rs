//! Phase-plane shooting for the local model (`lambda = 0`).
//!
//! The traveling-wave equation
//! `(1 + b phi'^2) phi'' + sigma phi' + a phi'^2 + phi (1 - phi) = 0`
//! is integrated as a planar system in `(phi, psi = phi')`, starting on the
//! unstable manifold of the saddle `(1, 0)`. A run either reaches the origin
//! from the admissible side (a front exists), crosses `phi = 0` (overshoot),
//! turns upward, or runs out of time.

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::bounds::{sigma_bounds, SigmaBounds};
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::interp::MonotoneCubic;
use crate::model::{Mode, ModelParams, PhaseState};
use crate::ode::{integrate, Finish, IntegratorOptions, Step};
use crate::profile::{Theta, WaveProfile};

/// Vector field of the reduced system.
pub fn rhs_phase(p: &ModelParams, s: PhaseState, sigma: f64) -> (f64, f64) {
    let psi = s.psi;
    let num = -sigma * psi - p.a * psi * psi - s.phi * (1.0 - s.phi);
    (psi, num / (1.0 + p.b * psi * psi))
}

/// Positive root of `l^2 + sigma l - 1 = 0`, the unstable rate at `(1, 0)`.
pub fn unstable_rate(sigma: f64) -> f64 {
    // (-sigma + sqrt(sigma^2 + 4)) / 2 without cancellation for large sigma
    2.0 / (sigma + (sigma * sigma + 4.0).sqrt())
}

/// Starting point a distance `delta` from the saddle along its unstable
/// eigenvector, on the side `phi < 1, psi < 0`.
pub fn saddle_departure(sigma: f64, delta: f64) -> PhaseState {
    PhaseState::new(1.0 - delta, -delta * unstable_rate(sigma))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OutcomeKind {
    Converged,
    Overshoot,
    Turnback,
    Inconclusive,
}

/// Classification of one shooting run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootOutcome {
    pub kind: OutcomeKind,
    pub t_event: f64,
    pub state_event: PhaseState,
}

impl ShootOutcome {
    pub fn converged(&self) -> bool {
        self.kind == OutcomeKind::Converged
    }
}

/// Shooting options. Defaults: `rtol = 1e-10`, `eps_origin = 1e-6`,
/// `eps_turn = 1e-9`, `t_max = 1e4`, `delta = 1e-6`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootOptions {
    pub integrator: IntegratorOptions,
    pub eps_origin: f64,
    pub eps_turn: f64,
    pub t_max: f64,
    pub delta: f64,
}

impl Default for ShootOptions {
    fn default() -> Self {
        Self {
            integrator: IntegratorOptions::default(),
            eps_origin: 1e-6,
            eps_turn: 1e-9,
            t_max: 1e4,
            delta: 1e-6,
        }
    }
}

impl ShootOptions {
    pub fn with_rtol(mut self, rtol: f64) -> Self {
        self.integrator.rtol = rtol;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }
}

/// Sign of the slow-mode coordinate of `s` at the origin, as
/// `psi - mu_fast * phi` with `mu_fast = (-sigma - sqrt(sigma^2 - 4)) / 2`.
///
/// A nonnegative value means the linearized flow reaches the origin without
/// crossing `phi = 0`. Only meaningful for `sigma >= 2` (node or degenerate node).
fn slow_mode_sign(s: &PhaseState, sigma: f64) -> f64 {
    let mu_fast = 0.5 * (-sigma - (sigma * sigma - 4.0).max(0.0).sqrt());
    s.psi - mu_fast * s.phi
}

fn to_state(y: &[f64; 2]) -> PhaseState {
    PhaseState::new(y[0], y[1])
}

fn phase_field(p: ModelParams, sigma: f64) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] {
    move |_, y| {
        let (dphi, dpsi) = rhs_phase(&p, to_state(y), sigma);
        [dphi, dpsi]
    }
}

/// Integrates from the saddle and classifies the run.
pub fn classify(p: &ModelParams, sigma: f64, opts: &ShootOptions) -> Result<ShootOutcome> {
    let p = p.validate(Mode::Local)?;
    if !sigma.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "sigma must be finite, got {sigma}"
        )));
    }
    let start = saddle_departure(sigma, opts.delta);
    let node = sigma * sigma >= 4.0;
    let observer = |step: &Step<2>| {
        let end = to_state(&step.y1);
        if end.phi < 0.0 {
            let (t, y) = step.locate(|y| y[0]);
            return ControlFlow::Break(ShootOutcome {
                kind: OutcomeKind::Overshoot,
                t_event: t,
                state_event: to_state(&y),
            });
        }
        if end.psi > opts.eps_turn && end.phi < 1.0 {
            let (t, y) = step.locate(|y| y[1] - opts.eps_turn);
            return ControlFlow::Break(ShootOutcome {
                kind: OutcomeKind::Turnback,
                t_event: t,
                state_event: to_state(&y),
            });
        }
        if node && end.norm() <= opts.eps_origin && slow_mode_sign(&end, sigma) >= 0.0 {
            return ControlFlow::Break(ShootOutcome {
                kind: OutcomeKind::Converged,
                t_event: step.t1,
                state_event: end,
            });
        }
        ControlFlow::Continue(())
    };
    match integrate(
        phase_field(p, sigma),
        0.0,
        [start.phi, start.psi],
        opts.t_max,
        &opts.integrator,
        observer,
    )? {
        Finish::Stopped(outcome) => Ok(outcome),
        Finish::Reached { t, y } => Ok(ShootOutcome {
            kind: OutcomeKind::Inconclusive,
            t_event: t,
            state_event: to_state(&y),
        }),
    }
}

/// Whether a computed speed sits between the closed-form bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichVerdict {
    pub bounds: SigmaBounds,
    pub tol: f64,
    pub holds: bool,
}

/// Outcome of the bisection for the critical speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaStarResult {
    pub a: f64,
    pub b: f64,
    pub sigma_star: f64,
    pub bracket: [f64; 2],
    pub evaluations: usize,
    pub bounds_check: SandwichVerdict,
}

fn is_converged(
    p: &ModelParams,
    sigma: f64,
    opts: &ShootOptions,
    evals: &mut usize,
) -> Result<bool> {
    *evals += 1;
    match classify(p, sigma, opts) {
        Ok(o) => match o.kind {
            OutcomeKind::Converged => Ok(true),
            OutcomeKind::Overshoot | OutcomeKind::Turnback => Ok(false),
            OutcomeKind::Inconclusive => Err(Error::InconclusiveRegion { sigma }),
        },
        Err(Error::StepSizeUnderflow { .. }) => Err(Error::InconclusiveRegion { sigma }),
        Err(e) => Err(e),
    }
}

/// Minimal admissible speed by bisection on [`classify`].
pub fn sigma_star(p: &ModelParams, tol: f64, opts: &ShootOptions) -> Result<SigmaStarResult> {
    let p = p.validate(Mode::Local)?;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let bounds = sigma_bounds(&p);
    let mut evaluations = 0;
    let finish = |lo: f64, hi: f64, sigma: f64, evaluations: usize| SigmaStarResult {
        a: p.a,
        b: p.b,
        sigma_star: sigma,
        bracket: [lo, hi],
        evaluations,
        bounds_check: SandwichVerdict {
            bounds,
            tol,
            holds: bounds.contains(sigma, tol),
        },
    };

    if is_converged(&p, 2.0, opts, &mut evaluations)? {
        return Ok(finish(2.0, 2.0, 2.0, evaluations));
    }
    let mut lo = 2.0;
    let mut hi = bounds.upper + 1.0;
    let mut doublings = 0;
    while !is_converged(&p, hi, opts, &mut evaluations)? {
        doublings += 1;
        if doublings > 3 {
            return Err(Error::BracketFailure { sigma_hi: hi });
        }
        lo = hi;
        hi = 2.0 + 2.0 * (hi - 2.0);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if is_converged(&p, mid, opts, &mut evaluations)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(finish(lo, hi, 0.5 * (lo + hi), evaluations))
}

/// Reconstructs `phi(xi)` on `grid` from an admissible trajectory,
/// translated so that `phi(0) = 1/2`.
pub fn profile_from_shot(
    p: &ModelParams,
    sigma: f64,
    grid: &Grid1D,
    opts: &ShootOptions,
) -> Result<WaveProfile> {
    let p = p.validate(Mode::Local)?;
    if !classify(&p, sigma, opts)?.converged() {
        return Err(Error::NotAdmissible { sigma });
    }
    let start = saddle_departure(sigma, opts.delta);
    let mut ts = vec![0.0];
    let mut phis = vec![start.phi];
    let mut psis = vec![start.psi];
    let mut t_half: Option<f64> = None;
    let mut integ = opts.integrator;
    integ.h_max = integ.h_max.min(grid.h());

    let observer = |step: &Step<2>| {
        if t_half.is_none() && step.y0[0] >= 0.5 && step.y1[0] < 0.5 {
            let (t, y) = step.locate(|y| y[0] - 0.5);
            if t < step.t1 {
                ts.push(t);
                phis.push(0.5);
                psis.push(y[1]);
            }
            t_half = Some(t);
        }
        ts.push(step.t1);
        phis.push(step.y1[0]);
        psis.push(step.y1[1]);
        if step.y1[0] < 0.0 {
            return ControlFlow::Break(Err(Error::NotAdmissible { sigma }));
        }
        match t_half {
            Some(th) if step.t1 >= th + grid.alpha() + grid.h() => ControlFlow::Break(Ok(())),
            _ => ControlFlow::Continue(()),
        }
    };
    match integrate(
        phase_field(p, sigma),
        0.0,
        [start.phi, start.psi],
        opts.t_max,
        &integ,
        observer,
    )? {
        Finish::Stopped(r) => r?,
        Finish::Reached { .. } => return Err(Error::NotAdmissible { sigma }),
    }
    let t_half = t_half.ok_or(Error::NotAdmissible { sigma })?;
    if let Some(i) = ts.iter().position(|&t| t == t_half) {
        phis[i] = 0.5;
    }

    let xs: Vec<f64> = ts.iter().map(|t| t - t_half).collect();
    let x_start = xs[0];
    let rate = unstable_rate(sigma);
    let curve = MonotoneCubic::new(xs, phis, Some(psis))?;
    let phi: Vec<f64> = (0..grid.len())
        .map(|i| {
            let x = grid.xi(i);
            if x < x_start {
                1.0 - opts.delta * (rate * (x - x_start)).exp()
            } else {
                curve.eval(x)
            }
        })
        .collect();
    WaveProfile::new(*grid, phi, sigma, Theta::ZERO)
}
