//! Traveling fronts of the nonlocal model (`lambda > 0`).
//!
//! The front equation is posed on `[-alpha, alpha]` with `phi(-alpha) = 1`,
//! `phi(alpha) = 0` and the pin `phi(0) = theta`; the reaction and the
//! nonlocal advection are switched off below `theta` by a cutoff `g`:
//!
//! `phi'' + sigma phi' + g(phi) u' phi' + g(phi) phi (1 - phi) = 0`,
//! `u = Gamma * (a phi + (b/2) phi'^2)`.
//!
//! [`solve_truncated`] finds `(phi, sigma)` for one `(theta, alpha)`;
//! [`continue_theta_alpha`] follows the solution as `theta -> 0` and
//! `alpha -> infinity`; [`lambda_continuation`] repeats that along a list of
//! screening lengths.

mod continuation;
mod discrete;
mod solve;

pub use continuation::{
    continue_theta_alpha, continue_theta_alpha_from, default_thetas, extrapolate_sigma,
    lambda_continuation, ContinuationReport, ContinuationSchedule, LambdaRow, LambdaTable,
    SigmaEntry, SkippedLambda,
};
pub use discrete::{newton_phi, residual};
pub use solve::{solve_truncated, solve_truncated_with, Seed};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::helmholtz::ConvolutionMethod;
use crate::model::{Mode, ModelParams};
use crate::profile::WaveProfile;

/// Cutoff `g(phi) = s((phi - theta) / width)` with the smoothstep
/// `s(t) = 3t^2 - 2t^3` clamped to `[0, 1]`. It vanishes for
/// `phi <= theta` and equals 1 for `phi >= theta + width`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationG {
    pub theta: f64,
    pub width: f64,
}

impl TruncationG {
    pub fn new(theta: f64, width: f64) -> Result<Self> {
        if !(theta.is_finite() && theta > 0.0 && theta < 1.0 / 3.0) {
            return Err(Error::ThetaOutOfRange { theta });
        }
        if !(width.is_finite() && width > 0.0 && theta + width <= 1.0 + 1e-15) {
            return Err(Error::InvalidArgument(format!(
                "cutoff width must lie in (0, 1 - theta], got {width}"
            )));
        }
        Ok(Self { theta, width })
    }

    /// Ramp spanning all of `[theta, 1]`.
    pub fn full_ramp(theta: f64) -> Result<Self> {
        Self::new(theta, 1.0 - theta)
    }

    pub fn eval(&self, phi: f64) -> f64 {
        let t = ((phi - self.theta) / self.width).clamp(0.0, 1.0);
        t * t * (3.0 - 2.0 * t)
    }

    pub fn derivative(&self, phi: f64) -> f64 {
        let t = (phi - self.theta) / self.width;
        if t <= 0.0 || t >= 1.0 {
            0.0
        } else {
            6.0 * t * (1.0 - t) / self.width
        }
    }
}

pub fn g_eval(g: &TruncationG, phi: f64) -> f64 {
    g.eval(phi)
}

/// Pin level, cutoff width and half-width of one truncated problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationConfig {
    pub theta: f64,
    pub g_smoothing: f64,
    pub alpha: f64,
}

impl TruncationConfig {
    /// Cutoff width defaults to `theta`, so `g = 1` for `phi >= 2 theta`.
    pub fn new(theta: f64, alpha: f64) -> Self {
        Self {
            theta,
            g_smoothing: theta,
            alpha,
        }
    }

    pub fn with_smoothing(mut self, width: f64) -> Self {
        self.g_smoothing = width;
        self
    }

    pub fn g(&self) -> Result<TruncationG> {
        TruncationG::new(self.theta, self.g_smoothing)
    }

    /// Smallest admissible half-width: `max(-ln theta, (lambda/2) ln 3)`.
    pub fn min_alpha(theta: f64, lambda: f64) -> f64 {
        (-theta.ln()).max(0.5 * lambda * 3f64.ln())
    }

    pub fn validate(&self, p: &ModelParams) -> Result<()> {
        self.g()?;
        if !(self.alpha.is_finite() && self.alpha > Self::min_alpha(self.theta, p.lambda)) {
            return Err(Error::InvalidHalfWidth { alpha: self.alpha });
        }
        Ok(())
    }
}

/// Unknowns of the pinned Newton solve.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Formulation {
    /// `w = ln phi` left of the pin, with the linear tail matched at the pin.
    /// Robust for very small `theta`.
    #[default]
    LogTail,
    /// `phi` itself on the whole grid.
    Direct,
}

/// Iteration limits and tolerances of the nested solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Sup norm of the discrete residual.
    pub newton_tol: f64,
    /// Relative size of the last Newton update.
    pub newton_step_tol: f64,
    pub newton_max_iter: usize,
    /// Sup norm of the change in `u` between Picard sweeps.
    pub picard_tol: f64,
    pub picard_max_iter: usize,
    /// Under-relaxation of the `u` update.
    pub omega: f64,
    pub convolution: ConvolutionMethod,
    pub formulation: Formulation,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            newton_tol: 1e-10,
            newton_step_tol: 1e-9,
            newton_max_iter: 50,
            picard_tol: 1e-9,
            picard_max_iter: 400,
            omega: 0.5,
            convolution: ConvolutionMethod::Recursive,
            formulation: Formulation::LogTail,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationCounts {
    pub newton: usize,
    pub picard: usize,
    /// Updates of `sigma` (one per bordered Newton step).
    pub sigma_updates: usize,
}

/// One inequality `lhs <= rhs` checked on a computed solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub holds: bool,
}

impl Diagnostic {
    pub fn new(name: &str, lhs: f64, rhs: f64, slack: f64) -> Self {
        let margin = rhs - lhs;
        Self {
            name: name.to_string(),
            lhs,
            rhs,
            margin,
            holds: margin >= -slack,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonlocalSolveReport {
    pub params: ModelParams,
    pub config: TruncationConfig,
    pub profile: WaveProfile,
    pub sigma: f64,
    pub iterations: IterationCounts,
    pub energy_lhs: f64,
    pub energy_rhs: f64,
    pub diagnostics: Vec<Diagnostic>,
}

impl NonlocalSolveReport {
    pub fn diagnostic(&self, name: &str) -> Option<&Diagnostic> {
        self.diagnostics.iter().find(|d| d.name == name)
    }

    pub fn all_hold(&self) -> bool {
        self.diagnostics.iter().all(|d| d.holds)
    }

    pub fn failed(&self) -> Vec<&Diagnostic> {
        self.diagnostics.iter().filter(|d| !d.holds).collect()
    }
}

pub(crate) fn validate_nonlocal(p: &ModelParams) -> Result<ModelParams> {
    p.validate(Mode::Nonlocal)
}
