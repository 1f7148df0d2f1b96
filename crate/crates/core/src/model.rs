//! Model parameters and phase-plane states.
//!
//! The front model is parameterized by the advection strength `a`, the
//! nonlinear advection strength `b` and the screening length `lambda`.
//! With `lambda = 0` the velocity coupling is local and the traveling-wave
//! problem reduces to a planar ODE; with `lambda > 0` the velocity is the
//! screened-Poisson convolution of the density and its squared gradient.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which form of the velocity coupling a computation assumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Local,
    Nonlocal,
}

/// The triple `(a, b, lambda)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub a: f64,
    pub b: f64,
    pub lambda: f64,
}

fn check_non_negative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::NegativeParameter { name, value })
    }
}

impl ModelParams {
    /// Builds a parameter triple, rejecting negative or non-finite entries.
    pub fn new(a: f64, b: f64, lambda: f64) -> Result<Self> {
        check_non_negative("a", a)?;
        check_non_negative("b", b)?;
        check_non_negative("lambda", lambda)?;
        Ok(Self { a, b, lambda })
    }

    /// Local model (`lambda = 0`).
    pub fn local(a: f64, b: f64) -> Result<Self> {
        Self::new(a, b, 0.0)
    }

    /// `b / (2 lambda^2)`; infinite when `lambda = 0` and `b > 0`.
    pub fn nonlocal_ratio(&self) -> f64 {
        if self.b == 0.0 {
            0.0
        } else {
            self.b / (2.0 * self.lambda * self.lambda)
        }
    }

    /// True when the nonlocal existence condition `b/(2 lambda^2) < 1` holds
    /// with `lambda > 0`.
    pub fn is_nonlocal_solvable(&self) -> bool {
        self.lambda > 0.0 && self.nonlocal_ratio() < 1.0
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.a, self.b, lambda)
    }

    /// Validates the triple for the requested mode and hands it back unchanged.
    pub fn validate(self, mode: Mode) -> Result<Self> {
        check_non_negative("a", self.a)?;
        check_non_negative("b", self.b)?;
        check_non_negative("lambda", self.lambda)?;
        match mode {
            Mode::Local => {
                if self.lambda != 0.0 {
                    return Err(Error::LocalRequiresZeroLambda {
                        lambda: self.lambda,
                    });
                }
            }
            Mode::Nonlocal => {
                if self.lambda <= 0.0 {
                    return Err(Error::NonlocalRequiresPositiveLambda);
                }
                let ratio = self.nonlocal_ratio();
                if ratio >= 1.0 {
                    return Err(Error::NonlocalConditionViolated { ratio });
                }
            }
        }
        Ok(self)
    }
}

/// Free-function form of [`ModelParams::validate`].
pub fn validate_params(p: ModelParams, mode: Mode) -> Result<ModelParams> {
    p.validate(mode)
}

/// A point `(phi, psi)` of the reduced phase plane, `psi = phi'`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseState {
    pub phi: f64,
    pub psi: f64,
}

impl PhaseState {
    pub fn new(phi: f64, psi: f64) -> Self {
        Self { phi, psi }
    }

    pub fn norm(&self) -> f64 {
        self.phi.hypot(self.psi)
    }

    /// Whether the point lies in the region admissible for a decreasing front.
    pub fn is_admissible(&self) -> bool {
        (0.0..=1.0).contains(&self.phi) && self.psi <= 0.0
    }
}
