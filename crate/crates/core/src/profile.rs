use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid1D;

/// Truncation level, restricted to `[0, 1/3)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Theta(f64);

impl Theta {
    pub const ZERO: Theta = Theta(0.0);

    pub fn new(theta: f64) -> Result<Self> {
        if theta.is_finite() && (0.0..1.0 / 3.0).contains(&theta) {
            Ok(Self(theta))
        } else {
            Err(Error::ThetaOutOfRange { theta })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Theta {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Theta::new(v)
    }
}

impl From<Theta> for f64 {
    fn from(t: Theta) -> f64 {
        t.0
    }
}

/// Slack allowed for non-strict decrease at flat tails.
pub const FLAT_TAIL_TOL: f64 = 1e-12;

/// Sampled front profile, optionally with the nonlocal potential `u` and the
/// velocity `v = -u'`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveProfile {
    pub grid: Grid1D,
    pub phi: Vec<f64>,
    pub u: Option<Vec<f64>>,
    pub v: Option<Vec<f64>>,
    pub sigma: f64,
    pub theta: Theta,
}

/// Outcome of [`WaveProfile::check_invariants`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileCheck {
    /// Largest `phi[i+1] - phi[i]` (must be <= the flat-tail slack).
    pub max_increase: f64,
    pub min_phi: f64,
    pub max_phi: f64,
    pub monotone: bool,
    pub bounded: bool,
}

impl ProfileCheck {
    pub fn ok(&self) -> bool {
        self.monotone && self.bounded
    }
}

impl WaveProfile {
    pub fn new(grid: Grid1D, phi: Vec<f64>, sigma: f64, theta: Theta) -> Result<Self> {
        if phi.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "profile has {} samples but the grid has {} nodes",
                phi.len(),
                grid.len()
            )));
        }
        Ok(Self {
            grid,
            phi,
            u: None,
            v: None,
            sigma,
            theta,
        })
    }

    pub fn with_potential(mut self, u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if u.len() != self.grid.len() || v.len() != self.grid.len() {
            return Err(Error::InvalidArgument(
                "potential length does not match grid".into(),
            ));
        }
        self.u = Some(u);
        self.v = Some(v);
        Ok(self)
    }

    /// Checks monotonicity (up to [`FLAT_TAIL_TOL`]) and `0 <= phi <= 1`
    /// (with slack `bound_tol`).
    pub fn check_invariants(&self, bound_tol: f64) -> ProfileCheck {
        let max_increase = self
            .phi
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max);
        let min_phi = self.phi.iter().copied().fold(f64::INFINITY, f64::min);
        let max_phi = self.phi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        ProfileCheck {
            max_increase,
            min_phi,
            max_phi,
            monotone: max_increase <= FLAT_TAIL_TOL,
            bounded: min_phi >= -bound_tol && max_phi <= 1.0 + bound_tol,
        }
    }

    /// `phi'` by second-order finite differences.
    pub fn derivative(&self) -> Vec<f64> {
        central_derivative(&self.phi, self.grid.h())
    }

    /// Position where the profile crosses `level`, by linear interpolation.
    pub fn crossing(&self, level: f64) -> Option<f64> {
        let i = self
            .phi
            .windows(2)
            .position(|w| w[0] >= level && w[1] < level)?;
        let (p0, p1) = (self.phi[i], self.phi[i + 1]);
        let t = (p0 - level) / (p0 - p1);
        Some(self.grid.xi(i) + t * self.grid.h())
    }
}

/// Second-order derivative on a uniform grid: central in the interior,
/// one-sided three-point stencils at both ends.
pub fn central_derivative(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 3, "need at least three samples");
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    }
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    d
}

/// Trapezoid rule on a uniform grid.
pub fn trapezoid(f: &[f64], h: f64) -> f64 {
    match f.len() {
        0 | 1 => 0.0,
        n => h * (f[1..n - 1].iter().sum::<f64>() + 0.5 * (f[0] + f[n - 1])),
    }
}
