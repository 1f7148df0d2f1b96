//! Screened-Poisson kernel `Gamma(xi) = exp(-|xi|/L) / (2L)` and the
//! potential `u = Gamma * (a phi + (b/2) phi'^2)` on a truncated domain with
//! constant extensions outside `[-alpha, alpha]`.
//!
//! `u` solves `u - L^2 u'' = rhs` on the line. The default evaluation is an
//! O(n) two-pass recursion that integrates the piecewise-linear interpolant
//! of the right-hand side against the exact exponential weight.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::model::ModelParams;
use crate::profile::{central_derivative, trapezoid, WaveProfile};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub lambda: f64,
}

impl KernelSpec {
    pub fn new(lambda: f64) -> Result<Self> {
        if lambda.is_finite() && lambda > 0.0 {
            Ok(Self { lambda })
        } else {
            Err(Error::NonlocalRequiresPositiveLambda)
        }
    }

    pub fn eval(&self, xi: f64) -> f64 {
        kernel_eval(*self, xi)
    }
}

pub fn kernel_eval(k: KernelSpec, xi: f64) -> f64 {
    (-xi.abs() / k.lambda).exp() / (2.0 * k.lambda)
}

/// How [`convolve_extended`] evaluates the integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ConvolutionMethod {
    /// Two-pass exponential recursion, O(n).
    #[default]
    Recursive,
    /// Trapezoid quadrature against every node, O(n^2). Kept as a cross-check.
    Direct,
}

/// Sup-norm checks of a potential against the a-priori bounds
/// `|u| <= a + (b/4L) |phi'|_2^2` and `|u'| <= |u| / L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialBounds {
    pub u_sup: f64,
    pub u_bound: f64,
    pub du_sup: f64,
    pub du_bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialField {
    pub grid: Grid1D,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub bounds: Option<PotentialBounds>,
}

impl PotentialField {
    /// A field that vanishes identically.
    pub fn zero(grid: Grid1D) -> Self {
        Self {
            grid,
            u: vec![0.0; grid.len()],
            du: vec![0.0; grid.len()],
            bounds: None,
        }
    }

    pub fn u_sup(&self) -> f64 {
        sup_norm(&self.u)
    }

    pub fn du_sup(&self) -> f64 {
        sup_norm(&self.du)
    }
}

pub(crate) fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Quadrature weights for one cell of width `h`: the integral of
/// `exp(-s/L)` times the hat function that is 1 at `s = 0` (near) and at
/// `s = h` (far).
fn cell_weights(h: f64, lambda: f64) -> (f64, f64, f64) {
    let x = h / lambda;
    let one_minus_e = -(-x).exp_m1();
    let e = 1.0 - one_minus_e;
    let ratio = one_minus_e / x;
    let near = lambda * (1.0 - ratio);
    let far = lambda * (ratio - e);
    (e, near, far)
}

/// `u(xi_i) = integral of Gamma(xi_i - y) rhs_ext(y) dy`, where `rhs_ext`
/// equals `left_value` for `y < -alpha`, `right_value` for `y > alpha`, and
/// the linear interpolant of `rhs` in between. Also returns `u'`.
pub fn convolve_extended(
    k: KernelSpec,
    grid: &Grid1D,
    rhs: &[f64],
    left_value: f64,
    right_value: f64,
    method: ConvolutionMethod,
) -> Result<PotentialField> {
    if rhs.len() != grid.len() {
        return Err(Error::InvalidArgument(format!(
            "rhs has {} samples but the grid has {} nodes",
            rhs.len(),
            grid.len()
        )));
    }
    let lam = k.lambda;
    let alpha = grid.alpha();
    let n = grid.len();
    let (mut u, mut du) = match method {
        ConvolutionMethod::Recursive => {
            let (e, near, far) = cell_weights(grid.h(), lam);
            let mut left = vec![0.0; n];
            let mut right = vec![0.0; n];
            for i in 1..n {
                left[i] = e * left[i - 1] + far * rhs[i - 1] + near * rhs[i];
            }
            for i in (0..n - 1).rev() {
                right[i] = e * right[i + 1] + near * rhs[i] + far * rhs[i + 1];
            }
            let u = (0..n)
                .map(|i| (left[i] + right[i]) / (2.0 * lam))
                .collect::<Vec<_>>();
            let du = (0..n)
                .map(|i| (right[i] - left[i]) / (2.0 * lam * lam))
                .collect::<Vec<_>>();
            (u, du)
        }
        ConvolutionMethod::Direct => {
            let h = grid.h();
            let xs = grid.nodes();
            let mut u = vec![0.0; n];
            let mut du = vec![0.0; n];
            for i in 0..n {
                let (mut s, mut ds) = (0.0, 0.0);
                for j in 0..n {
                    let w = if j == 0 || j == n - 1 { 0.5 * h } else { h };
                    let d = xs[i] - xs[j];
                    let g = kernel_eval(k, d) * rhs[j] * w;
                    s += g;
                    // at the node itself the kernel slope jumps; interior nodes
                    // take the average (zero), endpoints the one-sided limit
                    let slope = if j != i {
                        -d.signum()
                    } else if i == 0 {
                        1.0
                    } else if i == n - 1 {
                        -1.0
                    } else {
                        0.0
                    };
                    ds += slope * g / lam;
                }
                u[i] = s;
                du[i] = ds;
            }
            (u, du)
        }
    };
    for i in 0..n {
        let xi = grid.xi(i);
        let tl = 0.5 * left_value * (-(xi + alpha) / lam).exp();
        let tr = 0.5 * right_value * (-(alpha - xi) / lam).exp();
        u[i] += tl + tr;
        du[i] += (tr - tl) / lam;
    }
    Ok(PotentialField {
        grid: *grid,
        u,
        du,
        bounds: None,
    })
}

/// Potential generated by a profile sampled on `grid`, with the extensions
/// `phi = 1` on the left and `phi = 0` on the right.
pub fn potential_from_phi(
    p: &ModelParams,
    grid: &Grid1D,
    phi: &[f64],
    method: ConvolutionMethod,
) -> Result<PotentialField> {
    let k = KernelSpec::new(p.lambda)?;
    let dphi = central_derivative(phi, grid.h());
    let rhs: Vec<f64> = phi
        .iter()
        .zip(&dphi)
        .map(|(f, d)| p.a * f + 0.5 * p.b * d * d)
        .collect();
    let mut field = convolve_extended(k, grid, &rhs, p.a, 0.0, method)?;
    let grad_sq = trapezoid(&dphi.iter().map(|d| d * d).collect::<Vec<_>>(), grid.h());
    let u_sup = field.u_sup();
    let du_sup = field.du_sup();
    let u_bound = p.a + p.b / (4.0 * p.lambda) * grad_sq;
    let du_bound = u_sup / p.lambda;
    let slack = 1e-8 * (1.0 + u_bound);
    field.bounds = Some(PotentialBounds {
        u_sup,
        u_bound,
        du_sup,
        du_bound,
        holds: u_sup <= u_bound + slack && du_sup <= du_bound + slack,
    });
    Ok(field)
}

/// [`potential_from_phi`] for a stored profile, using the recursive method.
pub fn potential_from_profile(p: &ModelParams, prof: &WaveProfile) -> Result<PotentialField> {
    potential_from_phi(p, &prof.grid, &prof.phi, ConvolutionMethod::Recursive)
}

/// `V = -u'`.
pub fn velocity(field: &PotentialField) -> Vec<f64> {
    field.du.iter().map(|d| -d).collect()
}
