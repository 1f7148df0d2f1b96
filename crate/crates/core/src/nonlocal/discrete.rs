//! Second-order finite-difference residual and its Newton solvers.

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::helmholtz::{sup_norm, PotentialField};
use crate::model::ModelParams;
use crate::tridiag::TridiagonalLu;

use super::{validate_nonlocal, SolverOptions, TruncationConfig, TruncationG};

/// Discrete operator with `u'` frozen.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Operator {
    pub g: TruncationG,
    pub h: f64,
}

/// Jacobian bands by node; only interior rows are filled.
pub(crate) struct Bands {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
    /// Derivative of each row with respect to `sigma`.
    pub dsigma: Vec<f64>,
}

impl Operator {
    pub fn residual(&self, phi: &[f64], du: &[f64], sigma: f64, out: &mut [f64]) {
        let n = phi.len() - 1;
        let (h, h2) = (self.h, self.h * self.h);
        out[0] = phi[0] - 1.0;
        out[n] = phi[n];
        for i in 1..n {
            let f = phi[i];
            let g = self.g.eval(f);
            let d = (phi[i + 1] - phi[i - 1]) / (2.0 * h);
            let lap = (phi[i + 1] - 2.0 * f + phi[i - 1]) / h2;
            out[i] = lap + (sigma + g * du[i]) * d + g * f * (1.0 - f);
        }
    }

    pub fn bands(&self, phi: &[f64], du: &[f64], sigma: f64) -> Bands {
        let len = phi.len();
        let (h, h2) = (self.h, self.h * self.h);
        let mut b = Bands {
            sub: vec![0.0; len],
            diag: vec![1.0; len],
            sup: vec![0.0; len],
            dsigma: vec![0.0; len],
        };
        for i in 1..len - 1 {
            let f = phi[i];
            let (g, dg) = (self.g.eval(f), self.g.derivative(f));
            let d = (phi[i + 1] - phi[i - 1]) / (2.0 * h);
            let c = sigma + g * du[i];
            b.sub[i] = 1.0 / h2 - c / (2.0 * h);
            b.sup[i] = 1.0 / h2 + c / (2.0 * h);
            b.diag[i] = -2.0 / h2 + dg * (du[i] * d + f * (1.0 - f)) + g * (1.0 - 2.0 * f);
            b.dsigma[i] = d;
        }
        b
    }
}

fn interior_sup(r: &[f64]) -> f64 {
    sup_norm(&r[1..r.len() - 1])
}

/// Solves `J_block x = rhs` for each right-hand side over rows `lo..=hi`.
fn block_solve(b: &Bands, lo: usize, hi: usize, rhs: &mut [&mut Vec<f64>]) -> Result<()> {
    let lu = TridiagonalLu::factor(&b.sub[lo..=hi], &b.diag[lo..=hi], &b.sup[lo..=hi])?;
    for r in rhs.iter_mut() {
        lu.solve_in_place(r);
    }
    Ok(())
}

/// Newton direction for `(phi, sigma)` with `phi[m]` held fixed. The pinned
/// node splits the system into two tridiagonal blocks; the row of the pinned
/// node closes it for `sigma`.
pub(crate) fn bordered_direction(b: &Bands, r: &[f64], m: usize) -> Result<(Vec<f64>, f64)> {
    let n = r.len() - 1;
    let mut out = vec![0.0; n + 1];
    let mut halves = Vec::with_capacity(2);
    for (lo, hi) in [(1, m - 1), (m + 1, n - 1)] {
        let mut y: Vec<f64> = r[lo..=hi].iter().map(|v| -v).collect();
        let mut z: Vec<f64> = b.dsigma[lo..=hi].to_vec();
        block_solve(b, lo, hi, &mut [&mut y, &mut z])?;
        halves.push((lo, y, z));
    }
    let (yl, zl) = (halves[0].1[m - 2], halves[0].2[m - 2]);
    let (yr, zr) = (halves[1].1[0], halves[1].2[0]);
    let denom = b.dsigma[m] - b.sub[m] * zl - b.sup[m] * zr;
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::SecantStalled {
            iterations: 0,
            defect: r[m],
        });
    }
    let dsigma = (-r[m] - b.sub[m] * yl - b.sup[m] * yr) / denom;
    for (lo, y, z) in &halves {
        for k in 0..y.len() {
            out[lo + k] = y[k] - dsigma * z[k];
        }
    }
    Ok((out, dsigma))
}

fn relative_step(dphi: &[f64], phi: &[f64], floor: f64) -> f64 {
    dphi.iter()
        .zip(phi)
        .fold(0.0_f64, |m, (d, f)| m.max(d.abs() / (f.abs() + floor)))
}

/// Result of a Newton solve with frozen `u'`.
pub(crate) struct NewtonOutcome {
    pub iterations: usize,
}

/// Damped Newton on `(phi, sigma)` with `phi[m]` pinned. `floor` sets the
/// scale below which updates are judged absolutely rather than relatively.
pub(crate) fn bordered_newton(
    op: &Operator,
    phi: &mut [f64],
    sigma: &mut f64,
    du: &[f64],
    m: usize,
    floor: f64,
    opts: &SolverOptions,
) -> Result<NewtonOutcome> {
    let len = phi.len();
    let mut r = vec![0.0; len];
    let mut trial = vec![0.0; len];
    let mut r_trial = vec![0.0; len];
    op.residual(phi, du, *sigma, &mut r);
    let mut norm = interior_sup(&r);
    for it in 0..opts.newton_max_iter {
        let bands = op.bands(phi, du, *sigma);
        let (dphi, dsig) = bordered_direction(&bands, &r, m)?;
        let small = relative_step(&dphi, phi, floor) < opts.newton_step_tol && dsig.abs() < 1e-12;
        if norm < opts.newton_tol && small {
            for (f, d) in phi.iter_mut().zip(&dphi) {
                *f += d;
            }
            *sigma += dsig;
            return Ok(NewtonOutcome { iterations: it + 1 });
        }
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            for i in 0..len {
                trial[i] = phi[i] + t * dphi[i];
            }
            let s = *sigma + t * dsig;
            op.residual(&trial, du, s, &mut r_trial);
            let n_trial = interior_sup(&r_trial);
            if n_trial.is_finite()
                && (n_trial <= (1.0 - 1e-4 * t) * norm || n_trial < opts.newton_tol)
            {
                phi.copy_from_slice(&trial);
                *sigma = s;
                std::mem::swap(&mut r, &mut r_trial);
                norm = n_trial;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            if norm < opts.newton_tol {
                return Ok(NewtonOutcome { iterations: it + 1 });
            }
            return Err(Error::NewtonDiverged {
                iterations: it + 1,
                residual: norm,
            });
        }
    }
    if norm < opts.newton_tol {
        Ok(NewtonOutcome {
            iterations: opts.newton_max_iter,
        })
    } else {
        Err(Error::NewtonDiverged {
            iterations: opts.newton_max_iter,
            residual: norm,
        })
    }
}

/// `s(sigma) = sigma / (1 - exp(-sigma alpha))`, minus the logarithmic slope
/// of the linear tail at the pin, and its derivative in `sigma`.
pub(crate) fn tail_slope(sigma: f64, alpha: f64) -> (f64, f64) {
    let x = sigma * alpha;
    if x.abs() < 1e-8 {
        // s -> 1/alpha + sigma/2 near sigma = 0
        return (1.0 / alpha + 0.5 * sigma, 0.5);
    }
    let one_minus_e = -(-x).exp_m1();
    let e = 1.0 - one_minus_e;
    let s = sigma / one_minus_e;
    let ds = (one_minus_e - x * e) / (one_minus_e * one_minus_e);
    (s, ds)
}

/// The pinned problem in `w = ln phi` on the left half `[-alpha, 0]`.
///
/// Right of the pin the cutoff vanishes and the solution is the linear tail,
/// so the half-line is closed by matching `w'(0) = -s(sigma)`. The unknowns
/// are `w_1 .. w_{m-1}` and `sigma`; `w_0 = 0` and `w_m = ln theta` are fixed.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LogOperator {
    pub g: TruncationG,
    pub h: f64,
    pub alpha: f64,
}

impl LogOperator {
    /// Rows `1..m` hold the interior equations, row `m` the matching condition.
    pub fn residual(&self, w: &[f64], du: &[f64], sigma: f64, out: &mut [f64]) {
        let m = w.len() - 1;
        let (h, h2) = (self.h, self.h * self.h);
        out[0] = w[0];
        for i in 1..m {
            let f = w[i].exp();
            let g = self.g.eval(f);
            let d = (w[i + 1] - w[i - 1]) / (2.0 * h);
            let lap = (w[i + 1] - 2.0 * w[i] + w[i - 1]) / h2;
            out[i] = lap + d * d + (sigma + g * du[i]) * d + g * (1.0 - f);
        }
        // ghost node from w'(0) = -s; the cutoff vanishes at the pin
        let (s, _) = tail_slope(sigma, self.alpha);
        out[m] = 2.0 * (w[m - 1] - w[m] - h * s) / h2 + s * s - sigma * s;
    }

    /// Bands for rows `0..=m`; `dsigma[m]` holds the matching row's derivative.
    pub fn bands(&self, w: &[f64], du: &[f64], sigma: f64) -> Bands {
        let len = w.len();
        let m = len - 1;
        let (h, h2) = (self.h, self.h * self.h);
        let mut b = Bands {
            sub: vec![0.0; len],
            diag: vec![1.0; len],
            sup: vec![0.0; len],
            dsigma: vec![0.0; len],
        };
        for i in 1..m {
            let f = w[i].exp();
            let (g, dg) = (self.g.eval(f), self.g.derivative(f));
            let d = (w[i + 1] - w[i - 1]) / (2.0 * h);
            let c = 2.0 * d + sigma + g * du[i];
            b.sub[i] = 1.0 / h2 - c / (2.0 * h);
            b.sup[i] = 1.0 / h2 + c / (2.0 * h);
            b.diag[i] = -2.0 / h2 + dg * f * (du[i] * d + 1.0 - f) - g * f;
            b.dsigma[i] = d;
        }
        let (s, ds) = tail_slope(sigma, self.alpha);
        b.sub[m] = 2.0 / h2;
        b.dsigma[m] = (-2.0 / h + 2.0 * s - sigma) * ds - s;
        b
    }
}

/// Damped Newton for the log form. `w` has `m + 1` entries.
pub(crate) fn log_newton(
    op: &LogOperator,
    w: &mut [f64],
    sigma: &mut f64,
    du: &[f64],
    opts: &SolverOptions,
) -> Result<NewtonOutcome> {
    let len = w.len();
    let m = len - 1;
    let mut r = vec![0.0; len];
    let mut trial = vec![0.0; len];
    let mut r_trial = vec![0.0; len];
    op.residual(w, du, *sigma, &mut r);
    let mut norm = sup_norm(&r[1..]);
    // rows are O(|w| eps / h^2) at best
    let w_max = w.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
    let tol = opts
        .newton_tol
        .max(64.0 * f64::EPSILON * w_max / (op.h * op.h));
    for it in 0..opts.newton_max_iter {
        let b = op.bands(w, du, *sigma);
        let mut y: Vec<f64> = r[1..m].iter().map(|v| -v).collect();
        let mut z: Vec<f64> = b.dsigma[1..m].to_vec();
        block_solve(&b, 1, m - 1, &mut [&mut y, &mut z])?;
        let denom = b.dsigma[m] - b.sub[m] * z[m - 2];
        if denom == 0.0 || !denom.is_finite() {
            return Err(Error::SecantStalled {
                iterations: it,
                defect: r[m],
            });
        }
        let dsig = (-r[m] - b.sub[m] * y[m - 2]) / denom;
        let mut dw = vec![0.0; len];
        for k in 0..m - 1 {
            dw[k + 1] = y[k] - dsig * z[k];
        }
        let step = sup_norm(&dw);
        if norm < tol && step < opts.newton_step_tol && dsig.abs() < 1e-12 {
            for (v, d) in w.iter_mut().zip(&dw) {
                *v += d;
            }
            *sigma += dsig;
            return Ok(NewtonOutcome { iterations: it + 1 });
        }
        // keep single steps moderate: w and sigma enter exponentials
        let mut t = (1.0_f64)
            .min(2.0 / step.max(1e-300))
            .min(0.5 / dsig.abs().max(1e-300));
        let mut accepted = false;
        for _ in 0..50 {
            for i in 0..len {
                trial[i] = w[i] + t * dw[i];
            }
            let s = *sigma + t * dsig;
            op.residual(&trial, du, s, &mut r_trial);
            let n_trial = sup_norm(&r_trial[1..]);
            if n_trial.is_finite() && (n_trial <= (1.0 - 1e-4 * t) * norm || n_trial < tol) {
                w.copy_from_slice(&trial);
                *sigma = s;
                std::mem::swap(&mut r, &mut r_trial);
                norm = n_trial;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            if norm < tol {
                return Ok(NewtonOutcome { iterations: it + 1 });
            }
            return Err(Error::NewtonDiverged {
                iterations: it + 1,
                residual: norm,
            });
        }
    }
    if norm < tol {
        Ok(NewtonOutcome {
            iterations: opts.newton_max_iter,
        })
    } else {
        Err(Error::NewtonDiverged {
            iterations: opts.newton_max_iter,
            residual: norm,
        })
    }
}

/// Discrete residual of the truncated equation at every node. Boundary rows
/// carry the Dirichlet defects `phi_0 - 1` and `phi_n`.
pub fn residual(
    p: &ModelParams,
    cfg: &TruncationConfig,
    grid: &Grid1D,
    phi: &[f64],
    u: &PotentialField,
    sigma: f64,
) -> Result<Vec<f64>> {
    validate_nonlocal(p)?;
    if phi.len() != grid.len() || u.du.len() != grid.len() {
        return Err(Error::InvalidArgument(
            "array lengths do not match the grid".into(),
        ));
    }
    let op = Operator {
        g: cfg.g()?,
        h: grid.h(),
    };
    let mut out = vec![0.0; grid.len()];
    op.residual(phi, &u.du, sigma, &mut out);
    Ok(out)
}

/// Damped Newton for `phi` at fixed `sigma` and frozen `u`, with Dirichlet
/// data only (no pin).
pub fn newton_phi(
    p: &ModelParams,
    cfg: &TruncationConfig,
    grid: &Grid1D,
    u: &PotentialField,
    sigma: f64,
    phi0: &[f64],
    opts: &SolverOptions,
) -> Result<(Vec<f64>, usize)> {
    let r0 = residual(p, cfg, grid, phi0, u, sigma)?;
    let op = Operator {
        g: cfg.g()?,
        h: grid.h(),
    };
    let len = grid.len();
    let mut phi = phi0.to_vec();
    phi[0] = 1.0;
    phi[len - 1] = 0.0;
    let mut r = r0;
    op.residual(&phi, &u.du, sigma, &mut r);
    let mut norm = interior_sup(&r);
    let mut trial = vec![0.0; len];
    let mut r_trial = vec![0.0; len];
    for it in 0..opts.newton_max_iter {
        if norm < opts.newton_tol {
            return Ok((phi, it));
        }
        let b = op.bands(&phi, &u.du, sigma);
        let mut dphi: Vec<f64> = r[1..len - 1].iter().map(|v| -v).collect();
        block_solve(&b, 1, len - 2, &mut [&mut dphi])?;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            trial.copy_from_slice(&phi);
            for (k, d) in dphi.iter().enumerate() {
                trial[k + 1] += t * d;
            }
            op.residual(&trial, &u.du, sigma, &mut r_trial);
            let n_trial = interior_sup(&r_trial);
            if n_trial.is_finite() && n_trial <= (1.0 - 1e-4 * t) * norm {
                std::mem::swap(&mut phi, &mut trial);
                std::mem::swap(&mut r, &mut r_trial);
                norm = n_trial;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            return Err(Error::NewtonDiverged {
                iterations: it + 1,
                residual: norm,
            });
        }
    }
    if norm < opts.newton_tol {
        Ok((phi, opts.newton_max_iter))
    } else {
        Err(Error::NewtonDiverged {
            iterations: opts.newton_max_iter,
            residual: norm,
        })
    }
}
