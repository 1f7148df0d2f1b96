//! Dormand-Prince 5(4) integrator with cubic Hermite dense output.
//!
//! The driver hands every accepted step to an observer, which can stop the
//! integration and return a value. Step-size control uses a norm-wise
//! relative error scale, `atol + rtol * max(|y|_inf, |y_new|_inf)`, so the
//! integration stays scale invariant near an equilibrium at the origin.

use std::ops::ControlFlow;

use crate::error::{Error, Result};

/// Tolerances and step limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_max: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-300,
            h_init: 1e-3,
            h_max: 1.0,
            h_min: 1e-14,
            max_steps: 5_000_000,
        }
    }
}

/// One accepted step, with enough data for Hermite interpolation.
#[derive(Debug, Clone, Copy)]
pub struct Step<const N: usize> {
    pub t0: f64,
    pub y0: [f64; N],
    pub f0: [f64; N],
    pub t1: f64,
    pub y1: [f64; N],
    pub f1: [f64; N],
}

impl<const N: usize> Step<N> {
    /// Cubic Hermite interpolant at `t` in `[t0, t1]`.
    pub fn interpolate(&self, t: f64) -> [f64; N] {
        let h = self.t1 - self.t0;
        let s = (t - self.t0) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] =
                h00 * self.y0[i] + h10 * h * self.f0[i] + h01 * self.y1[i] + h11 * h * self.f1[i];
        }
        out
    }

    /// Locates a sign change of `g` inside the step by bisection on the
    /// interpolant. Assumes `g(y0)` and `g(y1)` have different signs.
    pub fn locate<G: Fn(&[f64; N]) -> f64>(&self, g: G) -> (f64, [f64; N]) {
        let (mut lo, mut hi) = (self.t0, self.t1);
        let g_lo = g(&self.y0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if (g(&self.interpolate(mid)) > 0.0) == (g_lo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (hi, self.interpolate(hi))
    }
}

/// How an integration ended.
#[derive(Debug, Clone, PartialEq)]
pub enum Finish<R, const N: usize> {
    /// The observer stopped the integration.
    Stopped(R),
    /// `t_end` was reached.
    Reached { t: f64, y: [f64; N] },
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

fn inf_norm<const N: usize>(y: &[f64; N]) -> f64 {
    y.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Integrates `y' = f(t, y)` from `t0` towards `t_end`, calling `observer`
/// after every accepted step.
pub fn integrate<const N: usize, F, O, R>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &IntegratorOptions,
    mut observer: O,
) -> Result<Finish<R, N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    O: FnMut(&Step<N>) -> ControlFlow<R>,
{
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = opts.h_init.min(opts.h_max).min(t_end - t0);
    if !(h > 0.0) {
        return Ok(Finish::Reached { t, y });
    }
    for _ in 0..opts.max_steps {
        if t + h > t_end {
            h = t_end - t;
        }
        let k2 = f(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = f(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(
            t + C4 * h,
            &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
        );
        let k5 = f(
            t + C5 * h,
            &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + h,
            &axpy(
                &y,
                h,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        );
        let y_new = axpy(
            &y,
            h,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let k7 = f(t + h, &y_new);

        let mut err = [0.0; N];
        for i in 0..N {
            err[i] =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let scale = opts.atol + opts.rtol * inf_norm(&y).max(inf_norm(&y_new));
        let err_norm = inf_norm(&err) / scale;
        if !err_norm.is_finite() {
            h *= 0.2;
            if h < opts.h_min {
                return Err(Error::StepSizeUnderflow { t });
            }
            continue;
        }

        let factor = if err_norm == 0.0 {
            5.0
        } else {
            (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
        };
        if err_norm <= 1.0 {
            let step = Step {
                t0: t,
                y0: y,
                f0: k1,
                t1: t + h,
                y1: y_new,
                f1: k7,
            };
            t += h;
            y = y_new;
            k1 = k7;
            if let ControlFlow::Break(r) = observer(&step) {
                return Ok(Finish::Stopped(r));
            }
            if t >= t_end {
                return Ok(Finish::Reached { t, y });
            }
            h = (h * factor).min(opts.h_max);
        } else {
            h *= factor.min(1.0);
            if h < opts.h_min {
                return Err(Error::StepSizeUnderflow { t });
            }
        }
    }
    Err(Error::StepSizeUnderflow { t })
}
