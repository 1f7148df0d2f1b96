//! Closed-form bounds on the critical speed of the local model and the
//! speed ceiling of the nonlocal model.
//!
//! For `b = 0` the upper bound switches between three expressions; the first
//! two meet at `a*`, the root in `(2, 16)` of `a^3 - 32a^2 + 256a - 256`.
//! At every breakpoint the left branch is used, so labels are deterministic.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Mode, ModelParams};

/// Which closed form produced a lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LowerBranch {
    #[serde(rename = "trivial-2")]
    Trivial2,
    #[serde(rename = "T2-manifold")]
    T2Manifold,
    #[serde(rename = "T3-manifold")]
    T3Manifold,
}

/// Which closed form produced an upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UpperBranch {
    #[serde(rename = "T1")]
    T1,
    #[serde(rename = "T2-parabola")]
    T2Parabola,
    #[serde(rename = "T2-fisher")]
    T2Fisher,
    #[serde(rename = "T2-sqrt")]
    T2Sqrt,
    #[serde(rename = "T3")]
    T3,
}

impl LowerBranch {
    pub fn as_str(self) -> &'static str {
        match self {
            LowerBranch::Trivial2 => "trivial-2",
            LowerBranch::T2Manifold => "T2-manifold",
            LowerBranch::T3Manifold => "T3-manifold",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        [
            LowerBranch::Trivial2,
            LowerBranch::T2Manifold,
            LowerBranch::T3Manifold,
        ]
        .into_iter()
        .find(|b| b.as_str() == s)
        .ok_or_else(|| Error::Parse(format!("unknown lower branch label `{s}`")))
    }
}

impl UpperBranch {
    pub fn as_str(self) -> &'static str {
        match self {
            UpperBranch::T1 => "T1",
            UpperBranch::T2Parabola => "T2-parabola",
            UpperBranch::T2Fisher => "T2-fisher",
            UpperBranch::T2Sqrt => "T2-sqrt",
            UpperBranch::T3 => "T3",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        [
            UpperBranch::T1,
            UpperBranch::T2Parabola,
            UpperBranch::T2Fisher,
            UpperBranch::T2Sqrt,
            UpperBranch::T3,
        ]
        .into_iter()
        .find(|b| b.as_str() == s)
        .ok_or_else(|| Error::Parse(format!("unknown upper branch label `{s}`")))
    }
}

impl fmt::Display for LowerBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for UpperBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Lower and upper bounds on the critical speed with their provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaBounds {
    pub a: f64,
    pub b: f64,
    pub lower: f64,
    pub upper: f64,
    pub lower_branch: LowerBranch,
    pub upper_branch: UpperBranch,
}

impl SigmaBounds {
    /// Whether `sigma` lies in `[lower - tol, upper + tol]`.
    pub fn contains(&self, sigma: f64, tol: f64) -> bool {
        sigma >= self.lower - tol && sigma <= self.upper + tol
    }
}

/// Root of the breakpoint cubic together with its residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicRoot {
    pub value: f64,
    pub residual: f64,
}

/// `p(a) = a^3 - 32 a^2 + 256 a - 256`.
pub fn breakpoint_cubic(a: f64) -> f64 {
    ((a - 32.0) * a + 256.0) * a - 256.0
}

/// Bisection for the root of [`breakpoint_cubic`] in `(2, 16)`.
pub fn a_star(tol: f64) -> Result<CubicRoot> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let (mut lo, mut hi) = (2.0_f64, 16.0_f64);
    let (p_lo, p_hi) = (breakpoint_cubic(lo), breakpoint_cubic(hi));
    if !(p_lo > 0.0 && p_hi < 0.0) {
        return Err(Error::BracketInvalid { lo, hi, p_lo, p_hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if breakpoint_cubic(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let value = 0.5 * (lo + hi);
    Ok(CubicRoot {
        value,
        residual: breakpoint_cubic(value).abs(),
    })
}

fn a_star_value() -> f64 {
    static A_STAR: OnceLock<f64> = OnceLock::new();
    *A_STAR.get_or_init(|| {
        a_star(1e-13)
            .expect("the breakpoint bracket is fixed")
            .value
    })
}

/// Upper bound on the local critical speed and the branch that produced it.
pub fn sigma_upper(p: &ModelParams) -> (f64, UpperBranch) {
    let (a, b) = (p.a, p.b);
    if a.max(b) <= 2.0 {
        return (2.0, UpperBranch::T1);
    }
    if b == 0.0 {
        if a <= a_star_value() {
            (((a * a + 4.0) / a).sqrt(), UpperBranch::T2Parabola)
        } else if a <= 16.0 {
            (2.0 + a / 8.0, UpperBranch::T2Fisher)
        } else {
            (a.sqrt(), UpperBranch::T2Sqrt)
        }
    } else {
        let inner = (a * a + 8.0 * a + 4.0 * b + 16.0).sqrt();
        (((inner + a + 4.0) / 2.0).sqrt().max(2.0), UpperBranch::T3)
    }
}

/// Lower bound on the local critical speed and the branch that produced it.
pub fn sigma_lower(p: &ModelParams) -> (f64, LowerBranch) {
    let (a, b) = (p.a, p.b);
    if b == 0.0 {
        if a <= 3.0 + 2.0 * SQRT_2 {
            (2.0, LowerBranch::Trivial2)
        } else {
            ((a - 1.0) / a.sqrt(), LowerBranch::T2Manifold)
        }
    } else if a * a >= 4.0 * b {
        // a - sqrt(a^2 - 4b), written without cancellation
        let gap = 4.0 * b / (a + (a * a - 4.0 * b).max(0.0).sqrt());
        let value = (2.0 * b - gap) / (2.0 * b * gap).sqrt();
        if value > 2.0 {
            (value, LowerBranch::T3Manifold)
        } else {
            (2.0, LowerBranch::Trivial2)
        }
    } else {
        (2.0, LowerBranch::Trivial2)
    }
}

pub fn sigma_bounds(p: &ModelParams) -> SigmaBounds {
    let (lower, lower_branch) = sigma_lower(p);
    let (upper, upper_branch) = sigma_upper(p);
    SigmaBounds {
        a: p.a,
        b: p.b,
        lower,
        upper,
        lower_branch,
        upper_branch,
    }
}

/// Ceiling on the nonlocal wave speed,
/// `2 + a/L + (b/4L^2)(2 + a/L)/(1 - b/2L^2)`.
pub fn theorem3_speed_cap(p: &ModelParams) -> Result<f64> {
    let p = p.validate(Mode::Nonlocal)?;
    let base = 2.0 + p.a / p.lambda;
    let l2 = p.lambda * p.lambda;
    Ok(base + (p.b / (4.0 * l2)) * base / (1.0 - p.nonlocal_ratio()))
}

/// Result of checking the strict subsolution inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubsolutionCheck {
    pub holds: bool,
    /// Smallest `rhs - S'` over the sample points.
    pub worst_margin: f64,
    /// Where the smallest margin occurs.
    pub worst_phi: f64,
}

/// Chebyshev points of the first kind mapped to `(0, 1)`.
pub fn chebyshev_points(n: usize) -> Vec<f64> {
    (1..=n)
        .map(|k| {
            let t = (2 * k - 1) as f64 * std::f64::consts::PI / (2 * n) as f64;
            0.5 * (1.0 - t.cos())
        })
        .collect()
}

/// Checks `S'(phi) < (sigma S - a S^2 - phi(1-phi)) / (S (1 + b S^2))` for
/// `S = alpha_coef * phi * (1 - phi)` at `n_check` Chebyshev points.
pub fn verify_subsolution(
    p: &ModelParams,
    sigma: f64,
    alpha_coef: f64,
    n_check: usize,
) -> Result<SubsolutionCheck> {
    p.validate(Mode::Local)?;
    if n_check < 100 {
        return Err(Error::InvalidArgument(format!(
            "n_check must be >= 100, got {n_check}"
        )));
    }
    if !(alpha_coef.is_finite() && alpha_coef > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha_coef must be positive, got {alpha_coef}"
        )));
    }
    let mut worst = SubsolutionCheck {
        holds: true,
        worst_margin: f64::INFINITY,
        worst_phi: f64::NAN,
    };
    for phi in chebyshev_points(n_check) {
        let s = alpha_coef * phi * (1.0 - phi);
        let ds = alpha_coef * (1.0 - 2.0 * phi);
        let rhs = (sigma * s - p.a * s * s - phi * (1.0 - phi)) / (s * (1.0 + p.b * s * s));
        let margin = rhs - ds;
        if !(margin > 0.0) {
            worst.holds = false;
        }
        if margin < worst.worst_margin || margin.is_nan() {
            worst.worst_margin = margin;
            worst.worst_phi = phi;
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(a: f64, b: f64) -> ModelParams {
        ModelParams::local(a, b).unwrap()
    }

    #[test]
    fn cubic_endpoint_signs() {
        assert_eq!(breakpoint_cubic(2.0), 136.0);
        assert_eq!(breakpoint_cubic(16.0), -256.0);
        assert!(breakpoint_cubic(11.0) > 0.0);
        assert!(breakpoint_cubic(12.0) < 0.0);
    }

    #[test]
    fn a_star_root() {
        let r = a_star(1e-12).unwrap();
        assert!(r.value > 11.0 && r.value < 12.0);
        assert!(r.residual < 1e-10);
        // 30-digit reference root
        assert!((r.value - 11.224_253_734_101_478).abs() < 1e-11);
        assert!(a_star(0.0).is_err());
    }

    #[test]
    fn upper_branches() {
        assert_eq!(sigma_upper(&lp(1.0, 1.0)), (2.0, UpperBranch::T1));
        assert_eq!(sigma_upper(&lp(25.0, 0.0)), (5.0, UpperBranch::T2Sqrt));
        let (v, br) = sigma_upper(&lp(4.0, 0.0));
        assert_eq!(br, UpperBranch::T2Parabola);
        assert!((v - 5f64.sqrt()).abs() < 1e-15);
        assert_eq!(sigma_upper(&lp(2.0, 0.0)).1, UpperBranch::T1);
        assert_eq!(sigma_upper(&lp(16.0, 0.0)), (4.0, UpperBranch::T2Fisher));
        assert_eq!(sigma_upper(&lp(14.0, 0.0)), (3.75, UpperBranch::T2Fisher));
    }

    #[test]
    fn upper_t3_at_a0_b40() {
        // evaluated independently: sqrt((sqrt(176) + 4) / 2)
        let expected = ((176f64).sqrt() / 2.0 + 2.0).sqrt();
        let (v, br) = sigma_upper(&lp(0.0, 40.0));
        assert_eq!(br, UpperBranch::T3);
        assert!((v - expected).abs() < 1e-14);
        // high-precision reference value
        assert!((v - 2.938_239_197_327_338).abs() < 1e-13, "{v}");
    }

    #[test]
    fn lower_branches() {
        assert_eq!(sigma_lower(&lp(2.0, 0.0)), (2.0, LowerBranch::Trivial2));
        let (v, br) = sigma_lower(&lp(20.0, 0.0));
        assert_eq!(br, LowerBranch::T2Manifold);
        assert!((v - 19.0 / 20f64.sqrt()).abs() < 1e-14);
        assert!((v - 4.2485).abs() < 1e-4);
        assert_eq!(sigma_lower(&lp(1.0, 40.0)), (2.0, LowerBranch::Trivial2));
    }

    #[test]
    fn lower_t3_matches_unrationalized_form() {
        let (a, b) = (40.0_f64, 5.0_f64);
        let r = a - (a * a - 4.0 * b).sqrt();
        let direct = (2.0 * b - r) / (2.0 * b * r).sqrt();
        let (v, br) = sigma_lower(&lp(a, b));
        assert_eq!(br, LowerBranch::T3Manifold);
        assert!((v - direct).abs() < 1e-9);
    }

    #[test]
    fn lower_t3_at_discriminant_zero() {
        // a^2 = 4b: the limiting value (2b - a)/sqrt(2ab)
        let (a, b) = (10.0_f64, 25.0_f64);
        let (v, _) = sigma_lower(&lp(a, b));
        let expected = ((2.0 * b - a) / (2.0 * a * b).sqrt()).max(2.0);
        assert!((v - expected).abs() < 1e-14);
    }

    #[test]
    fn lower_is_continuous_at_t2_switch() {
        let a = 3.0 + 2.0 * SQRT_2;
        assert!(((a - 1.0) / a.sqrt() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn speed_cap() {
        let p = ModelParams::new(0.0, 0.0, 1.0).unwrap();
        assert_eq!(theorem3_speed_cap(&p).unwrap(), 2.0);
        let p = ModelParams::new(1.0, 1.0, 2.0).unwrap();
        let expected = 2.0 + 0.5 + (1.0 / 16.0) * 2.5 / 0.875;
        let cap = theorem3_speed_cap(&p).unwrap();
        assert!((cap - expected).abs() < 1e-15);
        assert!((cap - 2.6786).abs() < 1e-4);
        let p = ModelParams::new(1.0, 9.0, 2.0).unwrap();
        assert!(matches!(
            theorem3_speed_cap(&p),
            Err(Error::NonlocalConditionViolated { .. })
        ));
    }

    #[test]
    fn subsolution_examples() {
        let ok = verify_subsolution(&lp(1.0, 1.0), 2.0, 1.0, 1000).unwrap();
        assert!(ok.holds);
        assert!(ok.worst_margin > 0.0);

        let bad = verify_subsolution(&lp(1.0, 1.0), 1.5, 1.0, 1000).unwrap();
        assert!(!bad.holds);
        // near phi = 0 the margin tends to (sigma - 1) - 1 = -0.5
        assert!(bad.worst_phi < 0.01);
        assert!((bad.worst_margin + 0.5).abs() < 1e-3);

        assert!(
            verify_subsolution(&lp(0.0, 0.0), 2.0, 1.0, 1000)
                .unwrap()
                .holds
        );
    }

    #[test]
    fn subsolution_preconditions() {
        assert!(verify_subsolution(&lp(0.0, 0.0), 2.0, 1.0, 10).is_err());
        let nl = ModelParams::new(1.0, 1.0, 1.0).unwrap();
        assert!(verify_subsolution(&nl, 2.0, 1.0, 1000).is_err());
    }

    #[test]
    fn labels_round_trip() {
        for b in [
            LowerBranch::Trivial2,
            LowerBranch::T2Manifold,
            LowerBranch::T3Manifold,
        ] {
            assert_eq!(LowerBranch::parse(b.as_str()).unwrap(), b);
        }
        assert!(UpperBranch::parse("nope").is_err());
    }
}
