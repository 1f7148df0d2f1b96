//! The truncated problem with `a = b = 0` reduces to a scalar ODE, so its
//! speed can be found independently: integrate from the pin towards
//! `-alpha` with the matched tail slope and adjust `sigma` until the
//! trajectory reaches 1 exactly at `-alpha`.

use frontlab::nonlocal::{
    solve_truncated_with, Formulation, SolverOptions, TruncationConfig, TruncationG,
};
use frontlab::{Grid1D, ModelParams};

/// `phi(-alpha) - 1` for the trajectory leaving the pin leftwards.
fn defect(g: &TruncationG, sigma: f64, alpha: f64) -> f64 {
    let theta = g.theta;
    let slope = theta * sigma / (1.0 - (-sigma * alpha).exp());
    // in s = -xi: phi_ss = sigma phi_s - g phi (1 - phi), phi_s(0) = theta s(sigma)
    let f = |y: [f64; 2]| [y[1], sigma * y[1] - g.eval(y[0]) * y[0] * (1.0 - y[0])];
    let n = (alpha / 1e-3).round() as usize;
    let h = alpha / n as f64;
    let mut y = [theta, slope];
    for _ in 0..n {
        let k1 = f(y);
        let k2 = f([y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = f([y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = f([y[0] + h * k3[0], y[1] + h * k3[1]]);
        for j in 0..2 {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        if y[0] > 2.0 {
            break;
        }
    }
    y[0] - 1.0
}

/// Bisection on the sign of the defect: too fast a front passes 1 before
/// `-alpha`, too slow a one turns back.
fn oracle_sigma(g: &TruncationG, alpha: f64) -> f64 {
    let (mut lo, mut hi) = (0.05, 2.5);
    assert!(defect(g, lo, alpha) < 0.0 && defect(g, hi, alpha) > 0.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if defect(g, mid, alpha) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn solve(theta: f64, alpha: f64, h: f64, formulation: Formulation) -> f64 {
    let p = ModelParams::new(0.0, 0.0, 1.0).unwrap();
    let grid = Grid1D::with_spacing(alpha, h).unwrap();
    let opts = SolverOptions {
        formulation,
        ..Default::default()
    };
    solve_truncated_with(&p, &TruncationConfig::new(theta, alpha), &grid, None, &opts)
        .unwrap()
        .sigma
}

#[test]
fn speed_matches_shooting_oracle() {
    for (theta, alpha) in [(0.1, 30.0), (0.01, 40.0), (1e-6, 50.0), (1e-12, 60.0)] {
        let g = TruncationConfig::new(theta, alpha).g().unwrap();
        let exact = oracle_sigma(&g, alpha);
        let fd = solve(theta, alpha, 0.01, Formulation::LogTail);
        assert!(
            (fd - exact).abs() < 1e-5,
            "theta {theta:e}: finite differences {fd}, shooting {exact}"
        );
    }
}

#[test]
fn discretization_error_is_second_order() {
    let alpha = 40.0;
    let exact = |theta: f64| oracle_sigma(&TruncationConfig::new(theta, alpha).g().unwrap(), alpha);
    let order = |theta: f64, f: Formulation, h: f64, steps: i32| {
        let s = exact(theta);
        let coarse = (solve(theta, alpha, h, f) - s).abs();
        let fine = (solve(theta, alpha, h / 2f64.powi(steps), f) - s).abs();
        (coarse / fine).log2() / steps as f64
    };
    let direct = order(0.01, Formulation::Direct, 0.04, 1);
    assert!(direct > 1.8 && direct < 2.2, "direct order {direct}");
    let log = order(0.1, Formulation::LogTail, 0.08, 3);
    assert!(log > 1.7 && log < 2.3, "log order {log}");
}

#[test]
fn both_formulations_agree() {
    for theta in [0.1, 0.05, 0.01] {
        let a = solve(theta, 30.0, 0.01, Formulation::LogTail);
        let b = solve(theta, 30.0, 0.01, Formulation::Direct);
        assert!((a - b).abs() < 2e-4, "theta {theta}: log {a}, direct {b}");
    }
}
