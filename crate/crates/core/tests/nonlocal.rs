use frontlab::bounds::theorem3_speed_cap;
use frontlab::helmholtz::PotentialField;
use frontlab::nonlocal::*;
use frontlab::shooting::{profile_from_shot, ShootOptions};
use frontlab::{Grid1D, ModelParams};

fn benchmark() -> ModelParams {
    ModelParams::new(1.0, 1.0, 2.0).unwrap()
}

fn interior_sup(r: &[f64]) -> f64 {
    r[1..r.len() - 1].iter().fold(0.0, |m, v| m.max(v.abs()))
}

#[test]
fn fkpp_wave_has_second_order_residual() {
    // with theta = 1e-12 the cutoff is 1 wherever the wave is resolved
    let p = ModelParams::new(0.0, 0.0, 1.0).unwrap();
    let local = ModelParams::local(0.0, 0.0).unwrap();
    let res = |h: f64| {
        let grid = Grid1D::with_spacing(30.0, h).unwrap();
        let shot = profile_from_shot(&local, 2.0, &grid, &ShootOptions::default()).unwrap();
        let cfg = TruncationConfig::new(1e-12, 30.0);
        interior_sup(
            &residual(&p, &cfg, &grid, &shot.phi, &PotentialField::zero(grid), 2.0).unwrap(),
        )
    };
    let (r1, r2) = (res(0.02), res(0.01));
    assert!(r2 < 1e-6, "{r2:e}");
    assert!((r1 / r2 - 4.0).abs() < 0.4, "ratio {}", r1 / r2);
}

#[test]
fn benchmark_single_solve() {
    let p = benchmark();
    let grid = Grid1D::with_spacing(30.0, 0.01).unwrap();
    let r = solve_truncated(&p, &TruncationConfig::new(0.1, 30.0), &grid).unwrap();
    assert!(r.all_hold(), "{:?}", r.failed());
    assert!(r.profile.phi.windows(2).all(|w| w[1] < w[0]));
    assert!(r.sigma <= theorem3_speed_cap(&p).unwrap() + 1e-8);
    assert!(r.iterations.picard > 1 && r.iterations.newton >= r.iterations.picard);
}

#[test]
fn tail_matches_closed_form_in_both_formulations() {
    let p = benchmark();
    let grid = Grid1D::with_spacing(30.0, 0.01).unwrap();
    for formulation in [Formulation::LogTail, Formulation::Direct] {
        let opts = SolverOptions {
            formulation,
            ..Default::default()
        };
        let r = solve_truncated_with(&p, &TruncationConfig::new(0.05, 30.0), &grid, None, &opts)
            .unwrap();
        let tail = r.diagnostic("linear_tail").unwrap();
        assert!(tail.holds, "{formulation:?}: {tail:?}");
    }
}

#[test]
fn formulations_agree_on_benchmark() {
    let p = benchmark();
    let grid = Grid1D::with_spacing(30.0, 0.01).unwrap();
    let cfg = TruncationConfig::new(0.1, 30.0);
    let s = |formulation| {
        solve_truncated_with(
            &p,
            &cfg,
            &grid,
            None,
            &SolverOptions {
                formulation,
                ..Default::default()
            },
        )
        .unwrap()
        .sigma
    };
    let (a, b) = (s(Formulation::LogTail), s(Formulation::Direct));
    assert!((a - b).abs() < 1e-4, "{a} vs {b}");
}

#[test]
fn benchmark_grid_convergence() {
    // the cutoff is only C^1, so successive differences scatter around the
    // second-order trend; the order is taken over two halvings
    let p = benchmark();
    let cfg = TruncationConfig::new(0.1, 30.0);
    let s: Vec<f64> = [0.04, 0.02, 0.01, 0.005]
        .iter()
        .map(|&h| {
            solve_truncated(&p, &cfg, &Grid1D::with_spacing(30.0, h).unwrap())
                .unwrap()
                .sigma
        })
        .collect();
    let order = ((s[1] - s[0]) / (s[3] - s[2])).abs().log2() / 2.0;
    assert!(order >= 1.7, "sigma {s:?}, order {order}");
}

#[test]
fn short_schedule_converges_and_skips_tight_widths() {
    let schedule = ContinuationSchedule::new(
        vec![0.2, 0.1, 0.05, 0.02, 0.01],
        vec![20.0, 30.0, 40.0],
        0.01,
    )
    .unwrap();
    let r = continue_theta_alpha(&benchmark(), &schedule, &SolverOptions::default()).unwrap();
    assert!(r.table.iter().all(|e| e.alpha > 20.0));
    let (s2, s1) = (
        r.sigma_at(0.02, 40.0).unwrap(),
        r.sigma_at(0.01, 40.0).unwrap(),
    );
    // the cutoff deficit still moves sigma by about 0.09 between these levels
    assert!(s1 > s2 && s1 - s2 < 0.2);
    assert!(r.warnings.is_empty(), "{:?}", r.warnings);
    assert!((r.centered.phi[r.centered.grid.mid()] - 0.5).abs() < 1e-15);
}

#[test]
fn deep_schedule_settles() {
    let p = benchmark();
    let r = continue_theta_alpha(
        &p,
        &ContinuationSchedule::default(),
        &SolverOptions::default(),
    )
    .unwrap();
    let (a, b) = (
        r.sigma_at(1e-27, 130.0).unwrap(),
        r.sigma_at(1e-30, 130.0).unwrap(),
    );
    assert!((a - b).abs() < 5e-3);
    assert!(r.sigma >= 2.0 - 5e-3 && r.sigma <= theorem3_speed_cap(&p).unwrap() + 5e-3);
    assert!((r.extrapolated.unwrap() - 2.0).abs() < 1e-3);
    assert!(r.final_report.all_hold(), "{:?}", r.final_report.failed());
}

#[test]
fn lambda_list_stops_at_solvability_limit() {
    let t = lambda_continuation(
        1.0,
        1.0,
        &[2.0, 1.0, 0.5],
        &ContinuationSchedule::default(),
        &SolverOptions::default(),
    )
    .unwrap();
    assert_eq!(
        t.rows.iter().map(|r| r.lambda).collect::<Vec<_>>(),
        vec![2.0, 1.0]
    );
    assert_eq!(t.skipped.len(), 1);
    assert!(t.skipped[0].reason.contains('2'), "{}", t.skipped[0].reason);
    assert!((t.sigma_local - 2.0).abs() < 1e-5);
}

#[test]
fn decoupled_speed_is_independent_of_lambda() {
    let t = lambda_continuation(
        0.0,
        0.0,
        &[2.0, 1.0, 0.5],
        &ContinuationSchedule::default(),
        &SolverOptions::default(),
    )
    .unwrap();
    assert_eq!(t.rows.len(), 3);
    for r in &t.rows {
        assert!((r.sigma - 2.0).abs() < 5e-3);
        assert_eq!(r.sigma, t.rows[0].sigma);
    }
}
