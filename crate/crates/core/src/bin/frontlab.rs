use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use frontlab::bounds::{sigma_bounds, theorem3_speed_cap};
use frontlab::io::{self, Format, Record};
use frontlab::nonlocal::{
    continue_theta_alpha, default_thetas, lambda_continuation, ContinuationSchedule, Diagnostic,
    IterationCounts, SigmaEntry, SolverOptions,
};
use frontlab::shooting::{profile_from_shot, sigma_star, ShootOptions};
use frontlab::sweep::{run_sweep, SweepSpec};
use frontlab::{Error, Grid1D, Mode, ModelParams};

#[derive(Parser)]
#[command(
    name = "frontlab",
    version,
    about = "Traveling-front speeds, bounds and profiles"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed-form lower and upper bounds on the critical speed.
    Bounds(BoundsArgs),
    /// Critical speed of the local model by shooting.
    SigmaStar(SigmaStarArgs),
    /// Front profile of the local model, centered at phi = 1/2.
    Profile(ProfileArgs),
    /// Critical speed over a grid of (a, b).
    Sweep(SweepArgs),
    /// Nonlocal front by truncation and continuation in (theta, alpha).
    Nonlocal(NonlocalArgs),
    /// Nonlocal speed along a decreasing list of screening lengths.
    LambdaContinuation(LambdaArgs),
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct BoundsArgs {
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    #[arg(long, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct SigmaStarArgs {
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    /// Width of the final bisection bracket.
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct ProfileArgs {
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    /// Speed of the front; defaults to the critical speed.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    #[arg(long, default_value_t = 30.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.01)]
    h: f64,
    #[arg(long, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct SweepArgs {
    /// Range of a as START:STOP:STEP, both ends included.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    a: (f64, f64, f64),
    /// Comma-separated values of b.
    #[arg(long, value_delimiter = ',', required = true)]
    b: Vec<f64>,
    #[arg(long, default_value = "local", value_parser = parse_mode)]
    mode: Mode,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "csv")]
    format: Format,
    #[command(flatten)]
    schedule: ScheduleArgs,
}

/// Continuation schedule. Without explicit lists the default levels are
/// cut at `--theta` and `--alpha`.
#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct ScheduleArgs {
    /// Deepest truncation level.
    #[arg(long, default_value_t = 1e-30)]
    theta: f64,
    /// Largest half-width.
    #[arg(long, default_value_t = 130.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.01)]
    h: f64,
    /// Explicit decreasing truncation levels (overrides --theta).
    #[arg(long, value_delimiter = ',')]
    thetas: Option<Vec<f64>>,
    /// Explicit increasing half-widths (overrides --alpha).
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    /// Cutoff ramp width as a multiple of theta.
    #[arg(long, default_value_t = 1.0)]
    ramp_ratio: f64,
}

impl ScheduleArgs {
    fn schedule(&self) -> frontlab::Result<ContinuationSchedule> {
        let thetas = match &self.thetas {
            Some(t) => t.clone(),
            None => {
                let mut t: Vec<f64> = default_thetas()
                    .into_iter()
                    .filter(|&x| x > self.theta)
                    .collect();
                t.push(self.theta);
                t
            }
        };
        let alphas = match &self.alphas {
            Some(a) => a.clone(),
            None => {
                let mut a: Vec<f64> = ContinuationSchedule::default()
                    .alphas
                    .into_iter()
                    .filter(|&x| x < self.alpha)
                    .collect();
                a.push(self.alpha);
                a
            }
        };
        let mut s = ContinuationSchedule::new(thetas, alphas, self.h)?;
        s.ramp_ratio = self.ramp_ratio;
        s.validate()?;
        Ok(s)
    }
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct NonlocalArgs {
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    #[arg(long)]
    lambda: f64,
    #[command(flatten)]
    schedule: ScheduleArgs,
    /// JSON report destination (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV of the final profile (xi,phi,u,v), translated so that phi(0) = 1/2.
    #[arg(long)]
    profile_out: Option<PathBuf>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct LambdaArgs {
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    /// Strictly decreasing screening lengths.
    #[arg(long, value_delimiter = ',', default_value = "1,0.5,0.25,0.1")]
    lambdas: Vec<f64>,
    #[command(flatten)]
    schedule: ScheduleArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_range(s: &str) -> Result<(f64, f64, f64), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("bad number `{t}` in range `{s}`"))
    };
    match parts.as_slice() {
        [a] => {
            let x = num(a)?;
            Ok((x, x, 1.0))
        }
        [a, b, c] => Ok((num(a)?, num(b)?, num(c)?)),
        _ => Err(format!("expected START:STOP:STEP, got `{s}`")),
    }
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    match s {
        "local" => Ok(Mode::Local),
        "nonlocal" => Ok(Mode::Nonlocal),
        _ => Err(format!("unknown mode `{s}` (expected local or nonlocal)")),
    }
}

/// Failure carrying the process exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: e.exit_code() as u8,
            message: e.to_string(),
        }
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::from(e).into()),
        None => {
            let mut stdout = std::io::stdout().lock();
            let nl = if text.ends_with('\n') { "" } else { "\n" };
            match write!(stdout, "{text}{nl}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::from(e).into()),
                _ => Ok(()),
            }
        }
    }
}

fn json<T: Serialize>(v: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(v).map_err(|e| Error::from(e).into())
}

fn bounds(args: &BoundsArgs) -> Result<(), Failure> {
    let p = ModelParams::local(args.a, args.b)?;
    let b = sigma_bounds(&p);
    emit(
        &io::serialize(Record::Bounds(&[b]), args.format)?,
        args.out.as_ref(),
    )
}

fn cmd_sigma_star(args: &SigmaStarArgs) -> Result<(), Failure> {
    let p = ModelParams::local(args.a, args.b)?;
    let r = sigma_star(&p, args.tol, &ShootOptions::default())?;
    emit(&json(&r)?, args.out.as_ref())?;
    if !r.bounds_check.holds {
        return Err(Failure {
            code: 3,
            message: format!(
                "sigma* = {} lies outside [{}, {}]",
                r.sigma_star, r.bounds_check.bounds.lower, r.bounds_check.bounds.upper
            ),
        });
    }
    Ok(())
}

fn profile(args: &ProfileArgs) -> Result<(), Failure> {
    let p = ModelParams::local(args.a, args.b)?;
    let opts = ShootOptions::default();
    let sigma = match args.sigma {
        Some(s) => s,
        // upper end of the bracket is the admissible one
        None => sigma_star(&p, args.tol, &opts)?.bracket[1],
    };
    let grid = Grid1D::with_spacing(args.alpha, args.h)?;
    let prof = profile_from_shot(&p, sigma, &grid, &opts)?;
    emit(
        &io::serialize(Record::Profile(&prof), args.format)?,
        args.out.as_ref(),
    )
}

fn sweep(args: &SweepArgs) -> Result<(), Failure> {
    let spec = SweepSpec {
        a_range: args.a,
        b_values: args.b.clone(),
        mode: args.mode,
        lambda: args.lambda,
        output: args.out.clone(),
        format: args.format,
    };
    let schedule = args.schedule.schedule()?;
    let rows = run_sweep(
        &spec,
        args.tol,
        &ShootOptions::default(),
        &schedule,
        &SolverOptions::default(),
    )?;
    emit(
        &io::serialize(Record::Sweep(&rows), spec.format)?,
        Some(&spec.output),
    )?;
    let failed = rows.iter().filter(|r| r.status != "ok").count();
    eprintln!(
        "{} rows written to {} ({} not ok)",
        rows.len(),
        spec.output.display(),
        failed
    );
    Ok(())
}

#[derive(Serialize)]
struct NonlocalOutput {
    params: ModelParams,
    schedule: ContinuationSchedule,
    solver: SolverOptions,
    sigma: f64,
    extrapolated: Option<f64>,
    speed_cap: f64,
    energy_lhs: f64,
    energy_rhs: f64,
    energy_margin: f64,
    iterations: IterationCounts,
    diagnostics: Vec<Diagnostic>,
    table: Vec<SigmaEntry>,
    warnings: Vec<String>,
}

fn nonlocal(args: &NonlocalArgs) -> Result<(), Failure> {
    let p = ModelParams::new(args.a, args.b, args.lambda)?.validate(Mode::Nonlocal)?;
    let schedule = args.schedule.schedule()?;
    let solver = SolverOptions::default();
    let r = continue_theta_alpha(&p, &schedule, &solver)?;
    let f = &r.final_report;
    let out = NonlocalOutput {
        params: p,
        speed_cap: theorem3_speed_cap(&p)?,
        schedule,
        solver,
        sigma: r.sigma,
        extrapolated: r.extrapolated,
        energy_lhs: f.energy_lhs,
        energy_rhs: f.energy_rhs,
        energy_margin: f.energy_rhs - f.energy_lhs,
        iterations: f.iterations,
        diagnostics: f.diagnostics.clone(),
        table: r.table.clone(),
        warnings: r.warnings.clone(),
    };
    if let Some(path) = &args.profile_out {
        emit(&io::profile_to_csv(&r.centered)?, Some(path))?;
    }
    emit(&json(&out)?, args.out.as_ref())
}

fn lambda(args: &LambdaArgs) -> Result<(), Failure> {
    let schedule = args.schedule.schedule()?;
    let t = lambda_continuation(
        args.a,
        args.b,
        &args.lambdas,
        &schedule,
        &SolverOptions::default(),
    )?;
    emit(&json(&t)?, args.out.as_ref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Bounds(a) => bounds(a),
        Cmd::SigmaStar(a) => cmd_sigma_star(a),
        Cmd::Profile(a) => profile(a),
        Cmd::Sweep(a) => sweep(a),
        Cmd::Nonlocal(a) => nonlocal(a),
        Cmd::LambdaContinuation(a) => lambda(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
