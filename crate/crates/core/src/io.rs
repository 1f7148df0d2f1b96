//! CSV and JSON encodings of bounds, sweep rows and profiles.
//!
//! Floats are written with 17 significant digits (`{:.16e}`) in CSV and in
//! serde_json's shortest round-trip form in JSON, so both parse back exactly.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bounds::{LowerBranch, SigmaBounds, UpperBranch};
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::profile::{Theta, WaveProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Parse(format!(
                "unknown format `{s}` (expected csv or json)"
            ))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// One line of a speed sweep. `sigma_star` is absent when the point failed;
/// `status` then says why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub a: f64,
    pub b: f64,
    pub sigma_lower: f64,
    pub sigma_upper: f64,
    pub sigma_star: Option<f64>,
    pub lower_branch: String,
    pub upper_branch: String,
    pub status: String,
}

/// Anything this module writes.
#[derive(Debug, Clone, Copy)]
pub enum Record<'a> {
    Profile(&'a WaveProfile),
    Bounds(&'a [SigmaBounds]),
    Sweep(&'a [SweepRow]),
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn finite(field: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFiniteValue {
            field: field.to_string(),
        })
    }
}

fn all_finite(field: &str, xs: &[f64]) -> Result<()> {
    xs.iter().try_for_each(|&x| finite(field, x))
}

fn check_profile(p: &WaveProfile) -> Result<()> {
    finite("sigma", p.sigma)?;
    all_finite("phi", &p.phi)?;
    if let Some(u) = &p.u {
        all_finite("u", u)?;
    }
    if let Some(v) = &p.v {
        all_finite("v", v)?;
    }
    Ok(())
}

fn check_bounds(b: &SigmaBounds) -> Result<()> {
    finite("a", b.a)?;
    finite("b", b.b)?;
    finite("lower", b.lower)?;
    finite("upper", b.upper)
}

fn check_row(r: &SweepRow) -> Result<()> {
    finite("a", r.a)?;
    finite("b", r.b)?;
    finite("sigma_lower", r.sigma_lower)?;
    finite("sigma_upper", r.sigma_upper)?;
    if let Some(s) = r.sigma_star {
        finite("sigma_star", s)?;
    }
    Ok(())
}

/// Encodes `record` in `format`.
pub fn serialize(record: Record<'_>, format: Format) -> Result<String> {
    match (record, format) {
        (Record::Profile(p), Format::Csv) => profile_to_csv(p),
        (Record::Profile(p), Format::Json) => profile_to_json(p),
        (Record::Bounds(b), Format::Csv) => bounds_to_csv(b),
        (Record::Bounds(b), Format::Json) => {
            b.iter().try_for_each(check_bounds)?;
            Ok(serde_json::to_string_pretty(b)?)
        }
        (Record::Sweep(r), Format::Csv) => sweep_to_csv(r),
        (Record::Sweep(r), Format::Json) => {
            r.iter().try_for_each(check_row)?;
            Ok(serde_json::to_string_pretty(r)?)
        }
    }
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

fn parse_f64(field: &str, s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("bad number `{s}` in column `{field}`")))
}

fn parse_opt(field: &str, s: &str) -> Result<Option<f64>> {
    if s.trim().is_empty() {
        Ok(None)
    } else {
        parse_f64(field, s).map(Some)
    }
}

/// Reads records and checks the header matches `header` exactly.
fn read_records(text: &str, header: &[&str]) -> Result<Vec<csv::StringRecord>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let found: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if found != header {
        return Err(Error::Parse(format!(
            "expected columns {}, found {}",
            header.join(","),
            found.join(",")
        )));
    }
    r.records().map(|rec| rec.map_err(Error::from)).collect()
}

pub const BOUNDS_HEADER: [&str; 6] = ["a", "b", "lower", "upper", "lower_branch", "upper_branch"];

pub fn bounds_to_csv(rows: &[SigmaBounds]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(BOUNDS_HEADER)?;
    for b in rows {
        check_bounds(b)?;
        w.write_record([
            fmt_f64(b.a),
            fmt_f64(b.b),
            fmt_f64(b.lower),
            fmt_f64(b.upper),
            b.lower_branch.to_string(),
            b.upper_branch.to_string(),
        ])?;
    }
    finish(w)
}

pub fn bounds_from_csv(text: &str) -> Result<Vec<SigmaBounds>> {
    read_records(text, &BOUNDS_HEADER)?
        .iter()
        .map(|r| {
            Ok(SigmaBounds {
                a: parse_f64("a", &r[0])?,
                b: parse_f64("b", &r[1])?,
                lower: parse_f64("lower", &r[2])?,
                upper: parse_f64("upper", &r[3])?,
                lower_branch: LowerBranch::parse(&r[4])?,
                upper_branch: UpperBranch::parse(&r[5])?,
            })
        })
        .collect()
}

pub const SWEEP_HEADER: [&str; 8] = [
    "a",
    "b",
    "sigma_lower",
    "sigma_upper",
    "sigma_star",
    "lower_branch",
    "upper_branch",
    "status",
];

pub fn sweep_to_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SWEEP_HEADER)?;
    for r in rows {
        check_row(r)?;
        w.write_record([
            fmt_f64(r.a),
            fmt_f64(r.b),
            fmt_f64(r.sigma_lower),
            fmt_f64(r.sigma_upper),
            r.sigma_star.map(fmt_f64).unwrap_or_default(),
            r.lower_branch.clone(),
            r.upper_branch.clone(),
            r.status.clone(),
        ])?;
    }
    finish(w)
}

pub fn sweep_from_csv(text: &str) -> Result<Vec<SweepRow>> {
    read_records(text, &SWEEP_HEADER)?
        .iter()
        .map(|r| {
            Ok(SweepRow {
                a: parse_f64("a", &r[0])?,
                b: parse_f64("b", &r[1])?,
                sigma_lower: parse_f64("sigma_lower", &r[2])?,
                sigma_upper: parse_f64("sigma_upper", &r[3])?,
                sigma_star: parse_opt("sigma_star", &r[4])?,
                lower_branch: r[5].to_string(),
                upper_branch: r[6].to_string(),
                status: r[7].to_string(),
            })
        })
        .collect()
}

pub const PROFILE_HEADER: [&str; 4] = ["xi", "phi", "u", "v"];

/// Profile table; `u` and `v` are left empty for local profiles.
pub fn profile_to_csv(p: &WaveProfile) -> Result<String> {
    check_profile(p)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(PROFILE_HEADER)?;
    let cell =
        |col: &Option<Vec<f64>>, i: usize| col.as_ref().map(|c| fmt_f64(c[i])).unwrap_or_default();
    for (i, &f) in p.phi.iter().enumerate() {
        w.write_record([
            fmt_f64(p.grid.xi(i)),
            fmt_f64(f),
            cell(&p.u, i),
            cell(&p.v, i),
        ])?;
    }
    finish(w)
}

/// Inverse of [`profile_to_csv`]; the speed and truncation level are not
/// part of the table and must be supplied.
pub fn profile_from_csv(text: &str, sigma: f64, theta: Theta) -> Result<WaveProfile> {
    let recs = read_records(text, &PROFILE_HEADER)?;
    if recs.len() < 2 {
        return Err(Error::Parse("profile table needs at least two rows".into()));
    }
    let alpha = -parse_f64("xi", &recs[0][0])?;
    let grid = Grid1D::new(alpha, recs.len() - 1)?;
    let mut phi = Vec::with_capacity(recs.len());
    let (mut u, mut v) = (Vec::new(), Vec::new());
    for r in &recs {
        phi.push(parse_f64("phi", &r[1])?);
        if let Some(x) = parse_opt("u", &r[2])? {
            u.push(x);
        }
        if let Some(x) = parse_opt("v", &r[3])? {
            v.push(x);
        }
    }
    let prof = WaveProfile::new(grid, phi, sigma, theta)?;
    match (u.is_empty(), v.is_empty()) {
        (true, true) => Ok(prof),
        _ => prof.with_potential(u, v),
    }
}

/// Flat JSON form of a profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ProfileJson {
    alpha: f64,
    n: usize,
    h: f64,
    sigma: f64,
    theta: f64,
    phi: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    u: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    v: Option<Vec<f64>>,
}

pub fn profile_to_json(p: &WaveProfile) -> Result<String> {
    check_profile(p)?;
    let j = ProfileJson {
        alpha: p.grid.alpha(),
        n: p.grid.n(),
        h: p.grid.h(),
        sigma: p.sigma,
        theta: p.theta.value(),
        phi: p.phi.clone(),
        u: p.u.clone(),
        v: p.v.clone(),
    };
    Ok(serde_json::to_string_pretty(&j)?)
}

pub fn profile_from_json(text: &str) -> Result<WaveProfile> {
    let j: ProfileJson = serde_json::from_str(text)?;
    let prof = WaveProfile::new(
        Grid1D::new(j.alpha, j.n)?,
        j.phi,
        j.sigma,
        Theta::new(j.theta)?,
    )?;
    match (j.u, j.v) {
        (Some(u), Some(v)) => prof.with_potential(u, v),
        (None, None) => Ok(prof),
        _ => Err(Error::Parse("`u` and `v` must be given together".into())),
    }
}
