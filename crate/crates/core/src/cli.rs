//! Batch drivers behind the `ksreg` binary.
//!
//! Each `cmd_*` returns an [`Outcome`]: an exit code, the primary artifact
//! (JSON or CSV text) and a one-line summary. Nothing here touches global
//! state, so runs are reproducible byte for byte given the same seed.

use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flows::{
    collision_set_membership, first_collision_time, kepler_time_along_oscillator,
    ks_relatedness_harness, near_collision_seed, oscillator_flow, run_bench, BenchRow,
    HarnessOptions, HarnessReport,
};
use crate::integrate::Options;
use crate::invariants::{eval_generators, GeneratorVector, PhasePoint8};
use crate::kepler_dynamics::{radial_collision_time, radial_collision_time_quadrature, radial_fall};
use crate::ks_map::{
    check_level_set, ks, poisson_property_residual, pullback_angular_momentum,
    pullback_eccentricity, pullback_inner_product, pullback_kepler_hamiltonian,
};
use crate::orbit_space::{
    lagrange_identity_check, relation_residuals, sample_level_set, sphere_relations,
    ResidualEntry,
};
use crate::quadratic_poisson::{regenerate_table, verify_so4_relations};
use crate::sampling::{collinear_level_point, gaussian_point, rng, small_rational_point, PRNG_ALGORITHM};
use crate::scalar::{cross, dot};
use crate::trajectory::fmt_f64;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Config(format!("unknown format {other:?}"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

/// Settings shared by every subcommand.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub tolerance: f64,
    pub samples: usize,
    pub t_max: f64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            tolerance: 1e-10,
            samples: 1000,
            t_max: 2.0 * PI,
            out: None,
            format: Format::Json,
        }
    }
}

impl RunConfig {
    /// Zero tolerance is allowed: it makes float suites fail, not the config.
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return Err(Error::Config(format!("tolerance {} must be >= 0", self.tolerance)));
        }
        if self.samples == 0 {
            return Err(Error::Config("samples must be positive".into()));
        }
        if !(self.t_max >= 0.0 && self.t_max.is_finite()) {
            return Err(Error::Config(format!("t-max {} must be >= 0", self.t_max)));
        }
        Ok(())
    }
}

/// Result of one subcommand.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub artifact: String,
    pub summary: String,
}

impl Outcome {
    pub fn usage(err: &Error) -> Self {
        Self {
            exit_code: EXIT_USAGE,
            artifact: String::new(),
            summary: format!("error: {err}"),
        }
    }
}

/// `"q1,q2,q3,q4,p1,p2,p3,p4"` (whitespace around fields is ignored).
pub fn parse_state(s: &str) -> Result<PhasePoint8<f64>> {
    let fields: Vec<&str> = s.split(',').map(str::trim).collect();
    if fields.len() != 8 {
        return Err(Error::Parse(format!("expected 8 comma-separated numbers, got {}", fields.len())));
    }
    let mut z = [0.0; 8];
    for (slot, f) in z.iter_mut().zip(&fields) {
        let v: f64 = f.parse().map_err(|e| Error::Parse(format!("{f:?}: {e}")))?;
        if !v.is_finite() {
            return Err(Error::Parse(format!("{f:?} is not finite")));
        }
        *slot = v;
    }
    Ok(PhasePoint8::from_array(z))
}

/// Named seeds: `circular`, `collision`, or `near:<|L|>`.
pub fn preset_state(name: &str) -> Result<PhasePoint8<f64>> {
    match name {
        "circular" => near_collision_seed(1.0),
        "collision" => Ok(PhasePoint8::new([2f64.sqrt(), 0.0, 0.0, 0.0], [0.0; 4])),
        _ => match name.strip_prefix("near:") {
            Some(v) => {
                let ell: f64 = v.trim().parse().map_err(|e| Error::Parse(format!("{v:?}: {e}")))?;
                near_collision_seed(ell).map_err(|e| Error::Parse(e.to_string()))
            }
            None => Err(Error::Parse(format!("unknown preset {name:?}"))),
        },
    }
}

/// Comma-separated `|L|` values, each in `(0, 1]`.
pub fn parse_bench_grid(s: &str) -> Result<Vec<f64>> {
    if s.trim().is_empty() {
        return Err(Error::Parse("empty grid".into()));
    }
    s.split(',')
        .map(|f| {
            let f = f.trim();
            let v: f64 = f.parse().map_err(|e| Error::Parse(format!("{f:?}: {e}")))?;
            if v > 0.0 && v <= 1.0 {
                Ok(v)
            } else {
                Err(Error::Parse(format!("|L| = {f} outside (0, 1]")))
            }
        })
        .collect()
}

/// A generator vector in its JSON form (`K`, `L`, `H2`, `Xi`, `U`, `V`).
pub fn parse_generator_json(s: &str) -> Result<GeneratorVector<f64>> {
    let g: GeneratorVector<f64> = serde_json::from_str(s)?;
    if g.to_array().iter().any(|v| !v.is_finite()) {
        return Err(Error::Parse("non-finite generator value".into()));
    }
    Ok(g)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub samples: usize,
    pub max_residual: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub residuals: Vec<ResidualEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl SuiteResult {
    fn new(name: &str, samples: usize, max_residual: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            passed: max_residual <= tol,
            samples,
            max_residual,
            residuals: Vec::new(),
            detail: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub prng: &'static str,
    pub seed: u64,
    pub samples: usize,
    pub tolerance: f64,
    pub passed: bool,
    pub suites: Vec<SuiteResult>,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + a.abs().max(b.abs()))
}

fn suite_so4() -> Result<SuiteResult> {
    let report = verify_so4_relations()?;
    let failed = report.checks.iter().filter(|c| !c.matches).count();
    let mut s = SuiteResult::new("so4_relations_exact", report.checks.len(), failed as f64, 0.0);
    let factors: Vec<String> = report
        .factors
        .iter()
        .map(|f| format!("{}: {}", f.relation, f.computed.as_deref().unwrap_or("none")))
        .collect();
    s.detail = Some(format!("sign {}; reduced factors {}", report.sign, factors.join("; ")));
    Ok(s)
}

fn suite_orbit_exact(cfg: &RunConfig) -> SuiteResult {
    let mut r = rng(cfg.seed);
    let mut failures = 0usize;
    for _ in 0..cfg.samples {
        let g = eval_generators(&small_rational_point(&mut r));
        let res = relation_residuals(&g);
        let lag = lagrange_identity_check(&g);
        let spheres = sphere_relations(&g);
        let ok = res.on_orbit_space(&Zero::zero())
            && lag.max_gap().is_zero()
            && spheres.iter().all(|s| s.gap().is_zero());
        failures += usize::from(!ok);
    }
    let mut s = SuiteResult::new("orbit_space_exact", cfg.samples, failures as f64, 0.0);
    s.detail = Some(format!("{failures} points with a nonzero exact residual"));
    s
}

/// Float residuals are scaled by `(1 + H2)^2`, the size of a degree-two
/// expression in the generators.
fn suite_orbit_float(cfg: &RunConfig) -> SuiteResult {
    let mut r = rng(cfg.seed.wrapping_add(1));
    let mut worst = 0.0f64;
    let mut worst_entries = Vec::new();
    for _ in 0..cfg.samples {
        let g = eval_generators(&gaussian_point(&mut r));
        let scale = (1.0 + g.h2).powi(2);
        let res = relation_residuals(&g);
        let lag = lagrange_identity_check(&g);
        let spheres = sphere_relations(&g);
        let m = (res.max_abs() / scale)
            .max(lag.max_gap() / (scale * scale))
            .max(spheres.iter().map(|s| s.gap()).fold(0.0, f64::max) / scale);
        if m > worst || worst_entries.is_empty() {
            worst = worst.max(m);
            worst_entries = res.entries();
        }
    }
    let mut s = SuiteResult::new("orbit_space_float", cfg.samples, worst, cfg.tolerance);
    if !s.passed {
        s.residuals = worst_entries;
    }
    s
}

fn suite_pullbacks(cfg: &RunConfig) -> Result<SuiteResult> {
    let mut r = rng(cfg.seed.wrapping_add(2));
    let level = 1e-9;
    let mut worst = 0.0f64;
    for _ in 0..cfg.samples {
        let z = sample_level_set(&mut r, 1.0);
        let (a, b) = pullback_kepler_hamiltonian(&z)?;
        worst = worst.max(rel(a, b));
        let (j, l) = pullback_angular_momentum(&z, &level)?;
        let (e, k) = pullback_eccentricity(&z, &level)?;
        for i in 0..3 {
            worst = worst.max(rel(j[i], l[i])).max(rel(e[i], k[i]));
        }
        let (a, b) = pullback_inner_product(&z, &level)?;
        worst = worst.max(rel(a, b));
    }
    Ok(SuiteResult::new("ks_pullbacks", cfg.samples, worst, cfg.tolerance))
}

fn suite_poisson(cfg: &RunConfig) -> Result<SuiteResult> {
    let mut r = rng(cfg.seed.wrapping_add(3));
    let mut worst = 0.0f64;
    let mut xx = 0.0f64;
    for _ in 0..cfg.samples {
        let res = poisson_property_residual(&sample_level_set(&mut r, 1.0))?;
        worst = worst.max(res.max());
        xx = xx.max(res.max_xx);
    }
    let mut s = SuiteResult::new("ks_poisson_on_xi_zero", cfg.samples, worst, cfg.tolerance);
    s.detail = Some(format!("max x-x block {}", fmt_f64(xx)));
    Ok(s)
}

fn suite_collision(cfg: &RunConfig) -> Result<SuiteResult> {
    let mut r = rng(cfg.seed.wrapping_add(4));
    let tol = 1e-9;
    let mut disagreements = 0usize;
    for i in 0..cfg.samples {
        let z = if i % 2 == 0 {
            collinear_level_point(&mut r)
        } else {
            sample_level_set(&mut r, 1.0)
        };
        let member = collision_set_membership(&z, tol)?;
        let hits = first_collision_time(&z, tol)?.is_some();
        let w = ks(&z)?;
        let j = cross(&w.x, &w.y);
        let j_zero = dot(&j, &j).sqrt() <= tol;
        let expected = i % 2 == 0;
        disagreements += usize::from(member != hits || member != j_zero || member != expected);
    }
    let mut s = SuiteResult::new("collision_theorem", cfg.samples, disagreements as f64, 0.0);
    s.detail = Some(format!("{disagreements} disagreements"));
    Ok(s)
}

fn suite_radial() -> Result<SuiteResult> {
    let mut worst = 0.0f64;
    let mut bound_ok = true;
    let grid = [0.25, 0.5, 1.0, 1.5, 2.0];
    for r0 in grid {
        let closed = radial_collision_time(r0)?;
        let quad = radial_collision_time_quadrature(r0, 1e-12)?;
        let fall = radial_fall(r0, &Options::default())?;
        worst = worst.max((closed - quad).abs()).max((closed - fall.time).abs());
        bound_ok &= if r0 < 2.0 { closed < PI } else { closed <= PI };
    }
    let mut s = SuiteResult::new("radial_collision_time", grid.len(), worst, 1e-5);
    s.passed &= bound_ok;
    s.detail = Some(format!("tau0 < pi on the grid: {bound_ok}"));
    Ok(s)
}

pub fn verify_report(cfg: &RunConfig) -> Result<VerifyReport> {
    cfg.validate()?;
    let suites = vec![
        suite_so4()?,
        suite_orbit_exact(cfg),
        suite_orbit_float(cfg),
        suite_pullbacks(cfg)?,
        suite_poisson(cfg)?,
        suite_collision(cfg)?,
        suite_radial()?,
    ];
    Ok(VerifyReport {
        prng: PRNG_ALGORITHM,
        seed: cfg.seed,
        samples: cfg.samples,
        tolerance: cfg.tolerance,
        passed: suites.iter().all(|s| s.passed),
        suites,
    })
}

fn verify_csv(report: &VerifyReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["suite", "passed", "samples", "max_residual"])?;
    for s in &report.suites {
        w.write_record([
            s.name.clone(),
            s.passed.to_string(),
            s.samples.to_string(),
            fmt_f64(s.max_residual),
        ])?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| Error::Config(e.to_string()))?)
        .expect("csv output is utf-8");
    Ok(format!("# prng={}; seed={}\n{body}", report.prng, report.seed))
}

pub fn cmd_verify(cfg: &RunConfig) -> Outcome {
    let report = match verify_report(cfg) {
        Ok(r) => r,
        Err(e @ Error::Config(_)) => return Outcome::usage(&e),
        Err(e) => {
            return Outcome {
                exit_code: EXIT_FAILURE,
                artifact: String::new(),
                summary: format!("verification aborted: {e}"),
            }
        }
    };
    let artifact = match cfg.format {
        Format::Json => serde_json::to_string_pretty(&report).map_err(Error::from),
        Format::Csv => verify_csv(&report),
    };
    let artifact = match artifact {
        Ok(a) => a,
        Err(e) => return Outcome::usage(&e),
    };
    let failed: Vec<&str> = report.suites.iter().filter(|s| !s.passed).map(|s| s.name.as_str()).collect();
    let summary = if failed.is_empty() {
        format!("all {} suites passed", report.suites.len())
    } else {
        let listing: Vec<String> = report
            .suites
            .iter()
            .filter(|s| !s.passed)
            .map(|s| format!("{}: max residual {}", s.name, fmt_f64(s.max_residual)))
            .collect();
        format!("failed: {}", listing.join("; "))
    };
    Outcome {
        exit_code: if report.passed { EXIT_OK } else { EXIT_FAILURE },
        artifact: artifact + "\n",
        summary,
    }
}

/// Collision seeds get this report instead of a harness run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CollisionReport {
    pub seed: u64,
    pub t_max: f64,
    /// Oscillator time at which `q` first vanishes.
    pub oscillator_collision_time: f64,
    /// The same instant in Kepler time on the ks image.
    pub collision_time: f64,
    pub kepler_side: &'static str,
}

fn write_file(dir: &Path, name: &str, contents: &[u8]) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

fn json_or_csv<T: Serialize>(
    value: &T,
    format: Format,
    csv: impl FnOnce(&mut Vec<u8>) -> Result<()>,
) -> Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_vec_pretty(value)?;
            s.push(b'\n');
            Ok(s)
        }
        Format::Csv => {
            let mut buf = Vec::new();
            csv(&mut buf)?;
            Ok(buf)
        }
    }
}

fn orbit(cfg: &RunConfig, z0: &PhasePoint8<f64>) -> Result<Outcome> {
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    let ext = cfg.format.extension();
    let tol = cfg.tolerance.max(1e-12);

    if collision_set_membership(z0, tol)? {
        let opts = HarnessOptions::default();
        let tau = first_collision_time(z0, tol)?
            .ok_or_else(|| Error::Integration("collision seed without a collision".into()))?;
        let times: Vec<f64> = (0..=opts.samples)
            .map(|i| cfg.t_max * i as f64 / opts.samples as f64)
            .collect();
        let times = if cfg.t_max == 0.0 { vec![0.0] } else { times };
        let states = times.iter().map(|&t| oscillator_flow(z0, t)).collect();
        let osc = crate::trajectory::OscillatorTrajectory::new(times, states)?;
        let body = json_or_csv(&osc, cfg.format, |b| osc.write_csv(b))?;
        write_file(&dir, &format!("oscillator.{ext}"), &body)?;
        let report = CollisionReport {
            seed: cfg.seed,
            t_max: cfg.t_max,
            oscillator_collision_time: tau,
            collision_time: kepler_time_along_oscillator(z0, tau),
            kepler_side: "collapsing",
        };
        let text = serde_json::to_string_pretty(&report)? + "\n";
        write_file(&dir, "report.json", text.as_bytes())?;
        return Ok(Outcome {
            exit_code: EXIT_OK,
            summary: format!(
                "collision seed: q = 0 at oscillator time {}, Kepler collision time {}",
                fmt_f64(report.oscillator_collision_time),
                fmt_f64(report.collision_time)
            ),
            artifact: text,
        });
    }

    let opts = HarnessOptions {
        tolerance: tol,
        ..HarnessOptions::default()
    };
    let run = ks_relatedness_harness(z0, cfg.t_max, &opts)?;
    let osc = json_or_csv(&run.oscillator, cfg.format, |b| run.oscillator.write_csv(b))?;
    write_file(&dir, &format!("oscillator.{ext}"), &osc)?;
    let img = json_or_csv(&run.ks_image, cfg.format, |b| run.ks_image.write_csv(b))?;
    write_file(&dir, &format!("ks_image.{ext}"), &img)?;
    let kep = json_or_csv(&run.kepler, cfg.format, |b| run.kepler.write_csv(b))?;
    write_file(&dir, &format!("kepler.{ext}"), &kep)?;
    let report = HarnessReport::new(cfg.seed, cfg.t_max, &run);
    let text = serde_json::to_string_pretty(&report)? + "\n";
    write_file(&dir, "report.json", text.as_bytes())?;
    let mut summary = format!("max deviation {}", fmt_f64(run.max_deviation));
    if let Some(t) = run.collision_time {
        summary.push_str(&format!("; Kepler curve collapsed at t = {}", fmt_f64(t)));
    }
    Ok(Outcome {
        exit_code: EXIT_OK,
        artifact: text,
        summary,
    })
}

pub fn cmd_orbit(cfg: &RunConfig, state: &str) -> Outcome {
    if let Err(e) = cfg.validate() {
        return Outcome::usage(&e);
    }
    let parsed = if state.contains(',') {
        parse_state(state)
    } else {
        preset_state(state)
    };
    let z0 = match parsed {
        Ok(z) => z,
        Err(e) => return Outcome::usage(&e),
    };
    if let Err(e) = check_level_set(&z0, &cfg.tolerance.max(1e-12)) {
        return Outcome::usage(&e);
    }
    match orbit(cfg, &z0) {
        Ok(o) => o,
        Err(e @ (Error::Io(_) | Error::Config(_) | Error::Precondition(_))) => Outcome::usage(&e),
        Err(e) => Outcome {
            exit_code: EXIT_FAILURE,
            artifact: String::new(),
            summary: format!("orbit failed: {e}"),
        },
    }
}

pub const BENCH_COLUMNS: [&str; 6] =
    ["ell", "method", "steps", "max_energy_drift", "periapsis_error", "failed"];

pub fn bench_csv(rows: &[BenchRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(BENCH_COLUMNS)?;
    for r in rows {
        w.write_record([
            fmt_f64(r.ell),
            r.method.name().to_string(),
            r.steps.to_string(),
            fmt_f64(r.max_energy_drift),
            fmt_f64(r.periapsis_error),
            r.failed.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn cmd_bench(cfg: &RunConfig, grid: &str) -> Outcome {
    if let Err(e) = cfg.validate() {
        return Outcome::usage(&e);
    }
    let grid = match parse_bench_grid(grid) {
        Ok(g) => g,
        Err(e) => return Outcome::usage(&e),
    };
    let rows = match run_bench(&grid, &Options::default()) {
        Ok(r) => r,
        Err(e) => return Outcome::usage(&e),
    };
    let artifact = match cfg.format {
        Format::Csv => bench_csv(&rows),
        Format::Json => serde_json::to_string_pretty(&rows).map(|s| s + "\n").map_err(Error::from),
    };
    let artifact = match artifact {
        Ok(a) => a,
        Err(e) => return Outcome::usage(&e),
    };
    let ks_failed = rows
        .iter()
        .filter(|r| r.method == crate::flows::BenchMethod::KsRegularized && r.failed)
        .count();
    let raw_failed = rows
        .iter()
        .filter(|r| r.method == crate::flows::BenchMethod::RawKepler && r.failed)
        .count();
    Outcome {
        exit_code: if ks_failed == 0 { EXIT_OK } else { EXIT_FAILURE },
        artifact,
        summary: format!(
            "{} seeds: ks_regularized failed {ks_failed}, raw_kepler failed {raw_failed}",
            grid.len()
        ),
    }
}

#[derive(Clone, Debug, Serialize)]
struct TableField<'a> {
    field: &'a str,
    value: &'a str,
}

pub fn cmd_table(cfg: &RunConfig) -> Outcome {
    if let Err(e) = cfg.validate() {
        return Outcome::usage(&e);
    }
    let table = match regenerate_table() {
        Ok(t) => t,
        Err(e) => {
            return Outcome {
                exit_code: EXIT_FAILURE,
                artifact: String::new(),
                summary: format!("table regeneration failed: {e}"),
            }
        }
    };
    let artifact = match cfg.format {
        Format::Json => {
            let fields: Vec<TableField> = table
                .fields
                .iter()
                .map(|(f, v)| TableField { field: f, value: v })
                .collect();
            serde_json::to_string_pretty(&serde_json::json!({
                "fields": fields,
                "discrepancies": table.discrepancies,
            }))
            .map(|s| s + "\n")
            .map_err(Error::from)
        }
        Format::Csv => (|| {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["field", "target", "published", "computed"])?;
            for d in &table.discrepancies {
                w.write_record([&d.field, &d.target, &d.published, &d.computed])?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        })(),
    };
    match artifact {
        Ok(a) => Outcome {
            exit_code: EXIT_OK,
            artifact: a,
            summary: format!(
                "{} fields regenerated, {} discrepancies with the reference table",
                table.fields.len(),
                table.discrepancies.len()
            ),
        },
        Err(e) => Outcome::usage(&e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_parser() {
        let z = parse_state("1, 0, 0, 0, 0, 0, 1, 0").unwrap();
        assert_eq!(z, PhasePoint8::new([1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]));
        assert!(parse_state("1,2,3").is_err());
        assert!(parse_state("1,2,3,4,5,6,7,x").is_err());
        assert!(parse_state("1,2,3,4,5,6,7,inf").is_err());
        assert!(parse_state("").is_err());
    }

    #[test]
    fn presets() {
        assert_eq!(preset_state("circular").unwrap(), near_collision_seed(1.0).unwrap());
        assert!(preset_state("near:0.01").is_ok());
        assert!(preset_state("near:2").is_err());
        assert!(preset_state("elliptic").is_err());
    }

    #[test]
    fn grid_parser() {
        assert_eq!(parse_bench_grid("1e-1, 1e-3").unwrap(), vec![0.1, 0.001]);
        assert!(parse_bench_grid("").is_err());
        assert!(parse_bench_grid("0").is_err());
        assert!(parse_bench_grid("0.1,,0.2").is_err());
    }

    #[test]
    fn generator_json_parser() {
        let g = parse_generator_json(
            r#"{"K":[1,0,0],"L":[0,0,0],"H2":1,"Xi":0,"U":[1,0,0,0],"V":[0,1,0,0]}"#,
        )
        .unwrap();
        assert_eq!(g.k, [1.0, 0.0, 0.0]);
        assert!(parse_generator_json("{}").is_err());
        assert!(parse_generator_json("[1,2]").is_err());
    }

    #[test]
    fn config_validation() {
        assert!(RunConfig::default().validate().is_ok());
        let bad = RunConfig {
            samples: 0,
            ..RunConfig::default()
        };
        assert_eq!(cmd_verify(&bad).exit_code, EXIT_USAGE);
        let zero_tol = RunConfig {
            tolerance: 0.0,
            ..RunConfig::default()
        };
        assert!(zero_tol.validate().is_ok());
        let neg = RunConfig {
            tolerance: -1.0,
            ..RunConfig::default()
        };
        assert!(neg.validate().is_err());
    }

    #[test]
    fn verify_small_run() {
        let cfg = RunConfig {
            samples: 50,
            ..RunConfig::default()
        };
        let out = cmd_verify(&cfg);
        assert_eq!(out.exit_code, EXIT_OK, "{}", out.summary);
        assert_eq!(out, cmd_verify(&cfg));
        let strict = RunConfig {
            tolerance: 0.0,
            ..cfg
        };
        let out = cmd_verify(&strict);
        assert_eq!(out.exit_code, EXIT_FAILURE);
        assert!(out.artifact.contains("relation_name"));
    }

    #[test]
    fn bench_rejects_empty_grid() {
        assert_eq!(cmd_bench(&RunConfig::default(), "").exit_code, EXIT_USAGE);
    }

    #[test]
    fn table_lists_discrepancies() {
        let out = cmd_table(&RunConfig {
            format: Format::Csv,
            ..RunConfig::default()
        });
        assert_eq!(out.exit_code, EXIT_OK);
        assert!(out.artifact.starts_with("field,target,published,computed\n"));
        assert!(out.artifact.lines().count() > 1);
    }
}
