//! Exact torus flows on `R^8`, the induced flow on the orbit space,
//! collision-set detection, and the harness relating the oscillator flow to
//! the preregularized Kepler flow.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrate::{solve, Direction, Event, IntegratorStats, Options, Termination};
use crate::invariants::{eval_generators, GeneratorVector, PhasePoint8};
use crate::kepler_dynamics::{
    kepler_energy, kepler_vector_field, preregularized_hamiltonian, preregularized_vector_field,
    COLLISION_RADIUS,
};
use crate::ks_map::{check_level_set, ks, PhasePoint6};
use crate::orbit_space::relation_residuals;
use crate::scalar::{dot, Scalar};
use crate::trajectory::{KeplerTrajectory, OscillatorTrajectory};

/// `(q, p) -> (c q + s p, -s q + c p)` for any `(c, s)` with `c^2 + s^2 = 1`.
pub fn oscillator_rotate<T: Scalar>(z: &PhasePoint8<T>, c: &T, s: &T) -> PhasePoint8<T> {
    PhasePoint8::new(
        std::array::from_fn(|i| c.clone() * z.q[i].clone() + s.clone() * z.p[i].clone()),
        std::array::from_fn(|i| -s.clone() * z.q[i].clone() + c.clone() * z.p[i].clone()),
    )
}

/// The flow of `X_H2` for time `t`, in closed form.
pub fn oscillator_flow(z: &PhasePoint8<f64>, t: f64) -> PhasePoint8<f64> {
    let (s, c) = t.sin_cos();
    oscillator_rotate(z, &c, &s)
}

/// `K, L, H2, Xi` fixed, `(U, V) -> (U cos u + V sin u, -U sin u + V cos u)`.
///
/// The oscillator flow for time `t` induces this with `u = 2t`.
pub fn induced_flow_on_orbit_space(
    g: &GeneratorVector<f64>,
    u: f64,
    tol: f64,
) -> Result<GeneratorVector<f64>> {
    let res = relation_residuals(g);
    let scale = 1.0 + g.h2.abs() * g.h2.abs();
    if !res.on_orbit_space(&(tol * scale)) {
        return Err(Error::OffOrbitSpace(res.max_abs()));
    }
    let (s, c) = u.sin_cos();
    let mut out = g.clone();
    for i in 0..4 {
        out.u[i] = c * g.u[i] + s * g.v[i];
        out.v[i] = -s * g.u[i] + c * g.v[i];
    }
    Ok(out)
}

/// Whether the oscillator orbit through `z` (on `H2 = 1, Xi = 0`) meets
/// `q = 0`, decided by `|L(z)| <= tol`.
pub fn collision_set_membership(z: &PhasePoint8<f64>, tol: f64) -> Result<bool> {
    check_level_set(z, &tol)?;
    let l = eval_generators(z).l;
    Ok(dot(&l, &l) <= tol * tol)
}

/// Smallest `tau > 0` with `q cos tau + p sin tau = 0`, if any.
///
/// `min_tau |q cos tau + p sin tau|^2` is the small eigenvalue of the Gram
/// matrix of `(q, p)`; a zero exists iff it vanishes (to `tol^2`), and then
/// `(cos tau, sin tau)` is its eigenvector.
pub fn first_collision_time(z: &PhasePoint8<f64>, tol: f64) -> Result<Option<f64>> {
    check_level_set(z, &tol)?;
    let (a, b, c) = (dot(&z.q, &z.q), dot(&z.q, &z.p), dot(&z.p, &z.p));
    // det = |q ^ p|^2 from the 2x2 minors, free of the cancellation in a c - b^2
    let mut det = 0.0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            det += (z.q[i] * z.p[j] - z.q[j] * z.p[i]).powi(2);
        }
    }
    let lam_max = 0.5 * ((a + c) + ((a - c) * (a - c) + 4.0 * b * b).sqrt());
    let lam = det / lam_max;
    if lam > tol * tol {
        return Ok(None);
    }
    let v1 = (b, lam - a);
    let v2 = (lam - c, b);
    let (vc, vs) = if v1.0.hypot(v1.1) >= v2.0.hypot(v2.1) { v1 } else { v2 };
    let mut tau = vs.atan2(vc).rem_euclid(PI);
    if tau <= f64::EPSILON * PI {
        tau = PI;
    }
    Ok(Some(tau))
}

/// Physical Kepler time elapsed while the oscillator runs for `t`:
/// `int_0^t 2 <q(tau), q(tau)> dtau`, in closed form.
pub fn kepler_time_along_oscillator(z: &PhasePoint8<f64>, t: f64) -> f64 {
    let (a, b, c) = (dot(&z.q, &z.q), dot(&z.q, &z.p), dot(&z.p, &z.p));
    let s2 = (2.0 * t).sin();
    a * (t + 0.5 * s2) + b * (1.0 - (2.0 * t).cos()) + c * (t - 0.5 * s2)
}

/// The seed on `H2 = 1, Xi = 0` at apoapsis of the energy `-1/2` orbit
/// with `|J| = ell`, `0 < ell <= 1`; `ell = 1` is the circular seed.
pub fn near_collision_seed(ell: f64) -> Result<PhasePoint8<f64>> {
    if !(ell > 0.0 && ell <= 1.0) {
        return Err(Error::Precondition(format!("|L| = {ell} must lie in (0, 1]")));
    }
    let e = (1.0 - ell * ell).sqrt();
    let a = (1.0 + e).sqrt();
    Ok(PhasePoint8::new([a, 0.0, 0.0, 0.0], [0.0, 0.0, ell / a, 0.0]))
}

/// Periapsis radius `ell^2 / (1 + sqrt(1 - ell^2))` of that orbit.
pub fn periapsis_radius(ell: f64) -> f64 {
    ell * ell / (1.0 + (1.0 - ell * ell).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HarnessOptions {
    /// Number of sample intervals on `[0, t_max]`.
    pub samples: usize,
    pub integrator: Options,
    /// Level-set and collision-set tolerance for the seed.
    pub tolerance: f64,
}

impl Default for HarnessOptions {
    fn default() -> Self {
        Self {
            samples: 256,
            integrator: Options::default(),
            tolerance: 1e-9,
        }
    }
}

/// Output of one harness run.
#[derive(Clone, Debug)]
pub struct HarnessRun {
    pub max_deviation: f64,
    /// Set when the integrated Kepler curve reached `|x| < COLLISION_RADIUS`.
    pub collision_time: Option<f64>,
    pub stats: IntegratorStats,
    pub oscillator: OscillatorTrajectory,
    pub ks_image: KeplerTrajectory,
    pub kepler: KeplerTrajectory,
    /// Largest `|K-bar - K-bar(0)|` along the integrated curve.
    pub hamiltonian_drift: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HarnessReport {
    pub seed: u64,
    pub t_max: f64,
    pub max_deviation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub collision_time: Option<f64>,
    pub integrator_stats: IntegratorStats,
}

impl HarnessReport {
    pub fn new(seed: u64, t_max: f64, run: &HarnessRun) -> Self {
        Self {
            seed,
            t_max,
            max_deviation: run.max_deviation,
            collision_time: run.collision_time,
            integrator_stats: run.stats,
        }
    }
}

fn sample_times(t_max: f64, samples: usize) -> Vec<f64> {
    if t_max == 0.0 {
        return vec![0.0];
    }
    (0..=samples).map(|i| t_max * i as f64 / samples as f64).collect()
}

/// Compares `ks(oscillator_flow(z0, t))` with the integral curve of
/// `2 X_K-bar` from `ks(z0)` on `[0, t_max]`.
pub fn ks_relatedness_harness(
    z0: &PhasePoint8<f64>,
    t_max: f64,
    opts: &HarnessOptions,
) -> Result<HarnessRun> {
    if !(t_max >= 0.0 && t_max.is_finite()) || opts.samples == 0 {
        return Err(Error::Config(format!(
            "need t_max >= 0 and samples > 0 (got {t_max}, {})",
            opts.samples
        )));
    }
    if collision_set_membership(z0, opts.tolerance)? {
        return Err(Error::Precondition(
            "seed lies in the collision set; its Kepler curve leaves the domain".into(),
        ));
    }
    let times = sample_times(t_max, opts.samples);
    let osc: Vec<PhasePoint8<f64>> = times.iter().map(|&t| oscillator_flow(z0, t)).collect();
    let image: Vec<PhasePoint6<f64>> = osc.iter().map(ks).collect::<Result<_>>()?;

    let w0 = image[0].to_array();
    let collision = [Event::new(
        |_t, y: &[f64; 6]| y[0] * y[0] + y[1] * y[1] + y[2] * y[2] - COLLISION_RADIUS.powi(2),
        Direction::Falling,
        true,
    )];
    let sol = solve(
        |_t, y: &[f64; 6]| match preregularized_vector_field(&PhasePoint6::from_array(*y)) {
            Ok(f) => f.map(|v| 2.0 * v),
            Err(_) => [f64::NAN; 6],
        },
        0.0,
        w0,
        &times,
        &opts.integrator,
        &collision,
    )?;
    let collision_time = match sol.termination {
        Termination::Completed => None,
        Termination::Event(_) => Some(sol.t_final),
        Termination::StepBudget => {
            return Err(Error::Integration("step budget exhausted".into()));
        }
    };
    let reached = sol.y.len();
    let kepler: Vec<PhasePoint6<f64>> = sol.y.iter().map(|y| PhasePoint6::from_array(*y)).collect();
    let max_deviation = image
        .iter()
        .zip(&kepler)
        .map(|(a, b)| {
            let (a, b) = (a.to_array(), b.to_array());
            (0..6).map(|i| (a[i] - b[i]).powi(2)).sum::<f64>().sqrt()
        })
        .fold(0.0, f64::max);
    let k0 = preregularized_hamiltonian(&image[0]);
    let hamiltonian_drift = kepler
        .iter()
        .map(|w| (preregularized_hamiltonian(w) - k0).abs())
        .fold(0.0, f64::max);
    Ok(HarnessRun {
        max_deviation,
        collision_time,
        stats: sol.stats,
        oscillator: OscillatorTrajectory::new(times.clone(), osc)?,
        ks_image: KeplerTrajectory::new(times.clone(), image)?,
        kepler: KeplerTrajectory::new(times[..reached].to_vec(), kepler)?,
        hamiltonian_drift,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchMethod {
    RawKepler,
    KsRegularized,
}

impl BenchMethod {
    pub fn name(self) -> &'static str {
        match self {
            BenchMethod::RawKepler => "raw_kepler",
            BenchMethod::KsRegularized => "ks_regularized",
        }
    }
}

/// One row of the near-collision benchmark.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub ell: f64,
    pub method: BenchMethod,
    /// Attempted steps (accepted plus rejected).
    pub steps: usize,
    pub max_energy_drift: f64,
    /// Relative error of the first periapsis radius; NaN if none was reached.
    pub periapsis_error: f64,
    pub failed: bool,
}

pub const DEFAULT_BENCH_GRID: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

/// Samples per orbit used for the drift columns.
const BENCH_SAMPLES: usize = 64;

/// One Kepler period (physical time `2 pi`, oscillator time `pi`) from the
/// apoapsis seed with `|J| = ell`, integrated two ways.
///
/// `ks_regularized` steps `X_H2` on `R^8` and reads energy through the
/// pullback `H2 - Xi^2 / (2 (H2 + V1))`; `raw_kepler` steps the Cartesian
/// field with the attempted-step budget the regularized run used.
pub fn bench_pair(ell: f64, opts: &Options) -> Result<[BenchRow; 2]> {
    let ks_row = ks_regularized_row(ell, opts)?;
    let raw_opts = Options {
        max_steps: ks_row.steps,
        ..*opts
    };
    Ok([raw_kepler_row(ell, &raw_opts)?, ks_row])
}

/// The regularized half of [`bench_pair`] on its own.
pub fn ks_regularized_row(ell: f64, opts: &Options) -> Result<BenchRow> {
    let z0 = near_collision_seed(ell)?;
    let rp = periapsis_radius(ell);
    let grid = sample_times(PI, BENCH_SAMPLES);
    let peri = [Event::new(
        |_t, y: &[f64; 8]| y[0] * y[4] + y[1] * y[5] + y[2] * y[6] + y[3] * y[7],
        Direction::Rising,
        false,
    )];
    let sol = solve(
        |_t, y: &[f64; 8]| [y[4], y[5], y[6], y[7], -y[0], -y[1], -y[2], -y[3]],
        0.0,
        z0.to_array(),
        &grid,
        opts,
        &peri,
    );
    let failed_row = |steps| BenchRow {
        ell,
        method: BenchMethod::KsRegularized,
        steps,
        max_energy_drift: f64::NAN,
        periapsis_error: f64::NAN,
        failed: true,
    };
    let sol = match sol {
        Ok(s) if s.termination == Termination::Completed => s,
        Ok(s) => return Ok(failed_row(s.stats.attempts())),
        Err(_) => return Ok(failed_row(opts.max_steps)),
    };
    let energy = |y: &[f64; 8]| {
        let g = eval_generators(&PhasePoint8::from_array(*y));
        g.h2 - 0.5 * g.xi * g.xi / (g.h2 + g.v[0])
    };
    let max_energy_drift = sol.y.iter().map(|y| (energy(y) - 1.0).abs()).fold(0.0, f64::max);
    let periapsis_error = sol
        .events
        .first()
        .map(|h| {
            let r = h.y[..4].iter().map(|v| v * v).sum::<f64>();
            (r - rp).abs() / rp
        })
        .unwrap_or(f64::NAN);
    Ok(BenchRow {
        ell,
        method: BenchMethod::KsRegularized,
        steps: sol.stats.attempts(),
        max_energy_drift,
        periapsis_error,
        failed: !periapsis_error.is_finite(),
    })
}

/// The Cartesian half of [`bench_pair`] with an explicit step budget.
pub fn raw_kepler_row(ell: f64, opts: &Options) -> Result<BenchRow> {
    let rp = periapsis_radius(ell);
    let w0 = ks(&near_collision_seed(ell)?)?;
    let grid = sample_times(2.0 * PI, BENCH_SAMPLES);
    let events = [
        Event::new(
            |_t, y: &[f64; 6]| y[0] * y[0] + y[1] * y[1] + y[2] * y[2] - COLLISION_RADIUS.powi(2),
            Direction::Falling,
            true,
        ),
        Event::new(
            |_t, y: &[f64; 6]| y[0] * y[3] + y[1] * y[4] + y[2] * y[5],
            Direction::Rising,
            false,
        ),
    ];
    let sol = solve(
        |_t, y: &[f64; 6]| {
            kepler_vector_field(&PhasePoint6::from_array(*y)).unwrap_or([f64::NAN; 6])
        },
        0.0,
        w0.to_array(),
        &grid,
        opts,
        &events,
    );
    let (sol, integration_failed) = match sol {
        Ok(s) => {
            let bad = s.termination != Termination::Completed;
            (Some(s), bad)
        }
        Err(_) => (None, true),
    };
    let Some(sol) = sol else {
        return Ok(BenchRow {
            ell,
            method: BenchMethod::RawKepler,
            steps: opts.max_steps,
            max_energy_drift: f64::NAN,
            periapsis_error: f64::NAN,
            failed: true,
        });
    };
    let max_energy_drift = sol
        .y
        .iter()
        .chain(std::iter::once(&sol.y_final))
        .filter_map(|y| kepler_energy(&PhasePoint6::from_array(*y)).ok())
        .map(|e| (e + 0.5).abs())
        .fold(0.0, f64::max);
    let periapsis_error = sol
        .events
        .iter()
        .find(|h| h.event == 1)
        .map(|h| {
            let r = h.y[..3].iter().map(|v| v * v).sum::<f64>().sqrt();
            (r - rp).abs() / rp
        })
        .unwrap_or(f64::NAN);
    Ok(BenchRow {
        ell,
        method: BenchMethod::RawKepler,
        steps: sol.stats.attempts(),
        max_energy_drift,
        periapsis_error,
        failed: integration_failed || !periapsis_error.is_finite(),
    })
}

pub fn run_bench(grid: &[f64], opts: &Options) -> Result<Vec<BenchRow>> {
    if grid.is_empty() {
        return Err(Error::Config("empty benchmark grid".into()));
    }
    let mut rows = Vec::with_capacity(2 * grid.len());
    for &ell in grid {
        rows.extend(bench_pair(ell, opts)?);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::{h2, xi};
    use crate::kepler_dynamics::radial_collision_time;
    use crate::ks_map::ks_fiber_action;
    use crate::orbit_space::sample_level_set;
    use crate::sampling::{collinear_level_point, rational_point, rng};
    use crate::scalar::{rational, Rational};

    fn pt(q: [f64; 4], p: [f64; 4]) -> PhasePoint8<f64> {
        PhasePoint8::new(q, p)
    }

    fn close(a: &PhasePoint8<f64>, b: &PhasePoint8<f64>, tol: f64) -> bool {
        a.to_array().iter().zip(b.to_array()).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn oscillator_flow_examples() {
        let z = pt([1.0, 2.0, 3.0, 4.0], [-1.0, 0.5, 0.0, 2.0]);
        assert_eq!(oscillator_flow(&z, 0.0), z);
        let quarter = oscillator_flow(&z, PI / 2.0);
        assert!(close(&quarter, &pt(z.p, z.q.map(|v| -v)), 1e-15));
        assert!(close(&oscillator_flow(&z, 2.0 * PI), &z, 1e-14));
    }

    #[test]
    fn exact_conservation_on_rational_rotation() {
        let (c, s) = (rational(3, 5), rational(4, 5));
        let mut rng = rng(1);
        for _ in 0..50 {
            let z: PhasePoint8<Rational> = rational_point(&mut rng);
            let w = oscillator_rotate(&z, &c, &s);
            assert_eq!(h2(&w), h2(&z));
            assert_eq!(xi(&w), xi(&z));
        }
    }

    #[test]
    fn float_drift_over_a_period() {
        let mut rng = rng(2);
        let z = sample_level_set(&mut rng, 1.0);
        for k in 0..=64 {
            let w = oscillator_flow(&z, 2.0 * PI * k as f64 / 64.0);
            assert!((h2(&w) - h2(&z)).abs() < 1e-13);
            assert!((xi(&w) - xi(&z)).abs() < 1e-13);
        }
    }

    #[test]
    fn induced_flow_examples_and_conjugacy() {
        let mut rng = rng(3);
        let z = sample_level_set(&mut rng, 1.0);
        let g = eval_generators(&z);
        assert_eq!(induced_flow_on_orbit_space(&g, 0.0, 1e-9).unwrap(), g);
        let half = induced_flow_on_orbit_space(&g, PI, 1e-9).unwrap();
        for i in 0..4 {
            assert!((half.u[i] + g.u[i]).abs() < 1e-14);
            assert!((half.v[i] + g.v[i]).abs() < 1e-14);
        }
        assert_eq!(half.k, g.k);
        for _ in 0..100 {
            let z = crate::sampling::gaussian_point(&mut rng);
            let t: f64 = rand::Rng::random_range(&mut rng, 0.0..2.0 * PI);
            let lhs = eval_generators(&oscillator_flow(&z, t)).to_array();
            let rhs = induced_flow_on_orbit_space(&eval_generators(&z), 2.0 * t, 1e-9)
                .unwrap()
                .to_array();
            for i in 0..16 {
                assert!((lhs[i] - rhs[i]).abs() < 1e-12 * (1.0 + lhs[i].abs()), "{i}");
            }
        }
        let mut off = GeneratorVector::zero();
        off.u = [1.0, 0.0, 0.0, 0.0];
        off.v = [1.0, 0.0, 0.0, 0.0];
        off.h2 = 1.0;
        assert!(matches!(
            induced_flow_on_orbit_space(&off, 0.3, 1e-9),
            Err(Error::OffOrbitSpace(_))
        ));
    }

    #[test]
    fn membership_examples() {
        let tol = 1e-9;
        assert!(collision_set_membership(&pt([1., 0., 0., 0.], [1., 0., 0., 0.]), tol).unwrap());
        assert!(!collision_set_membership(&pt([1., 0., 0., 0.], [0., 0., 1., 0.]), tol).unwrap());
        let r2 = 2f64.sqrt();
        assert!(collision_set_membership(&pt([r2, 0., 0., 0.], [0.; 4]), tol).unwrap());
        assert!(collision_set_membership(&pt([1., 0., 0., 0.], [0., 1., 0., 0.]), tol).is_err());
    }

    #[test]
    fn collision_time_examples() {
        let tol = 1e-9;
        let r2 = 2f64.sqrt();
        let z = pt([r2, 0., 0., 0.], [0.; 4]);
        let tau = first_collision_time(&z, tol).unwrap().unwrap();
        assert!((tau - PI / 2.0).abs() < 1e-15);
        assert_eq!(first_collision_time(&pt([1., 0., 0., 0.], [0., 0., 1., 0.]), tol).unwrap(), None);
        for a in [0.1, 0.7, 1.2] {
            let tau_a = first_collision_time(&oscillator_flow(&z, a), tol).unwrap().unwrap();
            assert!(((tau - a).rem_euclid(PI) - tau_a).abs() < 1e-12, "{a}");
        }
        // the ks image falls radially from r0 = 2: physical time tau_0(2) = pi
        let t = kepler_time_along_oscillator(&z, tau);
        assert!((t - radial_collision_time(2.0).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn collision_theorem_both_directions() {
        let mut rng = rng(4);
        let tol = 1e-9;
        for _ in 0..200 {
            let z = collinear_level_point(&mut rng);
            assert!(collision_set_membership(&z, tol).unwrap());
            let tau = first_collision_time(&z, tol).unwrap().unwrap();
            assert!(oscillator_flow(&z, tau).q_norm_sq().sqrt() < 1e-9);
            let z = sample_level_set(&mut rng, 1.0);
            assert!(!collision_set_membership(&z, tol).unwrap());
            assert_eq!(first_collision_time(&z, tol).unwrap(), None);
        }
    }

    #[test]
    fn harness_circular_seed() {
        let z = near_collision_seed(1.0).unwrap();
        assert_eq!(z, pt([1., 0., 0., 0.], [0., 0., 1., 0.]));
        let run = ks_relatedness_harness(&z, 2.0 * PI, &HarnessOptions::default()).unwrap();
        assert!(run.max_deviation <= 1e-6, "{}", run.max_deviation);
        assert!(run.collision_time.is_none());
        let zero = ks_relatedness_harness(&z, 0.0, &HarnessOptions::default()).unwrap();
        assert_eq!(zero.max_deviation, 0.0);
        let r2 = 2f64.sqrt();
        assert!(ks_relatedness_harness(&pt([r2, 0., 0., 0.], [0.; 4]), 1.0, &HarnessOptions::default()).is_err());
    }

    #[test]
    fn harness_is_fiber_invariant() {
        let z = near_collision_seed(0.5).unwrap();
        let o = HarnessOptions::default();
        let a = ks_relatedness_harness(&z, 1.0, &o).unwrap();
        let b = ks_relatedness_harness(&ks_fiber_action(&z, 0.9), 1.0, &o).unwrap();
        assert!((a.max_deviation - b.max_deviation).abs() < 1e-9);
    }

    #[test]
    fn seeds_sit_on_the_level_set() {
        for ell in DEFAULT_BENCH_GRID.iter().chain(&[1.0, 0.5]) {
            let z = near_collision_seed(*ell).unwrap();
            assert!((h2(&z) - 1.0).abs() < 1e-15 && xi(&z) == 0.0);
            let l = eval_generators(&z).l;
            assert!((dot(&l, &l).sqrt() - ell).abs() < 1e-15);
        }
        assert!(near_collision_seed(0.0).is_err());
    }

    #[test]
    fn benchmark_direction() {
        let rows = run_bench(&DEFAULT_BENCH_GRID, &Options::default()).unwrap();
        for r in &rows {
            if r.method == BenchMethod::KsRegularized {
                assert!(!r.failed && r.max_energy_drift <= 1e-8, "{r:?}");
            } else if r.ell <= 1e-3 {
                assert!(r.failed || r.periapsis_error > 1e-2, "{r:?}");
            }
        }
        assert!(run_bench(&[], &Options::default()).is_err());
    }

    #[test]
    fn raw_succeeds_in_the_benign_regime_without_a_budget() {
        let r = raw_kepler_row(1e-1, &Options::default()).unwrap();
        assert!(!r.failed && r.periapsis_error < 1e-6, "{r:?}");
        assert!(r.steps > ks_regularized_row(1e-1, &Options::default()).unwrap().steps);
    }
}
