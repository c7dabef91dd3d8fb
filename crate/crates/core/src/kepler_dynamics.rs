//! Kepler-side Hamiltonians, vector fields, conserved quantities, the
//! Sundman time change and the radial collision time.
//!
//! Internally `k = 1`; other energy levels go through [`KeplerParams`].

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrate::{solve, Direction, Event, IntegratorStats, Options, Termination};
use crate::ks_map::PhasePoint6;
use crate::scalar::{cross, dot, norm3};

/// Collision threshold on `|x|` (and on `r` for the radial fall).
pub const COLLISION_RADIUS: f64 = 1e-6;

/// Energy level `-k^2 / 2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KeplerParams {
    k: f64,
}

impl KeplerParams {
    pub fn new(k: f64) -> Result<Self> {
        if k > 0.0 && k.is_finite() {
            Ok(Self { k })
        } else {
            Err(Error::Precondition(format!("k = {k} must be positive")))
        }
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn energy(&self) -> f64 {
        -0.5 * self.k * self.k
    }

    /// `|x| (|y|^2 + k^2) / (2k)`.
    pub fn scaled_hamiltonian(&self, w: &PhasePoint6<f64>) -> f64 {
        norm3(&w.x) * (dot(&w.y, &w.y) + self.k * self.k) / (2.0 * self.k)
    }

    /// New coordinates `(k x, y / k)`, in which the scaled Hamiltonian
    /// becomes `|x| (|y|^2 + 1) / 2`.
    pub fn to_unit(&self, w: &PhasePoint6<f64>) -> PhasePoint6<f64> {
        PhasePoint6::new(w.x.map(|c| c * self.k), w.y.map(|c| c / self.k))
    }

    pub fn from_unit(&self, w: &PhasePoint6<f64>) -> PhasePoint6<f64> {
        PhasePoint6::new(w.x.map(|c| c / self.k), w.y.map(|c| c * self.k))
    }
}

/// `(r, dr/dt)` of a radial Kepler orbit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RadialState {
    pub r: f64,
    pub rdot: f64,
}

impl RadialState {
    /// `rdot^2 - 2/r + 1`, zero on the energy level.
    pub fn energy_residual(&self) -> f64 {
        self.rdot * self.rdot - 2.0 / self.r + 1.0
    }
}

fn radius(w: &PhasePoint6<f64>) -> Result<f64> {
    let r = norm3(&w.x);
    if r == 0.0 {
        Err(Error::KeplerCollision)
    } else {
        Ok(r)
    }
}

/// `|y|^2 / 2 - 1 / |x|`.
pub fn kepler_energy(w: &PhasePoint6<f64>) -> Result<f64> {
    Ok(0.5 * dot(&w.y, &w.y) - 1.0 / radius(w)?)
}

/// `|x| (|y|^2 + 1) / 2`; smooth in value through `x = 0`.
pub fn preregularized_hamiltonian(w: &PhasePoint6<f64>) -> f64 {
    0.5 * norm3(&w.x) * (dot(&w.y, &w.y) + 1.0)
}

/// `(dx/dt, dy/dt) = (y, -x / |x|^3)`.
pub fn kepler_vector_field(w: &PhasePoint6<f64>) -> Result<[f64; 6]> {
    let r = radius(w)?;
    let c = -1.0 / (r * r * r);
    Ok([w.y[0], w.y[1], w.y[2], c * w.x[0], c * w.x[1], c * w.x[2]])
}

/// The symplectic gradient of `|x| (|y|^2 + 1) / 2`:
/// `dx/ds = |x| y`, `dy/ds = -(|y|^2 + 1) x / (2 |x|)`.
pub fn preregularized_vector_field(w: &PhasePoint6<f64>) -> Result<[f64; 6]> {
    let r = radius(w)?;
    let c = -0.5 * (dot(&w.y, &w.y) + 1.0) / r;
    Ok([
        r * w.y[0],
        r * w.y[1],
        r * w.y[2],
        c * w.x[0],
        c * w.x[1],
        c * w.x[2],
    ])
}

/// The same field written as the time-rescaled Kepler field plus the
/// correction proportional to `K + k^2/2`.
pub fn rescaled_kepler_field(w: &PhasePoint6<f64>, params: KeplerParams) -> Result<[f64; 6]> {
    let k = params.k();
    let r = radius(w)?;
    let kep = kepler_vector_field(w)?;
    let shift = kepler_energy(w)? + 0.5 * k * k;
    let mut out = [0.0; 6];
    for i in 0..3 {
        out[i] = r / k * kep[i];
        // d(|x|/k)/dx = x / (k |x|)
        out[3 + i] = r / k * kep[3 + i] - shift * w.x[i] / (k * r);
    }
    Ok(out)
}

/// `J = x × y`.
pub fn angular_momentum(w: &PhasePoint6<f64>) -> Result<[f64; 3]> {
    radius(w)?;
    Ok(cross(&w.x, &w.y))
}

/// `e = -x/|x| + y × (x × y)`.
pub fn eccentricity(w: &PhasePoint6<f64>) -> Result<[f64; 3]> {
    let r = radius(w)?;
    let yj = cross(&w.y, &cross(&w.x, &w.y));
    Ok(std::array::from_fn(|i| -w.x[i] / r + yj[i]))
}

/// Integrates the preregularized field in `s` through the output grid.
pub fn integrate_preregularized(
    w0: &PhasePoint6<f64>,
    s_out: &[f64],
    opts: &Options,
) -> Result<(Vec<PhasePoint6<f64>>, IntegratorStats)> {
    let collision = [Event::new(
        |_s, y: &[f64; 6]| y[0] * y[0] + y[1] * y[1] + y[2] * y[2] - COLLISION_RADIUS.powi(2),
        Direction::Falling,
        true,
    )];
    let sol = solve(
        |_s, y: &[f64; 6]| {
            preregularized_vector_field(&PhasePoint6::from_array(*y)).unwrap_or([f64::NAN; 6])
        },
        s_out.first().copied().unwrap_or(0.0),
        w0.to_array(),
        s_out,
        opts,
        &collision,
    )?;
    match sol.termination {
        Termination::Completed => Ok((
            sol.y.into_iter().map(PhasePoint6::from_array).collect(),
            sol.stats,
        )),
        Termination::Event(_) => Err(Error::KeplerCollision),
        Termination::StepBudget => Err(Error::Integration("step budget exhausted".into())),
    }
}

/// Resamples a path given in regularized time `s` at physical times.
///
/// Physical time runs as `dt/ds = |x| / k` (the inverse of the Sundman
/// factor; see the crate README), accumulated by the trapezoid rule and
/// inverted by linear interpolation.
pub fn sundman_reparametrize(
    s_grid: &[f64],
    states: &[PhasePoint6<f64>],
    t_grid: &[f64],
    params: KeplerParams,
) -> Result<Vec<PhasePoint6<f64>>> {
    if s_grid.len() != states.len() || s_grid.is_empty() {
        return Err(Error::Trajectory("s grid and states differ in length".into()));
    }
    if s_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Trajectory("s grid must be strictly increasing".into()));
    }
    let speed: Vec<f64> = states
        .iter()
        .map(|w| radius(w).map(|r| r / params.k()))
        .collect::<Result<_>>()?;
    let mut t = vec![0.0; s_grid.len()];
    for i in 1..s_grid.len() {
        t[i] = t[i - 1] + 0.5 * (speed[i] + speed[i - 1]) * (s_grid[i] - s_grid[i - 1]);
    }
    let t_end = *t.last().expect("nonempty");
    t_grid
        .iter()
        .map(|&tt| {
            if !(0.0..=t_end * (1.0 + 1e-12)).contains(&tt) {
                return Err(Error::Trajectory(format!("time {tt} outside [0, {t_end}]")));
            }
            let j = t.partition_point(|&v| v < tt).clamp(1, t.len() - 1);
            let (a, b) = (t[j - 1], t[j]);
            let f = ((tt - a) / (b - a)).clamp(0.0, 1.0);
            let (wa, wb) = (states[j - 1].to_array(), states[j].to_array());
            Ok(PhasePoint6::from_array(std::array::from_fn(|i| {
                wa[i] + f * (wb[i] - wa[i])
            })))
        })
        .collect()
}

fn check_r0(r0: f64) -> Result<()> {
    if r0 > 0.0 && r0 <= 2.0 {
        Ok(())
    } else {
        Err(Error::RadialOutOfRange(r0))
    }
}

/// Time to fall from rest at `r0` to `r = 0` on the energy level `-1/2`:
/// `pi - 2 atan(s0) - 2 s0 / (1 + s0^2)` with `s0 = sqrt(2/r0 - 1)`.
pub fn radial_collision_time(r0: f64) -> Result<f64> {
    check_r0(r0)?;
    let s0 = (2.0 / r0 - 1.0).max(0.0).sqrt();
    Ok(PI - 2.0 * s0.atan() - 2.0 * s0 / (1.0 + s0 * s0))
}

/// `int_0^{r0} dr / sqrt(2/r - 1)` by adaptive Simpson after `r = r0 sin^2 u`,
/// which removes the endpoint singularity at `r = 0`.
pub fn radial_collision_time_quadrature(r0: f64, tol: f64) -> Result<f64> {
    check_r0(r0)?;
    let f = |u: f64| {
        let (s, c) = u.sin_cos();
        // 2 - r sin^2 u written so that r0 = 2 stays finite at u = pi/2
        let denom = ((2.0 - r0) + r0 * c * c).sqrt();
        if denom == 0.0 {
            return 2.0 * r0 * s * s;
        }
        2.0 * r0 * r0.sqrt() * s * s * c / denom
    };
    Ok(adaptive_simpson(&f, 0.0, PI / 2.0, tol, 50))
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let flm = f(0.5 * (a + m));
        let frm = f(0.5 * (m + b));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, depth)
}

/// `(dr/dt, d rdot/dt) = (rdot, -1/r^2)`.
pub fn radial_ode_rhs(state: RadialState) -> Result<[f64; 2]> {
    if state.r <= 0.0 {
        return Err(Error::Precondition(format!("r = {} must be positive", state.r)));
    }
    Ok([state.rdot, -1.0 / (state.r * state.r)])
}

/// Result of integrating the radial fall to the collision threshold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RadialFall {
    pub time: f64,
    pub final_state: RadialState,
    /// Largest `|rdot^2 - 2/r + 1| / max(1, 2/r)` over the sampled path.
    pub max_energy_residual: f64,
    pub stats: IntegratorStats,
}

/// Integrates the inward fall on the energy level from `r0` until
/// `r < COLLISION_RADIUS`. The start is at rest only for `r0 = 2`; below
/// that the level forces `rdot = -sqrt(2/r0 - 1)`.
pub fn radial_fall(r0: f64, opts: &Options) -> Result<RadialFall> {
    check_r0(r0)?;
    let rdot0 = -(2.0 / r0 - 1.0).max(0.0).sqrt();
    let ev = [Event::new(
        |_t, y: &[f64; 2]| y[0] - COLLISION_RADIUS,
        Direction::Falling,
        true,
    )];
    // sample the energy relation along the way
    let horizon = PI + 1.0;
    let grid: Vec<f64> = (1..=200).map(|i| horizon * i as f64 / 200.0).collect();
    let sol = solve(
        |_t, y: &[f64; 2]| {
            radial_ode_rhs(RadialState { r: y[0], rdot: y[1] }).unwrap_or([f64::NAN; 2])
        },
        0.0,
        [r0, rdot0],
        &grid,
        opts,
        &ev,
    )?;
    if sol.termination != Termination::Event(0) {
        return Err(Error::Integration("radial fall did not reach the collision radius".into()));
    }
    let max_energy_residual = sol
        .y
        .iter()
        .map(|y| {
            let st = RadialState { r: y[0], rdot: y[1] };
            st.energy_residual().abs() / (2.0 / st.r).max(1.0)
        })
        .fold(0.0, f64::max);
    Ok(RadialFall {
        time: sol.t_final,
        final_state: RadialState {
            r: sol.y_final[0],
            rdot: sol.y_final[1],
        },
        max_energy_residual,
        stats: sol.stats,
    })
}
