//! Adaptive Dormand-Prince 5(4) integration with event location.
//!
//! Steps are clamped so requested output times are hit exactly (no dense
//! output). Events are located by bisection on the sub-step length,
//! re-stepping from the start of the accepted step.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Options {
    pub atol: f64,
    pub rtol: f64,
    /// Budget on attempted steps (accepted plus rejected).
    pub max_steps: usize,
    pub initial_step: Option<f64>,
    pub max_step: f64,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            atol: 1e-10,
            rtol: 1e-10,
            max_steps: 1_000_000,
            initial_step: None,
            max_step: f64::INFINITY,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct IntegratorStats {
    pub steps: usize,
    pub rejected_steps: usize,
}

impl IntegratorStats {
    pub fn attempts(&self) -> usize {
        self.steps + self.rejected_steps
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `g` crosses from negative to positive.
    Rising,
    /// `g` crosses from positive to negative.
    Falling,
    Either,
}

impl Direction {
    fn matches(self, g0: f64, g1: f64) -> bool {
        let rising = g0 < 0.0 && g1 >= 0.0;
        let falling = g0 > 0.0 && g1 <= 0.0;
        match self {
            Direction::Rising => rising,
            Direction::Falling => falling,
            Direction::Either => rising || falling,
        }
    }
}

pub struct Event<'a, const N: usize> {
    pub g: Box<dyn Fn(f64, &[f64; N]) -> f64 + 'a>,
    pub direction: Direction,
    pub terminal: bool,
}

impl<'a, const N: usize> Event<'a, N> {
    pub fn new(
        g: impl Fn(f64, &[f64; N]) -> f64 + 'a,
        direction: Direction,
        terminal: bool,
    ) -> Self {
        Self {
            g: Box::new(g),
            direction,
            terminal,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EventHit<const N: usize> {
    /// Index into the event slice passed to [`solve`].
    pub event: usize,
    pub t: f64,
    pub y: [f64; N],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    Completed,
    /// A terminal event fired; holds its index.
    Event(usize),
    StepBudget,
}

#[derive(Clone, Debug)]
pub struct Solution<const N: usize> {
    /// Output times reached, a prefix of the requested ones.
    pub t: Vec<f64>,
    pub y: Vec<[f64; N]>,
    pub events: Vec<EventHit<N>>,
    pub stats: IntegratorStats,
    pub termination: Termination,
    pub t_final: f64,
    pub y_final: [f64; N],
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Stepper<F, const N: usize> {
    f: F,
    evals: usize,
}

impl<F: FnMut(f64, &[f64; N]) -> [f64; N], const N: usize> Stepper<F, N> {
    fn eval(&mut self, t: f64, y: &[f64; N]) -> [f64; N] {
        self.evals += 1;
        (self.f)(t, y)
    }

    /// One step of size `h` from `(t, y)` with `k1 = f(t, y)`.
    /// Returns the fifth-order state, the error vector and `f` at the end.
    fn step(&mut self, t: f64, y: &[f64; N], k1: &[f64; N], h: f64) -> ([f64; N], [f64; N], [f64; N]) {
        let mut k = [[0.0; N]; 7];
        k[0] = *k1;
        for s in 1..7 {
            let mut ys = *y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..N {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            k[s] = self.eval(t + C[s] * h, &ys);
        }
        // the seventh stage is evaluated at the fifth-order solution
        let mut y1 = *y;
        for j in 0..6 {
            for i in 0..N {
                y1[i] += h * A[6][j] * k[j][i];
            }
        }
        let mut err = [0.0; N];
        for (j, kj) in k.iter().enumerate() {
            for i in 0..N {
                err[i] += h * E[j] * kj[i];
            }
        }
        (y1, err, k[6])
    }
}

fn error_norm<const N: usize>(y0: &[f64; N], y1: &[f64; N], err: &[f64; N], o: &Options) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        let sc = o.atol + o.rtol * y0[i].abs().max(y1[i].abs());
        acc += (err[i] / sc).powi(2);
    }
    let e = (acc / N as f64).sqrt();
    if e.is_finite() {
        e
    } else {
        f64::INFINITY
    }
}

fn initial_step<const N: usize>(y0: &[f64; N], f0: &[f64; N], o: &Options) -> f64 {
    let (mut d0, mut d1) = (0.0f64, 0.0f64);
    for i in 0..N {
        let sc = o.atol + o.rtol * y0[i].abs();
        d0 += (y0[i] / sc).powi(2);
        d1 += (f0[i] / sc).powi(2);
    }
    let (d0, d1) = ((d0 / N as f64).sqrt(), (d1 / N as f64).sqrt());
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.min(o.max_step)
}

/// Integrates `dy/dt = f(t, y)` from `(t0, y0)` through the increasing
/// output times `t_out` (all `>= t0`).
///
/// A non-finite right-hand side or a step length collapsing below
/// round-off is an [`Error::Integration`]; exhausting `max_steps` is a
/// normal [`Termination::StepBudget`].
pub fn solve<const N: usize>(
    f: impl FnMut(f64, &[f64; N]) -> [f64; N],
    t0: f64,
    y0: [f64; N],
    t_out: &[f64],
    opts: &Options,
    events: &[Event<'_, N>],
) -> Result<Solution<N>> {
    if t_out.windows(2).any(|w| w[1] < w[0]) || t_out.first().is_some_and(|&t| t < t0) {
        return Err(Error::Integration("output times must be increasing from t0".into()));
    }
    if !y0.iter().all(|v| v.is_finite()) {
        return Err(Error::Integration("non-finite initial state".into()));
    }
    let mut st = Stepper { f, evals: 0 };
    let mut stats = IntegratorStats::default();
    let mut sol_t = Vec::with_capacity(t_out.len());
    let mut sol_y = Vec::with_capacity(t_out.len());
    let mut hits = Vec::new();
    let (mut t, mut y) = (t0, y0);
    let mut k1 = st.eval(t, &y);
    let mut h = opts.initial_step.unwrap_or_else(|| initial_step(&y, &k1, opts));
    let mut g_prev: Vec<f64> = events.iter().map(|e| (e.g)(t, &y)).collect();

    let finish = |t_out: Vec<f64>, y_out: Vec<[f64; N]>, hits, stats, term, t, y| Solution {
        t: t_out,
        y: y_out,
        events: hits,
        stats,
        termination: term,
        t_final: t,
        y_final: y,
    };

    let mut next = 0;
    while next < t_out.len() && t_out[next] <= t {
        sol_t.push(t_out[next]);
        sol_y.push(y);
        next += 1;
    }

    while next < t_out.len() {
        if stats.attempts() >= opts.max_steps {
            return Ok(finish(sol_t, sol_y, hits, stats, Termination::StepBudget, t, y));
        }
        let target = t_out[next];
        let clamped = t + h >= target;
        let h_try = if clamped { target - t } else { h };
        let (y1, err, k_end) = st.step(t, &y, &k1, h_try);
        let en = if y1.iter().all(|v| v.is_finite()) {
            error_norm(&y, &y1, &err, opts)
        } else {
            f64::INFINITY
        };
        if en > 1.0 {
            stats.rejected_steps += 1;
            let fac = if en.is_finite() { (0.9 * en.powf(-0.2)).max(0.2) } else { 0.1 };
            h = h_try * fac;
            if h.abs() <= 1e-14 * t.abs().max(1.0) {
                return Err(Error::Integration(format!("step size underflow at t = {t}")));
            }
            continue;
        }
        stats.steps += 1;
        let t1 = if clamped { target } else { t + h_try };

        // events on [t, t1]
        let mut first: Option<(f64, usize, [f64; N])> = None;
        for (i, ev) in events.iter().enumerate() {
            let g1 = (ev.g)(t1, &y1);
            if ev.direction.matches(g_prev[i], g1) {
                let (te, ye) = locate(&mut st, ev, t, &y, &k1, h_try, g_prev[i], t1, y1);
                if first.as_ref().is_none_or(|(tf, _, _)| te < *tf) {
                    first = Some((te, i, ye));
                }
                if !ev.terminal {
                    hits.push(EventHit { event: i, t: te, y: ye });
                }
            }
            g_prev[i] = g1;
        }
        if let Some((te, i, ye)) = first {
            if events[i].terminal {
                // keep only non-terminal hits that precede the terminal one
                hits.retain(|h: &EventHit<N>| h.t <= te);
                hits.push(EventHit { event: i, t: te, y: ye });
                hits.sort_by(|a, b| a.t.total_cmp(&b.t));
                return Ok(finish(sol_t, sol_y, hits, stats, Termination::Event(i), te, ye));
            }
        }
        hits.sort_by(|a, b| a.t.total_cmp(&b.t));

        t = t1;
        y = y1;
        k1 = k_end;
        if clamped {
            sol_t.push(target);
            sol_y.push(y);
            next += 1;
        }
        // a clamped step was shortened on purpose; keep the proposed length
        if !clamped || h_try >= h {
            let fac = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
            h = (h_try * fac).min(opts.max_step);
        }
    }
    Ok(finish(sol_t, sol_y, hits, stats, Termination::Completed, t, y))
}

/// Bisection on the sub-step length `theta * h` for the zero of `g`.
#[allow(clippy::too_many_arguments)]
fn locate<F: FnMut(f64, &[f64; N]) -> [f64; N], const N: usize>(
    st: &mut Stepper<F, N>,
    ev: &Event<'_, N>,
    t: f64,
    y: &[f64; N],
    k1: &[f64; N],
    h: f64,
    g0: f64,
    t1: f64,
    y1: [f64; N],
) -> (f64, [f64; N]) {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let (mut g_lo, mut best) = (g0, (t1, y1));
    for _ in 0..200 {
        if (hi - lo) * h.abs() <= 4.0 * f64::EPSILON * t.abs().max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let (ym, _, _) = st.step(t, y, k1, mid * h);
        let tm = t + mid * h;
        let gm = (ev.g)(tm, &ym);
        if ev.direction.matches(g_lo, gm) || gm == 0.0 {
            hi = mid;
            best = (tm, ym);
        } else {
            lo = mid;
            g_lo = gm;
        }
    }
    best
}
