//! Sampled trajectories and their CSV / JSON forms.
//!
//! CSV floats use `.` as decimal separator and 17 significant digits, so a
//! write/read round trip is bit-exact.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariants::{h2, xi, PhasePoint8};
use crate::kepler_dynamics::{angular_momentum, eccentricity, kepler_energy};
use crate::ks_map::PhasePoint6;

pub const KEPLER_COLUMNS: [&str; 14] = [
    "t", "x1", "x2", "x3", "y1", "y2", "y3", "energy", "J1", "J2", "J3", "e1", "e2", "e3",
];

pub const OSCILLATOR_COLUMNS: [&str; 11] =
    ["t", "q1", "q2", "q3", "q4", "p1", "p2", "p3", "p4", "H2", "Xi"];

/// Formats with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::Trajectory("non-finite time".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Trajectory("times must be strictly increasing".into()));
    }
    Ok(())
}

/// A path in `T_0 R^3` with energy, angular momentum and eccentricity
/// logged at every sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeplerTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<PhasePoint6<f64>>,
}

/// One logged row of conserved quantities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KeplerInvariants {
    pub energy: f64,
    pub j: [f64; 3],
    pub e: [f64; 3],
}

impl KeplerInvariants {
    pub fn of(w: &PhasePoint6<f64>) -> Result<Self> {
        Ok(Self {
            energy: kepler_energy(w)?,
            j: angular_momentum(w)?,
            e: eccentricity(w)?,
        })
    }
}

impl KeplerTrajectory {
    pub fn new(times: Vec<f64>, states: Vec<PhasePoint6<f64>>) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::Trajectory("times and states differ in length".into()));
        }
        check_times(&times)?;
        if states.iter().any(|w| !w.to_array().iter().all(|v| v.is_finite())) {
            return Err(Error::Trajectory("non-finite state".into()));
        }
        Ok(Self { times, states })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn conserved_log(&self) -> Result<Vec<KeplerInvariants>> {
        self.states.iter().map(KeplerInvariants::of).collect()
    }

    /// Largest deviation of each logged quantity from its first value:
    /// `(energy, |J|, |e|)`.
    pub fn drifts(&self) -> Result<(f64, f64, f64)> {
        let log = self.conserved_log()?;
        let Some(first) = log.first() else {
            return Ok((0.0, 0.0, 0.0));
        };
        let n = |v: &[f64; 3]| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        Ok(log.iter().fold((0.0f64, 0.0f64, 0.0f64), |(a, b, c), r| {
            (
                a.max((r.energy - first.energy).abs()),
                b.max((n(&r.j) - n(&first.j)).abs()),
                c.max((n(&r.e) - n(&first.e)).abs()),
            )
        }))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(KEPLER_COLUMNS)?;
        for (t, s) in self.times.iter().zip(&self.states) {
            let inv = KeplerInvariants::of(s)?;
            let mut row = vec![fmt_f64(*t)];
            row.extend(s.to_array().iter().map(|v| fmt_f64(*v)));
            row.push(fmt_f64(inv.energy));
            row.extend(inv.j.iter().chain(&inv.e).map(|v| fmt_f64(*v)));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the CSV form; the logged columns must match the states to `tol`
    /// (relative to `1 + |value|`).
    pub fn read_csv<R: Read>(input: R, tol: f64) -> Result<Self> {
        let rows = read_rows(input, &KEPLER_COLUMNS)?;
        let mut times = Vec::with_capacity(rows.len());
        let mut states = Vec::with_capacity(rows.len());
        for (line, row) in rows.iter().enumerate() {
            let s = PhasePoint6::from_array(std::array::from_fn(|i| row[1 + i]));
            let inv = KeplerInvariants::of(&s)
                .map_err(|e| Error::Trajectory(format!("row {}: {e}", line + 1)))?;
            let logged = [inv.energy, inv.j[0], inv.j[1], inv.j[2], inv.e[0], inv.e[1], inv.e[2]];
            for (k, (a, b)) in logged.iter().zip(&row[7..]).enumerate() {
                if (a - b).abs() > tol * (1.0 + a.abs()) {
                    return Err(Error::Trajectory(format!(
                        "row {}: column {} is {b}, state gives {a}",
                        line + 1,
                        KEPLER_COLUMNS[7 + k]
                    )));
                }
            }
            times.push(row[0]);
            states.push(s);
        }
        Self::new(times, states)
    }
}

/// A path in `R^8` with `H2` and `Xi` logged.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillatorTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<PhasePoint8<f64>>,
}

impl OscillatorTrajectory {
    pub fn new(times: Vec<f64>, states: Vec<PhasePoint8<f64>>) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::Trajectory("times and states differ in length".into()));
        }
        check_times(&times)?;
        if states.iter().any(|z| !z.is_finite()) {
            return Err(Error::Trajectory("non-finite state".into()));
        }
        Ok(Self { times, states })
    }

    /// Largest `(|dH2|, |dXi|)` relative to the first sample.
    pub fn drifts(&self) -> (f64, f64) {
        let Some(z0) = self.states.first() else {
            return (0.0, 0.0);
        };
        let (h0, x0) = (h2(z0), xi(z0));
        self.states.iter().fold((0.0f64, 0.0f64), |(a, b), z| {
            (a.max((h2(z) - h0).abs()), b.max((xi(z) - x0).abs()))
        })
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(OSCILLATOR_COLUMNS)?;
        for (t, z) in self.times.iter().zip(&self.states) {
            let mut row = vec![fmt_f64(*t)];
            row.extend(z.to_array().iter().map(|v| fmt_f64(*v)));
            row.push(fmt_f64(h2(z)));
            row.push(fmt_f64(xi(z)));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let rows = read_rows(input, &OSCILLATOR_COLUMNS)?;
        let times = rows.iter().map(|r| r[0]).collect();
        let states = rows
            .iter()
            .map(|r| PhasePoint8::from_array(std::array::from_fn(|i| r[1 + i])))
            .collect();
        Self::new(times, states)
    }
}

fn read_rows<R: Read>(input: R, columns: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = rdr.headers()?.clone();
    if header.iter().ne(columns.iter().copied()) {
        return Err(Error::Parse(format!(
            "expected header {}, found {}",
            columns.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != columns.len() {
            return Err(Error::Parse(format!("row {}: expected {} fields", line + 1, columns.len())));
        }
        let row = rec
            .iter()
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("row {}: {f:?}: {e}", line + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}
