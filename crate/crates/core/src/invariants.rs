//! Invariant polynomials of the `Xi` circle action on `T R^4 = R^8`.
//!
//! Two bases of the invariant algebra live here: the sixteen monomial-pair
//! invariants `pi_1 .. pi_16` and the generator basis `(K, L, H2, Xi; U, V)`.
//! Both are driven by the coefficient tables below so the float path and the
//! exact rational path evaluate literally the same formulas.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::scalar::{dot, Scalar};

/// Index of a phase-space coordinate in `z = (q1..q4, p1..p4)`.
pub(crate) const Q1: usize = 0;
pub(crate) const Q2: usize = 1;
pub(crate) const Q3: usize = 2;
pub(crate) const Q4: usize = 3;
pub(crate) const P1: usize = 4;
pub(crate) const P2: usize = 5;
pub(crate) const P3: usize = 6;
pub(crate) const P4: usize = 7;

/// `pi_k = sum c * z_i * z_j` over the listed `(c, i, j)` terms.
///
/// No monomial appears in two different invariants, which makes the
/// decomposition of a quadratic form onto this basis a coefficient read-off.
pub(crate) const PI_TERMS: [[(i64, usize, usize); 2]; 16] = [
    [(1, Q1, Q1), (1, Q2, Q2)],
    [(1, Q3, Q3), (1, Q4, Q4)],
    [(1, P1, P1), (1, P2, P2)],
    [(1, P3, P3), (1, P4, P4)],
    [(1, Q1, P1), (1, Q2, P2)],
    [(1, Q3, P3), (1, Q4, P4)],
    [(1, Q1, P2), (-1, Q2, P1)],
    [(1, Q3, P4), (-1, Q4, P3)],
    [(1, Q1, Q4), (-1, Q2, Q3)],
    [(1, Q1, Q3), (1, Q2, Q4)],
    [(1, P1, P4), (-1, P2, P3)],
    [(1, P1, P3), (1, P2, P4)],
    [(1, Q1, P4), (-1, Q2, P3)],
    [(1, Q1, P3), (1, Q2, P4)],
    [(1, Q4, P1), (-1, Q3, P2)],
    [(1, Q3, P1), (1, Q4, P2)],
];

/// Generator `g = sum (c / 2) * pi_k` over the listed `(k, c)` pairs
/// (0-based `k`, doubled coefficients).
pub(crate) const GEN_FROM_PI: [&[(usize, i64)]; 16] = [
    &[(9, -2), (11, -2)],                // K1 = -(pi10 + pi12)
    &[(8, -2), (10, -2)],                // K2 = -(pi9 + pi11)
    &[(0, -1), (1, 1), (2, -1), (3, 1)], // K3
    &[(14, 2), (12, -2)],                // L1 = pi15 - pi13
    &[(13, 2), (15, -2)],                // L2 = pi14 - pi16
    &[(7, 2), (6, -2)],                  // L3 = pi8 - pi7
    &[(0, 1), (1, 1), (2, 1), (3, 1)],   // H2
    &[(6, 2), (7, 2)],                   // Xi = pi7 + pi8
    &[(4, -2), (5, -2)],                 // U1
    &[(9, 2), (11, -2)],                 // U2
    &[(8, 2), (10, -2)],                 // U3
    &[(0, 1), (1, -1), (2, -1), (3, 1)], // U4
    &[(0, 1), (1, 1), (2, -1), (3, -1)], // V1
    &[(13, 2), (15, 2)],                 // V2
    &[(12, 2), (14, 2)],                 // V3
    &[(4, 2), (5, -2)],                  // V4
];

/// The explicit inverse: `pi_k = sum (c / 2) * g_j` over `(j, c)`.
///
/// `pi_11 = -(U3 + K2) / 2`; the commonly printed `-(U3 - K2) / 2` would make
/// `K2 = -(pi_9 + pi_11)` vanish identically.
pub(crate) const PI_FROM_GEN: [&[(usize, i64)]; 16] = [
    &[(6, 1), (2, -1), (11, 1), (12, 1)],
    &[(6, 1), (2, 1), (11, -1), (12, 1)],
    &[(6, 1), (2, -1), (11, -1), (12, -1)],
    &[(6, 1), (2, 1), (11, 1), (12, -1)],
    &[(15, 1), (8, -1)],
    &[(8, -1), (15, -1)],
    &[(7, 1), (5, -1)],
    &[(7, 1), (5, 1)],
    &[(10, 1), (1, -1)],
    &[(9, 1), (0, -1)],
    &[(10, -1), (1, -1)],
    &[(9, -1), (0, -1)],
    &[(14, 1), (3, -1)],
    &[(13, 1), (4, 1)],
    &[(14, 1), (3, 1)],
    &[(13, 1), (4, -1)],
];

/// Coordinate functions of the generator basis, in storage order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Generator {
    K1,
    K2,
    K3,
    L1,
    L2,
    L3,
    H2,
    Xi,
    U1,
    U2,
    U3,
    U4,
    V1,
    V2,
    V3,
    V4,
}

impl Generator {
    pub const ALL: [Generator; 16] = [
        Generator::K1,
        Generator::K2,
        Generator::K3,
        Generator::L1,
        Generator::L2,
        Generator::L3,
        Generator::H2,
        Generator::Xi,
        Generator::U1,
        Generator::U2,
        Generator::U3,
        Generator::U4,
        Generator::V1,
        Generator::V2,
        Generator::V3,
        Generator::V4,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        const NAMES: [&str; 16] = [
            "K1", "K2", "K3", "L1", "L2", "L3", "H2", "Xi", "U1", "U2", "U3", "U4", "V1", "V2",
            "V3", "V4",
        ];
        NAMES[self.index()]
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|g| g.name() == name)
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A point `(q, p)` of `T R^4`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint8<T> {
    pub q: [T; 4],
    pub p: [T; 4],
}

impl<T: Scalar> PhasePoint8<T> {
    pub fn new(q: [T; 4], p: [T; 4]) -> Self {
        Self { q, p }
    }

    pub fn zero() -> Self {
        Self {
            q: std::array::from_fn(|_| T::zero()),
            p: std::array::from_fn(|_| T::zero()),
        }
    }

    pub fn from_array(z: [T; 8]) -> Self {
        Self {
            q: std::array::from_fn(|i| z[i].clone()),
            p: std::array::from_fn(|i| z[i + 4].clone()),
        }
    }

    pub fn to_array(&self) -> [T; 8] {
        std::array::from_fn(|i| self.coord(i))
    }

    /// Coordinate `i` of `z = (q, p)`.
    pub fn coord(&self, i: usize) -> T {
        if i < 4 {
            self.q[i].clone()
        } else {
            self.p[i - 4].clone()
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        Self {
            q: std::array::from_fn(|i| self.q[i].clone() * c.clone()),
            p: std::array::from_fn(|i| self.p[i].clone() * c.clone()),
        }
    }

    /// `<q, q>`.
    pub fn q_norm_sq(&self) -> T {
        dot(&self.q, &self.q)
    }

    pub fn to_f64(&self) -> PhasePoint8<f64> {
        PhasePoint8 {
            q: std::array::from_fn(|i| self.q[i].to_f64_lossy()),
            p: std::array::from_fn(|i| self.p[i].to_f64_lossy()),
        }
    }
}

impl PhasePoint8<f64> {
    pub fn is_finite(&self) -> bool {
        self.q.iter().chain(&self.p).all(|v| v.is_finite())
    }
}

/// Values of `pi_1 .. pi_16` (stored 0-based).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiVector<T>(pub [T; 16]);

impl<T: Scalar> PiVector<T> {
    /// `pi_k`, 1-based to match the usual numbering.
    pub fn get(&self, k: usize) -> &T {
        &self.0[k - 1]
    }
}

/// The generator coordinates `(K, L, H2, Xi; U, V)` of a point of `R^16`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorVector<T> {
    #[serde(rename = "K")]
    pub k: [T; 3],
    #[serde(rename = "L")]
    pub l: [T; 3],
    #[serde(rename = "H2")]
    pub h2: T,
    #[serde(rename = "Xi")]
    pub xi: T,
    #[serde(rename = "U")]
    pub u: [T; 4],
    #[serde(rename = "V")]
    pub v: [T; 4],
}

impl<T: Scalar> GeneratorVector<T> {
    pub fn zero() -> Self {
        Self::from_array(std::array::from_fn(|_| T::zero()))
    }

    pub fn from_array(a: [T; 16]) -> Self {
        Self {
            k: std::array::from_fn(|i| a[i].clone()),
            l: std::array::from_fn(|i| a[3 + i].clone()),
            h2: a[6].clone(),
            xi: a[7].clone(),
            u: std::array::from_fn(|i| a[8 + i].clone()),
            v: std::array::from_fn(|i| a[12 + i].clone()),
        }
    }

    pub fn to_array(&self) -> [T; 16] {
        std::array::from_fn(|i| self.get(Generator::ALL[i]))
    }

    pub fn get(&self, g: Generator) -> T {
        let i = g.index();
        match i {
            0..=2 => self.k[i].clone(),
            3..=5 => self.l[i - 3].clone(),
            6 => self.h2.clone(),
            7 => self.xi.clone(),
            8..=11 => self.u[i - 8].clone(),
            _ => self.v[i - 12].clone(),
        }
    }

    pub fn to_f64(&self) -> GeneratorVector<f64> {
        GeneratorVector::from_array(std::array::from_fn(|i| {
            self.get(Generator::ALL[i]).to_f64_lossy()
        }))
    }
}

/// A point of the `T^2` orbit space: `xi = (K+L)/2`, `eta = (K-L)/2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedPoint<T> {
    pub xi_vec: [T; 3],
    pub eta_vec: [T; 3],
    pub h2: T,
    pub xi: T,
}

pub fn eval_pi<T: Scalar>(z: &PhasePoint8<T>) -> PiVector<T> {
    let z = z.to_array();
    PiVector(std::array::from_fn(|k| {
        PI_TERMS[k].iter().fold(T::zero(), |acc, &(c, i, j)| {
            acc + T::int(c) * z[i].clone() * z[j].clone()
        })
    }))
}

fn apply_half_table<T: Scalar>(table: &[&[(usize, i64)]; 16], src: &[T; 16]) -> [T; 16] {
    let half = T::half();
    std::array::from_fn(|row| {
        table[row].iter().fold(T::zero(), |acc, &(col, c)| {
            acc + T::int(c) * half.clone() * src[col].clone()
        })
    })
}

/// The linear change of basis `pi -> (K, L, H2, Xi; U, V)`.
pub fn generators_from_pi<T: Scalar>(pi: &PiVector<T>) -> GeneratorVector<T> {
    GeneratorVector::from_array(apply_half_table(&GEN_FROM_PI, &pi.0))
}

/// The explicit inverse of [`generators_from_pi`].
pub fn pi_from_generators<T: Scalar>(g: &GeneratorVector<T>) -> PiVector<T> {
    PiVector(apply_half_table(&PI_FROM_GEN, &g.to_array()))
}

/// Generators evaluated through the `pi` basis.
pub fn eval_generators<T: Scalar>(z: &PhasePoint8<T>) -> GeneratorVector<T> {
    generators_from_pi(&eval_pi(z))
}

/// Generators written out directly as polynomials in `(q, p)`.
///
/// Independent of the coefficient tables; kept as the second route that
/// [`eval_generators`] is checked against.
pub fn eval_generators_direct<T: Scalar>(z: &PhasePoint8<T>) -> GeneratorVector<T> {
    let [q1, q2, q3, q4] = z.q.clone();
    let [p1, p2, p3, p4] = z.p.clone();
    let h = T::half();
    let sq = |a: &T| a.clone() * a.clone();
    let m = |a: &T, b: &T| a.clone() * b.clone();

    let k = [
        -(m(&q1, &q3) + m(&q2, &q4) + m(&p1, &p3) + m(&p2, &p4)),
        -(m(&q1, &q4) - m(&q2, &q3) + m(&p1, &p4) - m(&p2, &p3)),
        h.clone()
            * (sq(&q3) + sq(&q4) + sq(&p3) + sq(&p4) - sq(&q1) - sq(&q2) - sq(&p1) - sq(&p2)),
    ];
    let l = [
        m(&q4, &p1) - m(&q3, &p2) + m(&q2, &p3) - m(&q1, &p4),
        m(&q1, &p3) + m(&q2, &p4) - m(&q3, &p1) - m(&q4, &p2),
        m(&q3, &p4) - m(&q4, &p3) + m(&q2, &p1) - m(&q1, &p2),
    ];
    let h2 = h.clone()
        * (sq(&q1) + sq(&q2) + sq(&q3) + sq(&q4) + sq(&p1) + sq(&p2) + sq(&p3) + sq(&p4));
    let xi = m(&q1, &p2) - m(&q2, &p1) + m(&q3, &p4) - m(&q4, &p3);
    let u = [
        -(m(&q1, &p1) + m(&q2, &p2) + m(&q3, &p3) + m(&q4, &p4)),
        m(&q1, &q3) + m(&q2, &q4) - m(&p1, &p3) - m(&p2, &p4),
        m(&q1, &q4) - m(&q2, &q3) + m(&p2, &p3) - m(&p1, &p4),
        h.clone()
            * (sq(&q1) + sq(&q2) - sq(&q3) - sq(&q4) + sq(&p3) + sq(&p4) - sq(&p1) - sq(&p2)),
    ];
    let v = [
        h * (sq(&q1) + sq(&q2) + sq(&q3) + sq(&q4) - sq(&p1) - sq(&p2) - sq(&p3) - sq(&p4)),
        m(&q1, &p3) + m(&q2, &p4) + m(&q3, &p1) + m(&q4, &p2),
        m(&q1, &p4) - m(&q2, &p3) + m(&q4, &p1) - m(&q3, &p2),
        m(&q1, &p1) + m(&q2, &p2) - m(&q3, &p3) - m(&q4, &p4),
    ];
    GeneratorVector { k, l, h2, xi, u, v }
}

/// `H2 = (<q,q> + <p,p>) / 2`.
pub fn h2<T: Scalar>(z: &PhasePoint8<T>) -> T {
    T::half() * (dot(&z.q, &z.q) + dot(&z.p, &z.p))
}

/// `Xi = q1 p2 - q2 p1 + q3 p4 - q4 p3`.
pub fn xi<T: Scalar>(z: &PhasePoint8<T>) -> T {
    let (q, p) = (&z.q, &z.p);
    q[0].clone() * p[1].clone() - q[1].clone() * p[0].clone() + q[2].clone() * p[3].clone()
        - q[3].clone() * p[2].clone()
}

/// The map `(K, L, H2, Xi; U, V) -> ((K+L)/2, (K-L)/2, H2, Xi)`.
pub fn reduce<T: Scalar>(g: &GeneratorVector<T>) -> ReducedPoint<T> {
    let h = T::half();
    ReducedPoint {
        xi_vec: std::array::from_fn(|i| h.clone() * (g.k[i].clone() + g.l[i].clone())),
        eta_vec: std::array::from_fn(|i| h.clone() * (g.k[i].clone() - g.l[i].clone())),
        h2: g.h2.clone(),
        xi: g.xi.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rational, Rational};
    use num_traits::Zero;

    fn r(n: i64) -> Rational {
        rational(n, 1)
    }

    fn point(q: [i64; 4], p: [i64; 4]) -> PhasePoint8<Rational> {
        PhasePoint8::new(q.map(r), p.map(r))
    }

    /// Independent oracle: each invariant written out by hand.
    fn pi_by_hand(z: &PhasePoint8<Rational>) -> [Rational; 16] {
        let [q1, q2, q3, q4] = z.q.clone();
        let [p1, p2, p3, p4] = z.p.clone();
        [
            &q1 * &q1 + &q2 * &q2,
            &q3 * &q3 + &q4 * &q4,
            &p1 * &p1 + &p2 * &p2,
            &p3 * &p3 + &p4 * &p4,
            &q1 * &p1 + &q2 * &p2,
            &q3 * &p3 + &q4 * &p4,
            &q1 * &p2 - &q2 * &p1,
            &q3 * &p4 - &q4 * &p3,
            &q1 * &q4 - &q2 * &q3,
            &q1 * &q3 + &q2 * &q4,
            &p1 * &p4 - &p2 * &p3,
            &p1 * &p3 + &p2 * &p4,
            &q1 * &p4 - &q2 * &p3,
            &q1 * &p3 + &q2 * &p4,
            &q4 * &p1 - &q3 * &p2,
            &q3 * &p1 + &q4 * &p2,
        ]
    }

    #[test]
    fn pi_at_zero_and_unit_points() {
        let zero = eval_pi(&PhasePoint8::<Rational>::zero());
        assert!(zero.0.iter().all(|v| v.is_zero()));

        let e1 = eval_pi(&point([1, 0, 0, 0], [0; 4]));
        assert_eq!(e1.get(1), &r(1));
        assert!(e1.0[1..].iter().all(|v| v.is_zero()));

        let z = point([1, 0, 0, 0], [0, 1, 0, 0]);
        let pi = eval_pi(&z);
        assert_eq!(pi.0, pi_by_hand(&z));
        for k in 1..=16 {
            let expected = if [1, 3, 7].contains(&k) { 1 } else { 0 };
            assert_eq!(pi.get(k), &r(expected), "pi_{k}");
        }
    }

    #[test]
    fn generator_examples() {
        let g = eval_generators(&point([1, 0, 0, 0], [0, 1, 0, 0]));
        assert_eq!(g.h2, r(1));
        assert_eq!(g.xi, r(1));
        assert_eq!(g.k, [r(0), r(0), r(-1)]);
        assert_eq!(g.l, [r(0), r(0), r(-1)]);
        assert!(g.u.iter().chain(&g.v).all(|v| v.is_zero()));

        let g = eval_generators(&point([1, 0, 0, 0], [0, 0, 1, 0]));
        assert_eq!(g.h2, r(1));
        assert_eq!(g.xi, r(0));
        assert_eq!(g.k, [r(0), r(0), r(0)]);
        assert_eq!(g.l, [r(0), r(1), r(0)]);
        assert_eq!(g.u, [r(0), r(0), r(0), r(1)]);
        assert_eq!(g.v, [r(0), r(1), r(0), r(0)]);

        let g = eval_generators(&PhasePoint8::<Rational>::zero());
        assert!(g.to_array().iter().all(|v| v.is_zero()));
    }

    #[test]
    fn inverse_table_examples() {
        let z = point([1, 0, 0, 0], [0, 1, 0, 0]);
        assert_eq!(pi_from_generators(&eval_generators(&z)), eval_pi(&z));

        let zero = pi_from_generators(&GeneratorVector::<Rational>::zero());
        assert!(zero.0.iter().all(|v| v.is_zero()));

        let mut g = GeneratorVector::<Rational>::zero();
        g.h2 = r(1);
        g.k[2] = r(-1);
        let pi = pi_from_generators(&g);
        assert_eq!(pi.get(1), &r(1));
        assert_eq!(pi.get(2), &r(0));
        assert_eq!(pi.get(3), &r(1));
        assert_eq!(pi.get(4), &r(0));
    }

    #[test]
    fn tables_are_mutually_inverse() {
        for k in 0..16 {
            let mut e = [0i64; 16];
            e[k] = 1;
            let pi = PiVector(e.map(r));
            assert_eq!(pi_from_generators(&generators_from_pi(&pi)), pi);
            let g = GeneratorVector::from_array(e.map(r));
            assert_eq!(generators_from_pi(&pi_from_generators(&g)), g);
        }
    }

    #[test]
    fn reduce_examples() {
        let mut g = GeneratorVector::<Rational>::zero();
        g.k = [r(0), r(0), r(-1)];
        g.l = [r(0), r(0), r(-1)];
        let red = reduce(&g);
        assert_eq!(red.xi_vec, [r(0), r(0), r(-1)]);
        assert_eq!(red.eta_vec, [r(0), r(0), r(0)]);

        g.k = [r(0), r(0), r(0)];
        g.l = [r(0), r(1), r(0)];
        let red = reduce(&g);
        assert_eq!(red.xi_vec, [r(0), rational(1, 2), r(0)]);
        assert_eq!(red.eta_vec, [r(0), rational(-1, 2), r(0)]);

        let red = reduce(&GeneratorVector::<Rational>::zero());
        assert!(red.xi_vec.iter().chain(&red.eta_vec).all(|v| v.is_zero()));
    }

    #[test]
    fn generator_names_round_trip() {
        for g in Generator::ALL {
            assert_eq!(Generator::parse(g.name()), Some(g));
            assert_eq!(Generator::from_index(g.index()), Some(g));
        }
    }

    #[test]
    fn generator_vector_json_keys() {
        let g = eval_generators_direct(&PhasePoint8::new([1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]));
        let json = serde_json::to_value(&g).unwrap();
        for key in ["K", "L", "H2", "Xi", "U", "V"] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        let back: GeneratorVector<f64> = serde_json::from_value(json).unwrap();
        assert_eq!(back, g);
    }
}
