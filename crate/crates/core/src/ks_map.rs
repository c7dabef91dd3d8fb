//! The ks map `T_* R^4 -> T_0 R^3` and its pullback identities.
//!
//! `KS` is `ks` restricted to the level set `H2 = 1, Xi = 0`; it is exposed
//! here as `ks` plus a level-set guard.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariants::{eval_generators, h2, xi, GeneratorVector, PhasePoint8};
use crate::sampling::{gaussian_point, SampleRng};
use crate::scalar::{cross, dot, Scalar};

/// A point `(x, y)` of `T R^3`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint6<T> {
    pub x: [T; 3],
    pub y: [T; 3],
}

impl<T: Scalar> PhasePoint6<T> {
    pub fn new(x: [T; 3], y: [T; 3]) -> Self {
        Self { x, y }
    }

    pub fn to_f64(&self) -> PhasePoint6<f64> {
        PhasePoint6 {
            x: self.x.clone().map(|c| c.to_f64_lossy()),
            y: self.y.clone().map(|c| c.to_f64_lossy()),
        }
    }
}

impl PhasePoint6<f64> {
    pub fn to_array(&self) -> [f64; 6] {
        [self.x[0], self.x[1], self.x[2], self.y[0], self.y[1], self.y[2]]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        Self::new([a[0], a[1], a[2]], [a[3], a[4], a[5]])
    }

    pub fn r(&self) -> f64 {
        dot(&self.x, &self.x).sqrt()
    }
}

/// The numerators of `y` (before dividing by `<q,q>`).
fn y_numerators<T: Scalar>(q: &[T; 4], p: &[T; 4]) -> [T; 3] {
    let m = |a: usize, b: usize| q[a].clone() * p[b].clone();
    [
        m(0, 2) + m(1, 3) + m(2, 0) + m(3, 1),
        m(0, 3) - m(1, 2) - m(2, 1) + m(3, 0),
        m(0, 0) + m(1, 1) - m(2, 2) - m(3, 3),
    ]
}

fn x_of_q<T: Scalar>(q: &[T; 4]) -> [T; 3] {
    let two = T::int(2);
    let m = |a: usize, b: usize| q[a].clone() * q[b].clone();
    [
        two.clone() * (m(0, 2) + m(1, 3)),
        two * (m(0, 3) - m(1, 2)),
        m(0, 0) + m(1, 1) - m(2, 2) - m(3, 3),
    ]
}

/// `ks` through the generators: `x = (U2-K1, U3-K2, U4-K3)`,
/// `y = (V2, V3, V4) / (H2 + V1)`.
pub fn ks_via_generators<T: Scalar>(g: &GeneratorVector<T>) -> Result<PhasePoint6<T>> {
    let d = g.h2.clone() + g.v[0].clone();
    if d.is_zero() {
        return Err(Error::CollisionPoint);
    }
    Ok(PhasePoint6::new(
        std::array::from_fn(|i| g.u[i + 1].clone() - g.k[i].clone()),
        std::array::from_fn(|i| g.v[i + 1].clone() / d.clone()),
    ))
}

/// `ks(q, p)` from the coordinate formulas. The generator form is evaluated
/// alongside and checked in debug builds.
pub fn ks<T: Scalar>(z: &PhasePoint8<T>) -> Result<PhasePoint6<T>> {
    let n = z.q_norm_sq();
    if n.is_zero() {
        return Err(Error::CollisionPoint);
    }
    let num = y_numerators(&z.q, &z.p);
    let w = PhasePoint6::new(x_of_q(&z.q), num.map(|c| c / n.clone()));
    #[cfg(debug_assertions)]
    {
        let alt = ks_via_generators(&eval_generators(z))?;
        let scale = T::one() + n.clone() + h2(z);
        let tol = T::from_f64(1e-9).expect("f64 constant") * scale.clone() * scale;
        for i in 0..3 {
            debug_assert!((w.x[i].clone() - alt.x[i].clone()).abs() <= tol);
            debug_assert!((w.y[i].clone() - alt.y[i].clone()).abs() <= tol);
        }
    }
    Ok(w)
}

/// Rejects points further than `tol` from `H2 = 1, Xi = 0`.
pub fn check_level_set<T: Scalar>(z: &PhasePoint8<T>, tol: &T) -> Result<()> {
    let (h, x) = (h2(z), xi(z));
    let dh = (h.clone() - T::one()).abs();
    let dx = x.abs();
    if dh > *tol || dx > *tol {
        return Err(Error::OffLevelSet {
            h2: h.to_f64_lossy(),
            xi: x.to_f64_lossy(),
            dh2: dh.to_f64_lossy(),
            dxi: dx.to_f64_lossy(),
        });
    }
    Ok(())
}

/// `KS = ks` on the level set `H2 = 1, Xi = 0`.
pub fn ks_on_level_set<T: Scalar>(z: &PhasePoint8<T>, tol: &T) -> Result<PhasePoint6<T>> {
    check_level_set(z, tol)?;
    ks(z)
}

/// Simultaneous rotation of the `(q1,q2)`, `(q3,q4)`, `(p1,p2)`, `(p3,p4)`
/// planes by the angle with cosine `c` and sine `s`.
pub fn rotate_xi_planes<T: Scalar>(z: &PhasePoint8<T>, c: &T, s: &T) -> PhasePoint8<T> {
    let rot = |v: &[T; 4]| -> [T; 4] {
        [
            c.clone() * v[0].clone() - s.clone() * v[1].clone(),
            s.clone() * v[0].clone() + c.clone() * v[1].clone(),
            c.clone() * v[2].clone() - s.clone() * v[3].clone(),
            s.clone() * v[2].clone() + c.clone() * v[3].clone(),
        ]
    };
    PhasePoint8::new(rot(&z.q), rot(&z.p))
}

/// The exact flow of `X_Xi` for time `s`; ks is constant along it.
pub fn ks_fiber_action(z: &PhasePoint8<f64>, s: f64) -> PhasePoint8<f64> {
    let (sn, cs) = s.sin_cos();
    rotate_xi_planes(z, &cs, &sn)
}

/// `(K-bar(ks z), H2 - Xi^2 / (2 (H2 + V1)))` where `K-bar = |x|(|y|^2+1)/2`.
pub fn pullback_kepler_hamiltonian<T: Scalar>(z: &PhasePoint8<T>) -> Result<(T, T)> {
    let w = ks(z)?;
    // |x| = <q,q> exactly
    let r = z.q_norm_sq();
    let lhs = T::half() * r.clone() * (dot(&w.y, &w.y) + T::one());
    let g = eval_generators(z);
    let x = g.xi.clone();
    let rhs = g.h2.clone() - T::half() * x.clone() * x / (g.h2.clone() + g.v[0].clone());
    Ok((lhs, rhs))
}

/// `(x × y at ks z, L(z))` on the level set.
pub fn pullback_angular_momentum<T: Scalar>(
    z: &PhasePoint8<T>,
    tol: &T,
) -> Result<([T; 3], [T; 3])> {
    let w = ks_on_level_set(z, tol)?;
    Ok((cross(&w.x, &w.y), eval_generators(z).l))
}

/// `(-x/|x| + y × (x × y) at ks z, K(z))` on the level set.
pub fn pullback_eccentricity<T: Scalar>(
    z: &PhasePoint8<T>,
    tol: &T,
) -> Result<([T; 3], [T; 3])> {
    let w = ks_on_level_set(z, tol)?;
    let r = z.q_norm_sq();
    let j = cross(&w.x, &w.y);
    let yj = cross(&w.y, &j);
    let e = std::array::from_fn(|i| -w.x[i].clone() / r.clone() + yj[i].clone());
    Ok((e, eval_generators(z).k))
}

/// `(<x, y> at ks z, -U1(z))` on the level set.
pub fn pullback_inner_product<T: Scalar>(z: &PhasePoint8<T>, tol: &T) -> Result<(T, T)> {
    let w = ks_on_level_set(z, tol)?;
    Ok((dot(&w.x, &w.y), -eval_generators(z).u[0].clone()))
}

/// `(|y|^2, (H2^2 - Xi^2 - V1^2) / (H2 + V1)^2)`.
pub fn y_norm_identity<T: Scalar>(z: &PhasePoint8<T>) -> Result<(T, T)> {
    let w = ks(z)?;
    let g = eval_generators(z);
    let d = g.h2.clone() + g.v[0].clone();
    let rhs = (g.h2.clone() * g.h2.clone() - g.xi.clone() * g.xi.clone()
        - g.v[0].clone() * g.v[0].clone())
        / (d.clone() * d);
    Ok((dot(&w.y, &w.y), rhs))
}

/// Analytic Jacobian of ks: row `i` holds `(d/dq, d/dp)` of component `i`
/// of `(x1, x2, x3, y1, y2, y3)`.
pub fn ks_jacobian(z: &PhasePoint8<f64>) -> Result<[[f64; 8]; 6]> {
    let (q, p) = (&z.q, &z.p);
    let n = z.q_norm_sq();
    if n == 0.0 {
        return Err(Error::CollisionPoint);
    }
    let mut jac = [[0.0; 8]; 6];
    let dx = [
        [q[2], q[3], q[0], q[1]],
        [q[3], -q[2], -q[1], q[0]],
        [q[0], q[1], -q[2], -q[3]],
    ];
    for i in 0..3 {
        for a in 0..4 {
            jac[i][a] = 2.0 * dx[i][a];
        }
    }
    // numerators n_i: their q- and p-gradients are the same sign patterns
    let dn_dq = [
        [p[2], p[3], p[0], p[1]],
        [p[3], -p[2], -p[1], p[0]],
        [p[0], p[1], -p[2], -p[3]],
    ];
    let num = y_numerators(q, p);
    for i in 0..3 {
        for a in 0..4 {
            jac[3 + i][a] = dn_dq[i][a] / n - 2.0 * num[i] * q[a] / (n * n);
            jac[3 + i][4 + a] = dx[i][a] / n;
        }
    }
    Ok(jac)
}

/// Brackets of the pulled-back coordinates minus `[[0, 2I], [-2I, 0]]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoissonResidual {
    pub matrix: [[f64; 6]; 6],
    pub max_xx: f64,
    pub max_xy: f64,
    pub max_yy: f64,
}

impl PoissonResidual {
    pub fn max(&self) -> f64 {
        self.max_xx.max(self.max_xy).max(self.max_yy)
    }
}

pub fn poisson_property_residual(z: &PhasePoint8<f64>) -> Result<PoissonResidual> {
    let jac = ks_jacobian(z)?;
    let mut matrix = [[0.0; 6]; 6];
    let (mut max_xx, mut max_xy, mut max_yy) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..6 {
        for j in 0..6 {
            let mut b = 0.0;
            for a in 0..4 {
                b += jac[i][a] * jac[j][4 + a] - jac[i][4 + a] * jac[j][a];
            }
            let target = match (i < 3, j < 3) {
                (true, false) if j == i + 3 => 2.0,
                (false, true) if i == j + 3 => -2.0,
                _ => 0.0,
            };
            let r = b - target;
            matrix[i][j] = r;
            let slot = match (i < 3, j < 3) {
                (true, true) => &mut max_xx,
                (false, false) => &mut max_yy,
                _ => &mut max_xy,
            };
            *slot = slot.max(r.abs());
        }
    }
    Ok(PoissonResidual {
        matrix,
        max_xx,
        max_xy,
        max_yy,
    })
}

/// One point of the `y`-`y` bracket sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct YySample {
    pub xi: f64,
    pub q_norm_sq: f64,
    pub max_yy: f64,
}

/// `y`-`y` residual against `Xi` at Gaussian points with `q` normalized.
pub fn yy_bracket_sweep(rng: &mut SampleRng, samples: usize) -> Result<Vec<YySample>> {
    let mut out = Vec::with_capacity(samples);
    while out.len() < samples {
        let z = gaussian_point(rng);
        let n = z.q_norm_sq();
        if n < 1e-6 {
            continue;
        }
        let z = PhasePoint8::new(z.q.map(|c| c / n.sqrt()), z.p);
        let res = poisson_property_residual(&z)?;
        out.push(YySample {
            xi: xi(&z),
            q_norm_sq: z.q_norm_sq(),
            max_yy: res.max_yy,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{rational_point, rng};
    use crate::scalar::{rational, Rational};
    use num_traits::Zero;

    fn r(n: i64) -> Rational {
        rational(n, 1)
    }

    fn pt(q: [f64; 4], p: [f64; 4]) -> PhasePoint8<f64> {
        PhasePoint8::new(q, p)
    }

    #[test]
    fn ks_examples() {
        let w = ks(&PhasePoint8::new([r(1), r(0), r(0), r(0)], std::array::from_fn(|_| r(0)))).unwrap();
        assert_eq!(w, PhasePoint6::new([r(0), r(0), r(1)], [r(0), r(0), r(0)]));
        let w = ks(&PhasePoint8::new([r(1), r(0), r(0), r(0)], [r(0), r(0), r(1), r(0)])).unwrap();
        assert_eq!(w, PhasePoint6::new([r(0), r(0), r(1)], [r(1), r(0), r(0)]));
        let w = ks(&PhasePoint8::new([r(1), r(0), r(0), r(0)], [r(1), r(0), r(0), r(0)])).unwrap();
        assert_eq!(w, PhasePoint6::new([r(0), r(0), r(1)], [r(0), r(0), r(1)]));
        assert!(matches!(ks(&PhasePoint8::<f64>::zero()), Err(Error::CollisionPoint)));
    }

    #[test]
    fn coordinate_and_generator_forms_agree_exactly() {
        let mut rng = rng(5);
        for _ in 0..100 {
            let z = rational_point(&mut rng);
            if z.q_norm_sq().is_zero() {
                continue;
            }
            let a = ks(&z).unwrap();
            assert_eq!(a, ks_via_generators(&eval_generators(&z)).unwrap());
            // |x| = <q,q>
            assert_eq!(dot(&a.x, &a.x), z.q_norm_sq() * z.q_norm_sq());
            let (lhs, rhs) = y_norm_identity(&z).unwrap();
            assert_eq!(lhs, rhs);
            let (lhs, rhs) = pullback_kepler_hamiltonian(&z).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn fiber_action_preserves_ks() {
        let mut rng = rng(9);
        let z = pt([0.3, -1.1, 0.7, 0.2], [0.5, 0.1, -0.4, 1.3]);
        assert_eq!(ks_fiber_action(&z, 0.0), z);
        let full = ks_fiber_action(&z, 2.0 * std::f64::consts::PI);
        for (a, b) in full.to_array().iter().zip(z.to_array()) {
            assert!((a - b).abs() < 1e-14);
        }
        for _ in 0..100 {
            let z = gaussian_point(&mut rng);
            let s: f64 = rand::Rng::random_range(&mut rng, 0.0..std::f64::consts::TAU);
            let a = ks(&z).unwrap().to_array();
            let b = ks(&ks_fiber_action(&z, s)).unwrap().to_array();
            for i in 0..6 {
                assert!((a[i] - b[i]).abs() < 1e-12 * (1.0 + a[i].abs()));
            }
        }
    }

    #[test]
    fn hamiltonian_examples() {
        let (l, rr) = pullback_kepler_hamiltonian(&pt([1., 0., 0., 0.], [0., 0., 1., 0.])).unwrap();
        assert_eq!((l, rr), (1.0, 1.0));
        let (l, rr) = pullback_kepler_hamiltonian(&pt([1., 0., 0., 0.], [0.; 4])).unwrap();
        assert_eq!((l, rr), (0.5, 0.5));
        let (l, rr) = pullback_kepler_hamiltonian(&pt([1., 0., 0., 0.], [0., 1., 0., 0.])).unwrap();
        assert_eq!((l, rr), (0.5, 0.5));
    }

    #[test]
    fn level_set_pullbacks() {
        let tol = 1e-12;
        let circ = pt([1., 0., 0., 0.], [0., 0., 1., 0.]);
        let (j, l) = pullback_angular_momentum(&circ, &tol).unwrap();
        assert_eq!(j, [0.0, 1.0, 0.0]);
        assert_eq!(l, [0.0, 1.0, 0.0]);
        let (e, k) = pullback_eccentricity(&circ, &tol).unwrap();
        assert_eq!(e, [0.0; 3]);
        assert_eq!(k, [0.0; 3]);
        assert_eq!(pullback_inner_product(&circ, &tol).unwrap(), (0.0, 0.0));

        let radial = pt([2f64.sqrt(), 0., 0., 0.], [0.; 4]);
        let (e, k) = pullback_eccentricity(&radial, &tol).unwrap();
        assert!((e[2] + 1.0).abs() < 1e-15 && (k[2] + 1.0).abs() < 1e-15);
        let (j, l) = pullback_angular_momentum(&radial, &tol).unwrap();
        assert_eq!(j, [0.0; 3]);
        assert_eq!(l, [0.0; 3]);

        // collinear q = p normalised to H2 = 1: <x,y> = 1 = -U1
        let c = pt([1., 0., 0., 0.], [1., 0., 0., 0.]);
        let (lhs, rhs) = pullback_inner_product(&c, &tol).unwrap();
        assert!((lhs - 1.0).abs() < 1e-15 && (rhs - 1.0).abs() < 1e-15);
        let (j, _) = pullback_angular_momentum(&c, &tol).unwrap();
        assert_eq!(j, [0.0; 3]);

        let off = pt([1., 0., 0., 0.], [0., 1., 0., 0.]);
        assert!(matches!(
            pullback_inner_product(&off, &tol),
            Err(Error::OffLevelSet { .. })
        ));
    }

    #[test]
    fn jacobian_matches_central_differences() {
        let mut rng = rng(21);
        let h = 1e-6;
        for _ in 0..20 {
            let z = gaussian_point(&mut rng);
            let jac = ks_jacobian(&z).unwrap();
            for a in 0..8 {
                let mut plus = z.to_array();
                let mut minus = z.to_array();
                plus[a] += h;
                minus[a] -= h;
                let fp = ks(&PhasePoint8::from_array(plus)).unwrap().to_array();
                let fm = ks(&PhasePoint8::from_array(minus)).unwrap().to_array();
                for i in 0..6 {
                    let fd = (fp[i] - fm[i]) / (2.0 * h);
                    assert!((fd - jac[i][a]).abs() < 1e-6 * (1.0 + fd.abs()), "{i} {a}");
                }
            }
        }
    }

    #[test]
    fn poisson_residual_vanishes_on_xi_zero() {
        let res = poisson_property_residual(&pt([1., 0., 0., 0.], [0., 0., 1., 0.])).unwrap();
        assert!(res.max() < 1e-10);
        let mut rng = rng(4);
        for _ in 0..50 {
            let z = crate::sampling::project_off_xi(&gaussian_point(&mut rng));
            let res = poisson_property_residual(&z).unwrap();
            assert!(res.max() < 1e-10, "{res:?}");
        }
    }

    #[test]
    fn xx_block_is_zero_and_yy_tracks_xi() {
        let mut rng = rng(8);
        let sweep = yy_bracket_sweep(&mut rng, 50).unwrap();
        for s in &sweep {
            // with <q,q> = 1 the y-y brackets are bounded by a multiple of |Xi|
            assert!(s.max_yy <= 2.0 * s.xi.abs() + 1e-10, "{s:?}");
        }
        assert!(sweep.iter().any(|s| s.max_yy > 1e-3));
        let z = gaussian_point(&mut rng);
        assert_eq!(poisson_property_residual(&z).unwrap().max_xx, 0.0);
    }
}
