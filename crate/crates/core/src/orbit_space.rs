//! Semialgebraic description of `R^8 / S^1` and `R^8 / T^2`.
//!
//! The `S^1` orbit space sits in `R^16` (generator coordinates) cut out by
//! nine polynomial equations and two inequalities; the `T^2` orbit space is
//! its image under `(K, L) -> ((K+L)/2, (K-L)/2)`. The reduced momentum map
//! `(H2, Xi)` lands in the closed wedge `W = {0 <= |xi| <= h}`, whose
//! interior, boundary and vertex give the three kinds of reduced space.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::invariants::{h2, GeneratorVector, PhasePoint8};
use crate::sampling::{project_off_xi, SampleRng};
use crate::scalar::{dot, Scalar};

/// Default membership tolerance on the float path.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

pub const RELATION_NAMES: [&str; 9] = [
    "<U,U> - (H2^2 - Xi^2)",
    "<V,V> - (H2^2 - Xi^2)",
    "<U,V>",
    "U2V1 - U1V2 - (L1 Xi - K1 H2)",
    "U3V1 - U1V3 - (L2 Xi - K2 H2)",
    "U4V1 - U1V4 - (L3 Xi - K3 H2)",
    "U4V3 - U3V4 - (K1 Xi - L1 H2)",
    "U2V4 - U4V2 - (K2 Xi - L2 H2)",
    "U3V2 - U2V3 - (K3 Xi - L3 H2)",
];

/// Residuals of the nine defining equations plus the two inequality flags.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationResidual<T> {
    pub residuals: [T; 9],
    pub h2_nonnegative: bool,
    pub wedge_nonnegative: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualEntry {
    pub relation_name: String,
    pub residual: f64,
}

impl<T: Scalar> RelationResidual<T> {
    pub fn max_abs(&self) -> T {
        self.residuals
            .iter()
            .map(|r| r.abs())
            .fold(T::zero(), |m, r| if r > m { r } else { m })
    }

    /// On the orbit space: every residual within `tol` and both flags set.
    pub fn on_orbit_space(&self, tol: &T) -> bool {
        self.h2_nonnegative && self.wedge_nonnegative && self.max_abs() <= *tol
    }

    /// JSON-ready `{relation_name, residual}` pairs.
    pub fn entries(&self) -> Vec<ResidualEntry> {
        RELATION_NAMES
            .iter()
            .zip(&self.residuals)
            .map(|(name, r)| ResidualEntry {
                relation_name: name.to_string(),
                residual: r.to_f64_lossy(),
            })
            .collect()
    }
}

/// `U_a V_b - U_b V_a` with 1-based indices.
fn wedge<T: Scalar>(u: &[T; 4], v: &[T; 4], a: usize, b: usize) -> T {
    u[a - 1].clone() * v[b - 1].clone() - u[b - 1].clone() * v[a - 1].clone()
}

pub fn relation_residuals<T: Scalar>(g: &GeneratorVector<T>) -> RelationResidual<T> {
    let (k, l, h, x, u, v) = (&g.k, &g.l, &g.h2, &g.xi, &g.u, &g.v);
    let gap = h.clone() * h.clone() - x.clone() * x.clone();
    let lin = |a: &T, b: &T| a.clone() * x.clone() - b.clone() * h.clone();
    let residuals = [
        dot(u, u) - gap.clone(),
        dot(v, v) - gap.clone(),
        dot(u, v),
        wedge(u, v, 2, 1) - lin(&l[0], &k[0]),
        wedge(u, v, 3, 1) - lin(&l[1], &k[1]),
        wedge(u, v, 4, 1) - lin(&l[2], &k[2]),
        wedge(u, v, 4, 3) - lin(&k[0], &l[0]),
        wedge(u, v, 2, 4) - lin(&k[1], &l[1]),
        wedge(u, v, 3, 2) - lin(&k[2], &l[2]),
    ];
    RelationResidual {
        residuals,
        h2_nonnegative: *h >= T::zero(),
        wedge_nonnegative: gap >= T::zero(),
    }
}

/// Two sides of one identity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sides<T> {
    pub lhs: T,
    pub rhs: T,
}

impl<T: Scalar> Sides<T> {
    pub fn new(lhs: T, rhs: T) -> Self {
        Self { lhs, rhs }
    }

    pub fn gap(&self) -> T {
        (self.lhs.clone() - self.rhs.clone()).abs()
    }
}

/// The Lagrange identity on `(U, V)` and the relations it reduces to.
#[derive(Clone, Debug, PartialEq)]
pub struct LagrangeCheck<T> {
    /// `sum_{i<j} (U_i V_j - U_j V_i)^2 + <U,V>^2` vs `<U,U><V,V>`.
    pub lagrange: Sides<T>,
    /// `|K|^2 + |L|^2` vs `H2^2 + Xi^2`.
    pub norm_sum: Sides<T>,
    /// `<K, L>` vs `Xi H2`.
    pub inner: Sides<T>,
    /// `(H2^2 - Xi^2)^2` vs `(|K|^2+|L|^2)(H2^2+Xi^2) - 4 <K,L> Xi H2`.
    pub substituted: Sides<T>,
}

impl<T: Scalar> LagrangeCheck<T> {
    pub fn max_gap(&self) -> T {
        [&self.lagrange, &self.norm_sum, &self.inner, &self.substituted]
            .iter()
            .map(|s| s.gap())
            .fold(T::zero(), |m, r| if r > m { r } else { m })
    }
}

pub fn lagrange_identity_check<T: Scalar>(g: &GeneratorVector<T>) -> LagrangeCheck<T> {
    let (u, v) = (&g.u, &g.v);
    let mut wedge_sq = T::zero();
    for a in 1..=4 {
        for b in (a + 1)..=4 {
            let w = wedge(u, v, a, b);
            wedge_sq = wedge_sq + w.clone() * w;
        }
    }
    let uv = dot(u, v);
    let (h, x) = (&g.h2, &g.xi);
    let kl_sq = dot(&g.k, &g.k) + dot(&g.l, &g.l);
    let hx_sq = h.clone() * h.clone() + x.clone() * x.clone();
    let kl = dot(&g.k, &g.l);
    let gap = h.clone() * h.clone() - x.clone() * x.clone();
    LagrangeCheck {
        lagrange: Sides::new(wedge_sq + uv.clone() * uv, dot(u, u) * dot(v, v)),
        norm_sum: Sides::new(kl_sq.clone(), hx_sq.clone()),
        inner: Sides::new(kl.clone(), x.clone() * h.clone()),
        substituted: Sides::new(
            gap.clone() * gap,
            kl_sq * hx_sq - T::int(4) * kl * x.clone() * h.clone(),
        ),
    }
}

/// The sphere relations `|xi|^2 = (H2+Xi)^2/4` and `|eta|^2 = (H2-Xi)^2/4`.
pub fn sphere_relations<T: Scalar>(g: &GeneratorVector<T>) -> [Sides<T>; 2] {
    let red = crate::invariants::reduce(g);
    let quarter = T::half() * T::half();
    let plus = g.h2.clone() + g.xi.clone();
    let minus = g.h2.clone() - g.xi.clone();
    [
        Sides::new(dot(&red.xi_vec, &red.xi_vec), quarter.clone() * plus.clone() * plus),
        Sides::new(dot(&red.eta_vec, &red.eta_vec), quarter * minus.clone() * minus),
    ]
}

/// A value `(h, xi)` of the reduced momentum map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WedgePoint {
    pub h: f64,
    pub xi: f64,
}

impl WedgePoint {
    pub fn in_wedge(&self, tol: f64) -> bool {
        self.h >= -tol && self.xi.abs() <= self.h + tol
    }
}

/// `(K, L, H2, Xi; U, V) -> (H2, Xi)`, rejecting points outside `W`.
pub fn reduced_momentum<T: Scalar>(g: &GeneratorVector<T>, tol: f64) -> Result<WedgePoint> {
    let w = WedgePoint {
        h: g.h2.to_f64_lossy(),
        xi: g.xi.to_f64_lossy(),
    };
    if w.in_wedge(tol) {
        Ok(w)
    } else {
        Err(Error::OutsideWedge { h: w.h, xi: w.xi })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum ReducedSpaceKind {
    /// `S^2_{r+} x S^2_{r-}` over the interior of `W`.
    ProductOfSpheres { r_plus: f64, r_minus: f64 },
    /// `S^2_h` over the boundary rays `xi = +-h > 0`.
    SingleSphere { radius: f64 },
    /// The vertex `(0, 0)`.
    Point,
}

/// Boundary dispatch uses `|h - |xi|| <= tol * max(1, h)`.
pub fn classify_reduced_space(w: WedgePoint, tol: f64) -> Result<ReducedSpaceKind> {
    if !w.in_wedge(tol) {
        return Err(Error::OutsideWedge { h: w.h, xi: w.xi });
    }
    if w.h <= tol {
        return Ok(ReducedSpaceKind::Point);
    }
    if (w.h - w.xi.abs()).abs() <= tol * w.h.max(1.0) {
        return Ok(ReducedSpaceKind::SingleSphere { radius: w.h });
    }
    Ok(ReducedSpaceKind::ProductOfSpheres {
        r_plus: 0.5 * (w.h + w.xi),
        r_minus: 0.5 * (w.h - w.xi),
    })
}

/// Membership in `M_{h,0}`: `<U,U> = h^2 = <V,V>`, `<U,V> = 0`, `h > 0`.
fn check_m_h0<T: Scalar>(u: &[T; 4], v: &[T; 4], h: &T, tol: &T) -> Result<()> {
    if *h <= T::zero() {
        return Err(Error::Precondition(format!(
            "h = {} must be positive",
            h.to_f64_lossy()
        )));
    }
    let hh = h.clone() * h.clone();
    let checks = [
        ("<U,U> - h^2", dot(u, u) - hh.clone()),
        ("<V,V> - h^2", dot(v, v) - hh),
        ("<U,V>", dot(u, v)),
    ];
    for (name, r) in checks {
        if r.abs() > *tol {
            return Err(Error::Precondition(format!(
                "{name} = {:e} exceeds tolerance",
                r.to_f64_lossy()
            )));
        }
    }
    Ok(())
}

/// `(K, L)` over a point of `M_{h,0}`: the fiber `J^{-1}(h, 0)` as a graph.
pub fn reconstruct_fiber_interior<T: Scalar>(
    u: &[T; 4],
    v: &[T; 4],
    h: &T,
    tol: &T,
) -> Result<([T; 3], [T; 3])> {
    check_m_h0(u, v, h, tol)?;
    let f = |a, b| -wedge(u, v, a, b) / h.clone();
    Ok((
        [f(2, 1), f(3, 1), f(4, 1)],
        [f(4, 3), f(2, 4), f(3, 2)],
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BoundarySign {
    /// `xi = +h`.
    Plus,
    /// `xi = -h`.
    Minus,
}

impl BoundarySign {
    fn value<T: Scalar>(self) -> T {
        match self {
            BoundarySign::Plus => T::one(),
            BoundarySign::Minus => -T::one(),
        }
    }
}

/// Output of the boundary-fiber formulas.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryFiber<T> {
    pub sign: BoundarySign,
    /// `eta_k = -+ h^{-1} (U_{k+1} V_1 - U_1 V_{k+1})`.
    pub eta: [T; 3],
    /// `max_k |h^{-1} b_k +- h^{-1} c_k|` over the paired expressions.
    pub pairing_residual: T,
}

impl<T: Scalar> BoundaryFiber<T> {
    /// `eta`, provided the paired expressions agree to `tol`.
    ///
    /// On `M_{h,0}` they never do: the pairing asks `U ^ V` to be
    /// (anti-)self-dual, which no nonzero decomposable 2-form is.
    pub fn consistent(&self, tol: &T) -> Result<[T; 3]> {
        if self.pairing_residual > *tol {
            Err(Error::InconsistentBoundaryPair(self.pairing_residual.to_f64_lossy()))
        } else {
            Ok(self.eta.clone())
        }
    }
}

pub fn reconstruct_fiber_boundary<T: Scalar>(
    u: &[T; 4],
    v: &[T; 4],
    h: &T,
    sign: BoundarySign,
    tol: &T,
) -> Result<BoundaryFiber<T>> {
    check_m_h0(u, v, h, tol)?;
    let s: T = sign.value();
    let first = [wedge(u, v, 2, 1), wedge(u, v, 3, 1), wedge(u, v, 4, 1)];
    let paired = [wedge(u, v, 4, 3), wedge(u, v, 2, 4), wedge(u, v, 3, 2)];
    let eta = std::array::from_fn(|k| -s.clone() * first[k].clone() / h.clone());
    let pairing_residual = (0..3)
        .map(|k| ((first[k].clone() + s.clone() * paired[k].clone()) / h.clone()).abs())
        .fold(T::zero(), |m, r| if r > m { r } else { m });
    Ok(BoundaryFiber {
        sign,
        eta,
        pairing_residual,
    })
}

/// `(U, V) -> (U / h, V)`, from `M_{h,0}` to the tangent `h`-sphere bundle of `S^3`.
pub fn to_unit_tangent_bundle(u: &[f64; 4], v: &[f64; 4], h: f64) -> ([f64; 4], [f64; 4]) {
    (u.map(|c| c / h), *v)
}

/// A random point of `J^{-1}(h, 0)`: `q` uniform on `S^3`, `p` Gaussian with
/// its `grad_p Xi` component removed, then `(q, p)` rescaled to `H2 = h`.
/// `Xi` is quadratic, so the rescaling keeps `Xi = 0`.
pub fn sample_level_set(rng: &mut SampleRng, h: f64) -> PhasePoint8<f64> {
    assert!(h > 0.0, "level h must be positive");
    loop {
        let g: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let n = dot(&g, &g).sqrt();
        if n < 1e-12 {
            continue;
        }
        let q = g.map(|c| c / n);
        let p: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let z = project_off_xi(&PhasePoint8::new(q, p));
        if dot(&z.p, &z.p) < 1e-24 {
            continue;
        }
        let s = (h / h2(&z)).sqrt();
        return z.scale(&s);
    }
}
