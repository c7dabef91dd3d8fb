//! Seeded sample generators shared by the verification suites.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::invariants::{h2, PhasePoint8};
use crate::scalar::{dot, Rational, SmallRational};

/// Recorded in report headers so sample sets can be regenerated elsewhere.
pub const PRNG_ALGORITHM: &str = "ChaCha20 (rand_chacha 0.9 ChaCha20Rng::seed_from_u64)";

pub type SampleRng = ChaCha20Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// `n / d` with `|n| <= max_num` and `1 <= d <= max_den`.
pub fn random_rational(rng: &mut SampleRng, max_num: i64, max_den: i64) -> Rational {
    let n = rng.random_range(-max_num..=max_num);
    let d = rng.random_range(1..=max_den);
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rational_point(rng: &mut SampleRng) -> PhasePoint8<Rational> {
    PhasePoint8::from_array(std::array::from_fn(|_| random_rational(rng, 20, 12)))
}

/// Coordinates `n_i / d` with one shared `d <= 12` and `|n_i| <= 20`.
///
/// Height is small enough that degree-8 expressions in the generators stay
/// well inside `i128`.
pub fn small_rational_point(rng: &mut SampleRng) -> PhasePoint8<SmallRational> {
    let d = rng.random_range(1..=12i128);
    PhasePoint8::from_array(std::array::from_fn(|_| {
        SmallRational::new(rng.random_range(-20..=20i128), d)
    }))
}

/// `p` with its component along `grad_p Xi = (-q2, q1, -q4, q3)` removed.
/// Rational input stays rational.
pub fn project_off_xi<T: crate::Scalar>(z: &PhasePoint8<T>) -> PhasePoint8<T> {
    let q = &z.q;
    let g = [-q[1].clone(), q[0].clone(), -q[3].clone(), q[2].clone()];
    let gg = dot(&g, &g);
    if gg.is_zero() {
        return z.clone();
    }
    let c = dot(&z.p, &g) / gg;
    PhasePoint8::new(
        z.q.clone(),
        std::array::from_fn(|i| z.p[i].clone() - c.clone() * g[i].clone()),
    )
}

/// A random rational point on `Xi = 0` with `q != 0`.
pub fn rational_point_on_xi_zero(rng: &mut SampleRng) -> PhasePoint8<Rational> {
    loop {
        let z = project_off_xi(&rational_point(rng));
        if !z.q_norm_sq().is_zero() {
            return z;
        }
    }
}

pub fn gaussian_point(rng: &mut SampleRng) -> PhasePoint8<f64> {
    PhasePoint8::from_array(std::array::from_fn(|_| rng.sample(StandardNormal)))
}

/// A point of the collision slice `L = 0` of `H2 = 1, Xi = 0`: `p = mu q`
/// with `mu ~ N(0, 1)`, rescaled jointly to `H2 = 1`.
pub fn collinear_level_point(rng: &mut SampleRng) -> PhasePoint8<f64> {
    let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let mu: f64 = rng.sample(StandardNormal);
    let z = PhasePoint8::new(q, q.map(|v| mu * v));
    let s = (1.0 / h2(&z)).sqrt();
    z.scale(&s)
}
