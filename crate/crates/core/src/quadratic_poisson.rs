//! Exact Poisson algebra of quadratic polynomials on `(T R^4, omega)`.
//!
//! A quadratic polynomial `f(z) = 1/2 z^T A z` is carried by its symmetric
//! coefficient matrix `A` over [`Rational`]. The bracket of two such forms is
//! again quadratic, with matrix `A J B - B J A`, so every bracket relation
//! among the invariants is decided by exact matrix arithmetic. Nothing in this
//! module touches floating point.

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::invariants::{Generator, PhasePoint8, GEN_FROM_PI, PI_FROM_GEN, PI_TERMS};
use crate::scalar::{rational, Rational};

/// Symmetric 8x8 rational matrix `A` of `f(z) = 1/2 z^T A z`, `z = (q, p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticForm {
    coeffs: [[Rational; 8]; 8],
}

impl QuadraticForm {
    pub fn zero() -> Self {
        Self {
            coeffs: std::array::from_fn(|_| std::array::from_fn(|_| Rational::zero())),
        }
    }

    /// Builds a form from a symmetric matrix; rejects asymmetric input.
    pub fn from_matrix(coeffs: [[Rational; 8]; 8]) -> Result<Self> {
        for i in 0..8 {
            for j in 0..i {
                if coeffs[i][j] != coeffs[j][i] {
                    return Err(Error::Precondition(format!(
                        "coefficient matrix not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self { coeffs })
    }

    /// The form of the monomial `c * z_i * z_j`.
    pub fn monomial(c: Rational, i: usize, j: usize) -> Self {
        let mut f = Self::zero();
        if i == j {
            f.coeffs[i][i] = c * rational(2, 1);
        } else {
            f.coeffs[i][j] = c.clone();
            f.coeffs[j][i] = c;
        }
        f
    }

    /// `pi_k` for 1-based `k`.
    pub fn pi(k: usize) -> Self {
        PI_TERMS[k - 1]
            .iter()
            .fold(Self::zero(), |acc, &(c, i, j)| {
                acc.add(&Self::monomial(rational(c, 1), i, j))
            })
    }

    pub fn generator(g: Generator) -> Self {
        GEN_FROM_PI[g.index()]
            .iter()
            .fold(Self::zero(), |acc, &(k, c)| {
                acc.add(&Self::pi(k + 1).scale(&rational(c, 2)))
            })
    }

    /// `sum c_g * g` over the sixteen generators.
    pub fn from_generator_coords(coords: &[Rational; 16]) -> Self {
        Generator::ALL
            .iter()
            .zip(coords)
            .filter(|(_, c)| !c.is_zero())
            .fold(Self::zero(), |acc, (&g, c)| acc.add(&Self::generator(g).scale(c)))
    }

    pub fn matrix(&self) -> &[[Rational; 8]; 8] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().flatten().all(Zero::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            coeffs: std::array::from_fn(|i| {
                std::array::from_fn(|j| &self.coeffs[i][j] + &other.coeffs[i][j])
            }),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            coeffs: std::array::from_fn(|i| std::array::from_fn(|j| &self.coeffs[i][j] * c)),
        }
    }

    /// `1/2 z^T A z`.
    pub fn eval(&self, z: &PhasePoint8<Rational>) -> Rational {
        let z = z.to_array();
        let mut acc = Rational::zero();
        for i in 0..8 {
            for j in 0..8 {
                if !self.coeffs[i][j].is_zero() {
                    acc += &self.coeffs[i][j] * &z[i] * &z[j];
                }
            }
        }
        acc / rational(2, 1)
    }

    /// Gradient `A z`.
    pub fn gradient(&self, z: &PhasePoint8<Rational>) -> [Rational; 8] {
        let z = z.to_array();
        std::array::from_fn(|i| {
            (0..8).fold(Rational::zero(), |acc, j| acc + &self.coeffs[i][j] * &z[j])
        })
    }

    /// Coefficient of the monomial `z_i z_j` in the polynomial.
    fn monomial_coeff(&self, i: usize, j: usize) -> Rational {
        if i == j {
            &self.coeffs[i][i] / rational(2, 1)
        } else {
            self.coeffs[i][j].clone()
        }
    }

    /// Coordinates in the `pi` basis, or an error if the form is not
    /// `Xi`-invariant (not in their span).
    pub fn pi_coords(&self) -> Result<[Rational; 16]> {
        let coords: [Rational; 16] = std::array::from_fn(|k| {
            let (c, i, j) = PI_TERMS[k][0];
            self.monomial_coeff(i, j) / rational(c, 1)
        });
        let rebuilt = coords
            .iter()
            .enumerate()
            .fold(Self::zero(), |acc, (k, a)| acc.add(&Self::pi(k + 1).scale(a)));
        if rebuilt == *self {
            Ok(coords)
        } else {
            Err(Error::NotInGeneratorSpan)
        }
    }

    /// Coordinates in the generator basis `(K, L, H2, Xi; U, V)`.
    pub fn generator_coords(&self) -> Result<[Rational; 16]> {
        let a = self.pi_coords()?;
        // f = sum_k a_k pi_k and pi_k = sum_j M_kj g_j, so b = M^T a.
        let mut b: [Rational; 16] = std::array::from_fn(|_| Rational::zero());
        for (k, row) in PI_FROM_GEN.iter().enumerate() {
            for &(j, c) in row.iter() {
                b[j] += &a[k] * rational(c, 2);
            }
        }
        Ok(b)
    }
}

/// `{f, g} = sum_i (df/dq_i dg/dp_i - df/dp_i dg/dq_i)`, before sign calibration.
fn canonical_bracket(f: &QuadraticForm, g: &QuadraticForm) -> QuadraticForm {
    let (a, b) = (&f.coeffs, &g.coeffs);
    // (A J B)_{ij} = sum_{k<4} A_ik B_{k+4, j} - sum_{k<4} A_{i, k+4} B_kj
    let ajb = |a: &[[Rational; 8]; 8], b: &[[Rational; 8]; 8], i: usize, j: usize| {
        let mut acc = Rational::zero();
        for k in 0..4 {
            if !a[i][k].is_zero() && !b[k + 4][j].is_zero() {
                acc += &a[i][k] * &b[k + 4][j];
            }
            if !a[i][k + 4].is_zero() && !b[k][j].is_zero() {
                acc -= &a[i][k + 4] * &b[k][j];
            }
        }
        acc
    };
    QuadraticForm {
        coeffs: std::array::from_fn(|i| std::array::from_fn(|j| ajb(a, b, i, j) - ajb(b, a, i, j))),
    }
}

/// Global sign applied to the canonical bracket, fixed once so that
/// `{K1, K2} = +2 L3`.
pub fn bracket_sign() -> i64 {
    static SIGN: OnceLock<i64> = OnceLock::new();
    *SIGN.get_or_init(|| {
        let k1k2 = canonical_bracket(
            &QuadraticForm::generator(Generator::K1),
            &QuadraticForm::generator(Generator::K2),
        );
        let two_l3 = QuadraticForm::generator(Generator::L3).scale(&rational(2, 1));
        if k1k2 == two_l3 {
            1
        } else if k1k2 == two_l3.scale(&rational(-1, 1)) {
            -1
        } else {
            panic!("{{K1, K2}} is not +-2 L3; generator tables are inconsistent")
        }
    })
}

/// Poisson bracket of two quadratic forms.
pub fn bracket(f: &QuadraticForm, g: &QuadraticForm) -> QuadraticForm {
    let raw = canonical_bracket(f, g);
    if bracket_sign() == 1 {
        raw
    } else {
        raw.scale(&rational(-1, 1))
    }
}

/// Renders generator coordinates as e.g. `2*L3 - K1`; `0` when empty.
pub fn format_combination(coords: &[Rational; 16]) -> String {
    format_terms(Generator::ALL.iter().map(|g| g.name()).zip(coords))
}

fn format_terms<'a>(terms: impl Iterator<Item = (&'a str, &'a Rational)>) -> String {
    let mut out = String::new();
    for (name, c) in terms {
        if c.is_zero() {
            continue;
        }
        let sign = if c.is_negative() { "-" } else { "+" };
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            let _ = write!(out, " {sign} ");
        }
        let mag = c.abs();
        if mag.is_one() {
            out.push_str(name);
        } else {
            let _ = write!(out, "{mag}*{name}");
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// All 256 brackets `{a, b}` of generator pairs.
#[derive(Clone, Debug)]
pub struct BracketTable {
    entries: BTreeMap<(Generator, Generator), QuadraticForm>,
}

impl BracketTable {
    pub fn compute() -> Self {
        let forms: Vec<QuadraticForm> =
            Generator::ALL.iter().map(|&g| QuadraticForm::generator(g)).collect();
        let mut entries = BTreeMap::new();
        for a in Generator::ALL {
            for b in Generator::ALL {
                let form = if a == b {
                    QuadraticForm::zero()
                } else if let Some(prev) = entries.get(&(b, a)) {
                    QuadraticForm::scale(prev, &rational(-1, 1))
                } else {
                    bracket(&forms[a.index()], &forms[b.index()])
                };
                entries.insert((a, b), form);
            }
        }
        Self { entries }
    }

    pub fn entry(&self, a: Generator, b: Generator) -> &QuadraticForm {
        &self.entries[&(a, b)]
    }

    /// `{a, b}` expressed in the generator basis.
    pub fn coords(&self, a: Generator, b: Generator) -> Result<[Rational; 16]> {
        self.entry(a, b).generator_coords()
    }
}

/// One checked bracket identity, serialized as `{pair, expected, computed, match}`.
#[derive(Clone, Debug, Serialize)]
pub struct RelationCheck {
    pub pair: String,
    pub expected: String,
    pub computed: String,
    #[serde(rename = "match")]
    pub matches: bool,
}

/// Scalar `c` in `{a_i, a_j} = c * eps_ijk a_k`, found by the oracle and
/// compared with the value claimed for the reduced `(xi, eta)` brackets.
#[derive(Clone, Debug, Serialize)]
pub struct StructureFactor {
    pub relation: String,
    pub computed: Option<String>,
    pub claimed: String,
    pub matches_claim: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct So4Report {
    pub sign: i64,
    pub checks: Vec<RelationCheck>,
    pub reduced_checks: Vec<RelationCheck>,
    pub factors: Vec<StructureFactor>,
}

impl So4Report {
    /// True when every `{K, L}` identity holds exactly.
    pub fn so4_closes(&self) -> bool {
        self.checks.iter().all(|c| c.matches)
    }
}

fn levi_civita(i: usize, j: usize, k: usize) -> i64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

const K: [Generator; 3] = [Generator::K1, Generator::K2, Generator::K3];
const L: [Generator; 3] = [Generator::L1, Generator::L2, Generator::L3];

fn zeros16() -> [Rational; 16] {
    std::array::from_fn(|_| Rational::zero())
}

/// `2 sum_k eps_ijk target_k` in generator coordinates.
fn expected_so4(i: usize, j: usize, target: &[Generator; 3]) -> [Rational; 16] {
    let mut e = zeros16();
    for (k, g) in target.iter().enumerate() {
        e[g.index()] = rational(2 * levi_civita(i, j, k), 1);
    }
    e
}

/// A vector in `span{K, L}` rewritten in the `(xi, eta)` basis:
/// `K = xi + eta`, `L = xi - eta`.
fn to_xi_eta(coords: &[Rational; 16]) -> Option<([Rational; 3], [Rational; 3])> {
    let outside_kl = Generator::ALL
        .iter()
        .filter(|g| !K.contains(g) && !L.contains(g))
        .any(|g| !coords[g.index()].is_zero());
    if outside_kl {
        return None;
    }
    let ck: [Rational; 3] = std::array::from_fn(|k| coords[K[k].index()].clone());
    let cl: [Rational; 3] = std::array::from_fn(|k| coords[L[k].index()].clone());
    Some((
        std::array::from_fn(|k| &ck[k] + &cl[k]),
        std::array::from_fn(|k| &ck[k] - &cl[k]),
    ))
}

fn format_xi_eta(xi: &[Rational; 3], eta: &[Rational; 3]) -> String {
    let names = ["xi1", "xi2", "xi3", "eta1", "eta2", "eta3"];
    let vals: Vec<&Rational> = xi.iter().chain(eta.iter()).collect();
    format_terms(names.iter().copied().zip(vals))
}

/// Checks the so(4) relations `{Ki,Kj} = 2 eps L`, `{Li,Lj} = 2 eps L`,
/// `{Ki,Lj} = 2 eps K` exactly, and measures the structure constants of the
/// reduced `(xi, eta)` coordinates.
pub fn verify_so4_relations() -> Result<So4Report> {
    let table = BracketTable::compute();
    let mut checks = Vec::new();
    let families: [(&[Generator; 3], &[Generator; 3], &[Generator; 3]); 3] =
        [(&K, &K, &L), (&L, &L, &L), (&K, &L, &K)];
    for (left, right, target) in families {
        for i in 0..3 {
            for j in 0..3 {
                let computed = table.coords(left[i], right[j])?;
                let expected = expected_so4(i, j, target);
                checks.push(RelationCheck {
                    pair: format!("{{{}, {}}}", left[i], right[j]),
                    expected: format_combination(&expected),
                    computed: format_combination(&computed),
                    matches: computed == expected,
                });
            }
        }
    }

    let mut reduced_checks = Vec::new();
    let mut factors = Vec::new();
    for family in [ReducedFamily::XiXi, ReducedFamily::EtaEta, ReducedFamily::XiEta] {
        let (checks, factor) = reduced_family(&table, family)?;
        reduced_checks.extend(checks);
        factors.push(factor);
    }

    Ok(So4Report {
        sign: bracket_sign(),
        checks,
        reduced_checks,
        factors,
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ReducedFamily {
    XiXi,
    EtaEta,
    XiEta,
}

impl ReducedFamily {
    /// Signs `(s, t)` of `{K_i + s L_i, K_j + t L_j}`.
    fn signs(self) -> (i64, i64) {
        match self {
            ReducedFamily::XiXi => (1, 1),
            ReducedFamily::EtaEta => (-1, -1),
            ReducedFamily::XiEta => (1, -1),
        }
    }

    fn names(self) -> (&'static str, &'static str) {
        match self {
            ReducedFamily::XiXi => ("xi", "xi"),
            ReducedFamily::EtaEta => ("eta", "eta"),
            ReducedFamily::XiEta => ("xi", "eta"),
        }
    }

    /// Structure constant claimed in the published reduced relations.
    fn claimed(self) -> i64 {
        match self {
            ReducedFamily::XiXi => 1,
            ReducedFamily::EtaEta => -1,
            ReducedFamily::XiEta => 0,
        }
    }
}

fn reduced_family(
    table: &BracketTable,
    family: ReducedFamily,
) -> Result<(Vec<RelationCheck>, StructureFactor)> {
    let (s, t) = family.signs();
    let (a, b) = family.names();
    let claimed = family.claimed();
    let quarter = rational(1, 4);
    let mut checks = Vec::new();
    let mut found: Option<Rational> = None;
    let mut consistent = true;

    for i in 0..3 {
        for j in 0..3 {
            let kk = table.coords(K[i], K[j])?;
            let kl = table.coords(K[i], L[j])?;
            let lk = table.coords(L[i], K[j])?;
            let ll = table.coords(L[i], L[j])?;
            let coords: [Rational; 16] = std::array::from_fn(|n| {
                (&kk[n] + &kl[n] * rational(t, 1) + &lk[n] * rational(s, 1)
                    + &ll[n] * rational(s * t, 1))
                    * &quarter
            });
            let (cxi, ceta) = to_xi_eta(&coords).ok_or(Error::NotInGeneratorSpan)?;

            let claim: [Rational; 3] =
                std::array::from_fn(|k| rational(claimed * levi_civita(i, j, k), 1));
            let zero: [Rational; 3] = std::array::from_fn(|_| Rational::zero());
            let (claim_xi, claim_eta) = match family {
                ReducedFamily::XiXi => (claim, zero),
                ReducedFamily::EtaEta => (zero, claim),
                ReducedFamily::XiEta => (zero.clone(), zero),
            };
            checks.push(RelationCheck {
                pair: format!("{{{a}{}, {b}{}}}", i + 1, j + 1),
                expected: format_xi_eta(&claim_xi, &claim_eta),
                computed: format_xi_eta(&cxi, &ceta),
                matches: cxi == claim_xi && ceta == claim_eta,
            });

            let (own, other) = match family {
                ReducedFamily::EtaEta => (&ceta, &cxi),
                _ => (&cxi, &ceta),
            };
            if family == ReducedFamily::XiEta {
                consistent &= own.iter().chain(other.iter()).all(Zero::is_zero);
                continue;
            }
            consistent &= other.iter().all(Zero::is_zero);
            for k in 0..3 {
                let eps = levi_civita(i, j, k);
                if eps == 0 {
                    consistent &= own[k].is_zero();
                    continue;
                }
                let c = &own[k] / rational(eps, 1);
                match &found {
                    None => found = Some(c),
                    Some(prev) => consistent &= *prev == c,
                }
            }
        }
    }

    let computed = match (family, consistent) {
        (_, false) => None,
        (ReducedFamily::XiEta, true) => Some("0".to_string()),
        (_, true) => found.map(|c| c.to_string()),
    };
    let claimed = claimed.to_string();
    Ok((
        checks,
        StructureFactor {
            relation: format!("{{{a},{b}}}"),
            matches_claim: computed.as_deref() == Some(claimed.as_str()),
            computed,
            claimed,
        },
    ))
}

/// `Y_G` on the orbit space: the derivation `c -> {c, G}` for each generator
/// coordinate `c`, expressed in the generator basis.
#[derive(Clone, Debug)]
pub struct InducedField {
    pub generator: Generator,
    /// `components[c]` = coefficients of `Y_G(c)`.
    pub components: [[Rational; 16]; 16],
}

impl InducedField {
    pub fn is_zero(&self) -> bool {
        self.components.iter().flatten().all(Zero::is_zero)
    }

    pub fn component(&self, target: Generator) -> &[Rational; 16] {
        &self.components[target.index()]
    }

    /// e.g. `-2*L3 d/dK2 + 2*L2 d/dK3`.
    pub fn render(&self) -> String {
        let parts: Vec<String> = Generator::ALL
            .iter()
            .filter(|t| self.component(**t).iter().any(|c| !c.is_zero()))
            .map(|t| format!("({}) d/d{}", format_combination(self.component(*t)), t))
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

pub fn induced_vector_field(g: Generator) -> Result<InducedField> {
    let gf = QuadraticForm::generator(g);
    let mut components: [[Rational; 16]; 16] = std::array::from_fn(|_| zeros16());
    for c in Generator::ALL {
        components[c.index()] = bracket(&QuadraticForm::generator(c), &gf).generator_coords()?;
    }
    Ok(InducedField {
        generator: g,
        components,
    })
}

/// The published list of induced vector fields, transcribed verbatim as
/// `(coefficient, coefficient variable, d/d target)` terms.
pub const PUBLISHED_TABLE: [(Generator, &[(i64, Generator, Generator)]); 16] = {
    use Generator::*;
    [
        (K1, &[(-2, L3, K2), (2, L2, K3), (-2, K3, L2), (2, K2, L3), (-2, U2, U1), (2, U2, U2), (-2, V2, V1), (2, V1, V2)]),
        (K2, &[(2, L3, K1), (-2, L1, K3), (2, K3, L1), (-2, K1, L3), (-2, U3, U1), (2, U1, U3), (-2, V3, V1), (2, V1, V3)]),
        (K3, &[(-2, L2, K1), (2, L1, K2), (-2, K2, L1), (2, K1, L2), (-2, U4, U1), (2, U1, U4), (-2, V4, V1), (2, V1, V4)]),
        (L1, &[(-2, K3, K2), (2, K2, K3), (-2, L3, L2), (2, L2, L3), (-2, U4, U3), (2, U3, U4), (-2, V4, V3), (2, V3, V4)]),
        (L2, &[(2, K3, K1), (-2, K1, K3), (2, L3, L1), (-2, L1, L3), (2, U4, U2), (-2, U2, U4), (2, V4, V2), (-2, V2, V4)]),
        (L3, &[(-2, K2, K1), (2, K1, K2), (-2, L2, L1), (2, L1, L2), (-2, U3, U2), (2, U2, U3), (-2, V3, V2), (2, V2, V3)]),
        (H2, &[(2, V1, U1), (2, V2, U2), (2, V3, U3), (2, V4, U4), (-2, U1, V1), (-2, U2, V2), (-2, U3, V3), (-2, U4, V4)]),
        (Xi, &[]),
        (U1, &[(2, U2, K1), (2, U3, K2), (2, U4, K3), (-2, V1, H2), (2, K1, U2), (2, K2, U3), (2, K3, U4), (-2, H2, V1)]),
        (U2, &[(-2, U1, K1), (-2, U4, L2), (2, U3, L3), (-2, V2, H2), (-2, K2, U1), (2, L1, U3), (-2, L2, U4), (-2, H2, V2)]),
        (U3, &[(-2, U1, K2), (2, U4, L1), (2, U2, L3), (-2, V3, H2), (-2, K2, U1), (-2, L1, U2), (-2, V3, U4), (-2, H2, V4)]),
        (U4, &[(-2, U1, K1), (-2, U3, L1), (2, U2, L2), (-2, V4, H2), (-2, K3, U1), (2, L2, U2), (2, V3, U3), (-2, H2, V4)]),
        (V1, &[(2, V2, K1), (-2, V4, L2), (2, V3, L3), (2, U2, H2), (2, H2, U2), (2, K1, V2), (2, K2, V3), (2, U4, V4)]),
        (V2, &[(-2, V1, K1), (-2, V4, L2), (2, V3, L3), (2, U2, H2), (-2, H2, U2), (-2, K1, V1), (2, L3, V3), (-2, L2, V4)]),
        (V3, &[(-2, V1, K2), (2, V4, L1), (-2, V2, L3), (2, U3, H2), (2, H2, U3), (-2, K2, V1), (-2, L3, V3), (2, L1, V4)]),
        (V4, &[(-2, V1, K3), (-2, V3, L1), (2, V2, L2), (2, U4, H2), (2, H2, U4), (-2, U4, V1), (2, L2, V2), (-2, L1, V3)]),
    ]
};

fn published_field(g: Generator) -> [[Rational; 16]; 16] {
    let mut comps: [[Rational; 16]; 16] = std::array::from_fn(|_| zeros16());
    let terms = PUBLISHED_TABLE
        .iter()
        .find(|(h, _)| *h == g)
        .map(|(_, t)| *t)
        .unwrap_or(&[]);
    for &(c, var, target) in terms {
        comps[target.index()][var.index()] += rational(c, 1);
    }
    comps
}

/// One disagreement between the regenerated and the published field.
#[derive(Clone, Debug, Serialize)]
pub struct TableDiscrepancy {
    pub field: String,
    pub target: String,
    pub published: String,
    pub computed: String,
}

/// The regenerated table of induced fields plus its diff against the
/// published transcription.
#[derive(Clone, Debug, Serialize)]
pub struct RegeneratedTable {
    pub fields: Vec<(String, String)>,
    pub discrepancies: Vec<TableDiscrepancy>,
}

pub fn regenerate_table() -> Result<RegeneratedTable> {
    let mut fields = Vec::new();
    let mut discrepancies = Vec::new();
    for g in Generator::ALL {
        let field = induced_vector_field(g)?;
        let published = published_field(g);
        for t in Generator::ALL {
            let ours = field.component(t);
            let theirs = &published[t.index()];
            if ours != theirs {
                discrepancies.push(TableDiscrepancy {
                    field: format!("Y_{g}"),
                    target: format!("d/d{t}"),
                    published: format_combination(theirs),
                    computed: format_combination(ours),
                });
            }
        }
        fields.push((format!("Y_{g}"), field.render()));
    }
    Ok(RegeneratedTable {
        fields,
        discrepancies,
    })
}

/// Pointwise bracket `grad f^T J grad g` at `z`, the independent route used to
/// check [`bracket`] without going through matrix products.
pub fn pointwise_bracket(f: &QuadraticForm, g: &QuadraticForm, z: &PhasePoint8<Rational>) -> Rational {
    let (df, dg) = (f.gradient(z), g.gradient(z));
    let raw = (0..4).fold(Rational::zero(), |acc, i| {
        acc + &df[i] * &dg[i + 4] - &df[i + 4] * &dg[i]
    });
    raw * rational(bracket_sign(), 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Generator::*;

    fn gen(g: Generator) -> QuadraticForm {
        QuadraticForm::generator(g)
    }

    #[test]
    fn canonical_sign_needs_no_flip() {
        assert_eq!(bracket_sign(), 1);
        let k1k2 = bracket(&gen(K1), &gen(K2));
        assert_eq!(k1k2, gen(L3).scale(&rational(2, 1)));
    }

    #[test]
    fn h2_xi_commute() {
        assert!(bracket(&gen(H2), &gen(Xi)).is_zero());
    }

    #[test]
    fn pi1_pi3_bracket_by_hand() {
        // {q1^2 + q2^2, p1^2 + p2^2} = 2q1*2p1 + 2q2*2p2 = 4 (q1 p1 + q2 p2)
        let b = bracket(&QuadraticForm::pi(1), &QuadraticForm::pi(3));
        assert_eq!(b, QuadraticForm::pi(5).scale(&rational(4, 1)));
    }

    #[test]
    fn xi_is_central_among_invariants() {
        for k in 1..=16 {
            assert!(bracket(&gen(Xi), &QuadraticForm::pi(k)).is_zero(), "pi_{k}");
        }
    }

    #[test]
    fn so4_examples() {
        let table = BracketTable::compute();
        let k1l2 = table.coords(K1, L2).unwrap();
        let mut expected = zeros16();
        expected[K3.index()] = rational(2, 1);
        assert_eq!(k1l2, expected);
        assert!(table.entry(K1, K1).is_zero());
    }

    #[test]
    fn so4_report_closes_and_measures_reduced_factors() {
        let report = verify_so4_relations().unwrap();
        assert!(report.so4_closes(), "{:#?}", report.checks);
        assert_eq!(report.checks.len(), 27);
        let factor = |rel: &str| {
            report
                .factors
                .iter()
                .find(|f| f.relation == rel)
                .unwrap()
                .computed
                .clone()
        };
        assert_eq!(factor("{xi,xi}").as_deref(), Some("2"));
        assert_eq!(factor("{eta,eta}").as_deref(), Some("-2"));
        assert_eq!(factor("{xi,eta}").as_deref(), Some("0"));
        // {xi1, eta2} = 0
        let x1e2 = report
            .reduced_checks
            .iter()
            .find(|c| c.pair == "{xi1, eta2}")
            .unwrap();
        assert_eq!(x1e2.computed, "0");
        assert!(x1e2.matches);
    }

    #[test]
    fn induced_field_examples() {
        assert!(induced_vector_field(Xi).unwrap().is_zero());

        let yh = induced_vector_field(H2).unwrap();
        for i in 0..4 {
            let (u, v) = (Generator::ALL[8 + i], Generator::ALL[12 + i]);
            let mut on_u = zeros16();
            on_u[v.index()] = rational(2, 1);
            let mut on_v = zeros16();
            on_v[u.index()] = rational(-2, 1);
            assert_eq!(yh.component(u), &on_u);
            assert_eq!(yh.component(v), &on_v);
        }
        for t in [K1, K2, K3, L1, L2, L3, H2, Xi] {
            assert!(yh.component(t).iter().all(Zero::is_zero));
        }

        let yk1 = induced_vector_field(K1).unwrap();
        let mut on_l2 = zeros16();
        on_l2[K3.index()] = rational(-2, 1);
        assert_eq!(yk1.component(L2), &on_l2);
    }

    #[test]
    fn published_table_disagrees_where_expected() {
        let table = regenerate_table().unwrap();
        let has = |field: &str, target: &str| {
            table
                .discrepancies
                .iter()
                .any(|d| d.field == field && d.target == target)
        };
        // "+2U2 d/dU2" in Y_K1 should read "+2U1 d/dU2".
        assert!(has("Y_K1", "d/dU2"));
        // Y_H2 and Y_Xi are transcribed correctly.
        assert!(!table.discrepancies.iter().any(|d| d.field == "Y_H2" || d.field == "Y_Xi"));
        assert_eq!(table.fields.len(), 16);
    }

    #[test]
    fn non_invariant_form_is_rejected() {
        let q1p3 = QuadraticForm::monomial(rational(1, 1), 0, 6);
        assert!(matches!(q1p3.generator_coords(), Err(Error::NotInGeneratorSpan)));
        assert!(QuadraticForm::from_matrix({
            let mut m = QuadraticForm::zero().coeffs;
            m[0][1] = rational(1, 1);
            m
        })
        .is_err());
    }

    #[test]
    fn generator_coords_round_trip() {
        for g in Generator::ALL {
            let coords = gen(g).generator_coords().unwrap();
            let mut e = zeros16();
            e[g.index()] = rational(1, 1);
            assert_eq!(coords, e, "{g}");
        }
    }

    #[test]
    fn format_combination_renders_signs() {
        let mut c = zeros16();
        c[L3.index()] = rational(2, 1);
        c[K1.index()] = rational(-1, 1);
        assert_eq!(format_combination(&c), "-K1 + 2*L3");
        assert_eq!(format_combination(&zeros16()), "0");
    }
}
