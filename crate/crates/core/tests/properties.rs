use ksreg::cli::{parse_generator_json, parse_state};
use ksreg::invariants::{eval_generators, generators_from_pi, pi_from_generators, Generator};
use ksreg::ks_map::{ks, ks_fiber_action};
use ksreg::quadratic_poisson::{bracket, QuadraticForm};
use ksreg::scalar::rational;
use ksreg::trajectory::KeplerTrajectory;
use ksreg::{PhasePoint6, PhasePoint8, PiVector};
use proptest::prelude::*;

fn form() -> impl Strategy<Value = QuadraticForm> {
    prop::collection::vec((-5i64..=5, 0usize..8, 0usize..8), 1..5).prop_map(|terms| {
        terms.into_iter().fold(QuadraticForm::zero(), |acc, (c, i, j)| {
            acc.add(&QuadraticForm::monomial(rational(c, 1), i, j))
        })
    })
}

fn point() -> impl Strategy<Value = PhasePoint8<f64>> {
    prop::array::uniform8(-10.0f64..10.0).prop_map(PhasePoint8::from_array)
}

proptest! {
    #[test]
    fn bracket_is_antisymmetric(f in form(), g in form()) {
        prop_assert_eq!(bracket(&f, &g), bracket(&g, &f).scale(&rational(-1, 1)));
    }

    #[test]
    fn bracket_satisfies_jacobi(f in form(), g in form(), h in form()) {
        let sum = bracket(&f, &bracket(&g, &h))
            .add(&bracket(&g, &bracket(&h, &f)))
            .add(&bracket(&h, &bracket(&f, &g)));
        prop_assert!(sum.is_zero());
    }

    #[test]
    fn xi_is_central_and_h2_moves_only_u_v(g in 0usize..16) {
        let other = QuadraticForm::generator(Generator::from_index(g).unwrap());
        prop_assert!(bracket(&QuadraticForm::generator(Generator::Xi), &other).is_zero());
        let b = bracket(&QuadraticForm::generator(Generator::H2), &other);
        prop_assert_eq!(b.is_zero(), g < 8);
    }

    #[test]
    fn pi_generator_change_of_basis_round_trips(c in prop::array::uniform16(-50i64..50)) {
        let pi = PiVector(c.map(|v| rational(v, 7)));
        prop_assert_eq!(pi_from_generators(&generators_from_pi(&pi)), pi);
    }

    #[test]
    fn momentum_lies_in_wedge(z in point()) {
        let g = eval_generators(&z);
        prop_assert!(g.h2 >= 0.0);
        prop_assert!(g.xi.abs() <= g.h2 * (1.0 + 1e-12));
    }

    #[test]
    fn ks_is_fiber_invariant(z in point(), s in 0.0f64..6.3) {
        prop_assume!(z.q_norm_sq() > 1e-2);
        let (a, b) = (ks(&z).unwrap(), ks(&ks_fiber_action(&z, s)).unwrap());
        for (u, v) in a.to_array().iter().zip(b.to_array()) {
            prop_assert!((u - v).abs() <= 1e-9 * (1.0 + u.abs()));
        }
    }

    #[test]
    fn state_text_round_trips(z in point()) {
        let text: Vec<String> = z.to_array().iter().map(|v| format!("{v:e}")).collect();
        prop_assert_eq!(parse_state(&text.join(",")).unwrap(), z);
    }

    #[test]
    fn generator_json_round_trips(z in point()) {
        let g = eval_generators(&z);
        prop_assert_eq!(parse_generator_json(&serde_json::to_string(&g).unwrap()).unwrap(), g);
    }

    #[test]
    fn kepler_csv_round_trips(
        states in prop::collection::vec(prop::array::uniform6(-5.0f64..5.0), 1..20)
    ) {
        prop_assume!(states.iter().all(|s| s[..3].iter().map(|v| v * v).sum::<f64>() > 1e-4));
        let times = (0..states.len()).map(|i| i as f64 * 0.125).collect();
        let tr = KeplerTrajectory::new(times, states.into_iter().map(PhasePoint6::from_array).collect())
            .unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        prop_assert_eq!(KeplerTrajectory::read_csv(buf.as_slice(), 1e-12).unwrap(), tr);
    }
}
