use cyclic_chern::chen::Plot;
use cyclic_chern::random::{self, Shape};
use cyclic_chern::serialize::*;
use cyclic_chern::{chain_equal, Form, Mono, Scalar, TTForm, TrigPoly, VarKind, VarSpace};
use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use proptest::prelude::*;

fn scalar() -> impl Strategy<Value = Scalar> {
    prop::collection::vec((-2i32..=2, -9i64..=9, 1i64..=7, -9i64..=9, 1i64..=7), 0..4).prop_map(|terms| {
        Scalar::from_terms(terms.into_iter().map(|(k, a, b, c, d)| {
            (
                k,
                Complex::new(BigRational::new(a.into(), b.into()), BigRational::new(c.into(), d.into())),
            )
        }))
    })
}

fn sp() -> VarSpace {
    VarSpace::periodic(2)
}

fn shape() -> Shape {
    Shape::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn scalar_ring_laws(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        if let Some(inv) = a.inverse() {
            prop_assert!((&a * &inv).is_one());
        }
    }

    #[test]
    fn d_squares_to_zero(seed in any::<u64>(), k in 0usize..=2) {
        let mut rng = random::rng(seed);
        let w = random::form(&mut rng, &sp(), 2, k, &shape());
        prop_assert!(w.d().d().is_zero());
        let t = random::tt_form(&mut rng, &sp(), 2, k, &shape());
        prop_assert!(t.d_t().d_t().is_zero());
    }

    #[test]
    fn d_t_is_a_graded_derivation(seed in any::<u64>(), j in 0usize..=1, k in 0usize..=1) {
        let mut rng = random::rng(seed);
        let a = random::tt_form(&mut rng, &sp(), 2, j, &shape());
        let b = random::tt_form(&mut rng, &sp(), 2, k, &shape());
        let sign = Scalar::from_int(if j % 2 == 0 { 1 } else { -1 });
        let rhs = a.d_t().wedge(&b).add(&a.wedge(&b.d_t()).scale(&sign));
        prop_assert_eq!(a.wedge(&b).d_t(), rhs);
    }

    #[test]
    fn pullback_commutes_with_d(seed in any::<u64>(), k in 0usize..=2) {
        let mut rng = random::rng(seed);
        let w = random::form(&mut rng, &sp(), 2, k, &shape());
        let target = VarSpace::periodic(3);
        let lin: Vec<Vec<i64>> = (0..2).map(|_| (0..3).map(|_| rng_entry(&mut rng)).collect()).collect();
        let offset = vec![BigRational::new(1.into(), 4.into()), BigRational::new(BigInt::from(3), BigInt::from(4))];
        let pulled = w.pullback_affine(&target, 3, &lin, &offset).unwrap();
        prop_assert_eq!(w.d().pullback_affine(&target, 3, &lin, &offset).unwrap(), pulled.d());
    }

    #[test]
    fn antiderivative_inverts_derivative(coefs in prop::collection::vec((-3i32..=3, 0u32..=3, -5i64..=5), 1..5)) {
        let space = VarSpace::new(vec![VarKind::Periodic, VarKind::Interval]);
        let mut p = TrigPoly::zero(&space);
        for (freq, pow, c) in coefs {
            p.add_term(vec![Mono { freq: 1, pow: 0 }, Mono { freq, pow }], Scalar::from_int(c));
        }
        let q = p.antiderivative(1).unwrap();
        prop_assert_eq!(q.derivative(1), p);
        prop_assert!(q.eval_var(1, &BigRational::from_integer(0.into())).unwrap().is_zero());
    }

    #[test]
    fn gamma_is_an_involution(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let w = random::chain(&mut rng, &sp(), 2, &shape());
        prop_assert_eq!(w.gamma().gamma(), w);
    }
}

fn rng_entry<R: rand::Rng>(rng: &mut R) -> i64 {
    rng.gen_range(-2..=2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn scalars_round_trip(a in scalar()) {
        let text = to_text(&scalar_to_json(&a));
        prop_assert_eq!(scalar_from_json(&parse_text(&text).unwrap()).unwrap(), a);
    }

    #[test]
    fn chains_round_trip(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let w = random::chain(&mut rng, &sp(), 2, &shape());
        let text = to_text(&chain_to_json(&w));
        let back = chain_from_json(&parse_text(&text).unwrap()).unwrap();
        prop_assert!(chain_equal(&back, &w));
        prop_assert_eq!(back, w);
    }

    #[test]
    fn forms_round_trip(seed in any::<u64>(), j in 0usize..=2) {
        let mut rng = random::rng(seed);
        let space = VarSpace::new(vec![VarKind::Periodic, VarKind::Periodic, VarKind::Interval]);
        let mut w = random::tt_form(&mut rng, &sp(), 2, j, &shape());
        w = w.map_forms(|f| f.extend_space(&space));
        let back = form_from_json(&parse_text(&to_text(&form_to_json(&w))).unwrap()).unwrap();
        prop_assert_eq!(back, w);
    }

    #[test]
    fn plots_round_trip(seed in any::<u64>(), m in 0usize..=3, d in 1usize..=3) {
        let mut rng = random::rng(seed);
        let p: Plot = random::plot(&mut rng, m, d, 3);
        prop_assert_eq!(plot_from_json(&plot_to_json(&p)).unwrap(), p);
    }
}

#[test]
fn serialization_is_byte_stable() {
    let mut rng = random::rng(5);
    let w = random::chain(&mut rng, &sp(), 2, &shape());
    let once = to_text(&chain_to_json(&w));
    let twice = to_text(&chain_to_json(&chain_from_json(&parse_text(&once).unwrap()).unwrap()));
    assert_eq!(once, twice);
    let f = TTForm::from_alpha(Form::dx(&sp(), 2, 1));
    assert!(to_text(&form_to_json(&f)).contains("cyclic-chern/form"));
}
