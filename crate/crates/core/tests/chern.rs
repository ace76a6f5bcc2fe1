use cyclic_chern::chen::restrict_to_m;
use cyclic_chern::chern::{
    bchern_identity_check, chern_minus, chern_plus, direct_sum_chern, even_chern_of_interpolation, maurer_cartan_holds,
    periodicity_check, trace_degenerate_witness, trace_power, ConnectionForm, UnitaryMap,
};
use cyclic_chern::corpus;
use cyclic_chern::{chain_equal, Form, Scalar, VarSpace};

fn i_tau() -> Scalar {
    &Scalar::i() * &Scalar::tau_pow(1)
}

#[test]
fn winding_restricts_to_i_tau_dx() {
    let g = corpus::winding();
    let got = restrict_to_m(&chern_minus(&g, 1), 1).unwrap();
    assert_eq!(got, Form::dx(&VarSpace::periodic(1), 1, 0).scale(&i_tau()));
}

#[test]
fn character_restricts_to_its_frequencies() {
    let g = UnitaryMap::character(vec![2, -1]);
    let sp = VarSpace::periodic(2);
    let expect = Form::dx(&sp, 2, 0).scale(&Scalar::from_int(2)).sub(&Form::dx(&sp, 2, 1)).scale(&i_tau());
    assert_eq!(restrict_to_m(&chern_minus(&g, 1), 2).unwrap(), expect);
}

#[test]
fn constant_maps_have_trivial_odd_chern() {
    let g = corpus::map_by_name("constant").unwrap();
    for n in 1..=3 {
        assert!(chern_minus(&g, n).is_zero(), "n = {n}");
    }
    assert!(chern_minus(&UnitaryMap::identity(2, 2), 2).is_zero());
}

#[test]
fn boundary_of_odd_chern_is_the_trace_power() {
    for e in corpus::maps() {
        for n in 1..=2 {
            assert!(bchern_identity_check(&e.map, n), "{} n = {n}", e.name);
            assert!(chern_minus(&e.map, n).connes_b().is_zero(), "{} n = {n}", e.name);
        }
    }
}

#[test]
fn witness_with_remainder_reproduces_the_trace() {
    let g = corpus::twisted_pair();
    for n in 1..=2 {
        let w = trace_degenerate_witness(&g, n).unwrap();
        assert!(chain_equal(&w.total().unwrap(), &trace_power(&g, n)));
    }
}

#[test]
fn maurer_cartan_equation_holds_on_the_corpus() {
    for e in corpus::maps() {
        assert!(maurer_cartan_holds(&e.map), "{}", e.name);
    }
    assert!(maurer_cartan_holds(&corpus::quintic()));
}

#[test]
fn direct_sums_add() {
    let g = corpus::winding();
    let h = corpus::map_by_name("constant").unwrap();
    assert!(direct_sum_chern(&g, &h, 3).unwrap());
}

#[test]
fn odd_chern_is_the_fiber_integral_of_even_chern() {
    for e in corpus::maps().into_iter().take(4) {
        for n in 1..=2 {
            assert!(periodicity_check(&e.map, n).unwrap(), "{} n = {n}", e.name);
        }
    }
}

#[test]
fn even_chern_starts_with_the_rank() {
    let g = corpus::map_by_name("constant").unwrap();
    let c0 = even_chern_of_interpolation(&g, 0);
    let rank = c0.terms().iter().fold(Scalar::zero(), |acc, t| &acc + &t.coef);
    assert_eq!(rank, Scalar::from_int(2));
}

#[test]
fn flat_zero_connection_has_only_rank() {
    let c = ConnectionForm::zero(3, 1);
    assert!(chern_plus(&c, 1).is_zero());
    assert!(!chern_plus(&c, 0).is_zero());
}
