use cyclic_chern::cyclic::{make_degenerate, BConvention, DegenerateKind};
use cyclic_chern::random::{self, Shape};
use cyclic_chern::{chain_equal, Chain, Form, Mono, Scalar, TTForm, TrigPoly, VarSpace};

fn sp() -> VarSpace {
    VarSpace::periodic(2)
}

fn chains(n: usize, seed: u64) -> Vec<Chain> {
    let mut rng = random::rng(seed);
    (0..n).map(|_| random::chain(&mut rng, &sp(), 2, &Shape::default())).collect()
}

fn wave(freq: i32) -> TTForm {
    let mut p = TrigPoly::zero(&sp());
    p.add_term(vec![Mono { freq, pow: 0 }, Mono::ONE], Scalar::one());
    TTForm::function(2, p)
}

#[test]
fn b_on_a_single_slot_is_d_t() {
    let f = wave(1);
    let w = Chain::tensor(Scalar::one(), vec![f.clone()]);
    assert!(chain_equal(&w.hochschild_b(), &Chain::tensor(Scalar::one(), vec![f.d_t()])));
}

#[test]
fn b_on_functions_is_the_commutator() {
    // [f|g] with f, g functions: b = [df|g] − [f|dg] − [fg] + [gf], the last two cancel
    let (f, g) = (wave(1), wave(-2));
    let w = Chain::tensor(Scalar::one(), vec![f.clone(), g.clone()]);
    let mut expect = Chain::tensor(Scalar::one(), vec![f.d_t(), g.clone()]);
    expect.push(Scalar::from_int(-1), vec![f, g.d_t()]);
    let got = w.hochschild_b();
    assert!(chain_equal(&got, &expect), "{got:?}");
}

#[test]
fn relations_hold_on_random_chains() {
    for w in chains(20, 11) {
        let b = w.hochschild_b();
        let big = w.connes_b();
        assert!(b.hochschild_b().is_zero());
        assert!(big.connes_b().is_zero());
        assert!(b.connes_b().add(&big.hochschild_b()).is_zero());
        assert!(chain_equal(&w.gamma().b_plus_b(), &w.b_plus_b().gamma().neg()));
    }
}

#[test]
fn the_other_b_convention_breaks_anticommutation() {
    let failing = chains(20, 11).iter().any(|w| {
        let b = w.hochschild_b();
        let big = w.connes_b_with(BConvention::Zero);
        !b.connes_b_with(BConvention::Zero).add(&big.hochschild_b()).is_zero()
    });
    assert!(failing);
}

#[test]
fn slots_are_linear() {
    let (f, g, h) = (wave(1), wave(2), TTForm::from_alpha(Form::dx(&sp(), 2, 0)));
    let lhs = Chain::tensor(Scalar::one(), vec![f.add(&g), h.clone()]);
    let mut rhs = Chain::tensor(Scalar::one(), vec![f, h.clone()]);
    rhs.push(Scalar::one(), vec![g, h]);
    assert!(chain_equal(&lhs, &rhs));
    assert!(lhs.sub(&rhs).is_zero());
}

#[test]
fn canonical_form_is_deterministic() {
    let w = &chains(1, 3)[0];
    assert_eq!(w.canonicalized(), w.canonicalized());
    assert_eq!(w.canonicalized().canonicalized(), w.canonicalized());
}

#[test]
fn degenerate_slot_must_be_in_range() {
    let f = wave(1);
    assert!(make_degenerate(DegenerateKind::Leibniz, std::slice::from_ref(&f), 0, &f).is_err());
    assert!(make_degenerate(DegenerateKind::Slot0Form, std::slice::from_ref(&f), 2, &f).is_err());
    assert!(make_degenerate(DegenerateKind::Slot0Form, std::slice::from_ref(&f), 1, &f).is_ok());
}
