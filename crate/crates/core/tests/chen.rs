use cyclic_chern::chen::{chain_map_check, restrict_to_m, rho_eval, tilde_rho_eval, Plot};
use cyclic_chern::chern::{chern_minus, trace_power};
use cyclic_chern::cyclic::{make_degenerate, DegenerateKind};
use cyclic_chern::corpus;
use cyclic_chern::random::{self, Shape};
use cyclic_chern::scalar::rat;
use cyclic_chern::{Scalar, VarSpace};

#[test]
fn winding_loop_integrates_to_i_tau() {
    let g = corpus::winding();
    let plot = Plot::single_loop(vec![1], vec![rat(0, 1)]).unwrap();
    let f = tilde_rho_eval(&trace_power(&g, 1), &plot).unwrap();
    assert_eq!(f.constant_term(), &Scalar::i() * &Scalar::tau_pow(1));
}

#[test]
fn rho_and_tilde_rho_agree_on_odd_chern() {
    for e in corpus::maps().into_iter().take(4) {
        for plot in corpus::plot_battery(e.map.d()) {
            for n in 1..=2 {
                let w = chern_minus(&e.map, n);
                assert_eq!(rho_eval(&w, &plot).unwrap(), tilde_rho_eval(&w, &plot).unwrap(), "{} n = {n}", e.name);
            }
        }
    }
}

#[test]
fn identity_plot_restricts() {
    let g = corpus::twisted_pair();
    let w = chern_minus(&g, 1);
    let plot = Plot::identity(2);
    assert_eq!(tilde_rho_eval(&w, &plot).unwrap().part(1), restrict_to_m(&w, 2).unwrap().part(1));
}

#[test]
fn chain_map_holds_on_random_pairs() {
    let sp = VarSpace::periodic(2);
    let mut rng = random::rng(21);
    let shape = Shape { max_slots: 2, ..Shape::default() };
    for m in [1, 2] {
        for _ in 0..4 {
            let w = random::chain(&mut rng, &sp, 2, &shape);
            let p = random::plot(&mut rng, m, 2, 1);
            assert!(chain_map_check(&w, &p).unwrap().holds());
        }
    }
}

#[test]
fn degenerate_generators_evaluate_to_zero() {
    let sp = VarSpace::periodic(1);
    let mut rng = random::rng(4);
    let shape = Shape::default();
    let factors: Vec<_> = (0..2).map(|_| random::factor(&mut rng, &sp, 1, &shape)).collect();
    let f = random::function(&mut rng, &sp, 1, &shape);
    for kind in [DegenerateKind::Slot0Form, DegenerateKind::Leibniz] {
        let w = make_degenerate(kind, &factors, 1, &f).unwrap();
        for plot in corpus::plot_battery(1) {
            assert!(tilde_rho_eval(&w, &plot).unwrap().is_zero());
        }
    }
}

#[test]
fn plot_target_must_match_the_chain() {
    let w = chern_minus(&corpus::winding(), 1);
    let plot = Plot::identity(2);
    assert!(tilde_rho_eval(&w, &plot).is_err());
}

#[test]
fn plots_reject_bad_shapes() {
    assert!(Plot::new(1, 2, vec![vec![1]], vec![0, 0], vec![rat(0, 1); 2]).is_err());
}
