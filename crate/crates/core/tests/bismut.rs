use cyclic_chern::bismut::{
    bch_minus_iterated, bch_minus_total, bch_plus_eval, bch_vs_rho_compare, parallel_transport, is_unitary,
    sample_points, BchOptions,
};
use cyclic_chern::chen::Plot;
use cyclic_chern::chern::ConnectionForm;
use cyclic_chern::corpus;
use cyclic_chern::scalar::rat;

#[test]
fn winding_on_a_constant_plot_matches_exactly() {
    let g = corpus::winding();
    let plot = corpus::bch_plots(1).remove(0);
    let opts = BchOptions::default();
    for x in sample_points(plot.m()).into_iter().take(2) {
        for c in bch_vs_rho_compare(&g, &plot, &x, 1, &opts).unwrap() {
            assert!(c.passes(1e-9), "deviation {}", c.max_deviation());
        }
    }
}

#[test]
fn the_two_pipelines_agree_on_a_moving_plot() {
    let g = corpus::twisted_pair();
    let plot = corpus::bch_plots(2).remove(3);
    let opts = BchOptions::default();
    let x = [0.3];
    let total = bch_minus_total(&g, &plot, &x, &opts).unwrap();
    let iter = bch_minus_iterated(&g, &plot, &x, 1, &opts).unwrap();
    assert!(total.part(1).deviation(&iter) < 1e-6);
}

#[test]
fn transport_stays_unitary() {
    let g = corpus::twisted_pair();
    let plot = Plot::single_loop(vec![1, 1], vec![rat(1, 4), rat(0, 1)]).unwrap();
    let t = parallel_transport(&g, 0.5, &plot, &[], 1.0, 1e-3).unwrap();
    assert!(is_unitary(&t, 1e-10));
}

#[test]
fn zero_connection_has_trivial_holonomy() {
    let c = ConnectionForm::zero(3, 1);
    let plot = Plot::single_loop(vec![1], vec![rat(0, 1)]).unwrap();
    let v = bch_plus_eval(&c, &plot, &[], 0, &BchOptions::default()).unwrap();
    assert!((v.get(0).re - 3.0).abs() < 1e-12 && v.get(0).im.abs() < 1e-12);
}

#[test]
fn plot_dimension_is_checked() {
    let g = corpus::winding();
    let plot = Plot::identity(2);
    assert!(bch_minus_total(&g, &plot, &[0.0, 0.0], &BchOptions::default()).is_err());
}
