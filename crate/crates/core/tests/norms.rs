use cyclic_chern::corpus;
use cyclic_chern::norms::{
    chern_growth_constant, growth_bound_check, growth_series, kappa_upper, per_order_growth, tensor_seminorm_upper,
    SeminormSpec,
};
use cyclic_chern::chern::UnitaryMap;
use cyclic_chern::{Chain, VarSpace};

#[test]
fn zero_chain_has_zero_seminorm() {
    let eps = SeminormSpec::new(1.0);
    let w = Chain::zero(&VarSpace::periodic(1), 1);
    assert_eq!(tensor_seminorm_upper(&w, &eps), 0.0);
    assert_eq!(kappa_upper(&w, &eps, 3), 0.0);
}

#[test]
fn growth_series_tail_majorizes_the_rest() {
    for x in [0.5, 2.0, 9.0] {
        let (partial, tail) = growth_series(x, 10);
        let (longer, _) = growth_series(x, 200);
        assert!(longer - partial <= tail * (1.0 + 1e-12), "x = {x}");
    }
}

#[test]
fn per_order_bound_holds_for_small_maps() {
    let eps = SeminormSpec::new(1.0);
    for name in ["winding", "winding2", "twisted-pair"] {
        let g = corpus::map_by_name(name).unwrap();
        for (n, (lhs, rhs)) in per_order_growth(&g, &eps, 8).into_iter().enumerate() {
            // n = 1 is an equality, so allow quadrature rounding
            assert!(lhs <= rhs * (1.0 + 1e-12), "{name} n = {}: {lhs} > {rhs}", n + 1);
        }
    }
}

#[test]
fn growth_bound_holds_on_the_winding_map() {
    let eps = SeminormSpec::new(1.0);
    let g = corpus::winding();
    assert!(chern_growth_constant(&g, &eps) > 0.0);
    let r = growth_bound_check(&g, &eps, 12, 6);
    assert!(r.holds() && r.partial_holds(), "{r:?}");
}

#[test]
fn growth_constant_oracles() {
    let eps = SeminormSpec::new(1.0);
    let tau = std::f64::consts::TAU;
    let constant = corpus::map_by_name("constant").unwrap();
    assert!((chern_growth_constant(&constant, &eps) - 1.0).abs() < 1e-6);
    let g = corpus::winding();
    assert!((chern_growth_constant(&g, &eps) - tau).abs() < 1e-6);
    let block = g.direct_sum(&UnitaryMap::identity(1, 1)).unwrap();
    assert!((chern_growth_constant(&block, &eps) - tau).abs() < 1e-6);
}
