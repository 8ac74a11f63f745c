use proptest::prelude::*;
use sobolev_groupoid::domain::{
    norm_growth, BoxDomain, Grid, GridFunction, SymbolicFunction, Verdict,
};
use sobolev_groupoid::numerics::fit_loglog_slope;
use sobolev_groupoid::partial::{
    involutivity_defect, product_verdict, Catalog, GammaVerdict, DEFAULT_ETA,
};
use sobolev_groupoid::smoothing::{convolve, MollifierElement};
use sobolev_groupoid::weak::{verify_weak_derivative, MultiIndex, TestFunctionPanel};

fn line(n: usize) -> Grid {
    Grid::uniform(BoxDomain::interval(-1.0, 1.0).unwrap(), n).unwrap()
}

fn poly() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0..2.0f64, 1..5)
}

#[test]
fn midpoint_rule_is_second_order() {
    let f = |x: &[f64]| (3.0 * x[0]).cos() + x[0].powi(4);
    let exact = 2.0 * 3.0f64.sin() / 3.0 + 0.4;
    let ns = [16usize, 32, 64, 128, 256];
    let errs: Vec<f64> = ns
        .iter()
        .map(|&n| (GridFunction::from_fn(&line(n), f).unwrap().integrate() - exact).abs())
        .collect();
    let hs: Vec<f64> = ns.iter().map(|&n| 2.0 / n as f64).collect();
    let slope = fit_loglog_slope(&hs, &errs).unwrap();
    assert!(slope >= 1.8, "{slope}");
}

#[test]
fn divergence_is_detected_across_the_threshold() {
    let ladder = Grid::dyadic_ladder(&BoxDomain::interval(-1.0, 1.0).unwrap(), 7, 13).unwrap();
    for (a, expected) in [(0.3, Verdict::Integrable), (0.7, Verdict::Divergent)] {
        let f = SymbolicFunction::power(&[0.0], a);
        assert_eq!(
            norm_growth(&f, 2.0, &ladder).unwrap().verdict,
            expected,
            "a = {a}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn norms_nest_on_a_finite_domain(c in poly(), p in 1.0..3.0f64, dq in 0.1..3.0f64) {
        let f = SymbolicFunction::polynomial(&c).sample(&line(256)).unwrap();
        let q = p + dq;
        let measure = 2.0f64;
        let lhs = f.lp_norm(p).unwrap();
        let rhs = measure.powf(1.0 / p - 1.0 / q) * f.lp_norm(q).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-14);
        prop_assert!(f.lp_norm(q).unwrap() <= measure.powf(1.0 / q) * f.lp_norm(f64::INFINITY).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn mollifying_never_raises_the_sup(c in poly(), eps in 0.05..0.4f64) {
        let f = SymbolicFunction::polynomial(&c).sample(&line(512)).unwrap();
        let m = MollifierElement::standard(1, eps).unwrap();
        let s = convolve(&m, &f).unwrap();
        let sup = f.max_abs();
        for (v, t) in s.function.values().iter().zip(&s.trusted) {
            if *t {
                prop_assert!(v.abs() <= sup * (1.0 + 5e-3) + 1e-14);
            }
        }
    }

    #[test]
    fn convolution_commutes_with_node_shifts(shift in 1usize..40, eps in 0.05..0.3f64) {
        let g = line(512);
        let h = g.spacing()[0];
        let f = |x: f64| (4.0 * x).sin() + x.abs();
        let base = GridFunction::from_fn(&g, |x| f(x[0])).unwrap();
        let moved = GridFunction::from_fn(&g, |x| f(x[0] + shift as f64 * h)).unwrap();
        let m = MollifierElement::standard(1, eps).unwrap();
        let a = convolve(&m, &base).unwrap();
        let b = convolve(&m, &moved).unwrap();
        for i in 0..g.len() - shift {
            if a.trusted[i + shift] && b.trusted[i] {
                prop_assert!((b.function.value_at(i) - a.function.value_at(i + shift)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn weak_residual_is_homogeneous(scale in -5.0..5.0f64, c in poly()) {
        let g = line(256);
        let panel = TestFunctionPanel::new(&g, 20, 3).unwrap();
        let alpha = MultiIndex::new(&[1]).unwrap();
        let f = SymbolicFunction::polynomial(&c).sample(&g).unwrap();
        let u = SymbolicFunction::abs().sample(&g).unwrap();
        let r = verify_weak_derivative(&f, &u, &alpha, &panel).unwrap();
        let rs = verify_weak_derivative(&f.scale(scale).unwrap(), &u.scale(scale).unwrap(), &alpha, &panel).unwrap();
        for (x, y) in r.residuals.iter().zip(&rs.residuals) {
            prop_assert!((y - scale.abs() * x).abs() <= 1e-9 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn involution_round_trip(c in 0.5..4.0f64, sign in prop::bool::ANY, r in 0.1..0.6f64) {
        let s = if sign { 1.0 } else { -1.0 };
        let f = SymbolicFunction::sum(vec![SymbolicFunction::constant(s * c), SymbolicFunction::bump(&[0.0], r)]);
        let g = f.sample(&line(256)).unwrap();
        if g.min_abs() >= DEFAULT_ETA {
            prop_assert!(involutivity_defect(&g, DEFAULT_ETA).unwrap() <= 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn membership_is_monotone_in_p(i in 0usize..5, j in 0usize..5) {
        let a = [0.05, 0.1, 0.2, 0.3, 0.4];
        let low = Catalog::power_family(&a, 1.0).unwrap();
        let high = Catalog::power_family(&a, 2.0).unwrap();
        let at = |c: &Catalog| product_verdict(c, c.function(i).unwrap(), c.function(j).unwrap()).unwrap().verdict;
        if at(&high) == GammaVerdict::In {
            prop_assert_eq!(at(&low), GammaVerdict::In);
        }
    }
}
