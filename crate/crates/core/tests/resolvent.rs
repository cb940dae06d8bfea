use num_complex::Complex64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;
use shrinkedge::acceptance::{random_forcing, resolvent_branches};
use shrinkedge::grid::GridFunction;
use shrinkedge::resolvent::{
    analyticity_probe, leading_order_probe, resolve, resolve_with_tol, residual, weighted_inner,
    Forcing,
};
use shrinkedge::{Error, VertexCondition};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn smooth_forcing(n: usize) -> Forcing {
    Forcing::new(
        GridFunction::from_fn(n, |y| c(1.0 + y * y, (2.0 * y).sin())).unwrap(),
        GridFunction::from_fn(n, |x| c((3.0 * x).cos(), x)).unwrap(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn residual_small_for_random_forcing(seed in any::<u64>(), which in 0usize..3, eps in 1e-3..0.2f64) {
        let lambda = [c(0.0, 1.0), c(2.0, 3.0), c(-1.0, 0.5)][which];
        let f = random_forcing(&mut StdRng::seed_from_u64(seed), 257).unwrap();
        for (name, vc) in resolvent_branches() {
            let sol = resolve(&vc, eps, lambda, &f).unwrap();
            let r = residual(&vc, eps, lambda, &f, &sol);
            prop_assert!(r <= 1e-7, "{}: residual {}", name, r);
        }
    }
}

#[test]
fn solutions_satisfy_vertex_conditions() {
    let f = smooth_forcing(257);
    let lambda = c(0.0, 2.0);
    for (name, vc) in resolvent_branches() {
        let sol = resolve(&vc, 0.05, lambda, &f).unwrap();
        let r = residual(&vc, 0.05, lambda, &f, &sol);
        assert!(r <= 1e-8, "{name}: {r}");
    }
}

#[test]
fn resolvent_is_symmetric_in_weighted_product() {
    let eps = 0.03;
    let lambda = c(-1.0, 0.5);
    let f = smooth_forcing(1025);
    let g = Forcing::new(
        GridFunction::from_real_fn(1025, |y| (1.0 - y).powi(2)).unwrap(),
        GridFunction::from_real_fn(1025, |x| x.exp()).unwrap(),
    );
    for (name, vc) in resolvent_branches() {
        let rf = resolve(&vc, eps, lambda, &f).unwrap();
        let rg = resolve(&vc, eps, lambda.conj(), &g).unwrap();
        let lhs = weighted_inner(eps, (&rf.u_s, &rf.u_e), (&g.f_s, &g.f_e)).unwrap();
        let rhs = weighted_inner(eps, (&f.f_s, &f.f_e), (&rg.u_s, &rg.u_e)).unwrap();
        assert!((lhs - rhs).norm() <= 1e-8 * lhs.norm().max(1.0), "{name}: {lhs} vs {rhs}");
    }
}

#[test]
fn resolvent_is_linear() {
    let eps = 0.02;
    let lambda = c(0.5, 1.5);
    let f = smooth_forcing(257);
    let g = random_forcing(&mut StdRng::seed_from_u64(7), 257).unwrap();
    let alpha = c(0.3, -1.1);
    let sum = Forcing::new(
        f.f_s.combine(c(1.0, 0.0), &g.f_s, alpha).unwrap(),
        f.f_e.combine(c(1.0, 0.0), &g.f_e, alpha).unwrap(),
    );
    for (name, vc) in resolvent_branches() {
        let a = resolve(&vc, eps, lambda, &f).unwrap();
        let b = resolve(&vc, eps, lambda, &g).unwrap();
        let s = resolve(&vc, eps, lambda, &sum).unwrap();
        assert!((s.c_s - a.c_s - alpha * b.c_s).norm() < 1e-10, "{name}");
        assert!((s.c_e - a.c_e - alpha * b.c_e).norm() < 1e-10, "{name}");
    }
}

#[test]
fn coefficients_blow_up_at_real_pole() {
    let f = smooth_forcing(257);
    let pole = std::f64::consts::PI.powi(2);
    let norm = |delta: f64| {
        let sol = resolve(&VertexCondition::Rank2, 0.1, c(pole, delta), &f).unwrap();
        sol.c_e.norm()
    };
    let ratio = norm(1e-6) / norm(1e-5);
    assert!((ratio - 10.0).abs() < 0.1, "ratio {ratio}");
    let err = resolve_with_tol(&VertexCondition::Rank2, 0.1, c(pole, 1e-13), &f, 1e-10).unwrap_err();
    assert!(matches!(err, Error::NearPole { .. }), "{err}");
}

#[test]
fn leading_orders_match_predicted_cases() {
    let f = smooth_forcing(257);
    let eps = [4e-3, 2e-3, 1e-3, 5e-4];
    for (name, vc) in resolvent_branches() {
        let report = leading_order_probe(&vc, c(0.0, 1.0), &f, &eps).unwrap();
        assert!(report.consistent, "{name}: {report:?}");
    }
}

#[test]
fn long_edge_coefficient_is_analytic_in_eps() {
    let f = smooth_forcing(257);
    for (name, vc) in resolvent_branches() {
        let report = analyticity_probe(&vc, c(0.0, 1.0), &f, 0.01).unwrap();
        assert!(report.relative_remainder < 1e-6, "{name}: {}", report.relative_remainder);
    }
}
