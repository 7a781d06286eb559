use super::*;
use crate::coords::{SliceKind, SliceSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn shifted(p: &Point4C, k: usize, h: C64) -> Point4C {
    let mut q = *p;
    q.x[k] += h;
    q
}

/// Central differences of value (for gradient) and gradient (for Hessian).
fn fd_errors(e: &FieldExpr, p: &Point4C, h: f64) -> (f64, f64) {
    let j = e.eval_jet(p, BranchSign::Plus).unwrap();
    let mut eg: f64 = 0.0;
    let mut eh: f64 = 0.0;
    for k in 0..4 {
        let fp = e.eval_jet(&shifted(p, k, c(h, 0.)), BranchSign::Plus).unwrap();
        let fm = e.eval_jet(&shifted(p, k, c(-h, 0.)), BranchSign::Plus).unwrap();
        let d = (fp.value - fm.value) / (2.0 * h);
        eg = eg.max((d - j.grad[k]).norm() / j.grad[k].norm().max(1.0));
        for l in 0..4 {
            let d2 = (fp.grad[l] - fm.grad[l]) / (2.0 * h);
            eh = eh.max((d2 - j.hess[k][l]).norm() / j.hess[k][l].norm().max(1.0));
        }
    }
    (eg, eh)
}

fn samples(n: usize, seed: u64) -> Vec<Point4C> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Point4C::new(std::array::from_fn(|_| c(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5)))))
        .collect()
}

#[test]
fn conj_example_at_real_point() {
    let e = parse("q2/conj(q1)").unwrap();
    let r4 = SliceSpec::at_origin(SliceKind::R4);
    let e = e.resolve_conj(&r4).unwrap();
    let j = e.eval_jet(&Point4C::real([1., 0., 0., 0.]), BranchSign::Plus).unwrap();
    assert_eq!(j.value, c(0., 0.));
    assert!((j.d_null()[2] - c(1., 0.)).norm() < 1e-15);
}

#[test]
fn circles_extension_gradient() {
    let e = parse("-i*x1 + sqrt(x0^2 + x2^2 + x3^2)").unwrap();
    let j = e.eval_jet(&Point4C::real([1., 0., 1., 0.]), BranchSign::Plus).unwrap();
    let s = 2f64.sqrt();
    assert!((j.value - c(s, 0.)).norm() < 1e-15);
    let want = [c(1. / s, 0.), c(0., -1.), c(1. / s, 0.), c(0., 0.)];
    for k in 0..4 {
        assert!((j.grad[k] - want[k]).norm() < 1e-15);
    }
}

#[test]
fn laplacian_and_grad_square_examples() {
    let p = Point4C::real([0.3, 1., 1., 1.]);
    let e = FieldExpr::x(1);
    assert_eq!(laplacian(&e, &p, Metric::Euclid4).unwrap(), c(0., 0.));
    assert_eq!(grad_square(&e, &p, Metric::Euclid3).unwrap(), c(1., 0.));
    let lin = parse("x1 + i*x2").unwrap();
    assert_eq!(grad_square(&lin, &p, Metric::Euclid3).unwrap().norm(), 0.0);
    let bunch = parse("((x1+0)^2 + x2^2 + x3^2)/(x2 + i*x3)").unwrap();
    let p = Point4C::real([0., 1., 1., 1.]);
    assert!(grad_square(&bunch, &p, Metric::Euclid3).unwrap().norm() < 1e-12);
}

#[test]
fn minkowski_contraction_uses_time_signature() {
    // φ = t² has −∂t²φ = −2 and −(∂tφ)² = −4t².
    let e = parse("t^2").unwrap();
    let p = Point4C::minkowski(0.5, 0., 0., 0.);
    assert!((laplacian(&e, &p, Metric::Minkowski4).unwrap() - c(-2., 0.)).norm() < 1e-14);
    assert!((grad_square(&e, &p, Metric::Minkowski4).unwrap() - c(-1., 0.)).norm() < 1e-14);
}

#[test]
fn hessian_matches_finite_differences() {
    let exprs = [
        "-i*x1 + sqrt(x0^2 + x2^2 + x3^2)",
        "(q1 - qt1 + sqrt((q1-qt1)^2 - 4*q2*qt2))/(2*qt2)",
        "log((x0 + sqrt(x0^2+x2^2+x3^2))/(x2 - i*x3))*(1+2i) - exp(q1*q2/3)",
        "(q1*qt1 + q2*qt2)^3/(qt1 + 1)^(-2)",
    ];
    for s in exprs {
        let e = parse(s).unwrap();
        let mut checked = 0;
        for p in samples(400, 7) {
            let Ok((_, margin)) = e.eval_jet_margin(&p, BranchSign::Plus) else { continue };
            if margin < 0.1 {
                continue;
            }
            let (eg, eh) = fd_errors(&e, &p, 1e-4);
            assert!(eg < 1e-5 && eh < 1e-5, "{s} at {p:?}: {eg} {eh}");
            checked += 1;
            if checked == 200 {
                break;
            }
        }
        assert_eq!(checked, 200, "{s}");
    }
}

#[test]
fn holomorphic_expressions_satisfy_cauchy_riemann() {
    // ∂/∂x̄ₖ = 0: a step of i·h changes the value by i·h·∂ₖ.
    let e = parse("(q1 + qt1 + sqrt((q1+qt1)^2 + 4*q2*qt2))/(2*qt2)").unwrap();
    for p in samples(50, 3) {
        let Ok((j, m)) = e.eval_jet_margin(&p, BranchSign::Plus) else { continue };
        if m < 0.1 {
            continue;
        }
        for k in 0..4 {
            let h = 1e-6;
            let fp = e.eval(&shifted(&p, k, c(0., h)), BranchSign::Plus).unwrap();
            let fm = e.eval(&shifted(&p, k, c(0., -h)), BranchSign::Plus).unwrap();
            let d = (fp - fm) / (2.0 * h);
            assert!((d - I * j.grad[k]).norm() < 1e-6 * j.grad[k].norm().max(1.0));
        }
    }
}

#[test]
fn branch_sign_flips_square_roots() {
    let e = parse("sqrt(x0^2 + 2)").unwrap();
    let p = Point4C::real([0.7, 0., 0., 0.]);
    let a = e.eval(&p, BranchSign::Plus).unwrap();
    let b = e.eval(&p, BranchSign::Minus).unwrap();
    assert_eq!(a, -b);
    assert_eq!(e.bake(BranchSign::Minus).eval(&p, BranchSign::Plus).unwrap(), b);
}

#[test]
fn signed_zero_does_not_pick_the_cut_side() {
    let e = parse("sqrt((2*i*x1)^2)").unwrap();
    let a = e.eval(&Point4C::real([0., 1., 0., 0.]), BranchSign::Plus).unwrap();
    let b = e.eval(&Point4C::real([0., -1., 0., 0.]), BranchSign::Plus).unwrap();
    assert_eq!(a, b);
    assert!(a.im > 0.0);
}

#[test]
fn singularities_are_reported() {
    let p = Point4C::ORIGIN;
    for s in ["1/x1", "sqrt(x0)", "log(x2)", "x3^(-1)"] {
        assert!(matches!(parse(s).unwrap().eval_jet(&p, BranchSign::Plus), Err(Error::SingularPoint(_))), "{s}");
    }
    assert!(matches!(parse("conj(x1)").unwrap().eval(&p, BranchSign::Plus), Err(Error::Conj(_))));
    let c4 = SliceSpec::at_origin(SliceKind::C4);
    assert!(parse("conj(x1)").unwrap().resolve_conj(&c4).is_err());
    let r4 = SliceSpec::at_origin(SliceKind::R4);
    assert!(parse("conj(sqrt(x1))").unwrap().resolve_conj(&r4).is_err());
}

#[test]
fn conj_on_minkowski_slice() {
    // q₁ = −it + ix₁ is imaginary on 𝕄⁴, so conj(q₁) = −q₁.
    let m4 = SliceSpec::at_origin(SliceKind::M4);
    let e = parse("conj(q1) + q1").unwrap().resolve_conj(&m4).unwrap();
    let p = m4.point(&[0.4, -1.2, 0.5, 2.0]).unwrap();
    assert!(e.eval(&p, BranchSign::Plus).unwrap().norm() < 1e-15);
    let base = Point4C::new([c(0.5, 0.2), c(0., 1.), c(1., -1.), c(0., 0.)]);
    for kind in [SliceKind::R4, SliceKind::R3, SliceKind::M4] {
        let s = SliceSpec::new(kind, base);
        let e = parse("conj(x0*x1 + 2i*x2) - x3").unwrap().resolve_conj(&s).unwrap();
        let u: Vec<f64> = (0..kind.arity()).map(|k| 0.3 * k as f64 - 0.4).collect();
        let p = s.point(&u).unwrap();
        let direct = (p.x[0] * p.x[1] + c(0., 2.) * p.x[2]).conj() - p.x[3];
        assert!((e.eval(&p, BranchSign::Plus).unwrap() - direct).norm() < 1e-14, "{kind:?}");
    }
}

#[test]
fn symbolic_derivative_agrees_with_jet() {
    let e = parse("zeta*exp(-(1+i)*log((eta + 2)/(eta - 1)))/eta^2").unwrap();
    let p = Point4C::new([c(0.3, 0.2), c(0.5, -0.7), c(0., 0.), c(0., 0.)]);
    let j = e.eval_jet(&p, BranchSign::Plus).unwrap();
    for k in 0..2 {
        let d = e.derivative(k).unwrap().eval(&p, BranchSign::Plus).unwrap();
        assert!((d - j.grad[k]).norm() < 1e-13 * j.grad[k].norm().max(1.0));
    }
}

#[test]
fn substitution_composes() {
    let e = parse("zeta^2 + i*eta").unwrap();
    let s = e.substitute(&[parse("q1").unwrap(), parse("x3").unwrap(), 0.0.into(), 0.0.into()]);
    let p = Point4C::new([c(0.1, 0.3), c(-0.5, 0.2), c(1., 1.), c(0.25, 0.)]);
    let q1 = p.x[0] + I * p.x[1];
    let want = q1 * q1 + I * p.x[3];
    assert!((s.eval(&p, BranchSign::Plus).unwrap() - want).norm() < 1e-15);
}

#[test]
fn parse_errors() {
    for s in ["", "x1 +", "sqrt x1", "x1^0.5", "foo", "x1)", "(x1", "x1 $ 2"] {
        assert!(matches!(parse(s), Err(Error::Parse { .. })), "{s}");
    }
    assert_eq!(parse("2.5i").unwrap().as_const(), Some(c(0., 2.5)));
    assert!(parse("1e-3*x1 + x2**2 - ln(x3)").is_ok());
}

fn arb_expr() -> impl Strategy<Value = FieldExpr> {
    let leaf = prop_oneof![
        (0u8..4).prop_map(FieldExpr::x),
        prop_oneof![Just(Var::T), Just(Var::Q1), Just(Var::Qt1), Just(Var::Q2), Just(Var::Qt2)]
            .prop_map(FieldExpr::var),
        (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(a, b)| FieldExpr::c(C64::new(a, b))),
        (-3.0..3.0f64).prop_map(FieldExpr::re),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a / (b + FieldExpr::re(7.0))),
            inner.clone().prop_map(|a| -a),
            (inner.clone(), -2i32..4).prop_map(|(a, n)| (a + FieldExpr::re(5.0)).powi(n)),
            inner.clone().prop_map(|a| (a + FieldExpr::re(9.0)).sqrt()),
            inner.clone().prop_map(|a| (a + FieldExpr::re(9.0)).ln()),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn display_parse_round_trip(e in arb_expr(), a in -1.0..1.0f64, b in -1.0..1.0f64) {
        let p = Point4C::new([c(a, b), c(b, 0.1), c(0.2, a), c(-b, a)]);
        let back = parse(&e.to_string()).unwrap();
        match (e.eval(&p, BranchSign::Plus), back.eval(&p, BranchSign::Plus)) {
            (Ok(u), Ok(v)) => prop_assert!((u - v).norm() <= 1e-9 * (1.0 + u.norm())),
            (Err(_), Err(_)) => {}
            (u, v) => prop_assert!(false, "{u:?} vs {v:?}"),
        }
    }

    #[test]
    fn hessian_is_symmetric(e in arb_expr(), a in -1.0..1.0f64, b in -1.0..1.0f64) {
        let p = Point4C::new([c(a, b), c(b, 0.1), c(0.2, a), c(-b, a)]);
        if let Ok(j) = e.eval_jet(&p, BranchSign::Plus) {
            for i in 0..4 { for k in 0..4 {
                let s = j.hess[i][k].norm().max(j.hess[k][i].norm()).max(1e-300);
                prop_assert!((j.hess[i][k] - j.hess[k][i]).norm() <= 4.0 * f64::EPSILON * s);
            }}
        }
    }

    #[test]
    fn value_path_matches_jet_path(e in arb_expr(), a in -1.0..1.0f64) {
        let p = Point4C::new([c(a, 0.3), c(0.2, -a), c(1.0, 0.5), c(-0.4, a)]);
        if let (Ok(v), Ok(j)) = (e.eval(&p, BranchSign::Minus), e.eval_jet(&p, BranchSign::Minus)) {
            prop_assert!((v - j.value).norm() <= 1e-12 * (1.0 + v.norm()));
        }
    }
}
