use super::*;
use crate::unify::{extend_from_slice, ComponentsField, Extended, MuField};

fn e(s: &str) -> FieldExpr {
    FieldExpr::parse(s).unwrap()
}

fn spec(kind: SliceKind, lo: f64, hi: f64, n: usize) -> SamplerSpec {
    SamplerSpec::on(kind, Point4C::ORIGIN, lo, hi, n, 42)
}

#[test]
fn hc3_null_linear_vanishes() {
    let r = check_hc3(&e("x2 + i*x3"), &spec(SliceKind::R3, -2.0, 2.0, 200)).unwrap();
    assert!(r.passed && r.max_abs < 1e-15);
}

#[test]
fn hc3_radial_foliation() {
    let f = e("(x2 + i*x3)/(x1 + sqrt(x1^2 + x2^2 + x3^2))");
    let s = spec(SliceKind::R3, -2.0, 2.0, 1000)
        .exclude(Exclusion::AbsAtLeast(e("x1 + sqrt(x1^2 + x2^2 + x3^2)"), 0.1))
        .with_tol(1e-10);
    let r = check_hc3(&f, &s).unwrap();
    assert_eq!(r.samples, 1000);
    assert!(r.passed, "{}", r.max_abs);
}

#[test]
fn hc3_negative_control() {
    let r = check_hc3(&e("x1"), &spec(SliceKind::R3, -1.0, 1.0, 50)).unwrap();
    assert!(!r.passed);
    assert!((r.max_abs - 1.0).abs() < 1e-15 && (r.mean_abs - 1.0).abs() < 1e-15);
    assert_eq!(r.failure_count, 50);
    assert!(!r.failures.is_empty());
}

#[test]
fn hc3_wrong_slice_is_rejected() {
    assert!(matches!(check_hc3(&e("x1"), &spec(SliceKind::R4, -1.0, 1.0, 5)), Err(Error::Invalid(_))));
}

#[test]
fn constant_mu_is_integrable_everywhere() {
    let mu = e("0.3 - 0.7*i");
    assert!(check_alpha(&mu, &spec(SliceKind::C4, -1.0, 1.0, 100)).unwrap().max_abs == 0.0);
    assert!(check_hermitian(&mu, &spec(SliceKind::R4, -1.0, 1.0, 100)).unwrap().max_abs == 0.0);
    assert!(check_sfr(&mu, &spec(SliceKind::M4, -1.0, 1.0, 100)).unwrap().max_abs == 0.0);
}

#[test]
fn hopf_structure_on_r4() {
    let s = spec(SliceKind::R4, -2.0, 2.0, 500).exclude(Exclusion::AbsAtLeast(e("conj(q1)"), 0.1)).with_tol(1e-10);
    assert!(check_hermitian(&e("-q2/conj(q1)"), &s).unwrap().passed);
    assert!(!check_hermitian(&e("q2/conj(q1)"), &s).unwrap().passed);
}

#[test]
fn hopf_congruence_on_minkowski() {
    let mu = e("-i*q2/(x1 + t)");
    let s = spec(SliceKind::M4, -2.0, 2.0, 500).exclude(Exclusion::AbsAtLeast(e("x1 + t"), 0.1)).with_tol(1e-10);
    let r = check_sfr(&mu, &s).unwrap();
    assert!(r.passed, "{}", r.max_abs);
    let phi = mu.clone() * I;
    let h = check_harmonic_morphism(&phi, Metric::Minkowski4, &s.clone().with_tol(1e-9)).unwrap();
    assert!(h.passed, "{}", h.max_abs);
}

#[test]
fn equivalence_chain_with_corrupted_control() {
    let good = e("-q2/qt1");
    let bad = e("-q2/qt1 + 0.2*x1");
    let ex = Exclusion::AbsAtLeast(e("qt1"), 0.2);
    let c4 = spec(SliceKind::C4, -1.5, 1.5, 300).exclude(ex.clone());
    let r4 = spec(SliceKind::R4, -1.5, 1.5, 300).exclude(ex.clone());
    let m4 = spec(SliceKind::M4, -1.5, 1.5, 300).exclude(ex);
    let verdict = |mu: &FieldExpr| {
        [
            check_alpha(mu, &c4).unwrap().passed,
            check_hermitian(mu, &r4).unwrap().passed,
            check_sfr(mu, &m4).unwrap().passed,
        ]
    };
    assert_eq!(verdict(&good), [true; 3]);
    assert_eq!(verdict(&bad), [false; 3]);
}

#[test]
fn linear_null_is_harmonic_morphism() {
    let phi = e("x1 + i*x2");
    for (k, m) in
        [(SliceKind::R4, Metric::Euclid4), (SliceKind::M4, Metric::Minkowski4), (SliceKind::C4, Metric::Complex4)]
    {
        let r = check_harmonic_morphism(&phi, m, &spec(k, -1.0, 1.0, 100)).unwrap();
        assert!(r.max_abs == 0.0);
        assert_eq!(r.components.len(), 2);
    }
}

#[test]
fn hermitian_mu_is_harmonic_morphism() {
    let s = spec(SliceKind::R4, -2.0, 2.0, 500).exclude(Exclusion::AbsAtLeast(e("conj(q1)"), 0.1)).with_tol(1e-10);
    let r = check_harmonic_morphism(&e("-q2/conj(q1)"), Metric::Euclid4, &s).unwrap();
    assert!(r.passed, "{}", r.max_abs);
}

fn half_space(n: usize) -> SamplerSpec {
    spec(SliceKind::R4, -2.0, 2.0, n)
        .with_bounds(vec![[0.2, 2.0], [-2.0, 2.0], [-2.0, 2.0], [-2.0, 2.0]])
        .with_tol(1e-10)
}

#[test]
fn circles_hyperbolic_harmonic_morphism() {
    let phi = e("-i*x1 + sqrt(x0^2 + x2^2 + x3^2)");
    let r = check_hyperbolic_hm(&phi, &half_space(500)).unwrap();
    assert!(r.passed, "{}", r.max_abs);
    let b = check_boundary_orthogonality(
        &phi,
        &spec(SliceKind::R3, -2.0, 2.0, 200).exclude(Exclusion::AbsAtLeast(e("x2 + i*x3"), 0.1)),
    )
    .unwrap();
    assert!(b.max_abs == 0.0);
}

#[test]
fn hyperbolic_controls() {
    assert!(check_hyperbolic_hm(&e("x2 + i*x3"), &half_space(100)).unwrap().max_abs == 0.0);
    let r = check_hyperbolic_hm(&e("x0"), &half_space(100)).unwrap();
    assert!((r.components[0].max_abs - 2.0).abs() < 1e-15);
    let b = check_boundary_orthogonality(&e("x0"), &spec(SliceKind::R3, -1.0, 1.0, 10)).unwrap();
    assert!((b.max_abs - 1.0).abs() < 1e-15 && !b.passed);
}

#[test]
fn hyperbolic_weight_uses_translated_slice() {
    let a = Point4C::new([C64::new(0.7, -1.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)]);
    let s = SamplerSpec::on(SliceKind::R4, a, -2.0, 2.0, 200, 3)
        .with_bounds(vec![[0.2, 2.0], [-2.0, 2.0], [-2.0, 2.0], [-2.0, 2.0]])
        .with_tol(1e-10);
    let r = check_hyperbolic_hm(&e("-i*x1 + sqrt((x0 - 0.7 + i)^2 + x2^2 + x3^2)"), &s).unwrap();
    assert!(r.passed, "{}", r.max_abs);
}

#[test]
fn fibre_constancy_for_hopf() {
    let mu = e("-q2/qt1");
    let phi = mu.clone();
    let s = spec(SliceKind::C4, -1.5, 1.5, 300).exclude(Exclusion::AbsAtLeast(e("qt1"), 0.2)).with_tol(1e-10);
    assert!(check_fibre(&phi, &mu, &s).unwrap().passed);
    assert!(!check_fibre(&e("x1"), &mu, &s).unwrap().passed);
}

#[test]
fn report_json_shape() {
    let r = check_hc3(&e("x1"), &spec(SliceKind::R3, -1.0, 1.0, 3)).unwrap();
    let j = r.to_json();
    for k in ["condition", "seed", "box", "samples", "max_abs", "mean_abs", "failures"] {
        assert!(j.get(k).is_some(), "{k}");
    }
    assert_eq!(j["box"].as_array().unwrap().len(), 3);
    assert_eq!(j["seed"], 42);
}

#[test]
fn parallel_and_sequential_reports_agree() {
    let mu = e("-i*q2/(x1 + t)");
    let s = spec(SliceKind::M4, -2.0, 2.0, 200).exclude(Exclusion::AbsAtLeast(e("x1 + t"), 0.1));
    let a = check_sfr(&mu, &s.clone().with_exec(crate::exec::Exec::Sequential)).unwrap();
    let b = check_sfr(&mu, &s.with_exec(crate::exec::Exec::Parallel)).unwrap();
    assert_eq!(a, b);
}

fn radial_field() -> ComponentsField {
    let r = e("sqrt(x1^2 + x2^2 + x3^2)");
    ComponentsField::new(
        [FieldExpr::x(1) / r.clone(), FieldExpr::x(2) / r.clone(), FieldExpr::x(3) / r],
        Point4C::ORIGIN,
    )
    .unwrap()
}

fn circles_field() -> ComponentsField {
    let rho = e("sqrt(x2^2 + x3^2)");
    ComponentsField::new([FieldExpr::re(0.0), -FieldExpr::x(3) / rho.clone(), FieldExpr::x(2) / rho], Point4C::ORIGIN)
        .unwrap()
}

#[test]
fn radial_is_twist_and_shear_free() {
    let f = radial_field();
    let ext = Extended { field: &f };
    for x in [[1.0, 0.5, -0.3], [-0.4, 0.2, 1.7]] {
        let t = congruence_tensors(&ext, 0.0, x).unwrap();
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        assert!(t.twist.abs() < 1e-14 && t.shear_norm < 1e-10);
        assert!((t.expansion + 2.0 / r).abs() < 1e-12);
    }
}

#[test]
fn circles_shear_free_at_point_and_along_rays() {
    let f = circles_field();
    let ext = Extended { field: &f };
    assert!(congruence_tensors(&ext, 0.0, [0.0, 1.0, 0.0]).unwrap().shear_norm < 1e-10);
    let ts = shear_along_ray(&ext, 0.0, [0.3, 1.2, 0.4], &[0.0, 0.3, -0.3, 0.7, -0.7]).unwrap();
    for t in ts {
        assert!(t.shear_norm < 1e-9);
    }
}

fn fd_twist(field: &dyn DirectionField, t: f64, x: [f64; 3]) -> f64 {
    let h = 1e-5;
    let jet = field.dir(t, x).unwrap();
    let mut du = [[0.0; 3]; 4];
    for a in 1..4 {
        let mut p = x;
        p[a - 1] += h;
        let up = field.dir(t, p).unwrap().u;
        p[a - 1] -= 2.0 * h;
        let um = field.dir(t, p).unwrap().u;
        for b in 0..3 {
            du[a][b] = (up[b] - um[b]) / (2.0 * h);
        }
    }
    tensors_of(&crate::unify::DirJet { u: jet.u, du }).unwrap().twist
}

#[test]
fn robinson_twist_is_nonzero_and_matches_differences() {
    let mu = e("-q2/(qt1 + 1)");
    let f = MuField::new(&mu, Point4C::ORIGIN).unwrap();
    let (t, x) = (0.2, [0.4, -0.3, 0.8]);
    let tw = congruence_tensors(&f, t, x).unwrap();
    let oracle = fd_twist(&f, t, x);
    assert!(tw.twist.abs() > 0.05);
    assert!((tw.twist - oracle).abs() < 1e-8);
    assert!(tw.shear_norm < 1e-10);
    let hopf = MuField::new(&e("-q2/qt1"), Point4C::ORIGIN).unwrap();
    assert!(congruence_tensors(&hopf, 0.3, x).unwrap().twist.abs() < 1e-12);
}

#[test]
fn hopf_shear_along_rays() {
    let f = MuField::new(&e("-q2/(qt1 + 1)"), Point4C::ORIGIN).unwrap();
    let s = spec(SliceKind::M4, -1.0, 1.0, 200).with_tol(1e-9);
    assert!(check_shear(&f, &s, &[e("-q2/(qt1 + 1)")]).unwrap().passed);
    for t in shear_along_ray(&f, 0.1, [0.3, 0.5, -0.2], &[-0.7, -0.3, 0.0, 0.3, 0.7]).unwrap() {
        assert!(t.shear_norm < 1e-9);
    }
}

#[test]
fn hm_recovers_hopf_congruence() {
    let mu = e("-i*q2/(x1 + t)");
    let phi = mu.clone() * I;
    let s = spec(SliceKind::M4, -2.0, 2.0, 20).exclude(Exclusion::AbsAtLeast(e("x1 + t"), 0.2));
    for p in s.draw(&[mu.clone()]).unwrap() {
        let d = sfr_from_hm(&phi, &p).unwrap();
        let want = MuPair::finite(mu.eval(&p, BranchSign::Plus).unwrap());
        assert!(!d.degenerate);
        assert!(d.mu.chordal(&want) < 1e-10);
    }
}

#[test]
fn null_coordinate_maps_give_parallel_rays() {
    let p = Point4C::minkowski(0.3, 0.1, -0.4, 0.9);
    let v = sfr_from_hm(&e("x1 + t"), &p).unwrap();
    assert!(v.degenerate);
    assert!(v.mu.chordal(&MuPair::INFINITY) < 1e-15);
    let w = sfr_from_hm(&e("x1 - t"), &p).unwrap();
    assert!(w.mu.chordal(&MuPair::finite(C64::new(0.0, 0.0))) < 1e-15);
    assert!(matches!(sfr_from_hm(&e("3"), &p), Err(Error::NotSubmersive)));
}

#[test]
fn degenerate_circles_map_has_null_kernel_direction() {
    let mu = e("sqrt(x2^2 + x3^2 - t^2)/(x2^2 + x3^2) * ((x2 + t/sqrt(x2^2 + x3^2 - t^2)*x3) + i*(x3 - t/sqrt(x2^2 + x3^2 - t^2)*x2))");
    let f = circles_field();
    for (t, x) in [(0.5, [0.2, 1.3, -0.4]), (-0.8, [1.0, -0.9, 1.1])] {
        let p = Point4C::minkowski(t, x[0], x[1], x[2]);
        let d = sfr_from_hm(&mu, &p).unwrap();
        assert!(d.degenerate);
        let u = extend_from_slice(&f, t, x).unwrap().u;
        for k in 0..3 {
            assert!((d.w[k + 1] - u[k]).abs() < 1e-10);
        }
    }
}
