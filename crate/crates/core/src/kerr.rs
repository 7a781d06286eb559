//! Twistor surfaces ψ = 0 in ℂP³ and the Kerr equation
//! ψ(w₀, w₁, w₀q₁ − w₁q̃₂, w₀q₂ + w₁q̃₁) = 0 for the direction [w₀,w₁].
//!
//! Quadratic roots use μ_± = (−c₁ ± √Δ)/(2c₂) for the reduced polynomial
//! c₂μ² + c₁μ + c₀ with the sign given by [`BranchSign`].

use crate::coords::{cx, from_cx, to_null, MuPair, Point4C, C64};
use crate::error::{Error, Result};
use crate::fieldexpr::{BranchSign, FieldExpr, Node, Var};
use crate::tolerances::{tau_alg, TAU_BRANCH};
use crate::twistor::TwistorPoint;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

type Poly4 = BTreeMap<[u32; 4], C64>;

/// Homogeneous polynomial in w₀..w₃, stored in lexicographic exponent order
/// with duplicates merged and zero terms dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct TwistorSurface {
    pub name: String,
    pub degree: u32,
    terms: Poly4,
}

#[derive(Serialize, Deserialize)]
struct MonomialJson {
    e: [u32; 4],
    c: [f64; 2],
}

#[derive(Serialize, Deserialize)]
struct SurfaceJson {
    name: String,
    degree: u32,
    monomials: Vec<MonomialJson>,
}

impl TwistorSurface {
    pub fn new(name: impl Into<String>, monomials: impl IntoIterator<Item = ([u32; 4], C64)>) -> Result<Self> {
        let mut terms = Poly4::new();
        let mut degree = None;
        for (e, c) in monomials {
            let d: u32 = e.iter().sum();
            match degree {
                None => degree = Some(d),
                Some(d0) if d0 != d => {
                    return Err(Error::InvalidSurface(format!("not homogeneous: degrees {d0} and {d}")));
                }
                _ => {}
            }
            *terms.entry(e).or_insert(ZERO) += c;
        }
        terms.retain(|_, c| *c != ZERO);
        let degree = degree.unwrap_or(0);
        if terms.is_empty() {
            return Err(Error::InvalidSurface("polynomial is identically zero".into()));
        }
        if degree == 0 {
            return Err(Error::InvalidSurface("degree must be at least 1".into()));
        }
        Ok(TwistorSurface { name: name.into(), degree, terms })
    }

    /// Parses a polynomial in w0..w3, e.g. `"w0*w3 - w1*w2"`.
    pub fn parse(name: impl Into<String>, text: &str) -> Result<Self> {
        let e = FieldExpr::parse(&text.replace('w', "x"))?;
        let poly = expr_to_poly(&e)?;
        TwistorSurface::new(name, poly)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: SurfaceJson = serde_json::from_str(s).map_err(|e| Error::Invalid(format!("surface JSON: {e}")))?;
        let s = TwistorSurface::new(j.name, j.monomials.into_iter().map(|m| (m.e, from_cx(m.c))))?;
        if s.degree != j.degree {
            return Err(Error::InvalidSurface(format!(
                "declared degree {} but monomials have degree {}",
                j.degree, s.degree
            )));
        }
        Ok(s)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let j = SurfaceJson {
            name: self.name.clone(),
            degree: self.degree,
            monomials: self.terms.iter().map(|(e, c)| MonomialJson { e: *e, c: cx(*c) }).collect(),
        };
        serde_json::to_value(j).expect("surface serializes")
    }

    pub fn monomials(&self) -> impl Iterator<Item = (&[u32; 4], &C64)> {
        self.terms.iter()
    }

    pub fn eval(&self, w: &[C64; 4]) -> C64 {
        self.terms.iter().map(|(e, c)| c * (0..4).map(|k| w[k].powu(e[k])).product::<C64>()).sum()
    }

    /// ψ∘M, i.e. the polynomial w ↦ ψ(Mw). Passing P⁻¹ gives the image of
    /// the surface under w ↦ Pw.
    pub fn compose_linear(&self, m: &[[C64; 4]; 4]) -> Result<TwistorSurface> {
        let lin: [Poly4; 4] = std::array::from_fn(|i| {
            let mut p = Poly4::new();
            for (j, c) in m[i].iter().enumerate() {
                if *c != ZERO {
                    let mut e = [0; 4];
                    e[j] = 1;
                    p.insert(e, *c);
                }
            }
            p
        });
        let mut out = Poly4::new();
        for (e, c) in &self.terms {
            let mut acc = Poly4::from([([0; 4], *c)]);
            for k in 0..4 {
                for _ in 0..e[k] {
                    acc = poly_mul(&acc, &lin[k]);
                }
            }
            for (e2, c2) in acc {
                *out.entry(e2).or_insert(ZERO) += c2;
            }
        }
        let scale = out.values().map(|c| c.norm()).fold(0.0, f64::max);
        TwistorSurface::new(self.name.clone(), out.into_iter().filter(|(_, c)| c.norm() > 1e-14 * scale))
    }

    /// Projective distance between the coefficient vectors of two surfaces.
    pub fn coeff_distance(&self, o: &TwistorSurface) -> f64 {
        let keys: std::collections::BTreeSet<_> = self.terms.keys().chain(o.terms.keys()).collect();
        let a: Vec<C64> = keys.iter().map(|k| *self.terms.get(*k).unwrap_or(&ZERO)).collect();
        let b: Vec<C64> = keys.iter().map(|k| *o.terms.get(*k).unwrap_or(&ZERO)).collect();
        crate::twistor::projective_dist(&a, &b)
    }

    /// Coefficients c₀..c_d of ψ(1, μ, q₁ − μq̃₂, q₂ + μq̃₁) at `p`.
    pub fn reduced_poly(&self, p: &Point4C) -> Vec<C64> {
        let n = to_null(p);
        reduce(self, [[ONE, ZERO], [ZERO, ONE], [n.q1, -n.qt2], [n.q2, n.qt1]], ZERO)
    }

    /// The same coefficients as expressions in the null coordinates.
    pub fn reduced_exprs(&self) -> Vec<FieldExpr> {
        let z = FieldExpr::re(0.0);
        let o = FieldExpr::re(1.0);
        reduce(
            self,
            [
                [o.clone(), z.clone()],
                [z.clone(), o],
                [FieldExpr::q1(), -FieldExpr::qt2()],
                [FieldExpr::q2(), FieldExpr::qt1()],
            ],
            z,
        )
    }
}

impl fmt::Display for TwistorSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let mono: Vec<String> = (0..4)
                .filter(|&k| e[k] > 0)
                .map(|k| if e[k] == 1 { format!("w{k}") } else { format!("w{k}^{}", e[k]) })
                .collect();
            let (sign, mag) = if c.im == 0.0 && c.re < 0.0 { ("-", -*c) } else { ("+", *c) };
            if !first || sign == "-" {
                write!(
                    f,
                    "{}",
                    if first {
                        "-"
                    } else if sign == "-" {
                        " - "
                    } else {
                        " + "
                    }
                )?;
            }
            first = false;
            let coef = FieldExpr::c(mag).to_string();
            if mag == ONE {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{coef}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

fn poly_mul(a: &Poly4, b: &Poly4) -> Poly4 {
    let mut out = Poly4::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e = std::array::from_fn(|k| ea[k] + eb[k]);
            *out.entry(e).or_insert(ZERO) += ca * cb;
        }
    }
    out
}

fn expr_to_poly(e: &FieldExpr) -> Result<Poly4> {
    let bad = |what: &str| Error::InvalidSurface(format!("not a polynomial in w0..w3: {what}"));
    let add = |a: Poly4, b: Poly4, s: C64| {
        let mut out = a;
        for (k, c) in b {
            *out.entry(k).or_insert(ZERO) += s * c;
        }
        out
    };
    Ok(match e.node() {
        Node::Const(c) => Poly4::from([([0; 4], *c)]),
        Node::Coord(Var::X(k)) => {
            let mut ex = [0; 4];
            ex[*k as usize] = 1;
            Poly4::from([(ex, ONE)])
        }
        Node::Add(a, b) => add(expr_to_poly(a)?, expr_to_poly(b)?, ONE),
        Node::Sub(a, b) => add(expr_to_poly(a)?, expr_to_poly(b)?, -ONE),
        Node::Neg(a) => add(Poly4::new(), expr_to_poly(a)?, -ONE),
        Node::Mul(a, b) => poly_mul(&expr_to_poly(a)?, &expr_to_poly(b)?),
        Node::Pow(a, n) if *n >= 0 => {
            let base = expr_to_poly(a)?;
            let mut acc = Poly4::from([([0; 4], ONE)]);
            for _ in 0..*n {
                acc = poly_mul(&acc, &base);
            }
            acc
        }
        Node::Div(a, b) => match b.as_const() {
            Some(c) if c != ZERO => add(Poly4::new(), expr_to_poly(a)?, c.inv()),
            _ => return Err(bad("division")),
        },
        other => return Err(bad(&format!("{other:?}").chars().take(24).collect::<String>())),
    })
}

/// Expands ψ(a₀ + b₀μ, …, a₃ + b₃μ) into coefficients of μ⁰..μᵈ.
fn reduce<T>(s: &TwistorSurface, lin: [[T; 2]; 4], zero: T) -> Vec<T>
where
    T: Clone + std::ops::Add<Output = T> + std::ops::Mul<Output = T> + From<C64>,
{
    let d = s.degree as usize;
    let mut out = vec![zero.clone(); d + 1];
    for (e, c) in &s.terms {
        let mut acc: Vec<T> = vec![T::from(*c)];
        for k in 0..4 {
            for _ in 0..e[k] {
                let mut next = vec![zero.clone(); acc.len() + 1];
                for (j, a) in acc.iter().enumerate() {
                    next[j] = next[j].clone() + a.clone() * lin[k][0].clone();
                    next[j + 1] = next[j + 1].clone() + a.clone() * lin[k][1].clone();
                }
                acc = next;
            }
        }
        for (j, a) in acc.into_iter().enumerate() {
            out[j] = out[j].clone() + a;
        }
    }
    out
}

/// The direction [w₀,w₁] on the given branch at `p`. A root at infinity is [0,1].
pub fn kerr_eval(s: &TwistorSurface, p: &Point4C, branch: BranchSign) -> Result<MuPair> {
    let c = s.reduced_poly(p);
    solve_reduced(&c, branch)
}

/// Roots of Σ c_k μᵏ as homogeneous pairs.
pub fn solve_reduced(c: &[C64], branch: BranchSign) -> Result<MuPair> {
    let scale = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale <= tau_alg() || !scale.is_finite() {
        return Err(Error::DegenerateAtPoint);
    }
    let c: Vec<C64> = c.iter().map(|z| z / scale).collect();
    match c.len() - 1 {
        1 => Ok(MuPair::new(c[1], -c[0]).normalized()),
        2 => {
            let disc = c[1] * c[1] - 4.0 * c[2] * c[0];
            if disc.norm() < TAU_BRANCH {
                return Err(Error::DegenerateAtPoint);
            }
            let r = disc.sqrt() * branch.sign();
            let np = -c[1] + r;
            let nm = -c[1] - r;
            let pair = if np.norm() >= nm.norm() { MuPair::new(2.0 * c[2], np) } else { MuPair::new(nm, 2.0 * c[0]) };
            Ok(pair.normalized())
        }
        _ => solve_high(&c, branch),
    }
}

/// Durand–Kerner with Newton polishing; `Plus` picks the root of largest real
/// part and `Minus` the smallest.
fn solve_high(c: &[C64], branch: BranchSign) -> Result<MuPair> {
    let mut m = c.len() - 1;
    while m > 0 && c[m].norm() <= tau_alg() {
        m -= 1;
    }
    if m == 0 {
        return Ok(MuPair::INFINITY);
    }
    let lead = c[m];
    let a: Vec<C64> = c[..=m].iter().map(|z| z / lead).collect();
    let f = |z: C64| a.iter().rev().fold(ZERO, |acc, k| acc * z + k);
    let df = |z: C64| (1..=m).rev().fold(ZERO, |acc, k| acc * z + a[k] * k as f64);
    let radius = 1.0 + a[..m].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let seed = C64::new(0.4, 0.9);
    let mut roots: Vec<C64> = (0..m).map(|k| seed.powu(k as u32) * radius * 0.5).collect();
    let mut converged = false;
    for _ in 0..500 {
        let mut delta: f64 = 0.0;
        for i in 0..m {
            let denom: C64 = (0..m).filter(|&j| j != i).map(|j| roots[i] - roots[j]).product();
            if denom.norm() == 0.0 {
                roots[i] += C64::new(1e-3, 1e-3);
                continue;
            }
            let step = f(roots[i]) / denom;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-14 * radius {
            converged = true;
            break;
        }
    }
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let d = df(*r);
            if d.norm() > 0.0 {
                *r -= f(*r) / d;
            }
        }
    }
    if !converged || roots.iter().any(|r| f(*r).norm() > 1e-8 * radius.powi(m as i32)) {
        return Err(Error::NoConvergence);
    }
    let pick = match branch {
        BranchSign::Plus => roots.iter().max_by(|x, y| x.re.total_cmp(&y.re)),
        BranchSign::Minus => roots.iter().min_by(|x, y| x.re.total_cmp(&y.re)),
    };
    Ok(MuPair::finite(*pick.expect("m > 0")).normalized())
}

/// Closed-form μ for degree ≤ 2. The result has its branch baked in and is
/// evaluated with `BranchSign::Plus`.
pub fn kerr_field(s: &TwistorSurface, branch: BranchSign) -> Result<FieldExpr> {
    let c = s.reduced_exprs();
    let is_zero = |e: &FieldExpr| e.as_const().is_some_and(|z| z == ZERO);
    match s.degree {
        1 => {
            if is_zero(&c[1]) {
                return Err(Error::AtInfinity);
            }
            Ok(-c[0].clone() / c[1].clone())
        }
        2 => {
            if is_zero(&c[2]) {
                return match branch {
                    BranchSign::Plus if !is_zero(&c[1]) => Ok(-c[0].clone() / c[1].clone()),
                    _ => Err(Error::AtInfinity),
                };
            }
            let disc = c[1].powi(2) - c[2].clone() * c[0].clone() * 4.0;
            let mu = (-c[1].clone() + disc.sqrt()) / (c[2].clone() * 2.0);
            Ok(mu.bake(branch))
        }
        d => Err(Error::UnsupportedDegree(d)),
    }
}

/// The quadratic root written with i·√(−disc) in place of √disc. Both agree
/// where Im disc ≥ 0; this form is cut-free where disc is real and negative.
pub fn kerr_field_rotated(s: &TwistorSurface, branch: BranchSign) -> Result<FieldExpr> {
    if s.degree != 2 {
        return kerr_field(s, branch);
    }
    let c = s.reduced_exprs();
    if c[2].as_const().is_some_and(|z| z == ZERO) {
        return kerr_field(s, branch);
    }
    let disc = c[1].powi(2) - c[2].clone() * c[0].clone() * 4.0;
    let mu = (-c[1].clone() + FieldExpr::i() * (-disc).sqrt()) / (c[2].clone() * 2.0);
    Ok(mu.bake(branch))
}

/// Scaled residual |ψ(w)| / ‖w‖ᵈ.
pub fn surface_residual(s: &TwistorSurface, w: &TwistorPoint) -> f64 {
    s.eval(&w.w).norm() / w.norm().powi(s.degree as i32)
}

pub fn surface_contains(s: &TwistorSurface, w: &TwistorPoint) -> bool {
    surface_residual(s, w) <= tau_alg()
}

/// Named surfaces: `w0`..`w3`, `hopf`, `robinson:s`, `quadric-radial`,
/// `quadric-circles`, `quadric-coaxal`.
pub fn named_surface(key: &str) -> Result<TwistorSurface> {
    let (head, arg) = match key.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (key, None),
    };
    let text = match head {
        "w0" | "w1" | "w2" | "w3" => head.to_string(),
        "hopf" => "w3".into(),
        "robinson" => {
            let s: f64 = arg.unwrap_or("1").parse().map_err(|_| Error::UnknownKey(key.into()))?;
            format!("({s})*w1 + w3")
        }
        "quadric-radial" => "w0*w3 - w1*w2".into(),
        "quadric-circles" => "w0*w3 + w1*w2".into(),
        "quadric-coaxal" => "w0*w1 + w2*w3".into(),
        _ => return Err(Error::UnknownKey(key.into())),
    };
    TwistorSurface::parse(key, &text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coords::I;
    use crate::twistor::iota;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn rand_point(rng: &mut ChaCha8Rng) -> Point4C {
        Point4C::new(std::array::from_fn(|_| c(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5))))
    }

    #[test]
    fn load_validates_homogeneity() {
        assert!(TwistorSurface::new("bad", [([1, 0, 0, 0], ONE), ([1, 1, 0, 0], ONE)]).is_err());
        assert!(TwistorSurface::new("zero", [([1, 0, 0, 0], ONE), ([1, 0, 0, 0], -ONE)]).is_err());
        let s = TwistorSurface::new("dup", [([0, 0, 0, 1], ONE), ([0, 0, 0, 1], ONE)]).unwrap();
        assert_eq!(s.monomials().count(), 1);
        assert_eq!(*s.monomials().next().unwrap().1, c(2.0, 0.0));
    }

    #[test]
    fn json_round_trip() {
        let s = named_surface("quadric-circles").unwrap();
        let txt = s.to_json().to_string();
        assert_eq!(TwistorSurface::from_json(&txt).unwrap(), s);
        let bad = r#"{"name":"x","degree":2,"monomials":[{"e":[1,0,0,0],"c":[1,0]}]}"#;
        assert!(TwistorSurface::from_json(bad).is_err());
    }

    #[test]
    fn display_reads_back() {
        for key in ["quadric-radial", "quadric-coaxal", "robinson:2"] {
            let s = named_surface(key).unwrap();
            let t = TwistorSurface::parse(key, &s.to_string()).unwrap();
            assert_eq!(t, s, "{s}");
        }
    }

    #[test]
    fn hopf_root() {
        let s = named_surface("w3").unwrap();
        let p = Point4C::new([c(0.3, 0.1), c(-0.2, 0.5), c(1.0, 0.0), c(0.4, -0.3)]);
        let n = to_null(&p);
        let mu = kerr_eval(&s, &p, BranchSign::Plus).unwrap();
        assert!(mu.chordal(&MuPair::finite(-n.q2 / n.qt1)) < 1e-14);
    }

    #[test]
    fn radial_quadric_at_unit_x2() {
        let s = named_surface("quadric-radial").unwrap();
        let p = Point4C::minkowski(0.0, 0.0, 1.0, 0.0);
        let m = kerr_eval(&s, &p, BranchSign::Minus).unwrap();
        assert!(m.chordal(&MuPair::finite(-I)) < 1e-14);
        let m = kerr_eval(&s, &p, BranchSign::Plus).unwrap();
        assert!(m.chordal(&MuPair::finite(I)) < 1e-14);
    }

    #[test]
    fn w1_gives_zero() {
        let s = named_surface("w1").unwrap();
        let m = kerr_eval(&s, &Point4C::real([1.0, 2.0, 3.0, 4.0]), BranchSign::Plus).unwrap();
        assert!(m.chordal(&MuPair::finite(ZERO)) < 1e-15);
        assert_eq!(kerr_field(&s, BranchSign::Plus).unwrap().eval(&Point4C::ORIGIN, BranchSign::Plus).unwrap(), ZERO);
    }

    #[test]
    fn w0_has_only_the_root_at_infinity() {
        let s = named_surface("w0").unwrap();
        let m = kerr_eval(&s, &Point4C::ORIGIN, BranchSign::Plus).unwrap();
        assert!(m.chordal(&MuPair::INFINITY) < 1e-15);
        assert_eq!(kerr_field(&s, BranchSign::Plus).unwrap_err(), Error::AtInfinity);
    }

    #[test]
    fn degenerate_and_unsupported() {
        let s = named_surface("quadric-radial").unwrap();
        assert_eq!(kerr_eval(&s, &Point4C::ORIGIN, BranchSign::Plus).unwrap_err(), Error::DegenerateAtPoint);
        let cubic = TwistorSurface::parse("c", "w0^3 + w1^3 + w2^3 + w3^3").unwrap();
        assert_eq!(kerr_field(&cubic, BranchSign::Plus).unwrap_err(), Error::UnsupportedDegree(3));
    }

    #[test]
    fn closed_form_matches_pointwise_solver() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for key in ["w1", "w3", "robinson:0.7", "quadric-radial", "quadric-circles", "quadric-coaxal"] {
            let s = named_surface(key).unwrap();
            for b in [BranchSign::Plus, BranchSign::Minus] {
                let f = kerr_field(&s, b).unwrap();
                for _ in 0..300 {
                    let p = rand_point(&mut rng);
                    let (Ok(m), Ok(v)) = (kerr_eval(&s, &p, b), f.eval(&p, BranchSign::Plus)) else { continue };
                    assert!(m.chordal(&MuPair::finite(v)) < 1e-11, "{key} {b:?} {p:?}");
                }
            }
        }
    }

    #[test]
    fn iota_of_root_lies_on_surface() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let cubic = TwistorSurface::parse("cubic", "w0^3 - 2*w1^3 + w0*w2*w3 + i*w1*w2^2").unwrap();
        for key in ["w1", "w3", "robinson:1", "quadric-radial", "quadric-circles", "quadric-coaxal"] {
            let s = named_surface(key).unwrap();
            for _ in 0..100 {
                let p = rand_point(&mut rng);
                let m = kerr_eval(&s, &p, BranchSign::Plus).unwrap();
                assert!(surface_contains(&s, &iota(&p, &m).unwrap()));
            }
        }
        for _ in 0..100 {
            let p = rand_point(&mut rng);
            for b in [BranchSign::Plus, BranchSign::Minus] {
                let m = kerr_eval(&cubic, &p, b).unwrap();
                assert!(surface_residual(&cubic, &iota(&p, &m).unwrap()) < 1e-10);
            }
        }
    }

    #[test]
    fn contains_examples() {
        let s = named_surface("w3").unwrap();
        assert!(surface_contains(&s, &TwistorPoint::new([ONE, ZERO, c(5.0, 0.0), ZERO]).unwrap()));
        assert!(!surface_contains(&s, &TwistorPoint::new([ZERO, ZERO, ZERO, ONE]).unwrap()));
    }

    #[test]
    fn compose_with_cxsame_matrix() {
        let th = C64::from_polar(1.0, std::f64::consts::PI / 4.0);
        let pinv = [th.inv(), (I * th).inv(), (I * th).inv(), th.inv()];
        let m: [[C64; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|j| if i == j { pinv[i] } else { ZERO }));
        let t = named_surface("quadric-radial").unwrap().compose_linear(&m).unwrap();
        assert!(t.coeff_distance(&named_surface("quadric-circles").unwrap()) < 1e-14);
    }

    #[test]
    fn rejects_non_polynomials() {
        assert!(TwistorSurface::parse("s", "sqrt(w0)").is_err());
        assert!(TwistorSurface::parse("s", "w0/w1").is_err());
        assert!(TwistorSurface::parse("s", "q1*w0").is_err());
    }
}
