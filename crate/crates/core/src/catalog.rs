//! The example catalog: conformal foliations of ℝ³, Hermitian structures,
//! shear-free ray congruences and hyperbolic harmonic morphisms, each with
//! its sampling box, singular-locus exclusions and the conditions it passes.

use crate::coords::{mu_of_direction, Metric, Point4C, SliceKind, SliceSpec, C64};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fieldexpr::{BranchSign, FieldExpr};
use crate::hyperbolic::{restrict_boundary, solve_superminimal, Family, PhiSolution, SurfaceChart};
use crate::kerr::TwistorSurface;
use crate::residuals::{
    check_alpha, check_boundary_orthogonality, check_fibre, check_harmonic_morphism, check_hc3, check_hermitian,
    check_hyperbolic_hm, check_sfr, check_shear, Exclusion, ResidualReport, SamplerSpec,
};
use crate::unify::MuField;
use serde::Serialize;

/// Catalog keys; `bunch` and `robinson` take an optional `:<real>` parameter.
pub const KEYS: [&str; 9] = [
    "linear-null",
    "bunch",
    "radial",
    "circles",
    "hopf",
    "robinson",
    "quadric-radial",
    "quadric-circles",
    "quadric-coaxal",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Condition {
    /// Σ(∂f/∂xᵢ)² = 0 on ℝ³.
    Hc3,
    /// α-plane integrability on ℂ⁴.
    Alpha,
    /// Hermitian integrability on ℝ⁴.
    Hermitian,
    /// Shear-free condition on 𝕄⁴.
    Sfr,
    /// μ is a harmonic morphism on ℝ⁴.
    HmEuclid,
    /// μ is a harmonic morphism on 𝕄⁴.
    HmMinkowski,
    /// μ is a complex-harmonic morphism on ℂ⁴.
    HmComplex,
    /// φₐ is a hyperbolic harmonic morphism on the half-space x₀ − a₀ > 0.
    Hyperbolic,
    /// ∂φₐ/∂x₀ = 0 on ℝ³ₐ.
    Orth,
    /// φₐ is constant along the α-planes of μ.
    Fibre,
    /// The μ-congruence has vanishing shear on 𝕄⁴.
    Shear,
}

impl Condition {
    pub const ALL: [Condition; 11] = [
        Condition::Hc3,
        Condition::Alpha,
        Condition::Hermitian,
        Condition::Sfr,
        Condition::HmEuclid,
        Condition::HmMinkowski,
        Condition::HmComplex,
        Condition::Hyperbolic,
        Condition::Orth,
        Condition::Fibre,
        Condition::Shear,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Condition::Hc3 => "hc3",
            Condition::Alpha => "alpha",
            Condition::Hermitian => "hermitian",
            Condition::Sfr => "sfr",
            Condition::HmEuclid => "hm-euclid",
            Condition::HmMinkowski => "hm-minkowski",
            Condition::HmComplex => "hm-complex",
            Condition::Hyperbolic => "hyp",
            Condition::Orth => "orth",
            Condition::Fibre => "fibre",
            Condition::Shear => "shear",
        }
    }

    pub fn parse(s: &str) -> Result<Condition> {
        Condition::ALL.into_iter().find(|c| c.id() == s).ok_or_else(|| Error::UnknownKey(s.to_string()))
    }

    pub fn slice_kind(self) -> SliceKind {
        match self {
            Condition::Hc3 | Condition::Orth => SliceKind::R3,
            Condition::Alpha | Condition::HmComplex | Condition::Fibre => SliceKind::C4,
            Condition::Hermitian | Condition::HmEuclid | Condition::Hyperbolic => SliceKind::R4,
            Condition::Sfr | Condition::HmMinkowski | Condition::Shear => SliceKind::M4,
        }
    }

    fn needs_mu(self) -> bool {
        matches!(
            self,
            Condition::Alpha
                | Condition::Hermitian
                | Condition::Sfr
                | Condition::HmEuclid
                | Condition::HmMinkowski
                | Condition::HmComplex
                | Condition::Shear
                | Condition::Fibre
        )
    }
}

/// Settings for one verification sweep.
#[derive(Debug, Clone, Copy)]
pub struct Sweep {
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub exec: Exec,
    /// Overrides the entry's default box when set.
    pub bounds: Option<[f64; 2]>,
}

impl Default for Sweep {
    fn default() -> Self {
        Sweep { samples: 500, seed: 42, tol: 1e-9, exec: Exec::default(), bounds: None }
    }
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub key: String,
    pub title: &'static str,
    /// A horizontally conformal function on ℝ³ whose level sets are the leaves.
    pub f: Option<FieldExpr>,
    /// The μ-field on ℂ⁴ (restricted to each real slice by evaluation).
    pub mu: Option<FieldExpr>,
    /// The map checked by the harmonic-morphism conditions; μ when absent.
    pub phi: Option<FieldExpr>,
    pub surface: Option<TwistorSurface>,
    /// The twistor-surface family whose Kerr μ this entry's μ is.
    pub family: Option<Family>,
    pub branch: BranchSign,
    /// φₐ at a₀ = 0 for the twistor-surface families.
    pub hyperbolic: Option<PhiSolution>,
    pub bounds: [f64; 2],
    /// Minimum distance of samples from cuts and poles.
    pub margin: f64,
    pub singular: &'static str,
    pub conditions: Vec<Condition>,
}

fn e(s: &str) -> FieldExpr {
    FieldExpr::parse(s).expect("catalog expression")
}

fn param(arg: Option<&str>, key: &str) -> Result<f64> {
    match arg {
        None => Ok(0.0),
        Some(a) => a.trim().parse().map_err(|_| Error::UnknownKey(key.to_string())),
    }
}

const MU_CONDITIONS: [Condition; 7] = [
    Condition::Alpha,
    Condition::Hermitian,
    Condition::Sfr,
    Condition::HmEuclid,
    Condition::HmMinkowski,
    Condition::HmComplex,
    Condition::Shear,
];

fn with_mu(mut first: Vec<Condition>) -> Vec<Condition> {
    first.extend(MU_CONDITIONS);
    first
}

fn from_family(key: &str, title: &'static str, family: Family, singular: &'static str) -> Result<CatalogEntry> {
    let chart = SurfaceChart::of(family)?;
    let sol = solve_superminimal(&chart, C64::new(0.0, 0.0))?;
    let mut conds = with_mu(vec![Condition::Hc3]);
    conds.extend([Condition::Hyperbolic, Condition::Orth, Condition::Fibre]);
    Ok(CatalogEntry {
        key: key.to_string(),
        title,
        f: Some(restrict_boundary(&sol)?),
        mu: Some(sol.mu.clone()),
        phi: None,
        surface: Some(chart.surface.clone()),
        family: Some(family),
        branch: chart.branch,
        hyperbolic: Some(sol),
        bounds: [-2.0, 2.0],
        margin: 0.1,
        singular,
        conditions: conds,
    })
}

fn with_family(family: Family, mut en: CatalogEntry) -> CatalogEntry {
    en.family = Some(family);
    en
}

/// Looks up a catalog entry; `bunch:c` and `robinson:s` set the parameter.
pub fn entry(key: &str) -> Result<CatalogEntry> {
    let (head, arg) = match key.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (key, None),
    };
    let plain = |title, f: Option<FieldExpr>, mu: Option<FieldExpr>, singular, conditions| CatalogEntry {
        key: key.to_string(),
        title,
        f,
        mu,
        phi: None,
        surface: None,
        family: None,
        branch: BranchSign::Plus,
        hyperbolic: None,
        bounds: [-2.0, 2.0],
        margin: 0.1,
        singular,
        conditions,
    };
    let entry = match (head, arg) {
        ("linear-null", None) => {
            let u = mu_of_direction([0.0, 0.0, 1.0]);
            let mu = FieldExpr::c(u.w1 / u.w0);
            plain(
                "parallel lines: f = x1 + i x2",
                Some(e("x1 + i*x2")),
                Some(mu),
                "none",
                with_mu(vec![Condition::Hc3]),
            )
        }
        ("bunch", _) => {
            let c = param(arg, key)?;
            let f = e(&format!("((x1 + ({c}))^2 + x2^2 + x3^2)/(x2 + i*x3)"));
            let mu = e(&format!("-q2/(qt1 - i*({c}))"));
            plain(
                "circles through (-c, 0, 0) tangent to the x1-axis",
                Some(f),
                Some(mu),
                "x1-axis (x2 = x3 = 0); the point (-c, 0, 0)",
                with_mu(vec![Condition::Hc3]),
            )
        }
        ("radial", None) => with_family(
            Family::Radial,
            plain(
                "radial lines from the origin",
                Some(e("(x2 + i*x3)/(x1 + sqrt(x1^2 + x2^2 + x3^2))")),
                Some(e("-i*(x2 + i*x3)/(x1 + sqrt(x1^2 + x2^2 + x3^2))")),
                "the line x1 = x2 = x3 = 0 and the negative x1-axis",
                with_mu(vec![Condition::Hc3]),
            ),
        ),
        ("circles", None) => with_family(
            Family::Circles,
            plain(
                "circles about the x1-axis; involutes of circles on later slices",
                Some(e("-i*x1 + sqrt(x2^2 + x3^2)")),
                Some(e("(x0 + sqrt(x0^2 + x2^2 + x3^2))/(x2 - i*x3)")),
                "the cone x2^2 + x3^2 <= t^2 on Minkowski slices",
                with_mu(vec![Condition::Hc3]),
            ),
        ),
        ("hopf", None) => with_family(
            Family::Linear { s: 0.0 },
            plain(
                "Hopf fibration; projects to the bunch foliation",
                Some(e("(x1^2 + x2^2 + x3^2)/(x2 + i*x3)")),
                Some(e("-q2/qt1")),
                "qt1 = 0 (the plane x0 = x1 = 0 on real slices)",
                with_mu(vec![Condition::Hc3]),
            ),
        ),
        ("robinson", _) => {
            let s = param(arg, key)?;
            from_family(key, "Robinson congruence of s w1 + w3 = 0", Family::Linear { s }, "qt1 + s = 0")?
        }
        ("quadric-radial", None) => {
            from_family(key, "quadric w0 w3 - w1 w2 = 0: radial lines", Family::Radial, "x1 = x2 = x3 = 0")?
        }
        ("quadric-circles", None) => from_family(
            key,
            "quadric w0 w3 + w1 w2 = 0: circles and involutes",
            Family::Circles,
            "x0^2 + x2^2 + x3^2 on its cut",
        )?,
        ("quadric-coaxal", None) => from_family(
            key,
            "quadric w0 w1 + w2 w3 = 0: coaxal circles",
            Family::Coaxal,
            "the discriminant cut of the Kerr root",
        )?,
        _ => return Err(Error::UnknownKey(key.to_string())),
    };
    Ok(entry)
}

/// An ad hoc entry from user expressions: μ gets the μ-conditions, φ the
/// harmonic-morphism conditions and f the ℝ³ condition.
pub fn custom(mu: Option<FieldExpr>, phi: Option<FieldExpr>, f: Option<FieldExpr>) -> Result<CatalogEntry> {
    let mut conditions = Vec::new();
    if f.is_some() {
        conditions.push(Condition::Hc3);
    }
    if mu.is_some() {
        conditions.extend(MU_CONDITIONS);
    } else if phi.is_some() {
        conditions.extend([Condition::HmEuclid, Condition::HmMinkowski, Condition::HmComplex]);
    }
    if conditions.is_empty() {
        return Err(Error::Invalid("no expression given".into()));
    }
    Ok(CatalogEntry {
        key: "custom".into(),
        title: "user expressions",
        f,
        mu,
        phi,
        surface: None,
        family: None,
        branch: BranchSign::Plus,
        hyperbolic: None,
        bounds: [-2.0, 2.0],
        margin: 0.1,
        singular: "unknown",
        conditions,
    })
}

impl CatalogEntry {
    pub fn applies(&self, c: Condition) -> bool {
        self.conditions.contains(&c)
    }

    fn phi(&self) -> Result<&PhiSolution> {
        self.hyperbolic.as_ref().ok_or_else(|| Error::Invalid(format!("{} has no hyperbolic map", self.key)))
    }

    fn hm_map(&self) -> Result<&FieldExpr> {
        match &self.phi {
            Some(p) => Ok(p),
            None => self.mu(),
        }
    }

    fn mu(&self) -> Result<&FieldExpr> {
        self.mu.as_ref().ok_or_else(|| Error::Invalid(format!("{} has no mu-field", self.key)))
    }

    /// The sampler for condition `c` with this entry's box and exclusions.
    pub fn sampler(&self, c: Condition, sweep: &Sweep) -> Result<SamplerSpec> {
        let [lo, hi] = sweep.bounds.unwrap_or(self.bounds);
        let kind = c.slice_kind();
        let base = match (&self.hyperbolic, c) {
            (Some(sol), Condition::Hyperbolic | Condition::Orth) => sol.basepoint(),
            _ => Point4C::ORIGIN,
        };
        let mut spec =
            SamplerSpec::on(kind, base, lo, hi, sweep.samples, sweep.seed).with_tol(sweep.tol).with_exec(sweep.exec);
        let margin = if c == Condition::Fibre { self.margin.max(0.5) } else { self.margin };
        let guard = match c {
            Condition::Hc3 => self.f.clone(),
            Condition::Hyperbolic | Condition::Orth => Some(self.phi()?.phi.clone()),
            Condition::Fibre => Some(self.phi()?.phi.clone() + self.mu()?.clone()),
            Condition::HmEuclid | Condition::HmMinkowski | Condition::HmComplex => self.hm_map().ok().cloned(),
            _ => self.mu.clone(),
        };
        if let Some(g) = guard {
            spec = spec.exclude(Exclusion::MarginAtLeast(g, margin));
        }
        if c == Condition::Hyperbolic {
            let mut b = vec![[lo, hi]; 4];
            b[0] = [margin.max(0.1), hi.max(margin.max(0.1) + 1.0)];
            spec = spec.with_bounds(b);
        }
        if c.needs_mu() && self.key == "circles" && kind == SliceKind::M4 {
            spec = spec.exclude(Exclusion::ReAtLeast(e("x0^2 + x2^2 + x3^2"), margin));
        }
        Ok(spec)
    }

    pub fn verify(&self, c: Condition, sweep: &Sweep) -> Result<ResidualReport> {
        let spec = self.sampler(c, sweep)?;
        match c {
            Condition::Hc3 => {
                let f = self.f.as_ref().ok_or_else(|| Error::Invalid(format!("{} has no f", self.key)))?;
                check_hc3(f, &spec)
            }
            Condition::Alpha => check_alpha(self.mu()?, &spec),
            Condition::Hermitian => check_hermitian(self.mu()?, &spec),
            Condition::Sfr => check_sfr(self.mu()?, &spec),
            Condition::HmEuclid => check_harmonic_morphism(self.hm_map()?, Metric::Euclid4, &spec),
            Condition::HmMinkowski => check_harmonic_morphism(self.hm_map()?, Metric::Minkowski4, &spec),
            Condition::HmComplex => check_harmonic_morphism(self.hm_map()?, Metric::Complex4, &spec),
            Condition::Hyperbolic => check_hyperbolic_hm(&self.phi()?.phi, &spec),
            Condition::Orth => check_boundary_orthogonality(&self.phi()?.phi, &spec),
            Condition::Fibre => check_fibre(&self.phi()?.phi, self.mu()?, &spec),
            Condition::Shear => {
                let mu = self.mu()?;
                let field = MuField::new(mu, spec.slice.basepoint)?;
                check_shear(&field, &spec, std::slice::from_ref(mu))
            }
        }
    }

    /// Every expected condition, in catalog order.
    pub fn verify_all(&self, sweep: &Sweep) -> Result<Vec<ResidualReport>> {
        self.conditions.iter().map(|&c| self.verify(c, sweep)).collect()
    }

    /// The ℝ³-slice at time t through the origin.
    pub fn slice_at(&self, t: f64) -> SliceSpec {
        SliceSpec::new(SliceKind::R3, Point4C::minkowski(t, 0.0, 0.0, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> Sweep {
        Sweep { samples: 120, ..Sweep::default() }
    }

    #[test]
    fn every_entry_passes_its_conditions() {
        for key in KEYS {
            let en = entry(key).unwrap();
            for r in en.verify_all(&quick()).unwrap() {
                assert!(r.passed, "{key} {}: {}", r.condition, r.max_abs);
                assert!(r.samples >= 100, "{key} {}: {} samples", r.condition, r.samples);
            }
        }
    }

    #[test]
    fn parameters_parse() {
        let b = entry("bunch:0.5").unwrap();
        assert_eq!(b.key, "bunch:0.5");
        let r = entry("robinson:1").unwrap();
        assert_eq!(r.hyperbolic.unwrap().chart.family, Some(Family::Linear { s: 1.0 }));
        assert!(matches!(entry("bunch:x"), Err(Error::UnknownKey(_))));
        assert!(matches!(entry("nope"), Err(Error::UnknownKey(_))));
        assert!(matches!(entry("radial:2"), Err(Error::UnknownKey(_))));
    }

    #[test]
    fn shifted_bunch_passes() {
        let en = entry("bunch:0.7").unwrap();
        for r in en.verify_all(&quick()).unwrap() {
            assert!(r.passed, "{}: {}", r.condition, r.max_abs);
        }
    }

    #[test]
    fn negative_controls_fail_by_a_wide_margin() {
        let en = custom(Some(e("x1")), None, None).unwrap();
        let r = en.verify(Condition::Hermitian, &quick()).unwrap();
        assert!(!r.passed && r.max_abs >= 0.5);
        let en = custom(None, Some(e("x0")), None).unwrap();
        for c in [Condition::HmEuclid, Condition::HmComplex] {
            let r = en.verify(c, &quick()).unwrap();
            assert!(!r.passed && r.max_abs >= 0.5, "{}", r.max_abs);
        }
        assert!(custom(None, None, None).is_err());
    }

    #[test]
    fn family_mu_agrees_with_the_entry_mu() {
        for key in ["radial", "circles", "hopf"] {
            let en = entry(key).unwrap();
            let chart = SurfaceChart::of(en.family.unwrap()).unwrap();
            let kerr = chart.mu().unwrap();
            let mu = en.mu.as_ref().unwrap();
            let spec = en.sampler(Condition::HmEuclid, &quick()).unwrap();
            for p in spec.draw(&[]).unwrap() {
                let (a, b) = (mu.eval(&p, BranchSign::Plus).unwrap(), kerr.eval(&p, BranchSign::Plus).unwrap());
                assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()), "{key}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn condition_ids_round_trip() {
        for c in Condition::ALL {
            assert_eq!(Condition::parse(c.id()).unwrap(), c);
        }
        assert!(Condition::parse("xyz").is_err());
    }

    #[test]
    fn circles_mu_is_the_degenerate_minkowski_formula() {
        let en = entry("circles").unwrap();
        let mu = en.mu.unwrap();
        let slice = SliceSpec::at_origin(SliceKind::M4);
        for (t, x1, x2, x3) in [(0.5, 0.1, 1.0, 0.3), (-0.7, 2.0, -0.4, 1.1)] {
            let p = Point4C::minkowski(t, x1, x2, x3);
            let r: f64 = (x2 * x2 + x3 * x3 - t * t).sqrt();
            let ex = e(&format!("({r}/(x2^2 + x3^2))*((x2 + (t/({r}))*x3) + i*(x3 - (t/({r}))*x2))"));
            let want = ex.resolve_conj(&slice).unwrap().eval(&p, BranchSign::Plus).unwrap();
            let got = mu.eval(&p, BranchSign::Plus).unwrap();
            assert!((got - want).norm() < 1e-13, "{got} vs {want}");
        }
    }
}
