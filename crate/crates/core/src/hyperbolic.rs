//! Hyperbolic harmonic morphisms from twistor surfaces: the contact form Θₐ,
//! its pullback to a surface chart, the superminimality equation
//! Θₐ(∂ζ)·∂ζ̃/∂η − Θₐ(∂η)·∂ζ̃/∂ζ = 0, and the composed map φₐ on ℂ⁴.

use crate::coords::{Point4C, SliceKind, SliceSpec, C64};
use crate::error::{Error, Result};
use crate::fieldexpr::{BranchSign, FieldExpr};
use crate::kerr::{kerr_field, kerr_field_rotated, named_surface, TwistorSurface};
use crate::residuals::{run, Exclusion, ResidualReport, SamplerSpec};
use crate::twistor::TwistorPoint;

pub use crate::residuals::check_boundary_orthogonality;

/// Θₐ = −2a₀(w₁dw₀ − w₀dw₁) + w₁dw₂ − w₂dw₁ − w₀dw₃ + w₃dw₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactForm {
    pub a0: C64,
}

impl ContactForm {
    pub fn new(a0: C64) -> Self {
        ContactForm { a0 }
    }

    /// Coefficients of dw₀..dw₃ at w.
    pub fn coeffs(&self, w: &[C64; 4]) -> [C64; 4] {
        let a = self.a0;
        [-2.0 * a * w[1] + w[3], 2.0 * a * w[0] - w[2], w[1], -w[0]]
    }

    pub fn coeff_exprs(&self, w: &[FieldExpr; 4]) -> [FieldExpr; 4] {
        let a = FieldExpr::c(self.a0);
        [
            a.clone() * -2.0 * w[1].clone() + w[3].clone(),
            a * 2.0 * w[0].clone() - w[2].clone(),
            w[1].clone(),
            -w[0].clone(),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// s·w₁ + w₃ = 0, chart [1, ζ, η, −sζ].
    Linear { s: f64 },
    /// w₀w₃ − w₁w₂ = 0, chart [1, ζ, η, ζη].
    Radial,
    /// w₀w₃ + w₁w₂ = 0, chart [1, η, −ζ, ζη].
    Circles,
    /// w₀w₁ + w₂w₃ = 0, chart [1, ζη, −η, ζ].
    Coaxal,
}

/// Local coordinates (ζ, η) on a twistor surface.
#[derive(Debug, Clone)]
pub struct SurfaceChart {
    pub family: Option<Family>,
    pub surface: TwistorSurface,
    /// [w₀..w₃] as expressions in ζ, η.
    pub w: [FieldExpr; 4],
    /// ζ and η as expressions in w₀..w₃ (slots x₀..x₃).
    pub coords: [FieldExpr; 2],
    /// Kerr branch composed with the chart.
    pub branch: BranchSign,
    /// Use the i·√(−disc) form of the Kerr root.
    pub rotated: bool,
}

impl SurfaceChart {
    pub fn new(surface: TwistorSurface, w: [FieldExpr; 4], coords: [FieldExpr; 2], branch: BranchSign) -> Self {
        SurfaceChart { family: None, surface, w, coords, branch, rotated: false }
    }

    pub fn of(family: Family) -> Result<SurfaceChart> {
        let (z, h) = (FieldExpr::zeta(), FieldExpr::eta());
        let one = FieldExpr::re(1.0);
        let x = FieldExpr::x;
        let (surface, w, coords, branch) = match family {
            Family::Linear { s } => {
                (named_surface(&format!("robinson:{s}"))?, [one, z.clone(), h, z * -s], [x(1), x(2)], BranchSign::Plus)
            }
            Family::Radial => {
                (named_surface("quadric-radial")?, [one, z.clone(), h.clone(), z * h], [x(1), x(2)], BranchSign::Minus)
            }
            Family::Circles => (
                named_surface("quadric-circles")?,
                [one, h.clone(), -z.clone(), z * h],
                [-x(2), x(1)],
                BranchSign::Minus,
            ),
            Family::Coaxal => {
                (named_surface("quadric-coaxal")?, [one, z.clone() * h.clone(), -h, z], [x(3), -x(2)], BranchSign::Plus)
            }
        };
        Ok(SurfaceChart { family: Some(family), surface, w, coords, branch, rotated: family == Family::Radial })
    }

    pub fn with_branch(mut self, branch: BranchSign) -> Self {
        self.branch = branch;
        self
    }

    /// The Kerr μ of the surface on the chart's branch.
    pub fn mu(&self) -> Result<FieldExpr> {
        if self.rotated {
            kerr_field_rotated(&self.surface, self.branch)
        } else {
            kerr_field(&self.surface, self.branch)
        }
    }

    /// The twistor at chart coordinates (ζ, η).
    pub fn point(&self, zeta: C64, eta: C64) -> Result<TwistorPoint> {
        let p = chart_point(zeta, eta);
        let w = [0, 1, 2, 3].map(|k| self.w[k].eval(&p, BranchSign::Plus));
        TwistorPoint::new([w[0].clone()?, w[1].clone()?, w[2].clone()?, w[3].clone()?])
    }
}

/// Evaluation point for expressions in (ζ, η).
pub fn chart_point(zeta: C64, eta: C64) -> Point4C {
    let z = C64::new(0.0, 0.0);
    Point4C::new([zeta, eta, z, z])
}

/// (Θₐ(∂/∂ζ), Θₐ(∂/∂η)) along the chart.
pub fn theta_pullback(chart: &SurfaceChart, a0: C64) -> Result<[FieldExpr; 2]> {
    let c = ContactForm::new(a0).coeff_exprs(&chart.w);
    let along = |k: usize| -> Result<FieldExpr> {
        let mut acc = FieldExpr::re(0.0);
        for (ci, wi) in c.iter().zip(&chart.w) {
            acc = acc + ci.clone() * wi.derivative(k)?;
        }
        Ok(acc)
    };
    Ok([along(0)?, along(1)?])
}

/// ζ̃ in (ζ, η) and the composed map φₐ on ℂ⁴.
#[derive(Debug, Clone)]
pub struct PhiSolution {
    pub chart: SurfaceChart,
    pub a0: C64,
    pub zeta_tilde: FieldExpr,
    /// The Kerr μ of the chart's surface on its branch.
    pub mu: FieldExpr,
    pub phi: FieldExpr,
}

impl PhiSolution {
    /// a = (a₀, 0, 0, 0).
    pub fn basepoint(&self) -> Point4C {
        let z = C64::new(0.0, 0.0);
        Point4C::new([self.a0, z, z, z])
    }

    pub fn boundary_slice(&self) -> SliceSpec {
        SliceSpec::new(SliceKind::R3, self.basepoint())
    }

    pub fn interior_slice(&self) -> SliceSpec {
        SliceSpec::new(SliceKind::R4, self.basepoint())
    }
}

fn closed_form(family: Family, a0: C64) -> FieldExpr {
    let (z, h) = (FieldExpr::zeta(), FieldExpr::eta());
    let a = FieldExpr::c(a0);
    match family {
        Family::Linear { s } => -(a * -2.0 + h - s) / z,
        Family::Radial => z,
        Family::Circles => z - a * h.ln(),
        Family::Coaxal => {
            if a0 == C64::new(0.0, 0.0) {
                return z;
            }
            let c = (a0 * a0 + 1.0).sqrt();
            if c.norm() <= 1e-12 {
                return z * (FieldExpr::c(-2.0 * a0) / (h + a)).exp();
            }
            let k = a0 / c;
            let ratio = (h.clone() + a.clone() + c) / (h + a - c);
            z * (ratio.ln() * -k).exp()
        }
    }
}

/// Closed-form ζ̃ for the four catalog families, composed with the chart
/// coordinates of the twistor w(p) = [1, μ, q₁ − μq̃₂, q₂ + μq̃₁].
pub fn solve_superminimal(chart: &SurfaceChart, a0: C64) -> Result<PhiSolution> {
    let family = chart.family.ok_or_else(|| Error::UnsupportedFamily(chart.surface.name.clone()))?;
    let zeta_tilde = closed_form(family, a0);
    let mu = chart.mu()?;
    let phi = compose_phi(chart, &zeta_tilde, &mu);
    Ok(PhiSolution { chart: chart.clone(), a0, zeta_tilde, mu, phi })
}

/// φ(p) = ζ̃(ζ(w(p)), η(w(p))).
pub fn compose_phi(chart: &SurfaceChart, zeta_tilde: &FieldExpr, mu: &FieldExpr) -> FieldExpr {
    let w = [
        FieldExpr::re(1.0),
        mu.clone(),
        FieldExpr::q1() - mu.clone() * FieldExpr::qt2(),
        FieldExpr::q2() + mu.clone() * FieldExpr::qt1(),
    ];
    let zeta = chart.coords[0].substitute(&w);
    let eta = chart.coords[1].substitute(&w);
    let zero = FieldExpr::re(0.0);
    zeta_tilde.substitute(&[zeta, eta, zero.clone(), zero])
}

/// φₐ as a function on ℝ³ₐ; sample it on [`PhiSolution::boundary_slice`].
pub fn restrict_boundary(sol: &PhiSolution) -> Result<FieldExpr> {
    sol.phi.resolve_conj(&sol.boundary_slice())
}

/// Sampler over chart coordinates: ζ, η complex in the box, kept `margin`
/// away from the cuts and poles of ζ̃ and of the pulled-back form.
pub fn chart_sampler(
    sol: &PhiSolution,
    lo: f64,
    hi: f64,
    samples: usize,
    seed: u64,
    margin: f64,
) -> Result<SamplerSpec> {
    let [tz, th] = theta_pullback(&sol.chart, sol.a0)?;
    let spec = SamplerSpec::on(SliceKind::C4, Point4C::ORIGIN, lo, hi, samples, seed)
        .with_bounds(vec![[lo, hi], [lo, hi], [lo, hi], [lo, hi], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]])
        .exclude(Exclusion::MarginAtLeast(sol.zeta_tilde.clone() + tz + th, margin));
    Ok(spec)
}

/// Residual of Θₐ(∂ζ)·ζ̃_η − Θₐ(∂η)·ζ̃_ζ over chart samples.
pub fn ode_residual(sol: &PhiSolution, spec: &SamplerSpec) -> Result<ResidualReport> {
    let [tz, th] = theta_pullback(&sol.chart, sol.a0)?;
    let zt = sol.zeta_tilde.clone();
    run("ode", &["E"], spec, std::slice::from_ref(&zt), |p| {
        let j = zt.eval_jet(p, BranchSign::Plus)?;
        let a = tz.eval(p, BranchSign::Plus)?;
        let b = th.eval(p, BranchSign::Plus)?;
        Ok(vec![a * j.grad[1] - b * j.grad[0]])
    })
}
