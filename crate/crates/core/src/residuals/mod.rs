//! Sampled residuals of the defining equations: horizontal conformality on ℝ³,
//! integrability of μ on ℂ⁴, ℝ⁴ and 𝕄⁴, (complex-)harmonic morphisms,
//! hyperbolic harmonicity, boundary orthogonality and fibre constancy.

mod sampler;
mod tensors;

pub use sampler::{Exclusion, SamplerSpec};
pub use tensors::{congruence_tensors, sfr_from_hm, shear_along_ray, tensors_of, HmDirection, Tensors};

use crate::coords::{cx, Metric, MuPair, Point4C, SliceKind, C64, I};
use crate::error::{Error, Result};
use crate::exec;
use crate::fieldexpr::{BranchSign, FieldExpr};
use crate::unify::DirectionField;
use serde::Serialize;

const MAX_LISTED: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentStat {
    pub name: String,
    pub max_abs: f64,
    pub mean_abs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub point: [[f64; 2]; 4],
    pub component: String,
    pub value: [f64; 2],
}

/// Summary of one residual sweep. Per sample the value is the largest modulus
/// over the components.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub condition: String,
    pub slice: SliceKind,
    pub seed: u64,
    #[serde(rename = "box")]
    pub bounds: Vec<[f64; 2]>,
    pub samples: usize,
    pub skipped: usize,
    pub tol: f64,
    pub max_abs: f64,
    pub mean_abs: f64,
    pub components: Vec<ComponentStat>,
    pub failure_count: usize,
    pub failures: Vec<Failure>,
    pub passed: bool,
}

impl ResidualReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report is plain data")
    }
}

/// Evaluates `f` at the sampled points. Points where any guard is within
/// τ_branch of a singularity are not drawn; points where `f` fails are skipped.
pub fn run<F>(condition: &str, names: &[&str], spec: &SamplerSpec, guards: &[FieldExpr], f: F) -> Result<ResidualReport>
where
    F: Fn(&Point4C) -> Result<Vec<C64>> + Sync + Send,
{
    let pts = spec.draw(guards)?;
    let vals = exec::map(spec.exec, &pts, |p| f(p).ok());
    let mut comps: Vec<ComponentStat> =
        names.iter().map(|n| ComponentStat { name: n.to_string(), max_abs: 0.0, mean_abs: 0.0 }).collect();
    let (mut n, mut sum, mut max) = (0usize, 0.0, 0.0f64);
    let mut failures = Vec::new();
    let mut failure_count = 0;
    for (p, v) in pts.iter().zip(&vals) {
        let Some(v) = v else { continue };
        n += 1;
        let mut worst = 0.0f64;
        for (k, z) in v.iter().enumerate() {
            let a = if z.is_finite() { z.norm() } else { f64::INFINITY };
            comps[k].max_abs = comps[k].max_abs.max(a);
            comps[k].mean_abs += a;
            worst = worst.max(a);
            if a > spec.tol {
                failure_count += 1;
                if failures.len() < MAX_LISTED {
                    failures.push(Failure { point: p.to_json(), component: names[k].to_string(), value: cx(*z) });
                }
            }
        }
        sum += worst;
        max = max.max(worst);
    }
    if n == 0 {
        return Err(Error::EmptyDomain);
    }
    for c in comps.iter_mut() {
        c.mean_abs /= n as f64;
    }
    Ok(ResidualReport {
        condition: condition.to_string(),
        slice: spec.slice.kind,
        seed: spec.seed,
        bounds: spec.full_bounds()?,
        samples: n,
        skipped: pts.len() - n,
        tol: spec.tol,
        max_abs: max,
        mean_abs: sum / n as f64,
        components: comps,
        failure_count,
        passed: failure_count == 0,
        failures,
    })
}

fn require(spec: &SamplerSpec, kind: SliceKind) -> Result<()> {
    if spec.slice.kind == kind {
        Ok(())
    } else {
        Err(Error::Invalid(format!("expected a {:?} slice, got {:?}", kind, spec.slice.kind)))
    }
}

fn bind(e: &FieldExpr, spec: &SamplerSpec) -> Result<FieldExpr> {
    e.resolve_conj(&spec.slice)
}

/// Σ_{i=1..3} (∂f/∂xᵢ)² on an ℝ³-slice.
pub fn check_hc3(f: &FieldExpr, spec: &SamplerSpec) -> Result<ResidualReport> {
    require(spec, SliceKind::R3)?;
    let f = bind(f, spec)?;
    run("hc3", &["hc3"], spec, std::slice::from_ref(&f), |p| {
        let j = f.eval_jet(p, BranchSign::Plus)?;
        Ok(vec![j.grad[1] * j.grad[1] + j.grad[2] * j.grad[2] + j.grad[3] * j.grad[3]])
    })
}

/// (∂q̃₁ − μ∂q₂)μ and (∂q̃₂ + μ∂q₁)μ; on ℝ⁴ the q̃ᵢ derivatives are the q̄ᵢ ones.
fn null_pair(mu: &FieldExpr, p: &Point4C) -> Result<Vec<C64>> {
    let j = mu.eval_jet(p, BranchSign::Plus)?;
    let m = j.value;
    let d = j.d_null();
    Ok(vec![d[1] - m * d[2], d[3] + m * d[0]])
}

/// Integrability of the α-plane distribution on ℂ⁴.
pub fn check_alpha(mu: &FieldExpr, spec: &SamplerSpec) -> Result<ResidualReport> {
    require(spec, SliceKind::C4)?;
    let mu = bind(mu, spec)?;
    run("alpha", &["ec1", "ec2"], spec, std::slice::from_ref(&mu), |p| null_pair(&mu, p))
}

/// Integrability of the almost Hermitian structure on ℝ⁴.
pub fn check_hermitian(mu: &FieldExpr, spec: &SamplerSpec) -> Result<ResidualReport> {
    require(spec, SliceKind::R4)?;
    let mu = bind(mu, spec)?;
    run("hermitian", &["er1", "er2"], spec, std::slice::from_ref(&mu), |p| null_pair(&mu, p))
}

/// Shear-free condition on 𝕄⁴ in v = x₁ + t, w = x₁ − t:
/// (∂v + iμ∂q₂)μ and (∂q̄₂ − iμ∂w)μ.
pub fn check_sfr(mu: &FieldExpr, spec: &SamplerSpec) -> Result<ResidualReport> {
    require(spec, SliceKind::M4)?;
    let mu = bind(mu, spec)?;
    run("sfr", &["em1", "em2"], spec, std::slice::from_ref(&mu), |p| {
        let j = mu.eval_jet(p, BranchSign::Plus)?;
        let m = j.value;
        let g = j.grad;
        let dv = 0.5 * (g[1] - I * g[0]);
        let dw = 0.5 * (g[1] + I * g[0]);
        let dz = 0.5 * (g[2] - I * g[3]);
        let dzb = 0.5 * (g[2] + I * g[3]);
        Ok(vec![dv + I * m * dz, dzb - I * m * dw])
    })
}

fn metric_slice(kind: Metric) -> SliceKind {
    match kind {
        Metric::Euclid4 => SliceKind::R4,
        Metric::Minkowski4 => SliceKind::M4,
        Metric::Complex4 => SliceKind::C4,
        Metric::Euclid3 => SliceKind::R3,
    }
}

pub fn condition_of_metric(kind: Metric) -> &'static str {
    match kind {
        Metric::Euclid4 => "hm-euclid",
        Metric::Minkowski4 => "hm-minkowski",
        Metric::Complex4 => "hm-complex",
        Metric::Euclid3 => "hm-euclid3",
    }
}

/// Laplacian and grad-square of φ for the metric of the sampled slice.
pub fn check_harmonic_morphism(phi: &FieldExpr, kind: Metric, spec: &SamplerSpec) -> Result<ResidualReport> {
    require(spec, metric_slice(kind))?;
    let phi = bind(phi, spec)?;
    run(condition_of_metric(kind), &["laplacian", "grad_square"], spec, std::slice::from_ref(&phi), |p| {
        let j = phi.eval_jet(p, BranchSign::Plus)?;
        Ok(vec![j.laplacian(kind), j.grad_square(kind)])
    })
}

/// (x₀ − Re a₀)·Σ ∂²φ/∂xᵢ² − 2∂φ/∂x₀ and Σ (∂φ/∂xᵢ)² on the ℝ⁴-slice through a.
pub fn check_hyperbolic_hm(phi: &FieldExpr, spec: &SamplerSpec) -> Result<ResidualReport> {
    require(spec, SliceKind::R4)?;
    let phi = bind(phi, spec)?;
    let a0 = spec.slice.basepoint.x[0];
    run("hyp", &["hyp-ha", "hwc"], spec, std::slice::from_ref(&phi), |p| {
        let j = phi.eval_jet(p, BranchSign::Plus)?;
        let h = (p.x[0] - a0).re;
        let lap: C64 = (0..4).map(|k| j.hess[k][k]).sum();
        let gs: C64 = j.grad.iter().map(|g| g * g).sum();
        Ok(vec![lap * h - 2.0 * j.grad[0], gs])
    })
}

/// ∂φ/∂x₀ along an ℝ³-slice.
pub fn check_boundary_orthogonality(phi: &FieldExpr, spec: &SamplerSpec) -> Result<ResidualReport> {
    require(spec, SliceKind::R3)?;
    let phi = bind(phi, spec)?;
    run("orth", &["d0"], spec, std::slice::from_ref(&phi), |p| Ok(vec![phi.eval_jet(p, BranchSign::Plus)?.grad[0]]))
}

/// Derivatives of φ along the α-plane basis {w₀∂q̃₁ − w₁∂q₂, w₀∂q̃₂ + w₁∂q₁}
/// of μ, with [w₀, w₁] of unit norm.
pub fn check_fibre(phi: &FieldExpr, mu: &FieldExpr, spec: &SamplerSpec) -> Result<ResidualReport> {
    let phi = bind(phi, spec)?;
    let mu = bind(mu, spec)?;
    run("fibre", &["nt0-a", "nt0-b"], spec, &[phi.clone(), mu.clone()], |p| {
        let w = MuPair::finite(mu.eval(p, BranchSign::Plus)?).normalized();
        let d = phi.eval_jet(p, BranchSign::Plus)?.d_null();
        Ok(vec![w.w0 * d[1] - w.w1 * d[2], w.w0 * d[3] + w.w1 * d[0]])
    })
}

/// Shear of a congruence at sampled points of 𝕄⁴; `field` must use the
/// sampler's basepoint.
pub fn check_shear(field: &dyn DirectionField, spec: &SamplerSpec, guards: &[FieldExpr]) -> Result<ResidualReport> {
    require(spec, SliceKind::M4)?;
    let guards: Vec<FieldExpr> = guards.iter().map(|g| bind(g, spec)).collect::<Result<_>>()?;
    run("shear", &["shear_norm"], spec, &guards, |p| {
        let y = spec.slice.coords(p);
        let t = congruence_tensors(field, y[0], [y[1], y[2], y[3]])?;
        Ok(vec![C64::new(t.shear_norm, 0.0)])
    })
}

#[cfg(test)]
mod tests;
