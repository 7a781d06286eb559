//! Twist, shear and expansion of a congruence, and the congruence of a
//! harmonic morphism on 𝕄⁴.

use crate::coords::{mu_of_direction, Metric, MuPair, Point4C, SliceKind, SliceSpec, I};
use crate::error::{Error, Result};
use crate::fieldexpr::{BranchSign, FieldExpr};
use crate::unify::{mu_to_frame, DirJet, DirectionField};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tensors {
    pub twist: f64,
    pub shear_norm: f64,
    pub expansion: f64,
}

/// Screen basis {e₂, e₃} ⊥ U inside the slice; with B_ij = g(∇_{eᵢ}w, e_j):
/// twist ½(B₃₂ − B₂₃), shear the trace-free symmetric part of −B, expansion tr(−B).
pub fn tensors_of(jet: &DirJet) -> Result<Tensors> {
    let u = jet.u;
    let n = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    if (n - 1.0).abs() > 1e-8 {
        return Err(Error::DegenerateScreen);
    }
    let f = mu_to_frame(&mu_of_direction(u.map(|v| v / n)));
    let e = [[f.e[2][1], f.e[2][2], f.e[2][3]], [f.e[3][1], f.e[3][2], f.e[3][3]]];
    let along = |v: &[f64; 3]| -> [f64; 3] { std::array::from_fn(|b| (0..3).map(|a| v[a] * jet.du[a + 1][b]).sum()) };
    let dot = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let b: [[f64; 2]; 2] = std::array::from_fn(|i| {
        let d = along(&e[i]);
        std::array::from_fn(|j| dot(&d, &e[j]))
    });
    let twist = 0.5 * (b[1][0] - b[0][1]);
    let expansion = -(b[0][0] + b[1][1]);
    let s00 = -b[0][0] - 0.5 * expansion;
    let s01 = -0.5 * (b[0][1] + b[1][0]);
    let shear_norm = (2.0 * s00 * s00 + 2.0 * s01 * s01).sqrt();
    Ok(Tensors { twist, shear_norm, expansion })
}

pub fn congruence_tensors(field: &dyn DirectionField, t: f64, x: [f64; 3]) -> Result<Tensors> {
    tensors_of(&field.dir(t, x)?)
}

/// Tensors at the points (t + T, x + T·U) of the ray through (t, x).
pub fn shear_along_ray(field: &dyn DirectionField, t: f64, x: [f64; 3], params: &[f64]) -> Result<Vec<Tensors>> {
    let u = field.dir(t, x)?.u;
    params
        .iter()
        .map(|&s| congruence_tensors(field, t + s, [x[0] + s * u[0], x[1] + s * u[1], x[2] + s * u[2]]))
        .collect()
}

/// The null direction a harmonic morphism on 𝕄⁴ determines at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HmDirection {
    pub mu: MuPair,
    /// dφ has real rank 1, so ker dφ = W^⊥ for the returned W.
    pub degenerate: bool,
    /// W = ∂t + U in (t, x₁, x₂, x₃) components.
    pub w: [f64; 4],
}

/// μ = iφ_v/φ_z (equivalently −iφ_z̄/φ_w) in the null coordinates
/// v = x₁ + t, w = x₁ − t, z = x₂ + i x₃; for degenerate φ, W is the
/// Minkowski dual of the real line spanned by dφ.
pub fn sfr_from_hm(phi: &FieldExpr, p: &Point4C) -> Result<HmDirection> {
    let slice = SliceSpec::new(SliceKind::M4, *p);
    let phi = phi.resolve_conj(&slice)?;
    let jet = phi.eval_jet(p, BranchSign::Plus)?;
    let (g, _) = jet.slice_derivs(Metric::Minkowski4);
    let scale = g.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if scale <= crate::tolerances::tau_alg() {
        return Err(Error::NotSubmersive);
    }
    let g = g.map(|z| z / scale);
    let re = g.map(|z| z.re);
    let im = g.map(|z| z.im);
    let dot = |a: &[f64; 4], b: &[f64; 4]| (0..4).map(|k| a[k] * b[k]).sum::<f64>();
    let wedge = (dot(&re, &re) * dot(&im, &im) - dot(&re, &im).powi(2)).max(0.0).sqrt();
    let degenerate = wedge <= 1e-8;
    let (mu, w) = if degenerate {
        let a = if dot(&re, &re) >= dot(&im, &im) { re } else { im };
        if a[0].abs() <= 1e-12 {
            return Err(Error::NotSubmersive);
        }
        let s = -1.0 / a[0];
        let u = [a[1] * s, a[2] * s, a[3] * s];
        (mu_of_direction(u), [1.0, u[0], u[1], u[2]])
    } else {
        let dv = 0.5 * (g[1] + g[0]);
        let dw = 0.5 * (g[1] - g[0]);
        let dz = 0.5 * (g[2] - I * g[3]);
        let dzb = 0.5 * (g[2] + I * g[3]);
        let a = MuPair::new(dz, I * dv);
        let b = MuPair::new(dw, -I * dzb);
        let m = if a.norm() >= b.norm() { a } else { b };
        if m.norm() <= 1e-12 {
            return Err(Error::NotSubmersive);
        }
        let m = m.normalized();
        let u = crate::coords::direction_of(&m);
        (m, [1.0, u[0], u[1], u[2]])
    };
    Ok(HmDirection { mu: mu.normalized(), degenerate, w })
}
